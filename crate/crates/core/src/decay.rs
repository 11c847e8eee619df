//! N-term approximation of a cartoon image by shearlet thresholding and by a
//! separable Haar basis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{GridFunction, ShearletSystem2D, Window1D};
use crate::sum::fsum;

/// Disk of radius 1/4 centred in the unit square with quadratic shading,
/// over a smooth periodic background; sampled at cell centres.
pub fn cartoon(n: usize) -> GridFunction {
    let tau = std::f64::consts::TAU;
    GridFunction::from_fn(n, |i, j| {
        let x = (i as f64 + 0.5) / n as f64;
        let y = (j as f64 + 0.5) / n as f64;
        let (dx, dy) = (x - 0.5, y - 0.5);
        let v = if dx * dx + dy * dy < 1.0 / 16.0 {
            1.0 + 0.8 * dx - 1.5 * dy * dy + 0.6 * dx * dy
        } else {
            0.2 + 0.1 * (tau * x).sin() * (tau * y).cos()
        };
        Complex64::new(v, 0.0)
    })
}

/// Orthonormal 2-D Haar transform (Mallat order, full depth) of an
/// `n x n` array, `n` a power of two; row-major in place.
pub fn haar_forward(data: &mut [f64], n: usize) {
    let mut tmp = vec![0.0; n];
    let mut len = n;
    while len > 1 {
        let h = len / 2;
        for r in 0..len {
            for k in 0..h {
                let (a, b) = (data[r * n + 2 * k], data[r * n + 2 * k + 1]);
                tmp[k] = (a + b) / std::f64::consts::SQRT_2;
                tmp[h + k] = (a - b) / std::f64::consts::SQRT_2;
            }
            data[r * n..r * n + len].copy_from_slice(&tmp[..len]);
        }
        for c in 0..len {
            for k in 0..h {
                let (a, b) = (data[2 * k * n + c], data[(2 * k + 1) * n + c]);
                tmp[k] = (a + b) / std::f64::consts::SQRT_2;
                tmp[h + k] = (a - b) / std::f64::consts::SQRT_2;
            }
            for k in 0..len {
                data[k * n + c] = tmp[k];
            }
        }
        len = h;
    }
}

pub fn haar_inverse(data: &mut [f64], n: usize) {
    let mut tmp = vec![0.0; n];
    let mut len = 2;
    while len <= n {
        let h = len / 2;
        for c in 0..len {
            for k in 0..h {
                let (s, d) = (data[k * n + c], data[(h + k) * n + c]);
                tmp[2 * k] = (s + d) / std::f64::consts::SQRT_2;
                tmp[2 * k + 1] = (s - d) / std::f64::consts::SQRT_2;
            }
            for k in 0..len {
                data[k * n + c] = tmp[k];
            }
        }
        for r in 0..len {
            for k in 0..h {
                let (s, d) = (data[r * n + k], data[r * n + h + k]);
                tmp[2 * k] = (s + d) / std::f64::consts::SQRT_2;
                tmp[2 * k + 1] = (s - d) / std::f64::consts::SQRT_2;
            }
            data[r * n..r * n + len].copy_from_slice(&tmp[..len]);
        }
        len *= 2;
    }
}

/// Positions sorted by decreasing magnitude; ties keep position order.
fn ranking(mags: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..mags.len()).collect();
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]));
    order
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub terms: usize,
    /// `||f - f_N||^2` (grid mean).
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub method: String,
    pub total_terms: usize,
    pub points: Vec<DecayPoint>,
    pub monotone: bool,
    /// Least-squares slope of `log error` against `log N` over the budgets.
    pub slope: f64,
}

impl DecayCurve {
    fn new(method: &str, total_terms: usize, points: Vec<DecayPoint>, budgets: &[usize]) -> Self {
        let monotone = points.windows(2).all(|w| w[1].error <= w[0].error);
        let fit: Vec<(f64, f64)> = points
            .iter()
            .filter(|p| budgets.contains(&p.terms) && p.terms > 0 && p.error > 0.0)
            .map(|p| ((p.terms as f64).ln(), p.error.ln()))
            .collect();
        DecayCurve {
            method: method.into(),
            total_terms,
            points,
            monotone,
            slope: slope(&fit),
        }
    }
}

/// Least-squares slope; NaN for fewer than two points.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = fsum(pts.iter().map(|p| p.0)) / n;
    let my = fsum(pts.iter().map(|p| p.1)) / n;
    let sxy = fsum(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)));
    let sxx = fsum(pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)));
    sxy / sxx
}

/// Budgets `0, 2^lo, ..., 2^hi` and the full count, deduplicated.
fn schedule(budgets: &[usize], total: usize) -> Vec<usize> {
    let mut v: Vec<usize> = std::iter::once(0).chain(budgets.iter().map(|&b| b.min(total))).chain([total]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Shearlet N-term curve: keep the `N` largest coefficients of the dense
/// analysis and synthesize.
pub fn shearlet_curve(sys: &ShearletSystem2D, f: &GridFunction, budgets: &[usize]) -> Result<DecayCurve> {
    let dense = sys.analyze_dense(f)?;
    let flat: Vec<(usize, usize)> = dense
        .iter()
        .enumerate()
        .flat_map(|(b, bc)| (0..bc.values.len()).map(move |i| (b, i)))
        .collect();
    let mags: Vec<f64> = flat.iter().map(|&(b, i)| dense[b].values[i].norm()).collect();
    let order = ranking(&mags);
    let total = flat.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut points = Vec::new();
    for n in schedule(budgets, total) {
        let mut kept = dense.clone();
        kept.iter_mut().for_each(|bc| bc.values.iter_mut().for_each(|v| *v = zero));
        for &pos in &order[..n] {
            let (b, i) = flat[pos];
            kept[b].values[i] = dense[b].values[i];
        }
        let fn_ = sys.synthesize_dense(&kept)?;
        points.push(DecayPoint {
            terms: n,
            error: f.sub(&fn_).norm_sqr(),
        });
    }
    Ok(DecayCurve::new("shearlet", total, points, budgets))
}

/// Haar N-term curve on the real part of `f`, synthesized by the inverse
/// transform.
pub fn haar_curve(f: &GridFunction, budgets: &[usize]) -> Result<DecayCurve> {
    let n = f.size();
    if !n.is_power_of_two() {
        return Err(Error::param("n", format!("Haar baseline needs a power of two, got {n}")));
    }
    let real = f.real_parts();
    let mut coeffs = real.clone();
    haar_forward(&mut coeffs, n);
    let mags: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
    let order = ranking(&mags);
    let total = coeffs.len();
    let mut points = Vec::new();
    for budget in schedule(budgets, total) {
        let mut kept = vec![0.0; total];
        for &pos in &order[..budget] {
            kept[pos] = coeffs[pos];
        }
        haar_inverse(&mut kept, n);
        let err = fsum(real.iter().zip(&kept).map(|(a, b)| (a - b) * (a - b))) / total as f64;
        points.push(DecayPoint { terms: budget, error: err });
    }
    Ok(DecayCurve::new("haar", total, points, budgets))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub n: usize,
    pub j_max: u32,
    pub window_order: u32,
    pub budgets: Vec<usize>,
    /// Bound on the relative L^2 error at full budget.
    pub tolerance: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            n: 256,
            j_max: 3,
            window_order: 3,
            budgets: (5..=13).map(|k| 1usize << k).collect(),
            tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub config: DecayConfig,
    pub energy: f64,
    pub shearlet: DecayCurve,
    pub haar: DecayCurve,
    /// `||f - f_full|| / ||f||` for the shearlet system.
    pub full_budget_relative_error: f64,
    pub pass: bool,
}

pub fn decay_demo(cfg: &DecayConfig) -> Result<DecayReport> {
    let sys = ShearletSystem2D::new(cfg.n, cfg.j_max, Window1D::new(cfg.window_order)?)?;
    let f = cartoon(cfg.n);
    let shearlet = shearlet_curve(&sys, &f, &cfg.budgets)?;
    let haar = haar_curve(&f, &cfg.budgets)?;
    let energy = f.norm_sqr();
    let full = shearlet.points.last().map_or(0.0, |p| p.error);
    let full_budget_relative_error = (full / energy).sqrt();
    let pass = shearlet.monotone && haar.monotone && full_budget_relative_error <= cfg.tolerance;
    Ok(DecayReport {
        config: cfg.clone(),
        energy,
        shearlet,
        haar,
        full_budget_relative_error,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_round_trip_and_energy() {
        let n = 16;
        let orig: Vec<f64> = (0..n * n).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let mut d = orig.clone();
        haar_forward(&mut d, n);
        let e0 = fsum(orig.iter().map(|x| x * x));
        let e1 = fsum(d.iter().map(|x| x * x));
        assert!((e0 - e1).abs() < 1e-12 * e0);
        haar_inverse(&mut d, n);
        for (a, b) in orig.iter().zip(&d) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_image_is_one_haar_term() {
        let f = GridFunction::from_fn(8, |_, _| Complex64::new(2.0, 0.0));
        let c = haar_curve(&f, &[1]).unwrap();
        assert_eq!(c.points[0].error, 4.0);
        assert!(c.points[1].error < 1e-28);
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| ((k as f64).ln(), -2.0 * (k as f64).ln() + 0.5)).collect();
        assert!((slope(&pts) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn small_demo_is_monotone() {
        let cfg = DecayConfig {
            n: 64,
            j_max: 2,
            budgets: vec![16, 64, 256],
            ..Default::default()
        };
        let r = decay_demo(&cfg).unwrap();
        assert_eq!(r.shearlet.points[0].error, r.energy);
        assert!(r.haar.monotone, "{:?}", r.haar);
        assert!(r.full_budget_relative_error < 1e-8, "{}", r.full_budget_relative_error);
    }
}
