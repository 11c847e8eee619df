use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ShearIndex;
use crate::spaces::besov::coarse_term;
use crate::spaces::polygon::{Overlay, Polygon};
use crate::spaces::{CoeffSeq, SpaceParams};
use crate::sum::fsum;

/// How the `L^p` integral of the f-norm is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TlMethod {
    /// Exact arrangement of the cube polygons (d = 2).
    ExactOverlay,
    /// Midpoint rule on an `M x M` grid over the bounding box of the support.
    Grid(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TlReport {
    pub value: f64,
    pub method: TlMethod,
    /// Arrangement cells (overlay) or grid points (grid).
    pub cells: usize,
    /// Side lengths of one grid cell; `None` for the exact overlay.
    pub cell_size: Option<[f64; 2]>,
}

/// `||c||_{f^{s,q}_p}`: the `l^p` norm of the coarse coefficients plus
/// `|| (sum_Q (|Q|^{-s-1/2} |c_Q| chi_Q)^q)^{1/q} ||_{L^p}`.
pub fn tl_norm(c: &CoeffSeq, par: &SpaceParams, method: TlMethod) -> Result<f64> {
    tl_norm_report(c, par, method).map(|r| r.value)
}

pub fn tl_norm_report(c: &CoeffSeq, par: &SpaceParams, method: TlMethod) -> Result<TlReport> {
    par.validate()?;
    let items = weighted_cubes(c, par);
    if let Some(d) = c.dim() {
        if d != 2 && !items.is_empty() {
            return Err(Error::Unsupported(format!("f-norm integration in dimension {d}")));
        }
    }
    let (integral, cells, cell_size) = match method {
        TlMethod::ExactOverlay => {
            let (v, n) = overlay_integral(&items, par);
            (v, n, None)
        }
        TlMethod::Grid(m) => {
            if m == 0 {
                return Err(Error::param("grid", "M must be positive"));
            }
            let (v, h) = grid_integral(&items, par, m);
            (v, m * m, h)
        }
    };
    let value = coarse_term(c, par.p) + integral.powf(1.0 / par.p);
    Ok(TlReport {
        value,
        method,
        cells,
        cell_size,
    })
}

/// Band cubes with their weighted amplitudes `|Q|^{-s-1/2} |c_Q|`; zeros are
/// dropped.
fn weighted_cubes<'a>(c: &'a CoeffSeq, par: &SpaceParams) -> Vec<(&'a ShearIndex, f64)> {
    c.magnitudes()
        .filter(|(q, a)| !q.is_coarse() && *a != 0.0)
        .map(|(q, a)| (q, q.measure_pow(-par.s - 0.5) * a))
        .collect()
}

fn pointwise(par: &SpaceParams) -> (impl Fn(f64, f64) -> f64, impl Fn(f64) -> f64) {
    let q = par.q;
    let p = par.p;
    let combine = move |acc: f64, v: f64| if q.is_infinite() { acc.max(v) } else { acc + v.powf(q) };
    // acc -> g(x)^p
    let finish = move |acc: f64| if q.is_infinite() { acc.powf(p) } else { acc.powf(p / q) };
    (combine, finish)
}

fn overlay_integral(items: &[(&ShearIndex, f64)], par: &SpaceParams) -> (f64, usize) {
    let (combine, finish) = pointwise(par);
    let mut ov = Overlay::new();
    for (q, v) in items {
        ov.add(Polygon::of_cube(q), *v, &combine);
    }
    let terms: Vec<f64> = ov.cells().map(|(area, acc)| area * finish(acc)).collect();
    (fsum(terms), ov.len())
}

fn grid_integral(items: &[(&ShearIndex, f64)], par: &SpaceParams, m: usize) -> (f64, Option<[f64; 2]>) {
    if items.is_empty() {
        return (0.0, None);
    }
    let (combine, finish) = pointwise(par);
    let cubes: Vec<([f64; 4], [[f64; 2]; 2], [f64; 2], f64)> = items
        .iter()
        .map(|(q, v)| {
            let p = Polygon::of_cube(q);
            let mm = q.forward_matrix();
            let k = q.translate();
            let mat = [[mm[0][0] as f64, mm[0][1] as f64], [mm[1][0] as f64, mm[1][1] as f64]];
            (p.bbox(), mat, [k[0] as f64, k[1] as f64], *v)
        })
        .collect();
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for (cb, ..) in &cubes {
        b[0] = b[0].min(cb[0]);
        b[1] = b[1].min(cb[1]);
        b[2] = b[2].max(cb[2]);
        b[3] = b[3].max(cb[3]);
    }
    let h = [(b[2] - b[0]) / m as f64, (b[3] - b[1]) / m as f64];
    let rows: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let x = b[0] + (i as f64 + 0.5) * h[0];
            let mut acc = vec![0.0f64; m];
            for (cb, mat, k, v) in &cubes {
                if x < cb[0] || x > cb[2] {
                    continue;
                }
                let lo = (((cb[1] - b[1]) / h[1]).floor().max(0.0)) as usize;
                let hi = ((((cb[3] - b[1]) / h[1]).ceil()) as usize).min(m);
                for (jj, a) in acc.iter_mut().enumerate().take(hi).skip(lo) {
                    let y = b[1] + (jj as f64 + 0.5) * h[1];
                    let u0 = mat[0][0] * x + mat[0][1] * y;
                    let u1 = mat[1][0] * x + mat[1][1] * y;
                    if u0.floor() == k[0] && u1.floor() == k[1] {
                        *a = combine(*a, *v);
                    }
                }
            }
            fsum(acc.iter().filter(|&&a| a != 0.0).map(|&a| finish(a)))
        })
        .collect();
    (fsum(rows) * h[0] * h[1], Some(h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(j: u32, l: i64, k: [i64; 2]) -> ShearIndex {
        ShearIndex::cone(1, j, vec![l], k.to_vec()).unwrap()
    }

    #[test]
    fn single_cube_any_q() {
        let q = cone(2, 1, [3, -1]);
        let c = CoeffSeq::single(q.clone(), 1.0.into()).unwrap();
        for qq in [0.5, 1.0, 4.0, f64::INFINITY] {
            let par = SpaceParams::new(0.3, 1.7, qq).unwrap();
            let got = tl_norm(&c, &par, TlMethod::ExactOverlay).unwrap();
            let want = q.measure_pow(par.canonical_exponent());
            assert!((got - want).abs() < 1e-13 * want, "q = {qq}: {got} vs {want}");
        }
    }

    #[test]
    fn disjoint_cubes_add_in_lp() {
        let par = SpaceParams::new(0.5, 3.0, 0.7).unwrap();
        let (a, b) = (cone(1, 0, [0, 0]), cone(1, 0, [1, 0]));
        let mut c = CoeffSeq::new();
        c.insert_real(a.clone(), 2.0).unwrap();
        c.insert_real(b, -2.0).unwrap();
        let got = tl_norm(&c, &par, TlMethod::ExactOverlay).unwrap();
        let want = 2f64.powf(1.0 / 3.0) * 2.0 * a.measure_pow(par.canonical_exponent());
        assert!((got - want).abs() < 1e-13 * want);
    }

    #[test]
    fn three_dimensional_sequences_are_unsupported() {
        let q = ShearIndex::cone(1, 0, vec![0, 0], vec![0, 0, 0]).unwrap();
        let c = CoeffSeq::single(q, 1.0.into()).unwrap();
        let par = SpaceParams::new(0.0, 1.0, 1.0).unwrap();
        assert!(matches!(tl_norm(&c, &par, TlMethod::ExactOverlay), Err(Error::Unsupported(_))));
    }

    #[test]
    fn grid_approaches_overlay() {
        let par = SpaceParams::new(0.2, 1.5, 2.0).unwrap();
        let mut c = CoeffSeq::new();
        c.insert_real(cone(0, 1, [0, 0]), 1.0).unwrap();
        c.insert_real(cone(1, -2, [1, 1]), 0.5).unwrap();
        let exact = tl_norm(&c, &par, TlMethod::ExactOverlay).unwrap();
        let grid = tl_norm(&c, &par, TlMethod::Grid(512)).unwrap();
        assert!((exact - grid).abs() < 2e-2 * exact, "{exact} vs {grid}");
    }
}
