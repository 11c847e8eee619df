//! Pointwise bounds for `S^gamma_Gamma`, and democracy of the b and f
//! sequence spaces: exact for `b^{s,p}_p`, up to constants for `f^{s,q}_p`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{extreme_cube_at, Extreme, IndexSet, MeasureSpec, ShearIndex};
use crate::spaces::{besov_norm, tl_norm, CoeffSeq, SpaceParams, TlMethod};
use crate::sum::fsum;

/// `(d - 1) / (d + 1)`.
pub fn critical_exponent(d: usize) -> f64 {
    (d as f64 - 1.0) / (d as f64 + 1.0)
}

/// `S^gamma_Gamma(x) = sum_{P in Gamma, x in P} |P|^gamma`.
pub fn s_gamma(gamma: &IndexSet, g: f64, x: &[Dyadic]) -> f64 {
    fsum(gamma.iter().filter(|q| q.contains(x)).map(|q| q.measure_pow(g)))
}

/// Bound on the number of cubes of one scale `j` that contain a point:
/// `C_d 2^{j(d-1)}` with `C_d = d 3^{d-1} + 1` (every cone contributes at
/// most `(2^{j+1}+1)^{d-1} <= 3^{d-1} 2^{j(d-1)}` shears, plus one coarse
/// translate at `j = 0`).
pub fn scale_count_constant(d: usize) -> f64 {
    d as f64 * 3f64.powi(d as i32 - 1) + 1.0
}

/// `C_{d,gamma} = C_d / (1 - 2^{-|(d+1) gamma - (d-1)|})`, the geometric-series
/// constant of both cases.
pub fn lemma31_constant(d: usize, g: f64) -> f64 {
    let e = (d as f64 + 1.0) * g - (d as f64 - 1.0);
    scale_count_constant(d) / (1.0 - (-e.abs()).exp2())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Report {
    pub gamma: f64,
    /// `largest` when `gamma > (d-1)/(d+1)`, else `smallest`.
    pub mode: Extreme,
    pub constant: f64,
    pub samples: usize,
    /// Samples not covered by any member of `Gamma`.
    pub skipped: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// `max |P|^gamma / S` (at most 1 when the lower bound holds).
    pub max_lower_ratio: f64,
    /// `max S / (C |P|^{gamma - (d-1)/(d+1)})` (at most 1 when the upper bound
    /// holds).
    pub max_upper_ratio: f64,
    pub pass: bool,
}

impl Lemma31Report {
    /// Combine reports for the same `gamma`.
    pub fn merge(mut self, other: &Lemma31Report) -> Lemma31Report {
        self.samples += other.samples;
        self.skipped += other.skipped;
        self.lower_violations += other.lower_violations;
        self.upper_violations += other.upper_violations;
        self.max_lower_ratio = self.max_lower_ratio.max(other.max_lower_ratio);
        self.max_upper_ratio = self.max_upper_ratio.max(other.max_upper_ratio);
        self.pass &= other.pass;
        self
    }
}

/// Check `|P|^gamma <= S^gamma_Gamma(x) <= C_{d,gamma} |P|^{gamma-(d-1)/(d+1)}`
/// at every sample, with `P` the largest cube of `Gamma` containing `x` when
/// `gamma` is above the critical exponent and a smallest one below it.
pub fn lemma31_check(gamma: &IndexSet, g: f64, samples: &[Vec<Dyadic>]) -> Result<Lemma31Report> {
    let d = gamma.dim().unwrap_or(2);
    let crit = critical_exponent(d);
    if g == crit || !g.is_finite() {
        return Err(Error::param("gamma", format!("{g} must differ from (d-1)/(d+1) = {crit}")));
    }
    let mode = if g > crit { Extreme::Largest } else { Extreme::Smallest };
    let constant = lemma31_constant(d, g);
    let mut rep = Lemma31Report {
        gamma: g,
        mode,
        constant,
        samples: samples.len(),
        skipped: 0,
        lower_violations: 0,
        upper_violations: 0,
        max_lower_ratio: 0.0,
        max_upper_ratio: 0.0,
        pass: true,
    };
    for x in samples {
        let Some(p) = extreme_cube_at(x, gamma, mode) else {
            rep.skipped += 1;
            continue;
        };
        let s = s_gamma(gamma, g, x);
        let lower = p.measure_pow(g);
        let upper = constant * p.measure_pow(g - crit);
        if lower > s {
            rep.lower_violations += 1;
        }
        if s > upper {
            rep.upper_violations += 1;
        }
        rep.max_lower_ratio = rep.max_lower_ratio.max(lower / s);
        rep.max_upper_ratio = rep.max_upper_ratio.max(s / upper);
    }
    rep.pass = rep.lower_violations == 0 && rep.upper_violations == 0;
    Ok(rep)
}

/// `alpha = p1 (s2 - 1/p2 - s1 + 1/p1)`.
pub fn alpha(par1: &SpaceParams, par2: &SpaceParams) -> f64 {
    par1.p * (par2.s - 1.0 / par2.p - par1.s + 1.0 / par1.p)
}

/// `sum_{P in Gamma} e_P / u_P` with `u` the canonical weight of `par2`.
pub fn normalized_sum(gamma: &IndexSet, par2: &SpaceParams) -> CoeffSeq {
    let e = par2.canonical_exponent();
    gamma.iter().map(|q| (q.clone(), (1.0 / q.measure_pow(e)).into())).collect()
}

fn reject_coarse(gamma: &IndexSet) -> Result<()> {
    match gamma.iter().find(|q| q.is_coarse()) {
        Some(q) => Err(Error::InvalidIndex {
            index: q.to_string(),
            reason: "democracy is stated over band cubes only".into(),
        }),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemocracyReport {
    pub size: usize,
    pub par1: SpaceParams,
    pub par2: SpaceParams,
    pub alpha: f64,
    /// `||sum e_P / u_P||_{f1}`.
    pub norm: f64,
    /// `nu_{alpha+(d-1)/(d+1)}(Gamma)^{1/p1}`.
    pub lower_measure: f64,
    /// `nu_{alpha-p1(d-1)/(q1(d+1))}(Gamma)^{1/p1}`.
    pub upper_measure: f64,
    /// `norm / lower_measure`; bounded below by the lower constant `C`.
    pub lower_ratio: f64,
    /// `norm / upper_measure`; bounded above by the upper constant `C'`.
    pub upper_ratio: f64,
}

impl DemocracyReport {
    pub fn within(&self, band: &DemocracyBand) -> bool {
        self.lower_ratio >= band.lower && self.upper_ratio <= band.upper
    }
}

/// Exponents of the two measures bracketing the f-norm.
pub fn democracy_exponents(d: usize, par1: &SpaceParams, par2: &SpaceParams) -> (f64, f64) {
    let a = alpha(par1, par2);
    let crit = critical_exponent(d);
    let upper = if par1.q.is_infinite() { a } else { a - par1.p * crit / par1.q };
    (a + crit, upper)
}

/// The f-norm of `sum e_P / u_P` against the two measures of the band
/// democracy bounds.
pub fn democracy_ratio(gamma: &IndexSet, par1: &SpaceParams, par2: &SpaceParams) -> Result<DemocracyReport> {
    par1.validate()?;
    par2.validate()?;
    reject_coarse(gamma)?;
    if gamma.is_empty() {
        return Err(Error::param("gamma", "empty index set"));
    }
    let d = gamma.dim().unwrap_or(2);
    let (lo_exp, up_exp) = democracy_exponents(d, par1, par2);
    let norm = tl_norm(&normalized_sum(gamma, par2), par1, TlMethod::ExactOverlay)?;
    let lower_measure = MeasureSpec::new(lo_exp).nu(gamma).powf(1.0 / par1.p);
    let upper_measure = MeasureSpec::new(up_exp).nu(gamma).powf(1.0 / par1.p);
    if !upper_measure.is_finite() || !lower_measure.is_finite() {
        return Err(Error::param("gamma", "measure is not finite"));
    }
    Ok(DemocracyReport {
        size: gamma.len(),
        par1: *par1,
        par2: *par2,
        alpha: alpha(par1, par2),
        norm,
        lower_measure,
        upper_measure,
        lower_ratio: norm / lower_measure,
        upper_ratio: norm / upper_measure,
    })
}

/// Empirical democracy constants: `C = min lower_ratio`, `C' = max upper_ratio`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemocracyBand {
    pub lower: f64,
    pub upper: f64,
}

impl DemocracyBand {
    pub fn calibrate(reports: &[DemocracyReport]) -> DemocracyBand {
        DemocracyBand {
            lower: reports.iter().map(|r| r.lower_ratio).fold(f64::INFINITY, f64::min),
            upper: reports.iter().map(|r| r.upper_ratio).fold(0.0, f64::max),
        }
    }

    /// Largest relative change of either constant.
    pub fn drift(&self, other: &DemocracyBand) -> f64 {
        ((other.lower - self.lower) / self.lower)
            .abs()
            .max(((other.upper - self.upper) / self.upper).abs())
    }

    /// The band widened by a relative margin on both sides.
    pub fn widened(&self, margin: f64) -> DemocracyBand {
        DemocracyBand {
            lower: self.lower * (1.0 - margin),
            upper: self.upper * (1.0 + margin),
        }
    }
}

/// Reports for every index set of a corpus, in corpus order.
pub fn democracy_corpus(corpus: &[IndexSet], par1: &SpaceParams, par2: &SpaceParams) -> Result<Vec<DemocracyReport>> {
    corpus.par_iter().map(|g| democracy_ratio(g, par1, par2)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovDemocracy {
    pub alpha: f64,
    /// `||sum e_P / u_P||_{b^{s1,p1}_{p1}}`.
    pub norm: f64,
    /// `nu_alpha(Gamma)^{1/p1}`.
    pub measure: f64,
    /// `|norm - measure| / measure`.
    pub defect: f64,
}

/// Compare `||sum e_P/u_P||_{b^{s1,p1}_{p1}}` with `nu_alpha(Gamma)^{1/p1}` for
/// a given `alpha`.
pub fn besov_democracy_at(gamma: &IndexSet, par1: &SpaceParams, par2: &SpaceParams, alpha: f64) -> Result<BesovDemocracy> {
    par1.validate()?;
    par2.validate()?;
    reject_coarse(gamma)?;
    let b1 = SpaceParams::new(par1.s, par1.p, par1.p)?;
    let norm = besov_norm(&normalized_sum(gamma, par2), &b1);
    let measure = MeasureSpec::new(alpha).nu(gamma).powf(1.0 / par1.p);
    let defect = if measure == 0.0 { norm } else { (norm - measure).abs() / measure };
    Ok(BesovDemocracy {
        alpha,
        norm,
        measure,
        defect,
    })
}

/// Exact democracy of `b^{s1,p1}_{p1}` with `alpha = p1 (s2 - 1/p2 - s1 + 1/p1)`;
/// `par1.q` is ignored.
pub fn besov_democracy_exact(gamma: &IndexSet, par1: &SpaceParams, par2: &SpaceParams) -> Result<BesovDemocracy> {
    besov_democracy_at(gamma, par1, par2, alpha(par1, par2))
}

/// `Gamma_N^{j,l}`: the `N^2` cubes of band `(cone, j, l)` with translates in
/// `[0, N)^2`.
pub fn block_family(cone: u8, j: u32, shear: i64, n: i64) -> Result<IndexSet> {
    let mut g = IndexSet::new();
    for k1 in 0..n {
        for k2 in 0..n {
            g.insert(ShearIndex::cone(cone, j, vec![shear], vec![k1, k2])?)?;
        }
    }
    Ok(g)
}

/// `(2^{-j(d+1)})^{gamma/q1} [N^d 2^{-j(d+1)}]^{1/p1}` with
/// `gamma = q1 (s2 - s1 - 1/p2)`: the f-norm of the normalized block sum.
pub fn block_family_norm(d: usize, j: u32, n: i64, par1: &SpaceParams, par2: &SpaceParams) -> f64 {
    let m = (-((d as f64 + 1.0) * j as f64)).exp2();
    m.powf(par2.s - par1.s - 1.0 / par2.p) * ((n as f64).powi(d as i32) * m).powf(1.0 / par1.p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaProbe {
    pub alpha: f64,
    /// Least-squares slope of `log2(upper ratio)` against `j`.
    pub upper_slope: f64,
    /// Least-squares slope of `log2(lower ratio)` against `j`.
    pub lower_slope: f64,
    /// Both ratios stay bounded away from 0 and infinity in `j`.
    pub admissible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaScan {
    pub alpha_center: f64,
    /// Window implied by the block-family exponents:
    /// `[alpha - (d-1)/(d+1), alpha + p1 (d-1)/(q1 (d+1))]`.
    pub predicted: (f64, f64),
    /// Smallest and largest admissible probe.
    pub empirical: Option<(f64, f64)>,
    /// Largest relative deviation of a computed block norm from its closed form.
    pub closed_form_defect: f64,
    pub probes: Vec<AlphaProbe>,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Probe which exponents `alpha'` keep the democracy bounds
/// `C nu_{alpha'+(d-1)/(d+1)}^{1/p1} <= ||.|| <= C' nu_{alpha'-p1(d-1)/(q1(d+1))}^{1/p1}`
/// uniform over the block families `Gamma_N^{j,0}` of cone 1. A probe is
/// admissible when neither ratio drifts in `j` (slopes within `1e-9`).
pub fn converse_alpha_scan(
    par1: &SpaceParams,
    par2: &SpaceParams,
    j_range: std::ops::RangeInclusive<u32>,
    n_range: &[i64],
    probes: &[f64],
) -> Result<AlphaScan> {
    const D: usize = 2;
    let crit = critical_exponent(D);
    let center = alpha(par1, par2);
    let q_term = if par1.q.is_infinite() { 0.0 } else { par1.p * crit / par1.q };
    let js: Vec<u32> = j_range.collect();
    if js.len() < 2 || n_range.is_empty() {
        return Err(Error::param("j_range", "need at least two scales and one block size"));
    }
    // computed norms, one per (j, N)
    let mut defect: f64 = 0.0;
    let mut norms = Vec::new();
    for &j in &js {
        for &n in n_range {
            let gamma = block_family(1, j, 0, n)?;
            let norm = tl_norm(&normalized_sum(&gamma, par2), par1, TlMethod::ExactOverlay)?;
            let closed = block_family_norm(D, j, n, par1, par2);
            defect = defect.max((norm - closed).abs() / closed);
            norms.push((j, n, norm, gamma));
        }
    }
    let mut out = Vec::new();
    for &a in probes {
        let mut up = Vec::new();
        let mut lo = Vec::new();
        let mut xs = Vec::new();
        for (j, _, norm, gamma) in &norms {
            let nu_up = MeasureSpec::new(a - q_term).nu(gamma).powf(1.0 / par1.p);
            let nu_lo = MeasureSpec::new(a + crit).nu(gamma).powf(1.0 / par1.p);
            xs.push(*j as f64);
            up.push((norm / nu_up).log2());
            lo.push((norm / nu_lo).log2());
        }
        let upper_slope = slope(&xs, &up);
        let lower_slope = slope(&xs, &lo);
        out.push(AlphaProbe {
            alpha: a,
            upper_slope,
            lower_slope,
            admissible: upper_slope <= 1e-9 && lower_slope >= -1e-9,
        });
    }
    let adm: Vec<f64> = out.iter().filter(|p| p.admissible).map(|p| p.alpha).collect();
    let empirical = if adm.is_empty() {
        None
    } else {
        Some((adm.iter().copied().fold(f64::INFINITY, f64::min), adm.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
    };
    Ok(AlphaScan {
        alpha_center: center,
        predicted: (center - crit, center + q_term),
        empirical,
        closed_form_defect: defect,
        probes: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(j: u32, l: i64, k: [i64; 2]) -> ShearIndex {
        ShearIndex::cone(1, j, vec![l], k.to_vec()).unwrap()
    }

    #[test]
    fn s_gamma_single_cube() {
        let q = cone(1, 0, [0, 0]);
        let g = IndexSet::try_from_iter([q]).unwrap();
        let x = vec![Dyadic::new(1, 3), Dyadic::new(1, 3)];
        assert_eq!(s_gamma(&g, 2.0, &x), (-6f64).exp2());
        let far = vec![Dyadic::from(5), Dyadic::from(5)];
        assert_eq!(s_gamma(&g, 2.0, &far), 0.0);
    }

    #[test]
    fn lemma31_single_cube_is_tight_below() {
        let g = IndexSet::try_from_iter([cone(2, 1, [0, 0])]).unwrap();
        let x = vec![Dyadic::new(1, 6), Dyadic::new(1, 5)];
        for gm in [0.2, 0.6] {
            let r = lemma31_check(&g, gm, std::slice::from_ref(&x)).unwrap();
            assert!(r.pass);
            assert_eq!(r.max_lower_ratio, 1.0);
        }
        assert!(lemma31_check(&g, 1.0 / 3.0, &[x]).is_err());
    }

    #[test]
    fn single_cube_democracy() {
        let par1 = SpaceParams::new(0.0, 1.0, 2.0).unwrap();
        let par2 = SpaceParams::new(0.5, 2.0, 2.0).unwrap();
        let q = cone(2, 1, [0, 0]);
        let r = democracy_ratio(&IndexSet::try_from_iter([q.clone()]).unwrap(), &par1, &par2).unwrap();
        let want = q.measure_pow(par2.s - par1.s - 1.0 / par2.p + 1.0 / par1.p);
        assert!((r.norm - want).abs() < 1e-14 * want);
        assert!(r.lower_ratio >= 1.0 - 1e-14 && r.upper_ratio <= 1.0 + 1e-14);
    }

    #[test]
    fn besov_democracy_single_cube() {
        let par1 = SpaceParams::new(0.0, 1.0, 1.0).unwrap();
        let par2 = SpaceParams::new(0.5, 2.0, 1.0).unwrap();
        let g = IndexSet::try_from_iter([cone(3, 2, [1, 1])]).unwrap();
        assert!(besov_democracy_exact(&g, &par1, &par2).unwrap().defect < 1e-15);
        let coarse = IndexSet::try_from_iter([ShearIndex::coarse(vec![0, 0])]).unwrap();
        assert!(besov_democracy_exact(&coarse, &par1, &par2).is_err());
    }
}
