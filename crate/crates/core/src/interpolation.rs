//! Upper bounds for the K-functional of sequence-space pairs, real
//! interpolation norms bracketed on a geometric grid, and the empirical
//! interpolation identities for approximation, Lorentz and Besov spaces.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::IndexSet;
use crate::rnla::{approx_space_norm, ApproxParams, ErrorSpace, Oracle};
use crate::spaces::{besov_norm, lorentz_norm, CoeffSeq, SpaceParams, WeightSeq};
use crate::sum::fsum;

/// Ratio between consecutive grid points.
pub const GRID_RATIO_LOG2: f64 = 0.25;
/// Tail contributions must fall below this fraction of the grid part.
pub const TAIL_TOLERANCE: f64 = 1e-4;
/// The grid never leaves `[2^-MAX_LOG2_T, 2^MAX_LOG2_T]`.
pub const MAX_LOG2_T: i32 = 120;

/// A quasi-normed sequence space evaluable on finitely supported sequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceDesc {
    Besov(SpaceParams),
    Lorentz {
        weight: WeightSeq,
        beta: f64,
        p: f64,
        #[serde(with = "crate::spaces::ext_real_serde")]
        mu: f64,
    },
    /// `A^xi_mu(error, nu_beta)`.
    Approx {
        error: ErrorSpace,
        beta: f64,
        params: ApproxParams,
        oracle: Oracle,
    },
}

impl SpaceDesc {
    pub fn norm(&self, s: &CoeffSeq) -> Result<f64> {
        match self {
            SpaceDesc::Besov(par) => Ok(besov_norm(s, par)),
            SpaceDesc::Lorentz { weight, beta, p, mu } => lorentz_norm(s, weight, *beta, *p, *mu),
            SpaceDesc::Approx {
                error,
                beta,
                params,
                oracle,
            } => approx_space_norm(s, error, *beta, params, *oracle),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacePair {
    pub x: SpaceDesc,
    pub y: SpaceDesc,
}

impl SpacePair {
    pub fn new(x: SpaceDesc, y: SpaceDesc) -> Self {
        SpacePair { x, y }
    }

    pub fn swapped(&self) -> Self {
        SpacePair {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

/// Splittings `s = (s - g) + g` searched for the K-functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitFamily {
    /// `g = s|_Gamma` with `Gamma` a prefix or the complement of a prefix of
    /// the support ordered by `||s_Q e_Q||_X`, `||s_Q e_Q||_Y` or `|s_Q|`.
    Threshold,
    /// Threshold splits plus a proportional split `lambda s_Q e_Q` of the
    /// boundary item, `lambda` chosen by golden section.
    ThresholdShrink,
}

impl std::str::FromStr for SplitFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threshold" => Ok(SplitFamily::Threshold),
            "threshold_shrink" | "threshold+shrink" => Ok(SplitFamily::ThresholdShrink),
            other => Err(Error::param("family", format!("unknown splitting family `{other}`"))),
        }
    }
}

const GOLDEN_STEPS: usize = 48;

fn golden_min(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..GOLDEN_STEPS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(fc.min(fd))
}

/// Precomputed splitting family of one sequence.
pub struct KFunctional {
    s: CoeffSeq,
    pair: SpacePair,
    family: SplitFamily,
    /// `(||s - g||_X, ||g||_Y)` for every threshold split.
    pairs: Vec<(f64, f64)>,
    /// Support positions in each ordering.
    orders: Vec<Vec<usize>>,
    support: Vec<crate::geometry::ShearIndex>,
}

impl KFunctional {
    pub fn new(s: &CoeffSeq, pair: &SpacePair, family: SplitFamily) -> Result<Self> {
        let s = s.pruned();
        let support: Vec<_> = s.support().iter().cloned().collect();
        let n = support.len();
        let single = |i: usize, desc: &SpaceDesc| -> Result<f64> {
            desc.norm(&CoeffSeq::single(support[i].clone(), s.get(&support[i]))?)
        };
        let keys: Vec<Vec<f64>> = vec![
            (0..n).map(|i| single(i, &pair.x)).collect::<Result<_>>()?,
            (0..n).map(|i| single(i, &pair.y)).collect::<Result<_>>()?,
            support.iter().map(|q| s.get(q).norm()).collect(),
        ];
        let orders: Vec<Vec<usize>> = keys
            .iter()
            .map(|k| {
                let mut o: Vec<usize> = (0..n).collect();
                o.sort_by(|&a, &b| k[b].total_cmp(&k[a]));
                o
            })
            .collect();
        // kept sets as sorted position lists; prefixes and their complements
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for o in &orders {
            for k in 0..=n {
                let mut pre = o[..k].to_vec();
                let mut post = o[k..].to_vec();
                pre.sort_unstable();
                post.sort_unstable();
                sets.insert(pre);
                sets.insert(post);
            }
        }
        let sets: Vec<Vec<usize>> = sets.into_iter().collect();
        let pairs = sets
            .par_iter()
            .map(|kept| {
                let g = IndexSet::try_from_iter(kept.iter().map(|&i| support[i].clone()))?;
                Ok((pair.x.norm(&s.without(&g))?, pair.y.norm(&s.restrict(&g))?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KFunctional {
            s,
            pair: pair.clone(),
            family,
            pairs,
            orders,
            support,
        })
    }

    /// Number of threshold splits.
    pub fn family_size(&self) -> usize {
        self.pairs.len()
    }

    /// `||s||_X`, the limit of K as `t -> inf`.
    pub fn x_norm(&self) -> f64 {
        self.pairs.iter().filter(|p| p.1 == 0.0).map(|p| p.0).fold(f64::INFINITY, f64::min)
    }

    /// `||s||_Y`, the slope of K at 0.
    pub fn y_norm(&self) -> f64 {
        self.pairs.iter().filter(|p| p.0 == 0.0).map(|p| p.1).fold(f64::INFINITY, f64::min)
    }

    /// Threshold part of the bound; piecewise linear, concave, nondecreasing.
    pub fn threshold_value(&self, t: f64) -> f64 {
        self.pairs.iter().map(|(a, b)| a + t * b).fold(f64::INFINITY, f64::min)
    }

    /// `min over the family of ||s - g||_X + t ||g||_Y`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::param("t", format!("{t} must be positive")));
        }
        let mut best = self.threshold_value(t);
        if self.family == SplitFamily::ThresholdShrink {
            best = best.min(self.shrink_value(t)?);
        }
        Ok(best)
    }

    fn shrink_value(&self, t: f64) -> Result<f64> {
        let mut best = f64::INFINITY;
        for o in &self.orders {
            for k in 0..o.len() {
                let pre = IndexSet::try_from_iter(o[..k].iter().map(|&i| self.support[i].clone()))?;
                let q = &self.support[o[k]];
                let v = self.s.get(q);
                // g = s|pre + lambda s_q e_q and its complement s - g
                let base = self.s.restrict(&pre);
                let split = |lambda: f64| -> Result<(CoeffSeq, CoeffSeq)> {
                    let mut g = base.clone();
                    g.insert(q.clone(), v * lambda)?;
                    let h = self.s.add(&g.scaled((-1.0).into()))?.pruned();
                    Ok((g.pruned(), h))
                };
                let forward = |lambda: f64| -> Result<f64> {
                    let (g, h) = split(lambda)?;
                    Ok(self.pair.x.norm(&h)? + t * self.pair.y.norm(&g)?)
                };
                let backward = |lambda: f64| -> Result<f64> {
                    let (g, h) = split(lambda)?;
                    Ok(self.pair.x.norm(&g)? + t * self.pair.y.norm(&h)?)
                };
                best = best.min(golden_min(forward)?).min(golden_min(backward)?);
            }
        }
        Ok(best)
    }
}

/// `min over the family of ||s - g||_X + t ||g||_Y`, an upper bound on
/// `K(s, t; X, Y)`.
pub fn k_functional_upper(s: &CoeffSeq, t: f64, pair: &SpacePair, family: SplitFamily) -> Result<f64> {
    KFunctional::new(s, pair, family)?.value(t)
}

/// Two-sided bracket of `(int_0^inf [t^-theta K(s,t)]^q dt/t)^{1/q}` for the
/// family bound `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpBand {
    pub lower: f64,
    pub upper: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub grid_points: usize,
    /// False if the range cap was reached before the tails became negligible.
    pub converged: bool,
}

impl InterpBand {
    fn zero() -> Self {
        InterpBand {
            lower: 0.0,
            upper: 0.0,
            t_min: 0.0,
            t_max: 0.0,
            grid_points: 0,
            converged: true,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

fn check_interp(theta: f64, q: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param("theta", format!("{theta} not in (0, 1)")));
    }
    if !(q > 0.0) {
        return Err(Error::param("q", format!("{q} not in (0, inf]")));
    }
    Ok(())
}

/// `|s|_{(X,Y)_{theta,q}}` bracketed on the grid `t = 2^{k/4}`. On a cell
/// `[t_k, t_{k+1}]` the monotone `K` lies between its endpoint values; below
/// the grid `t K(t_min)/t_min <= K(t) <= t ||s||_Y`, above it
/// `K(t_max) <= K(t) <= ||s||_X`.
pub fn interp_norm(s: &CoeffSeq, theta: f64, q: f64, pair: &SpacePair, family: SplitFamily) -> Result<InterpBand> {
    check_interp(theta, q)?;
    if s.pruned().is_empty() {
        return Ok(InterpBand::zero());
    }
    let k = KFunctional::new(s, pair, family)?;
    interp_band(&k, theta, q)
}

pub fn interp_band(k: &KFunctional, theta: f64, q: f64) -> Result<InterpBand> {
    check_interp(theta, q)?;
    let a0 = k.x_norm();
    let bs = k.y_norm();
    if a0 == 0.0 && bs == 0.0 {
        return Ok(InterpBand::zero());
    }
    let steps_per_octave = (1.0 / GRID_RATIO_LOG2).round() as i32;
    let cap = MAX_LOG2_T * steps_per_octave;
    let t_of = |i: i32| (i as f64 * GRID_RATIO_LOG2).exp2();
    let mut cache: std::collections::BTreeMap<i32, f64> = std::collections::BTreeMap::new();
    let (mut lo, mut hi) = (-8 * steps_per_octave, 8 * steps_per_octave);
    loop {
        for i in lo..=hi {
            if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(i) {
                e.insert(k.value(t_of(i))?);
            }
        }
        let kv: Vec<f64> = (lo..=hi).map(|i| cache[&i]).collect();
        let band = grid_band(&kv, lo, theta, q, a0, bs);
        let (low_tail, high_tail, inner) = band.1;
        let lower_ok = low_tail <= TAIL_TOLERANCE * inner || lo <= -cap;
        let upper_ok = high_tail <= TAIL_TOLERANCE * inner || hi >= cap;
        if lower_ok && upper_ok {
            let mut out = band.0;
            out.converged = lo > -cap || low_tail <= TAIL_TOLERANCE * inner;
            out.converged &= hi < cap || high_tail <= TAIL_TOLERANCE * inner;
            return Ok(out);
        }
        if !lower_ok {
            lo = (lo - 8 * steps_per_octave).max(-cap);
        }
        if !upper_ok {
            hi = (hi + 8 * steps_per_octave).min(cap);
        }
    }
}

/// Returns the band and `(lower tail bound, upper tail bound, grid lower sum)`.
fn grid_band(kv: &[f64], lo: i32, theta: f64, q: f64, a0: f64, bs: f64) -> (InterpBand, (f64, f64, f64)) {
    let n = kv.len();
    let t = |i: usize| ((lo + i as i32) as f64 * GRID_RATIO_LOG2).exp2();
    let (t_min, t_max) = (t(0), t(n - 1));
    if q.is_infinite() {
        let lower = (0..n).map(|i| kv[i] * t(i).powf(-theta)).fold(0.0, f64::max);
        let cells = (0..n - 1).map(|i| kv[i + 1] * t(i).powf(-theta)).fold(0.0, f64::max);
        let low_tail = bs * t_min.powf(1.0 - theta);
        let high_tail = a0 * t_max.powf(-theta);
        let upper = cells.max(low_tail).max(high_tail).max(lower);
        let band = InterpBand {
            lower,
            upper,
            t_min,
            t_max,
            grid_points: n,
            converged: true,
        };
        // a tail is negligible once it cannot raise the supremum
        let slack = |v: f64| if v <= lower { 0.0 } else { v };
        return (band, (slack(low_tail), slack(high_tail), lower.max(f64::MIN_POSITIVE)));
    }
    let e = theta * q;
    // int_{t_i}^{t_{i+1}} t^{-theta q} dt/t = t_i^{-theta q} (1 - rho^{-theta q}) / (theta q)
    let cell = (1.0 - (-e * GRID_RATIO_LOG2).exp2()) / e;
    let lower_cells = fsum((0..n - 1).map(|i| (kv[i] * t(i).powf(-theta)).powf(q) * cell));
    let upper_cells = fsum((0..n - 1).map(|i| (kv[i + 1] * t(i).powf(-theta)).powf(q) * cell));
    let below = (1.0 - theta) * q;
    let low_tail_hi = (bs * t_min.powf(1.0 - theta)).powf(q) / below;
    let low_tail_lo = (kv[0] * t_min.powf(-theta)).powf(q) / below;
    let high_tail_hi = (a0 * t_max.powf(-theta)).powf(q) / e;
    let high_tail_lo = (kv[n - 1] * t_max.powf(-theta)).powf(q) / e;
    let lower = (lower_cells + low_tail_lo + high_tail_lo).powf(1.0 / q);
    let upper = (upper_cells + low_tail_hi + high_tail_hi).powf(1.0 / q);
    let band = InterpBand {
        lower,
        upper,
        t_min,
        t_max,
        grid_points: n,
        converged: true,
    };
    (band, (low_tail_hi, high_tail_hi, lower_cells.max(f64::MIN_POSITIVE)))
}

/// `(int_0^inf [t^-theta min(1,t)]^q dt/t)^{1/q}`, the value of
/// `|s|_{(X,X)_{theta,q}} / ||s||_X` when `K(s,t) = min(1,t) ||s||_X`.
pub fn identical_space_constant(theta: f64, q: f64) -> Result<f64> {
    check_interp(theta, q)?;
    if q.is_infinite() {
        return Ok(1.0);
    }
    Ok((1.0 / ((1.0 - theta) * q) + 1.0 / (theta * q)).powf(1.0 / q))
}

/// `K` sampled at the given points, for plotting.
pub fn k_samples(k: &KFunctional, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    ts.iter().map(|&t| Ok((t, k.value(t)?))).collect()
}

/// Parameters of the interpolation identities for spaces built on
/// `b^{s1,p1}_{p1}` with `nu_alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpParams {
    pub par1: SpaceParams,
    pub par2: SpaceParams,
    pub xi0: f64,
    pub xi1: f64,
    pub theta: f64,
    #[serde(with = "crate::spaces::ext_real_serde")]
    pub mu0: f64,
    #[serde(with = "crate::spaces::ext_real_serde")]
    pub mu1: f64,
    #[serde(with = "crate::spaces::ext_real_serde")]
    pub mu: f64,
}

impl InterpParams {
    pub fn validate(&self) -> Result<()> {
        self.par1.validate()?;
        self.par2.validate()?;
        if self.par1.p != self.par1.q {
            return Err(Error::param("q1", "the identities are stated for p1 = q1"));
        }
        ApproxParams::new(self.xi0, self.mu0)?;
        ApproxParams::new(self.xi1, self.mu1)?;
        ApproxParams::new(self.xi(), self.mu)?;
        check_interp(self.theta, self.mu)
    }

    pub fn alpha(&self) -> f64 {
        crate::democracy::alpha(&self.par1, &self.par2)
    }

    /// `xi = (1 - theta) xi0 + theta xi1`.
    pub fn xi(&self) -> f64 {
        (1.0 - self.theta) * self.xi0 + self.theta * self.xi1
    }

    /// `1/r = xi + 1/p1`.
    pub fn r_of(&self, xi: f64) -> f64 {
        1.0 / (xi + 1.0 / self.par1.p)
    }

    /// `s1 + xi (1 - alpha)`.
    pub fn gamma_of(&self, xi: f64) -> f64 {
        self.par1.s + xi * (1.0 - self.alpha())
    }

    fn approx(&self, xi: f64, mu: f64) -> SpaceDesc {
        SpaceDesc::Approx {
            error: ErrorSpace::Besov(self.par1),
            beta: self.alpha(),
            params: ApproxParams { xi, mu },
            oracle: Oracle::Exact,
        }
    }

    fn lorentz(&self, xi: f64, mu: f64) -> SpaceDesc {
        SpaceDesc::Lorentz {
            weight: self.par2.canonical_weight(),
            beta: self.alpha(),
            p: self.r_of(xi),
            mu,
        }
    }

    fn besov(&self, xi: f64) -> Result<SpaceDesc> {
        let r = self.r_of(xi);
        Ok(SpaceDesc::Besov(SpaceParams::new(self.gamma_of(xi), r, r)?))
    }

    /// `(A^{xi0}_{mu0}, A^{xi1}_{mu1})` against `A^xi_mu`.
    pub fn approx_identity(&self) -> (SpacePair, SpaceDesc, f64) {
        (
            SpacePair::new(self.approx(self.xi0, self.mu0), self.approx(self.xi1, self.mu1)),
            self.approx(self.xi(), self.mu),
            self.mu,
        )
    }

    /// `(l^{r0,mu0}(u, nu_alpha), l^{r1,mu1}(u, nu_alpha))` against
    /// `l^{r,mu}(u, nu_alpha)`.
    pub fn lorentz_identity(&self) -> (SpacePair, SpaceDesc, f64) {
        (
            SpacePair::new(self.lorentz(self.xi0, self.mu0), self.lorentz(self.xi1, self.mu1)),
            self.lorentz(self.xi(), self.mu),
            self.mu,
        )
    }

    /// `(b^{gamma0,r0}_{r0}, b^{gamma1,r1}_{r1})_{theta,r}` against
    /// `b^{gamma,r}_r`.
    pub fn besov_identity(&self) -> Result<(SpacePair, SpaceDesc, f64)> {
        Ok((
            SpacePair::new(self.besov(self.xi0)?, self.besov(self.xi1)?),
            self.besov(self.xi())?,
            self.r_of(self.xi()),
        ))
    }
}

/// Interpolation band and direct norm of one sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpRow {
    pub lower: f64,
    pub upper: f64,
    pub direct: f64,
    pub converged: bool,
}

/// Range of `interp / direct` over a corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceBand {
    pub name: String,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`.
    pub width: f64,
    pub rows: Vec<InterpRow>,
}

impl EquivalenceBand {
    fn from_rows(name: &str, rows: Vec<InterpRow>) -> Self {
        let used: Vec<&InterpRow> = rows.iter().filter(|r| r.direct > 0.0).collect();
        let min_ratio = used.iter().map(|r| r.lower / r.direct).fold(f64::INFINITY, f64::min);
        let max_ratio = used.iter().map(|r| r.upper / r.direct).fold(0.0, f64::max);
        EquivalenceBand {
            name: name.to_string(),
            min_ratio,
            max_ratio,
            width: max_ratio / min_ratio,
            rows,
        }
    }

    /// Width of the union of two bands.
    pub fn union_width(&self, other: &EquivalenceBand) -> f64 {
        self.max_ratio.max(other.max_ratio) / self.min_ratio.min(other.min_ratio)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpReport {
    pub params: InterpParams,
    pub alpha: f64,
    pub xi: f64,
    pub r: f64,
    pub gamma: f64,
    pub family: SplitFamily,
    pub bands: Vec<EquivalenceBand>,
    pub max_width: f64,
    pub width_limit: f64,
    pub pass: bool,
}

impl InterpReport {
    /// Both reports pass and every identity's union band stays within the
    /// width limit.
    pub fn stable_with(&self, other: &InterpReport) -> bool {
        self.pass
            && other.pass
            && self
                .bands
                .iter()
                .zip(&other.bands)
                .all(|(a, b)| a.union_width(b) <= self.width_limit)
    }
}

fn identity_band(corpus: &[CoeffSeq], name: &str, ident: (SpacePair, SpaceDesc, f64), theta: f64, family: SplitFamily) -> Result<EquivalenceBand> {
    let (pair, direct, q) = ident;
    let rows = corpus
        .par_iter()
        .map(|s| {
            let band = interp_norm(s, theta, q, &pair, family)?;
            Ok(InterpRow {
                lower: band.lower,
                upper: band.upper,
                direct: direct.norm(s)?,
                converged: band.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivalenceBand::from_rows(name, rows))
}

/// Interpolation of approximation spaces, of the matching Lorentz spaces and
/// of the matching Besov spaces (the latter with `mu_i = r_i`, `mu = r`).
/// Each identity yields a corpus band of `interp / direct`; the check passes
/// when every band is finite and at most `width_limit` wide.
pub fn theorem44_check(corpus: &[CoeffSeq], params: &InterpParams, family: SplitFamily, width_limit: f64) -> Result<InterpReport> {
    params.validate()?;
    let theta = params.theta;
    let bands = vec![
        identity_band(corpus, "approximation", params.approx_identity(), theta, family)?,
        identity_band(corpus, "lorentz", params.lorentz_identity(), theta, family)?,
        identity_band(corpus, "besov", params.besov_identity()?, theta, family)?,
    ];
    let max_width = bands.iter().map(|b| b.width).fold(0.0, f64::max);
    let converged = bands.iter().all(|b| b.rows.iter().all(|r| r.converged));
    Ok(InterpReport {
        params: *params,
        alpha: params.alpha(),
        xi: params.xi(),
        r: params.r_of(params.xi()),
        gamma: params.gamma_of(params.xi()),
        family,
        pass: converged && max_width.is_finite() && max_width <= width_limit,
        bands,
        max_width,
        width_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShearIndex;

    fn seq(entries: &[(u32, i64, f64)]) -> CoeffSeq {
        let mut c = CoeffSeq::new();
        for &(j, k, v) in entries {
            c.insert_real(ShearIndex::cone(1, j, vec![0], vec![k, 0]).unwrap(), v).unwrap();
        }
        c
    }

    fn b(s: f64, p: f64) -> SpaceDesc {
        SpaceDesc::Besov(SpaceParams::new(s, p, p).unwrap())
    }

    #[test]
    fn identical_spaces_give_min_one_t() {
        let s = seq(&[(0, 0, 1.0), (1, 0, -2.0), (1, 3, 0.5), (2, 1, 3.0), (2, 2, 1.0), (0, 4, 0.25), (3, 0, 1.5), (3, 9, -1.0)]);
        let x = b(0.3, 1.5);
        let pair = SpacePair::new(x.clone(), x.clone());
        let norm = x.norm(&s).unwrap();
        for t in [0.01, 0.5, 1.0, 2.0, 100.0] {
            let k = k_functional_upper(&s, t, &pair, SplitFamily::Threshold).unwrap();
            assert!((k - t.min(1.0) * norm).abs() <= 1e-13 * norm, "t = {t}");
        }
        let band = interp_norm(&s, 0.4, 2.0, &pair, SplitFamily::Threshold).unwrap();
        let exact = identical_space_constant(0.4, 2.0).unwrap() * norm;
        assert!(band.contains(exact), "{band:?} vs {exact}");
        assert!(band.converged);
    }

    #[test]
    fn swap_symmetry() {
        let s = seq(&[(0, 0, 1.0), (1, 0, -2.0), (2, 1, 3.0), (3, 2, 0.7)]);
        let pair = SpacePair::new(b(0.2, 1.0), b(1.1, 2.0));
        let kxy = KFunctional::new(&s, &pair, SplitFamily::Threshold).unwrap();
        let kyx = KFunctional::new(&s, &pair.swapped(), SplitFamily::Threshold).unwrap();
        for t in [0.03, 0.7, 5.0, 300.0] {
            let a = kxy.value(t).unwrap();
            let c = t * kyx.value(1.0 / t).unwrap();
            assert!((a - c).abs() <= 1e-12 * a, "t = {t}: {a} vs {c}");
        }
    }

    #[test]
    fn limits_and_monotonicity() {
        let s = seq(&[(0, 0, 1.0), (2, 1, 3.0), (3, 2, 0.7)]);
        let pair = SpacePair::new(b(0.0, 1.0), b(1.0, 1.0));
        let k = KFunctional::new(&s, &pair, SplitFamily::ThresholdShrink).unwrap();
        let xs = pair.x.norm(&s).unwrap();
        let ys = pair.y.norm(&s).unwrap();
        assert_eq!(k.value(1e12).unwrap(), xs);
        assert!((k.value(1e-12).unwrap() - 1e-12 * ys).abs() < 1e-24 * ys.max(1.0) * 1e3);
        let mut prev = 0.0;
        for i in -20..20 {
            let v = k.value((i as f64).exp2()).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(k.value(0.0).is_err());
    }

    #[test]
    fn zero_sequence_and_parameter_errors() {
        let pair = SpacePair::new(b(0.0, 1.0), b(1.0, 1.0));
        let band = interp_norm(&CoeffSeq::new(), 0.5, 1.0, &pair, SplitFamily::Threshold).unwrap();
        assert_eq!((band.lower, band.upper), (0.0, 0.0));
        assert!(interp_norm(&CoeffSeq::new(), 1.0, 1.0, &pair, SplitFamily::Threshold).is_err());
    }

    #[test]
    fn single_atom_band_brackets_closed_form() {
        // X = a e_Q with ||e_Q||_X = x, Y likewise: K = min(x, t y) a
        let s = seq(&[(2, 1, 1.7)]);
        let pair = SpacePair::new(b(0.0, 1.0), b(1.5, 1.0));
        let x = pair.x.norm(&s).unwrap();
        let y = pair.y.norm(&s).unwrap();
        let (theta, q) = (0.3, 2.0);
        // substitute t = (x/y) u: x^{1-theta} y^theta times the identical-space constant
        let exact = x.powf(1.0 - theta) * y.powf(theta) * identical_space_constant(theta, q).unwrap();
        let band = interp_norm(&s, theta, q, &pair, SplitFamily::Threshold).unwrap();
        assert!(band.contains(exact), "{band:?} vs {exact}");
        assert!(band.upper / band.lower < 1.2);
    }
}
