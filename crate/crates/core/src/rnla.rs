//! Restricted nonlinear approximation: best `nu_beta`-budgeted approximation
//! errors, approximation-space quasi-norms and Jackson/Bernstein ratios.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{IndexSet, ShearIndex};
use crate::spaces::{besov_norm, lorentz_norm, tl_norm, CoeffSeq, SpaceParams, TlMethod, WeightSeq};
use crate::sum::fsum;

/// Largest support handled by the exhaustive oracle.
pub const EXACT_LIMIT: usize = 22;

/// The sequence space in which approximation errors are measured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ErrorSpace {
    /// `b^{s,q}_p`.
    Besov(SpaceParams),
    /// `f^{s,q}_p`, integrated by exact overlay.
    Triebel(SpaceParams),
}

impl ErrorSpace {
    pub fn params(&self) -> &SpaceParams {
        match self {
            ErrorSpace::Besov(p) | ErrorSpace::Triebel(p) => p,
        }
    }

    pub fn norm(&self, c: &CoeffSeq) -> Result<f64> {
        match self {
            ErrorSpace::Besov(p) => Ok(besov_norm(c, p)),
            ErrorSpace::Triebel(p) if p.p == p.q => Ok(besov_norm(c, p)),
            ErrorSpace::Triebel(p) => tl_norm(c, p, TlMethod::ExactOverlay),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    Greedy,
    Exact,
}

impl std::str::FromStr for Oracle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Oracle::Greedy),
            "exact" => Ok(Oracle::Exact),
            other => Err(Error::param("oracle", format!("`{other}` is neither `greedy` nor `exact`"))),
        }
    }
}

/// `(t_i, sigma_i)`: the error is `sigma_i` on `[t_i, t_{i+1})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub sigma: f64,
}

/// Right-continuous, nonincreasing step function `t -> sigma(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxCurve {
    pub method: Oracle,
    pub points: Vec<CurvePoint>,
}

impl ApproxCurve {
    pub fn at(&self, t: f64) -> f64 {
        self.points
            .iter()
            .take_while(|p| p.t <= t)
            .last()
            .map_or(f64::INFINITY, |p| p.sigma)
    }

    /// `t` at which the curve reaches zero, if it does.
    pub fn support_measure(&self) -> Option<f64> {
        self.points.iter().find(|p| p.sigma == 0.0).map(|p| p.t)
    }

    /// `sup_t t^xi sigma(t)`, attained as `t` approaches a breakpoint from
    /// the left.
    pub fn jackson_sup(&self, xi: f64) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1].t.powf(xi) * w[0].sigma)
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let tag = match self.method {
            Oracle::Greedy => "greedy",
            Oracle::Exact => "exact",
        };
        let mut out = String::from("t,sigma,method\n");
        for p in &self.points {
            out.push_str(&format!("{:.16e},{:.16e},{tag}\n", p.t, p.sigma));
        }
        out
    }
}

/// `(xi, mu)` of `A^xi_mu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxParams {
    pub xi: f64,
    #[serde(with = "crate::spaces::ext_real_serde")]
    pub mu: f64,
}

impl ApproxParams {
    pub fn new(xi: f64, mu: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::param("xi", format!("{xi} not in (0, inf)")));
        }
        if !(mu > 0.0) {
            return Err(Error::param("mu", format!("{mu} not in (0, inf]")));
        }
        Ok(ApproxParams { xi, mu })
    }

    /// `r` with `1/r = xi + 1/p`.
    pub fn r(&self, p: f64) -> f64 {
        1.0 / (self.xi + 1.0 / p)
    }
}

/// Support of `s` with the data the budgeted selection needs.
struct Items {
    idx: Vec<ShearIndex>,
    mass: Vec<f64>,
}

fn items(s: &CoeffSeq, space: &ErrorSpace, beta: f64) -> Items {
    let par = space.params();
    let e = par.canonical_exponent();
    let mut v: Vec<(ShearIndex, f64, f64)> = s
        .magnitudes()
        .filter(|(_, a)| *a != 0.0)
        .map(|(q, a)| {
            let w = q.measure_pow(e);
            let mass = q.measure_pow(beta);
            (q.clone(), mass, (w * a).powf(par.p) / mass)
        })
        .collect();
    // stable: equal scores keep index order
    v.sort_by(|a, b| b.2.total_cmp(&a.2));
    Items {
        idx: v.iter().map(|x| x.0.clone()).collect(),
        mass: v.iter().map(|x| x.1).collect(),
    }
}

fn check_budget(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::param("t", format!("budget {t} is negative")));
    }
    Ok(())
}

/// Greedy selection: scan items in decreasing order of
/// `(w_Q |s_Q|)^p / nu_beta(Q)`, keeping each one that still fits the
/// budget, until no remaining item fits. Returns the kept set and
/// `||s - s|_Gamma||`.
pub fn greedy_approximant(s: &CoeffSeq, space: &ErrorSpace, beta: f64, t: f64) -> Result<(IndexSet, f64)> {
    check_budget(t)?;
    let it = items(s, space, beta);
    let mut kept = IndexSet::new();
    let mut masses = Vec::new();
    for (q, &m) in it.idx.iter().zip(&it.mass) {
        masses.push(m);
        if fsum(masses.iter().copied()) > t {
            masses.pop();
            continue;
        }
        kept.insert(q.clone())?;
    }
    let err = space.norm(&s.without(&kept))?;
    Ok((kept, err))
}

/// Fast residual evaluation for `b^{s,q}_p`, term-for-term identical to
/// [`besov_norm`] of the residual.
struct BesovResidual {
    p: f64,
    q: f64,
    coarse: Vec<bool>,
    block: Vec<usize>,
    blocks: usize,
    value: Vec<f64>,
}

impl BesovResidual {
    fn new(it: &Items, par: &SpaceParams, s: &CoeffSeq) -> Self {
        let e = par.canonical_exponent();
        let mut keys: BTreeMap<(u8, u32, Vec<i64>), usize> = BTreeMap::new();
        let mut block = Vec::new();
        let mut coarse = Vec::new();
        let mut value = Vec::new();
        for q in &it.idx {
            let a = s.get(q).norm();
            match q.band() {
                None => {
                    coarse.push(true);
                    block.push(usize::MAX);
                    value.push(a.powf(par.p));
                }
                Some((c, j, l)) => {
                    let n = keys.len();
                    let b = *keys.entry((c, j, l.to_vec())).or_insert(n);
                    coarse.push(false);
                    block.push(b);
                    value.push((q.measure_pow(e) * a).powf(par.p));
                }
            }
        }
        BesovResidual {
            p: par.p,
            q: par.q,
            coarse,
            block,
            blocks: keys.len(),
            value,
        }
    }

    /// Error when the items flagged in `dropped` remain in the residual.
    fn eval(&self, dropped: impl Fn(usize) -> bool) -> f64 {
        let n = self.value.len();
        let coarse: Vec<f64> = (0..n).filter(|&i| self.coarse[i] && dropped(i)).map(|i| self.value[i]).collect();
        let mut per_block: Vec<Vec<f64>> = vec![Vec::new(); self.blocks];
        for i in (0..n).filter(|&i| !self.coarse[i] && dropped(i)) {
            per_block[self.block[i]].push(self.value[i]);
        }
        let ct = if coarse.is_empty() { 0.0 } else { fsum(coarse).powf(1.0 / self.p) };
        let sums: Vec<f64> = per_block.into_iter().filter(|b| !b.is_empty()).map(fsum).collect();
        let bt = if sums.is_empty() {
            0.0
        } else if self.q.is_infinite() {
            sums.iter().copied().fold(0.0, f64::max).powf(1.0 / self.p)
        } else {
            fsum(sums.iter().map(|b| b.powf(self.q / self.p))).powf(1.0 / self.q)
        };
        ct + bt
    }

    /// Plain weighted `l^p` structure: no coarse entries and `q = p`.
    fn is_plain(&self) -> bool {
        self.q == self.p && !self.coarse.iter().any(|&c| c)
    }
}

fn besov_params(space: &ErrorSpace) -> Result<SpaceParams> {
    match space {
        ErrorSpace::Besov(p) => Ok(*p),
        ErrorSpace::Triebel(p) if p.p == p.q => Ok(*p),
        ErrorSpace::Triebel(_) => Err(Error::Unsupported(
            "exact sigma for f-spaces with p != q; use the greedy oracle".into(),
        )),
    }
}

/// `sigma_nu(t, s) = min_{nu_beta(Gamma) <= t} ||s - s|_Gamma||` over subsets of
/// the support, by depth-first branch and bound.
pub fn sigma_exact(s: &CoeffSeq, space: &ErrorSpace, beta: f64, t: f64) -> Result<f64> {
    sigma_exact_set(s, space, beta, t).map(|(_, e)| e)
}

/// As [`sigma_exact`], also returning an optimal kept set.
pub fn sigma_exact_set(s: &CoeffSeq, space: &ErrorSpace, beta: f64, t: f64) -> Result<(IndexSet, f64)> {
    check_budget(t)?;
    let par = besov_params(space)?;
    let it = items(s, space, beta);
    let n = it.idx.len();
    if n > EXACT_LIMIT {
        return Err(Error::Capacity {
            size: n,
            limit: EXACT_LIMIT,
        });
    }
    let res = BesovResidual::new(&it, &par, s);
    let mut search = Search {
        res: &res,
        mass: &it.mass,
        t,
        kept: vec![false; n],
        decided: 0,
        best: f64::INFINITY,
        best_kept: vec![false; n],
        plain: res.is_plain(),
    };
    search.run();
    let mut kept = IndexSet::new();
    for (q, &k) in it.idx.iter().zip(&search.best_kept) {
        if k {
            kept.insert(q.clone())?;
        }
    }
    let err = besov_norm(&s.without(&kept), &par);
    Ok((kept, err))
}

struct Search<'a> {
    res: &'a BesovResidual,
    mass: &'a [f64],
    t: f64,
    kept: Vec<bool>,
    decided: usize,
    best: f64,
    best_kept: Vec<bool>,
    plain: bool,
}

impl Search<'_> {
    fn used(&self) -> f64 {
        fsum((0..self.decided).filter(|&i| self.kept[i]).map(|i| self.mass[i]))
    }

    /// Lower bound on the error of any completion of the current branch.
    fn bound(&self, used: f64) -> f64 {
        let d = self.decided;
        let base = self.res.eval(|i| i < d && !self.kept[i]);
        if !self.plain {
            return base;
        }
        // fractional knapsack on the undecided items (score order)
        let mut cap = self.t - used;
        let mut removable = 0.0;
        let mut rest = 0.0;
        for i in d..self.mass.len() {
            rest += self.res.value[i];
            if cap <= 0.0 {
                continue;
            }
            let m = self.mass[i];
            if m <= cap {
                removable += self.res.value[i];
                cap -= m;
            } else {
                removable += self.res.value[i] * cap / m;
                cap = 0.0;
            }
        }
        let excluded = base.powf(self.res.p);
        (excluded + (rest - removable).max(0.0)).max(0.0).powf(1.0 / self.res.p)
    }

    fn run(&mut self) {
        let n = self.mass.len();
        let used = self.used();
        if self.decided == n {
            let e = self.res.eval(|i| !self.kept[i]);
            if e < self.best {
                self.best = e;
                self.best_kept = self.kept.clone();
            }
            return;
        }
        if self.bound(used) * (1.0 - 1e-12) > self.best {
            return;
        }
        let i = self.decided;
        let fits = fsum((0..i).filter(|&k| self.kept[k]).map(|k| self.mass[k]).chain([self.mass[i]])) <= self.t;
        self.decided += 1;
        if fits {
            self.kept[i] = true;
            self.run();
            self.kept[i] = false;
        }
        self.run();
        self.decided -= 1;
    }
}

/// Step curve of `sigma_nu(., s)`. The greedy curve has a breakpoint at every
/// prefix of the greedy order; the exact curve at every subset measure where
/// the optimum improves.
pub fn sigma_curve(s: &CoeffSeq, space: &ErrorSpace, beta: f64, method: Oracle) -> Result<ApproxCurve> {
    let it = items(s, space, beta);
    let n = it.idx.len();
    let points = match method {
        Oracle::Greedy => {
            let mut pts = Vec::with_capacity(n + 1);
            let mut kept = IndexSet::new();
            let mut masses = Vec::new();
            pts.push(CurvePoint {
                t: 0.0,
                sigma: space.norm(s)?,
            });
            for (q, &m) in it.idx.iter().zip(&it.mass) {
                kept.insert(q.clone())?;
                masses.push(m);
                pts.push(CurvePoint {
                    t: fsum(masses.iter().copied()),
                    sigma: space.norm(&s.without(&kept))?,
                });
            }
            pts
        }
        Oracle::Exact => {
            let par = besov_params(space)?;
            if n > EXACT_LIMIT {
                return Err(Error::Capacity {
                    size: n,
                    limit: EXACT_LIMIT,
                });
            }
            let res = BesovResidual::new(&it, &par, s);
            let mut all: Vec<(f64, f64, u32)> = (0..1u32 << n)
                .map(|mask| {
                    let t = fsum((0..n).filter(|&i| mask >> i & 1 == 1).map(|i| it.mass[i]));
                    (t, res.eval(|i| mask >> i & 1 == 0), mask)
                })
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let mut pts: Vec<CurvePoint> = Vec::new();
            for (t, e, mask) in all {
                if pts.last().is_none_or(|p| e < p.sigma) {
                    // recompute through the norm so values match direct evaluation
                    let kept = IndexSet::try_from_iter((0..n).filter(|&i| mask >> i & 1 == 1).map(|i| it.idx[i].clone()))?;
                    let sigma = besov_norm(&s.without(&kept), &par);
                    match pts.last_mut() {
                        Some(p) if p.t == t => p.sigma = p.sigma.min(sigma),
                        _ => pts.push(CurvePoint { t, sigma }),
                    }
                }
            }
            pts
        }
    };
    Ok(ApproxCurve { method, points })
}

/// `||s||_{A^xi_mu} = (int_0^inf [t^xi sigma(t)]^mu dt/t)^{1/mu}`, exact on each
/// step of the curve.
pub fn curve_norm(curve: &ApproxCurve, par: &ApproxParams) -> f64 {
    let pts = &curve.points;
    if pts.is_empty() {
        return 0.0;
    }
    if pts.last().is_some_and(|p| p.sigma != 0.0) {
        return f64::INFINITY;
    }
    if par.mu.is_infinite() {
        return curve.jackson_sup(par.xi);
    }
    let e = par.xi * par.mu;
    let total = fsum(
        pts.windows(2)
            .filter(|w| w[0].sigma != 0.0)
            .map(|w| w[0].sigma.powf(par.mu) * (w[1].t.powf(e) - w[0].t.powf(e))),
    );
    (total / e).powf(1.0 / par.mu)
}

pub fn approx_space_norm(s: &CoeffSeq, space: &ErrorSpace, beta: f64, par: &ApproxParams, method: Oracle) -> Result<f64> {
    Ok(curve_norm(&sigma_curve(s, space, beta, method)?, par))
}

/// Which democracy bound selects the measure exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaSide {
    /// `beta = alpha - p1 (d-1)/(q1 (d+1))`.
    Jackson,
    /// `beta = alpha + (d-1)/(d+1)`.
    Bernstein,
    /// `beta = alpha` (only meaningful for `p1 = q1`).
    Exact,
}

/// Parameters of a Jackson/Bernstein run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JbParams {
    pub par1: SpaceParams,
    pub par2: SpaceParams,
    pub approx: ApproxParams,
    pub side: BetaSide,
}

impl JbParams {
    pub fn alpha(&self) -> f64 {
        crate::democracy::alpha(&self.par1, &self.par2)
    }

    pub fn beta(&self) -> f64 {
        let a = self.alpha();
        let crit = crate::democracy::critical_exponent(2);
        let p1 = &self.par1;
        match self.side {
            BetaSide::Jackson if p1.q.is_infinite() => a,
            BetaSide::Jackson => a - p1.p * crit / p1.q,
            BetaSide::Bernstein => a + crit,
            BetaSide::Exact => a,
        }
    }

    pub fn r(&self) -> f64 {
        self.approx.r(self.par1.p)
    }

    /// `b^{s1,p1}_{p1}` when `p1 = q1`, else `f^{s1,q1}_{p1}`.
    pub fn error_space(&self) -> ErrorSpace {
        if self.par1.p == self.par1.q {
            ErrorSpace::Besov(self.par1)
        } else {
            ErrorSpace::Triebel(self.par1)
        }
    }

    pub fn oracle(&self) -> Oracle {
        if self.par1.p == self.par1.q {
            Oracle::Exact
        } else {
            Oracle::Greedy
        }
    }

    /// `u = ||e_Q||` in the second space.
    pub fn weight(&self) -> WeightSeq {
        self.par2.canonical_weight()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JbReport {
    pub params: JbParams,
    pub beta: f64,
    pub r: f64,
    pub elements: usize,
    /// `sup t^xi sigma(t, s) / ||s||_{l^{r,mu}(u, nu_beta)}`.
    pub jackson_sup: f64,
    /// `sup ||g||_{l^{r,mu}} / (t^xi ||g||_{X})` over budget-`t` elements `g`.
    pub bernstein_sup: f64,
    pub pass: bool,
}

/// Jackson and Bernstein suprema over a corpus. Bernstein members are the
/// corpus elements and their restrictions to every breakpoint set of the
/// greedy order.
pub fn jackson_bernstein_check(corpus: &[CoeffSeq], params: &JbParams) -> Result<JbReport> {
    params.par1.validate()?;
    params.par2.validate()?;
    let beta = params.beta();
    let r = params.r();
    let space = params.error_space();
    let u = params.weight();
    let xi = params.approx.xi;
    let mu = params.approx.mu;
    let mut jackson: f64 = 0.0;
    let mut bernstein: f64 = 0.0;
    for s in corpus {
        if s.support().is_empty() {
            continue;
        }
        let curve = sigma_curve(s, &space, beta, params.oracle())?;
        let lor = lorentz_norm(s, &u, beta, r, mu)?;
        jackson = jackson.max(curve.jackson_sup(xi) / lor);

        let it = items(s, &space, beta);
        let mut kept = IndexSet::new();
        for q in &it.idx {
            kept.insert(q.clone())?;
            let g = s.restrict(&kept);
            let t = crate::geometry::measure_nu(&kept, beta);
            let ratio = lorentz_norm(&g, &u, beta, r, mu)? / (t.powf(xi) * space.norm(&g)?);
            bernstein = bernstein.max(ratio);
        }
    }
    Ok(JbReport {
        params: *params,
        beta,
        r,
        elements: corpus.len(),
        jackson_sup: jackson,
        bernstein_sup: bernstein,
        pass: jackson.is_finite() && bernstein.is_finite(),
    })
}

/// Closed forms for `s = a e_Q` with `m = nu_beta(Q)`:
/// `sup t^xi sigma / ||s||_{l^{r,mu}} = (mu/r)^{1/mu}` and the Bernstein
/// ratio at `t = m` is `(r/mu)^{1/mu}`, when `u` and `beta` satisfy the exact
/// democracy relation; both are 1 for `mu = inf`.
pub fn single_atom_ratios(r: f64, mu: f64) -> (f64, f64) {
    if mu.is_infinite() {
        (1.0, 1.0)
    } else {
        ((mu / r).powf(1.0 / mu), (r / mu).powf(1.0 / mu))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(entries: &[(u32, i64, f64)]) -> CoeffSeq {
        let mut c = CoeffSeq::new();
        for &(j, k, v) in entries {
            c.insert_real(ShearIndex::cone(1, j, vec![0], vec![k, 0]).unwrap(), v).unwrap();
        }
        c
    }

    fn b(s: f64, p: f64) -> ErrorSpace {
        ErrorSpace::Besov(SpaceParams::new(s, p, p).unwrap())
    }

    #[test]
    fn budget_extremes() {
        let s = seq(&[(0, 0, 1.0), (1, 0, -2.0), (2, 0, 0.5)]);
        let sp = b(0.2, 1.5);
        let full = crate::geometry::measure_nu(&s.support(), 0.7);
        assert_eq!(greedy_approximant(&s, &sp, 0.7, full).unwrap().1, 0.0);
        assert_eq!(sigma_exact(&s, &sp, 0.7, full).unwrap(), 0.0);
        let norm = besov_norm(&s, sp.params());
        assert_eq!(greedy_approximant(&s, &sp, 0.7, 0.0).unwrap().1, norm);
        assert_eq!(sigma_exact(&s, &sp, 0.7, 0.0).unwrap(), norm);
        assert!(greedy_approximant(&s, &sp, 0.7, -1.0).is_err());
    }

    #[test]
    fn two_equal_masses_step_twice() {
        let s = seq(&[(1, 0, 1.0), (1, 1, 3.0)]);
        let c = sigma_curve(&s, &b(0.0, 1.0), 1.0, Oracle::Exact).unwrap();
        let ts: Vec<f64> = c.points.iter().map(|p| p.t).collect();
        assert_eq!(ts, vec![0.0, 0.125, 0.25]);
    }

    #[test]
    fn single_entry_norm() {
        let s = seq(&[(1, 0, 2.0)]);
        let sp = b(0.0, 2.0);
        let a = besov_norm(&s, sp.params());
        let m: f64 = 0.125;
        let par = ApproxParams::new(0.75, 1.0).unwrap();
        let got = approx_space_norm(&s, &sp, 1.0, &par, Oracle::Exact).unwrap();
        assert!((got - a * m.powf(0.75) / 0.75).abs() < 1e-14);
        assert_eq!(approx_space_norm(&CoeffSeq::new(), &sp, 1.0, &par, Oracle::Greedy).unwrap(), 0.0);
        assert!(ApproxParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn capacity_error_beyond_limit() {
        let entries: Vec<(u32, i64, f64)> = (0..23).map(|k| (0, k, 1.0)).collect();
        let s = seq(&entries);
        assert!(matches!(sigma_exact(&s, &b(0.0, 1.0), 0.0, 3.0), Err(Error::Capacity { .. })));
    }
}
