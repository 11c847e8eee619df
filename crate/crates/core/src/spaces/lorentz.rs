use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::besov::besov_cone_term;
use crate::spaces::{CoeffSeq, SpaceParams, WeightSeq};
use crate::sum::fsum;

/// One step of the rearrangement: value `a` on `[t_prev, t_next)` with
/// `t_next - t_prev = mass`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RearrangementStep {
    pub value: f64,
    pub mass: f64,
    pub t_prev: f64,
    pub t_next: f64,
}

/// Non-increasing rearrangement of `|u_Q c_Q|` with respect to `nu_beta`.
/// Zero entries are dropped; ties keep index order.
pub fn rearrangement(c: &CoeffSeq, u: &WeightSeq, beta: f64) -> Result<Vec<RearrangementStep>> {
    let mut items: Vec<(f64, f64)> = Vec::with_capacity(c.len());
    for (q, a) in c.magnitudes() {
        if a == 0.0 {
            continue;
        }
        items.push((u.value(q)? * a, q.measure_pow(beta)));
    }
    items.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut t = 0.0;
    Ok(items
        .into_iter()
        .map(|(value, mass)| {
            let t_prev = t;
            t += mass;
            RearrangementStep {
                value,
                mass,
                t_prev,
                t_next: t,
            }
        })
        .collect())
}

/// `||c||_{l^{p,mu}(u, nu_beta)} = (int_0^inf [t^{1/p} c*(t)]^mu dt/t)^{1/mu}`,
/// with `c*` the rearrangement of `|u c|` against `nu_beta`; `mu = inf` gives
/// `sup_t t^{1/p} c*(t)`.
pub fn lorentz_norm(c: &CoeffSeq, u: &WeightSeq, beta: f64, p: f64, mu: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::param("p", format!("{p} not in (0, inf)")));
    }
    if !(mu > 0.0) {
        return Err(Error::param("mu", format!("{mu} not in (0, inf]")));
    }
    let steps = rearrangement(c, u, beta)?;
    if steps.is_empty() {
        return Ok(0.0);
    }
    if mu.is_infinite() {
        return Ok(steps.iter().map(|s| s.t_next.powf(1.0 / p) * s.value).fold(0.0, f64::max));
    }
    if mu == p {
        // int a^p t^0 dt over each step is exactly a^p times its mass
        return Ok(fsum(steps.iter().map(|s| s.value.powf(p) * s.mass)).powf(1.0 / p));
    }
    let e = mu / p;
    let total = fsum(steps.iter().map(|s| s.value.powf(mu) * (s.t_next.powf(e) - s.t_prev.powf(e))));
    Ok((total / e).powf(1.0 / mu))
}

/// Outcome of comparing `l^tau(u, nu_beta)` with `b^{gamma,tau}_tau` over the
/// band indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub s: f64,
    pub tau: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lorentz: f64,
    pub besov: f64,
    pub difference: f64,
    pub relative: f64,
    /// Coarse entries, which lie outside the band index set and are ignored.
    pub coarse_dropped: usize,
    pub pass: bool,
}

/// Compare `||c||_{l^tau(u, nu_beta)}`, `u_Q = |Q|^{-s-1/2}`, with
/// `||c||_{b^{gamma,tau}_tau}`, `gamma = s + (1 - beta)/tau`, on the band
/// part of `c`. Passes when the relative difference is at most `1e-10`.
pub fn lemma_identification_check(c: &CoeffSeq, s: f64, tau: f64, beta: f64) -> Result<LemmaReport> {
    let gamma = s + (1.0 - beta) / tau;
    let par = SpaceParams::new(gamma, tau, tau)?;
    let bands: CoeffSeq = c.iter().filter(|(q, _)| !q.is_coarse()).map(|(q, v)| (q.clone(), *v)).collect();
    let coarse_dropped = c.len() - bands.len();
    let u = lemma_weight(s);
    let lorentz = lorentz_norm(&bands, &u, beta, tau, tau)?;
    let besov = besov_cone_term(&bands, &par);
    let difference = (lorentz - besov).abs();
    let scale = lorentz.abs().max(besov.abs());
    let relative = if scale == 0.0 { 0.0 } else { difference / scale };
    Ok(LemmaReport {
        s,
        tau,
        beta,
        gamma,
        lorentz,
        besov,
        difference,
        relative,
        coarse_dropped,
        pass: relative <= 1e-10,
    })
}

/// `u_Q = |Q|^{-s-1/2}`.
pub fn lemma_weight(s: f64) -> WeightSeq {
    WeightSeq::power(-s - 0.5)
}

/// Weighted `l^p` closed form `(sum_Q |u_Q c_Q|^p |Q|^beta)^{1/p}`.
pub fn weighted_lp(c: &CoeffSeq, u: &WeightSeq, beta: f64, p: f64) -> Result<f64> {
    let terms = c
        .magnitudes()
        .filter(|(_, a)| *a != 0.0)
        .map(|(q, a)| Ok((u.value(q)? * a).powf(p) * q.measure_pow(beta)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(fsum(terms).powf(1.0 / p))
}
