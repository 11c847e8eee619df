use crate::spaces::{CoeffSeq, SpaceParams};
use crate::sum::fsum;

/// `||c||_{b^{s,q}_p}`: the `l^p` norm of the coarse coefficients plus the
/// `l^q` norm over bands `(cone, j, l)` of the `l^p` norms over translates of
/// `|Q|^{-s+1/p-1/2} |c_Q|`.
pub fn besov_norm(c: &CoeffSeq, par: &SpaceParams) -> f64 {
    coarse_term(c, par.p) + cone_term(c, par)
}

pub(crate) fn coarse_term(c: &CoeffSeq, p: f64) -> f64 {
    let terms: Vec<f64> = c
        .magnitudes()
        .filter(|(q, _)| q.is_coarse())
        .map(|(_, a)| a.powf(p))
        .collect();
    if terms.is_empty() {
        0.0
    } else {
        fsum(terms).powf(1.0 / p)
    }
}

/// The band part of the Besov norm, without the coarse summand.
pub fn besov_cone_term(c: &CoeffSeq, par: &SpaceParams) -> f64 {
    cone_term(c, par)
}

fn cone_term(c: &CoeffSeq, par: &SpaceParams) -> f64 {
    let e = par.canonical_exponent();
    let blocks: Vec<f64> = c
        .blocks()
        .into_iter()
        .filter(|(key, _)| key.is_some())
        .map(|(_, entries)| fsum(entries.iter().map(|(q, a)| (q.measure_pow(e) * a).powf(par.p))))
        .collect();
    if blocks.is_empty() {
        return 0.0;
    }
    if par.q.is_infinite() {
        blocks.iter().fold(0.0f64, |m, &b| m.max(b)).powf(1.0 / par.p)
    } else {
        fsum(blocks.iter().map(|b| b.powf(par.q / par.p))).powf(1.0 / par.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShearIndex;

    #[test]
    fn single_coefficients() {
        let par = SpaceParams::new(0.7, 1.5, 3.0).unwrap();
        let c = CoeffSeq::single(ShearIndex::coarse(vec![2, 2]), num_complex::Complex64::new(0.6, 0.8)).unwrap();
        assert!((besov_norm(&c, &par) - 1.0).abs() < 1e-15);

        let q = ShearIndex::cone(2, 2, vec![-1], vec![0, 5]).unwrap();
        let c = CoeffSeq::single(q.clone(), 1.0.into()).unwrap();
        let want = (-6.0 * (-0.7 + 1.0 / 1.5 - 0.5f64)).exp2();
        assert!((besov_norm(&c, &par) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn empty_is_zero() {
        let par = SpaceParams::new(0.0, 1.0, f64::INFINITY).unwrap();
        assert_eq!(besov_norm(&CoeffSeq::new(), &par), 0.0);
    }

    #[test]
    fn sup_over_blocks() {
        let par = SpaceParams::new(0.0, 2.0, f64::INFINITY).unwrap();
        let mut c = CoeffSeq::new();
        // j = 0: weight |Q|^0 = 1
        c.insert_real(ShearIndex::cone(1, 0, vec![0], vec![0, 0]).unwrap(), 3.0).unwrap();
        c.insert_real(ShearIndex::cone(1, 0, vec![0], vec![1, 0]).unwrap(), 4.0).unwrap();
        c.insert_real(ShearIndex::cone(1, 0, vec![1], vec![0, 0]).unwrap(), 2.0).unwrap();
        assert!((besov_norm(&c, &par) - 5.0).abs() < 1e-15);
    }
}
