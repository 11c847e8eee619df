use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::sum::fsum;

/// Address of one frame atom and of the cube it is attached to.
///
/// The derived order is the total order used for tie-breaking: coarse
/// translates first, then cone, scale, shear (lexicographic) and translate
/// (lexicographic).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShearIndex {
    Coarse {
        k: Vec<i64>,
    },
    Cone {
        /// 1-based cone number.
        cone: u8,
        j: u32,
        shear: Vec<i64>,
        k: Vec<i64>,
    },
}

impl ShearIndex {
    pub fn coarse(k: Vec<i64>) -> Self {
        ShearIndex::Coarse { k }
    }

    /// Build and validate a cone index.
    pub fn cone(cone: u8, j: u32, shear: Vec<i64>, k: Vec<i64>) -> Result<Self> {
        let idx = ShearIndex::Cone { cone, j, shear, k };
        idx.validate()?;
        Ok(idx)
    }

    pub fn dim(&self) -> usize {
        self.translate().len()
    }

    pub fn translate(&self) -> &[i64] {
        match self {
            ShearIndex::Coarse { k } | ShearIndex::Cone { k, .. } => k,
        }
    }

    pub fn is_coarse(&self) -> bool {
        matches!(self, ShearIndex::Coarse { .. })
    }

    /// Scale index; coarse translates count as scale 0.
    pub fn scale(&self) -> u32 {
        match self {
            ShearIndex::Coarse { .. } => 0,
            ShearIndex::Cone { j, .. } => *j,
        }
    }

    /// `(cone, j, shear)` for cone indices.
    pub fn band(&self) -> Option<(u8, u32, &[i64])> {
        match self {
            ShearIndex::Coarse { .. } => None,
            ShearIndex::Cone { cone, j, shear, .. } => Some((*cone, *j, shear)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::InvalidIndex {
            index: self.to_string(),
            reason,
        };
        match self {
            ShearIndex::Coarse { k } => {
                if k.is_empty() {
                    return Err(bad("empty translate".into()));
                }
            }
            ShearIndex::Cone { cone, j, shear, k } => {
                let d = k.len();
                if d < 2 {
                    return Err(bad("cone indices need dimension at least 2".into()));
                }
                if shear.len() != d - 1 {
                    return Err(bad(format!("shear has {} entries, expected {}", shear.len(), d - 1)));
                }
                if *cone == 0 || *cone as usize > d {
                    return Err(bad(format!("cone must lie in 1..={d}")));
                }
                if *j > 40 {
                    return Err(bad("scale too large for exact arithmetic".into()));
                }
                let bound = 1i64 << j;
                if let Some(l) = shear.iter().find(|l| l.abs() > bound) {
                    return Err(bad(format!("|shear| = {} exceeds 2^j = {bound}", l.abs())));
                }
            }
        }
        Ok(())
    }

    /// `log2 |Q| = -(d+1) j`; coarse cubes have measure 1.
    pub fn log2_measure(&self) -> i64 {
        -((self.dim() as i64 + 1) * self.scale() as i64)
    }

    /// Exact measure `|Q|` of the attached cube.
    pub fn measure(&self) -> Dyadic {
        Dyadic::pow2_neg((-self.log2_measure()) as u32)
    }

    /// `|Q|^beta` in floating point.
    pub fn measure_pow(&self, beta: f64) -> f64 {
        (self.log2_measure() as f64 * beta).exp2()
    }

    /// Integer matrix `M = B^[l] A^j` (identity for coarse indices), so that
    /// `x` lies in the cube iff `floor(M x) = k`.
    pub fn forward_matrix(&self) -> Vec<Vec<i128>> {
        let d = self.dim();
        let mut m = vec![vec![0i128; d]; d];
        match self {
            ShearIndex::Coarse { .. } => {
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = 1;
                }
            }
            ShearIndex::Cone { cone, j, shear, .. } => {
                let c = *cone as usize - 1;
                let two_j = 1i128 << j;
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = if i == c { two_j * two_j } else { two_j };
                }
                for (col, l) in other_axes(d, c).zip(shear) {
                    m[c][col] = *l as i128 * two_j;
                }
            }
        }
        m
    }

    /// `M x` in exact arithmetic.
    pub fn apply_forward(&self, x: &[Dyadic]) -> Vec<Dyadic> {
        self.forward_matrix()
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .fold(Dyadic::ZERO, |acc, (&a, &xi)| acc + xi.mul_int(a))
            })
            .collect()
    }

    /// Exact membership of `x` in the half-open cube.
    pub fn contains(&self, x: &[Dyadic]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        self.apply_forward(x)
            .iter()
            .zip(self.translate())
            .all(|(y, &k)| y.floor() == k as i128)
    }
}

/// Axes other than the cone axis `c`, in increasing order. The i-th shear
/// component acts on the i-th of these.
pub(crate) fn other_axes(d: usize, c: usize) -> impl Iterator<Item = usize> {
    (0..d).filter(move |&i| i != c)
}

impl fmt::Display for ShearIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::textfmt::format_index(self))
    }
}

/// Finite set of indices of a common dimension, iterated in the total order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    items: BTreeSet<ShearIndex>,
}

impl IndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a validated index; returns whether it was new.
    pub fn insert(&mut self, idx: ShearIndex) -> Result<bool> {
        idx.validate()?;
        if let Some(d) = self.dim() {
            if idx.dim() != d {
                return Err(Error::InvalidIndex {
                    index: idx.to_string(),
                    reason: format!("dimension {} does not match set dimension {d}", idx.dim()),
                });
            }
        }
        Ok(self.items.insert(idx))
    }

    pub fn try_from_iter<I: IntoIterator<Item = ShearIndex>>(iter: I) -> Result<Self> {
        let mut set = IndexSet::new();
        for idx in iter {
            set.insert(idx)?;
        }
        Ok(set)
    }

    pub fn remove(&mut self, idx: &ShearIndex) -> bool {
        self.items.remove(idx)
    }

    pub fn contains(&self, idx: &ShearIndex) -> bool {
        self.items.contains(idx)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.items.iter().next().map(ShearIndex::dim)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ShearIndex> + '_ {
        self.items.iter()
    }

    /// Members whose cube contains `x`.
    pub fn containing<'a>(&'a self, x: &'a [Dyadic]) -> impl Iterator<Item = &'a ShearIndex> + 'a {
        self.items.iter().filter(move |q| q.contains(x))
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a ShearIndex;
    type IntoIter = std::collections::btree_set::Iter<'a, ShearIndex>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// The measure `nu_beta(Q) = |Q|^beta` on the index set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub beta: f64,
}

impl MeasureSpec {
    pub fn new(beta: f64) -> Self {
        MeasureSpec { beta }
    }

    pub fn of(&self, idx: &ShearIndex) -> f64 {
        idx.measure_pow(self.beta)
    }

    pub fn nu<'a, I: IntoIterator<Item = &'a ShearIndex>>(&self, gamma: I) -> f64 {
        fsum(gamma.into_iter().map(|q| self.of(q)))
    }
}

/// `nu_beta(Gamma) = sum |Q|^beta`; `beta = 0` counts.
pub fn measure_nu(gamma: &IndexSet, beta: f64) -> f64 {
    MeasureSpec::new(beta).nu(gamma)
}

/// All shear vectors at scale `j` in dimension `d`, in lexicographic order.
pub fn shears(d: usize, j: u32) -> Vec<Vec<i64>> {
    let b = 1i64 << j;
    let mut out = vec![Vec::new()];
    for _ in 1..d {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-b..=b).map(move |l| {
                    let mut v = prefix.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_puts_coarse_first() {
        let c = ShearIndex::coarse(vec![5, 5]);
        let a = ShearIndex::cone(1, 0, vec![0], vec![0, 0]).unwrap();
        let b = ShearIndex::cone(1, 1, vec![-2], vec![0, 0]).unwrap();
        let e = ShearIndex::cone(1, 1, vec![-1], vec![-9, 0]).unwrap();
        let f = ShearIndex::cone(2, 0, vec![0], vec![0, 0]).unwrap();
        let mut v = vec![f.clone(), e.clone(), b.clone(), a.clone(), c.clone()];
        v.sort();
        assert_eq!(v, vec![c, a, b, e, f]);
    }

    #[test]
    fn rejects_oversized_shear() {
        assert!(ShearIndex::cone(1, 1, vec![3], vec![0, 0]).is_err());
        assert!(ShearIndex::cone(3, 1, vec![0], vec![0, 0]).is_err());
        assert!(ShearIndex::cone(1, 1, vec![0, 0], vec![0, 0]).is_err());
    }

    #[test]
    fn matrix_matches_definition() {
        let q = ShearIndex::cone(1, 1, vec![1], vec![0, 0]).unwrap();
        assert_eq!(q.forward_matrix(), vec![vec![4, 2], vec![0, 2]]);
        let q = ShearIndex::cone(2, 1, vec![-2], vec![0, 0]).unwrap();
        assert_eq!(q.forward_matrix(), vec![vec![2, 0], vec![-4, 4]]);
        let q = ShearIndex::cone(3, 1, vec![1, 2], vec![0, 0, 0]).unwrap();
        assert_eq!(q.forward_matrix()[2], vec![2, 4, 4]);
    }

    #[test]
    fn shear_enumeration() {
        assert_eq!(shears(2, 0).len(), 3);
        assert_eq!(shears(2, 3).len(), 17);
        assert_eq!(shears(3, 1).len(), 25);
        assert_eq!(shears(2, 1)[0], vec![-2]);
    }
}
