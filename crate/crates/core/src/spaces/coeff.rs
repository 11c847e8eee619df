use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::textfmt::{format_index, parse_index_tokens};
use crate::geometry::{IndexSet, ShearIndex};

/// Finitely supported coefficient sequence `Q -> s_Q`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoeffSeq {
    entries: BTreeMap<ShearIndex, Complex64>,
}

/// Key of an `l^p` block in the sequence norms: `None` for the coarse layer,
/// otherwise `(cone, j, shear)`.
pub type BlockKey = Option<(u8, u32, Vec<i64>)>;

impl CoeffSeq {
    pub fn new() -> Self {
        Self::default()
    }

    /// `e_Q` scaled by `value`.
    pub fn single(idx: ShearIndex, value: Complex64) -> Result<Self> {
        let mut c = CoeffSeq::new();
        c.insert(idx, value)?;
        Ok(c)
    }

    /// Insert (or overwrite) one coefficient.
    pub fn insert(&mut self, idx: ShearIndex, value: Complex64) -> Result<()> {
        idx.validate()?;
        if let Some(d) = self.dim() {
            if idx.dim() != d {
                return Err(Error::InvalidIndex {
                    index: idx.to_string(),
                    reason: format!("dimension {} does not match sequence dimension {d}", idx.dim()),
                });
            }
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::param("coefficient", format!("non-finite value at {idx}")));
        }
        self.entries.insert(idx, value);
        Ok(())
    }

    pub fn insert_real(&mut self, idx: ShearIndex, value: f64) -> Result<()> {
        self.insert(idx, Complex64::new(value, 0.0))
    }

    pub fn get(&self, idx: &ShearIndex) -> Complex64 {
        self.entries.get(idx).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.entries.keys().next().map(ShearIndex::dim)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ShearIndex, &Complex64)> + '_ {
        self.entries.iter()
    }

    /// `(index, |s_Q|)` over stored entries.
    pub fn magnitudes(&self) -> impl Iterator<Item = (&ShearIndex, f64)> + '_ {
        self.entries.iter().map(|(q, v)| (q, v.norm()))
    }

    /// Indices with a nonzero coefficient.
    pub fn support(&self) -> IndexSet {
        IndexSet::try_from_iter(self.entries.iter().filter(|(_, v)| v.norm() != 0.0).map(|(q, _)| q.clone()))
            .expect("entries are validated on insertion")
    }

    /// Drop stored zeros.
    pub fn pruned(&self) -> CoeffSeq {
        CoeffSeq {
            entries: self.entries.iter().filter(|(_, v)| v.norm() != 0.0).map(|(q, v)| (q.clone(), *v)).collect(),
        }
    }

    pub fn scaled(&self, lambda: Complex64) -> CoeffSeq {
        CoeffSeq {
            entries: self.entries.iter().map(|(q, v)| (q.clone(), v * lambda)).collect(),
        }
    }

    /// Entrywise sum; both sequences must share a dimension.
    pub fn add(&self, other: &CoeffSeq) -> Result<CoeffSeq> {
        let mut out = self.clone();
        for (q, v) in other.iter() {
            let cur = out.get(q);
            out.insert(q.clone(), cur + v)?;
        }
        Ok(out)
    }

    /// `s|_Gamma`.
    pub fn restrict(&self, gamma: &IndexSet) -> CoeffSeq {
        CoeffSeq {
            entries: self.entries.iter().filter(|(q, _)| gamma.contains(q)).map(|(q, v)| (q.clone(), *v)).collect(),
        }
    }

    /// `s - s|_Gamma`.
    pub fn without(&self, gamma: &IndexSet) -> CoeffSeq {
        CoeffSeq {
            entries: self.entries.iter().filter(|(q, _)| !gamma.contains(q)).map(|(q, v)| (q.clone(), *v)).collect(),
        }
    }

    /// Magnitudes grouped into the blocks of the sequence norms, in index
    /// order.
    pub fn blocks(&self) -> BTreeMap<BlockKey, Vec<(&ShearIndex, f64)>> {
        let mut out: BTreeMap<BlockKey, Vec<(&ShearIndex, f64)>> = BTreeMap::new();
        for (q, v) in &self.entries {
            let key = q.band().map(|(c, j, l)| (c, j, l.to_vec()));
            out.entry(key).or_default().push((q, v.norm()));
        }
        out
    }

    /// One coefficient per line: the index record followed by the real and
    /// imaginary parts.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (q, v) in &self.entries {
            out.push_str(&format!("{} {:.16e} {:.16e}\n", format_index(q), v.re, v.im));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = CoeffSeq::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() < 4 {
                return Err(Error::parse(n + 1, "expected an index and two values"));
            }
            let (idx, used) = parse_index_tokens(&tokens, n + 1, 2)?;
            let num = |t: &str| t.parse::<f64>().map_err(|e| Error::parse(n + 1, format!("`{t}`: {e}")));
            let re = num(tokens[used])?;
            let im = num(tokens[used + 1])?;
            if c.entries.contains_key(&idx) {
                return Err(Error::parse(n + 1, format!("duplicate index {idx}")));
            }
            c.insert(idx, Complex64::new(re, im)).map_err(|e| Error::parse(n + 1, e.to_string()))?;
        }
        Ok(c)
    }
}

impl FromIterator<(ShearIndex, Complex64)> for CoeffSeq {
    /// Collects without validation; prefer [`CoeffSeq::insert`] for untrusted
    /// input.
    fn from_iter<I: IntoIterator<Item = (ShearIndex, Complex64)>>(iter: I) -> Self {
        CoeffSeq {
            entries: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_is_lossless() {
        let mut c = CoeffSeq::new();
        c.insert(ShearIndex::coarse(vec![0, 1]), Complex64::new(0.1, -1.0 / 3.0)).unwrap();
        c.insert(ShearIndex::cone(2, 3, vec![-7], vec![5, -2]).unwrap(), Complex64::new(1e-300, 2.5)).unwrap();
        let back = CoeffSeq::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = CoeffSeq::from_text("C 0 0 1 0\nS 1 0 2 0 0 1 0\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(CoeffSeq::from_text("C 0 0 x 1\n").is_err());
        assert!(CoeffSeq::from_text("").unwrap().is_empty());
    }

    #[test]
    fn blocks_group_by_band() {
        let mut c = CoeffSeq::new();
        c.insert_real(ShearIndex::coarse(vec![0, 0]), 1.0).unwrap();
        c.insert_real(ShearIndex::cone(1, 1, vec![0], vec![0, 0]).unwrap(), 2.0).unwrap();
        c.insert_real(ShearIndex::cone(1, 1, vec![0], vec![1, 0]).unwrap(), -3.0).unwrap();
        c.insert_real(ShearIndex::cone(1, 1, vec![1], vec![1, 0]).unwrap(), 4.0).unwrap();
        let b = c.blocks();
        assert_eq!(b.len(), 3);
        assert_eq!(b[&Some((1, 1, vec![0]))].len(), 2);
    }
}
