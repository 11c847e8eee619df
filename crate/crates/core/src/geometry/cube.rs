use serde::{Deserialize, Serialize};

use super::index::{other_axes, ShearIndex};
use crate::dyadic::Dyadic;
use crate::error::Result;

/// The half-open parallelepiped `origin + E [0,1)^d`, where the columns of
/// `E` are `edges`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub index: ShearIndex,
    pub origin: Vec<Dyadic>,
    /// `edges[i]` is the image of the i-th unit vector.
    pub edges: Vec<Vec<Dyadic>>,
    pub measure: Dyadic,
}

/// Exact inverse of [`ShearIndex::forward_matrix`], `A^-j B^[-l]`.
pub fn inverse_matrix(idx: &ShearIndex) -> Vec<Vec<Dyadic>> {
    let d = idx.dim();
    let mut m = vec![vec![Dyadic::ZERO; d]; d];
    match idx {
        ShearIndex::Coarse { .. } => {
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = Dyadic::ONE;
            }
        }
        ShearIndex::Cone { cone, j, shear, .. } => {
            let c = *cone as usize - 1;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = Dyadic::pow2_neg(if i == c { 2 * j } else { *j });
            }
            for (col, l) in other_axes(d, c).zip(shear) {
                m[c][col] = Dyadic::new(-(*l as i128), 2 * j);
            }
        }
    }
    m
}

/// The cube `A^-j B^[-l] (Q0 + k)` of an index.
pub fn cube_of(idx: &ShearIndex) -> Result<Cube> {
    idx.validate()?;
    let d = idx.dim();
    let inv = inverse_matrix(idx);
    let k: Vec<Dyadic> = idx.translate().iter().map(|&v| Dyadic::from(v)).collect();
    let origin = inv
        .iter()
        .map(|row| row.iter().zip(&k).fold(Dyadic::ZERO, |a, (&m, &x)| a + m * x))
        .collect();
    let edges = (0..d).map(|col| inv.iter().map(|row| row[col]).collect()).collect();
    Ok(Cube {
        index: idx.clone(),
        origin,
        edges,
        measure: idx.measure(),
    })
}

impl Cube {
    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    /// The `2^d` corners, ordered by the bits of the corner number.
    pub fn vertices(&self) -> Vec<Vec<Dyadic>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                let mut v = self.origin.clone();
                for (i, e) in self.edges.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        for (vi, &ei) in v.iter_mut().zip(e) {
                            *vi = *vi + ei;
                        }
                    }
                }
                v
            })
            .collect()
    }

    /// Closed axis-aligned bounding box `(lo, hi)`.
    pub fn bbox(&self) -> (Vec<Dyadic>, Vec<Dyadic>) {
        let verts = self.vertices();
        let d = self.dim();
        let lo = (0..d).map(|i| verts.iter().map(|v| v[i]).min().unwrap()).collect();
        let hi = (0..d).map(|i| verts.iter().map(|v| v[i]).max().unwrap()).collect();
        (lo, hi)
    }

    pub fn contains(&self, x: &[Dyadic]) -> bool {
        self.index.contains(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn unit_square_at_scale_zero() {
        let c = cube_of(&ShearIndex::cone(1, 0, vec![0], vec![0, 0]).unwrap()).unwrap();
        assert_eq!(c.measure, Dyadic::ONE);
        assert_eq!(
            c.vertices(),
            vec![
                vec![d("0"), d("0")],
                vec![d("1"), d("0")],
                vec![d("0"), d("1")],
                vec![d("1"), d("1")]
            ]
        );
    }

    #[test]
    fn inverse_is_inverse() {
        for idx in [
            ShearIndex::cone(1, 2, vec![-3], vec![1, 2]).unwrap(),
            ShearIndex::cone(2, 3, vec![8], vec![-1, 2]).unwrap(),
            ShearIndex::cone(2, 1, vec![1, -2], vec![0, 0, 1]).unwrap(),
        ] {
            let m = idx.forward_matrix();
            let inv = inverse_matrix(&idx);
            let n = m.len();
            for r in 0..n {
                for c in 0..n {
                    let v = (0..n).fold(Dyadic::ZERO, |a, t| a + inv[t][c].mul_int(m[r][t]));
                    let want = if r == c { Dyadic::ONE } else { Dyadic::ZERO };
                    assert_eq!(v, want, "{idx} at ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn origin_in_cube_far_corner_not() {
        let idx = ShearIndex::cone(2, 2, vec![-3], vec![4, -7]).unwrap();
        let c = cube_of(&idx).unwrap();
        assert!(c.contains(&c.origin));
        let far: Vec<Dyadic> = c.vertices().pop().unwrap();
        assert!(!c.contains(&far));
    }
}
