//! Seeded generators for index sets, coefficient sequences and test signals.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::Dyadic;
use crate::frame::GridFunction;
use crate::geometry::{cube_of, shears, IndexSet, ShearIndex};
use crate::spaces::CoeffSeq;

/// Bits of resolution of random sample points.
const POINT_BITS: u32 = 20;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of random two-dimensional index sets: scales `0..=j_max`, all
/// admissible shears, cubes meeting the window `[0, side)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaShape {
    pub j_max: u32,
    pub side: i64,
    /// Probability of drawing a coarse translate instead of a band cube.
    pub coarse_rate: f64,
}

impl Default for GammaShape {
    fn default() -> Self {
        GammaShape {
            j_max: 4,
            side: 8,
            coarse_rate: 0.0,
        }
    }
}

/// Uniform dyadic point in `[0, side)^2`.
pub fn random_point(rng: &mut impl Rng, side: i64) -> Vec<Dyadic> {
    (0..2)
        .map(|_| Dyadic::new(rng.gen_range(0..(side as i128) << POINT_BITS), POINT_BITS))
        .collect()
}

/// Uniform dyadic point of the cube of `idx`.
pub fn random_point_in(rng: &mut impl Rng, idx: &ShearIndex) -> Vec<Dyadic> {
    let cube = cube_of(idx).expect("valid index");
    let u: Vec<Dyadic> = (0..idx.dim())
        .map(|_| Dyadic::new(rng.gen_range(0..1i128 << POINT_BITS), POINT_BITS))
        .collect();
    cube.origin
        .iter()
        .enumerate()
        .map(|(row, &o)| u.iter().zip(&cube.edges).fold(o, |acc, (&ui, e)| acc + ui * e[row]))
        .collect()
}

/// The cube of band `(cone, j, shear)` (or the coarse translate) containing `x`.
pub fn index_at(x: &[Dyadic], cone: Option<(u8, u32, i64)>) -> ShearIndex {
    let probe = match cone {
        None => ShearIndex::coarse(vec![0, 0]),
        Some((c, j, l)) => ShearIndex::cone(c, j, vec![l], vec![0, 0]).expect("admissible shear"),
    };
    let k = probe.apply_forward(x).iter().map(|y| y.floor() as i64).collect();
    match cone {
        None => ShearIndex::coarse(k),
        Some((c, j, l)) => ShearIndex::cone(c, j, vec![l], k).expect("admissible shear"),
    }
}

fn random_band(rng: &mut impl Rng, j_max: u32) -> (u8, u32, i64) {
    let cone = rng.gen_range(1..=2u8);
    let j = rng.gen_range(0..=j_max);
    let b = 1i64 << j;
    (cone, j, rng.gen_range(-b..=b))
}

/// A random cube meeting the window.
pub fn random_index(rng: &mut impl Rng, shape: &GammaShape) -> ShearIndex {
    let x = random_point(rng, shape.side);
    if rng.gen_bool(shape.coarse_rate.clamp(0.0, 1.0)) {
        index_at(&x, None)
    } else {
        index_at(&x, Some(random_band(rng, shape.j_max)))
    }
}

/// `size` distinct random cubes.
pub fn random_gamma(rng: &mut impl Rng, size: usize, shape: &GammaShape) -> IndexSet {
    let mut g = IndexSet::new();
    while g.len() < size {
        g.insert(random_index(rng, shape)).expect("two-dimensional");
    }
    g
}

/// Stacks of cubes through `points` random points: at every scale a random
/// selection of the shears whose cube contains the point.
pub fn nested_gamma(rng: &mut impl Rng, points: usize, shape: &GammaShape) -> IndexSet {
    let mut g = IndexSet::new();
    for _ in 0..points {
        let x = random_point(rng, shape.side);
        for j in 0..=shape.j_max {
            for cone in 1..=2u8 {
                for l in shears(2, j) {
                    if rng.gen_bool(0.5) {
                        g.insert(index_at(&x, Some((cone, j, l[0])))).expect("two-dimensional");
                    }
                }
            }
        }
    }
    g
}

/// Random real amplitude with log-uniform modulus in `[1/8, 8]` and random
/// sign.
pub fn random_amplitude(rng: &mut impl Rng) -> f64 {
    let m = rng.gen_range(-3.0..3.0f64).exp2();
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Random sequence supported on `size` random cubes.
pub fn random_sequence(rng: &mut impl Rng, size: usize, shape: &GammaShape) -> CoeffSeq {
    let gamma = random_gamma(rng, size, shape);
    let mut c = CoeffSeq::new();
    for q in &gamma {
        c.insert_real(q.clone(), random_amplitude(rng)).expect("valid index");
    }
    c
}

/// Random complex trigonometric polynomial on the `n x n` grid with
/// frequencies `|m_i| < cutoff`.
pub fn band_limited(rng: &mut impl Rng, n: usize, cutoff: usize) -> GridFunction {
    let cutoff = cutoff.min(n / 2);
    let mut spec = vec![Complex64::new(0.0, 0.0); n * n];
    let wrap = |m: i64| m.rem_euclid(n as i64) as usize;
    for m1 in -(cutoff as i64) + 1..cutoff as i64 {
        for m2 in -(cutoff as i64) + 1..cutoff as i64 {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            spec[wrap(m1) * n + wrap(m2)] = z;
        }
    }
    let fft = crate::frame::grid::Fft2::new(n);
    fft.inverse(&mut spec);
    GridFunction::from_vec(n, spec).expect("finite samples")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_fall_in_their_cube() {
        let mut r = rng(3);
        for _ in 0..200 {
            let q = random_index(&mut r, &GammaShape::default());
            let x = random_point_in(&mut r, &q);
            assert!(q.contains(&x), "{q}");
        }
    }

    #[test]
    fn generators_are_reproducible() {
        let a = random_sequence(&mut rng(11), 20, &GammaShape::default());
        let b = random_sequence(&mut rng(11), 20, &GammaShape::default());
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
    }

    #[test]
    fn nested_stacks_contain_their_points() {
        let g = nested_gamma(&mut rng(5), 1, &GammaShape { j_max: 2, ..Default::default() });
        assert!(!g.is_empty());
    }
}
