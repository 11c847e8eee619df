use serde::{Deserialize, Serialize};

use super::cube::cube_of;
use super::index::{IndexSet, ShearIndex};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Half-open axis-aligned box `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxWindow {
    pub lo: Vec<Dyadic>,
    pub hi: Vec<Dyadic>,
}

impl BoxWindow {
    pub fn new(lo: Vec<Dyadic>, hi: Vec<Dyadic>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::param("window", "corner dimensions differ"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::param("window", "empty box"));
        }
        Ok(BoxWindow { lo, hi })
    }

    /// `[lo, hi)^d` with integer corners.
    pub fn cube(d: usize, lo: i64, hi: i64) -> Result<Self> {
        BoxWindow::new(vec![Dyadic::from(lo); d], vec![Dyadic::from(hi); d])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn corners(&self) -> Vec<Vec<Dyadic>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|m| (0..d).map(|i| if m >> i & 1 == 1 { self.hi[i] } else { self.lo[i] }).collect())
            .collect()
    }
}

/// Outcome of a tiling check on a sample grid.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PartitionReport {
    pub ok: bool,
    pub points: u64,
    pub cubes: usize,
    pub missed_count: u64,
    pub overlap_count: u64,
    /// First few points covered by no cube.
    pub missed: Vec<Vec<Dyadic>>,
    /// First few points covered more than once, with their multiplicity.
    pub overlaps: Vec<(Vec<Dyadic>, u32)>,
}

const LISTED: usize = 64;

/// Sample grid exponents: spacing `2^-(2j+1)` along the cone axis and
/// `2^-(j+1)` along the others, so every cube vertex and every edge midpoint
/// is a sample.
pub fn sample_exponents(idx: &ShearIndex) -> Vec<u32> {
    let d = idx.dim();
    match idx.band() {
        None => vec![1; d],
        Some((cone, j, _)) => (0..d)
            .map(|i| if i + 1 == cone as usize { 2 * j + 1 } else { j + 1 })
            .collect(),
    }
}

/// All translates of `template` (same cone, scale and shear) whose cube can
/// meet the window.
pub fn tiling_cover(template: &ShearIndex, window: &BoxWindow) -> Result<Vec<ShearIndex>> {
    template.validate()?;
    let d = template.dim();
    if window.dim() != d {
        return Err(Error::param("window", "dimension does not match the index"));
    }
    let images: Vec<Vec<Dyadic>> = window.corners().iter().map(|c| template.apply_forward(c)).collect();
    let ranges: Vec<(i64, i64)> = (0..d)
        .map(|r| {
            let lo = images.iter().map(|v| v[r]).min().unwrap().floor() as i64;
            let hi = images.iter().map(|v| v[r]).max().unwrap().floor() as i64;
            (lo, hi)
        })
        .collect();
    let mut out = Vec::new();
    for k in odometer(&ranges) {
        out.push(match template {
            ShearIndex::Coarse { .. } => ShearIndex::Coarse { k },
            ShearIndex::Cone { cone, j, shear, .. } => ShearIndex::Cone {
                cone: *cone,
                j: *j,
                shear: shear.clone(),
                k,
            },
        });
    }
    Ok(out)
}

/// Check that the cubes `Q^{j,l}` of one cone, scale and shear tile the
/// window: every sample point lies in exactly one cube.
pub fn partition_check(cone: u8, j: u32, shear: &[i64], window: &BoxWindow) -> Result<PartitionReport> {
    let template = ShearIndex::cone(cone, j, shear.to_vec(), vec![0; window.dim()])?;
    let cover = tiling_cover(&template, window)?;
    Ok(check_cover(&cover, window, &sample_exponents(&template)))
}

/// Count, for every sample point `p / 2^exps` in the window, how many cubes
/// of `cover` contain it. Membership is decided in integer arithmetic.
pub fn check_cover(cover: &[ShearIndex], window: &BoxWindow, exps: &[u32]) -> PartitionReport {
    let d = window.dim();
    let grid: Vec<(i64, i64)> = (0..d)
        .map(|i| {
            let lo = ceil_scaled(window.lo[i], exps[i]);
            // hi is excluded
            let hi = ceil_scaled(window.hi[i], exps[i]) - 1;
            (lo, hi)
        })
        .collect();
    let extent: Vec<usize> = grid.iter().map(|&(a, b)| (b - a + 1).max(0) as usize).collect();
    let total: usize = extent.iter().product();
    let mut counts = vec![0u32; total];
    let big_e = *exps.iter().max().unwrap_or(&0);

    for q in cover {
        let Ok(cube) = cube_of(q) else { continue };
        let (blo, bhi) = cube.bbox();
        let ranges: Vec<(i64, i64)> = (0..d)
            .map(|i| {
                let a = ceil_scaled(blo[i], exps[i]).max(grid[i].0);
                let b = floor_scaled(bhi[i], exps[i]).min(grid[i].1);
                (a, b)
            })
            .collect();
        if ranges.iter().any(|&(a, b)| a > b) {
            continue;
        }
        let m = q.forward_matrix();
        let k = q.translate();
        for p in odometer(&ranges) {
            if member(&m, k, &p, exps, big_e) {
                let mut flat = 0usize;
                for i in (0..d).rev() {
                    flat = flat * extent[i] + (p[i] - grid[i].0) as usize;
                }
                counts[flat] += 1;
            }
        }
    }

    let mut report = PartitionReport {
        points: total as u64,
        cubes: cover.len(),
        ..Default::default()
    };
    for (flat, &c) in counts.iter().enumerate() {
        if c == 1 {
            continue;
        }
        let point = || {
            let mut rest = flat;
            (0..d)
                .map(|i| {
                    let p = grid[i].0 + (rest % extent[i]) as i64;
                    rest /= extent[i];
                    Dyadic::new(p as i128, exps[i])
                })
                .collect::<Vec<_>>()
        };
        if c == 0 {
            report.missed_count += 1;
            if report.missed.len() < LISTED {
                report.missed.push(point());
            }
        } else {
            report.overlap_count += 1;
            if report.overlaps.len() < LISTED {
                report.overlaps.push((point(), c));
            }
        }
    }
    report.ok = report.missed_count == 0 && report.overlap_count == 0;
    report
}

/// `floor(M x) == k` for `x_i = p_i 2^-e_i`.
fn member(m: &[Vec<i128>], k: &[i64], p: &[i64], exps: &[u32], big_e: u32) -> bool {
    m.iter().zip(k).all(|(row, &kr)| {
        let num: i128 = row
            .iter()
            .zip(p)
            .zip(exps)
            .map(|((&a, &pi), &e)| a * ((pi as i128) << (big_e - e)))
            .sum();
        (num >> big_e) == kr as i128
    })
}

fn floor_scaled(x: Dyadic, e: u32) -> i64 {
    x.scale_pow2(e as i32).floor() as i64
}

fn ceil_scaled(x: Dyadic, e: u32) -> i64 {
    -((-x).scale_pow2(e as i32).floor() as i64)
}

/// All integer vectors in the product of the inclusive ranges, first axis
/// fastest.
fn odometer(ranges: &[(i64, i64)]) -> impl Iterator<Item = Vec<i64>> + '_ {
    let empty = ranges.iter().any(|&(a, b)| a > b);
    let mut cur: Option<Vec<i64>> = if empty { None } else { Some(ranges.iter().map(|r| r.0).collect()) };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = 0;
        loop {
            if i == next.len() {
                cur = None;
                break;
            }
            if next[i] < ranges[i].1 {
                next[i] += 1;
                cur = Some(next);
                break;
            }
            next[i] = ranges[i].0;
            i += 1;
        }
        Some(out)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extreme {
    Largest,
    Smallest,
}

/// Coarsest (`Largest`) or finest (`Smallest`) member of `gamma` whose cube
/// contains `x`. Equal-measure candidates are resolved by the index order.
pub fn extreme_cube_at<'a>(x: &[Dyadic], gamma: &'a IndexSet, mode: Extreme) -> Option<&'a ShearIndex> {
    let mut best: Option<&ShearIndex> = None;
    for q in gamma.iter().filter(|q| q.contains(x)) {
        best = match best {
            None => Some(q),
            Some(b) => {
                let better = match mode {
                    Extreme::Largest => q.log2_measure() > b.log2_measure(),
                    Extreme::Smallest => q.log2_measure() < b.log2_measure(),
                };
                // iteration is in ascending index order, so ties keep `b`
                Some(if better { q } else { b })
            }
        };
    }
    best
}
