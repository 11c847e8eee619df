use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{signed_bin, Fft2, GridFunction};
use super::window::Window1D;
use crate::error::{Error, Result};
use crate::geometry::ShearIndex;
use crate::spaces::CoeffSeq;

/// One frequency band of the 2-D system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Band {
    Coarse,
    Cone { cone: u8, j: u32, shear: i64 },
}

impl Band {
    /// Cone-1 bands with `|shear| = 2^j` straddle the diagonal and carry the
    /// matching cone-2 piece on the other side.
    pub fn is_seam(&self) -> bool {
        matches!(*self, Band::Cone { j, shear, .. } if shear.unsigned_abs() == 1u64 << j)
    }

    pub fn of_index(idx: &ShearIndex) -> Option<Band> {
        match idx {
            ShearIndex::Coarse { .. } => Some(Band::Coarse),
            ShearIndex::Cone { cone, j, shear, .. } => (shear.len() == 1).then(|| Band::Cone {
                cone: *cone,
                j: *j,
                shear: shear[0],
            }),
        }
    }

    pub fn index(&self, k1: i64, k2: i64) -> ShearIndex {
        match *self {
            Band::Coarse => ShearIndex::Coarse { k: vec![k1, k2] },
            Band::Cone { cone, j, shear } => ShearIndex::Cone {
                cone,
                j,
                shear: vec![shear],
                k: vec![k1, k2],
            },
        }
    }
}

/// All bands of a system with finest scale `j_max`: the coarse band, then per
/// scale the cone-1 shears `-2^j..=2^j` and the cone-2 shears strictly inside
/// `(-2^j, 2^j)`.
pub fn band_list(j_max: u32) -> Vec<Band> {
    let mut out = vec![Band::Coarse];
    for j in 0..=j_max {
        let b = 1i64 << j;
        for shear in -b..=b {
            out.push(Band::Cone { cone: 1, j, shear });
        }
        for shear in (-b + 1)..b {
            out.push(Band::Cone { cone: 2, j, shear });
        }
    }
    out
}

/// Spectrum of `band` at the frequency `xi`.
pub fn eval_band(window: &Window1D, j_max: u32, band: Band, xi: [f64; 2]) -> f64 {
    match band {
        Band::Coarse => window.coarse(xi[0].abs().max(xi[1].abs())),
        Band::Cone { cone, j, shear } => {
            let (a, b) = if cone == 1 { (xi[0], xi[1]) } else { (xi[1], xi[0]) };
            let scale = (1u64 << j) as f64;
            let l = shear as f64;
            if b.abs() <= a.abs() {
                if a == 0.0 {
                    return 0.0;
                }
                window.radial(j, j_max, a) * window.psi2(scale * b / a - l)
            } else if band.is_seam() {
                window.radial(j, j_max, b) * window.psi2(scale * a / b - l)
            } else {
                0.0
            }
        }
    }
}

/// Pointwise deviation of `sum |spectrum|^2` from 1.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ParsevalReport {
    /// Max over all lattice points.
    pub max: f64,
    /// Max over points no seam band touches.
    pub interior: f64,
    /// Max over points touched by a seam band.
    pub seam: f64,
    pub points: usize,
}

/// Band-limited cone-adapted shearlet system on an `N x N` periodic grid.
///
/// The grid samples a torus of side `L = N / 4^j_max` (in the units where the
/// scale-`j` cubes have side lengths `4^-j` and `2^-j`), so the finest band
/// reaches exactly the Nyquist frequency `N / (2L) = 4^j_max / 2`.
#[derive(Clone)]
pub struct ShearletSystem2D {
    n: usize,
    j_max: u32,
    torus: usize,
    window: Window1D,
    bands: Vec<Band>,
    spectra: Vec<Vec<f64>>,
    fft: Fft2,
}

impl std::fmt::Debug for ShearletSystem2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ShearletSystem2D")
            .field("n", &self.n)
            .field("j_max", &self.j_max)
            .field("torus", &self.torus)
            .field("bands", &self.bands.len())
            .finish()
    }
}

/// Dense coefficients of one band; `values[k1 * e2 + k2]` for the translate
/// ranges `(e1, e2)` of [`ShearletSystem2D::translate_extent`].
#[derive(Clone, Debug, PartialEq)]
pub struct BandCoeffs {
    pub band: Band,
    pub values: Vec<Complex64>,
}

impl ShearletSystem2D {
    pub fn new(n: usize, j_max: u32, window: Window1D) -> Result<Self> {
        Self::with_bands(n, j_max, window, band_list(j_max))
    }

    /// System restricted to a subset of the bands (used to measure what a
    /// band contributes).
    pub fn with_bands(n: usize, j_max: u32, window: Window1D, bands: Vec<Band>) -> Result<Self> {
        if !n.is_power_of_two() || n < 4 {
            return Err(Error::param("n", format!("{n} is not a power of two >= 4")));
        }
        let top = 1usize
            .checked_shl(2 * j_max)
            .filter(|&t| t <= n)
            .ok_or_else(|| Error::param("j_max", format!("4^{j_max} exceeds the grid size {n}")))?;
        let torus = n / top;
        let all = band_list(j_max);
        if let Some(b) = bands.iter().find(|b| !all.contains(b)) {
            return Err(Error::param("bands", format!("{b:?} is not a band of the system")));
        }
        let lattice: Vec<f64> = (0..n).map(|i| signed_bin(i, n) as f64 / torus as f64).collect();
        let spectra = bands
            .par_iter()
            .map(|&b| {
                let mut s = Vec::with_capacity(n * n);
                for &x1 in &lattice {
                    for &x2 in &lattice {
                        s.push(eval_band(&window, j_max, b, [x1, x2]));
                    }
                }
                s
            })
            .collect();
        Ok(ShearletSystem2D {
            n,
            j_max,
            torus,
            window,
            bands,
            spectra,
            fft: Fft2::new(n),
        })
    }

    pub fn without_band(&self, band: Band) -> Result<Self> {
        let bands = self.bands.iter().copied().filter(|&b| b != band).collect();
        Self::with_bands(self.n, self.j_max, self.window, bands)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    /// Torus side length `L` in cube units.
    pub fn torus_side(&self) -> usize {
        self.torus
    }

    pub fn window(&self) -> &Window1D {
        &self.window
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Frequency `xi` of FFT bin `i` along either axis.
    pub fn frequency(&self, i: usize) -> f64 {
        signed_bin(i, self.n) as f64 / self.torus as f64
    }

    fn band_pos(&self, band: Band) -> Result<usize> {
        self.bands
            .iter()
            .position(|&b| b == band)
            .ok_or_else(|| Error::param("band", format!("{band:?} is not a band of this system")))
    }

    /// Sampled spectrum of a band on the frequency lattice, in FFT order.
    pub fn band_spectrum(&self, band: Band) -> Result<&[f64]> {
        Ok(&self.spectra[self.band_pos(band)?])
    }

    /// Translates per axis: `k1 in 0..e1`, `k2 in 0..e2`.
    pub fn translate_extent(&self, band: Band) -> (usize, usize) {
        let l = self.torus;
        match band {
            Band::Coarse => (l, l),
            Band::Cone { cone: 1, j, .. } => (l << (2 * j), l << j),
            Band::Cone { j, .. } => (l << j, l << (2 * j)),
        }
    }

    /// Number of coefficients of a band.
    pub fn sample_count(&self, band: Band) -> usize {
        let (a, b) = self.translate_extent(band);
        a * b
    }

    /// Pixel at which the atom `(band, k)` is centred: the grid point
    /// `x = (B^l A^j)^-1 k` on the torus.
    pub fn sample_position(&self, band: Band, k1: i64, k2: i64) -> (usize, usize) {
        let n = self.n as i64;
        let jm = self.j_max;
        let (p1, p2) = match band {
            Band::Coarse => {
                let s = 1i64 << (2 * jm);
                (s * k1, s * k2)
            }
            Band::Cone { cone, j, shear } => {
                let fine = 1i64 << (2 * (jm - j));
                let coarse = 1i64 << (2 * jm - j);
                if cone == 1 {
                    (fine * (k1 - shear * k2), coarse * k2)
                } else {
                    (coarse * k1, fine * (k2 - shear * k1))
                }
            }
        };
        (p1.rem_euclid(n) as usize, p2.rem_euclid(n) as usize)
    }

    /// Check that an index belongs to the system and return its band and
    /// flat position.
    pub fn locate(&self, idx: &ShearIndex) -> Result<(usize, usize)> {
        let band = Band::of_index(idx).ok_or_else(|| Error::OutOfRange(idx.clone()))?;
        let b = self.bands.iter().position(|&x| x == band).ok_or_else(|| Error::OutOfRange(idx.clone()))?;
        let k = idx.translate();
        let (e1, e2) = self.translate_extent(band);
        if k.len() != 2 || k[0] < 0 || k[1] < 0 || k[0] as usize >= e1 || k[1] as usize >= e2 {
            return Err(Error::OutOfRange(idx.clone()));
        }
        Ok((b, k[0] as usize * e2 + k[1] as usize))
    }

    fn check_grid(&self, f: &GridFunction) -> Result<()> {
        if f.size() != self.n {
            return Err(Error::GridMismatch {
                expected: self.n,
                got: f.size(),
            });
        }
        Ok(())
    }

    /// `f_hat(m) = (1/N^2) sum_n f(n) e^{-2 pi i m.n/N}`.
    fn spectrum_of(&self, f: &GridFunction) -> Vec<Complex64> {
        let mut fh = f.data().to_vec();
        self.fft.forward(&mut fh);
        let scale = 1.0 / (self.n * self.n) as f64;
        fh.iter_mut().for_each(|z| *z *= scale);
        fh
    }

    /// Coefficients of every band in dense form.
    pub fn analyze_dense(&self, f: &GridFunction) -> Result<Vec<BandCoeffs>> {
        self.check_grid(f)?;
        let fh = self.spectrum_of(f);
        Ok(self
            .bands
            .par_iter()
            .zip(self.spectra.par_iter())
            .map(|(&band, h)| {
                let mut g: Vec<Complex64> = fh.iter().zip(h).map(|(z, &w)| z * w).collect();
                self.fft.inverse(&mut g);
                let norm = (self.sample_count(band) as f64).sqrt().recip();
                let (e1, e2) = self.translate_extent(band);
                let mut values = Vec::with_capacity(e1 * e2);
                for k1 in 0..e1 as i64 {
                    for k2 in 0..e2 as i64 {
                        let (a, b) = self.sample_position(band, k1, k2);
                        values.push(g[a * self.n + b] * norm);
                    }
                }
                BandCoeffs { band, values }
            })
            .collect())
    }

    /// `s_Q = <f, psi_Q>` for every atom of the system.
    pub fn analyze(&self, f: &GridFunction) -> Result<CoeffSeq> {
        let dense = self.analyze_dense(f)?;
        Ok(self.dense_to_seq(&dense))
    }

    pub fn dense_to_seq(&self, dense: &[BandCoeffs]) -> CoeffSeq {
        let mut out = Vec::new();
        for bc in dense {
            let (_, e2) = self.translate_extent(bc.band);
            for (flat, v) in bc.values.iter().enumerate() {
                out.push((bc.band.index((flat / e2) as i64, (flat % e2) as i64), *v));
            }
        }
        out.into_iter().collect()
    }

    /// Scatter a sequence into dense band arrays; every index must belong to
    /// the system.
    pub fn seq_to_dense(&self, c: &CoeffSeq) -> Result<Vec<BandCoeffs>> {
        let mut dense: Vec<BandCoeffs> = self
            .bands
            .iter()
            .map(|&band| BandCoeffs {
                band,
                values: vec![Complex64::new(0.0, 0.0); self.sample_count(band)],
            })
            .collect();
        for (q, v) in c.iter() {
            let (b, flat) = self.locate(q)?;
            dense[b].values[flat] = *v;
        }
        Ok(dense)
    }

    /// `sum_Q c_Q psi_Q`.
    pub fn synthesize(&self, c: &CoeffSeq) -> Result<GridFunction> {
        let dense = self.seq_to_dense(c)?;
        self.synthesize_dense(&dense)
    }

    pub fn synthesize_dense(&self, dense: &[BandCoeffs]) -> Result<GridFunction> {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = dense
            .par_iter()
            .filter(|bc| bc.values.iter().any(|v| v.norm_sqr() != 0.0))
            .map(|bc| -> Result<Vec<Complex64>> {
                let b = self.band_pos(bc.band)?;
                if bc.values.len() != self.sample_count(bc.band) {
                    return Err(Error::param("coefficients", format!("wrong length for {:?}", bc.band)));
                }
                let (_, e2) = self.translate_extent(bc.band);
                let mut s = vec![zero; n * n];
                for (flat, v) in bc.values.iter().enumerate() {
                    let (a, p) = self.sample_position(bc.band, (flat / e2) as i64, (flat % e2) as i64);
                    s[a * n + p] += *v;
                }
                self.fft.forward(&mut s);
                let norm = (self.sample_count(bc.band) as f64).sqrt().recip();
                for (z, &h) in s.iter_mut().zip(&self.spectra[b]) {
                    *z *= h * norm;
                }
                Ok(s)
            })
            .try_reduce(
                || vec![zero; n * n],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    Ok(a)
                },
            )?;
        self.fft.inverse(&mut acc);
        GridFunction::from_vec(n, acc)
    }

    /// The atom `psi_Q` on the grid.
    pub fn atom(&self, idx: &ShearIndex) -> Result<GridFunction> {
        self.synthesize(&CoeffSeq::single(idx.clone(), Complex64::new(1.0, 0.0))?)
    }

    /// `||psi_Q||^2 = (1/K) sum_m |spectrum(m)|^2`, with `K` the number of
    /// coefficients in the band. For a redundant Parseval frame this is at
    /// most 1 and in general below it.
    pub fn atom_norm_sqr(&self, band: Band) -> Result<f64> {
        let h = self.band_spectrum(band)?;
        Ok(crate::sum::fsum(h.iter().map(|w| w * w)) / self.sample_count(band) as f64)
    }

    /// `|1 - sum_b |spectrum_b|^2|` over the lattice.
    pub fn parseval_defect(&self) -> ParsevalReport {
        self.parseval_defect_within(f64::INFINITY)
    }

    /// Like [`parseval_defect`](Self::parseval_defect), restricted to
    /// `|xi|_inf <= radius`.
    pub fn parseval_defect_within(&self, radius: f64) -> ParsevalReport {
        let n = self.n;
        let seam: Vec<usize> = (0..self.bands.len()).filter(|&b| self.bands[b].is_seam()).collect();
        let mut rep = ParsevalReport::default();
        for i1 in 0..n {
            for i2 in 0..n {
                if self.frequency(i1).abs().max(self.frequency(i2).abs()) > radius {
                    continue;
                }
                let p = i1 * n + i2;
                let total: f64 = self.spectra.iter().map(|s| s[p] * s[p]).sum();
                let defect = (1.0 - total).abs();
                rep.points += 1;
                rep.max = rep.max.max(defect);
                if seam.iter().any(|&b| self.spectra[b][p] != 0.0) {
                    rep.seam = rep.seam.max(defect);
                } else {
                    rep.interior = rep.interior.max(defect);
                }
            }
        }
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system() -> ShearletSystem2D {
        ShearletSystem2D::new(64, 2, Window1D::new(3).unwrap()).unwrap()
    }

    #[test]
    fn band_count() {
        assert_eq!(band_list(3).len(), 61);
        assert_eq!(band_list(0).len(), 5);
    }

    #[test]
    fn exact_parseval_on_lattice() {
        let rep = system().parseval_defect();
        assert!(rep.max < 1e-14, "{rep:?}");
        assert!(rep.points == 64 * 64);
    }

    #[test]
    fn seam_band_continuous_on_diagonal() {
        let w = Window1D::new(3).unwrap();
        let band = Band::Cone { cone: 1, j: 1, shear: 2 };
        let on = eval_band(&w, 2, band, [2.0, 2.0]);
        let above = eval_band(&w, 2, band, [2.0, 2.0 + 1e-9]);
        let below = eval_band(&w, 2, band, [2.0, 2.0 - 1e-9]);
        assert!((on - above).abs() < 1e-6 && (on - below).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_sizes() {
        let w = Window1D::new(3).unwrap();
        assert!(ShearletSystem2D::new(48, 1, w).is_err());
        assert!(ShearletSystem2D::new(16, 3, w).is_err());
        let s = system();
        assert!(matches!(s.analyze(&GridFunction::zeros(32)), Err(Error::GridMismatch { .. })));
    }
}
