use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::fsum;

/// Samples of a function on the `N x N` periodic grid, stored row-major:
/// `data[n1 * N + n2]` is the value at pixel `(n1, n2)`; the first index is
/// the image row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    n: usize,
    data: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(n: usize) -> Self {
        GridFunction {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_vec(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::param("grid", format!("{} samples for a {n}x{n} grid", data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("grid", "non-finite sample"));
        }
        Ok(GridFunction { n, data })
    }

    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(n, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                data.push(f(a, b));
            }
        }
        GridFunction { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn at(&self, n1: usize, n2: usize) -> Complex64 {
        self.data[n1 * self.n + n2]
    }

    /// `||f||^2 = (1/N^2) sum |f|^2`.
    pub fn norm_sqr(&self) -> f64 {
        fsum(self.data.iter().map(|z| z.norm_sqr())) / (self.n * self.n) as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `(1/N^2) sum f conj(g)`.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        let re = fsum(self.data.iter().zip(&other.data).map(|(a, b)| (a * b.conj()).re));
        let im = fsum(self.data.iter().zip(&other.data).map(|(a, b)| (a * b.conj()).im));
        Complex64::new(re, im) / (self.n * self.n) as f64
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        GridFunction {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Relative error `||self - reference|| / ||reference||`.
    pub fn rel_error(&self, reference: &GridFunction) -> f64 {
        let r = reference.norm();
        let e = self.sub(reference).norm();
        if r == 0.0 {
            e
        } else {
            e / r
        }
    }

    /// Real parts, row-major.
    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    // ---- I/O ----

    /// Headerless CSV: `N` rows of `N` real values.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let row = t
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| Error::parse(i + 1, format!("`{v}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::parse(1, "empty grid"));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::parse(i + 1, format!("row has {} values, expected {n}", r.len())));
        }
        Self::from_real(n, &rows.concat())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.data.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|z| format!("{:.16e}", z.re)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// PGM, plain (`P2`) or raw (`P5`), 8 or 16 bit. Samples are scaled to
    /// `[0, 1]` by the maximum value.
    pub fn read_pgm(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        let token = |pos: &mut usize| -> Result<String> {
            loop {
                while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                    *pos += 1;
                }
                if *pos < bytes.len() && bytes[*pos] == b'#' {
                    while *pos < bytes.len() && bytes[*pos] != b'\n' {
                        *pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = *pos;
            while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if start == *pos {
                return Err(Error::parse(0, "truncated PGM header"));
            }
            Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
        };
        let magic = token(&mut pos)?;
        let num = |s: String| s.parse::<usize>().map_err(|e| Error::parse(0, format!("PGM header `{s}`: {e}")));
        let w = num(token(&mut pos)?)?;
        let h = num(token(&mut pos)?)?;
        let maxval = num(token(&mut pos)?)?;
        if w != h {
            return Err(Error::param("image", format!("{w}x{h} image is not square")));
        }
        if maxval == 0 || maxval > 65535 {
            return Err(Error::parse(0, format!("PGM maxval {maxval}")));
        }
        let count = w * h;
        let values: Vec<f64> = match magic.as_str() {
            "P2" => (0..count)
                .map(|_| token(&mut pos).and_then(num).map(|v| v as f64))
                .collect::<Result<_>>()?,
            "P5" => {
                pos += 1; // single whitespace after maxval
                let wide = maxval > 255;
                let need = count * if wide { 2 } else { 1 };
                if bytes.len() < pos + need {
                    return Err(Error::parse(0, "truncated PGM raster"));
                }
                let raster = &bytes[pos..pos + need];
                if wide {
                    raster.chunks(2).map(|b| u16::from_be_bytes([b[0], b[1]]) as f64).collect()
                } else {
                    raster.iter().map(|&b| b as f64).collect()
                }
            }
            other => return Err(Error::parse(0, format!("unsupported PGM magic `{other}`"))),
        };
        let scale = maxval as f64;
        Self::from_real(w, &values.iter().map(|v| v / scale).collect::<Vec<_>>())
    }

    /// Write the real part as a raw PGM after mapping `[lo, hi]` linearly onto
    /// the gray range.
    pub fn write_pgm<W: Write>(&self, mut w: W, sixteen_bit: bool) -> Result<()> {
        let re = self.real_parts();
        let lo = re.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = re.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let maxval: u32 = if sixteen_bit { 65535 } else { 255 };
        write!(w, "P5\n{} {}\n{}\n", self.n, self.n, maxval)?;
        let mut buf = Vec::with_capacity(re.len() * 2);
        for v in re {
            let q = (((v - lo) / span) * maxval as f64).round() as u32;
            if sixteen_bit {
                buf.extend_from_slice(&(q as u16).to_be_bytes());
            } else {
                buf.push(q as u8);
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }
}

/// Unnormalized 2-D FFT on row-major `n x n` data.
#[derive(Clone)]
pub(crate) struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// `X(m) = sum_n x(n) exp(-2 pi i m.n / N)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(&self.forward, data);
    }

    /// `x(n) = sum_m X(m) exp(+2 pi i m.n / N)` (no `1/N^2`).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(&self.inverse, data);
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(data, &mut scratch);
        transpose(data, n);
        fft.process_with_scratch(data, &mut scratch);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for a in 0..n {
        for b in a + 1..n {
            data.swap(a * n + b, b * n + a);
        }
    }
}

/// Signed frequency of FFT bin `i`: `i` for `i < N/2`, `i - N` otherwise.
pub(crate) fn signed_bin(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_round_trip_and_plancherel() {
        let n = 16;
        let f = GridFunction::from_fn(n, |a, b| Complex64::new((a * 3 + b) as f64 % 5.0, (a as f64).sin()));
        let fft = Fft2::new(n);
        let mut d = f.data().to_vec();
        fft.forward(&mut d);
        let energy: f64 = d.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * n * n * n) as f64;
        assert!((energy - f.norm_sqr()).abs() < 1e-12);
        fft.inverse(&mut d);
        for (a, b) in d.iter().zip(f.data()) {
            assert!((a / (n * n) as f64 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_frequency() {
        let n = 8;
        let f = GridFunction::from_fn(n, |a, b| {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (a as f64 * 1.0 + b as f64 * 3.0) / n as f64)
        });
        let mut d = f.into_vec();
        Fft2::new(n).forward(&mut d);
        let peak = d.iter().position(|z| z.norm() > 1.0).unwrap();
        assert_eq!(peak, n + 3);
    }

    #[test]
    fn pgm_and_csv_round_trip() {
        let n = 4;
        let f = GridFunction::from_real(n, &(0..16).map(|v| v as f64 / 15.0).collect::<Vec<_>>()).unwrap();
        for wide in [false, true] {
            let mut buf = Vec::new();
            f.write_pgm(&mut buf, wide).unwrap();
            let g = GridFunction::read_pgm(&buf).unwrap();
            assert!(g.rel_error(&f) < 1e-2);
        }
        let plain = b"P2\n# c\n2 2\n255\n0 255\n51 102\n";
        let g = GridFunction::read_pgm(plain).unwrap();
        assert_eq!(g.at(0, 1).re, 1.0);
        assert_eq!(g.at(1, 0).re, 0.2);

        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let g = GridFunction::read_csv(&buf[..]).unwrap();
        assert_eq!(g, f);
    }
}
