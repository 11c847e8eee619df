use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smooth 1-D profiles `psi1_hat` (radial) and `psi2_hat` (angular), plus the
/// coarse-scale profile, built from a polynomial Meyer ramp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window1D {
    order: u32,
}

/// Windows whose ramp is `C^order` at the junctions.
pub fn build_windows(smoothness_order: u32) -> Result<Window1D> {
    Window1D::new(smoothness_order)
}

impl Window1D {
    pub fn new(order: u32) -> Result<Self> {
        if order == 0 || order > 12 {
            return Err(Error::param("smoothness_order", format!("{order} not in 1..=12")));
        }
        Ok(Window1D { order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Ramp `v` with `v = 0` on `(-inf, 0]`, `v = 1` on `[1, inf)` and
    /// `v(x) + v(1-x) = 1`. On `[0, 1]` it is the regularized incomplete beta
    /// function `I_x(n+1, n+1)`; for `n = 3` this is `35x^4 - 84x^5 + 70x^6 - 20x^7`.
    pub fn ramp(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        if x > 0.5 {
            // evaluate the smaller half so that v(x) + v(1-x) == 1 to rounding
            return 1.0 - self.ramp(1.0 - x);
        }
        let n = self.order as i32;
        let m = 2 * n + 1;
        let y = 1.0 - x;
        // C(m, n+1)
        let mut c = (1..=n + 1).fold(1.0f64, |c, i| c * (m - n - 1 + i) as f64 / i as f64);
        let mut acc = 0.0;
        for k in (n + 1)..=m {
            acc += c * x.powi(k) * y.powi(m - k);
            c = c * (m - k) as f64 / (k + 1) as f64;
        }
        acc
    }

    /// Radial window, supported on `1/16 <= |w| <= 1/2` and equal to 1 on
    /// `[1/8, 1/4]`.
    pub fn psi1(&self, w: f64) -> f64 {
        let a = w.abs();
        if a <= 1.0 / 16.0 || a >= 0.5 {
            0.0
        } else if a < 0.125 {
            (std::f64::consts::FRAC_PI_2 * self.ramp(16.0 * a - 1.0)).sin()
        } else if a <= 0.25 {
            1.0
        } else {
            (std::f64::consts::FRAC_PI_2 * self.ramp(4.0 * a - 1.0)).cos()
        }
    }

    /// Angular window, supported on `[-1, 1]`, with
    /// `psi2(w-1)^2 + psi2(w)^2 + psi2(w+1)^2 = 1` on `[-1, 1]`.
    pub fn psi2(&self, w: f64) -> f64 {
        let a = w.abs();
        if a >= 1.0 {
            0.0
        } else {
            (std::f64::consts::FRAC_PI_2 * self.ramp(1.0 - a)).sin()
        }
    }

    /// Coarse-scale profile in the sup-norm radius: 1 up to `1/16`, then
    /// complementary to `psi1` so that `coarse^2 + psi1^2 = 1` on `[1/16, 1/8]`.
    pub fn coarse(&self, r: f64) -> f64 {
        let a = r.abs();
        if a <= 1.0 / 16.0 {
            1.0
        } else if a >= 0.125 {
            0.0
        } else {
            (std::f64::consts::FRAC_PI_2 * self.ramp(16.0 * a - 1.0)).cos()
        }
    }

    /// Radial factor of scale `j` in a system whose finest scale is `j_max`.
    /// Below `j_max` this is `psi1(4^-j w)`; the finest scale keeps the rising
    /// edge and stays 1 above it, absorbing every frequency the grid can hold.
    pub fn radial(&self, j: u32, j_max: u32, w: f64) -> f64 {
        let a = w.abs() * (-2.0 * j as f64).exp2();
        if j == j_max && a >= 0.125 {
            1.0
        } else {
            self.psi1(a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_order_three_polynomial() {
        let w = Window1D::new(3).unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let p = 35.0 * x.powi(4) - 84.0 * x.powi(5) + 70.0 * x.powi(6) - 20.0 * x.powi(7);
            assert!((w.ramp(x) - p).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn ramp_order_one() {
        let w = Window1D::new(1).unwrap();
        let x: f64 = 0.3;
        assert!((w.ramp(x) - (3.0 * x * x - 2.0 * x * x * x)).abs() < 1e-15);
    }

    #[test]
    fn ramp_symmetry() {
        for n in 1..=6 {
            let w = Window1D::new(n).unwrap();
            for i in 0..=64 {
                let x = i as f64 / 64.0;
                assert_eq!(w.ramp(x) + w.ramp(1.0 - x), 1.0);
            }
        }
    }

    #[test]
    fn supports() {
        let w = Window1D::new(3).unwrap();
        assert_eq!(w.psi1(1.0 / 32.0), 0.0);
        assert_eq!(w.psi1(0.5), 0.0);
        assert_eq!(w.psi1(0.2), 1.0);
        assert_eq!(w.psi2(1.0), 0.0);
        assert_eq!(w.psi2(0.0), 1.0);
        assert_eq!(w.coarse(0.125), 0.0);
        assert!(Window1D::new(0).is_err());
    }
}
