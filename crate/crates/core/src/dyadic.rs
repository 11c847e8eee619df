//! Exact dyadic rationals `num / 2^exp`.
//!
//! Every vertex of a shearlet cube and every sample point used by the
//! tiling checks is dyadic, so membership can be decided exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A dyadic rational `num / 2^exp` kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        Dyadic { num, exp }.normalized()
    }

    pub fn from_int(n: i128) -> Self {
        Dyadic { num: n, exp: 0 }
    }

    /// `2^-e`.
    pub fn pow2_neg(e: u32) -> Self {
        Dyadic { num: 1, exp: e }
    }

    pub fn numerator(self) -> i128 {
        self.num
    }

    pub fn exponent(self) -> u32 {
        self.exp
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 {
            self.exp = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
        self
    }

    fn aligned(a: Dyadic, b: Dyadic) -> (i128, i128, u32) {
        let e = a.exp.max(b.exp);
        (a.num << (e - a.exp), b.num << (e - b.exp), e)
    }

    /// Multiply by `2^k` (`k` may be negative).
    pub fn scale_pow2(self, k: i32) -> Self {
        if k >= 0 {
            let k = k as u32;
            if k <= self.exp {
                Dyadic::new(self.num, self.exp - k)
            } else {
                Dyadic::new(self.num << (k - self.exp), 0)
            }
        } else {
            Dyadic::new(self.num, self.exp + k.unsigned_abs())
        }
    }

    pub fn mul_int(self, k: i128) -> Self {
        Dyadic::new(self.num * k, self.exp)
    }

    pub fn floor(self) -> i128 {
        self.num >> self.exp
    }

    pub fn is_integer(self) -> bool {
        self.exp == 0
    }

    pub fn abs(self) -> Self {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn to_f64(self) -> f64 {
        // Exact while |num| < 2^53; otherwise correctly rounded up to one ulp.
        self.num as f64 * (-(self.exp as f64)).exp2()
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = Dyadic::aligned(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = Dyadic::aligned(self, rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(self.num * rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::aligned(*self, *other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n as i128)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1i128 << self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = String;

    /// Accepts `n`, `n/2^e` written as `n/<power of two>`, or a finite
    /// decimal such as `0.375` whose value is dyadic.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let d: i128 = d.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            if d <= 0 || d.count_ones() != 1 {
                return Err(format!("{s}: denominator must be a power of two"));
            }
            return Ok(Dyadic::new(n, d.trailing_zeros()));
        }
        if let Ok(n) = s.parse::<i128>() {
            return Ok(Dyadic::from_int(n));
        }
        let x: f64 = s.parse().map_err(|e| format!("{s}: {e}"))?;
        if !x.is_finite() {
            return Err(format!("{s}: not finite"));
        }
        // Every finite double is dyadic; reject values that needed rounding.
        let (mant, exp) = frexp_exact(x);
        let d = if exp >= 0 {
            Dyadic::from_int(mant << exp)
        } else {
            Dyadic::new(mant, exp.unsigned_abs())
        };
        if d.to_f64() != x {
            return Err(format!("{s}: out of range"));
        }
        Ok(d)
    }
}

/// Split a finite double into `mant * 2^exp` with an integer mantissa.
fn frexp_exact(x: f64) -> (i128, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if raw_exp == 0 {
        (frac as i128, -1074)
    } else {
        ((frac | (1u64 << 52)) as i128, raw_exp - 1075)
    };
    (sign * mant, exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_is_exact() {
        assert_eq!(d("1/4") + d("1/4"), d("1/2"));
        assert_eq!(d("3/8") - d("1/2"), d("-1/8"));
        assert_eq!(d("3/8") * d("-2"), d("-3/4"));
        assert_eq!(d("0.375"), d("3/8"));
        assert_eq!(d("5").scale_pow2(-3), d("5/8"));
        assert_eq!(d("5/8").scale_pow2(4), d("10"));
    }

    #[test]
    fn floor_rounds_down() {
        assert_eq!(d("-1/8").floor(), -1);
        assert_eq!(d("7/8").floor(), 0);
        assert_eq!(d("-2").floor(), -2);
        assert_eq!(d("9/4").floor(), 2);
    }

    #[test]
    fn ordering_and_display() {
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!(d("-1/2") < d("1/4"));
        assert_eq!(d("6/8").to_string(), "3/4");
        assert_eq!(Dyadic::pow2_neg(3).to_f64(), 0.125);
    }
}
