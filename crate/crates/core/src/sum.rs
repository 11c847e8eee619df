//! Correctly rounded floating point summation.
//!
//! Several identities in this crate compare two sums of the same terms
//! accumulated in a different order. Summing with [`fsum`] makes the result
//! independent of the order, so those comparisons hold bit for bit.

/// Shewchuk's exact partials summation, rounded once at the end.
///
/// Non-finite inputs fall back to the naive sum.
pub fn fsum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    let mut naive = 0.0;
    for mut x in terms {
        naive += x;
        let mut i = 0;
        for k in 0..partials.len() {
            let mut y = partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    if !naive.is_finite() {
        return naive;
    }

    // Round the partials (ordered by increasing magnitude) to nearest.
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        n -= 1;
        let x = hi;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancels_exactly() {
        assert_eq!(fsum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(fsum([0.1; 10]), 1.0);
        assert_eq!(fsum(std::iter::empty()), 0.0);
    }

    #[test]
    fn order_independent() {
        let xs: Vec<f64> = (1..200).map(|i| 1.0 / (i as f64).powf(1.3)).collect();
        let mut ys = xs.clone();
        ys.reverse();
        assert_eq!(fsum(xs.iter().copied()).to_bits(), fsum(ys).to_bits());
    }
}
