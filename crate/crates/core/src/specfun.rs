//! Exponential integral Ei(z) for complex arguments.
//!
//! Ei is taken on its principal branch with the cut along the negative real
//! axis. On the cut itself the value returned is the limit from above, so
//! `Ei(-x) = -E1(x) + iπ` for `x > 0`; the real part is the principal value.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Beyond this real part `Ei` no longer fits in a double.
pub const OVERFLOW_RE: f64 = 700.0;

const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 40.0;
// The power series loses roughly exp(|z| - Re z) to cancellation.
const SERIES_CANCELLATION: f64 = 4.0;
const MAX_TERMS: usize = 20_000;

/// Exponential integral `Ei(z) = -∫_{-z}^∞ e^{-ζ}/ζ dζ` (principal value).
pub fn expint_ei(z: C64) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!("Ei: non-finite argument {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::domain("Ei: logarithmic singularity at z = 0"));
    }
    if z.re > OVERFLOW_RE {
        return Err(Error::Overflow(format!("Ei({z}) exceeds double range")));
    }
    // -0.0 imaginary parts would select the lower side of the cut.
    let z = if z.im == 0.0 { C64::new(z.re, 0.0) } else { z };
    let r = z.norm();

    let value = if r <= SERIES_RADIUS || (r < ASYMPTOTIC_RADIUS && r - z.re < SERIES_CANCELLATION) {
        series(z)
    } else if r >= ASYMPTOTIC_RADIUS {
        asymptotic(z)
    } else {
        -e1_continued_fraction(-z)? + branch_offset(z)
    };

    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Overflow(format!("Ei({z}) is not representable")));
    }
    Ok(value)
}

/// `Ei(z) + E1(-z)`: +iπ above the real axis (and on the negative cut), -iπ below.
fn branch_offset(z: C64) -> C64 {
    if z.im < 0.0 {
        C64::new(0.0, -PI)
    } else if z.im > 0.0 || z.re < 0.0 {
        C64::new(0.0, PI)
    } else {
        C64::new(0.0, 0.0)
    }
}

fn series(z: C64) -> C64 {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= z / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    C64::new(EULER_GAMMA, 0.0) + z.ln() + sum
}

fn asymptotic(z: C64) -> C64 {
    // e^z/z · Σ k!/z^k, truncated at the smallest term.
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..MAX_TERMS {
        term *= k as f64 / z;
        let size = term.norm();
        if size >= last {
            break;
        }
        sum += term;
        last = size;
        if size < 1e-17 * sum.norm() {
            break;
        }
    }
    let head = z.exp() / z;
    let offset = if z.re > 0.0 && z.im == 0.0 { C64::new(0.0, 0.0) } else { branch_offset(z) };
    head * sum + offset
}

/// E1(w) by the modified Lentz evaluation of its continued fraction.
/// Valid off the negative real axis.
fn e1_continued_fraction(w: C64) -> Result<C64> {
    let tiny = 1e-300;
    let mut b = w + 1.0;
    let mut c = C64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = (d * an + b).inv();
        c = b + c.inv() * an;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Ok(h * (-w).exp());
        }
    }
    Err(Error::Convergence(format!("E1 continued fraction did not converge at {w}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn real_positive_argument() {
        let v = expint_ei(C64::new(1.0, 0.0)).unwrap();
        assert!((v.re - 1.895_117_816_355_936_8).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn negative_axis_takes_upper_limit() {
        let v = expint_ei(C64::new(-1.0, 0.0)).unwrap();
        assert!((v.re + 0.219_383_934_395_520_28).abs() < 1e-15);
        assert!((v.im - PI).abs() < 1e-15);
        let below = expint_ei(C64::new(-1.0, -0.0)).unwrap();
        assert_eq!(below, v);
    }

    #[test]
    fn zero_is_a_domain_error() {
        assert!(matches!(expint_ei(C64::new(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn overflow_past_700() {
        assert!(matches!(expint_ei(C64::new(710.0, 0.0)), Err(Error::Overflow(_))));
        assert!(expint_ei(C64::new(699.0, 3.0)).is_ok());
    }

    #[test]
    fn large_real_argument_follows_leading_asymptotic() {
        let v = expint_ei(C64::new(50.0, 0.0)).unwrap();
        let lead = 50f64.exp() / 50.0;
        let ratio = v.re / lead;
        assert!((ratio - 1.0).abs() < 0.03, "ratio {ratio}");
    }

    #[test]
    fn matches_reference_values() {
        // 30-digit reference values (mpmath).
        let cases = [
            ((0.1, 6.37), C64::new(-0.007_292_768_139_913_623_1, 2.973_106_458_789_058_8)),
            ((0.1, -6.37), C64::new(-0.007_292_768_139_913_623_1, -2.973_106_458_789_058_8)),
            ((5.0, 5.0), C64::new(-13.470_936_071_475_246, -15.322_492_395_731_231)),
            ((-3.0, 0.5), C64::new(-0.010_404_084_133_521_738, 3.133_927_393_751_679_2)),
            ((0.4, 400.0), C64::new(-0.003_170_590_753_019_115_6, 3.143_556_522_202_700_2)),
        ];
        for ((re, im), want) in cases {
            let got = expint_ei(C64::new(re, im)).unwrap();
            assert!(rel(got, want) < 1e-12, "Ei({re}+{im}i) = {got}, want {want}");
        }
    }
}
