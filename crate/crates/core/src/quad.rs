//! Adaptive and fixed-rule quadrature for complex-valued integrands.
//!
//! The adaptive driver is a globally adaptive Gauss–Kronrod (7, 15) scheme:
//! the interval with the largest error estimate is bisected until the summed
//! estimate meets the tolerance. The composite Gauss–Legendre rule is an
//! independent node family used to cross-check adaptive results.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for the adaptive driver: stop once the error estimate is
/// below `max(abs, rel·|I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_intervals: 200_000 }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-13, 1e-11)
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        k += pair * w;
        if j % 2 == 1 {
            g += pair * WG[j / 2];
        }
    }
    Segment { a, b, value: k * half, error: ((k - g) * half).norm() }
}

/// Integrate `f` over the union of the intervals delimited by `breaks`
/// (ascending). Interior break points are never evaluated, so integrable
/// endpoint singularities and removable kinks belong there.
pub fn integrate<F: FnMut(f64) -> C64>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<C64> {
    if breaks.len() < 2 {
        return Err(Error::domain("quadrature needs at least two break points"));
    }
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if !(w[0].is_finite() && w[1].is_finite()) || w[1] < w[0] {
            return Err(Error::domain(format!("invalid quadrature interval [{}, {}]", w[0], w[1])));
        }
        if w[1] > w[0] {
            heap.push(kronrod(&mut f, w[0], w[1]));
        }
    }
    let mut count = heap.len();
    let mut total: C64 = heap.iter().map(|s| s.value).sum();
    let mut error: f64 = heap.iter().map(|s| s.error).sum();
    loop {
        if !(total.re.is_finite() && total.im.is_finite()) {
            return Err(Error::Numerical("non-finite integrand value".into()));
        }
        if error <= tol.abs.max(tol.rel * total.norm()) {
            // Running sums drift; confirm with a fresh summation.
            total = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
            if error <= tol.abs.max(tol.rel * total.norm()) {
                return Ok(total);
            }
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => return Ok(total),
        };
        let mid = 0.5 * (worst.a + worst.b);
        if count >= tol.max_intervals || mid <= worst.a || mid >= worst.b {
            return Err(Error::Convergence(format!(
                "estimated error {error:e} above tolerance after {count} intervals"
            )));
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        count += 1;
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<f64> {
    integrate(|x| C64::new(f(x), 0.0), breaks, tol).map(|v| v.re)
}

/// Cauchy principal value of `∫_a^b f(x)/(x - c) dx` for `a < c < b`,
/// by subtracting the pole: `∫ (f(x) - f(c))/(x - c) dx + f(c) ln((b - c)/(c - a))`.
/// `breaks` are extra points inside `(a, b)`; `c` is added automatically.
pub fn principal_value<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    c: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<C64> {
    if !(a < c && c < b) {
        return Err(Error::domain(format!("pole {c} is not inside ({a}, {b})")));
    }
    let fc = f(c);
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b && x != c).collect();
    pts.extend([a, b, c]);
    pts.sort_by(f64::total_cmp);
    let smooth = integrate(|x| (f(x) - fc) / (x - c), &pts, tol)?;
    Ok(smooth + fc * ((b - c) / (c - a)).ln())
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule: `panels` equal panels inside each interval
/// of `breaks`, `order` nodes per panel. Non-adaptive.
pub fn gauss_legendre_composite<F: FnMut(f64) -> C64>(mut f: F, breaks: &[f64], panels: usize, order: usize) -> C64 {
    let (x, w) = gauss_legendre(order);
    let mut sum = C64::new(0.0, 0.0);
    for seg in breaks.windows(2) {
        let width = (seg[1] - seg[0]) / panels as f64;
        for p in 0..panels {
            let lo = seg[0] + p as f64 * width;
            let center = lo + 0.5 * width;
            let mut panel = C64::new(0.0, 0.0);
            for (xi, wi) in x.iter().zip(&w) {
                panel += f(center + 0.5 * width * xi) * *wi;
            }
            sum += panel * (0.5 * width);
        }
    }
    sum
}

/// Break points at `a, a + step, …` up to `b`, for oscillatory integrands.
pub fn uniform_breaks(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = (((b - a) / step).ceil() as usize).max(1);
    let mut pts: Vec<f64> = (0..n).map(|k| a + k as f64 * (b - a) / n as f64).collect();
    pts.push(b);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate_real(|x| x.powi(5) - 3.0 * x * x, &[0.0, 2.0], Tolerance::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let v = integrate_real(|x| 1.0 / x.sqrt(), &[0.0, 1.0], Tolerance::new(1e-10, 1e-10)).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        let t = 40.0;
        let v =
            integrate(|x| C64::new(0.0, t * x).exp(), &uniform_breaks(0.0, 1.0, 0.1), Tolerance::default()).unwrap();
        let want = (C64::new(0.0, t).exp() - 1.0) / C64::new(0.0, t);
        assert!((v - want).norm() < 1e-12);
    }

    #[test]
    fn principal_value_of_reciprocal() {
        // PV ∫_0^3 dx/(x - 1) = ln 2.
        let v = principal_value(|_| C64::new(1.0, 0.0), 0.0, 3.0, 1.0, &[], Tolerance::default()).unwrap();
        assert!((v.re - 2f64.ln()).abs() < 1e-13);
        // x²/(x - 1) = x + 1 + 1/(x - 1); the pole term vanishes on [0, 2].
        let v = principal_value(|x| C64::new(x * x, 0.0), 0.0, 2.0, 1.0, &[], Tolerance::default()).unwrap();
        assert!((v.re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 31] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
        // Exact for degree 2n - 1.
        let v = gauss_legendre_composite(|x| C64::new(x.powi(9), 0.0), &[0.0, 1.0], 1, 5);
        assert!((v.re - 0.1).abs() < 1e-15);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tol = Tolerance { abs: 0.0, rel: 0.0, max_intervals: 10 };
        let r = integrate_real(|x| (1.0 / x).sin(), &[1e-3, 1.0], tol);
        assert!(matches!(r, Err(Error::Convergence(_))));
    }
}
