//! Exact single-excitation dynamics of the V-type three-level system.
//!
//! With the bath in its vacuum the state stays in
//! `c₀|0⟩ + c₁(t)|1⟩ + c₂(t)|2⟩ + Σ_k c_k(t)|0, 1_k⟩`. Eliminating the bath
//! amplitudes leaves the Volterra system (interaction picture)
//!
//! ```text
//! ċ₁ = -(f₁ * c₁)(t) - e^{i(ω₁-ω₂)t} (f₂ * c₂)(t)
//! ċ₂ = -(f₂ * c₂)(t) - e^{i(ω₂-ω₁)t} (f₁ * c₁)(t)
//! ```
//!
//! with `(f * c)(t) = ∫_0^t f(t - s) c(s) ds` and `f_j` from
//! [`bath::exact_kernel`]. It is integrated by classical RK4 in which every
//! stage evaluates the convolutions over the full stored history.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bath::{self, BathSpec};
use crate::error::{Error, Result};
use crate::lindblad::DensityMatrix3;

/// Transition frequencies of the two excited levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VSystemSpec {
    pub omega1: f64,
    pub omega2: f64,
}

impl VSystemSpec {
    pub fn new(omega1: f64, omega2: f64) -> Self {
        VSystemSpec { omega1, omega2 }
    }

    /// Levels centred on `ω̄` with splitting `δω`.
    pub fn centered(omega_bar: f64, delta: f64) -> Self {
        VSystemSpec { omega1: omega_bar - 0.5 * delta, omega2: omega_bar + 0.5 * delta }
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.omega1 + self.omega2)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("omega1", self.omega1), ("omega2", self.omega2)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::config(name, format!("must be positive and finite, got {w}")));
            }
        }
        Ok(())
    }
}

/// Amplitudes `(c₀, c₁, c₂)` of the system in the single-excitation sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeState {
    pub c0: C64,
    pub c1: C64,
    pub c2: C64,
}

impl AmplitudeState {
    pub fn new(c0: C64, c1: C64, c2: C64) -> Self {
        AmplitudeState { c0, c1, c2 }
    }

    /// The basis state `|j⟩`.
    pub fn basis(j: usize) -> Self {
        let mut c = [C64::new(0.0, 0.0); 3];
        c[j] = C64::new(1.0, 0.0);
        AmplitudeState { c0: c[0], c1: c[1], c2: c[2] }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr() + self.c2.norm_sqr()
    }
}

/// Frame of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Interaction,
    Schroedinger,
}

/// Quadrature rule for the memory integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvolutionScheme {
    /// Left Riemann sums, first order.
    Riemann,
    /// Trapezoid rule, second order.
    #[default]
    Trapezoid,
}

impl std::str::FromStr for ConvolutionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "riemann" => Ok(ConvolutionScheme::Riemann),
            "trapezoid" => Ok(ConvolutionScheme::Trapezoid),
            other => Err(Error::config("scheme", format!("expected riemann or trapezoid, got {other:?}"))),
        }
    }
}

/// Density matrices on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix3>,
    pub picture: Picture,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<DensityMatrix3>, picture: Picture) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::GridMismatch(format!("{} times for {} states", times.len(), states.len())));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::GridMismatch("times must increase strictly".into()));
        }
        Ok(Trajectory { times, states, picture })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest value of `ρ_{jj}` along the trajectory.
    pub fn max_population(&self, j: usize) -> f64 {
        self.states.iter().map(|r| r.populations()[j]).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `ρ₀₀ = 1 - |c₁|² - |c₂|²`, `ρ_{0j} = c₀ c_j*`, `ρ_{jk} = c_j c_k*`.
pub fn amplitudes_to_density(c: &AmplitudeState) -> DensityMatrix3 {
    let amp = [c.c0, c.c1, c.c2];
    let mut rho = DensityMatrix3::pure(amp);
    rho.0[(0, 0)] = C64::new(1.0 - c.c1.norm_sqr() - c.c2.norm_sqr(), 0.0);
    rho
}

/// Integration settings for [`solve_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactOptions {
    pub t_max: f64,
    pub h: f64,
    pub scheme: ConvolutionScheme,
    /// Keep every `subsample`-th step.
    pub subsample: usize,
}

impl ExactOptions {
    pub fn new(t_max: f64, h: f64) -> Self {
        ExactOptions { t_max, h, scheme: ConvolutionScheme::Trapezoid, subsample: 100 }
    }

    pub fn with_scheme(mut self, scheme: ConvolutionScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_subsample(mut self, subsample: usize) -> Self {
        self.subsample = subsample;
        self
    }

    /// Number of RK4 steps.
    pub fn steps(&self) -> usize {
        (self.t_max / self.h).round() as usize
    }

    /// Times at which [`solve_amplitudes`] records a state.
    pub fn sample_times(&self) -> Vec<f64> {
        let stride = self.subsample.max(1);
        (0..=self.steps() / stride).map(|k| (k * stride) as f64 * self.h).collect()
    }
}

/// Largest admissible step, `0.1/max(ω₁, ω₂, ω_c)`.
pub fn step_limit(sys: &VSystemSpec, bath: &BathSpec) -> f64 {
    0.1 / sys.omega1.max(sys.omega2).max(bath.omega_c)
}

/// Sampled amplitudes of an exact run.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeHistory {
    pub times: Vec<f64>,
    pub amplitudes: Vec<AmplitudeState>,
}

impl AmplitudeHistory {
    pub fn to_trajectory(&self) -> Result<Trajectory> {
        let states = self.amplitudes.iter().map(amplitudes_to_density).collect();
        Trajectory::new(self.times.clone(), states, Picture::Interaction)
    }
}

/// Integrate the amplitude equations and keep every `subsample`-th step.
pub fn solve_amplitudes(
    sys: &VSystemSpec,
    bath: &BathSpec,
    psi0: &AmplitudeState,
    opts: &ExactOptions,
) -> Result<AmplitudeHistory> {
    sys.validate()?;
    bath.validate()?;
    let h = opts.h;
    let limit = step_limit(sys, bath);
    if !(h > 0.0) || h > limit * (1.0 + 1e-12) {
        return Err(Error::StepSize { step: h, limit });
    }
    if !(opts.t_max >= h) {
        return Err(Error::config("t_max", format!("must be at least one step ({h}), got {}", opts.t_max)));
    }
    if opts.subsample == 0 {
        return Err(Error::config("subsample", "must be at least 1"));
    }
    if psi0.norm_sqr() > 1.0 + 1e-9 {
        return Err(Error::NonUnitary { norm: psi0.norm_sqr(), time: 0.0 });
    }
    let n_steps = opts.steps();
    let trapezoid = opts.scheme == ConvolutionScheme::Trapezoid;
    let (w1, w2) = (sys.omega1, sys.omega2);

    // Kernel tables at integer offsets m·h and half-integer offsets (m + ½)h.
    let len = n_steps + BLOCK + 2;
    let table = |w: f64, shift: f64| Series::from_fn(len, |m| bath::exact_kernel(bath, w, (m as f64 + shift) * h));
    let (fi1, fi2) = (table(w1, 0.0), table(w2, 0.0));
    let (fh1, fh2) = (table(w1, 0.5), table(w2, 0.5));

    let mut c1 = Series::with_capacity(n_steps + 1);
    let mut c2 = Series::with_capacity(n_steps + 1);
    c1.push(psi0.c1);
    c2.push(psi0.c2);
    let first_weight = if trapezoid { 0.5 } else { 1.0 };
    let weight = |k: usize| if k == 0 { first_weight } else { 1.0 };
    let zero = C64::new(0.0, 0.0);
    // Stage-4 history sums of the previous step, equal to the stage-1 history here.
    let (mut prev1, mut prev2) = (zero, zero);

    let mut times = vec![0.0];
    let mut amplitudes = vec![*psi0];
    let mut old = BlockSums::new();

    for n in 0..n_steps {
        let offset = n % BLOCK;
        if offset == 0 {
            old.fill(n, n_steps, &[&fi1, &fi2, &fh1, &fh2], &c1, &c2, &weight);
        }
        let (cn1, cn2) = (c1.get(n), c2.get(n));
        // Σ_k w_k f((n + 1 - k)h) c_k over k ≤ n and Σ_k w_k f((n - k + ½)h) c_k over k < n.
        let mut e1 = old.get(0, offset);
        let mut e2 = old.get(1, offset);
        let mut m1 = old.get(2, offset);
        let mut m2 = old.get(3, offset);
        for k in (n - offset)..=n {
            let w = weight(k);
            let (a, b) = (c1.get(k) * w, c2.get(k) * w);
            e1 += fi1.get(n + 1 - k) * a;
            e2 += fi2.get(n + 1 - k) * b;
            if k < n {
                m1 += fh1.get(n - k) * a;
                m2 += fh2.get(n - k) * b;
            }
        }

        let rhs = |t: f64, s1: C64, s2: C64| {
            let ph = C64::from_polar(1.0, (w1 - w2) * t);
            (-s1 - ph * s2, -s2 - ph.conj() * s1)
        };
        let t_n = n as f64 * h;
        let (f01, f02) = (fi1.get(0), fi2.get(0));
        let (fh01, fh02) = (fh1.get(0), fh2.get(0));

        let (s1, s2) = if !trapezoid {
            (prev1 * h, prev2 * h)
        } else if n == 0 {
            (zero, zero)
        } else {
            (prev1 * h + 0.5 * h * f01 * cn1, prev2 * h + 0.5 * h * f02 * cn2)
        };
        let k1 = rhs(t_n, s1, s2);

        let mid = |a: C64, b: C64| {
            let (s1, s2) = if trapezoid {
                let (h1, h2) =
                    if n == 0 { (zero, zero) } else { (h * (m1 + 0.5 * fh01 * cn1), h * (m2 + 0.5 * fh02 * cn2)) };
                (h1 + 0.25 * h * (fh01 * cn1 + f01 * a), h2 + 0.25 * h * (fh02 * cn2 + f02 * b))
            } else {
                (h * m1 + 0.5 * h * fh01 * cn1, h * m2 + 0.5 * h * fh02 * cn2)
            };
            rhs(t_n + 0.5 * h, s1, s2)
        };
        let k2 = mid(cn1 + 0.5 * h * k1.0, cn2 + 0.5 * h * k1.1);
        let k3 = mid(cn1 + 0.5 * h * k2.0, cn2 + 0.5 * h * k2.1);

        let (a, b) = (cn1 + h * k3.0, cn2 + h * k3.1);
        let (s1, s2) = if trapezoid { (h * (e1 + 0.5 * f01 * a), h * (e2 + 0.5 * f02 * b)) } else { (h * e1, h * e2) };
        let k4 = rhs(t_n + h, s1, s2);

        let next1 = cn1 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        let next2 = cn2 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        let norm = psi0.c0.norm_sqr() + next1.norm_sqr() + next2.norm_sqr();
        if !norm.is_finite() || norm > 1.0 + 1e-9 {
            return Err(Error::NonUnitary { norm, time: t_n + h });
        }
        c1.push(next1);
        c2.push(next2);
        prev1 = e1;
        prev2 = e2;
        if (n + 1) % opts.subsample == 0 {
            times.push((n + 1) as f64 * h);
            amplitudes.push(AmplitudeState::new(psi0.c0, next1, next2));
        }
    }
    Ok(AmplitudeHistory { times, amplitudes })
}

/// Steps per block of precomputed history sums.
const BLOCK: usize = 256;

/// Complex sequence stored as separate real and imaginary parts.
struct Series {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Series {
    fn with_capacity(n: usize) -> Self {
        Series { re: Vec::with_capacity(n), im: Vec::with_capacity(n) }
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> C64) -> Self {
        let mut s = Series::with_capacity(n);
        for m in 0..n {
            s.push(f(m));
        }
        s
    }

    fn push(&mut self, v: C64) {
        self.re.push(v.re);
        self.im.push(v.im);
    }

    fn get(&self, i: usize) -> C64 {
        C64::new(self.re[i], self.im[i])
    }
}

/// Contributions of the history `k < n₀` to the four convolution sums of the
/// steps `n₀ ≤ n < n₀ + BLOCK`, accumulated as Toeplitz block products.
struct BlockSums {
    re: [[f64; BLOCK]; 4],
    im: [[f64; BLOCK]; 4],
}

impl BlockSums {
    fn new() -> Self {
        BlockSums { re: [[0.0; BLOCK]; 4], im: [[0.0; BLOCK]; 4] }
    }

    fn get(&self, which: usize, offset: usize) -> C64 {
        C64::new(self.re[which][offset], self.im[which][offset])
    }

    /// Kernels are ordered (integer ω₁, integer ω₂, half ω₁, half ω₂); the
    /// integer sums use offset `n + 1 - k`, the half-step sums `n - k`.
    fn fill(
        &mut self,
        n0: usize,
        n_steps: usize,
        kernels: &[&Series; 4],
        c1: &Series,
        c2: &Series,
        weight: &dyn Fn(usize) -> f64,
    ) {
        for which in 0..4 {
            self.re[which].fill(0.0);
            self.im[which].fill(0.0);
        }
        let width = BLOCK.min(n_steps - n0);
        for k in 0..n0 {
            let w = weight(k);
            for which in 0..4 {
                let c = if which % 2 == 0 { c1 } else { c2 };
                let (cr, ci) = (c.re[k] * w, c.im[k] * w);
                let start = if which < 2 { n0 + 1 - k } else { n0 - k };
                let kr = &kernels[which].re[start..start + width];
                let ki = &kernels[which].im[start..start + width];
                let ar = &mut self.re[which][..width];
                let ai = &mut self.im[which][..width];
                for (((ar, ai), &fr), &fi) in ar.iter_mut().zip(ai.iter_mut()).zip(kr).zip(ki) {
                    *ar += fr * cr - fi * ci;
                    *ai += fr * ci + fi * cr;
                }
            }
        }
    }
}

/// Exact interaction-picture trajectory from the initial amplitudes `psi0`.
pub fn solve_exact(
    sys: &VSystemSpec,
    bath: &BathSpec,
    psi0: &AmplitudeState,
    opts: &ExactOptions,
) -> Result<Trajectory> {
    solve_amplitudes(sys, bath, psi0, opts)?.to_trajectory()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn density_from_amplitudes() {
        let g = amplitudes_to_density(&AmplitudeState::basis(0));
        assert_eq!(g, DensityMatrix3::basis(0));
        let e = amplitudes_to_density(&AmplitudeState::basis(1));
        assert_eq!(e, DensityMatrix3::basis(1));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = amplitudes_to_density(&AmplitudeState::new(c(0.0, 0.0), c(s, 0.0), c(s, 0.0)));
        assert!(plus.get(0, 0).norm() < 1e-15);
        for j in 1..3 {
            for k in 1..3 {
                assert!((plus.get(j, k) - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
        assert!((plus.eigenvalues()[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decoupled_amplitudes_are_frozen() {
        let sys = VSystemSpec::new(0.095, 0.105);
        let bath = BathSpec::new(1.0, 0.0);
        let psi = AmplitudeState::new(c(0.6, 0.0), c(0.0, 0.64), c(0.48, 0.0));
        let run = solve_amplitudes(&sys, &bath, &psi, &ExactOptions::new(50.0, 0.1).with_subsample(10)).unwrap();
        assert!(run.amplitudes.iter().all(|a| *a == psi));
        assert_eq!(run.times.len(), 51);
    }

    #[test]
    fn step_limit_is_enforced() {
        let sys = VSystemSpec::new(0.095, 0.105);
        let bath = BathSpec::new(1.0, 0.001);
        let r = solve_exact(&sys, &bath, &AmplitudeState::basis(1), &ExactOptions::new(10.0, 0.2));
        assert!(matches!(r, Err(Error::StepSize { .. })));
        let fast = VSystemSpec::new(2.0, 2.1);
        let r = solve_exact(&fast, &bath, &AmplitudeState::basis(1), &ExactOptions::new(10.0, 0.1));
        assert!(matches!(r, Err(Error::StepSize { .. })));
        let over = AmplitudeState::new(c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0));
        let r = solve_exact(&sys, &bath, &over, &ExactOptions::new(10.0, 0.1));
        assert!(matches!(r, Err(Error::NonUnitary { .. })));
    }

    #[test]
    fn trajectory_is_physical_and_ground_amplitude_is_constant() {
        let sys = VSystemSpec::new(0.095, 0.105);
        let bath = BathSpec::new(1.0, 0.003);
        let psi = AmplitudeState::new(c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0));
        let run = solve_amplitudes(&sys, &bath, &psi, &ExactOptions::new(500.0, 0.1).with_subsample(20)).unwrap();
        for a in &run.amplitudes {
            assert!((a.c0.norm() - 0.6).abs() < 1e-10);
            assert!(a.norm_sqr() <= 1.0 + 1e-9);
        }
        let traj = run.to_trajectory().unwrap();
        for rho in &traj.states {
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-9);
            assert!(rho.min_eigenvalue() >= -1e-8);
        }
    }

    #[test]
    fn weak_coupling_follows_golden_rule() {
        let sys = VSystemSpec::new(0.095, 0.105);
        let bath = BathSpec::new(1.0, 1e-4);
        let rate = bath::gamma_rwa(&bath, sys.omega1);
        let t_end = 0.25 / rate;
        let run =
            solve_exact(&sys, &bath, &AmplitudeState::basis(1), &ExactOptions::new(t_end, 0.1).with_subsample(50))
                .unwrap();
        for (t, rho) in run.times.iter().zip(&run.states) {
            let want = (-rate * t).exp();
            assert!((rho.populations()[1] - want).abs() < 0.05 * want, "t = {t}");
        }
    }

    #[test]
    fn schemes_converge_with_expected_order() {
        let sys = VSystemSpec::new(0.095, 0.105);
        let bath = BathSpec::new(1.0, 0.01);
        let end = |h: f64, scheme| {
            let opts = ExactOptions::new(100.0, h).with_scheme(scheme);
            let run =
                solve_amplitudes(&sys, &bath, &AmplitudeState::basis(1), &opts.with_subsample(opts.steps())).unwrap();
            *run.amplitudes.last().unwrap()
        };
        for (scheme, min_order) in [(ConvolutionScheme::Trapezoid, 1.8), (ConvolutionScheme::Riemann, 0.9)] {
            let a = end(0.1, scheme);
            let b = end(0.05, scheme);
            let d = end(0.025, scheme);
            let e1 = (a.c1 - b.c1).norm() + (a.c2 - b.c2).norm();
            let e2 = (b.c1 - d.c1).norm() + (b.c2 - d.c2).norm();
            let order = (e1 / e2).log2();
            assert!(order >= min_order, "{scheme:?}: observed order {order}");
        }
    }

    #[test]
    fn scheme_parses() {
        assert_eq!("Riemann".parse::<ConvolutionScheme>().unwrap(), ConvolutionScheme::Riemann);
        assert!(matches!("simpson".parse::<ConvolutionScheme>(), Err(Error::Config { .. })));
        assert_eq!(serde_json::to_string(&ConvolutionScheme::Trapezoid).unwrap(), "\"trapezoid\"");
    }
}
