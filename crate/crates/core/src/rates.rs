//! Coarse-grained rate and Lamb-shift tensors for the zero-temperature Ohmic
//! bath.
//!
//! All functions here return bare bath integrals (no coupling prefactor);
//! [`rate_tensor`] applies `g/Δt`. With `x = ω/ω_c` the building blocks are
//!
//! ```text
//! I₁(ω)    = P∫ J(ν)/(ω - ν) dν        = -η ω_c + η ω e^{-x} Ei(x)
//! I₂(ω, t) = P∫ J(ν) e^{iνt}/(ω - ν) dν = -η ω_c/(1 - iω_c t) + η ω e^{-ω(1/ω_c - it)} Ei(ω(1/ω_c - it))
//! ```

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bath::{spectral_density, BathSpec};
use crate::error::{Error, Result};
use crate::exact3::VSystemSpec;
use crate::specfun::expint_ei;

/// Relative frequency separation below which the off-diagonal closed forms
/// are replaced by their expansion about the diagonal.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

fn require_positive(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("frequency must be positive, got {omega}")))
    }
}

fn is_degenerate(omega: f64, omega_p: f64) -> bool {
    (omega - omega_p).abs() <= DEGENERACY_THRESHOLD * omega.abs().max(omega_p.abs())
}

/// Principal-value Hilbert transform `I₁(ω)`.
pub fn i1(spec: &BathSpec, omega: f64) -> Result<f64> {
    require_positive(omega)?;
    let x = omega / spec.omega_c;
    Ok(-spec.eta * spec.omega_c + spectral_density(spec, omega) * expint_ei(C64::new(x, 0.0))?.re)
}

/// `I₂(ω, t)`; reduces to `I₁(ω)` at `t = 0`.
pub fn i2(spec: &BathSpec, omega: f64, t: f64) -> Result<C64> {
    require_positive(omega)?;
    let arg = omega * C64::new(1.0 / spec.omega_c, -t);
    let head = -spec.eta * spec.omega_c / C64::new(1.0, -spec.omega_c * t);
    Ok(head + spec.eta * omega * (-arg).exp() * expint_ei(arg)?)
}

/// Off-diagonal `b_{ωω'}(t) = ∫_0^t ds ∫_0^t ds' e^{i(ω's - ωs')} 𝓑(s - s')`.
pub fn b_offdiag(spec: &BathSpec, omega: f64, omega_p: f64, t: f64) -> Result<C64> {
    require_positive(omega)?;
    require_positive(omega_p)?;
    if is_degenerate(omega, omega_p) {
        return Err(Error::DegenerateFrequencies { omega, omega_p });
    }
    let (a1, b1) = (i1(spec, omega)?, i1(spec, omega_p)?);
    let (a2, b2) = (i2(spec, omega, t)?, i2(spec, omega_p, t)?);
    let num = (1.0 + cis((omega_p - omega) * t)) * (a1 - b1)
        + cis(omega_p * t) * (b2.conj() - a2.conj())
        + cis(-omega * t) * (b2 - a2);
    Ok(num / (omega_p - omega))
}

/// Diagonal `b_{ωω}(t) = 2∫_{-ω}^∞ dν J(ν + ω)(1 - cos νt)/ν²`.
pub fn b_diag(spec: &BathSpec, omega: f64, t: f64) -> Result<f64> {
    require_positive(omega)?;
    let x = omega / spec.omega_c;
    let wt = omega * t;
    let up = expint_ei(C64::new(x, wt))?;
    let down = expint_ei(C64::new(x, -wt))?;
    let real = expint_ei(C64::new(x, 0.0))?;
    let bracket = C64::new(1.0 - x, -wt) * up + C64::new(1.0 - x, wt) * down + 2.0 * (x - 1.0) * real;
    Ok(spec.eta * (-x).exp() * bracket.re - 2.0 * spec.eta * (1.0 - wt.cos()))
}

/// Off-diagonal Lamb-shift integral
/// `S_{ωω'}(t) = -(i/2)∫_0^t ds ∫_0^s ds' [e^{i(ω's - ωs')} 𝓑(s - s') - e^{-i(ωs - ω's')} 𝓑(s' - s)]`.
pub fn s_offdiag(spec: &BathSpec, omega: f64, omega_p: f64, t: f64) -> Result<C64> {
    require_positive(omega)?;
    require_positive(omega_p)?;
    if is_degenerate(omega, omega_p) {
        return Err(Error::DegenerateFrequencies { omega, omega_p });
    }
    let (a1, b1) = (i1(spec, omega)?, i1(spec, omega_p)?);
    let (a2, b2) = (i2(spec, omega, t)?, i2(spec, omega_p, t)?);
    let num = (1.0 - cis((omega_p - omega) * t)) * (a1 + b1)
        + cis(-omega * t) * (b2 - a2)
        + cis(omega_p * t) * (a2.conj() - b2.conj());
    Ok(C64::new(0.0, -0.5) * num / (omega - omega_p))
}

fn i3(spec: &BathSpec, omega: f64, t: f64) -> Result<f64> {
    let x = omega / spec.omega_c;
    let wt = omega * t;
    let up = expint_ei(C64::new(x, wt))?;
    let down = expint_ei(C64::new(x, -wt))?;
    let diff = C64::new(1.0 - x, -wt) * up - C64::new(1.0 - x, wt) * down;
    // diff/(2i) is real since the two terms are complex conjugates.
    Ok(spec.eta * (-x).exp() * 0.5 * diff.im + spec.eta * wt.sin())
}

/// Diagonal Lamb-shift integral `S_{ωω}(t) = t·I₁(ω) + I₃(ω, t)`.
pub fn s_diag(spec: &BathSpec, omega: f64, t: f64) -> Result<f64> {
    require_positive(omega)?;
    Ok(t * i1(spec, omega)? + i3(spec, omega, t)?)
}

/// `b_{ωω'}(t)` valid for any pair, including coincident frequencies.
/// Near the diagonal `b ≈ e^{iδt/2} b_{ω̄ω̄}(t)` with `δ = ω' - ω`, exact to first order in `δ`.
pub fn b_any(spec: &BathSpec, omega: f64, omega_p: f64, t: f64) -> Result<C64> {
    if omega == omega_p {
        return b_diag(spec, omega, t).map(|v| C64::new(v, 0.0));
    }
    if is_degenerate(omega, omega_p) {
        let mid = 0.5 * (omega + omega_p);
        return Ok(cis(0.5 * (omega_p - omega) * t) * b_diag(spec, mid, t)?);
    }
    b_offdiag(spec, omega, omega_p, t)
}

/// `S_{ωω'}(t)` valid for any pair, with the same near-diagonal expansion as [`b_any`].
pub fn s_any(spec: &BathSpec, omega: f64, omega_p: f64, t: f64) -> Result<C64> {
    if omega == omega_p {
        return s_diag(spec, omega, t).map(|v| C64::new(v, 0.0));
    }
    if is_degenerate(omega, omega_p) {
        let mid = 0.5 * (omega + omega_p);
        return Ok(cis(0.5 * (omega_p - omega) * t) * s_diag(spec, mid, t)?);
    }
    s_offdiag(spec, omega, omega_p, t)
}

/// Dissipator matrix `γ_{jk} = g b_{ω_j ω_k}(Δt)/Δt` and Lamb-shift matrix
/// `S_{jk} = g S_{ω_j ω_k}(Δt)/Δt` of the coarse-grained generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTensor {
    pub gamma: [[C64; 2]; 2],
    pub lamb: [[C64; 2]; 2],
    pub dt: f64,
    pub frequencies: (f64, f64),
}

impl RateTensor {
    /// Smallest eigenvalue of the Hermitian matrix `γ`.
    pub fn gamma_min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.gamma).0
    }

    pub fn gamma_trace(&self) -> f64 {
        self.gamma[0][0].re + self.gamma[1][1].re
    }

    /// Largest deviation from Hermiticity over both matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in [&self.gamma, &self.lamb] {
            for j in 0..2 {
                for k in 0..2 {
                    worst = worst.max((m[j][k] - m[k][j].conj()).norm());
                }
            }
        }
        worst
    }
}

/// Eigenvalues (ascending) of a 2×2 Hermitian matrix.
pub fn hermitian_eigenvalues(m: &[[C64; 2]; 2]) -> (f64, f64) {
    let mean = 0.5 * (m[0][0].re + m[1][1].re);
    let half_gap = 0.5 * (m[0][0].re - m[1][1].re);
    let radius = half_gap.hypot(m[0][1].norm());
    (mean - radius, mean + radius)
}

/// Assemble the coarse-grained tensors for the two transitions of `sys`.
pub fn rate_tensor(spec: &BathSpec, sys: &VSystemSpec, dt: f64) -> Result<RateTensor> {
    spec.validate()?;
    sys.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!("coarse-graining time must be positive, got {dt}")));
    }
    let w = [sys.omega1, sys.omega2];
    let scale = spec.g / dt;
    let zero = C64::new(0.0, 0.0);
    let mut gamma = [[zero; 2]; 2];
    let mut lamb = [[zero; 2]; 2];
    for j in 0..2 {
        gamma[j][j] = C64::new(scale * b_diag(spec, w[j], dt)?, 0.0);
        lamb[j][j] = C64::new(scale * s_diag(spec, w[j], dt)?, 0.0);
    }
    gamma[0][1] = scale * b_any(spec, w[0], w[1], dt)?;
    lamb[0][1] = scale * s_any(spec, w[0], w[1], dt)?;
    gamma[1][0] = gamma[0][1].conj();
    lamb[1][0] = lamb[0][1].conj();
    Ok(RateTensor { gamma, lamb, dt, frequencies: (w[0], w[1]) })
}

/// Rate tensors over a list of coarse-graining times.
pub fn rate_scan(spec: &BathSpec, sys: &VSystemSpec, dts: &[f64]) -> Result<Vec<RateTensor>> {
    dts.iter().map(|&dt| rate_tensor(spec, sys, dt)).collect()
}

/// Quadrature evaluations of the defining integrals, used to validate the
/// closed forms.
pub mod oracle {
    use super::*;
    use crate::bath::corr_zero_t;
    use crate::quad::{integrate, principal_value, uniform_breaks, Tolerance};

    fn tol() -> Tolerance {
        Tolerance::new(1e-14, 1e-11)
    }

    fn cutoff(spec: &BathSpec) -> f64 {
        80.0 * spec.omega_c
    }

    /// `∫_0^L e^{iΔs} ds`, accurate for small `Δ`.
    fn phase_integral(delta: f64, len: f64) -> C64 {
        let half = 0.5 * delta * len;
        let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
        cis(half) * len * sinc
    }

    /// Break points for an integral over `[a, b]` of a kernel peaked at 0
    /// (width `1/ω_c`) times phases up to frequency `max_freq`.
    fn breaks(spec: &BathSpec, a: f64, b: f64, max_freq: f64) -> Vec<f64> {
        let step = (1.0 / max_freq.max(1e-12)).min(50.0 / spec.omega_c).max(2.0 / spec.omega_c);
        let mut pts = uniform_breaks(a, b, step);
        for extra in [0.0, -1.0 / spec.omega_c, 1.0 / spec.omega_c] {
            if extra > a && extra < b {
                pts.push(extra);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `b_{ωω'}(t)` reduced to a single integral over `u = s - s'`.
    pub fn b_quadrature_oracle(spec: &BathSpec, omega: f64, omega_p: f64, t: f64) -> Result<C64> {
        if t == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let delta = omega_p - omega;
        let f = |u: f64| {
            let a = (-u).max(0.0);
            let weight = cis(delta * a) * phase_integral(delta, t - u.abs());
            corr_zero_t(spec, u) * cis(omega_p * u) * weight
        };
        integrate(f, &breaks(spec, -t, t, omega.abs().max(omega_p.abs())), tol())
    }

    /// `b_{ωω'}(t)` as the nested double integral over the square.
    pub fn b_quadrature_oracle_2d(spec: &BathSpec, omega: f64, omega_p: f64, t: f64) -> Result<C64> {
        let inner_tol = Tolerance::new(1e-15, 1e-12);
        let outer = |s: f64| {
            let inner = |sp: f64| cis(omega_p * s - omega * sp) * corr_zero_t(spec, s - sp);
            let mut pts = vec![0.0, s, t];
            pts.dedup();
            integrate(inner, &pts, inner_tol).unwrap_or(C64::new(f64::NAN, f64::NAN))
        };
        integrate(outer, &breaks(spec, 0.0, t, omega.abs().max(omega_p.abs())), tol())
    }

    /// One-sided `𝓑_{ωω'}(t) = ∫_0^t ds ∫_0^s ds' e^{i(ω's - ωs')} 𝓑(s - s')`.
    pub fn one_sided_oracle(spec: &BathSpec, omega: f64, omega_p: f64, t: f64) -> Result<C64> {
        if t == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        // With u = s - s' ≥ 0 the inner s' range is [0, t - u].
        let delta = omega_p - omega;
        let f = |u: f64| corr_zero_t(spec, u) * cis(omega_p * u) * phase_integral(delta, t - u);
        integrate(f, &breaks(spec, 0.0, t, omega.abs().max(omega_p.abs())), tol())
    }

    /// `S_{ωω'}(t)` reduced to a single integral over `u = s - s' ≥ 0`.
    pub fn s_quadrature_oracle(spec: &BathSpec, omega: f64, omega_p: f64, t: f64) -> Result<C64> {
        if t == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let delta = omega_p - omega;
        let f = |u: f64| {
            let kernel = cis(omega_p * u) * corr_zero_t(spec, u) - cis(-omega * u) * corr_zero_t(spec, -u);
            kernel * phase_integral(delta, t - u)
        };
        let v = integrate(f, &breaks(spec, 0.0, t, omega.abs().max(omega_p.abs())), tol())?;
        Ok(C64::new(0.0, -0.5) * v)
    }

    /// `S_{ωω'}(t)` as the nested double integral over the triangle `s' < s`.
    pub fn s_quadrature_oracle_2d(spec: &BathSpec, omega: f64, omega_p: f64, t: f64) -> Result<C64> {
        let inner_tol = Tolerance::new(1e-15, 1e-12);
        let outer = |s: f64| {
            if s == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let inner = |sp: f64| {
                cis(omega_p * s - omega * sp) * corr_zero_t(spec, s - sp)
                    - cis(-(omega * s - omega_p * sp)) * corr_zero_t(spec, sp - s)
            };
            integrate(inner, &[0.0, s], inner_tol).unwrap_or(C64::new(f64::NAN, f64::NAN))
        };
        let v = integrate(outer, &breaks(spec, 0.0, t, omega.abs().max(omega_p.abs())), tol())?;
        Ok(C64::new(0.0, -0.5) * v)
    }

    /// `I₁(ω)` by principal-value quadrature.
    pub fn i1_oracle(spec: &BathSpec, omega: f64) -> Result<f64> {
        let pv = principal_value(
            |nu| C64::new(-spectral_density(spec, nu), 0.0),
            0.0,
            cutoff(spec).max(2.0 * omega),
            omega,
            &[spec.omega_c, 5.0 * spec.omega_c, 20.0 * spec.omega_c],
            tol(),
        )?;
        Ok(pv.re)
    }

    /// `I₂(ω, t)` by principal-value quadrature.
    pub fn i2_oracle(spec: &BathSpec, omega: f64, t: f64) -> Result<C64> {
        let end = cutoff(spec).max(2.0 * omega);
        let step = (1.0 / t.abs().max(1e-9)).min(spec.omega_c);
        principal_value(
            |nu| -spectral_density(spec, nu) * cis(nu * t),
            0.0,
            end,
            omega,
            &uniform_breaks(0.0, end, step),
            tol(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;
    use crate::bath::gamma_rwa;
    use proptest::prelude::*;

    fn unit() -> BathSpec {
        BathSpec::new(1.0, 1.0)
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn i1_matches_principal_value() {
        let s = unit();
        for w in [0.01, 0.1, 0.4, 2.0] {
            let a = i1(&s, w).unwrap();
            let b = i1_oracle(&s, w).unwrap();
            assert!((a - b).abs() < 1e-8 * b.abs(), "ω = {w}: {a} vs {b}");
        }
        assert!(i1(&s, 0.01).unwrap() < 0.0);
        assert!(i1(&s, 50.0).unwrap().abs() < 0.05);
        assert!(matches!(i1(&s, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn i2_matches_principal_value() {
        let s = unit();
        assert_eq!(i2(&s, 0.1, 0.0).unwrap(), C64::new(i1(&s, 0.1).unwrap(), 0.0));
        for (w, t) in [(0.1, 63.7), (0.3, 5.0), (0.05, 1.0)] {
            let a = i2(&s, w, t).unwrap();
            let b = i2_oracle(&s, w, t).unwrap();
            assert!(rel(a, b) < 1e-8, "ω = {w}, t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn offdiagonal_b_matches_oracles() {
        let s = unit();
        let (w, wp, t) = (0.095, 0.105, 63.7);
        let closed = b_offdiag(&s, w, wp, t).unwrap();
        let one_d = b_quadrature_oracle(&s, w, wp, t).unwrap();
        let two_d = b_quadrature_oracle_2d(&s, w, wp, t).unwrap();
        assert!(rel(closed, one_d) < 1e-8, "{closed} vs {one_d}");
        assert!(rel(closed, two_d) < 1e-8, "{closed} vs {two_d}");
    }

    #[test]
    fn diagonal_b_matches_oracle() {
        let s = unit();
        let t = 63.7;
        let closed = b_diag(&s, 0.1, t).unwrap();
        let oracle = b_quadrature_oracle(&s, 0.1, 0.1, t).unwrap();
        assert!(closed > 0.0);
        assert!(oracle.im.abs() < 1e-10 * oracle.re);
        assert!((closed - oracle.re).abs() < 1e-8 * closed, "{closed} vs {oracle}");
    }

    #[test]
    fn lamb_integrals_match_oracles() {
        let s = unit();
        let (w, wp, t) = (0.095, 0.105, 63.7);
        let closed = s_offdiag(&s, w, wp, t).unwrap();
        let one_d = s_quadrature_oracle(&s, w, wp, t).unwrap();
        let two_d = s_quadrature_oracle_2d(&s, w, wp, t).unwrap();
        assert!(rel(closed, one_d) < 1e-8, "{closed} vs {one_d}");
        assert!(rel(closed, two_d) < 1e-8, "{closed} vs {two_d}");
        let diag = s_diag(&s, 0.1, t).unwrap();
        let oracle = s_quadrature_oracle(&s, 0.1, 0.1, t).unwrap();
        assert!((diag - oracle.re).abs() < 1e-8 * diag.abs(), "{diag} vs {oracle}");
        assert!(oracle.im.abs() < 1e-10 * diag.abs());
    }

    #[test]
    fn one_sided_integrals_recombine() {
        let s = unit();
        let (w, wp, t) = (0.08, 0.13, 20.0);
        let forward = one_sided_oracle(&s, w, wp, t).unwrap();
        let backward = one_sided_oracle(&s, wp, w, t).unwrap();
        let b = b_offdiag(&s, w, wp, t).unwrap();
        assert!(rel(forward + backward.conj(), b) < 1e-9);
    }

    #[test]
    fn small_time_limits() {
        let s = unit();
        let a = b_offdiag(&s, 0.1, 0.2, 1e-3).unwrap().norm();
        let b = b_offdiag(&s, 0.1, 0.2, 2e-3).unwrap().norm();
        assert!((b / a - 4.0).abs() < 1e-2, "ratio {}", b / a);
        assert!(b_diag(&s, 0.1, 1e-4).unwrap().abs() < 1e-7);
        assert!(s_diag(&s, 0.1, 1e-4).unwrap().abs() < 1e-7);
        assert!(s_offdiag(&s, 0.1, 0.2, 1e-4).unwrap().norm() < 1e-7);
        assert_eq!(b_quadrature_oracle(&s, 0.1, 0.2, 0.0).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn degenerate_pair_is_rejected_and_routed() {
        let s = unit();
        assert!(matches!(b_offdiag(&s, 0.1, 0.1 + 1e-8, 5.0), Err(Error::DegenerateFrequencies { .. })));
        assert!(matches!(s_offdiag(&s, 0.1, 0.1, 5.0), Err(Error::DegenerateFrequencies { .. })));
        // Expansion and closed form agree just outside the threshold.
        let (w, t) = (0.1, 30.0);
        let d = 3e-6 * w;
        let series = cis(0.5 * d * t) * b_diag(&s, w + 0.5 * d, t).unwrap();
        let closed = b_offdiag(&s, w, w + d, t).unwrap();
        assert!(rel(series, closed) < 1e-8);
        let near = b_any(&s, w, w + 1e-8, t).unwrap();
        let oracle = b_quadrature_oracle(&s, w, w + 1e-8, t).unwrap();
        assert!(rel(near, oracle) < 1e-8);
    }

    #[test]
    fn tensor_for_coincident_frequencies_has_dark_direction() {
        let s = BathSpec::new(1.0, 0.001);
        let sys = VSystemSpec::new(0.1, 0.1);
        let r = rate_tensor(&s, &sys, 40.0).unwrap();
        let g = r.gamma[0][0];
        for row in r.gamma {
            for v in row {
                assert!((v - g).norm() < 1e-15 * g.norm());
            }
        }
        assert!(r.gamma_min_eigenvalue().abs() < 1e-15);
    }

    #[test]
    fn tensor_is_hermitian_and_positive() {
        let s = BathSpec::new(1.0, 0.001);
        let sys = VSystemSpec::new(0.095, 0.105);
        let r = rate_tensor(&s, &sys, 63.0).unwrap();
        assert_eq!(r.hermiticity_defect(), 0.0);
        assert!(r.gamma_min_eigenvalue() >= 0.0);
    }

    #[test]
    fn long_coarse_graining_approaches_rwa() {
        let s = unit();
        let t = 1e4;
        let ratio = b_diag(&s, 0.1, t).unwrap() / t / (gamma_rwa(&s, 0.1) / s.g);
        assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
        let shift = s_diag(&s, 0.1, t).unwrap() / t;
        let rwa = i1(&s, 0.1).unwrap();
        assert!((shift - rwa).abs() < 0.01 * rwa.abs(), "{shift} vs {rwa}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn swap_symmetry(w in 0.01f64..1.0, dw in 0.001f64..0.5, t in 0.1f64..500.0) {
            let s = unit();
            let wp = w + dw;
            let b = b_offdiag(&s, w, wp, t).unwrap();
            let bt = b_offdiag(&s, wp, w, t).unwrap();
            prop_assert!((b - bt.conj()).norm() <= 1e-12 * b.norm().max(1e-3));
            let l = s_offdiag(&s, w, wp, t).unwrap();
            let lt = s_offdiag(&s, wp, w, t).unwrap();
            prop_assert!((l - lt.conj()).norm() <= 1e-12 * l.norm().max(1e-3));
        }

        #[test]
        fn gamma_positive_semidefinite(w1 in 0.02f64..0.6, dw in 0.0f64..0.1, dt in 1.0f64..1e4) {
            let s = BathSpec::new(1.0, 0.001);
            let r = rate_tensor(&s, &VSystemSpec::new(w1, w1 + dw), dt).unwrap();
            prop_assert!(r.gamma_min_eigenvalue() >= -1e-12 * r.gamma_trace());
        }
    }
}
