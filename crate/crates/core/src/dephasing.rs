//! Pure dephasing of a two-level system, where the exact, coarse-grained and
//! rotating-wave descriptions are all available in closed form up to one
//! frequency integral.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bath::{dephasing_weight, BathSpec};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre_composite, integrate_real, uniform_breaks, Tolerance};

/// Two-level system with splitting `ω₀` coupled through `σ_z` to the bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelSpec {
    pub omega0: f64,
    pub bath: BathSpec,
}

/// 2×2 density matrix, row-major.
pub type Density2 = [[C64; 2]; 2];

/// Which decay function drives the coherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method")]
pub enum DephasingMethod {
    Exact,
    Cg { dt: f64 },
    Rwa,
}

const CUTOFF: f64 = 60.0;

/// Panel boundaries on `[0, CUTOFF·ω_c]`: a kink at `1/β` and panels no wider
/// than half an oscillation of `cos ωt`.
fn panels(bath: &BathSpec, t: f64) -> Vec<f64> {
    let end = CUTOFF * bath.omega_c;
    let width = (PI / t.abs().max(1e-300)).min(bath.omega_c);
    let mut pts = uniform_breaks(0.0, end, width);
    if bath.beta.is_finite() && 1.0 / bath.beta < end {
        pts.push(1.0 / bath.beta);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
    }
    pts
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("time must be finite and nonnegative, got {t}")))
    }
}

/// `Γ_exact(t) = -4g ∫_0^∞ J(ω) coth(βω/2)(1 - cos ωt)/ω² dω`.
pub fn gamma_exact_2l(spec: &TwoLevelSpec, t: f64) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let bath = &spec.bath;
    let integral = integrate_real(|w| dephasing_weight(bath, w, t), &panels(bath, t), Tolerance::new(1e-10, 1e-12))?;
    Ok(-4.0 * bath.g * integral)
}

/// The same integral with a fixed composite Gauss–Legendre rule.
pub fn gamma_exact_2l_gauss(spec: &TwoLevelSpec, t: f64, order: usize) -> Result<f64> {
    check_time(t)?;
    let bath = &spec.bath;
    let v = gauss_legendre_composite(|w| C64::new(dephasing_weight(bath, w, t), 0.0), &panels(bath, t), 1, order);
    Ok(-4.0 * bath.g * v.re)
}

/// Coarse-grained decay function `Γ_CG(t, Δt) = (t/Δt) Γ_exact(Δt)`.
pub fn gamma_cg_2l(spec: &TwoLevelSpec, t: f64, dt: f64) -> Result<f64> {
    check_time(t)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!("coarse-graining time must be positive, got {dt}")));
    }
    Ok(t / dt * gamma_exact_2l(spec, dt)?)
}

/// Rotating-wave dephasing rate `4πg lim_{ω→0} J(ω)/(1 - e^{-βω}) = 4πgη/β`;
/// zero at zero temperature. The decay function is `Γ_RWA(t) = -rate·t`.
pub fn gamma_rwa_2l(spec: &TwoLevelSpec) -> f64 {
    if spec.bath.beta.is_infinite() {
        0.0
    } else {
        4.0 * PI * spec.bath.g * spec.bath.eta / spec.bath.beta
    }
}

/// The decay function `Γ(t)` of the chosen method.
pub fn decay_function(spec: &TwoLevelSpec, t: f64, method: DephasingMethod) -> Result<f64> {
    match method {
        DephasingMethod::Exact => gamma_exact_2l(spec, t),
        DephasingMethod::Cg { dt } => gamma_cg_2l(spec, t, dt),
        DephasingMethod::Rwa => {
            check_time(t)?;
            Ok(-gamma_rwa_2l(spec) * t)
        }
    }
}

/// Schrödinger-picture state at time `t`: populations fixed,
/// `ρ₀₁(t) = e^{-iω₀t} e^{Γ(t)} ρ₀₁(0)`.
pub fn evolve_dephasing(spec: &TwoLevelSpec, rho0: &Density2, t: f64, method: DephasingMethod) -> Result<Density2> {
    let gamma = decay_function(spec, t, method)?;
    let factor = C64::from_polar(gamma.exp(), -spec.omega0 * t);
    let off = rho0[0][1] * factor;
    Ok([[rho0[0][0], off], [off.conj(), rho0[1][1]]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cold() -> TwoLevelSpec {
        TwoLevelSpec { omega0: 0.3, bath: BathSpec::new(1.0, 0.01) }
    }

    fn warm() -> TwoLevelSpec {
        TwoLevelSpec { omega0: 0.3, bath: BathSpec::new(1.0, 0.01).with_beta(1.0) }
    }

    fn plus() -> Density2 {
        let h = C64::new(0.5, 0.0);
        [[h, h], [h, h]]
    }

    #[test]
    fn decay_starts_at_zero_and_is_negative() {
        for spec in [cold(), warm()] {
            assert_eq!(gamma_exact_2l(&spec, 0.0).unwrap(), 0.0);
            let mut last = 0.0;
            for k in 1..30 {
                let v = gamma_exact_2l(&spec, 0.2 * k as f64).unwrap();
                assert!(v < 0.0 && v <= last);
                last = v;
            }
        }
    }

    #[test]
    fn cold_bath_matches_second_node_family() {
        let spec = cold();
        for t in [0.5, 3.0, 17.0, 250.0] {
            let a = gamma_exact_2l(&spec, t).unwrap();
            let b = gamma_exact_2l_gauss(&spec, t, 24).unwrap();
            assert!((a - b).abs() < 1e-9 * a.abs(), "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn short_time_expansion() {
        // Γ(t) ≈ -2g t² ∫ J coth dω = -2g t² η ω_c² at β = ∞.
        let spec = cold();
        let t = 1e-3;
        let v = gamma_exact_2l(&spec, t).unwrap();
        let want = -2.0 * spec.bath.g * t * t;
        assert!((v - want).abs() < 1e-5 * want.abs());
    }

    #[test]
    fn rwa_rate() {
        assert_eq!(gamma_rwa_2l(&cold()), 0.0);
        let s = TwoLevelSpec { omega0: 1.0, bath: BathSpec::new(1.0, 1.0).with_beta(1.0) };
        assert!((gamma_rwa_2l(&s) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn coarse_grained_slope_approaches_rwa() {
        let spec = warm();
        let dt = 1e4;
        let slope = gamma_cg_2l(&spec, 1.0, dt).unwrap();
        let rate = gamma_rwa_2l(&spec);
        assert!((-slope - rate).abs() < 0.01 * rate, "{slope} vs {rate}");
    }

    #[test]
    fn evolution_preserves_populations() {
        let spec = warm();
        let diag = [[C64::new(0.7, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(0.3, 0.0)]];
        for method in [DephasingMethod::Exact, DephasingMethod::Cg { dt: 5.0 }, DephasingMethod::Rwa] {
            assert_eq!(evolve_dephasing(&spec, &diag, 12.0, method).unwrap(), diag);
            assert_eq!(evolve_dephasing(&spec, &plus(), 0.0, method).unwrap(), plus());
            let r = evolve_dephasing(&spec, &plus(), 12.0, method).unwrap();
            let g = decay_function(&spec, 12.0, method).unwrap();
            assert!((r[0][1].norm() - 0.5 * g.exp()).abs() < 1e-15);
            assert_eq!(r[0][0], plus()[0][0]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn coarse_graining_at_t_is_exact(t in 0.01f64..200.0) {
            let spec = warm();
            let a = gamma_cg_2l(&spec, t, t).unwrap();
            let b = gamma_exact_2l(&spec, t).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }

        #[test]
        fn coarse_grained_is_linear(t in 0.0f64..100.0, dt in 0.1f64..100.0) {
            let spec = cold();
            let one = gamma_cg_2l(&spec, t, dt).unwrap();
            let two = gamma_cg_2l(&spec, 2.0 * t, dt).unwrap();
            prop_assert!((two - 2.0 * one).abs() <= 1e-14 * one.abs().max(1e-300));
        }

        #[test]
        fn coherence_never_grows(t1 in 0.0f64..50.0, dt in 0.0f64..50.0) {
            let spec = warm();
            let a = evolve_dephasing(&spec, &plus(), t1, DephasingMethod::Exact).unwrap();
            let b = evolve_dephasing(&spec, &plus(), t1 + dt, DephasingMethod::Exact).unwrap();
            prop_assert!(b[0][1].norm() <= a[0][1].norm() * (1.0 + 1e-12));
        }
    }
}
