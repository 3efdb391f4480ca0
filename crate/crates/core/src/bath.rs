//! Ohmic bosonic bath: spectral density, zero-temperature correlation
//! function and the rates of the rotating-wave generator.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rates;

/// Ohmic bath `J(ω) = η ω e^{-ω/ω_c}` with coupling prefactor `g` and
/// inverse temperature `β` (`f64::INFINITY` for zero temperature).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub eta: f64,
    pub omega_c: f64,
    pub g: f64,
    #[serde(serialize_with = "ser_beta", deserialize_with = "de_beta", default = "infinite")]
    pub beta: f64,
}

pub(crate) fn infinite() -> f64 {
    f64::INFINITY
}

pub(crate) fn ser_beta<S: Serializer>(beta: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if beta.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*beta)
    }
}

pub(crate) fn de_beta<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Beta {
        Number(f64),
        Text(String),
    }
    match Option::<Beta>::deserialize(d)? {
        None => Ok(f64::INFINITY),
        Some(Beta::Number(b)) => Ok(b),
        Some(Beta::Text(t)) => match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(f64::INFINITY),
            other => Err(serde::de::Error::custom(format!("beta must be a number or \"inf\", got {other:?}"))),
        },
    }
}

impl BathSpec {
    /// Zero-temperature bath with the conventional `η = ω_c⁻²`.
    pub fn new(omega_c: f64, g: f64) -> Self {
        BathSpec { eta: omega_c.powi(-2), omega_c, g, beta: f64::INFINITY }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::config("eta", format!("must be positive and finite, got {}", self.eta)));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::config("omega_c", format!("must be positive and finite, got {}", self.omega_c)));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::config("g", format!("must be nonnegative and finite, got {}", self.g)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::config("beta", format!("must be positive or infinite, got {}", self.beta)));
        }
        Ok(())
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }
}

impl Default for BathSpec {
    fn default() -> Self {
        BathSpec::new(1.0, 0.001)
    }
}

/// `J(ω) = η ω e^{-ω/ω_c}` for `ω ≥ 0`, zero below.
pub fn spectral_density(spec: &BathSpec, omega: f64) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    spec.eta * omega * (-omega / spec.omega_c).exp()
}

/// Zero-temperature correlation function `∫_0^∞ J(ω) e^{-iωt} dω = η/(1/ω_c + it)²`.
pub fn corr_zero_t(spec: &BathSpec, t: f64) -> C64 {
    let d = C64::new(1.0 / spec.omega_c, t);
    spec.eta / (d * d)
}

/// Memory kernel `g e^{iω_j t} 𝓑(t)` of the exact amplitude equations.
pub fn exact_kernel(spec: &BathSpec, omega_j: f64, t: f64) -> C64 {
    spec.g * C64::from_polar(1.0, omega_j * t) * corr_zero_t(spec, t)
}

/// Golden-rule decay rate `2π g J(ω)` (zero for `ω ≤ 0`).
pub fn gamma_rwa(spec: &BathSpec, omega: f64) -> f64 {
    2.0 * PI * spec.g * spectral_density(spec, omega)
}

/// Lamb shift of the rotating-wave generator,
/// `g·P∫_0^∞ J(ν)/(ω - ν) dν = g[-η ω_c + J(ω) Ei(ω/ω_c)]`.
pub fn lamb_rwa(spec: &BathSpec, omega: f64) -> Result<f64> {
    Ok(spec.g * rates::i1(spec, omega)?)
}

/// Dephasing integrand `J(ω) coth(βω/2) (1 - cos ωt)/ω²`, continuous at `ω = 0`.
pub fn dephasing_weight(spec: &BathSpec, omega: f64, t: f64) -> f64 {
    if omega < 0.0 {
        return 0.0;
    }
    // ω·coth(βω/2), which tends to 2/β at ω = 0.
    let omega_coth = if spec.beta.is_infinite() {
        omega
    } else {
        let x = 0.5 * spec.beta * omega;
        let x_coth = if x < 1e-8 { 1.0 + x * x / 3.0 } else { x / x.tanh() };
        2.0 * x_coth / spec.beta
    };
    // (1 - cos ωt)/ω² = (t²/2)·sinc²(ωt/2).
    let s = 0.5 * omega * t;
    let sinc = if s.abs() < 1e-8 { 1.0 - s * s / 6.0 } else { s.sin() / s };
    spec.eta * (-omega / spec.omega_c).exp() * omega_coth * 0.5 * t * t * sinc * sinc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, principal_value, uniform_breaks, Tolerance};
    use proptest::prelude::*;

    fn unit() -> BathSpec {
        BathSpec::new(1.0, 1.0)
    }

    fn corr_by_quadrature(spec: &BathSpec, t: f64) -> C64 {
        let cutoff = 80.0 * spec.omega_c;
        let step = (1.0 / t.abs().max(1e-3)).min(1.0);
        integrate(
            |w| spectral_density(spec, w) * C64::from_polar(1.0, -w * t),
            &uniform_breaks(0.0, cutoff, step),
            Tolerance::new(1e-15, 1e-12),
        )
        .unwrap()
    }

    #[test]
    fn spectral_density_values() {
        let s = unit();
        assert_eq!(spectral_density(&s, 0.0), 0.0);
        assert_eq!(spectral_density(&s, -0.3), 0.0);
        assert!((spectral_density(&s, 1.0) - (-1f64).exp()).abs() < 1e-16);
        let wide = BathSpec::new(2.0, 1.0);
        assert!((spectral_density(&wide, 2.0) - (-1f64).exp() / 2.0).abs() < 1e-16);
    }

    #[test]
    fn spectral_density_peaks_at_cutoff() {
        let s = BathSpec::new(1.7, 1.0);
        let grid: Vec<f64> = (1..4000).map(|k| k as f64 * 1e-3).collect();
        let best = grid.iter().copied().max_by(|a, b| spectral_density(&s, *a).total_cmp(&spectral_density(&s, *b)));
        assert!((best.unwrap() - 1.7).abs() <= 1e-3);
    }

    #[test]
    fn correlation_closed_form() {
        let s = unit();
        assert_eq!(corr_zero_t(&s, 0.0), C64::new(1.0, 0.0));
        let v = corr_zero_t(&s, 1.0);
        assert!((v - C64::new(0.0, -0.5)).norm() < 1e-16);
        for t in [0.3, 1.0, 7.5, 42.0, 100.0] {
            let q = corr_by_quadrature(&s, t);
            let c = corr_zero_t(&s, t);
            assert!((q - c).norm() < 1e-9 * c.norm(), "t = {t}: {q} vs {c}");
        }
    }

    #[test]
    fn kernel_properties() {
        let s = BathSpec::new(1.0, 0.003);
        assert!((exact_kernel(&s, 0.1, 0.0) - C64::new(0.003, 0.0)).norm() < 1e-18);
        let a = exact_kernel(&s, 0.1, 12.0).norm();
        let b = exact_kernel(&s, 0.7, 12.0).norm();
        assert!((a - b).abs() < 1e-18);
        let free = s.with_g(0.0);
        assert_eq!(exact_kernel(&free, 0.1, 3.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn rwa_rate_matches_one_sided_transform() {
        let s = unit();
        let v = gamma_rwa(&s, 0.1);
        assert!((v - 2.0 * PI * 0.1 * (-0.1f64).exp()).abs() < 1e-15);
        assert!((v - 0.568_526_117).abs() < 1e-9);
        assert_eq!(gamma_rwa(&s, -0.1), 0.0);
        // Re Γ₊(ω) = Re ∫_0^∞ 𝓑(τ) e^{iωτ} dτ = γ(ω)/2.
        let omega = 0.1;
        let f = |tau: f64| (corr_zero_t(&s, tau) * C64::from_polar(1.0, omega * tau)).re;
        let head = integrate(|t| C64::new(f(t), 0.0), &uniform_breaks(0.0, 2000.0, 5.0), Tolerance::new(1e-14, 1e-12))
            .unwrap()
            .re;
        // Beyond the cutoff 𝓑(τ) ≈ -1/τ², so the tail is
        // -∫_T^∞ cos(ωτ)/τ² dτ = -cos(ωT)/T + ω∫_{ωT}^∞ sin(x)/x dx,
        // the last integral from its asymptotic series.
        let t_end = 2000.0;
        let x = omega * t_end;
        let tail_sin = x.cos() / x * (1.0 - 2.0 / (x * x) + 24.0 / x.powi(4))
            + x.sin() / (x * x) * (1.0 - 6.0 / (x * x) + 120.0 / x.powi(4));
        let tail = -((omega * t_end).cos() / t_end - omega * tail_sin);
        assert!((head + tail - v / 2.0).abs() < 1e-6 * v, "{} vs {}", head + tail, v / 2.0);
    }

    #[test]
    fn lamb_shift_matches_principal_value() {
        let s = unit();
        let omega = 0.1;
        let cutoff = 80.0;
        let pv = principal_value(
            |nu| C64::new(-spectral_density(&s, nu), 0.0),
            0.0,
            cutoff,
            omega,
            &[1.0, 5.0, 20.0],
            Tolerance::new(1e-15, 1e-13),
        )
        .unwrap()
        .re;
        let v = lamb_rwa(&s, omega).unwrap();
        assert!((v - pv).abs() < 1e-8 * pv.abs(), "{v} vs {pv}");
        assert_eq!(lamb_rwa(&s.with_g(0.0), omega).unwrap(), 0.0);
        assert!(matches!(lamb_rwa(&s, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn dephasing_weight_limits() {
        let cold = unit();
        assert_eq!(dephasing_weight(&cold, 0.4, 0.0), 0.0);
        let t: f64 = 3.0;
        let want = (-1f64).exp() * (1.0 - t.cos());
        assert!((dephasing_weight(&cold, 1.0, t) - want).abs() < 1e-15);
        assert_eq!(dephasing_weight(&cold, 0.0, t), 0.0);
        let warm = unit().with_beta(2.0);
        let at_zero = dephasing_weight(&warm, 0.0, t);
        assert!((at_zero - t * t / 2.0).abs() < 1e-15);
        let near = dephasing_weight(&warm, 1e-8, t);
        let less_near = dephasing_weight(&warm, 1e-6, t);
        assert!((near - at_zero).abs() < 1e-7 * at_zero);
        assert!((less_near - at_zero).abs() < 1e-5 * at_zero);
    }

    #[test]
    fn validation_and_serde() {
        assert!(BathSpec::default().validate().is_ok());
        assert!(matches!(BathSpec::new(1.0, -1.0).validate(), Err(Error::Config { .. })));
        assert!(BathSpec::new(0.0, 1.0).validate().is_err());
        assert!(unit().with_beta(0.0).validate().is_err());
        let cold = unit();
        let text = serde_json::to_string(&cold).unwrap();
        assert!(text.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<BathSpec>(&text).unwrap(), cold);
        let warm: BathSpec = serde_json::from_str(r#"{"eta":1,"omega_c":1,"g":0.1,"beta":2.5}"#).unwrap();
        assert_eq!(warm.beta, 2.5);
        let null: BathSpec = serde_json::from_str(r#"{"eta":1,"omega_c":1,"g":0.1,"beta":null}"#).unwrap();
        assert!(null.beta.is_infinite());
    }

    proptest! {
        #[test]
        fn correlation_is_hermitian(t in -200.0f64..200.0, wc in 0.2f64..5.0) {
            let s = BathSpec::new(wc, 1.0);
            let d = corr_zero_t(&s, -t) - corr_zero_t(&s, t).conj();
            prop_assert!(d.norm() <= 1e-15 * corr_zero_t(&s, t).norm());
        }

        #[test]
        fn rwa_rate_nonnegative(w in -5.0f64..5.0, g in 0.0f64..1.0) {
            prop_assert!(gamma_rwa(&BathSpec::new(1.0, g), w) >= 0.0);
        }

        #[test]
        fn correlation_matches_quadrature(t in 0.0f64..100.0) {
            let s = unit();
            let q = corr_by_quadrature(&s, t);
            let c = corr_zero_t(&s, t);
            prop_assert!((q - c).norm() < 1e-9 * c.norm());
        }
    }
}
