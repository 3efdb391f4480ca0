//! GKSL generators for the V-type three-level system and their propagation.
//!
//! Basis order is `(|0⟩, |1⟩, |2⟩)`; density matrices are vectorized by
//! stacking columns, so `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)` and the entry `ρ_{jk}`
//! sits at index `j + 3k`.

use nalgebra::{Matrix3, SMatrix, SVector};
use num_complex::Complex64 as C64;

use crate::bath::{gamma_rwa, lamb_rwa, BathSpec};
use crate::error::{Error, Result};
use crate::exact3::{Picture, Trajectory, VSystemSpec};
use crate::rates::{rate_tensor, RateTensor};

pub type Vec9 = SVector<C64, 9>;
pub type Mat9 = SMatrix<C64, 9, 9>;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Reduced 3×3 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3(pub Matrix3<C64>);

impl DensityMatrix3 {
    /// The projector `|j⟩⟨j|`.
    pub fn basis(j: usize) -> Self {
        let mut m = Matrix3::zeros();
        m[(j, j)] = ONE;
        DensityMatrix3(m)
    }

    /// The pure state `|ψ⟩⟨ψ|`.
    pub fn pure(psi: [C64; 3]) -> Self {
        DensityMatrix3(Matrix3::from_fn(|j, k| psi[j] * psi[k].conj()))
    }

    pub fn get(&self, j: usize, k: usize) -> C64 {
        self.0[(j, k)]
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        hermitian_eigenvalues(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest entry of `ρ - ρ†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_vec(&self) -> Vec9 {
        Vec9::from_column_slice(self.0.as_slice())
    }

    pub fn from_vec(v: &Vec9) -> Self {
        DensityMatrix3(Matrix3::from_column_slice(v.as_slice()))
    }
}

pub(crate) fn hermitian_eigenvalues(m: &Matrix3<C64>) -> [f64; 3] {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[1], ev[2]]
}

/// Generator acting on column-stacked `vec(ρ)`, tagged with its frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    pub matrix: Mat9,
    pub picture: Picture,
}

impl Superoperator {
    /// `max |vec(I)† L|`, zero for a trace-preserving generator.
    pub fn trace_row_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for col in 0..9 {
            let s = self.matrix[(0, col)] + self.matrix[(4, col)] + self.matrix[(8, col)];
            worst = worst.max(s.norm());
        }
        worst
    }

    pub fn apply(&self, rho: &DensityMatrix3) -> DensityMatrix3 {
        DensityMatrix3::from_vec(&(self.matrix * rho.to_vec()))
    }

    /// `exp(L t)`.
    pub fn propagator(&self, t: f64) -> Result<Mat9> {
        let p = (self.matrix * C64::new(t, 0.0)).exp();
        if p.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(p)
        } else {
            Err(Error::Numerical(format!("matrix exponential failed at t = {t}")))
        }
    }
}

fn lowering(j: usize) -> Matrix3<C64> {
    let mut a = Matrix3::zeros();
    a[(0, j)] = ONE;
    a
}

fn kron(a: &Matrix3<C64>, b: &Matrix3<C64>) -> Mat9 {
    Mat9::from_fn(|r, c| a[(r / 3, c / 3)] * b[(r % 3, c % 3)])
}

fn commutator_super(h: &Matrix3<C64>) -> Mat9 {
    let id = Matrix3::identity();
    (kron(&id, h) - kron(&h.transpose(), &id)) * C64::new(0.0, -1.0)
}

/// `L = -i[H, ·] + Σ_{jk} γ_{jk}(a_j · a_k† - ½{a_k† a_j, ·})` with
/// `a_j = |0⟩⟨j|` and `H = Σ_{jk} S_{jk} a_k† a_j`; indices run over levels 1, 2.
pub fn generator_from_rates(gamma: &[[C64; 2]; 2], lamb: &[[C64; 2]; 2]) -> Superoperator {
    let id = Matrix3::identity();
    let ops = [lowering(1), lowering(2)];
    let mut h = Matrix3::zeros();
    let mut l = Mat9::zeros();
    for j in 0..2 {
        for k in 0..2 {
            let kj = ops[k].adjoint() * ops[j];
            h += kj * lamb[j][k];
            let jump = kron(&ops[k].map(|v| v.conj()), &ops[j]);
            let anti = (kron(&id, &kj) + kron(&kj.transpose(), &id)) * C64::new(0.5, 0.0);
            l += (jump - anti) * gamma[j][k];
        }
    }
    Superoperator { matrix: l + commutator_super(&h), picture: Picture::Interaction }
}

/// Coarse-grained generator for the coarse-graining time `dt`.
pub fn build_cg_generator(sys: &VSystemSpec, bath: &BathSpec, dt: f64) -> Result<Superoperator> {
    let r: RateTensor = rate_tensor(bath, sys, dt)?;
    Ok(generator_from_rates(&r.gamma, &r.lamb))
}

/// Rotating-wave generator: independent decay channels with golden-rule
/// rates and principal-value shifts.
pub fn build_rwa_generator(sys: &VSystemSpec, bath: &BathSpec) -> Result<Superoperator> {
    sys.validate()?;
    let w = [sys.omega1, sys.omega2];
    let mut gamma = [[ZERO; 2]; 2];
    let mut lamb = [[ZERO; 2]; 2];
    for j in 0..2 {
        gamma[j][j] = C64::new(gamma_rwa(bath, w[j]), 0.0);
        lamb[j][j] = C64::new(lamb_rwa(bath, w[j])?, 0.0);
    }
    Ok(generator_from_rates(&gamma, &lamb))
}

/// `H_S = diag(0, ω₁, ω₂)`.
pub fn system_hamiltonian(sys: &VSystemSpec) -> Matrix3<C64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(ZERO, C64::new(sys.omega1, 0.0), C64::new(sys.omega2, 0.0)))
}

/// Schrödinger-frame generator `L - i[H_S, ·]`.
pub fn with_system_hamiltonian(l: &Superoperator, sys: &VSystemSpec) -> Result<Superoperator> {
    if l.picture != Picture::Interaction {
        return Err(Error::Picture("generator already includes the system Hamiltonian".into()));
    }
    Ok(Superoperator { matrix: l.matrix + commutator_super(&system_hamiltonian(sys)), picture: Picture::Schroedinger })
}

fn is_uniform(times: &[f64]) -> bool {
    if times.len() < 3 {
        return true;
    }
    let step = times[1] - times[0];
    times.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-12 * step.abs().max(times[times.len() - 1].abs()))
}

/// `ρ(t) = exp(L t) ρ(0)` on the given grid. A uniform grid reuses one step propagator.
pub fn propagate(l: &Superoperator, rho0: &DensityMatrix3, times: &[f64]) -> Result<Trajectory> {
    if times.is_empty() {
        return Err(Error::domain("empty time grid"));
    }
    if times[0] < 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("time grid must start at t ≥ 0 and increase strictly"));
    }
    let mut v = l.propagator(times[0])? * rho0.to_vec();
    let mut states = Vec::with_capacity(times.len());
    states.push(DensityMatrix3::from_vec(&v));
    if is_uniform(times) && times.len() > 1 {
        let step = l.propagator(times[1] - times[0])?;
        for (i, _) in times.iter().enumerate().skip(1) {
            // Re-anchor periodically so rounding of the repeated product stays small.
            v = if i % 4096 == 0 { l.propagator(times[i])? * rho0.to_vec() } else { step * v };
            states.push(DensityMatrix3::from_vec(&v));
        }
    } else {
        for w in times.windows(2) {
            v = l.propagator(w[1] - w[0])? * v;
            states.push(DensityMatrix3::from_vec(&v));
        }
    }
    Trajectory::new(times.to_vec(), states, l.picture)
}

/// Rotate an interaction-picture trajectory into the Schrödinger picture:
/// `ρ_{jk} → e^{-i(E_j - E_k)t} ρ_{jk}` with `E = (0, ω₁, ω₂)`.
pub fn to_schroedinger(traj: &Trajectory, sys: &VSystemSpec) -> Result<Trajectory> {
    if traj.picture != Picture::Interaction {
        return Err(Error::Picture("trajectory is already in the Schrödinger picture".into()));
    }
    let e = [0.0, sys.omega1, sys.omega2];
    let states = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, rho)| {
            DensityMatrix3(Matrix3::from_fn(|j, k| {
                if j == k {
                    rho.0[(j, k)]
                } else {
                    rho.0[(j, k)] * C64::from_polar(1.0, -(e[j] - e[k]) * t)
                }
            }))
        })
        .collect();
    Trajectory::new(traj.times.clone(), states, Picture::Schroedinger)
}
