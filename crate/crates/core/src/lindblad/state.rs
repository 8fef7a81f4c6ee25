use std::f64::consts::TAU;

use nalgebra::{Matrix3, SVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{Error, Result};

/// One coherent-state branch |α⟩ of the driving field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchDrive {
    amplitude_sq: f64,
    phase: f64,
}

impl BranchDrive {
    /// `amplitude_sq` is the branch photon number |α|²; the phase is reduced
    /// to [0, 2π).
    pub fn new(amplitude_sq: f64, phase: f64) -> Result<Self> {
        if !(amplitude_sq.is_finite() && amplitude_sq >= 0.0) {
            return Err(Error::invalid(
                "amplitude_sq",
                format!("must be finite and >= 0, got {amplitude_sq}"),
            ));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("phase", "must be finite"));
        }
        let phase = phase.rem_euclid(TAU);
        Ok(BranchDrive {
            amplitude_sq,
            phase: if phase >= TAU { 0.0 } else { phase },
        })
    }

    pub fn photons(n: f64) -> Result<Self> {
        Self::new(n, 0.0)
    }

    pub fn off() -> Self {
        BranchDrive {
            amplitude_sq: 0.0,
            phase: 0.0,
        }
    }

    pub fn amplitude_sq(&self) -> f64 {
        self.amplitude_sq
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Driving strength 𝓔 = e^{iφ} ξ0 √n / 2.
    pub fn strength(&self, xi0: f64) -> C64 {
        C64::from_polar(0.5 * xi0 * self.amplitude_sq.sqrt(), self.phase)
    }
}

/// Hermitian, unit-trace, positive semidefinite 3×3 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3(Matrix3<C64>);

impl DensityMatrix3 {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const POSITIVITY_TOL: f64 = -1e-10;

    pub fn new(m: Matrix3<C64>) -> Result<Self> {
        if m.iter().any(|z| !z.is_finite()) {
            return Err(Error::invalid("rho", "non-finite entry"));
        }
        let herm = max_abs(&(m - m.adjoint()));
        if herm > Self::HERMITICITY_TOL {
            return Err(Error::invalid(
                "rho",
                format!("not Hermitian (deviation {herm:.3e})"),
            ));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > Self::TRACE_TOL {
            return Err(Error::invalid("rho", format!("trace {tr} differs from 1")));
        }
        let min_eig = SymmetricEigen::new((m + m.adjoint()).scale(0.5))
            .eigenvalues
            .min();
        if min_eig < Self::POSITIVITY_TOL {
            return Err(Error::invalid(
                "rho",
                format!("not positive semidefinite (eigenvalue {min_eig:.3e})"),
            ));
        }
        Ok(DensityMatrix3(m))
    }

    /// Diagonal state with the given populations of (|g⟩, |e1⟩, |e2⟩).
    pub fn diagonal(pops: [f64; 3]) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&nalgebra::Vector3::new(
            C64::from(pops[0]),
            C64::from(pops[1]),
            C64::from(pops[2]),
        )))
    }

    pub fn ground() -> Self {
        DensityMatrix3(Matrix3::from_diagonal(&nalgebra::Vector3::new(
            C64::from(1.0),
            C64::from(0.0),
            C64::from(0.0),
        )))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix3(Matrix3::identity().scale(1.0 / 3.0))
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.0
    }

    /// Row-major vectorization, ρ⃗[3i + j] = ρ_ij.
    pub fn to_vector(&self) -> SVector<C64, 9> {
        vectorize(&self.0)
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    pub fn observables(&self) -> SteadyObservables {
        let [pop_g, pop_1, pop_2] = self.populations();
        SteadyObservables {
            pop_g,
            pop_1,
            pop_2,
            tau_e_plus: self.0[(1, 2)],
        }
    }

    /// Largest absolute entry-wise difference.
    pub fn distance(&self, other: &DensityMatrix3) -> f64 {
        max_abs(&(self.0 - other.0))
    }
}

pub(crate) fn vectorize(m: &Matrix3<C64>) -> SVector<C64, 9> {
    SVector::from_fn(|k, _| m[(k / 3, k % 3)])
}

pub(crate) fn unvectorize(v: &SVector<C64, 9>) -> Matrix3<C64> {
    Matrix3::from_fn(|i, j| v[3 * i + j])
}

/// Level populations and the drive-transition coherence ⟨σ⁺⟩ = ρ_{e1,e2}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyObservables {
    pub pop_g: f64,
    pub pop_1: f64,
    pub pop_2: f64,
    pub tau_e_plus: C64,
}

/// Largest entry modulus.
pub(crate) fn max_abs(m: &Matrix3<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_phase_is_reduced() {
        let b = BranchDrive::new(4.0, -0.5 * std::f64::consts::PI).unwrap();
        assert!((b.phase() - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert!(BranchDrive::new(-1.0, 0.0).is_err());
        let e = b.strength(1.1);
        assert!((e.norm_sqr() - 1.1 * 1.1 * 4.0 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix3::diagonal([0.5, 0.25, 0.25]).is_ok());
        assert!(DensityMatrix3::diagonal([0.5, 0.25, 0.2]).is_err());
        assert!(DensityMatrix3::diagonal([1.1, -0.05, -0.05]).is_err());
        let mut m = *DensityMatrix3::maximally_mixed().matrix();
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix3::new(m).is_err());
        m[(1, 0)] = C64::new(0.0, -0.1);
        assert!(DensityMatrix3::new(m).is_ok());
    }

    #[test]
    fn vectorization_is_row_major() {
        let m = Matrix3::from_fn(|i, j| C64::new((3 * i + j) as f64, 0.0));
        let v = vectorize(&m);
        for k in 0..9 {
            assert_eq!(v[k].re, k as f64);
        }
        assert_eq!(unvectorize(&v), m);
    }
}
