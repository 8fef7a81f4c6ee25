use nalgebra::{Matrix3, SMatrix, SVector};

use super::state::{unvectorize, vectorize, BranchDrive, DensityMatrix3};
use super::C64;
use crate::error::{Error, Result};
use crate::model::RefrigeratorParams;

/// Generator of dρ⃗/dt = L ρ⃗ on the row-major vectorized density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Liouvillian(SMatrix<C64, 9, 9>);

fn ket_bra(i: usize, j: usize) -> Matrix3<C64> {
    let mut m = Matrix3::zeros();
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Liouvillian kernels narrower than this fraction of ‖L‖_F count as zero.
const KERNEL_TOL: f64 = 1e-10;
/// Required gap between the kernel and the next eigenvalue.
const KERNEL_GAP: f64 = 1e3;

impl Liouvillian {
    pub fn zero() -> Self {
        Liouvillian(SMatrix::zeros())
    }

    pub fn from_matrix(m: SMatrix<C64, 9, 9>) -> Self {
        Liouvillian(m)
    }

    /// Builds the superoperator of a linear map by acting on the matrix units.
    pub fn from_map(f: impl Fn(&Matrix3<C64>) -> Matrix3<C64>) -> Self {
        let mut m = SMatrix::<C64, 9, 9>::zeros();
        for k in 0..9 {
            let image = vectorize(&f(&ket_bra(k / 3, k % 3)));
            m.set_column(k, &image);
        }
        Liouvillian(m)
    }

    pub fn matrix(&self) -> &SMatrix<C64, 9, 9> {
        &self.0
    }

    /// −i[H, ·].
    pub fn add_hamiltonian(&mut self, h: &Matrix3<C64>) {
        let i = C64::new(0.0, 1.0);
        self.0 += Self::from_map(|r| (h * r - r * h) * -i).0;
    }

    /// rate · (L ρ L† − ½{L†L, ρ}).
    pub fn add_dissipator(&mut self, jump: &Matrix3<C64>, rate: f64) {
        if rate == 0.0 {
            return;
        }
        let ld = jump.adjoint();
        let ldl = ld * jump;
        self.0 += Self::from_map(|r| {
            (jump * r * ld - (ldl * r + r * ldl) * C64::from(0.5)) * C64::from(rate)
        })
        .0;
    }

    /// Thermal bath of occupation `nbar` on the |e1⟩ ↔ |e2⟩ transition:
    /// rate·n̄ D[σ⁺] + rate·(n̄ + 1) D[σ⁻].
    pub fn add_drive_transition_bath(&mut self, rate: f64, nbar: f64) {
        self.add_dissipator(&ket_bra(2, 1), rate * nbar);
        self.add_dissipator(&ket_bra(1, 2), rate * (nbar + 1.0));
    }

    pub fn apply(&self, rho: &Matrix3<C64>) -> Matrix3<C64> {
        unvectorize(&(self.0 * vectorize(rho)))
    }

    /// Euclidean norm of L ρ⃗.
    pub fn residual(&self, rho: &DensityMatrix3) -> f64 {
        (self.0 * rho.to_vector()).norm()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Rotating-frame Liouvillian of a coherent branch, including spontaneous
/// emission at rate κ.
pub fn build_liouvillian(p: &RefrigeratorParams, drive: &BranchDrive) -> Liouvillian {
    let e = drive.strength(p.xi0());
    let i = C64::new(0.0, 1.0);
    let sigma_plus = ket_bra(2, 1);
    let sigma_minus = ket_bra(1, 2);
    let h =
        ket_bra(2, 2) * C64::from(p.delta()) + sigma_plus * (i * e) - sigma_minus * (i * e.conj());

    let mut l = Liouvillian::zero();
    l.add_hamiltonian(&h);
    let g = p.gamma();
    for (level, nbar) in [(1, p.nbar_c()), (2, p.nbar_h())] {
        l.add_dissipator(&ket_bra(level, 0), g * nbar);
        l.add_dissipator(&ket_bra(0, level), g * (nbar + 1.0));
    }
    l.add_dissipator(&sigma_minus, p.kappa());
    l
}

/// Unique stationary state of a generator.
///
/// The spectrum comes from a complex Schur decomposition. Exactly one
/// eigenvalue may lie below 1e-10·‖L‖_F, and the next one must be at least
/// 10³ times larger; the kernel vector is then the right singular vector of
/// the smallest singular value.
pub fn steady_state_numeric(l: &Liouvillian) -> Result<DensityMatrix3> {
    let m = l.matrix();
    let norm = l.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::DegenerateSteadyState { dim: 9 });
    }
    let schur = m.try_schur(f64::EPSILON, 10_000).ok_or(Error::EigenSolve)?;
    let eig = schur.eigenvalues().ok_or(Error::EigenSolve)?;
    let mut moduli: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    let tol = KERNEL_TOL * norm;
    if moduli[0] >= tol || moduli[1] <= KERNEL_GAP * moduli[0] || moduli[1] < tol {
        let dim = moduli.iter().filter(|&&x| x < tol).count();
        return Err(Error::DegenerateSteadyState { dim });
    }

    let svd = m.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::EigenSolve)?;
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("nine singular values");
    let kernel: SVector<C64, 9> = SVector::from_fn(|r, _| v_t[(k, r)].conj());
    let rho = unvectorize(&kernel);
    let tr = rho.trace();
    if tr.norm() < 1e-300 {
        return Err(Error::EigenSolve);
    }
    let rho = rho / tr;
    DensityMatrix3::new((rho + rho.adjoint()) * C64::from(0.5))
}

#[cfg(test)]
mod tests {
    use super::super::closed_form::{coherent_flux, flux_from_state, steady_state_analytic};
    use super::*;
    use approx::assert_relative_eq;

    /// Independent superoperator assembly through Kronecker products:
    /// for row-major vec, vec(AρB) = (A ⊗ Bᵀ) vec(ρ).
    fn kron_liouvillian(p: &RefrigeratorParams, d: &BranchDrive) -> SMatrix<C64, 9, 9> {
        let id = Matrix3::<C64>::identity();
        let kron = |a: &Matrix3<C64>, b: &Matrix3<C64>| a.kronecker(b);
        let i = C64::new(0.0, 1.0);
        let e = d.strength(p.xi0());
        let sp = ket_bra(2, 1);
        let sm = ket_bra(1, 2);
        let h = ket_bra(2, 2) * C64::from(p.delta()) + sp * (i * e) - sm * (i * e.conj());
        let mut out: SMatrix<C64, 9, 9> = (kron(&h, &id) - kron(&id, &h.transpose())) * -i;
        let mut diss = |l: Matrix3<C64>, rate: f64| {
            let ld = l.adjoint();
            let ldl = ld * l;
            let sup = kron(&l, &ld.transpose())
                - (kron(&ldl, &id) + kron(&id, &ldl.transpose())) * C64::from(0.5);
            out += sup * C64::from(rate);
        };
        let g = p.gamma();
        diss(ket_bra(1, 0), g * p.nbar_c());
        diss(ket_bra(0, 1), g * (p.nbar_c() + 1.0));
        diss(ket_bra(2, 0), g * p.nbar_h());
        diss(ket_bra(0, 2), g * (p.nbar_h() + 1.0));
        diss(sm, p.kappa());
        out
    }

    fn sample_params() -> (RefrigeratorParams, BranchDrive) {
        let p = RefrigeratorParams::builder()
            .delta(1.7)
            .kappa(0.3)
            .nbar_c(1.2)
            .nbar_h(0.4)
            .build()
            .unwrap();
        (p, BranchDrive::new(6.0, 1.1).unwrap())
    }

    #[test]
    fn matches_kronecker_assembly() {
        let (p, d) = sample_params();
        let a = build_liouvillian(&p, &d);
        let b = kron_liouvillian(&p, &d);
        assert!((a.matrix() - b).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn preserves_trace() {
        let (p, d) = sample_params();
        let l = build_liouvillian(&p, &d);
        for col in 0..9 {
            let tr = l.matrix()[(0, col)] + l.matrix()[(4, col)] + l.matrix()[(8, col)];
            assert!(tr.norm() < 1e-13);
        }
    }

    #[test]
    fn pure_decay_goes_to_ground() {
        let p = RefrigeratorParams::builder()
            .nbar_c(0.0)
            .nbar_h(0.0)
            .build()
            .unwrap();
        let rho = steady_state_numeric(&build_liouvillian(&p, &BranchDrive::off())).unwrap();
        assert!(rho.distance(&DensityMatrix3::ground()) < 1e-13);
    }

    #[test]
    fn zero_generator_is_degenerate() {
        assert_eq!(
            steady_state_numeric(&Liouvillian::zero()),
            Err(Error::DegenerateSteadyState { dim: 9 })
        );
    }

    #[test]
    fn block_diagonal_generator_is_degenerate() {
        // Decay e2 → g alone leaves the whole {g, e1} block stationary.
        let mut l = Liouvillian::zero();
        l.add_dissipator(&ket_bra(0, 2), 1.0);
        let err = steady_state_numeric(&l).unwrap_err();
        assert_eq!(err, Error::DegenerateSteadyState { dim: 4 });
    }

    #[test]
    fn null_space_matches_closed_form() {
        let p = RefrigeratorParams::default().with_delta(1.7).unwrap();
        let d = BranchDrive::photons(10.0).unwrap();
        let l = build_liouvillian(&p, &d);
        let rho = steady_state_numeric(&l).unwrap();
        assert!(l.residual(&rho) < 1e-11);
        let s = rho.observables();
        let j = flux_from_state(&p, &d, &s);
        assert_relative_eq!(j, coherent_flux(&p, 10.0), max_relative = 1e-8);
        let a = steady_state_analytic(&p, &d).unwrap();
        assert_relative_eq!(s.pop_1, a.pop_1, max_relative = 1e-9);
        assert_relative_eq!(s.pop_2, a.pop_2, max_relative = 1e-9);
        assert!((s.tau_e_plus - a.tau_e_plus).norm() < 1e-9 * a.tau_e_plus.norm());
    }

    #[test]
    fn analytic_state_is_stationary() {
        let p = RefrigeratorParams::default().with_delta(-2.3).unwrap();
        let d = BranchDrive::new(3.0, 2.0).unwrap();
        let a = steady_state_analytic(&p, &d).unwrap();
        let mut rho = Matrix3::from_diagonal(&nalgebra::Vector3::new(
            C64::from(a.pop_g),
            C64::from(a.pop_1),
            C64::from(a.pop_2),
        ));
        rho[(1, 2)] = a.tau_e_plus;
        rho[(2, 1)] = a.tau_e_plus.conj();
        let rho = DensityMatrix3::new(rho).unwrap();
        assert!(build_liouvillian(&p, &d).residual(&rho) < 1e-10);
    }
}
