use nalgebra::Matrix3;

use super::liouvillian::{build_liouvillian, Liouvillian};
use super::state::{unvectorize, BranchDrive, DensityMatrix3};
use super::C64;
use crate::error::{Error, Result};
use crate::model::RefrigeratorParams;

/// 0.01 / max(γ(1 + n̄_c + n̄_h), ξ0√n, |Δ|, κ).
pub fn default_time_step(p: &RefrigeratorParams, drive: &BranchDrive) -> f64 {
    let scale = (p.gamma() * (1.0 + p.nbar_c() + p.nbar_h()))
        .max(p.xi0() * drive.amplitude_sq().sqrt())
        .max(p.delta().abs())
        .max(p.kappa());
    0.01 / scale
}

/// Integrates the master equation of a coherent branch from `rho0` for a
/// duration `t`. `dt` defaults to [`default_time_step`].
pub fn evolve(
    p: &RefrigeratorParams,
    drive: &BranchDrive,
    rho0: &DensityMatrix3,
    t: f64,
    dt: Option<f64>,
) -> Result<DensityMatrix3> {
    let dt = dt.unwrap_or_else(|| default_time_step(p, drive));
    evolve_generator(&build_liouvillian(p, drive), rho0, t, dt)
}

/// Classical fixed-step RK4 for dρ⃗/dt = L ρ⃗.
///
/// The step is shortened so that an integer number of steps covers `t`.
pub fn evolve_generator(
    l: &Liouvillian,
    rho0: &DensityMatrix3,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix3> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(
            "t",
            format!("must be finite and >= 0, got {t}"),
        ));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(
            "dt",
            format!("must be finite and > 0, got {dt}"),
        ));
    }
    if t == 0.0 {
        return Ok(*rho0);
    }
    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let m = l.matrix();
    let mut v = rho0.to_vector();
    for _ in 0..steps {
        let k1 = m * v;
        let k2 = m * (v + k1 * C64::from(0.5 * h));
        let k3 = m * (v + k2 * C64::from(0.5 * h));
        let k4 = m * (v + k3 * C64::from(h));
        v += (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(h / 6.0);
    }

    let rho: Matrix3<C64> = unvectorize(&v);
    let tr = rho.trace();
    let drift = (tr - C64::from(1.0)).norm();
    if !drift.is_finite() || drift > 1e-6 {
        return Err(Error::Unstable { drift });
    }
    let mut rho = (rho + rho.adjoint()) * C64::from(0.5);
    if drift > 1e-12 {
        log::warn!("renormalizing trace after integration (drift {drift:.3e})");
        rho /= C64::from(tr.re);
    }
    DensityMatrix3::new(rho).map_err(|_| Error::Unstable { drift })
}

#[cfg(test)]
mod tests {
    use super::super::liouvillian::steady_state_numeric;
    use super::*;

    #[test]
    fn zero_time_and_zero_generator() {
        let p = RefrigeratorParams::default();
        let rho = DensityMatrix3::maximally_mixed();
        assert_eq!(
            evolve(&p, &BranchDrive::off(), &rho, 0.0, None).unwrap(),
            rho
        );
        let out = evolve_generator(&Liouvillian::zero(), &rho, 12.5, 0.1).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn relaxes_to_null_space() {
        let p = RefrigeratorParams::default().with_delta(0.7).unwrap();
        let d = BranchDrive::new(4.0, 0.3).unwrap();
        let out = evolve(&p, &d, &DensityMatrix3::maximally_mixed(), 50.0, None).unwrap();
        let ss = steady_state_numeric(&build_liouvillian(&p, &d)).unwrap();
        assert!(out.distance(&ss) < 1e-6, "distance {}", out.distance(&ss));
    }

    #[test]
    fn large_steps_are_reported() {
        let p = RefrigeratorParams::default();
        let d = BranchDrive::photons(100.0).unwrap();
        let err = evolve(&p, &d, &DensityMatrix3::maximally_mixed(), 50.0, Some(5.0)).unwrap_err();
        assert!(matches!(err, Error::Unstable { .. }));
    }

    #[test]
    fn rejects_bad_durations() {
        let p = RefrigeratorParams::default();
        let rho = DensityMatrix3::ground();
        assert!(evolve(&p, &BranchDrive::off(), &rho, -1.0, None).is_err());
        assert!(evolve(&p, &BranchDrive::off(), &rho, 1.0, Some(0.0)).is_err());
    }
}
