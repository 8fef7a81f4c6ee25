use serde::{Deserialize, Serialize};

use super::state::{BranchDrive, SteadyObservables};
use super::C64;
use crate::error::{Error, Result};
use crate::model::{HeatCurrents, RefrigeratorParams};

/// Γ1 = γ(2 + n̄_c + n̄_h), Γ2 = γ(2 + 3n̄_c + 3n̄_h),
/// 𝒩 = 1 + 2n̄_h + 2n̄_c + 3n̄_c n̄_h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCoefficients {
    pub gamma1: f64,
    pub gamma2: f64,
    pub norm: f64,
}

pub fn gamma_coefficients(p: &RefrigeratorParams) -> GammaCoefficients {
    let (g, nc, nh) = (p.gamma(), p.nbar_c(), p.nbar_h());
    GammaCoefficients {
        gamma1: g * (2.0 + nc + nh),
        gamma2: g * (2.0 + 3.0 * nc + 3.0 * nh),
        norm: 1.0 + 2.0 * nh + 2.0 * nc + 3.0 * nc * nh,
    }
}

/// Coefficients of the branch flux J(x) = a·x / (b + c·x) in the intensity
/// variable x = ξ0²·n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FluxCoefficients {
    /// a = n̄_c − n̄_h, b = 𝒩(Γ1 + 4Δ²/Γ1), c = Γ2/γ².
    pub fn new(p: &RefrigeratorParams) -> Self {
        let g = gamma_coefficients(p);
        let d = p.delta();
        FluxCoefficients {
            a: p.nbar_c() - p.nbar_h(),
            b: g.norm * (g.gamma1 + 4.0 * d * d / g.gamma1),
            c: g.gamma2 / (p.gamma() * p.gamma()),
        }
    }

    pub fn flux_at_intensity(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        self.a * x / (self.b + self.c * x)
    }

    /// Large-intensity limit a/c = γ²(n̄_c − n̄_h)/Γ2.
    pub fn saturation(&self) -> f64 {
        self.a / self.c
    }

    /// Initial slope a/b of J(x).
    pub fn linear_slope(&self) -> f64 {
        self.a / self.b
    }
}

/// Steady-state population flux for a coherent drive with `branch_photons`
/// photons. Spontaneous emission κ is neglected by this closed form.
pub fn coherent_flux(p: &RefrigeratorParams, branch_photons: f64) -> f64 {
    FluxCoefficients::new(p).flux_at_intensity(p.xi0() * p.xi0() * branch_photons)
}

/// Q_h = −ω_h J, Q_c = ω_c J, Q_E = Ω J.
pub fn heat_currents_from_flux(p: &RefrigeratorParams, j: f64) -> HeatCurrents {
    HeatCurrents {
        q_h: -p.omega_h() * j,
        q_c: p.omega_c() * j,
        q_e: p.drive_frequency() * j,
        j,
    }
}

/// ω_c / (ω_h − ω_c).
pub fn cop(p: &RefrigeratorParams) -> f64 {
    p.omega_c() / p.drive_frequency()
}

/// Closed-form κ = 0 steady state for a coherent branch.
pub fn steady_state_analytic(
    p: &RefrigeratorParams,
    drive: &BranchDrive,
) -> Result<SteadyObservables> {
    if p.kappa() > 1e-8 * p.gamma() {
        return Err(Error::Domain(format!(
            "analytic steady state requires kappa = 0, got kappa = {}",
            p.kappa()
        )));
    }
    let GammaCoefficients {
        gamma1: g1,
        gamma2: g2,
        norm,
    } = gamma_coefficients(p);
    let (g, d, nc, nh) = (p.gamma(), p.delta(), p.nbar_c(), p.nbar_h());
    let e = drive.strength(p.xi0());
    let e2 = e.norm_sqr();
    let gg = g * g;

    let phi = 4.0 * d * d * gg * norm + g1 * (g1 * gg * norm + 4.0 * e2 * g2);
    let pop_1 = (4.0 * d * d * gg * nc * (1.0 + nh)
        + 4.0 * e2 * g * (nc + nh) * g1
        + gg * nc * (1.0 + nh) * g1 * g1)
        / phi;
    let pop_2 = (4.0 * d * d * gg * nh * (1.0 + nc)
        + 4.0 * e2 * g * (nc + nh) * g1
        + gg * nh * (1.0 + nc) * g1 * g1)
        / phi;
    let tau_e_plus = (C64::new(0.0, 4.0 * d) * e.conj() * gg * (nc - nh)
        + e.conj() * 2.0 * gg * (nc - nh) * g1)
        / phi;
    Ok(SteadyObservables {
        pop_g: 1.0 - pop_1 - pop_2,
        pop_1,
        pop_2,
        tau_e_plus,
    })
}

/// Population flux through the drive, 2 Re(𝓔⟨σ⁺⟩) − κ⟨N2⟩.
pub fn flux_from_state(p: &RefrigeratorParams, drive: &BranchDrive, s: &SteadyObservables) -> f64 {
    2.0 * (drive.strength(p.xi0()) * s.tau_e_plus).re - p.kappa() * s.pop_2
}

/// Power delivered by the drive, Ω·2 Re(𝓔⟨σ⁺⟩).
pub fn drive_power(p: &RefrigeratorParams, drive: &BranchDrive, s: &SteadyObservables) -> f64 {
    p.drive_frequency() * 2.0 * (drive.strength(p.xi0()) * s.tau_e_plus).re
}

/// Energy currents into the system evaluated on a state.
///
/// Q_k = ω_k γ[n̄_k⟨N_g⟩ − (n̄_k + 1)⟨N_k⟩] for the baths and
/// Q_E = Ω[𝓔⟨σ⁺⟩ + c.c.] − Ωκ⟨N2⟩ for the field.
pub fn heat_flows_from_state(
    p: &RefrigeratorParams,
    drive: &BranchDrive,
    s: &SteadyObservables,
) -> HeatCurrents {
    let g = p.gamma();
    let q_h = p.omega_h() * g * (p.nbar_h() * s.pop_g - (p.nbar_h() + 1.0) * s.pop_2);
    let q_c = p.omega_c() * g * (p.nbar_c() * s.pop_g - (p.nbar_c() + 1.0) * s.pop_1);
    let q_e = drive_power(p, drive, s) - p.drive_frequency() * p.kappa() * s.pop_2;
    HeatCurrents {
        q_h,
        q_c,
        q_e,
        j: flux_from_state(p, drive, s),
    }
}

/// Cooling power over drive power, Q_c / (Ω·2 Re(𝓔⟨σ⁺⟩)).
///
/// Equal to [`cop`] when κ = 0; photons lost to spontaneous emission make it
/// smaller. `None` unless both the cooling power and the drive power are
/// positive.
pub fn work_cop(p: &RefrigeratorParams, drive: &BranchDrive, s: &SteadyObservables) -> Option<f64> {
    let q_c = heat_flows_from_state(p, drive, s).q_c;
    let w = drive_power(p, drive, s);
    (q_c > 0.0 && w > 0.0).then(|| q_c / w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(g: f64, nc: f64, nh: f64) -> RefrigeratorParams {
        RefrigeratorParams::builder()
            .gamma(g)
            .nbar_c(nc)
            .nbar_h(nh)
            .build()
            .unwrap()
    }

    #[test]
    fn gamma_coefficient_examples() {
        let c = gamma_coefficients(&params(1.0, 1.0, 0.5));
        assert_eq!((c.gamma1, c.gamma2, c.norm), (3.5, 6.5, 5.5));
        let c = gamma_coefficients(&params(1.0, 0.0, 0.0));
        assert_eq!((c.gamma1, c.gamma2, c.norm), (2.0, 2.0, 1.0));
        let c = gamma_coefficients(&params(2.0, 0.5, 1.0));
        assert_eq!((c.gamma1, c.gamma2, c.norm), (7.0, 13.0, 5.5));
    }

    #[test]
    fn flux_trivial_cases() {
        let p = RefrigeratorParams::default();
        assert_eq!(coherent_flux(&p, 0.0), 0.0);
        let q = p.with_occupations(0.8, 0.8).unwrap();
        assert_eq!(coherent_flux(&q, 7.0), 0.0);
        let heating = p.with_occupations(0.5, 1.0).unwrap();
        assert!(coherent_flux(&heating, 3.0) < 0.0);
    }

    #[test]
    fn flux_saturates() {
        let p = RefrigeratorParams::default();
        let f = FluxCoefficients::new(&p);
        assert_relative_eq!(f.saturation(), 0.5 / 6.5, max_relative = 1e-15);
        assert_relative_eq!(coherent_flux(&p, 1e6), f.saturation(), max_relative = 1e-3);
    }

    #[test]
    fn heat_current_example() {
        let p = RefrigeratorParams::default()
            .with_frequencies(1.0, 3.0)
            .unwrap();
        let h = heat_currents_from_flux(&p, 0.1);
        assert_relative_eq!(h.q_h, -0.3, max_relative = 1e-15);
        assert_relative_eq!(h.q_c, 0.1, max_relative = 1e-15);
        assert_relative_eq!(h.q_e, 0.2, max_relative = 1e-15);
        assert_eq!(heat_currents_from_flux(&p, 0.0).total(), 0.0);
        assert_eq!(cop(&p), 0.5);
        let p2 = RefrigeratorParams::default();
        assert_eq!(cop(&p2), 1.0);
    }

    #[test]
    fn analytic_state_limits() {
        let p = RefrigeratorParams::default();
        let s = steady_state_analytic(&p, &BranchDrive::off()).unwrap();
        assert_eq!(s.tau_e_plus, C64::new(0.0, 0.0));
        // Two-bath thermal ratios N_k/N_g = n̄_k/(n̄_k + 1).
        assert_relative_eq!(s.pop_1 / s.pop_g, 0.5, max_relative = 1e-14);
        assert_relative_eq!(s.pop_2 / s.pop_g, 0.5 / 1.5, max_relative = 1e-14);

        let q = p.with_occupations(0.7, 0.7).unwrap();
        let s = steady_state_analytic(&q, &BranchDrive::photons(5.0).unwrap()).unwrap();
        assert_eq!(s.tau_e_plus.norm(), 0.0);

        let k = p.with_kappa(0.1).unwrap();
        assert!(steady_state_analytic(&k, &BranchDrive::off()).is_err());
    }

    #[test]
    fn analytic_state_reproduces_flux() {
        let p = RefrigeratorParams::default().with_delta(1.7).unwrap();
        let d = BranchDrive::new(10.0, 0.4).unwrap();
        let s = steady_state_analytic(&p, &d).unwrap();
        let j = flux_from_state(&p, &d, &s);
        assert_relative_eq!(j, coherent_flux(&p, 10.0), max_relative = 1e-13);
        assert_relative_eq!(j, 0.052_125_643_108_58, max_relative = 1e-11);
        let h = heat_flows_from_state(&p, &d, &s);
        assert!(h.total().abs() < 1e-14);
        assert_relative_eq!(work_cop(&p, &d, &s).unwrap(), cop(&p), max_relative = 1e-12);
    }
}
