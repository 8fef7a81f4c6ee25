//! Refrigerator powered by broadband thermal light instead of a drive.
//!
//! The driven transition |e1⟩ ↔ |e2⟩ couples at rate κ to a thermal
//! electromagnetic bath with occupation n̄_E at frequency Ω. Cooling requires
//! n̄_E above [`cooling_threshold`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{
    build_liouvillian, gamma_coefficients, heat_currents_from_flux, BranchDrive, Liouvillian,
    SteadyObservables, C64,
};
use crate::model::{planck_occupation, HeatCurrents, RefrigeratorParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalFieldParams {
    base: RefrigeratorParams,
    nbar_e: f64,
}

impl ThermalFieldParams {
    /// `base` supplies frequencies, γ, κ and the bath occupations; its ξ0 and
    /// Δ are not used.
    pub fn new(base: RefrigeratorParams, nbar_e: f64) -> Result<Self> {
        if !(nbar_e.is_finite() && nbar_e >= 0.0) {
            return Err(Error::invalid(
                "nbar_e",
                format!("must be finite and >= 0, got {nbar_e}"),
            ));
        }
        Ok(ThermalFieldParams { base, nbar_e })
    }

    /// Field occupation from its temperature at frequency Ω.
    pub fn from_temperature(base: RefrigeratorParams, t_e: f64) -> Result<Self> {
        Self::new(base, planck_occupation(base.drive_frequency(), t_e)?)
    }

    pub fn base(&self) -> &RefrigeratorParams {
        &self.base
    }

    pub fn nbar_e(&self) -> f64 {
        self.nbar_e
    }

    /// ℳ = n̄_E(3n̄_h + 3n̄_c + 2) + n̄_h + 2n̄_c + 1.
    fn m_coefficient(&self) -> f64 {
        let (nc, nh, ne) = (self.base.nbar_c(), self.base.nbar_h(), self.nbar_e);
        ne * (3.0 * nh + 3.0 * nc + 2.0) + nh + 2.0 * nc + 1.0
    }

    fn denominator(&self) -> f64 {
        gamma_coefficients(&self.base).norm
            + self.base.kappa() / self.base.gamma() * self.m_coefficient()
    }
}

/// J′ = κ[n̄_E(n̄_c − n̄_h) − n̄_h(n̄_c + 1)] / (𝒩 + (κ/γ)ℳ).
pub fn thermal_field_flux(p: &ThermalFieldParams) -> f64 {
    let (nc, nh, ne) = (p.base.nbar_c(), p.base.nbar_h(), p.nbar_e);
    let k = p.base.kappa();
    if k == 0.0 {
        return 0.0;
    }
    k * (ne * (nc - nh) - nh * (nc + 1.0)) / p.denominator()
}

pub fn thermal_field_heat_currents(p: &ThermalFieldParams) -> HeatCurrents {
    heat_currents_from_flux(&p.base, thermal_field_flux(p))
}

/// Closed-form steady state; the populations carry no coherence.
pub fn steady_populations_thermal(p: &ThermalFieldParams) -> SteadyObservables {
    let (nc, nh, ne) = (p.base.nbar_c(), p.base.nbar_h(), p.nbar_e);
    let r = p.base.kappa() / p.base.gamma();
    let den = p.denominator();
    let pop_1 = (nc * (nh + 1.0) + r * (ne + 1.0) * (nh + nc)) / den;
    let pop_2 = (nh * (nc + 1.0) + r * ne * (nh + nc)) / den;
    SteadyObservables {
        pop_g: 1.0 - pop_1 - pop_2,
        pop_1,
        pop_2,
        tau_e_plus: C64::new(0.0, 0.0),
    }
}

/// Undriven machine plus the thermal field on the |e1⟩ ↔ |e2⟩ transition:
/// κn̄_E D[σ⁺] + κ(n̄_E + 1) D[σ⁻].
pub fn thermal_field_liouvillian(p: &ThermalFieldParams) -> Liouvillian {
    let mut l = build_liouvillian(&p.base, &BranchDrive::off());
    let extra = p.base.kappa() * p.nbar_e;
    let sigma_minus = ket_bra(1, 2);
    let sigma_plus = ket_bra(2, 1);
    l.add_dissipator(&sigma_minus, extra);
    l.add_dissipator(&sigma_plus, extra);
    l
}

fn ket_bra(i: usize, j: usize) -> nalgebra::Matrix3<C64> {
    let mut m = nalgebra::Matrix3::zeros();
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Net e1 → e2 population flux through the field, κ[n̄_E⟨N1⟩ − (n̄_E + 1)⟨N2⟩].
pub fn thermal_field_flux_from_state(p: &ThermalFieldParams, s: &SteadyObservables) -> f64 {
    p.base.kappa() * (p.nbar_e * s.pop_1 - (p.nbar_e + 1.0) * s.pop_2)
}

/// Energy currents of all three baths evaluated on a state.
pub fn thermal_field_heat_flows_from_state(
    p: &ThermalFieldParams,
    s: &SteadyObservables,
) -> HeatCurrents {
    let b = &p.base;
    let g = b.gamma();
    let j = thermal_field_flux_from_state(p, s);
    HeatCurrents {
        q_h: b.omega_h() * g * (b.nbar_h() * s.pop_g - (b.nbar_h() + 1.0) * s.pop_2),
        q_c: b.omega_c() * g * (b.nbar_c() * s.pop_g - (b.nbar_c() + 1.0) * s.pop_1),
        q_e: b.drive_frequency() * j,
        j,
    }
}

/// Smallest field occupation that cools, n̄_h(n̄_c + 1)/(n̄_c − n̄_h).
/// `None` when n̄_c ≤ n̄_h, where no field occupation cools.
pub fn cooling_threshold(nbar_c: f64, nbar_h: f64) -> Option<f64> {
    (nbar_c > nbar_h).then(|| nbar_h * (nbar_c + 1.0) / (nbar_c - nbar_h))
}

/// Upper bound (T_c − T_h T_c/T_E)/(T_h − T_c) on the efficiency of the
/// thermally powered machine. `t_e` may be infinite.
pub fn cop_bound_thermal(t_c: f64, t_h: f64, t_e: f64) -> Result<f64> {
    if !(t_c > 0.0 && t_c < t_h && t_h <= t_e && t_h.is_finite()) {
        return Err(Error::Domain(format!(
            "need 0 < t_c < t_h <= t_e, got ({t_c}, {t_h}, {t_e})"
        )));
    }
    Ok((t_c - t_h * t_c / t_e) / (t_h - t_c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::steady_state_numeric;
    use approx::assert_relative_eq;

    fn params(kappa: f64, nc: f64, nh: f64, ne: f64) -> ThermalFieldParams {
        let base = RefrigeratorParams::builder()
            .kappa(kappa)
            .nbar_c(nc)
            .nbar_h(nh)
            .build()
            .unwrap();
        ThermalFieldParams::new(base, ne).unwrap()
    }

    #[test]
    fn reference_point() {
        let p = params(0.2, 1.0, 0.5, 5.0);
        assert_relative_eq!(
            thermal_field_flux(&p),
            0.023_622_047_244_094,
            max_relative = 1e-12
        );
        let s = steady_populations_thermal(&p);
        assert_relative_eq!(s.pop_1, 0.259_842_519_685_04, max_relative = 1e-12);
        assert_relative_eq!(s.pop_2, 0.196_850_393_700_79, max_relative = 1e-12);
        assert_relative_eq!(
            thermal_field_flux_from_state(&p, &s),
            thermal_field_flux(&p),
            max_relative = 1e-10
        );
        let rho = steady_state_numeric(&thermal_field_liouvillian(&p)).unwrap();
        let n = rho.observables();
        assert!((n.pop_1 - s.pop_1).abs() < 1e-10);
        assert!((n.pop_2 - s.pop_2).abs() < 1e-10);
        assert_relative_eq!(
            thermal_field_flux_from_state(&p, &n),
            thermal_field_flux(&p),
            max_relative = 1e-9
        );
    }

    #[test]
    fn limits() {
        assert_eq!(thermal_field_flux(&params(0.0, 1.0, 0.5, 5.0)), 0.0);
        let th = cooling_threshold(1.0, 0.5).unwrap();
        assert_eq!(th, 2.0);
        assert!(thermal_field_flux(&params(0.3, 1.0, 0.5, th)).abs() < 1e-16);
        assert_eq!(cooling_threshold(1.0, 0.0), Some(0.0));
        assert_eq!(cooling_threshold(0.5, 0.5), None);

        let s = steady_populations_thermal(&params(0.0, 0.0, 0.0, 0.0));
        assert_eq!((s.pop_g, s.pop_1, s.pop_2), (1.0, 0.0, 0.0));
        let s = steady_populations_thermal(&params(0.0, 1.0, 0.5, 3.0));
        assert_relative_eq!(s.pop_1 / s.pop_g, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn energy_closure() {
        let p = params(0.4, 1.3, 0.2, 7.0);
        assert!(thermal_field_heat_currents(&p).total().abs() < 1e-14);
        let s = steady_populations_thermal(&p);
        assert!(thermal_field_heat_flows_from_state(&p, &s).total().abs() < 1e-14);
    }

    #[test]
    fn cop_bounds() {
        assert_relative_eq!(
            cop_bound_thermal(1.0, 2.0, 4.0).unwrap(),
            0.5,
            max_relative = 1e-15
        );
        assert_eq!(cop_bound_thermal(1.0, 2.0, 2.0).unwrap(), 0.0);
        assert_eq!(cop_bound_thermal(1.0, 3.0, f64::INFINITY).unwrap(), 0.5);
        assert!(cop_bound_thermal(2.0, 1.0, 4.0).is_err());
        assert!(cop_bound_thermal(1.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn temperature_entry_point() {
        let base = RefrigeratorParams::default();
        let p = ThermalFieldParams::from_temperature(base, 1.0 / 2f64.ln()).unwrap();
        assert_relative_eq!(p.nbar_e(), 1.0, max_relative = 1e-14);
        assert!(ThermalFieldParams::new(base, -1.0).is_err());
    }
}
