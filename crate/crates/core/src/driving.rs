//! Flux averaged over the coherent-state branches of an arbitrary driving
//! field.
//!
//! Each branch |α⟩ drives the refrigerator like a classical wave with
//! intensity x = ξ0²|α|², giving J(x) = a·x/(b + c·x). The average over the
//! Glauber–Sudarshan P function is computed by three independent routes:
//!
//! * [`flux_quadrature_thermal`]: direct integration against the Gaussian
//!   P function of thermal light.
//! * [`flux_laplace`]: writing 1/(b + c·x) as a Laplace integral turns the
//!   average into S·∫₀^∞ e^{−s}(1 − F(σs)) ds, where S = a/c is the
//!   saturation flux, σ = ξ0²c/b and F is the normally ordered generating
//!   function of the photon statistics.
//! * [`flux_series`]: expanding J(x) in powers of x gives
//!   S·Σ_k (−1)^{k−1} σ^k ⟨(a†)^k a^k⟩, which converges only at low intensity.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{heat_currents_from_flux, FluxCoefficients};
use crate::model::{HeatCurrents, RefrigeratorParams};
use crate::photonstats::{DistributionKind, PhotonDistribution};
use crate::quadrature::integrate_exp_weight;

/// Default number of series terms.
pub const DEFAULT_K_MAX: u32 = 60;

/// Cross-check discrepancies at or above this fraction of max(|J̄|, |S|) are
/// flagged.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

/// The two Gauss–Laguerre orders must agree to this fraction of |S|.
const RULE_TOL: f64 = 1e-12;

/// Series terms below this fraction of the partial sum end the expansion.
const SERIES_TOL: f64 = 1e-12;

/// A divergent (asymptotic) series is still accepted when its smallest term
/// is below this fraction of |S|.
const ASYMPTOTIC_TOL: f64 = 1e-8;

/// Custom tables are rejected when rounding in the alternating generating
/// function could exceed this fraction of |S|.
const CUSTOM_ROUNDING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Laplace,
    ThermalQuadrature,
    Series,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Laplace => "laplace",
            Route::ThermalQuadrature => "quadrature",
            Route::Series => "series",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub route: Route,
    pub value: f64,
    pub discrepancy: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxResult {
    pub j_bar: f64,
    pub route: Route,
    pub error_estimate: f64,
    pub cross_check: Option<CrossCheck>,
}

impl FluxResult {
    fn exact(j_bar: f64, route: Route) -> Self {
        FluxResult {
            j_bar,
            route,
            error_estimate: 0.0,
            cross_check: None,
        }
    }

    pub fn flagged(&self) -> bool {
        self.cross_check.is_some_and(|c| c.flagged)
    }

    pub fn heat_currents(&self, p: &RefrigeratorParams) -> HeatCurrents {
        heat_currents_from_flux(p, self.j_bar)
    }
}

/// Saturation flux S and Laplace scale σ per photon.
fn scales(p: &RefrigeratorParams) -> (f64, f64) {
    (FluxCoefficients::new(p).saturation(), sigma_of(p))
}

fn sigma_of(p: &RefrigeratorParams) -> f64 {
    let f = FluxCoefficients::new(p);
    p.xi0() * p.xi0() * f.c / f.b
}

/// Thermal light by direct integration over the P function
/// e^{−|α|²/n̄}/(π n̄).
///
/// The branch flux depends on α only through u = |α|², so the angular
/// integral is trivial and d²α → π du. With u = n̄t the average becomes
/// ∫₀^∞ e^{−t} J(ξ0² n̄ t) dt.
pub fn flux_quadrature_thermal(p: &RefrigeratorParams, nbar_th: f64) -> Result<FluxResult> {
    if !(nbar_th.is_finite() && nbar_th >= 0.0) {
        return Err(Error::invalid(
            "nbar_th",
            format!("must be finite and >= 0, got {nbar_th}"),
        ));
    }
    let f = FluxCoefficients::new(p);
    let s = f.saturation();
    let x_per_t = p.xi0() * p.xi0() * nbar_th;
    if x_per_t == 0.0 || s == 0.0 {
        return Ok(FluxResult::exact(0.0, Route::ThermalQuadrature));
    }
    let integral = integrate_exp_weight(
        |t| f.flux_at_intensity(x_per_t * t),
        s.abs(),
        RULE_TOL * s.abs(),
        1.0 / (sigma_of(p) * nbar_th).abs(),
    )?;
    Ok(FluxResult {
        j_bar: integral.value,
        route: Route::ThermalQuadrature,
        error_estimate: integral.error_estimate,
        cross_check: None,
    })
}

/// Any photon statistics through the generating function F.
pub fn flux_laplace(p: &RefrigeratorParams, dist: &PhotonDistribution) -> Result<FluxResult> {
    let (s, sigma) = scales(p);
    if s == 0.0 || sigma == 0.0 {
        return Ok(FluxResult::exact(0.0, Route::Laplace));
    }
    let failure = Cell::new(None);
    let integrand = |t: f64| match dist.generating_function(sigma * t) {
        Ok(v) => 1.0 - v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };

    let integral = if let DistributionKind::Custom(probs) = dist.kind() {
        // F is a polynomial of degree N: both rules are exact for N < 128, so
        // disagreement only reflects rounding in the alternating sum.
        let lo = crate::quadrature::GaussLaguerre::cached(64).integrate(integrand);
        let hi = crate::quadrature::GaussLaguerre::cached(128).integrate(integrand);
        let magnitude = crate::quadrature::GaussLaguerre::cached(128).integrate(|t| {
            dist.generating_function_magnitude(sigma * t)
                .unwrap_or(f64::INFINITY)
        });
        let rounding = f64::EPSILON * magnitude * probs.len() as f64;
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(rounding <= CUSTOM_ROUNDING_TOL) || (lo - hi).abs() > CUSTOM_ROUNDING_TOL {
            return Err(Error::Precision(format!(
                "generating function too ill-conditioned at this intensity (rounding bound {rounding:.3e}, rule difference {:.3e})",
                (lo - hi).abs()
            )));
        }
        crate::quadrature::Integral {
            value: hi,
            error_estimate: (lo - hi).abs() + rounding,
            method: crate::quadrature::IntegralMethod::GaussLaguerre,
        }
    } else {
        let feature = 1.0 / (sigma * dist.closed_form_mean()).abs();
        integrate_exp_weight(integrand, 2.0, RULE_TOL, feature)?
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(FluxResult {
        j_bar: s * integral.value,
        route: Route::Laplace,
        error_estimate: s.abs() * integral.error_estimate,
        cross_check: None,
    })
}

/// Expansion in normally ordered moments, S·Σ_k (−1)^{k−1} σ^k m_k.
///
/// Stops once a term falls below 1e-12 of the partial sum or at `k_max`. If
/// the terms grow three times in a row the series is asymptotic; it is then
/// truncated before its smallest term when that term is below 1e-8·|S|, and
/// rejected otherwise.
pub fn flux_series(
    p: &RefrigeratorParams,
    dist: &PhotonDistribution,
    k_max: u32,
) -> Result<FluxResult> {
    if k_max == 0 {
        return Err(Error::invalid("k_max", "need at least one term"));
    }
    let (s, sigma) = scales(p);
    if s == 0.0 || sigma == 0.0 {
        return Ok(FluxResult::exact(0.0, Route::Series));
    }
    let term = |k: u32| -> Result<f64> {
        let m = dist.factorial_moment(k)?;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        Ok(sign * s * sigma.powi(k as i32) * m)
    };

    let mut sum = crate::sum::CompensatedSum::default();
    let mut prev_mag = f64::INFINITY;
    let mut growing = 0;
    let mut best = (f64::INFINITY, 0.0);
    for k in 1..=k_max {
        let t = term(k)?;
        let mag = t.abs();
        if mag < best.0 {
            best = (mag, sum.value());
        }
        if mag > prev_mag {
            growing += 1;
            if growing == 3 {
                if best.0 <= ASYMPTOTIC_TOL * s.abs() {
                    return Ok(FluxResult {
                        j_bar: best.1,
                        route: Route::Series,
                        error_estimate: best.0,
                        cross_check: None,
                    });
                }
                return Err(Error::SeriesDivergent { terms: k as usize });
            }
        } else {
            growing = 0;
        }
        prev_mag = mag;
        sum.add(t);
        if mag < SERIES_TOL * sum.value().abs() || mag == 0.0 {
            return Ok(FluxResult {
                j_bar: sum.value(),
                route: Route::Series,
                error_estimate: term(k + 1)?.abs(),
                cross_check: None,
            });
        }
    }
    Ok(FluxResult {
        j_bar: sum.value(),
        route: Route::Series,
        error_estimate: term(k_max + 1)?.abs(),
        cross_check: None,
    })
}

/// Laplace value, cross-checked against quadrature (thermal light) or the
/// moment series (when it converges within 60 terms).
pub fn flux(p: &RefrigeratorParams, dist: &PhotonDistribution) -> Result<FluxResult> {
    let mut primary = flux_laplace(p, dist)?;
    let other = match dist.kind() {
        DistributionKind::Thermal(n) => Some(flux_quadrature_thermal(p, *n)?),
        // A truncated series is only a check if its own error is well inside
        // the tolerance.
        _ => flux_series(p, dist, DEFAULT_K_MAX).ok().filter(|r| {
            r.error_estimate <= 0.1 * CROSS_CHECK_TOL * primary.j_bar.abs().max(scales(p).0.abs())
        }),
    };
    if let Some(o) = other {
        let (s, _) = scales(p);
        let discrepancy = (primary.j_bar - o.j_bar).abs();
        let flagged = discrepancy >= CROSS_CHECK_TOL * primary.j_bar.abs().max(s.abs());
        if flagged {
            log::warn!(
                "{} and {} routes disagree by {discrepancy:.3e} for {:?}",
                primary.route.name(),
                o.route.name(),
                dist.kind()
            );
        }
        primary.cross_check = Some(CrossCheck {
            route: o.route,
            value: o.j_bar,
            discrepancy,
            flagged,
        });
    }
    Ok(primary)
}

/// Refrigeration status of an averaged flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoolingStatus {
    Cooling { cop: f64 },
    Inactive,
}

impl CoolingStatus {
    pub fn cop(self) -> Option<f64> {
        match self {
            CoolingStatus::Cooling { cop } => Some(cop),
            CoolingStatus::Inactive => None,
        }
    }
}

/// ω_c/(ω_h − ω_c) when J̄ > 0, otherwise [`CoolingStatus::Inactive`].
pub fn cop_from_average_flux(p: &RefrigeratorParams, j_bar: f64) -> CoolingStatus {
    if j_bar > 0.0 {
        CoolingStatus::Cooling {
            cop: crate::lindblad::cop(p),
        }
    } else {
        CoolingStatus::Inactive
    }
}
