//! Named cross-checks between closed forms and independent numerical routes.

use std::str::FromStr;
use std::time::Instant;

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::monte_carlo::monte_carlo_thermal_flux;
use super::report::{Metric, OracleReport};
use crate::driving::{flux, flux_laplace, flux_quadrature_thermal, flux_series, DEFAULT_K_MAX};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lindblad::state::max_abs;
use crate::lindblad::{
    build_liouvillian, coherent_flux, cop, evolve, flux_from_state, heat_currents_from_flux,
    heat_flows_from_state, steady_state_analytic, steady_state_numeric, work_cop, BranchDrive,
    DensityMatrix3, FluxCoefficients, C64,
};
use crate::model::{carnot_cop, occupation_to_temperature, planck_occupation, RefrigeratorParams};
use crate::photonstats::{z_minus, z_plus, PhotonDistribution, Statistic};
use crate::sweep::{single_status_flip, thermal_bath_scan, Grid};
use crate::thermalbath::{
    cooling_threshold, cop_bound_thermal, steady_populations_thermal, thermal_field_flux,
    thermal_field_flux_from_state, thermal_field_heat_currents, thermal_field_liouvillian,
    ThermalFieldParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPreset {
    #[default]
    Default,
    None,
}

impl FromStr for GridPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(GridPreset::Default),
            "none" => Ok(GridPreset::None),
            other => Err(Error::invalid(
                "grid",
                format!("unknown preset `{other}` (default|none)"),
            )),
        }
    }
}

/// Deliberate defects used to confirm that the suite detects errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Flip the sign of Γ2 in the closed-form branch flux.
    NegateGamma2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub preset: GridPreset,
    pub seed: u64,
    pub mutation: Option<Mutation>,
    pub execution: Execution,
    pub mc_samples: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            preset: GridPreset::Default,
            seed: 0,
            mutation: None,
            execution: Execution::Parallel,
            mc_samples: 1_000_000,
        }
    }
}

struct Ctx {
    cfg: SuiteConfig,
}

impl Ctx {
    /// Closed-form flux coefficients, with the configured mutation applied.
    fn coefficients(&self, p: &RefrigeratorParams) -> FluxCoefficients {
        let mut f = FluxCoefficients::new(p);
        if self.cfg.mutation == Some(Mutation::NegateGamma2) {
            f.c = -f.c;
        }
        f
    }

    fn closed_form_flux(&self, p: &RefrigeratorParams, n: f64) -> f64 {
        self.coefficients(p)
            .flux_at_intensity(p.xi0() * p.xi0() * n)
    }
}

type CheckFn = fn(&Ctx, &mut ChaCha8Rng) -> Result<OracleReport>;

fn rel(primary: f64, oracle: f64, tol: f64) -> OracleReport {
    OracleReport::compare("", primary, oracle, Metric::Relative, tol, 0)
}

fn abs(primary: f64, oracle: f64, tol: f64) -> OracleReport {
    OracleReport::compare("", primary, oracle, Metric::Absolute, tol, 0)
}

fn holds(ok: bool, margin: f64, note: impl Into<String>) -> OracleReport {
    OracleReport::property("", ok, margin, 0, note)
}

fn worst(reports: impl IntoIterator<Item = OracleReport>) -> OracleReport {
    let mut count = 0usize;
    let r = reports
        .into_iter()
        .inspect(|_| count += 1)
        .reduce(OracleReport::worst)
        .unwrap_or_else(|| holds(false, f64::NAN, "no grid points"));
    let note = match &r.note {
        Some(n) => format!("{n}; worst of {count} points"),
        None => format!("worst of {count} points"),
    };
    r.with_note(note)
}

/// γ = 1, κ = 0, n̄ ∈ [0, 3], Δ ∈ [−5, 5], ξ0 ∈ [0.1, 3].
fn random_branch_params(rng: &mut ChaCha8Rng) -> RefrigeratorParams {
    RefrigeratorParams::builder()
        .gamma(1.0)
        .kappa(0.0)
        .nbar_c(rng.random_range(0.0..3.0))
        .nbar_h(rng.random_range(0.0..3.0))
        .delta(rng.random_range(-5.0..5.0))
        .xi0(rng.random_range(0.1..3.0))
        .build()
        .expect("sampled parameters are valid")
}

fn random_frequencies(rng: &mut ChaCha8Rng, p: RefrigeratorParams) -> RefrigeratorParams {
    let wc = rng.random_range(0.2..3.0);
    let wh = wc + rng.random_range(0.1..3.0);
    p.with_frequencies(wc, wh).expect("ordered frequencies")
}

fn fig2_caption() -> RefrigeratorParams {
    RefrigeratorParams::default()
        .with_occupations(0.5, 1.0)
        .expect("valid")
}

fn random_built_in(rng: &mut ChaCha8Rng, mean: f64) -> Result<PhotonDistribution> {
    let stat = Statistic::BUILT_IN[rng.random_range(0..4)];
    PhotonDistribution::with_mean(stat, mean)
}

// --- model ---------------------------------------------------------------

fn bisect_temperature(omega: f64, nbar: f64) -> f64 {
    let (mut lo, mut hi) = (1e-6f64, 1e6f64);
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        if planck_occupation(omega, mid).unwrap_or(0.0) < nbar {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

fn model_planck_bisection(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let n = planck_occupation(2.0, 1.7)?;
    Ok(rel(1.7, bisect_temperature(2.0, n), 1e-12))
}

fn model_inverse_bisection(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    Ok(rel(
        occupation_to_temperature(3.0, 0.01)?,
        bisect_temperature(3.0, 0.01),
        1e-12,
    ))
}

fn model_round_trip_grid(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..1000 {
        let w = rng.random_range(0.01..10.0);
        let t = rng.random_range(0.05..20.0);
        let n = planck_occupation(w, t)?;
        out.push(rel(
            planck_occupation(w, occupation_to_temperature(w, n)?)?,
            n,
            1e-12,
        ));
    }
    Ok(worst(out))
}

// --- lindblad ------------------------------------------------------------

fn null_space_flux(p: &RefrigeratorParams, d: &BranchDrive) -> Result<f64> {
    let rho = steady_state_numeric(&build_liouvillian(p, d))?;
    Ok(flux_from_state(p, d, &rho.observables()))
}

fn lindblad_null_space_point(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let p = RefrigeratorParams::default();
    Ok(rel(
        ctx.closed_form_flux(&p, 10.0),
        null_space_flux(&p, &BranchDrive::photons(10.0)?)?,
        1e-8,
    ))
}

fn lindblad_null_space_grid(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..200 {
        let p = random_branch_params(rng);
        let n = rng.random_range(0.0..100.0);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let d = BranchDrive::new(n, phase)?;
        out.push(rel(
            ctx.closed_form_flux(&p, n),
            null_space_flux(&p, &d)?,
            1e-8,
        ));
    }
    Ok(worst(out))
}

fn lindblad_populations_grid(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..200 {
        let p = random_branch_params(rng);
        let d = BranchDrive::new(
            rng.random_range(0.0..100.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        )?;
        let a = steady_state_analytic(&p, &d)?;
        let n = steady_state_numeric(&build_liouvillian(&p, &d))?.observables();
        out.push(rel(n.pop_1, a.pop_1, 1e-9));
        out.push(rel(n.pop_2, a.pop_2, 1e-9));
        let tau = (n.tau_e_plus - a.tau_e_plus).norm() / a.tau_e_plus.norm().max(f64::MIN_POSITIVE);
        out.push(abs(tau, 0.0, 1e-9).with_note("relative coherence deviation"));
    }
    Ok(worst(out))
}

fn lindblad_analytic_residual(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..50 {
        let p = random_branch_params(rng);
        let d = BranchDrive::new(
            rng.random_range(0.0..100.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        )?;
        let a = steady_state_analytic(&p, &d)?;
        let mut m = Matrix3::from_diagonal(&nalgebra::Vector3::new(
            C64::from(a.pop_g),
            C64::from(a.pop_1),
            C64::from(a.pop_2),
        ));
        m[(1, 2)] = a.tau_e_plus;
        m[(2, 1)] = a.tau_e_plus.conj();
        let rho = DensityMatrix3::new(m)?;
        out.push(abs(build_liouvillian(&p, &d).residual(&rho), 0.0, 1e-10));
    }
    Ok(worst(out))
}

fn lindblad_evolve(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for &(t, tol) in &[(50.0, 1e-6), (200.0, 1e-7)] {
        let p = RefrigeratorParams::builder()
            .nbar_c(rng.random_range(0.2..2.0))
            .nbar_h(rng.random_range(0.2..2.0))
            .delta(rng.random_range(-2.0..2.0))
            .kappa(rng.random_range(0.0..0.3))
            .build()?;
        let d = BranchDrive::new(
            rng.random_range(0.5..20.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        )?;
        let ss = steady_state_numeric(&build_liouvillian(&p, &d))?;
        let e = evolve(
            &p,
            &d,
            &DensityMatrix3::maximally_mixed(),
            t / p.gamma(),
            None,
        )?;
        out.push(abs(e.distance(&ss), 0.0, tol));
    }
    Ok(worst(out))
}

fn lindblad_heat_two_route(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..50 {
        let p = random_branch_params(rng);
        let p = random_frequencies(rng, p);
        let n = rng.random_range(0.0..100.0);
        let d = BranchDrive::photons(n)?;
        let s = steady_state_numeric(&build_liouvillian(&p, &d))?.observables();
        let a = heat_flows_from_state(&p, &d, &s);
        let b = heat_currents_from_flux(&p, coherent_flux(&p, n));
        let scale = b.q_h.abs().max(f64::MIN_POSITIVE);
        for (x, y) in [(a.q_h, b.q_h), (a.q_c, b.q_c), (a.q_e, b.q_e)] {
            out.push(abs((x - y) / scale, 0.0, 1e-9).with_note("deviation relative to |Q_h|"));
        }
    }
    Ok(worst(out))
}

fn finite_kappa_state(
    rng: &mut ChaCha8Rng,
) -> Result<(
    RefrigeratorParams,
    BranchDrive,
    crate::lindblad::SteadyObservables,
)> {
    let p = RefrigeratorParams::builder()
        .kappa(0.1)
        .nbar_c(rng.random_range(0.8..2.0))
        .nbar_h(rng.random_range(0.0..0.5))
        .delta(rng.random_range(-1.0..1.0))
        .build()?;
    let p = random_frequencies(rng, p);
    let d = BranchDrive::photons(rng.random_range(1.0..50.0))?;
    let s = steady_state_numeric(&build_liouvillian(&p, &d))?.observables();
    Ok((p, d, s))
}

fn lindblad_finite_kappa_closure(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let (p, d, s) = finite_kappa_state(rng)?;
        out.push(abs(heat_flows_from_state(&p, &d, &s).total(), 0.0, 1e-11));
    }
    Ok(worst(out))
}

fn lindblad_finite_kappa_cop(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let (p, d, s) = finite_kappa_state(rng)?;
        let ideal = cop(&p);
        let r = match work_cop(&p, &d, &s) {
            Some(w) => holds(w < ideal, ideal - w, "ideal COP minus work-based COP"),
            None => holds(false, f64::NAN, "machine not cooling"),
        };
        out.push(r);
    }
    Ok(worst(out))
}

fn lindblad_finite_kappa_bath_ratio(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let (p, d, s) = finite_kappa_state(rng)?;
        let h = heat_flows_from_state(&p, &d, &s);
        let ratio = h.q_c.abs() / (h.q_h.abs() - h.q_c.abs());
        out.push(rel(ratio, cop(&p), 1e-9));
    }
    Ok(worst(out))
}

fn lindblad_carnot_backsolve(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    while out.len() < 100 {
        let nh = rng.random_range(0.01..3.0);
        let nc = nh + rng.random_range(0.0..3.0);
        let p = random_frequencies(rng, RefrigeratorParams::default().with_occupations(nc, nh)?);
        let tc = occupation_to_temperature(p.omega_c(), nc)?;
        let th = occupation_to_temperature(p.omega_h(), nh)?;
        if th <= tc {
            continue;
        }
        let bound = carnot_cop(tc, th)?;
        let e = cop(&p);
        out.push(holds(
            e <= bound * (1.0 + 1e-12),
            bound - e,
            "Carnot bound minus COP",
        ));
    }
    Ok(worst(out))
}

fn lindblad_saturation(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let p = random_branch_params(rng);
        if (p.nbar_c() - p.nbar_h()).abs() < 1e-3 {
            continue;
        }
        let g = p.gamma();
        let expected =
            g * g * (p.nbar_c() - p.nbar_h()) / (g * (2.0 + 3.0 * p.nbar_c() + 3.0 * p.nbar_h()));
        // Far enough out that the approach (∝ 1/x) is below the tolerance.
        let x = 1e3 * ctx.coefficients(&p).b.abs().max(1.0);
        let n = (1e6f64).max(x / (p.xi0() * p.xi0()));
        out.push(rel(ctx.closed_form_flux(&p, n), expected, 1e-3));
    }
    Ok(worst(out))
}

fn lindblad_linear_regime(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let p = random_branch_params(rng);
        let f = ctx.coefficients(&p);
        if f.a.abs() < 1e-3 {
            continue;
        }
        let h = 1e-5 * f.b / f.c.abs();
        let slope = (f.a * h / (f.b + f.c * h) - f.a * -h / (f.b - f.c * h)) / (2.0 * h);
        out.push(rel(slope, f.a / f.b, 1e-6));
    }
    Ok(worst(out))
}

fn lindblad_phase_independence(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let p = random_branch_params(rng);
        let n = rng.random_range(0.0..100.0);
        let reference = flux_from_state(
            &p,
            &BranchDrive::new(n, 0.0)?,
            &steady_state_analytic(&p, &BranchDrive::new(n, 0.0)?)?,
        );
        for k in 1..8 {
            let d = BranchDrive::new(n, k as f64 * std::f64::consts::TAU / 8.0)?;
            let j = flux_from_state(&p, &d, &steady_state_analytic(&p, &d)?);
            out.push(abs(j, reference, 1e-14));
        }
    }
    Ok(worst(out))
}

fn lindblad_trace_hermiticity(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..50 {
        let p = RefrigeratorParams::builder()
            .kappa(rng.random_range(0.0..1.0))
            .build()
            .map(|q| random_frequencies(rng, q))?;
        let p = p
            .with_occupations(rng.random_range(0.0..3.0), rng.random_range(0.0..3.0))?
            .with_delta(rng.random_range(-5.0..5.0))?
            .with_xi0(rng.random_range(0.1..3.0))?;
        let d = BranchDrive::new(
            rng.random_range(0.0..100.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        )?;
        let l = build_liouvillian(&p, &d);
        let mut x = Matrix3::from_fn(|_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        x = (x + x.adjoint()) * C64::from(0.5);
        let y = l.apply(&x);
        out.push(abs(y.trace().norm(), 0.0, 1e-13).with_note("trace of L(X)"));
        out.push(
            abs(max_abs(&(y - y.adjoint())), 0.0, 1e-13).with_note("anti-Hermitian part of L(X)"),
        );
    }
    Ok(worst(out))
}

// --- photonstats ---------------------------------------------------------

fn photon_z_minus_series(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..60 {
        sum += term;
        term *= 4.0 / ((2 * n + 1) as f64 * (2 * n + 2) as f64);
    }
    Ok(rel(z_minus(4.0), sum, 1e-14))
}

fn photon_z_plus_series(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut term = 0.5;
    let mut sum = 0.0;
    for n in 0..200 {
        sum += term;
        term *= 1e-5 / (n as f64 + 3.0);
    }
    Ok(rel(z_plus(1e-5), sum, 1e-14))
}

fn photon_moment_brute_force(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let lambda = 9.0;
    let mut w = vec![1.0f64];
    for n in 0..400 {
        let last = w[n];
        w.push(last * lambda / ((2 * n + 1) as f64 * (2 * n + 2) as f64));
    }
    let z: f64 = w.iter().sum();
    let d = PhotonDistribution::sub_poisson(lambda)?;
    let mut out = Vec::new();
    for k in 1..=5u32 {
        let brute: f64 = w
            .iter()
            .enumerate()
            .map(|(n, wn)| {
                wn / z
                    * (0..k)
                        .map(|i| (n as f64 - i as f64).max(0.0))
                        .product::<f64>()
            })
            .sum();
        out.push(rel(d.factorial_moment(k)?, brute, 1e-12));
    }
    Ok(worst(out))
}

fn photon_generating_function(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    let mut dists = vec![
        PhotonDistribution::coherent(4.0)?,
        PhotonDistribution::thermal(1.5)?,
        PhotonDistribution::sub_poisson(9.0)?,
        PhotonDistribution::super_poisson(9.0)?,
    ];
    for _ in 0..5 {
        dists.push(PhotonDistribution::coherent(rng.random_range(0.1..20.0))?);
        // The thermal sum at s = −0.5 needs n̄ < 2.
        dists.push(PhotonDistribution::thermal(rng.random_range(0.1..1.9))?);
        dists.push(PhotonDistribution::sub_poisson(
            rng.random_range(0.1..200.0),
        )?);
        dists.push(PhotonDistribution::super_poisson(
            rng.random_range(0.1..30.0),
        )?);
    }
    for d in &dists {
        for s in [-0.5, 0.0, 0.3, 1.0, 1.7] {
            let direct = d.generating_function_direct(s)?;
            let scale = direct.abs().max(1.0);
            out.push(
                abs(d.generating_function(s)? / scale, direct / scale, 1e-10)
                    .with_note("discrepancy in units of max(1, |F|)"),
            );
        }
    }
    Ok(worst(out))
}

fn photon_g2_thermal(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let d = PhotonDistribution::thermal(rng.random_range(0.01..100.0))?;
        out.push(rel(d.gk(2)?, 2.0, 1e-12));
        let summed = d.factorial_moment_direct(2)? / d.factorial_moment_direct(1)?.powi(2);
        out.push(rel(summed, 2.0, 1e-12).with_note("table sums"));
    }
    Ok(worst(out))
}

fn photon_g2_coherent(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let d = PhotonDistribution::coherent(rng.random_range(0.01..100.0))?;
        for k in 2..=4 {
            out.push(abs(d.gk(k)?, 1.0, 0.0));
            let summed =
                d.factorial_moment_direct(k)? / d.factorial_moment_direct(1)?.powi(k as i32);
            out.push(rel(summed, 1.0, 1e-12).with_note("table sums"));
        }
    }
    Ok(worst(out))
}

fn photon_mandel_sign(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for lambda in Grid::logarithmic(0.5, 100.0, 40)?.values() {
        let qs = PhotonDistribution::sub_poisson(lambda)?.mandel_q()?;
        let qp = PhotonDistribution::super_poisson(lambda)?.mandel_q()?;
        out.push(holds(qs < 0.0, -qs, "sub-Poissonian −Q"));
        out.push(holds(qp > 0.0, qp, "super-Poissonian Q"));
    }
    Ok(worst(out))
}

fn photon_g2_ordering(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for mean in Grid::logarithmic(1.0, 50.0, 20)?.values() {
        let sub = PhotonDistribution::with_mean(Statistic::SubPoisson, mean)?.gk(2)?;
        let sup = PhotonDistribution::with_mean(Statistic::SuperPoisson, mean)?.gk(2)?;
        let th = PhotonDistribution::thermal(mean)?.gk(2)?;
        let margin = (1.0 - sub).min(sup - 1.0).min(th - sup);
        out.push(holds(
            sub < 1.0 && 1.0 < sup && sup <= th,
            margin,
            "smallest g2 gap",
        ));
    }
    Ok(worst(out))
}

fn photon_g2_large_mean(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let g = |s, m| PhotonDistribution::with_mean(s, m).and_then(|d| d.gk(2));
    let (s2, s3) = (
        g(Statistic::SubPoisson, 1e2)?,
        g(Statistic::SubPoisson, 1e3)?,
    );
    let (p2, p3) = (
        g(Statistic::SuperPoisson, 1e2)?,
        g(Statistic::SuperPoisson, 1e3)?,
    );
    let ok = s2 < s3 && s3 < 1.0 && 1.0 < p3 && p3 < p2;
    Ok(holds(
        ok,
        (1.0 - s3).max(p3 - 1.0),
        "largest |g2 − 1| at mean 1e3",
    ))
}

// --- driving -------------------------------------------------------------

fn driving_coherent_laplace(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..50 {
        let p = random_branch_params(rng);
        let n = 10f64.powf(rng.random_range(-2.0..3.0));
        let l = flux_laplace(&p, &PhotonDistribution::coherent(n)?)?.j_bar;
        out.push(rel(l, ctx.closed_form_flux(&p, n), 1e-9));
    }
    Ok(worst(out))
}

fn driving_thermal_quadrature_fig2(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let p = fig2_caption();
    let q = flux_quadrature_thermal(&p, 10.0)?.j_bar;
    let l = flux_laplace(&p, &PhotonDistribution::thermal(10.0)?)?.j_bar;
    Ok(rel(l, q, 1e-8))
}

fn saturation(p: &RefrigeratorParams) -> f64 {
    FluxCoefficients::new(p).saturation()
}

fn scaled(a: f64, b: f64, s: f64) -> OracleReport {
    abs(a / s.abs(), b / s.abs(), 1e-7).with_note("discrepancy in units of the saturation flux")
}

fn random_cooling_params(rng: &mut ChaCha8Rng) -> RefrigeratorParams {
    loop {
        let p = random_branch_params(rng);
        if (p.nbar_c() - p.nbar_h()).abs() > 0.05 {
            return p;
        }
    }
}

fn driving_triangle_laplace_quadrature(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..50 {
        let p = random_cooling_params(rng);
        let n = 10f64.powf(rng.random_range(-2.0..2.0));
        let q = flux_quadrature_thermal(&p, n)?.j_bar;
        let l = flux_laplace(&p, &PhotonDistribution::thermal(n)?)?.j_bar;
        out.push(scaled(l, q, saturation(&p)));
    }
    Ok(worst(out))
}

/// Mean photon number at which σ·n̄ equals `target`.
fn mean_for_scale(p: &RefrigeratorParams, target: f64) -> f64 {
    let f = FluxCoefficients::new(p);
    target / (p.xi0() * p.xi0() * f.c / f.b)
}

fn driving_triangle_laplace_series(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    let mut skipped = 0;
    while out.len() < 50 {
        let p = random_cooling_params(rng);
        let mean = mean_for_scale(&p, rng.random_range(1e-3..0.3));
        let d = random_built_in(rng, mean)?;
        match flux_series(&p, &d, DEFAULT_K_MAX) {
            Ok(s) => out.push(scaled(flux_laplace(&p, &d)?.j_bar, s.j_bar, saturation(&p))),
            Err(Error::SeriesDivergent { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let r = worst(out);
    let note = format!(
        "{}; {skipped} divergent points skipped",
        r.note.clone().unwrap_or_default()
    );
    Ok(r.with_note(note))
}

fn driving_triangle_quadrature_series(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    let mut skipped = 0;
    while out.len() < 50 {
        let p = random_cooling_params(rng);
        let n = mean_for_scale(&p, rng.random_range(1e-3..0.04));
        match flux_series(&p, &PhotonDistribution::thermal(n)?, DEFAULT_K_MAX) {
            Ok(s) => out.push(scaled(
                flux_quadrature_thermal(&p, n)?.j_bar,
                s.j_bar,
                saturation(&p),
            )),
            Err(Error::SeriesDivergent { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let r = worst(out);
    let note = format!(
        "{}; {skipped} divergent points skipped",
        r.note.clone().unwrap_or_default()
    );
    Ok(r.with_note(note))
}

fn driving_series_low_thermal(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let p = RefrigeratorParams::default();
    let d = PhotonDistribution::thermal(0.1)?;
    Ok(rel(
        flux_series(&p, &d, DEFAULT_K_MAX)?.j_bar,
        flux_laplace(&p, &d)?.j_bar,
        1e-8,
    ))
}

fn four_fluxes(p: &RefrigeratorParams, mean: f64) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (slot, stat) in out.iter_mut().zip(Statistic::BUILT_IN) {
        *slot = flux(p, &PhotonDistribution::with_mean(stat, mean)?)?
            .j_bar
            .abs();
    }
    Ok(out)
}

fn ordering_report(p: &RefrigeratorParams, means: &[f64]) -> Result<Vec<OracleReport>> {
    means
        .iter()
        .map(|&m| {
            let [sub, coh, sup, th] = four_fluxes(p, m)?;
            let margin = (sub - coh).min(coh - sup).min(sup - th);
            Ok(holds(
                margin >= 0.0,
                margin,
                "smallest |J| gap sub ≥ coh ≥ super ≥ thermal",
            ))
        })
        .collect()
}

fn driving_ordering_means(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let means = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0];
    let mut out = ordering_report(&fig2_caption(), &means)?;
    out.extend(ordering_report(&RefrigeratorParams::default(), &means)?);
    Ok(worst(out))
}

fn driving_ordering_log_grid(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let means = Grid::logarithmic(0.1, 100.0, 30)?.values();
    let mut out = ordering_report(&fig2_caption(), &means)?;
    out.extend(ordering_report(&RefrigeratorParams::default(), &means)?);
    Ok(worst(out))
}

fn driving_high_intensity(_: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let p = fig2_caption();
    let means = Grid::logarithmic(10.0, 1000.0, 15)?.values();
    let gaps: Vec<[f64; 3]> = means
        .iter()
        .map(|&m| {
            let [sub, coh, sup, th] = four_fluxes(&p, m)?;
            Ok([(sub - coh) / coh, (coh - sup) / coh, (coh - th) / coh])
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for w in gaps.windows(2) {
        out.push(holds(
            w[1][0] < w[0][0],
            w[0][0] - w[1][0],
            "decrease of the sub gap",
        ));
        out.push(holds(
            w[1][1] < w[0][1],
            w[0][1] - w[1][1],
            "decrease of the super gap",
        ));
    }
    let at100 = four_fluxes(&p, 100.0)?;
    let th_gap = at100[1] - at100[3];
    let sup_gap = at100[1] - at100[2];
    out.push(holds(
        th_gap > 10.0 * sup_gap,
        th_gap - 10.0 * sup_gap,
        "thermal gap minus 10× super gap at mean 100",
    ));
    Ok(worst(out))
}

fn driving_cop_universality(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..30 {
        let p = random_cooling_params(rng);
        let p = random_frequencies(rng, p);
        let mean = 10f64.powf(rng.random_range(-1.0..2.0));
        for stat in Statistic::BUILT_IN {
            let h = flux(&p, &PhotonDistribution::with_mean(stat, mean)?)?.heat_currents(&p);
            if h.j > 0.0 {
                out.push(rel(
                    h.q_c.abs() / (h.q_h.abs() - h.q_c.abs()),
                    cop(&p),
                    1e-12,
                ));
            }
        }
    }
    Ok(worst(out))
}

fn driving_energy_closure(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..30 {
        let p = random_branch_params(rng);
        let p = random_frequencies(rng, p);
        let mean = 10f64.powf(rng.random_range(-1.0..2.0));
        for stat in Statistic::BUILT_IN {
            let h = flux(&p, &PhotonDistribution::with_mean(stat, mean)?)?.heat_currents(&p);
            out.push(abs(h.total(), 0.0, 1e-13));
        }
    }
    Ok(worst(out))
}

fn driving_saturation_bound(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..50 {
        let p = random_cooling_params(rng);
        let mean = 10f64.powf(rng.random_range(-2.0..3.0));
        let d = random_built_in(rng, mean)?;
        let j = flux(&p, &d)?.j_bar;
        let s = saturation(&p);
        out.push(holds(j.abs() < s.abs(), s.abs() - j.abs(), "|S| − |J̄|"));
    }
    Ok(worst(out))
}

// --- thermalbath ---------------------------------------------------------

fn random_field(rng: &mut ChaCha8Rng) -> Result<ThermalFieldParams> {
    let base = RefrigeratorParams::builder()
        .kappa(rng.random_range(0.01..2.0))
        .nbar_c(rng.random_range(0.0..3.0))
        .nbar_h(rng.random_range(0.0..3.0))
        .build()
        .map(|p| random_frequencies(rng, p))?;
    ThermalFieldParams::new(base, rng.random_range(0.0..10.0))
}

fn bath_populations_route(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let base = RefrigeratorParams::default().with_kappa(0.2)?;
    let mut fields = vec![ThermalFieldParams::new(base, 5.0)?];
    for _ in 0..50 {
        fields.push(random_field(rng)?);
    }
    let out = fields.iter().map(|f| {
        let j = thermal_field_flux(f);
        abs(
            thermal_field_flux_from_state(f, &steady_populations_thermal(f)),
            j,
            1e-10 * j.abs().max(1e-3),
        )
        .with_note("tolerance 1e-10 relative, floor 1e-13")
    });
    Ok(worst(out.collect::<Vec<_>>()))
}

fn bath_flux_null_space(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..100 {
        let f = random_field(rng)?;
        let s = steady_state_numeric(&thermal_field_liouvillian(&f))?.observables();
        let j = thermal_field_flux(&f);
        out.push(rel(thermal_field_flux_from_state(&f, &s), j, 1e-9));
    }
    Ok(worst(out))
}

fn bath_populations_null_space(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..100 {
        let f = random_field(rng)?;
        let n = steady_state_numeric(&thermal_field_liouvillian(&f))?.observables();
        let a = steady_populations_thermal(&f);
        out.push(abs(n.pop_1, a.pop_1, 1e-10));
        out.push(abs(n.pop_2, a.pop_2, 1e-10));
    }
    Ok(worst(out))
}

fn bath_threshold_temperature_form(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    while out.len() < 100 {
        let nh = rng.random_range(0.01..3.0);
        let nc = nh + rng.random_range(0.01..3.0);
        let p = random_frequencies(rng, RefrigeratorParams::default().with_occupations(nc, nh)?);
        let ne = cooling_threshold(nc, nh).expect("n̄_c > n̄_h");
        let tc = occupation_to_temperature(p.omega_c(), nc)?;
        let th = occupation_to_temperature(p.omega_h(), nh)?;
        let te = occupation_to_temperature(p.drive_frequency(), ne)?;
        let lhs = p.omega_c() / tc + p.drive_frequency() / te;
        out.push(rel(lhs, p.omega_h() / th, 1e-9));
    }
    Ok(worst(out))
}

fn bath_scan_flip(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..20 {
        let nh = rng.random_range(0.0..2.0);
        let nc = nh + rng.random_range(0.05..2.0);
        let p = RefrigeratorParams::default()
            .with_occupations(nc, nh)?
            .with_kappa(rng.random_range(0.01..1.0))?;
        let th = cooling_threshold(nc, nh).expect("n̄_c > n̄_h");
        let grid = Grid::linear(0.0, 3.0 * th + 1.0, 97)?;
        let step = (3.0 * th + 1.0) / 96.0;
        let rows = thermal_bath_scan(&p, &grid, ctx.cfg.execution)?;
        out.push(match single_status_flip(&rows) {
            Some(i) => {
                let lo = rows[i - 1].nbar_e;
                let hi = rows[i].nbar_e;
                let located = 0.5 * (lo + hi);
                abs(located, th, step)
                    .with_note("flip midpoint vs threshold, tolerance one grid step")
            }
            None => holds(false, f64::NAN, "status did not flip exactly once"),
        });
    }
    Ok(worst(out))
}

fn bath_sign_flip(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..50 {
        let nh = rng.random_range(0.01..2.0);
        let nc = nh + rng.random_range(0.05..2.0);
        let base = RefrigeratorParams::default()
            .with_occupations(nc, nh)?
            .with_kappa(rng.random_range(0.01..1.0))?;
        let th = cooling_threshold(nc, nh).expect("n̄_c > n̄_h");
        let below = thermal_field_flux(&ThermalFieldParams::new(base, th * (1.0 - 1e-6))?);
        let above = thermal_field_flux(&ThermalFieldParams::new(base, th * (1.0 + 1e-6))?);
        out.push(holds(
            below < 0.0 && above > 0.0,
            above.min(-below),
            "smaller |J′| beside the threshold",
        ));
    }
    Ok(worst(out))
}

fn bath_cop_bound(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < 100 && attempts < 100_000 {
        attempts += 1;
        let tc = rng.random_range(0.1..5.0);
        let th = tc + rng.random_range(0.01..5.0);
        let te = th + rng.random_range(0.0..50.0);
        let wc = rng.random_range(0.1..3.0);
        let wh = wc + rng.random_range(0.05..3.0);
        if wc / tc + (wh - wc) / te > wh / th {
            continue;
        }
        let e = wc / (wh - wc);
        let bound = cop_bound_thermal(tc, th, te)?;
        out.push(holds(
            e <= bound * (1.0 + 1e-12),
            bound - e,
            "bound minus COP",
        ));
    }
    Ok(worst(out))
}

fn bath_energy_closure(_: &Ctx, rng: &mut ChaCha8Rng) -> Result<OracleReport> {
    let mut out = Vec::new();
    for _ in 0..100 {
        out.push(abs(
            thermal_field_heat_currents(&random_field(rng)?).total(),
            0.0,
            1e-14,
        ));
    }
    Ok(worst(out))
}

// --- oracle --------------------------------------------------------------

fn oracle_monte_carlo(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let p = fig2_caption();
    let q = flux_quadrature_thermal(&p, 10.0)?.j_bar;
    let mc = monte_carlo_thermal_flux(
        &p,
        10.0,
        ctx.cfg.mc_samples,
        ctx.cfg.seed,
        ctx.cfg.execution,
    )?;
    Ok(abs(mc.mean, q, 4.0 * mc.std_error).with_note(format!(
        "{} samples, standard error {:.3e}",
        mc.samples, mc.std_error
    )))
}

fn oracle_monte_carlo_determinism(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<OracleReport> {
    let p = fig2_caption();
    let a = monte_carlo_thermal_flux(&p, 3.0, 20_000, ctx.cfg.seed, Execution::Sequential)?;
    let b = monte_carlo_thermal_flux(&p, 3.0, 20_000, ctx.cfg.seed, Execution::Parallel)?;
    Ok(abs(a.mean, b.mean, 0.0).with_note("sequential vs parallel, same seed"))
}

const CHECKS: &[(&str, CheckFn)] = &[
    ("model.planck_occupation.bisection", model_planck_bisection),
    (
        "model.occupation_to_temperature.bisection",
        model_inverse_bisection,
    ),
    (
        "model.occupation_to_temperature.round_trip_grid",
        model_round_trip_grid,
    ),
    (
        "lindblad.coherent_flux.null_space",
        lindblad_null_space_point,
    ),
    (
        "lindblad.coherent_flux.null_space_grid",
        lindblad_null_space_grid,
    ),
    ("lindblad.coherent_flux.saturation", lindblad_saturation),
    (
        "lindblad.coherent_flux.linear_regime",
        lindblad_linear_regime,
    ),
    (
        "lindblad.coherent_flux.phase_independence",
        lindblad_phase_independence,
    ),
    (
        "lindblad.steady_state_analytic.null_space_grid",
        lindblad_populations_grid,
    ),
    (
        "lindblad.build_liouvillian.analytic_residual",
        lindblad_analytic_residual,
    ),
    (
        "lindblad.build_liouvillian.trace_hermiticity",
        lindblad_trace_hermiticity,
    ),
    ("lindblad.steady_state_numeric.evolve", lindblad_evolve),
    (
        "lindblad.heat_flows_from_state.two_route",
        lindblad_heat_two_route,
    ),
    (
        "lindblad.heat_flows_from_state.finite_kappa_closure",
        lindblad_finite_kappa_closure,
    ),
    (
        "lindblad.heat_flows_from_state.finite_kappa_work_cop",
        lindblad_finite_kappa_cop,
    ),
    (
        "lindblad.heat_flows_from_state.finite_kappa_bath_ratio",
        lindblad_finite_kappa_bath_ratio,
    ),
    ("lindblad.cop.carnot_backsolve", lindblad_carnot_backsolve),
    ("photonstats.z_minus.series", photon_z_minus_series),
    ("photonstats.z_plus.series", photon_z_plus_series),
    (
        "photonstats.factorial_moment.brute_force",
        photon_moment_brute_force,
    ),
    (
        "photonstats.generating_function.direct_sum",
        photon_generating_function,
    ),
    ("photonstats.gk.thermal_g2", photon_g2_thermal),
    ("photonstats.gk.coherent", photon_g2_coherent),
    ("photonstats.mandel_q.sign", photon_mandel_sign),
    ("photonstats.gk.g2_ordering", photon_g2_ordering),
    ("photonstats.gk.large_mean_limit", photon_g2_large_mean),
    (
        "driving.flux_laplace.coherent_closed_form",
        driving_coherent_laplace,
    ),
    (
        "driving.flux_quadrature_thermal.laplace",
        driving_thermal_quadrature_fig2,
    ),
    (
        "driving.route_triangle.laplace_quadrature",
        driving_triangle_laplace_quadrature,
    ),
    (
        "driving.route_triangle.laplace_series",
        driving_triangle_laplace_series,
    ),
    (
        "driving.route_triangle.quadrature_series",
        driving_triangle_quadrature_series,
    ),
    (
        "driving.flux_series.thermal_low_intensity",
        driving_series_low_thermal,
    ),
    ("driving.flux.ordering_equal_mean", driving_ordering_means),
    ("driving.flux.ordering_log_grid", driving_ordering_log_grid),
    (
        "driving.flux.high_intensity_convergence",
        driving_high_intensity,
    ),
    ("driving.flux.cop_universality", driving_cop_universality),
    ("driving.flux.energy_closure", driving_energy_closure),
    ("driving.flux.saturation_bound", driving_saturation_bound),
    (
        "thermalbath.thermal_field_flux.populations",
        bath_populations_route,
    ),
    (
        "thermalbath.thermal_field_flux.null_space",
        bath_flux_null_space,
    ),
    (
        "thermalbath.steady_populations_thermal.null_space",
        bath_populations_null_space,
    ),
    (
        "thermalbath.cooling_threshold.temperature_form",
        bath_threshold_temperature_form,
    ),
    ("thermalbath.cooling_threshold.scan", bath_scan_flip),
    ("thermalbath.thermal_field_flux.sign_flip", bath_sign_flip),
    ("thermalbath.cop_bound_thermal.dominates", bath_cop_bound),
    (
        "thermalbath.thermal_field_flux.energy_closure",
        bath_energy_closure,
    ),
    (
        "oracle.monte_carlo_thermal_flux.quadrature",
        oracle_monte_carlo,
    ),
    (
        "oracle.monte_carlo_thermal_flux.determinism",
        oracle_monte_carlo_determinism,
    ),
];

/// Names of all checks, in execution order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

/// Runs every check. Check i draws from ChaCha8 seeded with `cfg.seed` on
/// stream i, so reports depend only on the configuration. Failures and
/// errors are recorded, never short-circuited.
pub fn run_equivalence_suite(cfg: &SuiteConfig) -> Vec<OracleReport> {
    if cfg.preset == GridPreset::None {
        return Vec::new();
    }
    let ctx = Ctx { cfg: *cfg };
    cfg.execution.map_range(CHECKS.len(), |i| {
        let (name, check) = CHECKS[i];
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let started = Instant::now();
        let mut report = check(&ctx, &mut rng).unwrap_or_else(|e| {
            OracleReport::property("", false, f64::NAN, 0, format!("error: {e}"))
        });
        log::debug!("{name}: {:?}", started.elapsed());
        report.check = name.to_string();
        report.seed = cfg.seed;
        report
    })
}

/// True when every report passed.
pub fn all_passed(reports: &[OracleReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
