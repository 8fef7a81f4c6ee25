//! Parameters of the three-level machine, heat-current bookkeeping and
//! Planck-law conversions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Rates, frequencies and bath occupations of the refrigerator.
///
/// Fields are private so that every instance satisfies the invariants checked
/// by [`RefrigeratorParams::new`]. Use the `with_*` methods to derive
/// modified copies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct RefrigeratorParams {
    omega_c: f64,
    omega_h: f64,
    gamma: f64,
    kappa: f64,
    delta: f64,
    xi0: f64,
    nbar_c: f64,
    nbar_h: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    omega_c: f64,
    omega_h: f64,
    gamma: f64,
    kappa: f64,
    delta: f64,
    xi0: f64,
    nbar_c: f64,
    nbar_h: f64,
}

impl TryFrom<RawParams> for RefrigeratorParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        Self::builder()
            .omega_c(r.omega_c)
            .omega_h(r.omega_h)
            .gamma(r.gamma)
            .kappa(r.kappa)
            .delta(r.delta)
            .xi0(r.xi0)
            .nbar_c(r.nbar_c)
            .nbar_h(r.nbar_h)
            .build()
    }
}

impl From<RefrigeratorParams> for RawParams {
    fn from(p: RefrigeratorParams) -> Self {
        RawParams {
            omega_c: p.omega_c,
            omega_h: p.omega_h,
            gamma: p.gamma,
            kappa: p.kappa,
            delta: p.delta,
            xi0: p.xi0,
            nbar_c: p.nbar_c,
            nbar_h: p.nbar_h,
        }
    }
}

impl Default for RefrigeratorParams {
    /// γ = 1, κ = 0, Δ = 0, ξ0 = 1.1, ω_c = 1, ω_h = 2, n̄_c = 1, n̄_h = 0.5.
    fn default() -> Self {
        RefrigeratorParams {
            omega_c: 1.0,
            omega_h: 2.0,
            gamma: 1.0,
            kappa: 0.0,
            delta: 0.0,
            xi0: 1.1,
            nbar_c: 1.0,
            nbar_h: 0.5,
        }
    }
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {v}")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<f64> {
    finite(name, v)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be >= 0, got {v}")))
    }
}

impl RefrigeratorParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega_c: f64,
        omega_h: f64,
        gamma: f64,
        kappa: f64,
        delta: f64,
        xi0: f64,
        nbar_c: f64,
        nbar_h: f64,
    ) -> Result<Self> {
        finite("omega_c", omega_c)?;
        finite("omega_h", omega_h)?;
        if omega_c <= 0.0 {
            return Err(Error::invalid(
                "omega_c",
                format!("must be > 0, got {omega_c}"),
            ));
        }
        if omega_h <= omega_c {
            return Err(Error::invalid(
                "omega_h",
                format!("must exceed omega_c = {omega_c}, got {omega_h}"),
            ));
        }
        finite("gamma", gamma)?;
        if gamma <= 0.0 {
            return Err(Error::invalid("gamma", format!("must be > 0, got {gamma}")));
        }
        Ok(RefrigeratorParams {
            omega_c,
            omega_h,
            gamma,
            kappa: non_negative("kappa", kappa)?,
            delta: finite("delta", delta)?,
            xi0: non_negative("xi0", xi0)?,
            nbar_c: non_negative("nbar_c", nbar_c)?,
            nbar_h: non_negative("nbar_h", nbar_h)?,
        })
    }

    pub fn builder() -> ParamsBuilder {
        ParamsBuilder(RefrigeratorParams::default())
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn omega_h(&self) -> f64 {
        self.omega_h
    }
    /// Frequency Ω = ω_h − ω_c of the driven |e1⟩ ↔ |e2⟩ transition.
    pub fn drive_frequency(&self) -> f64 {
        self.omega_h - self.omega_c
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn xi0(&self) -> f64 {
        self.xi0
    }
    pub fn nbar_c(&self) -> f64 {
        self.nbar_c
    }
    pub fn nbar_h(&self) -> f64 {
        self.nbar_h
    }

    fn rebuild(self) -> Result<Self> {
        Self::new(
            self.omega_c,
            self.omega_h,
            self.gamma,
            self.kappa,
            self.delta,
            self.xi0,
            self.nbar_c,
            self.nbar_h,
        )
    }

    pub fn with_frequencies(self, omega_c: f64, omega_h: f64) -> Result<Self> {
        RefrigeratorParams {
            omega_c,
            omega_h,
            ..self
        }
        .rebuild()
    }
    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        RefrigeratorParams { gamma, ..self }.rebuild()
    }
    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        RefrigeratorParams { kappa, ..self }.rebuild()
    }
    pub fn with_delta(self, delta: f64) -> Result<Self> {
        RefrigeratorParams { delta, ..self }.rebuild()
    }
    pub fn with_xi0(self, xi0: f64) -> Result<Self> {
        RefrigeratorParams { xi0, ..self }.rebuild()
    }
    pub fn with_occupations(self, nbar_c: f64, nbar_h: f64) -> Result<Self> {
        RefrigeratorParams {
            nbar_c,
            nbar_h,
            ..self
        }
        .rebuild()
    }
}

/// Incremental construction starting from [`RefrigeratorParams::default`].
#[derive(Debug, Clone, Copy)]
pub struct ParamsBuilder(RefrigeratorParams);

impl ParamsBuilder {
    pub fn omega_c(mut self, v: f64) -> Self {
        self.0.omega_c = v;
        self
    }
    pub fn omega_h(mut self, v: f64) -> Self {
        self.0.omega_h = v;
        self
    }
    pub fn gamma(mut self, v: f64) -> Self {
        self.0.gamma = v;
        self
    }
    pub fn kappa(mut self, v: f64) -> Self {
        self.0.kappa = v;
        self
    }
    pub fn delta(mut self, v: f64) -> Self {
        self.0.delta = v;
        self
    }
    pub fn xi0(mut self, v: f64) -> Self {
        self.0.xi0 = v;
        self
    }
    pub fn nbar_c(mut self, v: f64) -> Self {
        self.0.nbar_c = v;
        self
    }
    pub fn nbar_h(mut self, v: f64) -> Self {
        self.0.nbar_h = v;
        self
    }
    pub fn build(self) -> Result<RefrigeratorParams> {
        self.0.rebuild()
    }
}

/// Steady-state energy currents into the system and the population flux.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HeatCurrents {
    pub q_h: f64,
    pub q_c: f64,
    pub q_e: f64,
    pub j: f64,
}

impl HeatCurrents {
    pub fn total(&self) -> f64 {
        self.q_h + self.q_c + self.q_e
    }

    /// |Q_c| / (|Q_h| − |Q_c|), or `None` unless the machine is cooling.
    pub fn cop(&self) -> Option<f64> {
        (self.q_c > 0.0).then(|| self.q_c.abs() / (self.q_h.abs() - self.q_c.abs()))
    }
}

/// SI constants for converting dimensionless drive quantities to laboratory
/// units. Nothing else in the crate depends on these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiConversion {
    quantization_volume: f64,
    vacuum_permittivity: f64,
    speed_of_light: f64,
    drive_frequency_si: f64,
}

impl SiConversion {
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

    pub fn new(
        quantization_volume: f64,
        vacuum_permittivity: f64,
        speed_of_light: f64,
        drive_frequency_si: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("quantization_volume", quantization_volume),
            ("vacuum_permittivity", vacuum_permittivity),
            ("speed_of_light", speed_of_light),
            ("drive_frequency_si", drive_frequency_si),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        Ok(SiConversion {
            quantization_volume,
            vacuum_permittivity,
            speed_of_light,
            drive_frequency_si,
        })
    }

    /// Vacuum constants with the given volume (m³) and drive frequency (rad/s).
    pub fn vacuum(quantization_volume: f64, drive_frequency_si: f64) -> Result<Self> {
        Self::new(
            quantization_volume,
            Self::VACUUM_PERMITTIVITY,
            Self::SPEED_OF_LIGHT,
            drive_frequency_si,
        )
    }

    /// Poynting intensity (W/m²) carried by `mean_photons` in the quantization
    /// volume: I = (c/V)·n̄·ħω_d.
    pub fn intensity(&self, mean_photons: f64) -> f64 {
        self.speed_of_light / self.quantization_volume
            * mean_photons
            * HBAR
            * self.drive_frequency_si
    }

    /// Inverse of [`SiConversion::intensity`].
    pub fn mean_photons(&self, intensity: f64) -> f64 {
        intensity * self.quantization_volume
            / (self.speed_of_light * HBAR * self.drive_frequency_si)
    }

    /// Single-photon coupling ξ0 = ℘·√(2ħω_d/(ε0V)) in rad/s for a dipole
    /// matrix element ℘ in C·m.
    ///
    /// Divide by the bath rate γ to obtain the dimensionless value used by
    /// [`RefrigeratorParams`]. Field-amplitude conventions differing by a
    /// factor of 4 in ξ0² appear in the literature; the flux formulas in this
    /// crate are defined through x = ξ0²·n and do not depend on this helper.
    pub fn coupling(&self, dipole: f64) -> f64 {
        dipole / HBAR
            * (2.0 * HBAR * self.drive_frequency_si
                / (self.vacuum_permittivity * self.quantization_volume))
                .sqrt()
    }
}

/// Bose–Einstein occupation 1/(e^{ω/T} − 1).
pub fn planck_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
    }
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::Domain(format!(
            "temperature must be > 0, got {temperature}"
        )));
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Temperature at which a mode of frequency `omega` has occupation `nbar`.
pub fn occupation_to_temperature(omega: f64, nbar: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
    }
    if nbar.is_nan() || nbar <= 0.0 {
        return Err(Error::Domain(format!("occupation must be > 0, got {nbar}")));
    }
    Ok(omega / (1.0 / nbar).ln_1p())
}

/// ω_c/T_c ≤ ω_h/T_h, i.e. n̄_c ≥ n̄_h.
pub fn cooling_condition_monochromatic(params: &RefrigeratorParams) -> bool {
    params.nbar_c >= params.nbar_h
}

/// T_c/(T_h − T_c).
pub fn carnot_cop(t_c: f64, t_h: f64) -> Result<f64> {
    if !(t_c > 0.0 && t_h > t_c) {
        return Err(Error::Domain(format!(
            "need 0 < t_c < t_h, got t_c = {t_c}, t_h = {t_h}"
        )));
    }
    Ok(t_c / (t_h - t_c))
}
