//! Single coherent-branch physics of the refrigerator.
//!
//! Basis ordering is (|g⟩, |e1⟩, |e2⟩). In the frame rotating at the drive
//! frequency the Hamiltonian is
//!
//! ```text
//! H = Δ |e2⟩⟨e2| + i𝓔 σ⁺ − i𝓔* σ⁻,   σ⁺ = |e2⟩⟨e1|,   𝓔 = e^{iφ} ξ0 √n / 2,
//! ```
//!
//! and each bath k ∈ {c, h} coupled to |g⟩ ↔ |e_k⟩ contributes
//! γ n̄_k D[|e_k⟩⟨g|] + γ (n̄_k + 1) D[|g⟩⟨e_k|]. Spontaneous emission on the
//! driven transition adds κ D[σ⁻]. Only Δ² enters the flux, so the sign
//! convention of Δ is immaterial for every reported current.

mod closed_form;
mod evolve;
mod liouvillian;
pub(crate) mod state;

pub use closed_form::{
    coherent_flux, cop, drive_power, flux_from_state, gamma_coefficients, heat_currents_from_flux,
    heat_flows_from_state, steady_state_analytic, work_cop, FluxCoefficients, GammaCoefficients,
};
pub use evolve::{default_time_step, evolve, evolve_generator};
pub use liouvillian::{build_liouvillian, steady_state_numeric, Liouvillian};
pub use state::{BranchDrive, DensityMatrix3, SteadyObservables};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
