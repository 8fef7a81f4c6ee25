//! Brute-force verification: Monte-Carlo sampling of classical P functions
//! and a suite of named cross-checks between independent routes.

mod monte_carlo;
mod report;
mod suite;

pub use monte_carlo::{
    monte_carlo_flux, monte_carlo_thermal_flux, MonteCarloEstimate, MIN_SAMPLES,
};
pub use report::{write_json_lines, Metric, OracleReport};
pub use suite::{
    all_passed, check_names, run_equivalence_suite, GridPreset, Mutation, SuiteConfig,
};
