//! Steady-state thermodynamics of a three-level quantum absorption
//! refrigerator driven by light with arbitrary photon statistics.
//!
//! The driving field is expanded in coherent-state branches through its
//! Glauber–Sudarshan P function. Each branch is an ordinary planar-wave drive
//! whose steady state is known in closed form, and the averaged population
//! flux is obtained by one of three independent routes:
//!
//! * direct quadrature over the P function (thermal light only),
//! * a Laplace transform of the normally ordered generating function,
//! * the expansion in normally ordered photon-number moments.
//!
//! Every closed form in the crate has a numerical counterpart (a 9×9
//! Liouvillian null-space solver, a time integrator, Monte-Carlo sampling)
//! and the [`oracle`] module cross-checks them against each other.
//!
//! Units are dimensionless with ħ = k_B = 1.

pub mod driving;
pub mod error;
pub mod exec;
pub mod lindblad;
pub mod model;
pub mod oracle;
pub mod photonstats;
pub mod quadrature;
pub mod sweep;
pub mod thermalbath;

mod sum;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{HeatCurrents, RefrigeratorParams, SiConversion};
pub use photonstats::{PhotonDistribution, Statistic};
