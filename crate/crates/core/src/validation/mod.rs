//! Independent oracles and property checks.

pub mod convexity;
pub mod limits;
pub mod sv;
pub mod sweeps;
pub mod weak;

pub use convexity::{convexity_check, ConvexityMode, ConvexityReport};
pub use limits::{g_limit_study, half_slip_vacuum, vacuum_divergence, GLimitTable, VacuumReport};
pub use sv::{sv_exact, SvStar, SvWave};
pub use sweeps::{Check, FailureCase, PropertyReport, SweepConfig};
pub use weak::{weak_form_residual, SpaceTimeBox};
