//! Growth hypotheses H1/H2, the telescoped escape budget and the cascade
//! generator whose tracked class climbs through repeated transfers.

mod budget;
mod cascade;
mod growth;
mod hypotheses;

pub use budget::{budget_from_heights, cmp_exp, escape_budget, BudgetVerdict, Direction, EscapeBudget};
pub use cascade::{build_cascade, escape_witness, Cascade, CascadeParams, WitnessRow};
pub use growth::{iterated_log, log_threshold, parse_gap, Family, GrowthBound, IntegralValue};
pub use hypotheses::{check_h1, check_h2, H1Report, H2Report, SlopeViolation};

use crate::bifurcation::BifurcationError;
use crate::tracker::TrackerError;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EscapeError {
    #[error("cannot parse growth bound: {0}")]
    Parse(String),
    #[error("no closed-form antiderivative registered for {0}")]
    UnsupportedFamily(String),
    #[error("outside the domain of Φ: {0}")]
    Domain(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("trace heights are not monotone beyond the gap")]
    NonMonotoneTail,
    #[error(transparent)]
    Bifurcation(#[from] BifurcationError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
}
