//! Windows, filtered homology, comparison maps across events and spectral
//! values of tracked classes.

mod chain;
mod filtered;
mod maps;
mod spectral;
mod trace;
mod window;

pub use chain::Chain;
pub use filtered::{chain_group, filtered_homology, full_homology, window_complex, LadderStep, StabilizationReport};
pub use maps::{continuation_map, ChainMapBundle};
pub use spectral::{spectral_value, spectral_value_in, SpectralValue};
pub use trace::{track_class, SpectralTrace, TraceSegment, TraceStatus, Transfer};
pub use window::{Side, Window};

use crate::algebra::AlgebraError;
use crate::cerf::ArcId;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TrackerError {
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("window cutoff {side} meets arc `{arc}` near r = {r}")]
    WindowMeetsDiagram { arc: ArcId, side: Side, r: String },
    #[error("r = {0} is an event parameter or lies outside [0, 1]")]
    DegenerateParameter(String),
    #[error("ladder is not nested at step {0}")]
    NonNestedLadder(usize),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("arc `{0}` is not a generator here")]
    UnknownArc(ArcId),
    #[error("cannot parse chain: {0}")]
    ParseChain(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
