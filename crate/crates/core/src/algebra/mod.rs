//! Exact linear algebra over a principal ideal domain.

pub mod homology;
pub mod matrix;
pub mod ring;
pub mod snf;

pub use homology::{homology, induced_rank, is_chain_homotopy, is_chain_map, HomologyResult};
pub use matrix::SparseMatrix;
pub use ring::{format_rational, parse_rational, CoefficientRing, Pid, Z2};
pub use snf::{smith_normal_form, solve, SmithForm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("index ({row},{col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("boundary does not square to zero: entry ({row},{col}) of d*d is {value}")]
    NotADifferential { row: usize, col: usize, value: String },
}
