//! Flow-line counters and their updates across handle-slides, births and
//! deaths.

mod evolve;
mod updates;

use std::fmt;

pub use evolve::{evolve, validate_axioms, Axiom, AxiomReport, AxiomViolation, EventStep, EvolutionLog, IntervalState};
pub use updates::{apply_birth, apply_death, apply_handle_slide, unipotent_inverse};

use crate::algebra::{format_rational, Pid, SparseMatrix};
use crate::cerf::{ArcId, VertexId};
use crate::Rational;

/// γ on one interval: `gamma[(i, j)] = γ(basis[i], basis[j])`, the coefficient
/// of `basis[j]` in the boundary of `basis[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowCounter<R: Pid> {
    basis: Vec<ArcId>,
    gamma: SparseMatrix<R>,
}

impl<R: Pid> FlowCounter<R> {
    pub fn zero(mut basis: Vec<ArcId>) -> Self {
        basis.sort();
        basis.dedup();
        let n = basis.len();
        FlowCounter { basis, gamma: SparseMatrix::zeros(n, n) }
    }

    pub fn from_entries<I>(basis: Vec<ArcId>, entries: I) -> Result<Self, BifurcationError>
    where
        I: IntoIterator<Item = (ArcId, ArcId, R)>,
    {
        let mut fc = Self::zero(basis);
        for (a, b, v) in entries {
            let i = fc.require(&a, "gamma")?;
            let j = fc.require(&b, "gamma")?;
            fc.gamma.add_to(i, j, v);
        }
        Ok(fc)
    }

    pub(crate) fn from_parts(basis: Vec<ArcId>, gamma: SparseMatrix<R>) -> Self {
        debug_assert!(basis.windows(2).all(|w| w[0] < w[1]));
        FlowCounter { basis, gamma }
    }

    pub fn basis(&self) -> &[ArcId] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index(&self, c: &ArcId) -> Option<usize> {
        self.basis.binary_search(c).ok()
    }

    pub(crate) fn require(&self, c: &ArcId, context: &str) -> Result<usize, BifurcationError> {
        self.index(c)
            .ok_or_else(|| BifurcationError::UnknownArc { arc: c.clone(), context: context.to_string() })
    }

    pub fn contains(&self, c: &ArcId) -> bool {
        self.index(c).is_some()
    }

    /// The γ-convention matrix.
    pub fn gamma(&self) -> &SparseMatrix<R> {
        &self.gamma
    }

    pub fn get(&self, c1: &ArcId, c2: &ArcId) -> R {
        match (self.index(c1), self.index(c2)) {
            (Some(i), Some(j)) => self.gamma.get(i, j),
            _ => R::zero(),
        }
    }

    pub fn entries(&self) -> Vec<(ArcId, ArcId, R)> {
        self.gamma
            .iter()
            .map(|(i, j, v)| (self.basis[i].clone(), self.basis[j].clone(), v.clone()))
            .collect()
    }

    /// Boundary operator acting on coefficient columns: the transpose of γ.
    pub fn boundary(&self) -> SparseMatrix<R> {
        self.gamma.transpose()
    }

    /// Sub-counter on the listed generators (kept in basis order).
    pub fn restrict(&self, keep: &[ArcId]) -> Self {
        let idx: Vec<usize> = self.basis.iter().enumerate().filter(|(_, c)| keep.contains(c)).map(|(i, _)| i).collect();
        FlowCounter {
            basis: idx.iter().map(|&i| self.basis[i].clone()).collect(),
            gamma: self.gamma.submatrix(&idx, &idx),
        }
    }

    pub fn squares_to_zero(&self) -> bool {
        self.gamma.mul(&self.gamma).map(|m| m.is_zero()).unwrap_or(false)
    }
}

impl<R: Pid> fmt::Display for FlowCounter<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.basis.iter().map(|c| c.as_str()).collect();
        writeln!(f, "basis: {}", names.join(" "))?;
        let e = self.entries();
        if e.is_empty() {
            writeln!(f, "gamma: 0")?;
        }
        for (a, b, v) in e {
            writeln!(f, "gamma({a},{b}) = {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind<R: Pid> {
    HandleSlide { delta: Vec<(ArcId, ArcId, R)> },
    Birth { vertex: VertexId, pivot: R, column: Vec<(ArcId, R)> },
    Death { vertex: VertexId },
}

impl<R: Pid> EventKind<R> {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::HandleSlide { .. } => "handle-slide",
            EventKind::Birth { .. } => "birth",
            EventKind::Death { .. } => "death",
        }
    }
}

/// A degenerate instant with its attached data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventRecord<R: Pid> {
    pub id: String,
    pub r: Rational,
    pub kind: EventKind<R>,
}

impl<R: Pid> fmt::Display for EventRecord<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} at r = {}", self.kind.label(), self.id, format_rational(&self.r))?;
        match &self.kind {
            EventKind::HandleSlide { delta } => {
                let parts: Vec<String> = delta.iter().map(|(a, b, v)| format!("delta({a},{b}) = {v}")).collect();
                write!(f, ": {}", parts.join(", "))
            }
            EventKind::Birth { vertex, pivot, column } => {
                write!(f, ": vertex {vertex}, pivot {pivot}")?;
                if !column.is_empty() {
                    let parts: Vec<String> = column.iter().map(|(c, v)| format!("{c}:{v}")).collect();
                    write!(f, ", column {}", parts.join(" "))?;
                }
                Ok(())
            }
            EventKind::Death { vertex } => write!(f, ": vertex {vertex}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BifurcationError {
    #[error("invalid Cerf tuple: {0}")]
    InvalidTuple(String),
    #[error("arc `{arc}` is not a generator here ({context})")]
    UnknownArc { arc: ArcId, context: String },
    #[error("delta({c1},{c2}) is nonzero at r = {r} but the action of {c2} is not below that of {c1}")]
    NonTriangularDelta { c1: ArcId, c2: ArcId, r: String },
    #[error("event {event}: pivot {value} is not a unit")]
    NonUnitPivot { event: String, value: String },
    #[error("event {event}: new column is not a cycle (row of {arc} pairs to {value})")]
    CycleConditionViolated { event: String, arc: ArcId, value: String },
    #[error("event {event}: column entry at {arc} needs action above the newborn pair")]
    ActionConstraintViolated { event: String, arc: ArcId },
    #[error("event {event}: gamma({c1},{c2}) = {value} must vanish at a death")]
    ConstraintViolated { event: String, c1: ArcId, c2: ArcId, value: String },
    #[error("events at r = {r}: degenerate parameters must be pairwise disjoint")]
    DuplicateEventParameter { r: String },
    #[error("event {event} at r = {r} must lie strictly inside (0, 1)")]
    EventOutOfRange { event: String, r: String },
    #[error("event {event} does not match vertex `{vertex}` ({reason})")]
    EventVertexMismatch { event: String, vertex: VertexId, reason: String },
    #[error("vertex `{0}` has no matching event")]
    MissingVertexEvent(VertexId),
    #[error("interval {interval}: generators [{found}] differ from arcs alive there [{expected}]")]
    BasisMismatch { interval: usize, found: String, expected: String },
    #[error("interval {interval}: gamma({c1},{c2}) is nonzero but {c1} does not stay above {c2}")]
    TriangularityViolated { interval: usize, c1: ArcId, c2: ArcId },
    #[error("interval {interval}: gamma does not square to zero")]
    NotADifferential { interval: usize },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub(crate) fn names(ids: &[ArcId]) -> String {
    ids.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" ")
}

pub(crate) fn f3_at(t: &crate::cerf::CerfTuple, c: &ArcId, r: &Rational) -> Result<Rational, BifurcationError> {
    t.f3(c, r).ok_or_else(|| BifurcationError::UnknownArc {
        arc: c.clone(),
        context: format!("not alive at r = {}", format_rational(r)),
    })
}

