use super::TrackerError;
use crate::algebra::{is_chain_homotopy, is_chain_map, Pid, SparseMatrix};
use crate::bifurcation::{unipotent_inverse, EventKind, EventStep, EvolutionLog, FlowCounter};
use crate::cerf::{ArcId, VertexKind};

/// Comparison maps across one event, as matrices acting on coefficient
/// columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainMapBundle<R: Pid> {
    /// `a` sends chains after the slide to chains before it,
    /// `c ↦ c + Σ δ(c, c') c'`; `a_inv` is its inverse.
    HandleSlide { a: SparseMatrix<R>, a_inv: SparseMatrix<R> },
    /// `i: small → big`, `p: big → small` and a homotopy `d` on the big
    /// complex. At a birth the small complex is the one before the event, at
    /// a death the one after.
    Pair { kind: VertexKind, i: SparseMatrix<R>, p: SparseMatrix<R>, d: SparseMatrix<R> },
}

impl<R: Pid> ChainMapBundle<R> {
    /// Pushes a chain from the interval before the event to the one after.
    pub fn forward(&self, v: &[R]) -> Result<Vec<R>, TrackerError> {
        let m = match self {
            ChainMapBundle::HandleSlide { a_inv, .. } => a_inv,
            ChainMapBundle::Pair { kind: VertexKind::Birth, i, .. } => i,
            ChainMapBundle::Pair { kind: VertexKind::Death, p, .. } => p,
        };
        Ok(m.mul_vec(v)?)
    }

    /// Pulls a chain after the event back to the interval before it.
    pub fn backward(&self, v: &[R]) -> Result<Vec<R>, TrackerError> {
        let m = match self {
            ChainMapBundle::HandleSlide { a, .. } => a,
            ChainMapBundle::Pair { kind: VertexKind::Birth, p, .. } => p,
            ChainMapBundle::Pair { kind: VertexKind::Death, i, .. } => i,
        };
        Ok(m.mul_vec(v)?)
    }
}

fn fail(what: &str, event: &str) -> TrackerError {
    TrackerError::VerificationFailed(format!("event {event}: {what}"))
}

/// Builds the comparison maps for `step` and verifies their identities
/// exactly.
pub fn continuation_map<R: Pid>(step: &EventStep<R>, log: &EvolutionLog<R>) -> Result<ChainMapBundle<R>, TrackerError> {
    let before = &log.intervals[step.before].counter;
    let after = &log.intervals[step.after].counter;
    let id = &step.event.id;
    match &step.event.kind {
        EventKind::HandleSlide { delta } => {
            let n = before.len();
            let mut dm = SparseMatrix::zeros(n, n);
            for (c1, c2, v) in delta {
                let (Some(i), Some(j)) = (before.index(c1), before.index(c2)) else {
                    return Err(fail("delta refers to an arc that is not a generator", id));
                };
                dm.add_to(i, j, v.clone());
            }
            let a = SparseMatrix::identity(n).add(&dm)?.transpose();
            let a_inv = unipotent_inverse(&dm).ok_or_else(|| fail("delta is not nilpotent", id))?.transpose();
            if !is_chain_map(&a, &after.boundary(), &before.boundary())? {
                return Err(fail("A does not intertwine the boundaries", id));
            }
            if a.mul(&a_inv)? != SparseMatrix::identity(n) {
                return Err(fail("A is not invertible", id));
            }
            Ok(ChainMapBundle::HandleSlide { a, a_inv })
        }
        EventKind::Birth { .. } | EventKind::Death { .. } => {
            let b = step.branching.as_ref().ok_or_else(|| fail("missing branching", id))?;
            let (small, big) = match b.kind {
                VertexKind::Birth => (before, after),
                VertexKind::Death => (after, before),
            };
            let (i, p, d) = pair_maps(small, big, &b.plus, &b.minus).ok_or_else(|| fail("pivot is not a unit", id))?;
            let ds = small.boundary();
            let db = big.boundary();
            if !is_chain_map(&i, &ds, &db)? {
                return Err(fail("i is not a chain map", id));
            }
            if !is_chain_map(&p, &db, &ds)? {
                return Err(fail("p is not a chain map", id));
            }
            if p.mul(&i)? != SparseMatrix::identity(small.len()) {
                return Err(fail("p∘i is not the identity", id));
            }
            let lhs = SparseMatrix::identity(big.len()).sub(&i.mul(&p)?)?;
            if !is_chain_homotopy(&d, &db, &lhs)? {
                return Err(fail("D is not a homotopy from i∘p to the identity", id));
            }
            Ok(ChainMapBundle::Pair { kind: b.kind, i, p, d })
        }
    }
}

/// `i(c) = c − γ(c, minus)·e⁻¹·plus`, `p` the projection killing the pair,
/// `D(minus) = e⁻¹·plus`.
fn pair_maps<R: Pid>(
    small: &FlowCounter<R>,
    big: &FlowCounter<R>,
    plus: &ArcId,
    minus: &ArcId,
) -> Option<(SparseMatrix<R>, SparseMatrix<R>, SparseMatrix<R>)> {
    let pp = big.index(plus)?;
    let mm = big.index(minus)?;
    let e_inv = big.gamma().get(pp, mm).inverse()?;
    let (n, big_n) = (small.len(), big.len());
    let mut i = SparseMatrix::zeros(big_n, n);
    let mut p = SparseMatrix::zeros(n, big_n);
    for (j, c) in small.basis().iter().enumerate() {
        let k = big.index(c)?;
        i.set(k, j, R::one());
        let w = big.gamma().get(k, mm);
        if !w.is_zero() {
            i.set(pp, j, -(w * e_inv.clone()));
        }
        p.set(j, k, R::one());
    }
    let mut d = SparseMatrix::zeros(big_n, big_n);
    d.set(pp, mm, e_inv);
    Some((i, p, d))
}
