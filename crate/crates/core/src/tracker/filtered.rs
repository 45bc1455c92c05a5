use std::fmt;

use super::{TrackerError, Window};
use crate::algebra::homology::check_differential;
use crate::algebra::{format_rational, homology, induced_rank, HomologyResult, Pid, SparseMatrix};
use crate::bifurcation::{EvolutionLog, FlowCounter};
use crate::cerf::{ArcId, CerfTuple};
use crate::Rational;

fn counter_at<'a, R: Pid>(log: &'a EvolutionLog<R>, r: &Rational) -> Result<&'a FlowCounter<R>, TrackerError> {
    log.counter_at(r).ok_or_else(|| TrackerError::DegenerateParameter(format_rational(r)))
}

/// Generators at `r` whose action lies strictly inside the window.
pub fn chain_group<R: Pid>(
    t: &CerfTuple,
    log: &EvolutionLog<R>,
    r: &Rational,
    w: &Window,
) -> Result<Vec<ArcId>, TrackerError> {
    let fc = counter_at(log, r)?;
    Ok(fc
        .basis()
        .iter()
        .filter(|c| t.f3(c, r).is_some_and(|v| w.contains(r, &v)))
        .cloned()
        .collect())
}

/// The window complex at `r`: generators and the restricted boundary
/// operator.
pub fn window_complex<R: Pid>(
    t: &CerfTuple,
    log: &EvolutionLog<R>,
    r: &Rational,
    w: &Window,
) -> Result<FlowCounter<R>, TrackerError> {
    let gens = chain_group(t, log, r, w)?;
    Ok(counter_at(log, r)?.restrict(&gens))
}

pub fn filtered_homology<R: Pid>(
    t: &CerfTuple,
    log: &EvolutionLog<R>,
    r: &Rational,
    w: &Window,
) -> Result<HomologyResult<R>, TrackerError> {
    let fc = window_complex(t, log, r, w)?;
    Ok(homology(&fc.boundary())?)
}

/// One rung of a window ladder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderStep<R: Pid> {
    pub window: Window,
    pub generators: Vec<ArcId>,
    pub homology: HomologyResult<R>,
    /// Ranks of the maps into `(a_k, b_{k+1})` induced by inclusion from the
    /// previous rung and by projection from this one; `None` on the first.
    pub inclusion_rank: Option<usize>,
    pub projection_rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationReport<R: Pid> {
    pub r: Rational,
    pub steps: Vec<LadderStep<R>>,
    /// Homology once three consecutive rungs agree through isomorphisms.
    pub stabilized: Option<HomologyResult<R>>,
    pub stabilized_at: Option<usize>,
}

impl<R: Pid> fmt::Display for StabilizationReport<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ladder at r = {}", format_rational(&self.r))?;
        for (k, s) in self.steps.iter().enumerate() {
            let show = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
            writeln!(
                f,
                "  {k}: window {}  generators {}  homology {}  incl {}  proj {}",
                s.window,
                s.generators.len(),
                s.homology,
                show(s.inclusion_rank),
                show(s.projection_rank)
            )?;
        }
        match (&self.stabilized, self.stabilized_at) {
            (Some(h), Some(k)) => writeln!(f, "  stabilized: {h} from step {k}"),
            _ => writeln!(f, "  not stabilized at this ladder depth"),
        }
    }
}

/// Selection matrix of `from` inside `to` (rows indexed by `to`).
fn inclusion<R: Pid>(from: &[ArcId], to: &[ArcId]) -> SparseMatrix<R> {
    let mut m = SparseMatrix::zeros(to.len(), from.len());
    for (j, c) in from.iter().enumerate() {
        if let Ok(i) = to.binary_search(c) {
            m.set(i, j, R::one());
        }
    }
    m
}

pub fn full_homology<R: Pid>(
    t: &CerfTuple,
    log: &EvolutionLog<R>,
    r: &Rational,
    ladder: &[Window],
) -> Result<StabilizationReport<R>, TrackerError> {
    for (k, pair) in ladder.windows(2).enumerate() {
        if !pair[0].nested_in(&pair[1]) {
            return Err(TrackerError::NonNestedLadder(k + 1));
        }
    }
    let full = counter_at(log, r)?;
    let mut steps: Vec<LadderStep<R>> = Vec::new();
    for (k, w) in ladder.iter().enumerate() {
        let fc = window_complex(t, log, r, w)?;
        let h = homology(&fc.boundary())?;
        let (mut incl, mut proj) = (None, None);
        if k > 0 {
            let prev = &ladder[k - 1];
            let mixed = Window::new(prev.a.clone(), w.b.clone())?;
            let mid = window_complex(t, log, r, &mixed)?;
            let prev_fc = full.restrict(&steps[k - 1].generators);
            let d_mid = mid.boundary();
            check_differential(&d_mid)?;
            incl = Some(induced_rank(&inclusion(prev_fc.basis(), mid.basis()), &prev_fc.boundary(), &d_mid)?);
            proj = Some(induced_rank(&inclusion(fc.basis(), mid.basis()), &fc.boundary(), &d_mid)?);
        }
        steps.push(LadderStep {
            window: w.clone(),
            generators: fc.basis().to_vec(),
            homology: h,
            inclusion_rank: incl,
            projection_rank: proj,
        });
    }
    let mut stabilized_at = None;
    for k in 2..steps.len() {
        let run = &steps[k - 2..=k];
        let same = run.iter().all(|s| s.homology == run[0].homology);
        let iso = run[1..].iter().all(|s| {
            let n = s.homology.free_rank;
            s.inclusion_rank == Some(n) && s.projection_rank == Some(n)
        });
        if same && iso {
            stabilized_at = Some(k - 2);
            break;
        }
    }
    Ok(StabilizationReport {
        r: r.clone(),
        stabilized: stabilized_at.map(|k| steps[k].homology.clone()),
        stabilized_at,
        steps,
    })
}
