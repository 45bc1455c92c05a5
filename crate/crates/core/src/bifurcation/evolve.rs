use std::fmt;

use super::{apply_birth, apply_death, apply_handle_slide, names, BifurcationError, EventKind, EventRecord, FlowCounter};
use crate::algebra::{format_rational, Pid};
use crate::cerf::{births_deaths, Branching, CerfTuple, Difference, VertexKind};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Tuple,
    Events,
    G1,
    G2,
    G3,
    G4,
    G5,
}

impl Axiom {
    pub fn label(self) -> &'static str {
        match self {
            Axiom::Tuple => "C1/C2",
            Axiom::Events => "events",
            Axiom::G1 => "γ1",
            Axiom::G2 => "γ2",
            Axiom::G3 => "γ3",
            Axiom::G4 => "γ4",
            Axiom::G5 => "γ5",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub location: String,
    pub error: BifurcationError,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.axiom.label(), self.location, self.error)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
    pub intervals_checked: usize,
    pub events_checked: usize,
}

impl AxiomReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "axioms: {} ({} intervals, {} events checked)",
            if self.is_valid() { "ok" } else { "FAILED" },
            self.intervals_checked,
            self.events_checked
        )?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// The counter on the open interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalState<R: Pid> {
    pub index: usize,
    pub lo: Rational,
    pub hi: Rational,
    pub counter: FlowCounter<R>,
}

impl<R: Pid> IntervalState<R> {
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }
}

/// One event together with the indices of the intervals on either side; the
/// counters there are its left and right approximations γ− and γ+.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventStep<R: Pid> {
    pub event: EventRecord<R>,
    pub branching: Option<Branching>,
    pub before: usize,
    pub after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvolutionLog<R: Pid> {
    pub intervals: Vec<IntervalState<R>>,
    pub steps: Vec<EventStep<R>>,
}

impl<R: Pid> EvolutionLog<R> {
    /// Event parameters in increasing order.
    pub fn lambda(&self) -> Vec<Rational> {
        self.steps.iter().map(|s| s.event.r.clone()).collect()
    }

    /// Interval containing `r`, or `None` for an event parameter or `r`
    /// outside [0, 1].
    pub fn interval_index(&self, r: &Rational) -> Option<usize> {
        self.intervals.iter().position(|iv| {
            let left = if iv.index == 0 { &iv.lo <= r } else { &iv.lo < r };
            let right = if iv.index + 1 == self.intervals.len() { r <= &iv.hi } else { r < &iv.hi };
            left && right
        })
    }

    pub fn counter_at(&self, r: &Rational) -> Option<&FlowCounter<R>> {
        self.interval_index(r).map(|k| &self.intervals[k].counter)
    }

    pub fn first(&self) -> &FlowCounter<R> {
        &self.intervals[0].counter
    }

    pub fn last(&self) -> &FlowCounter<R> {
        &self.intervals[self.intervals.len() - 1].counter
    }
}

impl<R: Pid> fmt::Display for EvolutionLog<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, iv) in self.intervals.iter().enumerate() {
            writeln!(f, "interval {} ({}, {})", iv.index, format_rational(&iv.lo), format_rational(&iv.hi))?;
            for line in iv.counter.to_string().lines() {
                writeln!(f, "  {line}")?;
            }
            if let Some(step) = self.steps.get(k) {
                writeln!(f, "event {}", step.event)?;
            }
        }
        Ok(())
    }
}

/// γ history interval by interval; fails with the first axiom violation.
pub fn evolve<R: Pid>(
    gamma0: &FlowCounter<R>,
    events: &[EventRecord<R>],
    t: &CerfTuple,
) -> Result<EvolutionLog<R>, BifurcationError> {
    let (log, violations) = walk(gamma0, events, t);
    match violations.into_iter().next() {
        Some(v) => Err(v.error),
        None => Ok(log),
    }
}

/// Every violation found by the same walk as `evolve`. Interval checks keep
/// going after a failure; a failed event update ends the walk.
pub fn validate_axioms<R: Pid>(gamma0: &FlowCounter<R>, events: &[EventRecord<R>], t: &CerfTuple) -> AxiomReport {
    let (log, violations) = walk(gamma0, events, t);
    AxiomReport { violations, intervals_checked: log.intervals.len(), events_checked: log.steps.len() }
}

fn walk<R: Pid>(
    gamma0: &FlowCounter<R>,
    events: &[EventRecord<R>],
    t: &CerfTuple,
) -> (EvolutionLog<R>, Vec<AxiomViolation>) {
    let mut log = EvolutionLog { intervals: Vec::new(), steps: Vec::new() };
    let mut out = Vec::new();
    let (births, deaths) = match births_deaths(t) {
        Ok(bd) => bd,
        Err(e) => {
            out.push(AxiomViolation {
                axiom: Axiom::Tuple,
                location: "tuple".into(),
                error: BifurcationError::InvalidTuple(e.to_string()),
            });
            return (log, out);
        }
    };
    let branchings: Vec<Branching> = births.into_iter().chain(deaths).collect();
    let mut sorted: Vec<&EventRecord<R>> = events.iter().collect();
    sorted.sort_by(|a, b| a.r.cmp(&b.r));
    let structural = check_events(&sorted, &branchings, t);
    if !structural.is_empty() {
        return (log, structural);
    }

    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    let mut bounds = vec![zero];
    bounds.extend(sorted.iter().map(|e| e.r.clone()));
    bounds.push(one);

    let mut counter = gamma0.clone();
    for k in 0..bounds.len() - 1 {
        let (lo, hi) = (&bounds[k], &bounds[k + 1]);
        check_interval(k, lo, hi, &counter, t, &mut out);
        log.intervals.push(IntervalState { index: k, lo: lo.clone(), hi: hi.clone(), counter: counter.clone() });
        let Some(ev) = sorted.get(k) else { break };
        let branching = match &ev.kind {
            EventKind::HandleSlide { .. } => None,
            EventKind::Birth { vertex, .. } | EventKind::Death { vertex } => {
                branchings.iter().find(|b| &b.vertex == vertex).cloned()
            }
        };
        let next = match (&ev.kind, &branching) {
            (EventKind::HandleSlide { delta }, _) => apply_handle_slide(&counter, t, &ev.r, delta).map_err(|e| {
                let ax = if matches!(e, BifurcationError::NonTriangularDelta { .. }) { Axiom::G1 } else { Axiom::G3 };
                (ax, e)
            }),
            (EventKind::Birth { pivot, column, .. }, Some(b)) => {
                apply_birth(&counter, t, &ev.id, b, pivot, column).map_err(|e| (Axiom::G4, e))
            }
            (EventKind::Death { .. }, Some(b)) => apply_death(&counter, &ev.id, b).map_err(|e| (Axiom::G5, e)),
            _ => unreachable!("check_events matched every vertex event"),
        };
        match next {
            Ok(c) => {
                log.steps.push(EventStep { event: (*ev).clone(), branching, before: k, after: k + 1 });
                counter = c;
            }
            Err((axiom, error)) => {
                out.push(AxiomViolation { axiom, location: format!("event {}", ev.id), error });
                break;
            }
        }
    }
    (log, out)
}

fn check_events<R: Pid>(sorted: &[&EventRecord<R>], branchings: &[Branching], t: &CerfTuple) -> Vec<AxiomViolation> {
    let mut out = Vec::new();
    let mut push = |location: String, error| out.push(AxiomViolation { axiom: Axiom::Events, location, error });
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    for ev in sorted {
        if ev.r <= zero || ev.r >= one {
            push(
                format!("event {}", ev.id),
                BifurcationError::EventOutOfRange { event: ev.id.clone(), r: format_rational(&ev.r) },
            );
        }
    }
    for w in sorted.windows(2) {
        if w[0].r == w[1].r {
            push(
                format!("events {} and {}", w[0].id, w[1].id),
                BifurcationError::DuplicateEventParameter { r: format_rational(&w[0].r) },
            );
        }
    }
    for ev in sorted {
        let (vertex, kind) = match &ev.kind {
            EventKind::HandleSlide { .. } => {
                if let Some(v) = t.vertices().iter().find(|v| v.r == ev.r) {
                    push(
                        format!("event {}", ev.id),
                        BifurcationError::EventVertexMismatch {
                            event: ev.id.clone(),
                            vertex: v.id.clone(),
                            reason: "a handle-slide may not share the parameter of a vertex".into(),
                        },
                    );
                }
                continue;
            }
            EventKind::Birth { vertex, .. } => (vertex, VertexKind::Birth),
            EventKind::Death { vertex } => (vertex, VertexKind::Death),
        };
        let reason = match branchings.iter().find(|b| &b.vertex == vertex) {
            None => Some("no such vertex".to_string()),
            Some(b) if b.kind != kind => Some(format!("vertex is a {}", if b.kind == VertexKind::Birth { "birth" } else { "death" })),
            Some(b) if b.r != ev.r => Some(format!("vertex sits at r = {}", format_rational(&b.r))),
            Some(_) => None,
        };
        if let Some(reason) = reason {
            push(
                format!("event {}", ev.id),
                BifurcationError::EventVertexMismatch { event: ev.id.clone(), vertex: vertex.clone(), reason },
            );
        }
    }
    for b in branchings {
        let n = sorted
            .iter()
            .filter(|ev| matches!(&ev.kind, EventKind::Birth { vertex, .. } | EventKind::Death { vertex } if vertex == &b.vertex))
            .count();
        if n == 0 {
            push(format!("vertex {}", b.vertex), BifurcationError::MissingVertexEvent(b.vertex.clone()));
        }
    }
    out
}

fn check_interval<R: Pid>(
    k: usize,
    lo: &Rational,
    hi: &Rational,
    counter: &FlowCounter<R>,
    t: &CerfTuple,
    out: &mut Vec<AxiomViolation>,
) {
    let expected = t.alive_on(lo, hi);
    if expected.as_slice() != counter.basis() {
        out.push(AxiomViolation {
            axiom: Axiom::Events,
            location: format!("interval {k}"),
            error: BifurcationError::BasisMismatch {
                interval: k,
                found: names(counter.basis()),
                expected: names(&expected),
            },
        });
        return;
    }
    for (c1, c2, _) in counter.entries() {
        let (Some(a1), Some(a2)) = (t.arc(&c1), t.arc(&c2)) else { continue };
        let above = Difference::of(&a1.profile, &a2.profile, lo, hi).is_some_and(|d| d.positive_inside());
        if !above {
            out.push(AxiomViolation {
                axiom: Axiom::G1,
                location: format!("interval {k}"),
                error: BifurcationError::TriangularityViolated { interval: k, c1, c2 },
            });
        }
    }
    if !counter.squares_to_zero() {
        out.push(AxiomViolation {
            axiom: Axiom::G2,
            location: format!("interval {k}"),
            error: BifurcationError::NotADifferential { interval: k },
        });
    }
}
