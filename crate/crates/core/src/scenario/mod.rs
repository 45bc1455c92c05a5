//! Sectioned scenario files: parsing with line-located errors, writing back,
//! instantiation over a coefficient ring and random valid scenarios.

mod parse;
mod random;
mod write;

pub use parse::{parse_scenario, parse_str};
pub use random::{random_scenario, random_suite, GeneratorConfig};

use num_traits::{One, Zero};

use crate::algebra::{CoefficientRing, Pid};
use crate::bifurcation::{EventKind, EventRecord, FlowCounter};
use crate::cerf::{Arc, ArcId, CerfTuple, Vertex};
use crate::escape::GrowthBound;
use crate::rabinowitz::HomotopyModel;
use crate::tracker::{Chain, Window};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}", semantic_message(.line, .message))]
    Semantic { line: Option<usize>, message: String },
    #[error("cannot read scenario: {0}")]
    Io(String),
}

fn semantic_message(line: &Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("semantic error at line {l}: {message}"),
        None => format!("semantic error: {message}"),
    }
}

impl ScenarioError {
    pub(crate) fn semantic(message: impl Into<String>) -> Self {
        ScenarioError::Semantic { line: None, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiSpec {
    pub phi: GrowthBound,
    pub kappa: Option<Rational>,
    pub rho0: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RabinowitzSpec {
    pub model: HomotopyModel,
    pub rho0: Option<Rational>,
    pub kappa: Option<Rational>,
}

/// Parsed scenario with all coefficients kept as rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioFile {
    pub name: String,
    pub ring: CoefficientRing,
    pub arcs: Vec<Arc>,
    pub vertices: Vec<Vertex>,
    /// γ on the first interval.
    pub gamma: Vec<(ArcId, ArcId, Rational)>,
    pub events: Vec<EventRecord<Rational>>,
    pub window: Option<Window>,
    pub ladder: Vec<Window>,
    pub phi: Option<PhiSpec>,
    pub rabinowitz: Option<RabinowitzSpec>,
    pub track: Option<String>,
}

/// A scenario over a concrete ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance<R: Pid> {
    pub tuple: CerfTuple,
    pub gamma0: FlowCounter<R>,
    pub events: Vec<EventRecord<R>>,
    pub window: Option<Window>,
    pub ladder: Vec<Window>,
    pub class: Option<Chain<R>>,
}

pub(crate) fn ring_accepts(ring: CoefficientRing, q: &Rational) -> bool {
    ring == CoefficientRing::Rational || q.is_integer()
}

fn convert<R: Pid>(q: &Rational, what: &str) -> Result<R, ScenarioError> {
    R::from_rational(q)
        .ok_or_else(|| ScenarioError::semantic(format!("{what}: coefficient {q} is not in {}", R::RING.name())))
}

impl ScenarioFile {
    pub fn empty(name: impl Into<String>, ring: CoefficientRing) -> Self {
        ScenarioFile {
            name: name.into(),
            ring,
            arcs: Vec::new(),
            vertices: Vec::new(),
            gamma: Vec::new(),
            events: Vec::new(),
            window: None,
            ladder: Vec::new(),
            phi: None,
            rabinowitz: None,
            track: None,
        }
    }

    pub fn tuple(&self) -> Result<CerfTuple, ScenarioError> {
        CerfTuple::new(self.arcs.clone(), self.vertices.clone()).map_err(|e| ScenarioError::semantic(e.to_string()))
    }

    /// Event and vertex parameters, sorted and deduplicated.
    pub fn lambda(&self) -> Vec<Rational> {
        let mut l: Vec<Rational> =
            self.events.iter().map(|e| e.r.clone()).chain(self.vertices.iter().map(|v| v.r.clone())).collect();
        l.sort();
        l.dedup();
        l
    }

    /// Basis of the first interval `[0, λ1]`.
    pub fn first_basis(&self, t: &CerfTuple) -> Vec<ArcId> {
        let one = Rational::one();
        let hi = self.lambda().into_iter().find(|r| r > &Rational::zero()).unwrap_or(one);
        t.alive_on(&Rational::zero(), &hi)
    }

    pub fn instantiate<R: Pid>(&self) -> Result<Instance<R>, ScenarioError> {
        let tuple = self.tuple()?;
        let mut entries = Vec::new();
        for (a, b, v) in &self.gamma {
            entries.push((a.clone(), b.clone(), convert::<R>(v, &format!("gamma({a},{b})"))?));
        }
        let gamma0 = FlowCounter::from_entries(self.first_basis(&tuple), entries)
            .map_err(|e| ScenarioError::semantic(e.to_string()))?;
        let mut events = Vec::new();
        for e in &self.events {
            let what = format!("event `{}`", e.id);
            let kind = match &e.kind {
                EventKind::HandleSlide { delta } => EventKind::HandleSlide {
                    delta: delta
                        .iter()
                        .map(|(a, b, v)| Ok((a.clone(), b.clone(), convert::<R>(v, &what)?)))
                        .collect::<Result<_, ScenarioError>>()?,
                },
                EventKind::Birth { vertex, pivot, column } => EventKind::Birth {
                    vertex: vertex.clone(),
                    pivot: convert::<R>(pivot, &what)?,
                    column: column
                        .iter()
                        .map(|(c, v)| Ok((c.clone(), convert::<R>(v, &what)?)))
                        .collect::<Result<_, ScenarioError>>()?,
                },
                EventKind::Death { vertex } => EventKind::Death { vertex: vertex.clone() },
            };
            events.push(EventRecord { id: e.id.clone(), r: e.r.clone(), kind });
        }
        let class = match &self.track {
            Some(text) => Some(Chain::<R>::parse(text).map_err(|e| ScenarioError::semantic(e.to_string()))?),
            None => None,
        };
        Ok(Instance { tuple, gamma0, events, window: self.window.clone(), ladder: self.ladder.clone(), class })
    }
}
