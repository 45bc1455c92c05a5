//! Cerf tuples: arcs of parametrized critical points with their action
//! profiles, glued at birth and death vertices.

mod front;
mod legendrian;
mod profile;
mod validate;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub use front::{front_projection, Cusp, FrontCrossing, FrontDiagram, Polyline};
pub use legendrian::{
    legendrian_lift, LegendrianError, LegendrianLift, LiftSample, Polynomial, PolynomialFront,
    SelfIntersection,
};
pub use profile::{common_grid, Crossing, Difference, Profile, ProfileError};
pub use validate::{births_deaths, validate_cerf, Branching, IssueKind, ValidationIssue, ValidationReport};

use crate::Rational;

/// Identifier of an arc. Ordered naturally, so `c2 < c10`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcId(String);

/// Identifier of a birth or death vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(String);

impl ArcId {
    pub fn new(s: impl Into<String>) -> Self {
        ArcId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl VertexId {
    pub fn new(s: impl Into<String>) -> Self {
        VertexId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ArcId {
    fn from(s: &str) -> Self {
        ArcId::new(s)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId::new(s)
    }
}

pub(crate) fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut x = a.as_bytes();
    let mut y = b.as_bytes();
    loop {
        match (x.first(), y.first()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(p), Some(q)) if p.is_ascii_digit() && q.is_ascii_digit() => {
                let dx = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let dy = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let nx = trim_zeros(&x[..dx]);
                let ny = trim_zeros(&y[..dy]);
                let ord = nx.len().cmp(&ny.len()).then_with(|| nx.cmp(ny));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[dx..];
                y = &y[dy..];
            }
            (Some(p), Some(q)) => {
                if p != q {
                    return p.cmp(q);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let k = d.iter().take_while(|&&c| c == b'0').count();
    &d[k.min(d.len().saturating_sub(1))..]
}

impl Ord for ArcId {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for ArcId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// What sits at one end of an arc.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EndTag {
    Boundary0,
    Boundary1,
    Birth(VertexId),
    Death(VertexId),
    /// A footprint that is not closed at this end (the critical point
    /// leaves every compact set). Never valid; kept so it can be reported.
    Open,
}

impl EndTag {
    pub fn vertex(&self) -> Option<&VertexId> {
        match self {
            EndTag::Birth(v) | EndTag::Death(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_free(&self) -> bool {
        self.vertex().is_none()
    }
}

impl fmt::Display for EndTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndTag::Boundary0 => f.write_str("boundary0"),
            EndTag::Boundary1 => f.write_str("boundary1"),
            EndTag::Birth(v) => write!(f, "birth:{v}"),
            EndTag::Death(v) => write!(f, "death:{v}"),
            EndTag::Open => f.write_str("open"),
        }
    }
}

/// An r-monotone piece of a component, with its action profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub id: ArcId,
    pub profile: Profile,
    pub lo_tag: EndTag,
    pub hi_tag: EndTag,
}

impl Arc {
    pub fn new(id: impl Into<ArcId>, profile: Profile, lo_tag: EndTag, hi_tag: EndTag) -> Self {
        Arc { id: id.into(), profile, lo_tag, hi_tag }
    }

    /// A chord spanning the whole parameter interval.
    pub fn chord(id: impl Into<ArcId>, profile: Profile) -> Self {
        Self::new(id, profile, EndTag::Boundary0, EndTag::Boundary1)
    }

    pub fn lo(&self) -> &Rational {
        self.profile.lo()
    }

    pub fn hi(&self) -> &Rational {
        self.profile.hi()
    }

    pub fn f3(&self, r: &Rational) -> Option<Rational> {
        self.profile.eval(r)
    }
}

impl From<String> for ArcId {
    fn from(s: String) -> Self {
        ArcId(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Birth,
    Death,
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexKind::Birth => "birth",
            VertexKind::Death => "death",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub kind: VertexKind,
    pub r: Rational,
    pub f3: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Loop,
    Chord,
}

/// A connected component: arcs in gluing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub kind: ComponentKind,
    pub arcs: Vec<ArcId>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CerfError {
    #[error("arc `{0}` declared twice")]
    DuplicateArc(ArcId),
    #[error("vertex `{0}` declared twice")]
    DuplicateVertex(VertexId),
    #[error("invalid Cerf tuple: {0}")]
    InvalidTuple(String),
}

/// Arcs and vertices of a one-parameter family of critical points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CerfTuple {
    arcs: Vec<Arc>,
    vertices: Vec<Vertex>,
}

impl CerfTuple {
    pub fn new(mut arcs: Vec<Arc>, mut vertices: Vec<Vertex>) -> Result<Self, CerfError> {
        arcs.sort_by(|a, b| a.id.cmp(&b.id));
        vertices.sort_by(|a, b| a.id.cmp(&b.id));
        for w in arcs.windows(2) {
            if w[0].id == w[1].id {
                return Err(CerfError::DuplicateArc(w[0].id.clone()));
            }
        }
        for w in vertices.windows(2) {
            if w[0].id == w[1].id {
                return Err(CerfError::DuplicateVertex(w[0].id.clone()));
            }
        }
        Ok(CerfTuple { arcs, vertices })
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arc(&self, id: &ArcId) -> Option<&Arc> {
        self.arcs.binary_search_by(|a| a.id.cmp(id)).ok().map(|k| &self.arcs[k])
    }

    pub fn vertex(&self, id: &VertexId) -> Option<&Vertex> {
        self.vertices.binary_search_by(|v| v.id.cmp(id)).ok().map(|k| &self.vertices[k])
    }

    pub fn f3(&self, id: &ArcId, r: &Rational) -> Option<Rational> {
        self.arc(id)?.f3(r)
    }

    /// Arcs whose footprint contains `r`.
    pub fn alive_at(&self, r: &Rational) -> Vec<ArcId> {
        self.arcs.iter().filter(|a| a.profile.contains(r)).map(|a| a.id.clone()).collect()
    }

    /// Arcs whose footprint covers `[lo, hi]`.
    pub fn alive_on(&self, lo: &Rational, hi: &Rational) -> Vec<ArcId> {
        self.arcs
            .iter()
            .filter(|a| a.lo() <= lo && a.hi() >= hi)
            .map(|a| a.id.clone())
            .collect()
    }

    /// Arc ends attached to each vertex, as `(arc, is_lo_end)`.
    pub(crate) fn attachments(&self) -> BTreeMap<VertexId, Vec<(ArcId, bool)>> {
        let mut map: BTreeMap<VertexId, Vec<(ArcId, bool)>> = BTreeMap::new();
        for a in &self.arcs {
            if let Some(v) = a.lo_tag.vertex() {
                map.entry(v.clone()).or_default().push((a.id.clone(), true));
            }
            if let Some(v) = a.hi_tag.vertex() {
                map.entry(v.clone()).or_default().push((a.id.clone(), false));
            }
        }
        map
    }

    /// Components recovered by walking the gluing. Chords are listed first
    /// (walked from their free end with the smallest arc id), then loops.
    pub fn components(&self) -> Vec<Component> {
        let att = self.attachments();
        let mut seen: BTreeMap<&ArcId, bool> = self.arcs.iter().map(|a| (&a.id, false)).collect();
        let mut out = Vec::new();
        let walk = |start: &Arc, from_lo: bool, seen: &mut BTreeMap<&ArcId, bool>| -> (Vec<ArcId>, bool) {
            let mut arcs = Vec::new();
            let mut cur = start;
            let mut entered_lo = from_lo;
            loop {
                arcs.push(cur.id.clone());
                if let Some(s) = seen.get_mut(&cur.id) {
                    *s = true;
                }
                let exit = if entered_lo { &cur.hi_tag } else { &cur.lo_tag };
                let Some(v) = exit.vertex() else { return (arcs, false) };
                let Some(ends) = att.get(v) else { return (arcs, false) };
                if ends.len() != 2 {
                    return (arcs, false);
                }
                let exit_is_lo = !entered_lo;
                let next = ends.iter().find(|(id, lo)| !(id == &cur.id && *lo == exit_is_lo));
                let Some((next_id, next_lo)) = next else { return (arcs, false) };
                if next_id == &start.id {
                    return (arcs, true);
                }
                if seen.get(next_id).copied().unwrap_or(true) {
                    return (arcs, false);
                }
                cur = self.arc(next_id).expect("attached arc exists");
                entered_lo = *next_lo;
            }
        };
        for a in &self.arcs {
            if seen[&a.id] {
                continue;
            }
            if a.lo_tag.is_free() {
                let (arcs, _) = walk(a, true, &mut seen);
                out.push(Component { kind: ComponentKind::Chord, arcs });
            } else if a.hi_tag.is_free() {
                let (arcs, _) = walk(a, false, &mut seen);
                out.push(Component { kind: ComponentKind::Chord, arcs });
            }
        }
        for a in &self.arcs {
            if seen[&a.id] {
                continue;
            }
            let (arcs, closed) = walk(a, true, &mut seen);
            let kind = if closed { ComponentKind::Loop } else { ComponentKind::Chord };
            out.push(Component { kind, arcs });
        }
        out
    }

    /// Sorted, deduplicated vertex parameters.
    pub fn vertex_params(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.vertices.iter().map(|v| v.r.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn f3_range(&self) -> Option<(Rational, Rational)> {
        let lo = self.arcs.iter().map(|a| a.profile.min_value()).min()?.clone();
        let hi = self.arcs.iter().map(|a| a.profile.max_value()).max()?.clone();
        Some((lo, hi))
    }
}
