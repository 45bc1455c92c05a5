use std::fmt;

use num_traits::{One, Zero};

use super::profile::Difference;
use super::{ArcId, CerfError, CerfTuple, EndTag, VertexId, VertexKind};
use crate::algebra::format_rational;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IssueKind {
    /// Footprint not closed: violates the compactness axiom C1.
    NonCompact,
    ParameterRange,
    TagMismatch,
    Alternation,
    UnknownVertex,
    DanglingVertex,
    VertexArity,
    F3Mismatch,
    DuplicateParameter,
    BranchCoincidence,
}

impl IssueKind {
    pub fn label(self) -> &'static str {
        match self {
            IssueKind::NonCompact => "non-compact",
            IssueKind::ParameterRange => "parameter-range",
            IssueKind::TagMismatch => "tag-mismatch",
            IssueKind::Alternation => "alternation",
            IssueKind::UnknownVertex => "unknown-vertex",
            IssueKind::DanglingVertex => "dangling-vertex",
            IssueKind::VertexArity => "vertex-arity",
            IssueKind::F3Mismatch => "f3-mismatch",
            IssueKind::DuplicateParameter => "duplicate-parameter",
            IssueKind::BranchCoincidence => "branch-coincidence",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationIssue {
    pub kind: IssueKind,
    pub subject: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.kind.label(), self.subject, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<ValidationIssue>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: IssueKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: IssueKind, subject: impl fmt::Display, message: impl Into<String>) {
        self.violations.push(ValidationIssue { kind, subject: subject.to_string(), message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            writeln!(f, "cerf tuple: valid")?;
        } else {
            writeln!(f, "cerf tuple: {} violation(s)", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

pub fn validate_cerf(t: &CerfTuple) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let zero = Rational::zero();
    let one = Rational::one();

    for a in t.arcs() {
        if a.lo() < &zero || a.hi() > &one {
            rep.push(
                IssueKind::ParameterRange,
                &a.id,
                format!("footprint [{}, {}] leaves [0, 1]", format_rational(a.lo()), format_rational(a.hi())),
            );
        }
        for (tag, is_lo) in [(&a.lo_tag, true), (&a.hi_tag, false)] {
            let at = if is_lo { a.lo() } else { a.hi() };
            let side = if is_lo { "lower" } else { "upper" };
            match tag {
                EndTag::Open => rep.push(
                    IssueKind::NonCompact,
                    &a.id,
                    format!(
                        "{side} end at r = {} is open; every component must be compact (axiom C1), so the critical point may not escape",
                        format_rational(at)
                    ),
                ),
                EndTag::Boundary0 => {
                    if !is_lo || !at.is_zero() {
                        rep.push(
                            IssueKind::TagMismatch,
                            &a.id,
                            format!("{side} end at r = {} tagged boundary0", format_rational(at)),
                        );
                    }
                }
                EndTag::Boundary1 => {
                    if is_lo || !at.is_one() {
                        rep.push(
                            IssueKind::TagMismatch,
                            &a.id,
                            format!("{side} end at r = {} tagged boundary1", format_rational(at)),
                        );
                    }
                }
                EndTag::Birth(v) | EndTag::Death(v) => {
                    let tagged_birth = matches!(tag, EndTag::Birth(_));
                    if tagged_birth != is_lo {
                        rep.push(
                            IssueKind::Alternation,
                            &a.id,
                            format!(
                                "{side} end glued to a {} vertex `{v}`; births open arcs and deaths close them, so births and deaths must alternate",
                                if tagged_birth { "birth" } else { "death" }
                            ),
                        );
                    }
                    match t.vertex(v) {
                        None => rep.push(IssueKind::UnknownVertex, &a.id, format!("vertex `{v}` is not declared")),
                        Some(vx) => {
                            let expected = if tagged_birth { VertexKind::Birth } else { VertexKind::Death };
                            if vx.kind != expected {
                                rep.push(
                                    IssueKind::TagMismatch,
                                    &a.id,
                                    format!("tag names `{v}` as a {expected} vertex but it is declared as a {}", vx.kind),
                                );
                            }
                            if &vx.r != at {
                                rep.push(
                                    IssueKind::TagMismatch,
                                    &a.id,
                                    format!(
                                        "{side} end at r = {} but vertex `{v}` sits at r = {}",
                                        format_rational(at),
                                        format_rational(&vx.r)
                                    ),
                                );
                            } else {
                                let val = if is_lo { a.profile.start_value() } else { a.profile.end_value() };
                                if val != &vx.f3 {
                                    rep.push(
                                        IssueKind::F3Mismatch,
                                        &a.id,
                                        format!(
                                            "action {} at vertex `{v}` differs from the vertex value {}",
                                            format_rational(val),
                                            format_rational(&vx.f3)
                                        ),
                                    );
                                }
                            }
                        }
                    }
                }
            }
            if tag.is_free() && !matches!(tag, EndTag::Open) && at > &zero && at < &one {
                rep.push(
                    IssueKind::TagMismatch,
                    &a.id,
                    format!("free {side} end at interior parameter r = {}", format_rational(at)),
                );
            }
        }
    }

    let att = t.attachments();
    for v in t.vertices() {
        if v.r <= zero || v.r >= one {
            rep.push(
                IssueKind::ParameterRange,
                &v.id,
                format!("vertex parameter {} must lie strictly inside (0, 1)", format_rational(&v.r)),
            );
        }
        let ends = att.get(&v.id).map_or(0, |e| e.len());
        match ends {
            0 | 1 => rep.push(
                IssueKind::DanglingVertex,
                &v.id,
                format!("{ends} arc end(s) attached; a vertex joins exactly two arcs"),
            ),
            2 => {}
            n => rep.push(IssueKind::VertexArity, &v.id, format!("{n} arc ends attached; expected two")),
        }
    }
    let mut params: Vec<(&Rational, &VertexId)> = t.vertices().iter().map(|v| (&v.r, &v.id)).collect();
    params.sort();
    for w in params.windows(2) {
        if w[0].0 == w[1].0 {
            rep.push(
                IssueKind::DuplicateParameter,
                w[1].1,
                format!(
                    "shares parameter {} with vertex `{}`; degenerate parameters must be pairwise disjoint",
                    format_rational(w[0].0),
                    w[0].1
                ),
            );
        }
    }

    if rep.is_valid() {
        for b in branchings(t) {
            if b.coincide {
                rep.push(
                    IssueKind::BranchCoincidence,
                    &b.vertex,
                    "the two branches leave the vertex with equal slope; cusp is not generic",
                );
            }
        }
    }

    for i in 0..t.arcs().len() {
        for j in i + 1..t.arcs().len() {
            let (p, q) = (&t.arcs()[i], &t.arcs()[j]);
            let lo = p.lo().max(q.lo()).clone();
            let hi = p.hi().min(q.hi()).clone();
            if lo >= hi {
                continue;
            }
            let Some(d) = Difference::of(&p.profile, &q.profile, &lo, &hi) else { continue };
            for z in d.zeros() {
                let at_end = z.r == lo || z.r == hi;
                if at_end && z.r_end.is_none() {
                    continue;
                }
                if !z.transverse {
                    rep.notes.push(format!(
                        "arcs {} and {} meet non-transversally at r = {}",
                        p.id,
                        q.id,
                        format_rational(&z.r)
                    ));
                }
            }
        }
    }
    if let Some((lo, hi)) = t.f3_range() {
        rep.notes.push(format!(
            "properness: {} arc(s), action values within [{}, {}] over every parameter window",
            t.arcs().len(),
            format_rational(&lo),
            format_rational(&hi)
        ));
    }
    rep
}

/// The two branches at a birth or death vertex. `plus` carries the larger
/// action just after a birth, resp. just before a death.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branching {
    pub vertex: VertexId,
    pub kind: VertexKind,
    pub r: Rational,
    pub f3: Rational,
    pub plus: ArcId,
    pub minus: ArcId,
}

struct RawBranching {
    vertex: VertexId,
    branching: Option<Branching>,
    coincide: bool,
}

fn branchings(t: &CerfTuple) -> Vec<RawBranching> {
    let att = t.attachments();
    let mut out = Vec::new();
    for v in t.vertices() {
        let Some(ends) = att.get(&v.id) else { continue };
        if ends.len() != 2 {
            continue;
        }
        let a = t.arc(&ends[0].0).expect("attached arc");
        let b = t.arc(&ends[1].0).expect("attached arc");
        let (sa, sb) = match v.kind {
            VertexKind::Birth => (a.profile.slopes()[0].clone(), b.profile.slopes()[0].clone()),
            VertexKind::Death => {
                // values just before the death rank in the reverse order of the final slopes
                let la = a.profile.slopes().last().unwrap().clone();
                let lb = b.profile.slopes().last().unwrap().clone();
                (-la, -lb)
            }
        };
        let coincide = sa == sb;
        let (plus, minus) = if sa > sb { (&a.id, &b.id) } else { (&b.id, &a.id) };
        out.push(RawBranching {
            vertex: v.id.clone(),
            branching: Some(Branching {
                vertex: v.id.clone(),
                kind: v.kind,
                r: v.r.clone(),
                f3: v.f3.clone(),
                plus: plus.clone(),
                minus: minus.clone(),
            }),
            coincide,
        });
    }
    out
}

/// Births and deaths of a valid tuple, each ordered by parameter.
pub fn births_deaths(t: &CerfTuple) -> Result<(Vec<Branching>, Vec<Branching>), CerfError> {
    let rep = validate_cerf(t);
    if !rep.is_valid() {
        let first = rep.violations[0].to_string();
        return Err(CerfError::InvalidTuple(first));
    }
    let mut births = Vec::new();
    let mut deaths = Vec::new();
    for raw in branchings(t) {
        let b = raw.branching.expect("valid tuple has complete branchings");
        match b.kind {
            VertexKind::Birth => births.push(b),
            VertexKind::Death => deaths.push(b),
        }
    }
    births.sort_by(|x, y| x.r.cmp(&y.r));
    deaths.sort_by(|x, y| x.r.cmp(&y.r));
    Ok((births, deaths))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;
    use crate::cerf::{Arc, ComponentKind, Profile, Vertex};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn prof(pts: &[(&str, &str)]) -> Profile {
        Profile::new(pts.iter().map(|(r, v)| (q(r), q(v))).collect()).unwrap()
    }

    fn vertex(id: &str, kind: VertexKind, r: &str, f3: &str) -> Vertex {
        Vertex { id: VertexId::new(id), kind, r: q(r), f3: q(f3) }
    }

    fn eyeball() -> CerfTuple {
        let up = Arc::new(
            "u",
            prof(&[("1/4", "1"), ("1/2", "2"), ("3/4", "1")]),
            EndTag::Birth("B".into()),
            EndTag::Death("D".into()),
        );
        let down = Arc::new(
            "l",
            prof(&[("1/4", "1"), ("1/2", "0"), ("3/4", "1")]),
            EndTag::Birth("B".into()),
            EndTag::Death("D".into()),
        );
        CerfTuple::new(
            vec![up, down],
            vec![vertex("B", VertexKind::Birth, "1/4", "1"), vertex("D", VertexKind::Death, "3/4", "1")],
        )
        .unwrap()
    }

    #[test]
    fn constant_chord_is_valid() {
        let t = CerfTuple::new(vec![Arc::chord("c", prof(&[("0", "5"), ("1", "5")]))], vec![]).unwrap();
        let rep = validate_cerf(&t);
        assert!(rep.is_valid(), "{rep}");
        assert_eq!(births_deaths(&t).unwrap(), (vec![], vec![]));
    }

    #[test]
    fn escaping_point_is_rejected() {
        let arc = Arc::new("c", prof(&[("0", "0"), ("1/2", "1/4")]), EndTag::Boundary0, EndTag::Open);
        let t = CerfTuple::new(vec![arc], vec![]).unwrap();
        let rep = validate_cerf(&t);
        assert!(rep.has(IssueKind::NonCompact));
        assert!(rep.violations[0].message.contains("C1"));
    }

    #[test]
    fn two_births_do_not_alternate() {
        let a = Arc::new("a", prof(&[("1/4", "1"), ("3/4", "2")]), EndTag::Birth("B1".into()), EndTag::Birth("B2".into()));
        let b = Arc::new("b", prof(&[("1/4", "1"), ("3/4", "2")]), EndTag::Birth("B1".into()), EndTag::Birth("B2".into()));
        let t = CerfTuple::new(
            vec![a, b],
            vec![vertex("B1", VertexKind::Birth, "1/4", "1"), vertex("B2", VertexKind::Birth, "3/4", "2")],
        )
        .unwrap();
        assert!(validate_cerf(&t).has(IssueKind::Alternation));
    }

    #[test]
    fn eyeball_loop() {
        let t = eyeball();
        let rep = validate_cerf(&t);
        assert!(rep.is_valid(), "{rep}");
        let comps = t.components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].kind, ComponentKind::Loop);
        let (b, d) = births_deaths(&t).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(d.len(), 1);
        assert_eq!(b[0].plus, ArcId::new("u"));
        assert_eq!(d[0].plus, ArcId::new("u"));
    }

    #[test]
    fn mismatched_vertex_value() {
        let mut t = eyeball();
        t.vertices[0].f3 = q("3");
        assert!(validate_cerf(&t).has(IssueKind::F3Mismatch));
    }

    #[test]
    fn duplicate_vertex_parameters() {
        let mut t = eyeball();
        t.vertices[1].r = q("1/4");
        let rep = validate_cerf(&t);
        assert!(rep.has(IssueKind::DuplicateParameter));
    }

    #[test]
    fn dangling_vertex() {
        let t = CerfTuple::new(
            vec![Arc::chord("c", prof(&[("0", "5"), ("1", "5")]))],
            vec![vertex("B", VertexKind::Birth, "1/2", "0")],
        )
        .unwrap();
        assert!(validate_cerf(&t).has(IssueKind::DanglingVertex));
    }
}
