use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{ring_accepts, PhiSpec, RabinowitzSpec, ScenarioError, ScenarioFile};
use crate::algebra::{format_rational, parse_rational, CoefficientRing};
use crate::bifurcation::{EventKind, EventRecord};
use crate::cerf::{Arc, ArcId, EndTag, Profile, Vertex, VertexId, VertexKind};
use crate::escape::{parse_gap, GrowthBound};
use crate::rabinowitz::{HomotopyModel, TameClass, Variant};
use crate::tracker::{Chain, Window};
use crate::Rational;

/// One `[kind id]` section with its `key = value` lines.
struct Section {
    kind: String,
    id: Option<String>,
    line: usize,
    entries: Vec<(usize, String, String)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.iter().find(|(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str()))
    }

    fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = (usize, &'a str)> + 'a {
        self.entries.iter().filter(move |(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str()))
    }

    fn require(&self, key: &str) -> Result<(usize, &str), ScenarioError> {
        self.get(key).ok_or_else(|| ScenarioError::Syntax {
            line: self.line,
            message: format!("section [{}] needs `{key}`", self.title()),
        })
    }

    fn title(&self) -> String {
        match &self.id {
            Some(id) => format!("{} {id}", self.kind),
            None => self.kind.clone(),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), ScenarioError> {
        for (l, k, _) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(syntax(*l, format!("unknown key `{k}` in [{}]", self.title())));
            }
        }
        Ok(())
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax { line, message: message.into() }
}

fn semantic(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Semantic { line: Some(line), message: message.into() }
}

fn rational(line: usize, text: &str) -> Result<Rational, ScenarioError> {
    parse_rational(text).ok_or_else(|| syntax(line, format!("expected an exact number, found `{text}`")))
}

fn ident(line: usize, text: &str) -> Result<String, ScenarioError> {
    let t = text.trim();
    if t.is_empty() || !t.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.') {
        return Err(syntax(line, format!("bad identifier `{t}`")));
    }
    Ok(t.to_string())
}

fn split_sections(text: &str) -> Result<Vec<Section>, ScenarioError> {
    let mut out: Vec<Section> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(head) = content.strip_prefix('[') {
            let head = head.strip_suffix(']').ok_or_else(|| syntax(line, "unterminated section header"))?;
            let mut parts = head.split_whitespace();
            let kind = parts.next().ok_or_else(|| syntax(line, "empty section header"))?.to_string();
            let id = parts.next().map(|s| ident(line, s)).transpose()?;
            if parts.next().is_some() {
                return Err(syntax(line, format!("unexpected text in header `[{head}]`")));
            }
            out.push(Section { kind, id, line, entries: Vec::new() });
            continue;
        }
        let (key, value) = match content.split_once('=') {
            // gamma lines read `a -> b = v`
            Some((k, v)) => (k.trim().to_string(), v.trim().to_string()),
            None => return Err(syntax(line, format!("expected `key = value`, found `{content}`"))),
        };
        let section = out.last_mut().ok_or_else(|| syntax(line, "entry before the first section"))?;
        section.entries.push((line, key, value));
    }
    Ok(out)
}

fn parse_tag(line: usize, text: &str) -> Result<EndTag, ScenarioError> {
    let t = text.trim();
    Ok(match t {
        "boundary0" => EndTag::Boundary0,
        "boundary1" => EndTag::Boundary1,
        "open" => EndTag::Open,
        _ => match t.split_once(':') {
            Some(("birth", v)) => EndTag::Birth(VertexId::new(ident(line, v)?)),
            Some(("death", v)) => EndTag::Death(VertexId::new(ident(line, v)?)),
            _ => return Err(syntax(line, format!("bad end tag `{t}` (boundary0, boundary1, birth:<v>, death:<v>, open)"))),
        },
    })
}

fn parse_points(line: usize, text: &str) -> Result<Profile, ScenarioError> {
    let mut pts = Vec::new();
    for tok in text.split_whitespace() {
        let (r, v) = tok.split_once(':').ok_or_else(|| syntax(line, format!("expected r:value, found `{tok}`")))?;
        pts.push((rational(line, r)?, rational(line, v)?));
    }
    Profile::new(pts).map_err(|e| syntax(line, e.to_string()))
}

fn parse_arc(s: &Section) -> Result<Arc, ScenarioError> {
    s.check_keys(&["points", "lo", "hi"])?;
    let id = s.id.clone().ok_or_else(|| syntax(s.line, "[arc] needs an id"))?;
    let (l, pts) = s.require("points")?;
    let profile = parse_points(l, pts)?;
    let default = |at: &Rational, is_lo: bool| -> Option<EndTag> {
        match (is_lo, at == &Rational::from_integer(0.into()), at == &Rational::from_integer(1.into())) {
            (true, true, _) => Some(EndTag::Boundary0),
            (false, _, true) => Some(EndTag::Boundary1),
            _ => None,
        }
    };
    let mut tags = Vec::new();
    for (key, at, is_lo) in [("lo", profile.lo().clone(), true), ("hi", profile.hi().clone(), false)] {
        let tag = match s.get(key) {
            Some((l, v)) => parse_tag(l, v)?,
            None => default(&at, is_lo).ok_or_else(|| {
                syntax(s.line, format!("arc `{id}` needs `{key}` since its end r = {} is interior", format_rational(&at)))
            })?,
        };
        tags.push(tag);
    }
    let hi = tags.pop().expect("two tags");
    let lo = tags.pop().expect("two tags");
    Ok(Arc::new(ArcId::new(id), profile, lo, hi))
}

fn parse_vertex(s: &Section) -> Result<Vertex, ScenarioError> {
    s.check_keys(&["kind", "r", "f3"])?;
    let id = s.id.clone().ok_or_else(|| syntax(s.line, "[vertex] needs an id"))?;
    let (l, kind) = s.require("kind")?;
    let kind = match kind {
        "birth" => VertexKind::Birth,
        "death" => VertexKind::Death,
        other => return Err(syntax(l, format!("vertex kind must be birth or death, found `{other}`"))),
    };
    let (lr, r) = s.require("r")?;
    let (lf, f) = s.require("f3")?;
    Ok(Vertex { id: VertexId::new(id), kind, r: rational(lr, r)?, f3: rational(lf, f)? })
}

/// `a -> b`
fn parse_pair(line: usize, text: &str) -> Result<(ArcId, ArcId), ScenarioError> {
    let (a, b) = text.split_once("->").ok_or_else(|| syntax(line, format!("expected `a -> b`, found `{text}`")))?;
    Ok((ArcId::new(ident(line, a)?), ArcId::new(ident(line, b)?)))
}

fn parse_event(s: &Section, vertices: &BTreeMap<VertexId, Vertex>) -> Result<EventRecord<Rational>, ScenarioError> {
    s.check_keys(&["r", "type", "delta", "vertex", "pivot", "column"])?;
    let id = s.id.clone().ok_or_else(|| syntax(s.line, "[event] needs an id"))?;
    let (lt, ty) = s.require("type")?;
    let vertex_of = |s: &Section| -> Result<(VertexId, Option<Rational>), ScenarioError> {
        let (l, v) = s.require("vertex")?;
        let v = VertexId::new(ident(l, v)?);
        let r = vertices.get(&v).map(|x| x.r.clone());
        Ok((v, r))
    };
    let (kind, default_r) = match ty {
        "handle-slide" | "handleslide" => {
            let mut delta = Vec::new();
            for (l, v) in s.all("delta") {
                let (pair, val) =
                    v.split_once(':').ok_or_else(|| syntax(l, format!("expected `a -> b : value`, found `{v}`")))?;
                let (a, b) = parse_pair(l, pair)?;
                delta.push((a, b, rational(l, val)?));
            }
            if delta.is_empty() {
                return Err(syntax(s.line, format!("handle-slide `{id}` needs at least one `delta`")));
            }
            (EventKind::HandleSlide { delta }, None)
        }
        "birth" => {
            let (vertex, r) = vertex_of(s)?;
            let pivot = match s.get("pivot") {
                Some((l, v)) => rational(l, v)?,
                None => Rational::from_integer(1.into()),
            };
            let mut column = Vec::new();
            for (l, v) in s.all("column") {
                let (c, val) =
                    v.split_once(':').ok_or_else(|| syntax(l, format!("expected `arc : value`, found `{v}`")))?;
                column.push((ArcId::new(ident(l, c)?), rational(l, val)?));
            }
            (EventKind::Birth { vertex, pivot, column }, r)
        }
        "death" => {
            let (vertex, r) = vertex_of(s)?;
            (EventKind::Death { vertex }, r)
        }
        other => return Err(syntax(lt, format!("event type must be handle-slide, birth or death, found `{other}`"))),
    };
    let r = match (s.get("r"), default_r) {
        (Some((l, v)), _) => rational(l, v)?,
        (None, Some(r)) => r,
        (None, None) => return Err(syntax(s.line, format!("event `{id}` needs `r`"))),
    };
    Ok(EventRecord { id, r, kind })
}

fn parse_window(s: &Section) -> Result<Window, ScenarioError> {
    s.check_keys(&["a", "b"])?;
    let (la, a) = s.require("a")?;
    let (_, b) = s.require("b")?;
    Window::parse(&format!("a={a},b={b}")).map_err(|e| syntax(la, e.to_string()))
}

fn opt_rational(s: &Section, key: &str) -> Result<Option<Rational>, ScenarioError> {
    s.get(key).map(|(l, v)| rational(l, v)).transpose()
}

fn parse_phi(s: &Section) -> Result<PhiSpec, ScenarioError> {
    s.check_keys(&["phi", "gap", "kappa", "rho0"])?;
    let (l, text) = s.require("phi")?;
    let mut phi: GrowthBound = text.parse().map_err(|e: crate::escape::EscapeError| syntax(l, e.to_string()))?;
    if let Some((lg, g)) = s.get("gap") {
        let (a, b) = parse_gap(g).map_err(|e| syntax(lg, e.to_string()))?;
        phi = phi.with_gap(a, b);
    }
    Ok(PhiSpec { phi, kappa: opt_rational(s, "kappa")?, rho0: opt_rational(s, "rho0")? })
}

fn parse_rabinowitz(s: &Section) -> Result<RabinowitzSpec, ScenarioError> {
    s.check_keys(&["h_sup", "c", "class", "depth", "theta", "r_const", "rho0", "kappa"])?;
    let (lh, h) = s.require("h_sup")?;
    let c = match s.get("c") {
        Some((l, v)) => rational(l, v)?,
        None => crate::rabinowitz::restricted_contact_constant().0,
    };
    let (lc, class) = s.require("class")?;
    let class = match class {
        "tame" => TameClass::Tame,
        "logtame" | "log-tame" => {
            let (ld, d) = s.require("depth")?;
            TameClass::LogTame { depth: d.parse().map_err(|_| syntax(ld, format!("bad depth `{d}`")))? }
        }
        "squaretame" | "square-tame" => TameClass::SquareTame,
        other => return Err(syntax(lc, format!("class must be tame, logtame or squaretame, found `{other}`"))),
    };
    let mut model = HomotopyModel { h_sup: rational(lh, h)?, c, class, variant: Variant::Hypersurface };
    if let Some(theta) = opt_rational(s, "theta")? {
        model.variant = Variant::SymplecticForm { theta, r_const: opt_rational(s, "r_const")? };
    } else if s.get("r_const").is_some() {
        return Err(syntax(s.line, "`r_const` only applies together with `theta`"));
    }
    model.validate().map_err(|e| semantic(s.line, e.to_string()))?;
    Ok(RabinowitzSpec { model, rho0: opt_rational(s, "rho0")?, kappa: opt_rational(s, "kappa")? })
}

/// Parses scenario text. Structural problems are syntax errors; references
/// to unknown arcs or vertices, coefficients outside the ring and coinciding
/// event parameters are semantic errors. Both carry the line.
pub fn parse_str(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let sections = split_sections(text)?;
    let mut file = ScenarioFile::empty("unnamed", CoefficientRing::Integer);
    let mut seen = BTreeSet::new();
    let mut arc_lines = BTreeMap::new();
    let mut event_lines: Vec<usize> = Vec::new();
    let mut gamma_lines: Vec<usize> = Vec::new();
    let mut track_line = 0;
    // vertices first so that events can default their parameter
    let mut vertices = BTreeMap::new();
    for s in sections.iter().filter(|s| s.kind == "vertex") {
        let v = parse_vertex(s)?;
        if vertices.insert(v.id.clone(), v.clone()).is_some() {
            return Err(semantic(s.line, format!("vertex `{}` declared twice", v.id)));
        }
        file.vertices.push(v);
    }
    for s in &sections {
        let single = matches!(s.kind.as_str(), "scenario" | "gamma" | "window" | "ladder" | "phi" | "rabinowitz" | "track");
        if single && !seen.insert(s.kind.clone()) {
            return Err(syntax(s.line, format!("section [{}] appears twice", s.kind)));
        }
        if single && s.id.is_some() {
            return Err(syntax(s.line, format!("section [{}] takes no id", s.kind)));
        }
        match s.kind.as_str() {
            "scenario" => {
                s.check_keys(&["name", "ring"])?;
                if let Some((_, n)) = s.get("name") {
                    file.name = n.to_string();
                }
                if let Some((l, r)) = s.get("ring") {
                    file.ring = r.parse().map_err(|e: String| syntax(l, e))?;
                }
            }
            "arc" => {
                let a = parse_arc(s)?;
                if arc_lines.insert(a.id.clone(), s.line).is_some() {
                    return Err(semantic(s.line, format!("arc `{}` declared twice", a.id)));
                }
                file.arcs.push(a);
            }
            "vertex" => {}
            "gamma" => {
                for (l, k, v) in &s.entries {
                    let (a, b) = parse_pair(*l, k)?;
                    file.gamma.push((a, b, rational(*l, v)?));
                    gamma_lines.push(*l);
                }
            }
            "event" => {
                let e = parse_event(s, &vertices)?;
                if file.events.iter().any(|x| x.id == e.id) {
                    return Err(semantic(s.line, format!("event `{}` declared twice", e.id)));
                }
                file.events.push(e);
                event_lines.push(s.line);
            }
            "window" => file.window = Some(parse_window(s)?),
            "ladder" => {
                s.check_keys(&["step"])?;
                for (l, v) in s.all("step") {
                    file.ladder.push(Window::parse(v).map_err(|e| syntax(l, e.to_string()))?);
                }
            }
            "phi" => file.phi = Some(parse_phi(s)?),
            "rabinowitz" => file.rabinowitz = Some(parse_rabinowitz(s)?),
            "track" => {
                s.check_keys(&["class"])?;
                let (l, c) = s.require("class")?;
                Chain::<Rational>::parse(c).map_err(|e| syntax(l, e.to_string()))?;
                file.track = Some(c.to_string());
                track_line = l;
            }
            other => return Err(syntax(s.line, format!("unknown section [{other}]"))),
        }
    }

    // references and coefficients
    let known = |a: &ArcId| arc_lines.contains_key(a);
    let check_arc = |a: &ArcId, line: usize, what: &str| {
        if known(a) {
            Ok(())
        } else {
            Err(semantic(line, format!("{what} references unknown arc `{a}`")))
        }
    };
    let check_coef = |q: &Rational, line: usize, what: &str| {
        if ring_accepts(file.ring, q) {
            Ok(())
        } else {
            Err(semantic(line, format!("{what}: coefficient {} is not in {}", format_rational(q), file.ring.name())))
        }
    };
    for ((a, b, v), l) in file.gamma.iter().zip(&gamma_lines) {
        check_arc(a, *l, "gamma")?;
        check_arc(b, *l, "gamma")?;
        check_coef(v, *l, "gamma")?;
    }
    for a in &file.arcs {
        for tag in [&a.lo_tag, &a.hi_tag] {
            if let Some(v) = tag.vertex() {
                if !vertices.contains_key(v) {
                    return Err(semantic(arc_lines[&a.id], format!("arc `{}` ends at unknown vertex `{v}`", a.id)));
                }
            }
        }
    }
    for (e, l) in file.events.iter().zip(&event_lines) {
        let what = format!("event `{}`", e.id);
        match &e.kind {
            EventKind::HandleSlide { delta } => {
                for (a, b, v) in delta {
                    check_arc(a, *l, &what)?;
                    check_arc(b, *l, &what)?;
                    check_coef(v, *l, &what)?;
                }
            }
            EventKind::Birth { vertex, pivot, column } => {
                check_coef(pivot, *l, &what)?;
                for (c, v) in column {
                    check_arc(c, *l, &what)?;
                    check_coef(v, *l, &what)?;
                }
                check_vertex(&vertices, vertex, VertexKind::Birth, e, *l)?;
            }
            EventKind::Death { vertex } => check_vertex(&vertices, vertex, VertexKind::Death, e, *l)?,
        }
    }
    // degenerate parameters: events pairwise, and slides against vertices
    for (i, (e, l)) in file.events.iter().zip(&event_lines).enumerate() {
        for f in &file.events[..i] {
            if f.r == e.r {
                return Err(semantic(
                    *l,
                    format!(
                        "event `{}` at r = {} coincides with event `{}`: degenerate parameters must be pairwise disjoint",
                        e.id,
                        format_rational(&e.r),
                        f.id
                    ),
                ));
            }
        }
        if let EventKind::HandleSlide { .. } = e.kind {
            if let Some(v) = file.vertices.iter().find(|v| v.r == e.r) {
                return Err(semantic(
                    *l,
                    format!(
                        "handle-slide `{}` at r = {} coincides with vertex `{}`: degenerate parameters must be pairwise disjoint",
                        e.id,
                        format_rational(&e.r),
                        v.id
                    ),
                ));
            }
        }
    }
    if let Some(t) = &file.track {
        let chain = Chain::<Rational>::parse(t).map_err(|e| syntax(track_line, e.to_string()))?;
        for (c, v) in chain.terms() {
            check_arc(c, track_line, "track class")?;
            check_coef(v, track_line, "track class")?;
        }
    }
    Ok(file)
}

fn check_vertex(
    vertices: &BTreeMap<VertexId, Vertex>,
    id: &VertexId,
    kind: VertexKind,
    e: &EventRecord<Rational>,
    line: usize,
) -> Result<(), ScenarioError> {
    let v = vertices.get(id).ok_or_else(|| semantic(line, format!("event `{}` references unknown vertex `{id}`", e.id)))?;
    if v.kind != kind {
        return Err(semantic(line, format!("event `{}` is a {kind} but vertex `{id}` is a {}", e.id, v.kind)));
    }
    if v.r != e.r {
        return Err(semantic(
            line,
            format!("event `{}` at r = {} but vertex `{id}` sits at r = {}", e.id, format_rational(&e.r), format_rational(&v.r)),
        ));
    }
    Ok(())
}

pub fn parse_scenario(path: &Path) -> Result<ScenarioFile, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}
