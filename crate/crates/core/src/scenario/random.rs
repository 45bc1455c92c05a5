use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ScenarioFile;
use crate::algebra::{CoefficientRing, Pid, SparseMatrix};
use crate::bifurcation::{
    apply_birth, apply_death, apply_handle_slide, evolve, unipotent_inverse, EventKind, EventRecord, FlowCounter,
};
use crate::cerf::{births_deaths, validate_cerf, Arc, ArcId, Branching, CerfTuple, Difference, EndTag, Profile, Vertex, VertexId, VertexKind};
use crate::tracker::Window;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub max_arcs: usize,
    pub max_events: usize,
    pub max_attempts: usize,
    /// Fraction (in percent) of scenarios forced to carry exactly one event.
    pub single_event_percent: u32,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { max_arcs: 10, max_events: 6, max_attempts: 5000, single_event_percent: 30 }
    }
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn value(rng: &mut impl Rng) -> Rational {
    frac(rng.gen_range(-24..=24), 4)
}

fn coefficient<R: Pid>(rng: &mut impl Rng, unit: bool) -> R {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let q = match R::RING {
        CoefficientRing::IntMod2 => frac(1, 1),
        CoefficientRing::Integer if unit => frac(sign, 1),
        CoefficientRing::Integer => frac(sign * rng.gen_range(1..=2), 1),
        CoefficientRing::Rational => frac(sign * rng.gen_range(1..=3), rng.gen_range(1..=2)),
    };
    R::from_rational(&q).expect("small coefficients lie in every ring")
}

enum LoopKind {
    BirthOnly,
    BirthDeath,
    DeathOnly,
}

struct Skeleton {
    arcs: Vec<Arc>,
    vertices: Vec<Vertex>,
    loop_arcs: BTreeSet<ArcId>,
}

fn profile(pts: Vec<(Rational, Rational)>) -> Option<Profile> {
    Profile::new(pts).ok()
}

fn skeleton(rng: &mut impl Rng, cfg: &GeneratorConfig, single: bool) -> Option<Skeleton> {
    let (zero, one) = (Rational::zero(), Rational::one());
    let loops = if single { rng.gen_range(0..=1) } else { rng.gen_range(0..=2) };
    let chords = rng.gen_range(1..=5).min(cfg.max_arcs.saturating_sub(2 * loops)).max(1);
    let mut arcs = Vec::new();
    for k in 1..=chords {
        let mut pts = vec![(zero.clone(), value(rng))];
        if rng.gen_bool(0.5) {
            pts.push((frac(rng.gen_range(1..=15), 16), value(rng)));
        }
        pts.push((one.clone(), value(rng)));
        arcs.push(Arc::chord(ArcId::new(format!("c{k}")), profile(pts)?));
    }
    let mut vertices = Vec::new();
    let mut loop_arcs = BTreeSet::new();
    let mut used = BTreeSet::new();
    for j in 1..=loops {
        let kind = match rng.gen_range(0..3) {
            0 => LoopKind::BirthOnly,
            1 if !single => LoopKind::BirthDeath,
            1 => LoopKind::BirthOnly,
            _ => LoopKind::DeathOnly,
        };
        let f = value(rng);
        let up = frac(rng.gen_range(1..=8), 4);
        let down = frac(rng.gen_range(1..=8), 4);
        let (u, l) = (ArcId::new(format!("u{j}")), ArcId::new(format!("l{j}")));
        let (bv, dv) = (VertexId::new(format!("b{j}")), VertexId::new(format!("d{j}")));
        match kind {
            LoopKind::BirthOnly => {
                let rb = frac(fresh(rng, &mut used, 1, 12)?, 16);
                let pu = profile(vec![(rb.clone(), f.clone()), (one.clone(), &f + &up)])?;
                let pl = profile(vec![(rb.clone(), f.clone()), (one.clone(), &f - &down)])?;
                arcs.push(Arc::new(u.clone(), pu, EndTag::Birth(bv.clone()), EndTag::Boundary1));
                arcs.push(Arc::new(l.clone(), pl, EndTag::Birth(bv.clone()), EndTag::Boundary1));
                vertices.push(Vertex { id: bv, kind: VertexKind::Birth, r: rb, f3: f });
            }
            LoopKind::BirthDeath => {
                let kb = fresh(rng, &mut used, 1, 9)?;
                let kd = kb + rng.gen_range(3..=6);
                if kd > 15 || !used.insert(kd) {
                    return None;
                }
                let (rb, rd) = (frac(kb, 16), frac(kd, 16));
                let mid = (&rb + &rd) / frac(2, 1);
                let fd = &f + frac(rng.gen_range(-1..=1), 8);
                let pu = profile(vec![(rb.clone(), f.clone()), (mid.clone(), &f + &up), (rd.clone(), fd.clone())])?;
                let pl = profile(vec![(rb.clone(), f.clone()), (mid, &f - &down), (rd.clone(), fd.clone())])?;
                arcs.push(Arc::new(u.clone(), pu, EndTag::Birth(bv.clone()), EndTag::Death(dv.clone())));
                arcs.push(Arc::new(l.clone(), pl, EndTag::Birth(bv.clone()), EndTag::Death(dv.clone())));
                vertices.push(Vertex { id: bv, kind: VertexKind::Birth, r: rb, f3: f });
                vertices.push(Vertex { id: dv, kind: VertexKind::Death, r: rd, f3: fd });
            }
            LoopKind::DeathOnly => {
                let rd = frac(fresh(rng, &mut used, 2, 14)?, 16);
                let pu = profile(vec![(zero.clone(), &f + &up), (rd.clone(), f.clone())])?;
                let pl = profile(vec![(zero.clone(), &f - &down), (rd.clone(), f.clone())])?;
                arcs.push(Arc::new(u.clone(), pu, EndTag::Boundary0, EndTag::Death(dv.clone())));
                arcs.push(Arc::new(l.clone(), pl, EndTag::Boundary0, EndTag::Death(dv.clone())));
                vertices.push(Vertex { id: dv, kind: VertexKind::Death, r: rd, f3: f });
            }
        }
        loop_arcs.insert(u);
        loop_arcs.insert(l);
    }
    Some(Skeleton { arcs, vertices, loop_arcs })
}

fn fresh(rng: &mut impl Rng, used: &mut BTreeSet<i64>, lo: i64, hi: i64) -> Option<i64> {
    for _ in 0..20 {
        let k = rng.gen_range(lo..=hi);
        if used.insert(k) {
            return Some(k);
        }
    }
    None
}

fn dominates(t: &CerfTuple, a: &ArcId, b: &ArcId, lo: &Rational, hi: &Rational) -> bool {
    let (Some(pa), Some(pb)) = (t.arc(a), t.arc(b)) else { return false };
    Difference::of(&pa.profile, &pb.profile, lo, hi).is_some_and(|d| d.positive_inside())
}

/// γ on `[0, hi]`: a random pairing conjugated by a random unipotent
/// matrix, both supported on pairs strictly ordered over the interval.
/// Pairs that later die are kept in normal form.
fn initial_gamma<R: Pid>(
    rng: &mut impl Rng,
    t: &CerfTuple,
    basis: &[ArcId],
    hi: &Rational,
    dying: &[(ArcId, ArcId)],
) -> Option<FlowCounter<R>> {
    let zero = Rational::zero();
    let n = basis.len();
    let idx = |c: &ArcId| basis.iter().position(|x| x == c);
    let mut g = SparseMatrix::<R>::zeros(n, n);
    let mut taken = vec![false; n];
    let mut protected = vec![false; n];
    for (p, m) in dying {
        let (i, j) = (idx(p)?, idx(m)?);
        g.set(i, j, coefficient::<R>(rng, true));
        taken[i] = true;
        taken[j] = true;
        protected[i] = true;
        protected[j] = true;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for &i in &order {
        if taken[i] || !rng.gen_bool(0.6) {
            continue;
        }
        let below: Vec<usize> =
            (0..n).filter(|&j| !taken[j] && j != i && dominates(t, &basis[i], &basis[j], &zero, hi)).collect();
        if let Some(&j) = below.choose(rng) {
            g.set(i, j, coefficient::<R>(rng, false));
            taken[i] = true;
            taken[j] = true;
        }
    }
    let mut nil = SparseMatrix::<R>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && !protected[i] && !protected[j] && rng.gen_bool(0.3) && dominates(t, &basis[i], &basis[j], &zero, hi) {
                nil.set(i, j, coefficient::<R>(rng, false));
            }
        }
    }
    let u = SparseMatrix::identity(n).add(&nil).ok()?;
    let g = u.mul(&g).ok()?.mul(&unipotent_inverse(&nil)?).ok()?;
    let entries: Vec<(ArcId, ArcId, R)> = g.iter().map(|(i, j, v)| (basis[i].clone(), basis[j].clone(), v.clone())).collect();
    FlowCounter::from_entries(basis.to_vec(), entries).ok()
}

fn slide<R: Pid>(rng: &mut impl Rng, t: &CerfTuple, gm: &FlowCounter<R>, r: &Rational, loop_arcs: &BTreeSet<ArcId>) -> Option<Vec<(ArcId, ArcId, R)>> {
    let avoid = rng.gen_bool(0.7);
    let mut pairs = Vec::new();
    for a in gm.basis() {
        for b in gm.basis() {
            if avoid && (loop_arcs.contains(a) || loop_arcs.contains(b)) {
                continue;
            }
            if t.f3(a, r)? > t.f3(b, r)? {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    pairs.shuffle(rng);
    let k = if rng.gen_bool(0.2) { 2 } else { 1 };
    let chosen: Vec<_> = pairs.into_iter().take(k).map(|(a, b)| (a, b, coefficient::<R>(rng, false))).collect();
    if chosen.is_empty() {
        None
    } else {
        Some(chosen)
    }
}

/// Column for a birth: zero, a generator nothing flows into, or the inflow
/// column of some generator; always above the birth level.
fn birth_column<R: Pid>(rng: &mut impl Rng, t: &CerfTuple, gm: &FlowCounter<R>, b: &Branching) -> Vec<(ArcId, R)> {
    if rng.gen_bool(0.4) {
        return Vec::new();
    }
    let above = |c: &ArcId| t.f3(c, &b.r).is_some_and(|v| v > b.f3);
    let mut candidates: Vec<Vec<(ArcId, R)>> = Vec::new();
    for (j, c) in gm.basis().iter().enumerate() {
        let col = gm.gamma().column(j);
        if col.is_empty() {
            if above(c) {
                candidates.push(vec![(c.clone(), R::one())]);
            }
        } else if col.iter().all(|(i, _)| above(&gm.basis()[*i])) {
            candidates.push(col.iter().map(|(i, v)| (gm.basis()[*i].clone(), v.clone())).collect());
        }
    }
    let Some(w) = candidates.choose(rng) else { return Vec::new() };
    let k = coefficient::<R>(rng, false);
    w.iter().map(|(c, v)| (c.clone(), v.clone() * k.clone())).collect()
}

fn to_rational_event<R: Pid>(e: &EventRecord<R>) -> EventRecord<Rational> {
    let kind = match &e.kind {
        EventKind::HandleSlide { delta } => EventKind::HandleSlide {
            delta: delta.iter().map(|(a, b, v)| (a.clone(), b.clone(), v.to_rational())).collect(),
        },
        EventKind::Birth { vertex, pivot, column } => EventKind::Birth {
            vertex: vertex.clone(),
            pivot: pivot.to_rational(),
            column: column.iter().map(|(c, v)| (c.clone(), v.to_rational())).collect(),
        },
        EventKind::Death { vertex } => EventKind::Death { vertex: vertex.clone() },
    };
    EventRecord { id: e.id.clone(), r: e.r.clone(), kind }
}

enum Planned {
    Slide,
    Vertex(Branching),
}

fn attempt<R: Pid>(rng: &mut impl Rng, cfg: &GeneratorConfig) -> Option<ScenarioFile> {
    let single = rng.gen_range(0..100) < cfg.single_event_percent;
    let sk = skeleton(rng, cfg, single)?;
    if sk.arcs.len() > cfg.max_arcs || sk.vertices.len() > cfg.max_events {
        return None;
    }
    let t = CerfTuple::new(sk.arcs.clone(), sk.vertices.clone()).ok()?;
    if !validate_cerf(&t).is_valid() {
        return None;
    }
    let (births, deaths) = births_deaths(&t).ok()?;
    let room = cfg.max_events - sk.vertices.len();
    let slides = if single {
        1 - sk.vertices.len().min(1)
    } else {
        rng.gen_range(0..=room)
    };
    if single && sk.vertices.len() > 1 {
        return None;
    }
    let mut params: BTreeSet<i64> = BTreeSet::new();
    while params.len() < slides {
        params.insert(2 * rng.gen_range(0..16) + 1);
    }
    let mut plan: Vec<(Rational, Planned)> = params.into_iter().map(|k| (frac(k, 32), Planned::Slide)).collect();
    plan.extend(births.iter().chain(&deaths).map(|b| (b.r.clone(), Planned::Vertex(b.clone()))));
    plan.sort_by(|a, b| a.0.cmp(&b.0));

    let first_hi = plan.first().map_or(Rational::one(), |p| p.0.clone());
    let basis = t.alive_on(&Rational::zero(), &first_hi);
    let dying: Vec<(ArcId, ArcId)> = deaths
        .iter()
        .filter(|d| basis.contains(&d.plus))
        .map(|d| (d.plus.clone(), d.minus.clone()))
        .collect();
    let gamma0 = initial_gamma::<R>(rng, &t, &basis, &first_hi, &dying)?;

    let mut state = gamma0.clone();
    let mut events = Vec::new();
    for (k, (r, p)) in plan.iter().enumerate() {
        let id = format!("e{}", k + 1);
        let (kind, next) = match p {
            Planned::Slide => {
                let delta = slide(rng, &t, &state, r, &sk.loop_arcs)?;
                let next = apply_handle_slide(&state, &t, r, &delta).ok()?;
                (EventKind::HandleSlide { delta }, next)
            }
            Planned::Vertex(b) if b.kind == VertexKind::Birth => {
                let pivot = coefficient::<R>(rng, true);
                let column = birth_column(rng, &t, &state, b);
                let next = apply_birth(&state, &t, &id, b, &pivot, &column).ok()?;
                (EventKind::Birth { vertex: b.vertex.clone(), pivot, column }, next)
            }
            Planned::Vertex(b) => {
                let next = apply_death(&state, &id, b).ok()?;
                (EventKind::Death { vertex: b.vertex.clone() }, next)
            }
        };
        state = next;
        events.push(EventRecord { id, r: r.clone(), kind });
    }
    evolve(&gamma0, &events, &t).ok()?;

    let mut file = ScenarioFile::empty("random", R::RING);
    file.arcs = sk.arcs;
    file.vertices = sk.vertices;
    file.gamma = gamma0.entries().into_iter().map(|(a, b, v)| (a, b, v.to_rational())).collect();
    file.events = events.iter().map(to_rational_event).collect();
    file.window = Some(Window::wide(&t));
    Some(file)
}

/// A random scenario that passes every axiom check, or `None` after
/// `max_attempts` rejected drafts.
pub fn random_scenario<R: Pid>(rng: &mut impl Rng, cfg: &GeneratorConfig) -> Option<ScenarioFile> {
    (0..cfg.max_attempts).find_map(|_| attempt::<R>(rng, cfg))
}

/// `count` scenarios from a seeded generator, named `random-<seed>-<k>`.
pub fn random_suite<R: Pid>(seed: u64, count: usize, cfg: &GeneratorConfig) -> Vec<ScenarioFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        if let Some(mut s) = random_scenario::<R>(&mut rng, cfg) {
            s.name = format!("random-{seed}-{k}");
            out.push(s);
        }
    }
    out
}
