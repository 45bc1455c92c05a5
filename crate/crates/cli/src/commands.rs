use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cerfmorse::algebra::{format_rational, homology as homology_of, CoefficientRing, Pid, Z2};
use cerfmorse::bifurcation::{evolve as evolve_log, validate_axioms, EvolutionLog};
use cerfmorse::cerf::{births_deaths, validate_cerf};
use cerfmorse::escape::{build_cascade, check_h1, check_h2, escape_budget, GrowthBound};
use cerfmorse::rabinowitz::{classify_invariance, eta_bound, restricted_contact_constant, TameClass};
use cerfmorse::scenario::{parse_scenario, parse_str, random_suite, GeneratorConfig, Instance, ScenarioFile};
use cerfmorse::tracker::{continuation_map, filtered_homology, full_homology, track_class, Chain, SpectralTrace, Window};
use cerfmorse::{BigInt, Rational};

use crate::{svg, Input, Observe};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Axiom(String),
    #[error("{0}")]
    Computation(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Axiom(_) => 3,
            CliError::Computation(_) => 4,
        }
    }
}

fn computation(e: impl std::fmt::Display) -> CliError {
    CliError::Computation(e.to_string())
}

fn parse_err(e: impl std::fmt::Display) -> CliError {
    CliError::Parse(e.to_string())
}

/// Runs `$f::<R>(args)` for the ring `R` named by `$ring`.
macro_rules! over_ring {
    ($ring:expr, $f:ident($($arg:expr),* $(,)?)) => {
        match $ring {
            CoefficientRing::IntMod2 => $f::<Z2>($($arg),*),
            CoefficientRing::Integer => $f::<BigInt>($($arg),*),
            CoefficientRing::Rational => $f::<Rational>($($arg),*),
        }
    };
}

fn load(input: &Input) -> Result<ScenarioFile, CliError> {
    let mut s = parse_scenario(&input.scenario).map_err(parse_err)?;
    if let Some(ring) = input.coeff {
        s.ring = ring;
    }
    Ok(s)
}

/// Instance, validated Cerf tuple and evolution log.
fn prepare<R: Pid>(s: &ScenarioFile) -> Result<(Instance<R>, EvolutionLog<R>), CliError> {
    let inst = s.instantiate::<R>().map_err(parse_err)?;
    let report = validate_cerf(&inst.tuple);
    if !report.is_valid() {
        return Err(CliError::Validation(report.to_string().trim_end().to_string()));
    }
    let log = evolve_log(&inst.gamma0, &inst.events, &inst.tuple).map_err(|e| CliError::Axiom(e.to_string()))?;
    Ok((inst, log))
}

fn window_for<R: Pid>(flag: Option<&str>, inst: &Instance<R>) -> Result<Window, CliError> {
    match flag {
        Some(text) => Window::parse(text).map_err(parse_err),
        None => Ok(inst.window.clone().unwrap_or_else(|| Window::wide(&inst.tuple))),
    }
}

fn class_for<R: Pid>(flag: Option<&str>, inst: &Instance<R>) -> Result<Option<Chain<R>>, CliError> {
    match flag {
        Some(text) => Chain::parse(text).map(Some).map_err(parse_err),
        None => Ok(inst.class.clone()),
    }
}

fn header(s: &ScenarioFile, out: &mut String) {
    let _ = writeln!(out, "scenario {} over {}", s.name, s.ring.name());
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

pub fn validate(input: &Input, out: &mut String) -> Result<(), CliError> {
    let s = load(input)?;
    header(&s, out);
    over_ring!(s.ring, validate_in(&s, out))
}

fn validate_in<R: Pid>(s: &ScenarioFile, out: &mut String) -> Result<(), CliError> {
    let inst = s.instantiate::<R>().map_err(parse_err)?;
    let report = validate_cerf(&inst.tuple);
    out.push_str(&report.to_string());
    if !report.is_valid() {
        let first = &report.violations[0];
        return Err(CliError::Validation(format!("invalid Cerf diagram: {first}")));
    }
    if let Ok((births, deaths)) = births_deaths(&inst.tuple) {
        for b in births.iter().chain(&deaths) {
            let _ = writeln!(
                out,
                "{} {} at r = {}, F3 = {}: {} above {}",
                b.kind,
                b.vertex,
                format_rational(&b.r),
                format_rational(&b.f3),
                b.plus,
                b.minus
            );
        }
    }
    let axioms = validate_axioms(&inst.gamma0, &inst.events, &inst.tuple);
    out.push_str(&axioms.to_string());
    if !axioms.is_valid() {
        return Err(CliError::Axiom(format!("axiom violation: {}", axioms.violations[0])));
    }
    if let Some(w) = &inst.window {
        match w.validate(&inst.tuple) {
            Ok(()) => {
                let _ = writeln!(out, "window {w}: proper");
            }
            Err(e) => {
                let _ = writeln!(out, "window {w}: {e}");
            }
        }
    }
    Ok(())
}

pub fn evolve(input: &Input, out: &mut String) -> Result<(), CliError> {
    let s = load(input)?;
    header(&s, out);
    over_ring!(s.ring, evolve_in(&s, out))
}

fn evolve_in<R: Pid>(s: &ScenarioFile, out: &mut String) -> Result<(), CliError> {
    let (_, log) = prepare::<R>(s)?;
    out.push_str(&log.to_string());
    Ok(())
}

pub fn homology(input: &Input, window: Option<&str>, out: &mut String) -> Result<(), CliError> {
    let s = load(input)?;
    header(&s, out);
    over_ring!(s.ring, homology_in(&s, window, out))
}

fn homology_in<R: Pid>(s: &ScenarioFile, window: Option<&str>, out: &mut String) -> Result<(), CliError> {
    let (inst, log) = prepare::<R>(s)?;
    let w = match window {
        Some(text) => Some(Window::parse(text).map_err(parse_err)?),
        None => inst.window.clone(),
    };
    let _ = writeln!(out, "# interval\tr_lo\tr_hi\tgenerators\thomology\twindowed");
    for iv in &log.intervals {
        let full = homology_of(&iv.counter.boundary()).map_err(computation)?;
        let windowed = match &w {
            Some(w) => match filtered_homology(&inst.tuple, &log, &iv.midpoint(), w) {
                Ok(h) => h.to_string(),
                Err(e) => format!("({e})"),
            },
            None => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            iv.index,
            format_rational(&iv.lo),
            format_rational(&iv.hi),
            iv.counter.len(),
            full,
            windowed
        );
    }
    if let Some(w) = &w {
        let _ = writeln!(out, "# window {w}");
    }
    if !inst.ladder.is_empty() {
        for iv in &log.intervals {
            let report = full_homology(&inst.tuple, &log, &iv.midpoint(), &inst.ladder).map_err(computation)?;
            out.push_str(&report.to_string());
        }
    }
    Ok(())
}

pub fn track(input: &Input, observe: &Observe, out: &mut String) -> Result<(), CliError> {
    let s = load(input)?;
    header(&s, out);
    over_ring!(s.ring, track_in(&s, observe, out))
}

fn trace_of<R: Pid>(
    s: &ScenarioFile,
    observe: &Observe,
) -> Result<Option<(Instance<R>, Window, Chain<R>, SpectralTrace<R>)>, CliError> {
    let (inst, log) = prepare::<R>(s)?;
    let w = window_for(observe.window.as_deref(), &inst)?;
    let Some(class) = class_for(observe.class.as_deref(), &inst)? else {
        return Ok(None);
    };
    let trace = track_class(&inst.tuple, &log, &class, &w).map_err(computation)?;
    Ok(Some((inst, w, class, trace)))
}

fn track_in<R: Pid>(s: &ScenarioFile, observe: &Observe, out: &mut String) -> Result<(), CliError> {
    let Some((_, w, class, trace)) = trace_of::<R>(s, observe)? else {
        return Err(CliError::Parse("no class to track: pass --class or add a [track] section".into()));
    };
    let _ = writeln!(out, "class [{class}] in window {w}");
    out.push_str(&trace.to_string());
    Ok(())
}

pub fn escape(
    input: &Input,
    observe: &Observe,
    phi: Option<&str>,
    kappa: Option<Rational>,
    rho0: Option<Rational>,
    out: &mut String,
) -> Result<(), CliError> {
    let s = load(input)?;
    header(&s, out);
    over_ring!(s.ring, escape_in(&s, observe, phi, kappa, rho0, out))
}

fn escape_in<R: Pid>(
    s: &ScenarioFile,
    observe: &Observe,
    phi: Option<&str>,
    kappa: Option<Rational>,
    rho0: Option<Rational>,
    out: &mut String,
) -> Result<(), CliError> {
    let spec = s.phi.clone();
    let phi: GrowthBound = match (phi, &spec) {
        (Some(text), _) => text.parse().map_err(parse_err)?,
        (None, Some(p)) => p.phi.clone(),
        (None, None) => return Err(CliError::Parse("no growth bound: pass --phi or add a [phi] section".into())),
    };
    let kappa = kappa.or_else(|| spec.as_ref().and_then(|p| p.kappa.clone()));
    let traced = trace_of::<R>(s, observe)?;
    let (inst, _) = prepare::<R>(s)?;
    out.push_str(&check_h1(&phi, &inst.tuple).to_string());
    let rho0 = rho0
        .or_else(|| spec.as_ref().and_then(|p| p.rho0.clone()))
        .or_else(|| traced.as_ref().and_then(|(_, _, _, t)| t.initial_value().cloned()));
    match (&kappa, &rho0) {
        (Some(k), Some(r)) => out.push_str(&check_h2(&phi, k, r).map_err(computation)?.to_string()),
        (None, _) => out.push_str("H2: not checked (no kappa)\n"),
        (Some(_), None) => out.push_str("H2: not checked (no rho0)\n"),
    }
    match traced {
        Some((_, _, class, trace)) => {
            let _ = writeln!(out, "class [{class}]: {} transfer(s)", trace.transfers.len());
            out.push_str(&escape_budget(&trace, &phi).map_err(computation)?.to_string());
        }
        None => out.push_str("budget: no class to track\n"),
    }
    Ok(())
}

pub fn cascade(
    n: usize,
    ratio: &Rational,
    base: &Rational,
    delta: &Rational,
    ring: CoefficientRing,
    dir: Option<&Path>,
    out: &mut String,
) -> Result<(), CliError> {
    let s = over_ring!(ring, cascade_in(n, ratio, base, delta))?;
    let text = s.to_string();
    let back = parse_str(&text).map_err(|e| computation(format!("generated scenario does not re-parse: {e}")))?;
    if back != s {
        return Err(computation("generated scenario does not round-trip"));
    }
    match dir {
        None => out.push_str(&text),
        Some(dir) => {
            fs::create_dir_all(dir).map_err(computation)?;
            let path = dir.join(format!("{}.scn", file_stem(&s.name)));
            fs::write(&path, &text).map_err(computation)?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
    }
    Ok(())
}

fn cascade_in<R: Pid>(n: usize, ratio: &Rational, base: &Rational, delta: &Rational) -> Result<ScenarioFile, CliError> {
    let d = R::from_rational(delta)
        .ok_or_else(|| CliError::Parse(format!("delta {} is not in {}", format_rational(delta), R::RING.name())))?;
    let c = build_cascade::<R>(n, base, ratio, &d).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(c.to_scenario())
}

pub fn rabinowitz(input: &Input, kappa: Option<Rational>, rho0: Option<Rational>, out: &mut String) -> Result<(), CliError> {
    let s = load(input)?;
    header(&s, out);
    let spec = s.rabinowitz.clone().ok_or_else(|| CliError::Parse("no [rabinowitz] section".into()))?;
    let model = &spec.model;
    model.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    if model.class == TameClass::Tame && model.c == restricted_contact_constant().0 {
        let _ = writeln!(out, "tameness constant: {}", restricted_contact_constant().1);
    }
    let _ = writeln!(out, "# r\teta bound\tintegrated\trelative error");
    for k in 0..=4 {
        let r = k as f64 / 4.0;
        let b = eta_bound(model, 1.0, r).map_err(computation)?;
        let _ = writeln!(out, "{r:.2}\t{:.9}\t{:.9}\t{:.2e}", b.bound, b.numeric, b.relative_error());
    }
    let rho0 = rho0.or(spec.rho0.clone());
    let kappa = kappa.or(spec.kappa.clone());
    let c = classify_invariance(model, rho0.as_ref(), kappa.as_ref()).map_err(|e| match e {
        cerfmorse::rabinowitz::RabinowitzError::MissingClassData(_) => CliError::Validation(e.to_string()),
        e => computation(e),
    })?;
    out.push_str(&c.to_string());
    Ok(())
}

pub fn plot(input: &Input, observe: &Observe, dir: &Path, out: &mut String) -> Result<(), CliError> {
    let s = load(input)?;
    over_ring!(s.ring, plot_in(&s, observe, dir, out))
}

fn plot_in<R: Pid>(s: &ScenarioFile, observe: &Observe, dir: &Path, out: &mut String) -> Result<(), CliError> {
    let (inst, _) = prepare::<R>(s)?;
    let window = match observe.window.as_deref() {
        Some(text) => Some(Window::parse(text).map_err(parse_err)?),
        None => inst.window.clone(),
    };
    let events: Vec<Rational> = inst.events.iter().map(|e| e.r.clone()).collect();
    let cerf = svg::cerf_diagram(&s.name, &inst.tuple, &events, window.as_ref()).map_err(computation)?;
    fs::create_dir_all(dir).map_err(computation)?;
    let stem = file_stem(&s.name);
    let mut written: Vec<PathBuf> = Vec::new();
    let path = dir.join(format!("{stem}-cerf.svg"));
    fs::write(&path, cerf).map_err(computation)?;
    written.push(path);
    if let Some((_, _, class, trace)) = trace_of::<R>(s, observe)? {
        let path = dir.join(format!("{stem}-trace.svg"));
        fs::write(&path, svg::spectral_trace(&format!("{} [{class}]", s.name), &trace)).map_err(computation)?;
        written.push(path);
    }
    for p in written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(())
}

pub fn fuzz(seed: u64, count: usize, ring: CoefficientRing, dir: Option<&Path>, out: &mut String) -> Result<(), CliError> {
    over_ring!(ring, fuzz_in(seed, count, dir, out))
}

/// Problems found in one random scenario.
fn check_scenario<R: Pid>(s: &ScenarioFile) -> Vec<String> {
    let mut problems = Vec::new();
    match parse_str(&s.to_string()) {
        Ok(back) if &back == s => {}
        Ok(_) => problems.push("round trip changed the scenario".to_string()),
        Err(e) => problems.push(format!("round trip: {e}")),
    }
    let inst = match s.instantiate::<R>() {
        Ok(i) => i,
        Err(e) => return vec![e.to_string()],
    };
    let log = match evolve_log(&inst.gamma0, &inst.events, &inst.tuple) {
        Ok(l) => l,
        Err(e) => return vec![e.to_string()],
    };
    for iv in &log.intervals {
        if !iv.counter.squares_to_zero() {
            problems.push(format!("∂² ≠ 0 on interval {}", iv.index));
        }
    }
    for step in &log.steps {
        if let Err(e) = continuation_map(step, &log) {
            problems.push(format!("event {}: {e}", step.event.id));
        }
        let before = homology_of(&log.intervals[step.before].counter.boundary());
        let after = homology_of(&log.intervals[step.after].counter.boundary());
        match (before, after) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(a), Ok(b)) => problems.push(format!("event {}: homology {a} became {b}", step.event.id)),
            (Err(e), _) | (_, Err(e)) => problems.push(e.to_string()),
        }
    }
    problems
}

fn fuzz_in<R: Pid>(seed: u64, count: usize, dir: Option<&Path>, out: &mut String) -> Result<(), CliError> {
    let suite = random_suite::<R>(seed, count, &GeneratorConfig::default());
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(computation)?;
    }
    let mut failures = 0;
    let mut histogram = [0usize; 7];
    for s in &suite {
        histogram[s.events.len().min(6)] += 1;
        let problems = check_scenario::<R>(s);
        if !problems.is_empty() {
            failures += 1;
            for p in &problems {
                let _ = writeln!(out, "{}: {p}", s.name);
            }
        }
        if let Some(dir) = dir {
            fs::write(dir.join(format!("{}.scn", file_stem(&s.name))), s.to_string()).map_err(computation)?;
        }
    }
    let _ = writeln!(
        out,
        "fuzz seed {seed} over {}: {} scenarios, events {:?}, {failures} failing",
        R::RING.name(),
        suite.len(),
        histogram
    );
    if suite.len() < count {
        return Err(computation(format!("generator produced {} of {count} scenarios", suite.len())));
    }
    if failures > 0 {
        return Err(computation(format!("{failures} scenario(s) violate an invariant")));
    }
    Ok(())
}
