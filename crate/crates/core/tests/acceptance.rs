//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure or when the whole run exceeds its time limit.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cerfmorse::algebra::{homology, Pid, SparseMatrix, Z2};
use cerfmorse::bifurcation::{evolve, EvolutionLog};
use cerfmorse::cerf::{legendrian_lift, validate_cerf, IssueKind, Polynomial, PolynomialFront, VertexKind};
use cerfmorse::escape::{build_cascade, check_h1, escape_budget, BudgetVerdict, GrowthBound};
use cerfmorse::rabinowitz::{classify_invariance, eta_bound, HomotopyModel, InvarianceVerdict, TameClass};
use cerfmorse::scenario::{parse_scenario, random_suite, GeneratorConfig, Instance, ScenarioFile};
use cerfmorse::tracker::{
    continuation_map, filtered_homology, spectral_value_in, track_class, window_complex, ChainMapBundle, Window,
};
use cerfmorse::{BigInt, Rational};
use common::*;
use num_traits::{One, Zero};

const SUITE_SIZE: usize = 1000;
const TIME_LIMIT: Duration = Duration::from_secs(60);

struct Suites {
    z2: Vec<ScenarioFile>,
    z: Vec<ScenarioFile>,
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn build<R: Pid>(s: &ScenarioFile) -> Result<(Instance<R>, EvolutionLog<R>), String> {
    let inst = s.instantiate::<R>().map_err(|e| format!("{}: {e}", s.name))?;
    let log = evolve(&inst.gamma0, &inst.events, &inst.tuple).map_err(|e| format!("{}: {e}", s.name))?;
    Ok((inst, log))
}

fn criterion_1_suite<R: Pid>(suite: &[ScenarioFile]) -> Result<usize, String> {
    let mut intervals = 0;
    for s in suite {
        ensure(s.arcs.len() <= 10 && s.events.len() <= 6, || format!("{}: too large", s.name))?;
        let (inst, log) = build::<R>(s)?;
        for iv in &log.intervals {
            ensure(gamma1_holds(&iv.counter, &inst.tuple, &iv.lo, &iv.hi), || {
                format!("{}: γ1 fails on interval {}", s.name, iv.index)
            })?;
            ensure(squares_to_zero(&iv.counter), || format!("{}: ∂² ≠ 0 on interval {}", s.name, iv.index))?;
            intervals += 1;
        }
    }
    Ok(intervals)
}

fn criterion_1(suites: &Suites) -> Outcome {
    let a = criterion_1_suite::<Z2>(&suites.z2)?;
    let b = criterion_1_suite::<BigInt>(&suites.z)?;
    let n = suites.z2.len() + suites.z.len();
    ensure(suites.z2.len() == SUITE_SIZE && suites.z.len() == SUITE_SIZE, || "suite incomplete".into())?;
    Ok(format!("{n} scenarios, {} intervals", a + b))
}

fn dense<R: Pid>(m: &SparseMatrix<R>) -> Vec<Vec<R>> {
    m.to_dense()
}

fn check_maps<R: Pid>(s: &ScenarioFile, log: &EvolutionLog<R>) -> Result<(), String> {
    let step = &log.steps[0];
    let before = dense_boundary(&log.intervals[step.before].counter);
    let after = dense_boundary(&log.intervals[step.after].counter);
    let bundle = continuation_map(step, log).map_err(|e| format!("{}: {e}", s.name))?;
    match bundle {
        ChainMapBundle::HandleSlide { a, a_inv } => {
            let (a, a_inv) = (dense(&a), dense(&a_inv));
            ensure(dense_eq(&dense_mul(&a, &after), &dense_mul(&before, &a)), || format!("{}: A∂⁺ ≠ ∂⁻A", s.name))?;
            ensure(dense_eq(&dense_mul(&a, &a_inv), &identity(a.len())), || format!("{}: A not invertible", s.name))
        }
        ChainMapBundle::Pair { kind, i, p, d } => {
            let (small, big) = match kind {
                VertexKind::Birth => (&before, &after),
                VertexKind::Death => (&after, &before),
            };
            let (i, p, d) = (dense(&i), dense(&p), dense(&d));
            ensure(dense_eq(&dense_mul(big, &i), &dense_mul(&i, small)), || format!("{}: i not a chain map", s.name))?;
            ensure(dense_eq(&dense_mul(small, &p), &dense_mul(&p, big)), || format!("{}: p not a chain map", s.name))?;
            ensure(dense_eq(&dense_mul(&p, &i), &identity(small.len())), || format!("{}: p∘i ≠ id", s.name))?;
            let lhs = dense_add(&dense_mul(big, &d), &dense_mul(&d, big));
            let rhs = dense_sub(&identity(big.len()), &dense_mul(&i, &p));
            ensure(dense_eq(&lhs, &rhs), || format!("{}: ∂D + D∂ ≠ Id − i∘p", s.name))
        }
    }
}

fn criterion_2_suite<R: Pid>(suite: &[ScenarioFile]) -> Result<usize, String> {
    let mut count = 0;
    for s in suite.iter().filter(|s| s.events.len() == 1) {
        let (inst, log) = build::<R>(s)?;
        let step = &log.steps[0];
        let w = Window::wide(&inst.tuple);
        let (lo, hi) = (&log.intervals[step.before], &log.intervals[step.after]);
        let h0 = filtered_homology(&inst.tuple, &log, &lo.midpoint(), &w).map_err(|e| e.to_string())?;
        let h1 = filtered_homology(&inst.tuple, &log, &hi.midpoint(), &w).map_err(|e| e.to_string())?;
        ensure(h0.free_rank == h1.free_rank && h0.torsion == h1.torsion, || {
            format!("{}: homology {h0} became {h1}", s.name)
        })?;
        check_maps(s, &log)?;
        count += 1;
    }
    Ok(count)
}

fn criterion_2(suites: &Suites) -> Outcome {
    let a = criterion_2_suite::<Z2>(&suites.z2)?;
    let b = criterion_2_suite::<BigInt>(&suites.z)?;
    ensure(a > 0 && b > 0, || "no single-event scenarios".into())?;
    Ok(format!("{a} over Z2, {b} over Z"))
}

fn criterion_3() -> Outcome {
    let s = load("figure3");
    let (inst, log) = build::<Z2>(&s)?;
    let after = &log.intervals[1].counter;
    ensure(after.get(&"c1".into(), &"c3".into()) == Z2::one(), || "γ⁺(c1,c3) ≠ 1".into())?;
    for iv in &log.intervals {
        let cols = z2_columns(&iv.counter);
        ensure(z2_homology_rank(&cols) == 1, || format!("rank ≠ 1 on interval {}", iv.index))?;
        let h = homology(&iv.counter.boundary()).map_err(|e| e.to_string())?;
        ensure(h.free_rank == 1, || format!("library rank {h}"))?;
    }
    let class = inst.class.clone().ok_or("figure3 has no [track] class")?;
    let trace = track_class(&inst.tuple, &log, &class, &Window::wide(&inst.tuple)).map_err(|e| e.to_string())?;
    let last = trace.segments.last().unwrap();
    ensure(last.representative.to_string() == "c1 + c2", || format!("rep {}", last.representative))?;
    ensure(trace.transfers.len() == 1, || format!("{} transfers", trace.transfers.len()))?;
    let t = &trace.transfers[0];
    // crossing of F3(c1) = 2 with F3(c2) = 1 + (r − 3/10)·20/7
    let crossing = q("3/10") + q("7/20");
    ensure(t.r == crossing && t.r == q("0.65"), || format!("transfer at {}", t.r))?;
    ensure(t.from == Some("c1".into()) && t.to == Some("c2".into()), || "wrong transfer arcs".into())?;
    Ok("γ⁺(c1,c3) = 1, [c1] → [c1 + c2], rank 1, transfer c1 → c2 at 13/20".into())
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for n in [3usize, 5, 8] {
        let start = Instant::now();
        let c = build_cascade::<BigInt>(n, &Rational::one(), &q("2"), &BigInt::one()).map_err(|e| e.to_string())?;
        let trace = c.trace().map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let initial = trace.initial_value().cloned().ok_or("no initial value")?;
        let final_value = trace.final_value().cloned().ok_or("no final value")?;
        let target = &initial * Rational::from_integer(BigInt::from(2).pow(n as u32 - 1));
        ensure(final_value >= target, || format!("n = {n}: final {final_value} < {target}"))?;
        let reached = trace
            .segments
            .iter()
            .find(|s| s.rho_hi.as_ref() == Some(&final_value))
            .map(|s| s.hi.clone())
            .ok_or("final value never reached")?;
        ensure(reached < Rational::one(), || format!("n = {n}: final value only at r = {reached}"))?;
        if n == 8 {
            ensure(elapsed < Duration::from_secs(5), || format!("n = 8 took {elapsed:?}"))?;
        }
        notes.push(format!("n={n}: ρ {initial} → {final_value} by r = {reached} ({:.0?})", elapsed));
    }
    Ok(notes.join("; "))
}

/// `Some(true)` when `x > e`, `Some(false)` when `x < e`, `None` inside
/// the enclosure.
fn exceeds_e(x: &Rational) -> Option<bool> {
    if x > &q("2.718281829") {
        Some(true)
    } else if x < &q("2.718281828") {
        Some(false)
    } else {
        None
    }
}

fn criterion_5() -> Outcome {
    let (mut passing, mut violating) = (0, 0);
    for ratio in ["3/2", "2", "3"] {
        let ratio = q(ratio);
        for n in 1..=6usize {
            let c = build_cascade::<BigInt>(n, &Rational::one(), &ratio, &BigInt::one()).map_err(|e| e.to_string())?;
            let trace = c.trace().map_err(|e| e.to_string())?;
            for k in 0..=16u32 {
                let coeff = Rational::from_integer(BigInt::from(2).pow(k));
                let phi = GrowthBound::linear(coeff);
                let h1 = check_h1(&phi, &c.tuple);
                let b = escape_budget(&trace, &phi).map_err(|e| e.to_string())?;
                ensure(b.exact, || "linear budget not decided exactly".into())?;
                if h1.holds() {
                    passing += 1;
                    ensure(b.verdict == BudgetVerdict::WithinUnitTime, || {
                        format!("n={n} ratio={ratio} Φ={phi} passes H1 but costs {}", b.cumulative)
                    })?;
                } else if k == 0 {
                    // Φ = |s|: cost (n−1)·ln(ratio) > 1 iff ratio^(n−1) > e
                    let growth = num_traits::pow(ratio.clone(), n - 1);
                    if let Some(over) = exceeds_e(&growth) {
                        let infeasible = b.verdict == BudgetVerdict::InfeasibleWithinUnitTime;
                        ensure(infeasible == over, || format!("n={n} ratio={ratio}: verdict {:?}", b.verdict))?;
                        if over {
                            violating += 1;
                        }
                    }
                }
            }
        }
    }
    ensure(passing > 0 && violating > 0, || format!("{passing} passing, {violating} violating"))?;
    Ok(format!("{passing} H1-passing pairs within budget, {violating} H1-violating cascades with cost > 1"))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_6() -> Outcome {
    let mut checks = 0;
    for c in ["1/2", "1", "3"] {
        let c = q(c);
        for kappa in ["1/2", "1", "2"] {
            let kappa = q(kappa);
            let phi = GrowthBound::square(c.clone());
            let from_one = phi.tail_integral(&Rational::one()).map_err(|e| e.to_string())?.to_f64();
            let expected = 1.0 / cerfmorse::algebra::ring::rational_to_f64(&c);
            ensure(rel(from_one, expected) <= 1e-12, || format!("∫₁^∞ for c={c}: {from_one}"))?;
            let threshold = (&c + &c * &kappa).recip();
            let v = phi.tail_integral(&threshold).map_err(|e| e.to_string())?.to_f64();
            let want = 1.0 + cerfmorse::algebra::ring::rational_to_f64(&kappa);
            ensure(rel(v, want) <= 1e-12, || format!("∫ from 1/(c+cκ) for c={c} κ={kappa}: {v}"))?;
            let model = HomotopyModel::new(Rational::one(), c.clone(), TameClass::SquareTame).map_err(|e| e.to_string())?;
            let eps = q("1/1000000000");
            for sign in [Rational::one(), -Rational::one()] {
                for (rho, survives) in
                    [(threshold.clone() - &eps, true), (threshold.clone(), true), (threshold.clone() + &eps, false)]
                {
                    let rho = &sign * rho;
                    let cl = classify_invariance(&model, Some(&rho), Some(&kappa)).map_err(|e| e.to_string())?;
                    let got = matches!(cl.verdict, InvarianceVerdict::ClassSurvives { .. });
                    ensure(got == survives && cl.conditional_on_h3, || {
                        format!("c={c} κ={kappa} ρ0={rho}: {:?}", cl.verdict)
                    })?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("9 (c, κ) pairs, {checks} classifications around |ρ0| = 1/(c+cκ)"))
}

/// η' = 𝔥η by the trapezoidal rule, solved exactly per step.
fn trapezoid(rate: f64, eta0: f64, steps: usize) -> f64 {
    let h = 1.0 / steps as f64;
    let factor = (1.0 + rate * h / 2.0) / (1.0 - rate * h / 2.0);
    (0..steps).fold(eta0, |y, _| y * factor)
}

fn criterion_7() -> Outcome {
    let mut out = Vec::new();
    for hsup in [0i64, 1, 5] {
        let model = HomotopyModel::new(Rational::from_integer(hsup.into()), Rational::one(), TameClass::Tame)
            .map_err(|e| e.to_string())?;
        let b = eta_bound(&model, 1.0, 1.0).map_err(|e| e.to_string())?;
        let closed = (hsup as f64).exp();
        let oracle = trapezoid(hsup as f64, 1.0, 200_000);
        ensure(rel(b.bound, closed) <= 1e-12, || format!("𝔥={hsup}: bound {}", b.bound))?;
        ensure(rel(b.numeric, closed) <= 1e-6, || format!("𝔥={hsup}: integration {}", b.numeric))?;
        ensure(rel(oracle, closed) <= 1e-6, || format!("𝔥={hsup}: trapezoid {oracle}"))?;
        out.push(format!("𝔥={hsup}: {:.2e}", b.relative_error()));
    }
    Ok(out.join(", "))
}

/// Constant windows between consecutive action levels at `r`.
fn level_windows(levels: &[Rational]) -> Vec<Window> {
    let mut cuts = Vec::new();
    if let (Some(first), Some(last)) = (levels.first(), levels.last()) {
        cuts.push(first - Rational::one());
        let two = Rational::from_integer(2.into());
        cuts.extend(levels.windows(2).map(|w| (&w[0] + &w[1]) / &two));
        cuts.push(last + Rational::one());
    }
    let mut out = Vec::new();
    for (i, a) in cuts.iter().enumerate() {
        for b in &cuts[i + 1..] {
            out.push(Window::constant(a.clone(), b.clone()).unwrap());
        }
    }
    out
}

fn criterion_8(suites: &Suites) -> Outcome {
    let (mut windows, mut values, mut skipped) = (0usize, 0usize, 0usize);
    for s in &suites.z2 {
        let (inst, log) = build::<Z2>(s)?;
        for iv in &log.intervals {
            let r = iv.midpoint();
            let mut levels: Vec<Rational> = iv.counter.basis().iter().map(|c| inst.tuple.f3(c, &r).unwrap()).collect();
            levels.sort();
            levels.dedup();
            let mut ws = level_windows(&levels);
            ws.push(Window::wide(&inst.tuple));
            for w in &ws {
                let fc = window_complex(&inst.tuple, &log, &r, w).map_err(|e| e.to_string())?;
                if fc.len() > 12 {
                    skipped += 1;
                    continue;
                }
                let cols = z2_columns(&fc);
                let h = homology(&fc.boundary()).map_err(|e| e.to_string())?;
                let want = z2_homology_rank(&cols);
                ensure(h.free_rank == want, || format!("{} r={r} {w}: rank {} vs {want}", s.name, h.free_rank))?;
                windows += 1;
                let heights: Vec<Rational> = fc.basis().iter().map(|c| inst.tuple.f3(c, &r).unwrap()).collect();
                for alpha in z2_cycles(&cols).into_iter().take(16) {
                    let got = spectral_value_in(&fc, &inst.tuple, &r, &z2_vector(alpha, fc.len()))
                        .map_err(|e| e.to_string())?;
                    let want = z2_spectral_value(&cols, &heights, alpha);
                    ensure(got.value == want, || format!("{} r={r} {w}: ρ {:?} vs {want:?}", s.name, got.value))?;
                    values += 1;
                }
            }
        }
    }
    ensure(skipped == 0 || windows > 0, || "no window small enough".into())?;
    Ok(format!("{windows} windows, {values} spectral values, {skipped} windows above 12 generators skipped"))
}

fn criterion_9() -> Outcome {
    let s = load("escaping-point");
    let report = validate_cerf(&s.tuple().map_err(|e| e.to_string())?);
    let issue = report.violations.iter().find(|v| v.kind == IssueKind::NonCompact).ok_or("escape not rejected")?;
    ensure(issue.message.contains("C1"), || format!("message does not cite C1: {}", issue.message))?;

    let err = parse_scenario(&scenario_path("duplicate-event")).err().ok_or("duplicate events accepted")?;
    ensure(err.to_string().contains("pairwise disjoint"), || format!("message: {err}"))?;

    let front = PolynomialFront { y: Polynomial::from_ints(&[0, 1]), z: Polynomial::from_ints(&[0, 0, 1]) };
    let samples: Vec<Rational> = (-8..=8).map(|k| Rational::new(k.into(), 4.into())).collect();
    let lift = legendrian_lift(&front, &samples).map_err(|e| e.to_string())?;
    for p in &lift.samples {
        let two = Rational::from_integer(2.into());
        ensure(p.x == -(&two * &p.s), || format!("x({}) = {}", p.s, p.x))?;
        // dz − x dy along the curve: z'(s) − x(s)·y'(s) with y' = 1, z' = 2s
        let form = &two * &p.s + &p.x;
        ensure(form.is_zero() && p.contact_residual.is_zero(), || format!("contact form at {}", p.s))?;
    }
    Ok(format!("C1 rejection, disjointness rejection, x = −2s on {} samples", lift.samples.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cfg = GeneratorConfig::default();
    let suites = Suites { z2: random_suite::<Z2>(20_241, SUITE_SIZE, &cfg), z: random_suite::<BigInt>(20_242, SUITE_SIZE, &cfg) };
    println!("random suite: {} + {} scenarios in {:.1?}", suites.z2.len(), suites.z.len(), start.elapsed());

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("γ1 and ∂² = 0 on every interval", Box::new(|| criterion_1(&suites))),
        ("single events preserve homology; continuation identities", Box::new(|| criterion_2(&suites))),
        ("handle-slide fixture", Box::new(criterion_3)),
        ("cascade doubling within unit time", Box::new(criterion_4)),
        ("budget under H1 with linear Φ", Box::new(criterion_5)),
        ("square-tame closed forms and threshold", Box::new(criterion_6)),
        ("Gronwall bound against integration", Box::new(criterion_7)),
        ("homology and ρ against brute force", Box::new(|| criterion_8(&suites))),
        ("validator fixtures and Legendrian lift", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (k, (title, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let (mark, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {mark} {title} [{:.1?}]: {detail}", k + 1, t.elapsed());
    }
    let total = start.elapsed();
    let in_time = total < TIME_LIMIT;
    println!("total {total:.1?} ({})", if in_time { "within limit" } else { "over the 60 s limit" });
    if failed == 0 && in_time {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
