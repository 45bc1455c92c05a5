use std::fmt;

use super::ScenarioFile;
use crate::algebra::format_rational;
use crate::bifurcation::EventKind;
use crate::rabinowitz::{TameClass, Variant};

fn cutoff(p: &crate::cerf::Profile) -> String {
    if p.points().iter().all(|(_, v)| v == p.start_value()) {
        format_rational(p.start_value())
    } else {
        p.to_string()
    }
}

/// Writes the scenario back in the file format; `parse_str` of the output
/// gives the same scenario.
impl fmt::Display for ScenarioFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = format_rational;
        writeln!(f, "[scenario]")?;
        writeln!(f, "name = {}", self.name)?;
        writeln!(f, "ring = {}", self.ring.name())?;
        for a in &self.arcs {
            writeln!(f, "\n[arc {}]", a.id)?;
            writeln!(f, "points = {}", a.profile)?;
            writeln!(f, "lo = {}", a.lo_tag)?;
            writeln!(f, "hi = {}", a.hi_tag)?;
        }
        for v in &self.vertices {
            writeln!(f, "\n[vertex {}]", v.id)?;
            writeln!(f, "kind = {}", v.kind)?;
            writeln!(f, "r = {}", q(&v.r))?;
            writeln!(f, "f3 = {}", q(&v.f3))?;
        }
        if !self.gamma.is_empty() {
            writeln!(f, "\n[gamma]")?;
            for (a, b, v) in &self.gamma {
                writeln!(f, "{a} -> {b} = {}", q(v))?;
            }
        }
        for e in &self.events {
            writeln!(f, "\n[event {}]", e.id)?;
            writeln!(f, "r = {}", q(&e.r))?;
            match &e.kind {
                EventKind::HandleSlide { delta } => {
                    writeln!(f, "type = handle-slide")?;
                    for (a, b, v) in delta {
                        writeln!(f, "delta = {a} -> {b} : {}", q(v))?;
                    }
                }
                EventKind::Birth { vertex, pivot, column } => {
                    writeln!(f, "type = birth")?;
                    writeln!(f, "vertex = {vertex}")?;
                    writeln!(f, "pivot = {}", q(pivot))?;
                    for (c, v) in column {
                        writeln!(f, "column = {c} : {}", q(v))?;
                    }
                }
                EventKind::Death { vertex } => {
                    writeln!(f, "type = death")?;
                    writeln!(f, "vertex = {vertex}")?;
                }
            }
        }
        if let Some(w) = &self.window {
            writeln!(f, "\n[window]")?;
            writeln!(f, "a = {}", cutoff(&w.a))?;
            writeln!(f, "b = {}", cutoff(&w.b))?;
        }
        if !self.ladder.is_empty() {
            writeln!(f, "\n[ladder]")?;
            for w in &self.ladder {
                writeln!(f, "step = {w}")?;
            }
        }
        if let Some(p) = &self.phi {
            writeln!(f, "\n[phi]")?;
            writeln!(f, "phi = {}", p.phi)?;
            if let Some(k) = &p.kappa {
                writeln!(f, "kappa = {}", q(k))?;
            }
            if let Some(r) = &p.rho0 {
                writeln!(f, "rho0 = {}", q(r))?;
            }
        }
        if let Some(r) = &self.rabinowitz {
            let m = &r.model;
            writeln!(f, "\n[rabinowitz]")?;
            writeln!(f, "h_sup = {}", q(&m.h_sup))?;
            writeln!(f, "c = {}", q(&m.c))?;
            match m.class {
                TameClass::Tame => writeln!(f, "class = tame")?,
                TameClass::LogTame { depth } => {
                    writeln!(f, "class = logtame")?;
                    writeln!(f, "depth = {depth}")?;
                }
                TameClass::SquareTame => writeln!(f, "class = squaretame")?,
            }
            if let Variant::SymplecticForm { theta, r_const } = &m.variant {
                writeln!(f, "theta = {}", q(theta))?;
                if let Some(c) = r_const {
                    writeln!(f, "r_const = {}", q(c))?;
                }
            }
            if let Some(v) = &r.rho0 {
                writeln!(f, "rho0 = {}", q(v))?;
            }
            if let Some(v) = &r.kappa {
                writeln!(f, "kappa = {}", q(v))?;
            }
        }
        if let Some(t) = &self.track {
            writeln!(f, "\n[track]")?;
            writeln!(f, "class = {t}")?;
        }
        Ok(())
    }
}
