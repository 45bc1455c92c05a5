use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{EscapeError, Family, GrowthBound, IntegralValue};
use crate::algebra::format_rational;
use crate::algebra::ring::rational_to_f64;
use crate::cerf::{ArcId, CerfTuple};
use crate::Rational;

/// A linear piece whose slope exceeds Φ somewhere outside the gap.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeViolation {
    pub arc: ArcId,
    pub piece: usize,
    pub r_lo: Rational,
    pub r_hi: Rational,
    pub slope: Rational,
    /// Smallest Φ over the part of the piece outside the gap; `None` where
    /// Φ is not positive.
    pub phi_min: Option<f64>,
}

impl fmt::Display for SlopeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "arc {} piece {} [{}, {}]: |slope| = {} exceeds min Φ = {}",
            self.arc,
            self.piece,
            format_rational(&self.r_lo),
            format_rational(&self.r_hi),
            format_rational(&self.slope.abs()),
            self.phi_min.map_or("undefined".to_string(), |v| format!("{v:.6}"))
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct H1Report {
    pub phi: GrowthBound,
    pub pieces_checked: usize,
    pub violations: Vec<SlopeViolation>,
    pub upper_diverges: bool,
    pub lower_diverges: bool,
}

impl H1Report {
    pub fn slope_bound_holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn holds(&self) -> bool {
        self.slope_bound_holds() && self.upper_diverges && self.lower_diverges
    }
}

impl fmt::Display for H1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "H1 for Φ = {}: {}", self.phi, if self.holds() { "holds" } else { "fails" })?;
        writeln!(f, "  slope bound: {} pieces checked, {} violations", self.pieces_checked, self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "    {v}")?;
        }
        let d = |b: bool| if b { "diverges" } else { "converges" };
        writeln!(f, "  integral to +inf: {}", d(self.upper_diverges))?;
        writeln!(f, "  integral to -inf: {}", d(self.lower_diverges))
    }
}

/// Values of `[lo, hi]` outside the open gap, as at most two closed ranges.
fn outside_gap(lo: &Rational, hi: &Rational, gap: &Option<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let Some((a, b)) = gap else { return vec![(lo.clone(), hi.clone())] };
    let mut out = Vec::new();
    if lo <= a {
        out.push((lo.clone(), hi.min(a).clone()));
    }
    if hi >= b {
        out.push((lo.max(b).clone(), hi.clone()));
    }
    out
}

fn min_abs(lo: &Rational, hi: &Rational) -> Rational {
    if !lo.is_positive() && !hi.is_negative() {
        Rational::zero()
    } else {
        lo.abs().min(hi.abs())
    }
}

enum PhiMin {
    Exact(Rational),
    Approx(f64),
}

/// Minimum of Φ over the actions `[lo, hi]`. Monotone shapes are decided at
/// the extreme values of |s|; mixed-sign polylog shapes are sampled
/// geometrically in between as well.
fn phi_min(phi: &GrowthBound, lo: &Rational, hi: &Rational) -> Option<PhiMin> {
    let near = min_abs(lo, hi);
    let far = lo.abs().max(hi.abs());
    if let (Some(a), Some(b)) = (phi.eval_exact(&near), phi.eval_exact(&far)) {
        return Some(PhiMin::Exact(a.min(b)));
    }
    let (x0, x1) = (rational_to_f64(&near), rational_to_f64(&far));
    let mut best = phi.eval(x0)?.min(phi.eval(x1)?);
    let monotone = match &phi.family {
        Family::PolyLog { p, q, .. } => {
            let up = !p.is_negative() && q.iter().all(|x| !x.is_negative());
            let down = !p.is_positive() && q.iter().all(|x| !x.is_positive());
            up || down
        }
        _ => true,
    };
    if !monotone && x0 > 0.0 {
        let n = 256;
        let ratio = (x1 / x0).powf(1.0 / n as f64);
        let mut x = x0;
        for _ in 0..n {
            x *= ratio;
            best = best.min(phi.eval(x)?);
        }
    }
    Some(PhiMin::Approx(best))
}

/// Slope bound `|∂F3/∂r| <= Φ(F3)` on every piece, using the smallest Φ over
/// the part of the piece outside the gap, plus divergence of both tails.
pub fn check_h1(phi: &GrowthBound, t: &CerfTuple) -> H1Report {
    let mut violations = Vec::new();
    let mut checked = 0;
    for arc in t.arcs() {
        for (k, (r0, v0, r1, v1)) in arc.profile.pieces().enumerate() {
            checked += 1;
            let slope = (v1 - v0) / (r1 - r0);
            if slope.is_zero() {
                continue;
            }
            let (lo, hi) = if v0 <= v1 { (v0, v1) } else { (v1, v0) };
            for (plo, phi_hi) in outside_gap(lo, hi, &phi.gap) {
                let (ok, min) = match phi_min(phi, &plo, &phi_hi) {
                    Some(PhiMin::Exact(v)) => (slope.abs() <= v, Some(rational_to_f64(&v))),
                    Some(PhiMin::Approx(v)) => (rational_to_f64(&slope.abs()) <= v * (1.0 + 1e-12), Some(v)),
                    None => (false, None),
                };
                if !ok {
                    violations.push(SlopeViolation {
                        arc: arc.id.clone(),
                        piece: k,
                        r_lo: r0.clone(),
                        r_hi: r1.clone(),
                        slope: slope.clone(),
                        phi_min: min,
                    });
                    break;
                }
            }
        }
    }
    let diverges = phi.tail_diverges();
    H1Report { phi: phi.clone(), pieces_checked: checked, violations, upper_diverges: diverges, lower_diverges: diverges }
}

#[derive(Clone, Debug, PartialEq)]
pub struct H2Report {
    pub phi: GrowthBound,
    pub kappa: Rational,
    pub rho0: Rational,
    /// `max{b, ρ0}` and `min{a, ρ0}`.
    pub upper_limit: Rational,
    pub lower_limit: Rational,
    pub upper: IntegralValue,
    pub lower: IntegralValue,
    pub needed: Rational,
}

impl H2Report {
    pub fn holds(&self) -> bool {
        self.upper.at_least(&self.needed) && self.lower.at_least(&self.needed)
    }

    /// Smaller integral minus `1 + κ`.
    pub fn margin(&self) -> f64 {
        self.upper.to_f64().min(self.lower.to_f64()) - rational_to_f64(&self.needed)
    }
}

impl fmt::Display for H2Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "H2 for Φ = {}, κ = {}, ρ0 = {}: {}",
            self.phi,
            format_rational(&self.kappa),
            format_rational(&self.rho0),
            if self.holds() { "holds" } else { "fails" }
        )?;
        writeln!(f, "  ∫ from M = {} to +inf: {}", format_rational(&self.upper_limit), self.upper)?;
        writeln!(f, "  ∫ from -inf to m = {}: {}", format_rational(&self.lower_limit), self.lower)?;
        writeln!(f, "  needed: {}  margin: {:.12}", format_rational(&self.needed), self.margin())
    }
}

/// Both tail integrals beyond the gap and the class's starting value,
/// compared with `1 + κ`.
pub fn check_h2(phi: &GrowthBound, kappa: &Rational, rho0: &Rational) -> Result<H2Report, EscapeError> {
    if !kappa.is_positive() {
        return Err(EscapeError::InvalidParameters("κ must be positive".into()));
    }
    let (a, b) = phi.gap.clone().unwrap_or_else(|| (Rational::zero(), Rational::zero()));
    let upper_limit = b.max(rho0.clone());
    let lower_limit = a.min(rho0.clone());
    let upper = phi.tail_integral(&upper_limit)?;
    let lower = phi.tail_integral(&-lower_limit.clone())?;
    Ok(H2Report {
        phi: phi.clone(),
        kappa: kappa.clone(),
        rho0: rho0.clone(),
        upper_limit,
        lower_limit,
        upper,
        lower,
        needed: Rational::one() + kappa,
    })
}
