use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{EscapeError, Family, GrowthBound, IntegralValue};
use crate::algebra::format_rational;
use crate::algebra::ring::rational_to_f64;
use crate::algebra::Pid;
use crate::tracker::SpectralTrace;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BudgetVerdict {
    /// The climb fits into unit parameter time.
    WithinUnitTime,
    /// The climb needs more than unit parameter time: such a trace cannot
    /// satisfy the slope bound.
    InfeasibleWithinUnitTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// Telescoped lower bound on the parameter time a trace needs.
#[derive(Clone, Debug, PartialEq)]
pub struct EscapeBudget {
    pub phi: GrowthBound,
    pub direction: Direction,
    /// Heights beyond the gap, reflected to be increasing for downward traces.
    pub heights: Vec<Rational>,
    pub steps: Vec<IntegralValue>,
    pub cumulative: IntegralValue,
    pub verdict: BudgetVerdict,
    /// True when the verdict was decided in exact arithmetic.
    pub exact: bool,
    /// Whether climbing on to infinity would cost infinite time.
    pub unbounded_cost_to_infinity: bool,
}

impl fmt::Display for EscapeBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "escape budget for Φ = {} ({:?} trace)", self.phi, self.direction)?;
        writeln!(f, "# step\tfrom\tto\tcost")?;
        for (k, c) in self.steps.iter().enumerate() {
            writeln!(f, "{k}\t{}\t{}\t{c}", format_rational(&self.heights[k]), format_rational(&self.heights[k + 1]))?;
        }
        writeln!(f, "cumulative: {}", self.cumulative)?;
        writeln!(
            f,
            "verdict: {}{}",
            match self.verdict {
                BudgetVerdict::WithinUnitTime => "within unit parameter time",
                BudgetVerdict::InfeasibleWithinUnitTime => "infeasible within unit parameter time",
            },
            if self.exact { " (exact)" } else { "" }
        )?;
        if self.unbounded_cost_to_infinity {
            writeln!(f, "climbing to infinity costs infinite parameter time")
        } else {
            writeln!(f, "climbing to infinity has finite cost: escape is not excluded by the budget")
        }
    }
}

/// Compares `x` with `e^c` exactly by enclosing `e^c` between Taylor
/// partial sums and a geometric tail bound.
pub fn cmp_exp(x: &Rational, c: &Rational) -> Ordering {
    if c.is_negative() {
        // x <=> e^c  iff  1/x <=> e^{-c}, reversed, for positive x
        if !x.is_positive() {
            return Ordering::Less;
        }
        return cmp_exp(&x.recip(), &-c).reverse();
    }
    let mut sum = Rational::one();
    let mut term = Rational::one();
    let mut n = 0u64;
    loop {
        n += 1;
        term = term * c / Rational::from_integer(n.into());
        sum += &term;
        if x < &sum {
            return Ordering::Less;
        }
        // remaining terms are bounded by term·q/(1-q) with q = c/(n+1) < 1
        let q = c / Rational::from_integer((n + 1).into());
        if q < Rational::one() {
            let upper = &sum + &term * &q / (Rational::one() - &q);
            if x > &upper {
                return Ordering::Greater;
            }
        }
        if n > 10_000 {
            return rational_to_f64(x).partial_cmp(&rational_to_f64(c).exp()).unwrap_or(Ordering::Equal);
        }
    }
}

/// Budget of a sequence of heights reached in order.
pub fn budget_from_heights(heights: &[Rational], phi: &GrowthBound) -> Result<EscapeBudget, EscapeError> {
    let zero = Rational::zero();
    let (a, b) = phi.gap.clone().unwrap_or((zero.clone(), zero));
    let direction = match (heights.first(), heights.last()) {
        (Some(x), Some(y)) if y < x => Direction::Down,
        _ => Direction::Up,
    };
    // reflect a downward trace; Φ is even
    let (hs, edge): (Vec<Rational>, Rational) = match direction {
        Direction::Up => (heights.to_vec(), b),
        Direction::Down => (heights.iter().map(|h| -h).collect(), -a),
    };
    let start = hs.iter().position(|h| h >= &edge).unwrap_or(hs.len());
    let mut tail: Vec<Rational> = Vec::new();
    if start > 0 && start < hs.len() {
        tail.push(edge.clone());
    }
    tail.extend(hs[start..].iter().cloned());
    if tail.windows(2).any(|w| w[1] < w[0]) {
        return Err(EscapeError::NonMonotoneTail);
    }
    let mut steps = Vec::new();
    for w in tail.windows(2) {
        steps.push(phi.integral(&w[0], &w[1])?);
    }
    let one = Rational::one();
    let (cumulative, verdict, exact) = match (&phi.family, tail.first(), tail.last()) {
        (_, None, _) | (_, _, None) => (IntegralValue::Exact(Rational::zero()), BudgetVerdict::WithinUnitTime, true),
        (Family::Linear { c }, Some(s0), Some(sn)) if s0.is_positive() && c.is_positive() => {
            // ln(sn/s0)/c > 1  iff  sn/s0 > e^c
            let ratio = sn / s0;
            let over = cmp_exp(&ratio, c) == Ordering::Greater;
            let v = (rational_to_f64(sn).ln() - rational_to_f64(s0).ln()) / rational_to_f64(c);
            (IntegralValue::Approx(v), verdict_of(over), true)
        }
        (Family::Square { c }, Some(s0), Some(sn)) if s0.is_positive() && c.is_positive() => {
            let v = (s0.recip() - sn.recip()) / c;
            let over = v > one;
            (IntegralValue::Exact(v), verdict_of(over), true)
        }
        _ => {
            if steps.iter().any(|s| s.is_infinite()) {
                (IntegralValue::Infinite, BudgetVerdict::InfeasibleWithinUnitTime, true)
            } else {
                let v: f64 = steps.iter().map(|s| s.to_f64()).sum();
                (IntegralValue::Approx(v), verdict_of(v > 1.0), false)
            }
        }
    };
    Ok(EscapeBudget {
        phi: phi.clone(),
        direction,
        heights: tail,
        steps,
        cumulative,
        verdict,
        exact,
        unbounded_cost_to_infinity: phi.tail_diverges(),
    })
}

fn verdict_of(over: bool) -> BudgetVerdict {
    if over {
        BudgetVerdict::InfeasibleWithinUnitTime
    } else {
        BudgetVerdict::WithinUnitTime
    }
}

/// Budget over the transfer heights of a trace.
pub fn escape_budget<R: Pid>(trace: &SpectralTrace<R>, phi: &GrowthBound) -> Result<EscapeBudget, EscapeError> {
    budget_from_heights(&trace.transfer_heights(), phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn exp_comparison() {
        assert_eq!(cmp_exp(&q("2.718281828"), &q("1")), Ordering::Less);
        assert_eq!(cmp_exp(&q("2.718281829"), &q("1")), Ordering::Greater);
        assert_eq!(cmp_exp(&q("7.389"), &q("2")), Ordering::Less);
        assert_eq!(cmp_exp(&q("7.39"), &q("2")), Ordering::Greater);
        assert_eq!(cmp_exp(&q("0.3678794"), &q("-1")), Ordering::Less);
        assert_eq!(cmp_exp(&q("0.3678795"), &q("-1")), Ordering::Greater);
        assert_eq!(cmp_exp(&q("0.999"), &q("0")), Ordering::Less);
        assert_eq!(cmp_exp(&q("1.001"), &q("0")), Ordering::Greater);
    }

    #[test]
    fn constant_trace_costs_nothing() {
        let b = budget_from_heights(&[q("3"), q("3")], &GrowthBound::linear(q("1"))).unwrap();
        assert_eq!(b.verdict, BudgetVerdict::WithinUnitTime);
        assert_eq!(b.cumulative.to_f64(), 0.0);
    }

    #[test]
    fn doubling_heights() {
        let hs: Vec<Rational> = (1..=4).map(|k| Rational::from_integer((1i64 << k).into())).collect();
        let b = budget_from_heights(&hs, &GrowthBound::linear(q("1"))).unwrap();
        assert!((b.cumulative.to_f64() - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(b.verdict, BudgetVerdict::InfeasibleWithinUnitTime);
        let b = budget_from_heights(&hs[..2], &GrowthBound::linear(q("1"))).unwrap();
        assert_eq!(b.verdict, BudgetVerdict::WithinUnitTime);
    }

    #[test]
    fn reflection_and_monotonicity() {
        let down = [q("-2"), q("-4"), q("-8")];
        let b = budget_from_heights(&down, &GrowthBound::linear(q("1"))).unwrap();
        assert_eq!(b.direction, Direction::Down);
        assert!((b.cumulative.to_f64() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(
            budget_from_heights(&[q("2"), q("8"), q("4"), q("16")], &GrowthBound::linear(q("1"))),
            Err(EscapeError::NonMonotoneTail)
        );
    }

    #[test]
    fn square_has_finite_total() {
        let hs: Vec<Rational> = (0..40).map(|k| Rational::from_integer((1i64 << k).into())).collect();
        let b = budget_from_heights(&hs, &GrowthBound::square(q("2"))).unwrap();
        assert!(b.exact);
        assert!(b.cumulative.to_f64() < 0.5);
        assert!(!b.unbounded_cost_to_infinity);
    }
}
