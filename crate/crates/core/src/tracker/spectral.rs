use std::fmt;

use super::{Chain, TrackerError, Window};
use crate::algebra::{format_rational, smith_normal_form, Pid, SparseMatrix};
use crate::algebra::snf::solve_with;
use crate::bifurcation::{EvolutionLog, FlowCounter};
use crate::cerf::{ArcId, CerfTuple};
use crate::Rational;

/// ρ of a class together with a representative attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralValue<R: Pid> {
    /// `None` stands for −∞ (the zero class).
    pub value: Option<Rational>,
    pub representative: Chain<R>,
    /// Generator of largest action in the representative.
    pub top: Option<ArcId>,
}

impl<R: Pid> fmt::Display for SpectralValue<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            None => f.write_str("-inf"),
            Some(v) => write!(f, "{} via {}", format_rational(v), self.representative),
        }
    }
}

/// Exact ρ of the class of `alpha` in the complex `fc` at `r`: the least
/// action level `v` with `alpha ∈ span{c : F3(c) ≤ v} + im ∂`.
pub fn spectral_value_in<R: Pid>(
    fc: &FlowCounter<R>,
    t: &CerfTuple,
    r: &Rational,
    alpha: &[R],
) -> Result<SpectralValue<R>, TrackerError> {
    let d = fc.boundary();
    let n = fc.len();
    if d.mul_vec(alpha)?.iter().any(|x| !x.is_zero()) {
        return Err(TrackerError::NotACycle);
    }
    let heights: Vec<Rational> = fc
        .basis()
        .iter()
        .map(|c| t.f3(c, r).ok_or_else(|| TrackerError::UnknownArc(c.clone())))
        .collect::<Result<_, _>>()?;
    let mut levels = heights.clone();
    levels.sort();
    levels.dedup();

    // columns of d, then unit vectors of the generators at or below a level
    let attempt = |level: Option<&Rational>| -> Option<Vec<R>> {
        let low: Vec<usize> = match level {
            Some(v) => (0..n).filter(|&i| &heights[i] <= v).collect(),
            None => Vec::new(),
        };
        let mut e = SparseMatrix::zeros(n, low.len());
        for (j, &i) in low.iter().enumerate() {
            e.set(i, j, R::one());
        }
        let m = d.hconcat(&e).ok()?;
        let x = solve_with(&smith_normal_form(&m), alpha)?;
        let y = &x[..n];
        let dy = d.mul_vec(y).ok()?;
        Some(alpha.iter().zip(dy).map(|(a, b)| a.clone() - b).collect())
    };

    if attempt(None).is_some() {
        return Ok(SpectralValue { value: None, representative: Chain::zero(), top: None });
    }
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    let mut best = attempt(Some(&levels[hi])).ok_or(TrackerError::NotACycle)?;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match attempt(Some(&levels[mid])) {
            Some(rep) => {
                hi = mid;
                best = rep;
            }
            None => lo = mid + 1,
        }
    }
    let value = levels[hi].clone();
    let top = (0..n).find(|&i| !best[i].is_zero() && heights[i] == value).map(|i| fc.basis()[i].clone());
    Ok(SpectralValue { value: Some(value), representative: Chain::from_vec(fc.basis(), &best), top })
}

/// ρ of `class` at `r`, computed inside the window complex.
pub fn spectral_value<R: Pid>(
    t: &CerfTuple,
    log: &EvolutionLog<R>,
    r: &Rational,
    w: &Window,
    class: &Chain<R>,
) -> Result<SpectralValue<R>, TrackerError> {
    let fc = super::window_complex(t, log, r, w)?;
    let alpha = class.to_vec(fc.basis())?;
    spectral_value_in(&fc, t, r, &alpha)
}
