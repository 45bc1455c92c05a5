use std::fmt;

use num_traits::{Signed, Zero};

use crate::algebra::format_rational;
use crate::Rational;

/// Piecewise-linear function given by breakpoints with strictly increasing r.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Profile {
    points: Vec<(Rational, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("a profile needs at least two breakpoints")]
    TooFewPoints,
    #[error("breakpoint parameters must be strictly increasing (at r = {0})")]
    NotIncreasing(String),
}

impl Profile {
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self, ProfileError> {
        if points.len() < 2 {
            return Err(ProfileError::TooFewPoints);
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(ProfileError::NotIncreasing(format_rational(&w[1].0)));
            }
        }
        Ok(Profile { points })
    }

    pub fn constant(lo: Rational, hi: Rational, value: Rational) -> Result<Self, ProfileError> {
        Self::new(vec![(lo, value.clone()), (hi, value)])
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn lo(&self) -> &Rational {
        &self.points[0].0
    }

    pub fn hi(&self) -> &Rational {
        &self.points[self.points.len() - 1].0
    }

    pub fn start_value(&self) -> &Rational {
        &self.points[0].1
    }

    pub fn end_value(&self) -> &Rational {
        &self.points[self.points.len() - 1].1
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo() <= r && r <= self.hi()
    }

    /// Value at `r`, or `None` outside the closed footprint.
    pub fn eval(&self, r: &Rational) -> Option<Rational> {
        if !self.contains(r) {
            return None;
        }
        let k = self.points.partition_point(|(x, _)| x <= r);
        if k == self.points.len() {
            return Some(self.end_value().clone());
        }
        let (x0, y0) = &self.points[k - 1];
        let (x1, y1) = &self.points[k];
        Some(y0 + (y1 - y0) * (r - x0) / (x1 - x0))
    }

    /// Linear pieces as `(r0, v0, r1, v1)`.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, &Rational, &Rational)> {
        self.points.windows(2).map(|w| (&w[0].0, &w[0].1, &w[1].0, &w[1].1))
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.pieces().map(|(r0, v0, r1, v1)| (v1 - v0) / (r1 - r0)).collect()
    }

    /// Breakpoint parameters lying strictly inside `(lo, hi)`.
    pub fn interior_breaks(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        self.points.iter().map(|(r, _)| r.clone()).filter(|r| lo < r && r < hi).collect()
    }

    pub fn min_value(&self) -> &Rational {
        self.points.iter().map(|(_, v)| v).min().expect("nonempty profile")
    }

    pub fn max_value(&self) -> &Rational {
        self.points.iter().map(|(_, v)| v).max().expect("nonempty profile")
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .points
            .iter()
            .map(|(r, v)| format!("{}:{}", format_rational(r), format_rational(v)))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Merged breakpoints of two profiles over the common part of their footprints.
pub fn common_grid(p: &Profile, q: &Profile, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut grid = vec![lo.clone(), hi.clone()];
    grid.extend(p.interior_breaks(lo, hi));
    grid.extend(q.interior_breaks(lo, hi));
    grid.sort();
    grid.dedup();
    grid
}

/// How `p - q` behaves on a closed interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Difference {
    pub grid: Vec<Rational>,
    pub values: Vec<Rational>,
}

impl Difference {
    pub fn of(p: &Profile, q: &Profile, lo: &Rational, hi: &Rational) -> Option<Self> {
        if !(p.contains(lo) && p.contains(hi) && q.contains(lo) && q.contains(hi)) || lo > hi {
            return None;
        }
        let grid = common_grid(p, q, lo, hi);
        let values = grid.iter().map(|r| p.eval(r).unwrap() - q.eval(r).unwrap()).collect();
        Some(Difference { grid, values })
    }

    /// `p > q` throughout the open interval.
    pub fn positive_inside(&self) -> bool {
        let n = self.values.len();
        if self.values.iter().any(|v| v.is_negative()) {
            return false;
        }
        if self.values[1..n - 1].iter().any(|v| v.is_zero()) {
            return false;
        }
        // a single piece vanishing at both ends is identically zero
        !(n == 2 && self.values[0].is_zero() && self.values[1].is_zero())
    }

    /// Zeros of `p - q`: isolated points with a transversality flag, and
    /// maximal segments where the two coincide.
    pub fn zeros(&self) -> Vec<Crossing> {
        let mut out: Vec<Crossing> = Vec::new();
        let n = self.grid.len();
        let mut k = 0;
        while k < n {
            let v = &self.values[k];
            if v.is_zero() {
                let start = k;
                while k + 1 < n && self.values[k + 1].is_zero() {
                    k += 1;
                }
                let before = if start > 0 { sign(&self.values[start - 1]) } else { 0 };
                let after = if k + 1 < n { sign(&self.values[k + 1]) } else { 0 };
                let transverse = start == k && before * after < 0;
                out.push(Crossing {
                    r: self.grid[start].clone(),
                    r_end: (start != k).then(|| self.grid[k].clone()),
                    transverse,
                });
                k += 1;
                continue;
            }
            if k + 1 < n {
                let w = &self.values[k + 1];
                if sign(v) * sign(w) < 0 {
                    let (x0, x1) = (&self.grid[k], &self.grid[k + 1]);
                    let r = x0 + (x1 - x0) * v / (v - w);
                    out.push(Crossing { r, r_end: None, transverse: true });
                }
            }
            k += 1;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub r: Rational,
    /// Set when the two profiles coincide on `[r, r_end]`.
    pub r_end: Option<Rational>,
    pub transverse: bool,
}

fn sign(v: &Rational) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn prof(pts: &[(&str, &str)]) -> Profile {
        Profile::new(pts.iter().map(|(r, v)| (q(r), q(v))).collect()).unwrap()
    }

    #[test]
    fn evaluates_piecewise() {
        let p = prof(&[("0", "0"), ("1/2", "1"), ("1", "0")]);
        assert_eq!(p.eval(&q("1/4")), Some(q("1/2")));
        assert_eq!(p.eval(&q("1")), Some(q("0")));
        assert_eq!(p.eval(&q("2")), None);
        assert_eq!(p.slopes(), vec![q("2"), q("-2")]);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(Profile::new(vec![(q("1"), q("0")), (q("0"), q("0"))]).is_err());
        assert!(Profile::new(vec![(q("0"), q("0"))]).is_err());
    }

    #[test]
    fn crossing_of_rising_line() {
        let flat = prof(&[("0", "2"), ("1", "2")]);
        let rising = prof(&[("0", "1"), ("1", "3")]);
        let d = Difference::of(&rising, &flat, &q("0"), &q("1")).unwrap();
        let zs = d.zeros();
        assert_eq!(zs.len(), 1);
        assert_eq!(zs[0].r, q("1/2"));
        assert!(zs[0].transverse);
        assert!(!d.positive_inside());
    }

    #[test]
    fn tangency_is_not_transverse() {
        let flat = prof(&[("0", "0"), ("1", "0")]);
        let tent = prof(&[("0", "1"), ("1/2", "0"), ("1", "1")]);
        let zs = Difference::of(&tent, &flat, &q("0"), &q("1")).unwrap().zeros();
        assert_eq!(zs.len(), 1);
        assert!(!zs[0].transverse);
    }

    #[test]
    fn positivity_allows_endpoint_contact() {
        let a = prof(&[("0", "0"), ("1", "1")]);
        let b = prof(&[("0", "0"), ("1", "0")]);
        assert!(Difference::of(&a, &b, &q("0"), &q("1")).unwrap().positive_inside());
        assert!(!Difference::of(&b, &b, &q("0"), &q("1")).unwrap().positive_inside());
    }
}
