use std::fmt;

use num_traits::{Signed, Zero};

use super::TrackerError;
use crate::algebra::{format_rational, parse_rational};
use crate::cerf::{CerfTuple, Difference, Profile};
use crate::Rational;

/// Action band `a(r) < s < b(r)` over the whole parameter range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub a: Profile,
    pub b: Profile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Below => "below",
            Side::Above => "above",
        })
    }
}

fn unit() -> (Rational, Rational) {
    (Rational::zero(), Rational::from_integer(1.into()))
}

impl Window {
    pub fn new(a: Profile, b: Profile) -> Result<Self, TrackerError> {
        let (zero, one) = unit();
        for p in [&a, &b] {
            if p.lo() != &zero || p.hi() != &one {
                return Err(TrackerError::InvalidWindow("cutoffs must be defined on all of [0, 1]".into()));
            }
        }
        let d = Difference::of(&b, &a, &zero, &one).expect("both cover [0, 1]");
        if let Some(k) = d.values.iter().position(|v| !v.is_positive()) {
            return Err(TrackerError::InvalidWindow(format!(
                "a >= b at r = {}",
                format_rational(&d.grid[k])
            )));
        }
        Ok(Window { a, b })
    }

    pub fn constant(a: Rational, b: Rational) -> Result<Self, TrackerError> {
        let (zero, one) = unit();
        let pa = Profile::constant(zero.clone(), one.clone(), a).expect("nonempty range");
        let pb = Profile::constant(zero, one, b).expect("nonempty range");
        Self::new(pa, pb)
    }

    /// Constant band one unit beyond every action value of `t`.
    pub fn wide(t: &CerfTuple) -> Self {
        let (lo, hi) = t.f3_range().unwrap_or_else(unit);
        let one = Rational::from_integer(1.into());
        Self::constant(lo - &one, hi + one).expect("lo < hi")
    }

    /// `a=<cutoff>,b=<cutoff>` where a cutoff is a number or a profile
    /// `r:v r:v ...`.
    pub fn parse(text: &str) -> Result<Self, TrackerError> {
        let mut a = None;
        let mut b = None;
        for part in text.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| TrackerError::InvalidWindow(format!("expected key=value, found `{}`", part.trim())))?;
            let p = parse_cutoff(v.trim())?;
            match k.trim() {
                "a" => a = Some(p),
                "b" => b = Some(p),
                other => return Err(TrackerError::InvalidWindow(format!("unknown window key `{other}`"))),
            }
        }
        match (a, b) {
            (Some(a), Some(b)) => Self::new(a, b),
            _ => Err(TrackerError::InvalidWindow("both a and b are required".into())),
        }
    }

    pub fn lower(&self, r: &Rational) -> Rational {
        self.a.eval(r).expect("window covers [0, 1]")
    }

    pub fn upper(&self, r: &Rational) -> Rational {
        self.b.eval(r).expect("window covers [0, 1]")
    }

    pub fn contains(&self, r: &Rational, value: &Rational) -> bool {
        &self.lower(r) < value && value < &self.upper(r)
    }

    /// `self` lies inside `outer`: `outer.a <= a` and `b <= outer.b`.
    pub fn nested_in(&self, outer: &Window) -> bool {
        let (zero, one) = unit();
        let da = Difference::of(&self.a, &outer.a, &zero, &one).expect("covers");
        let db = Difference::of(&outer.b, &self.b, &zero, &one).expect("covers");
        da.values.iter().chain(&db.values).all(|v| !v.is_negative())
    }

    /// Check that neither cutoff meets an arc, with clearance
    /// `1e-9 * (action range)`.
    pub fn validate(&self, t: &CerfTuple) -> Result<(), TrackerError> {
        let margin = match t.f3_range() {
            Some((lo, hi)) if hi > lo => (hi - lo) / Rational::from_integer(1_000_000_000.into()),
            _ => Rational::new(1.into(), 1_000_000_000.into()),
        };
        for arc in t.arcs() {
            for (side, cut) in [(Side::Below, &self.a), (Side::Above, &self.b)] {
                let d = Difference::of(&arc.profile, cut, arc.lo(), arc.hi()).expect("window covers [0, 1]");
                let sign = d.values[0].is_positive();
                for (r, v) in d.grid.iter().zip(&d.values) {
                    if v.is_positive() != sign || v.abs() <= margin {
                        return Err(TrackerError::WindowMeetsDiagram {
                            arc: arc.id.clone(),
                            side,
                            r: format_rational(r),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn parse_cutoff(text: &str) -> Result<Profile, TrackerError> {
    let (zero, one) = unit();
    if let Some(v) = parse_rational(text) {
        return Ok(Profile::constant(zero, one, v).expect("nonempty range"));
    }
    let mut pts = Vec::new();
    for tok in text.split_whitespace() {
        let (r, v) = tok
            .split_once(':')
            .and_then(|(r, v)| Some((parse_rational(r)?, parse_rational(v)?)))
            .ok_or_else(|| TrackerError::InvalidWindow(format!("bad cutoff point `{tok}`")))?;
        pts.push((r, v));
    }
    Profile::new(pts).map_err(|e| TrackerError::InvalidWindow(e.to_string()))
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Profile| {
            if p.points().iter().all(|(_, v)| v == p.start_value()) {
                format_rational(p.start_value())
            } else {
                p.to_string()
            }
        };
        write!(f, "a={},b={}", show(&self.a), show(&self.b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cerf::Arc;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parse_constant_and_profile() {
        let w = Window::parse("a=-1, b=0:3 1:5").unwrap();
        assert_eq!(w.lower(&q("1/2")), q("-1"));
        assert_eq!(w.upper(&q("1/2")), q("4"));
        assert_eq!(Window::parse(&w.to_string()).unwrap(), w);
        assert!(Window::parse("a=2,b=1").is_err());
        assert!(Window::parse("a=0").is_err());
    }

    #[test]
    fn window_must_clear_arcs() {
        let t = CerfTuple::new(vec![Arc::chord("c", Profile::constant(q("0"), q("1"), q("1")).unwrap())], vec![])
            .unwrap();
        assert!(Window::constant(q("0"), q("2")).unwrap().validate(&t).is_ok());
        assert!(Window::constant(q("1/2"), q("1")).unwrap().validate(&t).is_err());
        assert!(Window::parse("a=0, b=0:3 1:1/2").unwrap().validate(&t).is_err());
    }

    #[test]
    fn nesting() {
        let inner = Window::constant(q("0"), q("1")).unwrap();
        let outer = Window::constant(q("-1"), q("2")).unwrap();
        assert!(inner.nested_in(&outer));
        assert!(!outer.nested_in(&inner));
    }
}
