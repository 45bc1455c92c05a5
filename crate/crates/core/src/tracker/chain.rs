use std::collections::BTreeMap;
use std::fmt;

use super::TrackerError;
use crate::algebra::{parse_rational, Pid};
use crate::cerf::ArcId;

/// Finite linear combination of arcs with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain<R: Pid> {
    terms: BTreeMap<ArcId, R>,
}

impl<R: Pid> Default for Chain<R> {
    fn default() -> Self {
        Chain { terms: BTreeMap::new() }
    }
}

impl<R: Pid> Chain<R> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generator(c: impl Into<ArcId>) -> Self {
        let mut out = Self::zero();
        out.add_term(c.into(), R::one());
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (ArcId, R)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (c, v) in terms {
            out.add_term(c, v);
        }
        out
    }

    pub fn add_term(&mut self, c: ArcId, v: R) {
        let sum = self.terms.get(&c).cloned().unwrap_or_else(R::zero) + v;
        if sum.is_zero() {
            self.terms.remove(&c);
        } else {
            self.terms.insert(c, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, c: &ArcId) -> R {
        self.terms.get(c).cloned().unwrap_or_else(R::zero)
    }

    pub fn support(&self) -> Vec<ArcId> {
        self.terms.keys().cloned().collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ArcId, &R)> {
        self.terms.iter()
    }

    /// Coefficient vector on `basis`; fails if the support leaves it.
    pub fn to_vec(&self, basis: &[ArcId]) -> Result<Vec<R>, TrackerError> {
        let mut v = vec![R::zero(); basis.len()];
        for (c, x) in &self.terms {
            let i = basis.binary_search(c).map_err(|_| TrackerError::UnknownArc(c.clone()))?;
            v[i] = x.clone();
        }
        Ok(v)
    }

    pub fn from_vec(basis: &[ArcId], v: &[R]) -> Self {
        Self::from_terms(basis.iter().cloned().zip(v.iter().cloned()))
    }

    /// Parses `c1 - c2 + 2*c3` or `0`; coefficients must lie in `R`.
    pub fn parse(text: &str) -> Result<Self, TrackerError> {
        let bad = |m: String| TrackerError::ParseChain(m);
        let mut out = Self::zero();
        if text.trim() == "0" {
            return Ok(out);
        }
        let spaced = text.replace('-', " - ").replace('+', " + ");
        let mut sign = R::one();
        let mut expect_term = true;
        for tok in spaced.split_whitespace() {
            match tok {
                "+" | "-" => {
                    if tok == "-" {
                        sign = -sign;
                    }
                    expect_term = true;
                }
                _ => {
                    if !expect_term {
                        return Err(bad(format!("missing operator before `{tok}` in `{text}`")));
                    }
                    let (coef, name) = match tok.split_once('*') {
                        Some((k, n)) => {
                            let q = parse_rational(k).ok_or_else(|| bad(format!("bad coefficient `{k}`")))?;
                            let r = R::from_rational(&q)
                                .ok_or_else(|| bad(format!("coefficient `{k}` is not in {}", R::RING.name())))?;
                            (r, n)
                        }
                        None => (R::one(), tok),
                    };
                    if name.is_empty() || !name.chars().all(|ch| ch.is_alphanumeric() || ch == '_' || ch == '.') {
                        return Err(bad(format!("bad arc name `{name}`")));
                    }
                    out.add_term(ArcId::new(name), sign.clone() * coef);
                    sign = R::one();
                    expect_term = false;
                }
            }
        }
        if expect_term {
            return Err(bad(format!("incomplete chain `{text}`")));
        }
        Ok(out)
    }
}

impl<R: Pid> fmt::Display for Chain<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (c, v)) in self.terms.iter().enumerate() {
            let s = v.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, s),
            };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag != "1" {
                write!(f, "{mag}*")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
