use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::EscapeError;
use crate::algebra::{format_rational, parse_rational};
use crate::algebra::ring::rational_to_f64;
use crate::Rational;

/// Shapes of Φ with a decidable tail integral of 1/Φ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// c|s|
    Linear { c: Rational },
    /// c s²
    Square { c: Rational },
    /// c|s|·L1(|s|)···L_depth(|s|) with L_i the i-fold logarithm
    IterLog { c: Rational, depth: u32 },
    /// k|s|^p · Π L_i(|s|)^{q_i}
    PolyLog { k: Rational, p: Rational, q: Vec<Rational> },
}

/// Φ with its excluded action interval `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthBound {
    pub family: Family,
    pub gap: Option<(Rational, Rational)>,
}

/// Value of an integral of 1/Φ.
#[derive(Clone, Debug, PartialEq)]
pub enum IntegralValue {
    Infinite,
    Exact(Rational),
    Approx(f64),
}

impl IntegralValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            IntegralValue::Infinite => f64::INFINITY,
            IntegralValue::Exact(q) => rational_to_f64(q),
            IntegralValue::Approx(x) => *x,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, IntegralValue::Infinite)
    }

    /// `self >= bound`, exactly when both sides are exact.
    pub fn at_least(&self, bound: &Rational) -> bool {
        match self {
            IntegralValue::Infinite => true,
            IntegralValue::Exact(q) => q >= bound,
            IntegralValue::Approx(x) => *x >= rational_to_f64(bound),
        }
    }
}

impl fmt::Display for IntegralValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegralValue::Infinite => f.write_str("inf"),
            IntegralValue::Exact(q) => write!(f, "{} (= {:.12})", format_rational(q), rational_to_f64(q)),
            IntegralValue::Approx(x) => write!(f, "{x:.12}"),
        }
    }
}

/// `L_i(x)`: `L_0 = x`, `L_{i+1} = ln L_i`; `None` once an argument leaves
/// the positive reals.
pub fn iterated_log(x: f64, i: u32) -> Option<f64> {
    let mut v = x;
    for _ in 0..i {
        if v <= 0.0 {
            return None;
        }
        v = v.ln();
    }
    Some(v)
}

/// Where `L_1 ... L_depth` are all positive: `|s| > exp^(depth-1)(1)`.
pub fn log_threshold(depth: u32) -> f64 {
    if depth == 0 {
        return 0.0;
    }
    let mut t = 1.0f64;
    for _ in 1..depth {
        t = t.exp();
    }
    t
}

impl GrowthBound {
    pub fn new(family: Family) -> Self {
        GrowthBound { family, gap: None }
    }

    pub fn with_gap(mut self, a: Rational, b: Rational) -> Self {
        self.gap = Some((a, b));
        self
    }

    pub fn linear(c: Rational) -> Self {
        Self::new(Family::Linear { c })
    }

    pub fn square(c: Rational) -> Self {
        Self::new(Family::Square { c })
    }

    pub fn iterlog(c: Rational, depth: u32) -> Self {
        Self::new(Family::IterLog { c, depth })
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Linear { .. } => "linear",
            Family::Square { .. } => "square",
            Family::IterLog { .. } => "iterlog",
            Family::PolyLog { .. } => "polylog",
        }
    }

    fn log_depth(&self) -> u32 {
        match &self.family {
            Family::IterLog { depth, .. } => *depth,
            Family::PolyLog { q, .. } => q.iter().rposition(|x| !x.is_zero()).map_or(0, |k| k as u32 + 1),
            _ => 0,
        }
    }

    /// Smallest |s| beyond which Φ is defined and positive.
    pub fn domain_threshold(&self) -> f64 {
        log_threshold(self.log_depth())
    }

    fn in_domain(&self, s: f64) -> bool {
        match &self.family {
            Family::Linear { .. } | Family::Square { .. } => true,
            _ if self.log_depth() == 0 => s.abs() > 0.0,
            _ => s.abs() > self.domain_threshold(),
        }
    }

    /// Φ(s) exactly, for the families without logarithms.
    pub fn eval_exact(&self, s: &Rational) -> Option<Rational> {
        match &self.family {
            Family::Linear { c } => Some(c * s.abs()),
            Family::Square { c } => Some(c * s * s),
            Family::PolyLog { k, p, q } if q.iter().all(|x| x.is_zero()) && p.is_integer() => {
                let e = p.to_integer();
                let e: i32 = i32::try_from(&e).ok()?;
                if s.is_zero() && e <= 0 {
                    return None;
                }
                Some(k * num_traits::pow::Pow::pow(s.abs(), e))
            }
            _ => None,
        }
    }

    /// Φ(s) in floating point; `None` outside the domain.
    pub fn eval(&self, s: f64) -> Option<f64> {
        if !self.in_domain(s) {
            return None;
        }
        let x = s.abs();
        let r = rational_to_f64;
        Some(match &self.family {
            Family::Linear { c } => r(c) * x,
            Family::Square { c } => r(c) * x * x,
            Family::IterLog { c, depth } => {
                let mut v = r(c) * x;
                for i in 1..=*depth {
                    v *= iterated_log(x, i)?;
                }
                v
            }
            Family::PolyLog { k, p, q } => {
                let mut v = r(k) * x.powf(r(p));
                for (i, qi) in q.iter().enumerate() {
                    if !qi.is_zero() {
                        v *= iterated_log(x, i as u32 + 1)?.powf(r(qi));
                    }
                }
                v
            }
        })
    }

    /// Whether `∫^∞ ds/Φ` diverges; Φ is even, so the lower tail agrees.
    pub fn tail_diverges(&self) -> bool {
        match &self.family {
            Family::Linear { .. } | Family::IterLog { .. } => true,
            Family::Square { c } => c.is_zero(),
            Family::PolyLog { k, p, q } => {
                if k.is_zero() {
                    return true;
                }
                let one = Rational::one();
                if p < &one {
                    return true;
                }
                if p > &one {
                    return false;
                }
                let zero = Rational::zero();
                let first = q.iter().find(|x| **x != one).unwrap_or(&zero);
                first < &one
            }
        }
    }

    fn coefficient(&self) -> &Rational {
        match &self.family {
            Family::Linear { c } | Family::Square { c } | Family::IterLog { c, .. } => c,
            Family::PolyLog { k, .. } => k,
        }
    }

    /// Antiderivative `F` of 1/Φ on the positive side, with `F(∞)` when the
    /// tail converges (then `F(∞) = 0`).
    fn antiderivative(&self) -> Result<Box<dyn Fn(f64) -> f64 + '_>, EscapeError> {
        let r = rational_to_f64;
        let c = r(self.coefficient());
        match &self.family {
            Family::Linear { .. } => Ok(Box::new(move |x: f64| x.ln() / c)),
            Family::Square { .. } => Ok(Box::new(move |x: f64| -1.0 / (c * x))),
            Family::IterLog { depth, .. } => {
                let d = *depth;
                Ok(Box::new(move |x: f64| iterated_log(x, d + 1).unwrap_or(f64::NAN) / c))
            }
            Family::PolyLog { p, q, .. } => {
                let one = Rational::one();
                let zero = Rational::zero();
                let depth = self.log_depth() as usize;
                if q[..depth.min(q.len())].iter().all(|x| x.is_zero()) {
                    if p == &one {
                        return Ok(Box::new(move |x: f64| x.ln() / c));
                    }
                    let e = 1.0 - r(p);
                    return Ok(Box::new(move |x: f64| x.powf(e) / (c * e)));
                }
                if p != &one {
                    return Err(EscapeError::UnsupportedFamily(self.to_string()));
                }
                // leading ones, then one power q_m, then zeros
                let m = q.iter().position(|x| *x != one).unwrap_or(q.len());
                let qm = q.get(m).cloned().unwrap_or(zero.clone());
                if q[(m + 1).min(q.len())..].iter().any(|x| !x.is_zero()) {
                    return Err(EscapeError::UnsupportedFamily(self.to_string()));
                }
                let m = m as u32 + 1;
                if qm.is_zero() {
                    return Ok(Box::new(move |x: f64| iterated_log(x, m).unwrap_or(f64::NAN) / c));
                }
                let e = 1.0 - r(&qm);
                Ok(Box::new(move |x: f64| iterated_log(x, m).unwrap_or(f64::NAN).powf(e) / (c * e)))
            }
        }
    }

    /// `∫_x^y ds/Φ(s)` for `0 < x <= y` inside the domain.
    pub fn integral(&self, x: &Rational, y: &Rational) -> Result<IntegralValue, EscapeError> {
        if x > y {
            return Err(EscapeError::Domain(format!("empty range [{}, {}]", format_rational(x), format_rational(y))));
        }
        if x == y {
            return Ok(IntegralValue::Exact(Rational::zero()));
        }
        if self.coefficient().is_zero() {
            return Ok(IntegralValue::Infinite);
        }
        if !x.is_positive() {
            return Ok(IntegralValue::Infinite);
        }
        if let Family::Square { c } = &self.family {
            return Ok(IntegralValue::Exact((x.recip() - y.recip()) / c));
        }
        let xf = rational_to_f64(x);
        if !self.in_domain(xf) {
            return Err(EscapeError::Domain(format!(
                "Φ is not positive at {} (needs |s| > {:.6})",
                format_rational(x),
                self.domain_threshold()
            )));
        }
        let f = self.antiderivative()?;
        Ok(IntegralValue::Approx(f(rational_to_f64(y)) - f(xf)))
    }

    /// `∫_x^∞ ds/Φ(s)`; infinite whenever the range reaches 0 or the tail
    /// diverges.
    pub fn tail_integral(&self, x: &Rational) -> Result<IntegralValue, EscapeError> {
        if self.coefficient().is_zero() || !x.is_positive() || self.tail_diverges() {
            return Ok(IntegralValue::Infinite);
        }
        if let Family::Square { c } = &self.family {
            return Ok(IntegralValue::Exact((c * x).recip()));
        }
        let xf = rational_to_f64(x);
        if !self.in_domain(xf) {
            return Err(EscapeError::Domain(format!("Φ is not positive at {}", format_rational(x))));
        }
        let f = self.antiderivative()?;
        Ok(IntegralValue::Approx(-f(xf)))
    }
}

impl fmt::Display for GrowthBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = format_rational;
        match &self.family {
            Family::Linear { c } => write!(f, "linear(c={})", q(c))?,
            Family::Square { c } => write!(f, "square(c={})", q(c))?,
            Family::IterLog { c, depth } => write!(f, "iterlog(c={}, depth={depth})", q(c))?,
            Family::PolyLog { k, p, q: qs } => {
                let parts: Vec<String> = qs.iter().map(q).collect();
                write!(f, "polylog(k={}, p={}, q=[{}])", q(k), q(p), parts.join(","))?
            }
        }
        if let Some((a, b)) = &self.gap {
            write!(f, ", gap=({},{})", q(a), q(b))?;
        }
        Ok(())
    }
}

/// Splits on commas outside brackets and parentheses.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.retain(|p| !p.is_empty());
    out
}

fn num(key: &str, v: &str) -> Result<Rational, EscapeError> {
    parse_rational(v).ok_or_else(|| EscapeError::Parse(format!("`{key}` expects a number, found `{v}`")))
}

pub fn parse_gap(v: &str) -> Result<(Rational, Rational), EscapeError> {
    let inner = v
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| EscapeError::Parse(format!("gap must look like (a,b), found `{v}`")))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| EscapeError::Parse(format!("gap must look like (a,b), found `{v}`")))?;
    let (a, b) = (num("gap", a.trim())?, num("gap", b.trim())?);
    if a > b {
        return Err(EscapeError::Parse("gap needs a <= b".into()));
    }
    Ok((a, b))
}

impl FromStr for GrowthBound {
    type Err = EscapeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let open = text.find('(').ok_or_else(|| EscapeError::Parse(format!("expected family(...), found `{text}`")))?;
        let name = text[..open].trim().to_ascii_lowercase();
        let mut depth = 0;
        let mut close = None;
        for (i, ch) in text[open..].char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(open + i);
                        break;
                    }
                }
                _ => {}
            }
        }
        let close = close.ok_or_else(|| EscapeError::Parse("unbalanced parentheses".into()))?;
        let mut c = None;
        let mut dep = None;
        let mut k = None;
        let mut p = None;
        let mut qv = Vec::new();
        for arg in split_args(&text[open + 1..close]) {
            let (key, v) = arg
                .split_once('=')
                .ok_or_else(|| EscapeError::Parse(format!("expected key=value, found `{arg}`")))?;
            let (key, v) = (key.trim(), v.trim());
            match key {
                "c" => c = Some(num(key, v)?),
                "k" => k = Some(num(key, v)?),
                "p" => p = Some(num(key, v)?),
                "depth" => dep = Some(v.parse::<u32>().map_err(|_| EscapeError::Parse(format!("bad depth `{v}`")))?),
                "q" => {
                    let inner = v.trim_start_matches('[').trim_end_matches(']');
                    qv = split_args(inner).into_iter().map(|x| num(key, x)).collect::<Result<_, _>>()?;
                }
                other => return Err(EscapeError::Parse(format!("unknown parameter `{other}`"))),
            }
        }
        let need = |x: Option<Rational>, key: &str| x.ok_or_else(|| EscapeError::Parse(format!("{name} needs `{key}`")));
        let family = match name.as_str() {
            "linear" => Family::Linear { c: need(c, "c")? },
            "square" => Family::Square { c: need(c, "c")? },
            "iterlog" => {
                let depth = dep.ok_or_else(|| EscapeError::Parse("iterlog needs `depth`".into()))?;
                if depth == 0 {
                    return Err(EscapeError::Parse("iterlog depth must be at least 1".into()));
                }
                Family::IterLog { c: need(c, "c")?, depth }
            }
            "polylog" => Family::PolyLog { k: need(k.or(c), "k")?, p: need(p, "p")?, q: qv },
            other => return Err(EscapeError::Parse(format!("unknown family `{other}`"))),
        };
        let coefficient = match &family {
            Family::Linear { c } | Family::Square { c } | Family::IterLog { c, .. } => c,
            Family::PolyLog { k, .. } => k,
        };
        if coefficient.is_negative() {
            return Err(EscapeError::Parse("coefficients must be nonnegative".into()));
        }
        let mut out = GrowthBound::new(family);
        let rest = text[close + 1..].trim().trim_start_matches([',', ';']).trim();
        if !rest.is_empty() {
            let v = rest
                .strip_prefix("gap")
                .map(|s| s.trim_start())
                .and_then(|s| s.strip_prefix('='))
                .ok_or_else(|| EscapeError::Parse(format!("unexpected `{rest}` after family")))?;
            let (a, b) = parse_gap(v)?;
            out.gap = Some((a, b));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "linear(c=2)",
            "square(c=1/2)",
            "iterlog(c=1, depth=2)",
            "polylog(k=1, p=1, q=[1,1/2])",
            "linear(c=3), gap=(-1,1)",
        ] {
            let g: GrowthBound = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        let g: GrowthBound = "square(c=0.5)".parse().unwrap();
        assert_eq!(g.family, Family::Square { c: q("1/2") });
        assert!("cubic(c=1)".parse::<GrowthBound>().is_err());
        assert!("linear(c=-1)".parse::<GrowthBound>().is_err());
        assert!("iterlog(c=1)".parse::<GrowthBound>().is_err());
    }

    #[test]
    fn divergence_classes() {
        let p = |s: &str| s.parse::<GrowthBound>().unwrap().tail_diverges();
        assert!(p("linear(c=5)"));
        assert!(!p("square(c=1)"));
        assert!(p("iterlog(c=1, depth=3)"));
        assert!(p("polylog(k=1, p=-1)"));
        assert!(p("polylog(k=1, p=1/2, q=[3])"));
        assert!(!p("polylog(k=1, p=2)"));
        assert!(p("polylog(k=1, p=1)"));
        assert!(p("polylog(k=1, p=1, q=[1,1])"));
        assert!(!p("polylog(k=1, p=1, q=[1,2])"));
        assert!(p("polylog(k=1, p=1, q=[1/2,5])"));
        assert!(!p("polylog(k=1, p=1, q=[3/2])"));
    }

    #[test]
    fn thresholds() {
        assert_eq!(log_threshold(1), 1.0);
        assert!((log_threshold(2) - std::f64::consts::E).abs() < 1e-15);
        assert!((log_threshold(3) - 15.154262241479262).abs() < 1e-9);
        assert!((log_threshold(4) - 3814279.1047602).abs() < 1e-3);
    }

    #[test]
    fn integrals_against_quadrature() {
        // composite Simpson on a log-spaced grid as an independent check
        fn simpson(g: &GrowthBound, x: f64, y: f64) -> f64 {
            let n = 20_000;
            let (lx, ly) = (x.ln(), y.ln());
            let h = (ly - lx) / n as f64;
            let f = |u: f64| {
                let s = u.exp();
                s / g.eval(s).unwrap()
            };
            let mut acc = f(lx) + f(ly);
            for i in 1..n {
                acc += f(lx + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        }
        for s in [
            "linear(c=2)",
            "square(c=3)",
            "iterlog(c=1, depth=1)",
            "iterlog(c=1/2, depth=2)",
            "polylog(k=1, p=1/2)",
            "polylog(k=2, p=1, q=[1,3/2])",
            "polylog(k=1, p=1, q=[1/2])",
        ] {
            let g: GrowthBound = s.parse().unwrap();
            let (x, y) = (q("20"), q("400"));
            let exact = g.integral(&x, &y).unwrap().to_f64();
            let num = simpson(&g, 20.0, 400.0);
            assert!((exact - num).abs() <= 1e-9 * num.abs().max(1.0), "{s}: {exact} vs {num}");
        }
    }

    #[test]
    fn square_tail_is_exact() {
        let g = GrowthBound::square(q("1/2"));
        assert_eq!(g.tail_integral(&q("1")).unwrap(), IntegralValue::Exact(q("2")));
        assert!(GrowthBound::linear(q("1")).tail_integral(&q("1")).unwrap().is_infinite());
        let unsupported: GrowthBound = "polylog(k=1, p=2, q=[1])".parse().unwrap();
        assert!(matches!(unsupported.tail_integral(&q("20")), Err(EscapeError::UnsupportedFamily(_))));
    }
}
