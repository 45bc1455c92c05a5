//! Recovering a Legendrian curve in (x, y, z) with contact form dz + x dy
//! from its front (y(s), z(s)).

use std::fmt;

use num_traits::{Signed, Zero};

use crate::algebra::format_rational;
use crate::Rational;

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn eval(&self, s: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * s + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
                .collect(),
        )
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format_rational(c),
                1 => format!("{}*s", format_rational(c)),
                _ => format!("{}*s^{k}", format_rational(c)),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// A front s ↦ (y(s), z(s)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialFront {
    pub y: Polynomial,
    pub z: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftSample {
    pub s: Rational,
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
    /// z'(s) + x(s) y'(s); zero on every returned sample.
    pub contact_residual: Rational,
    pub cusp: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfIntersection {
    /// Indices of the two sampled segments that meet.
    pub segments: (usize, usize),
    pub y: Rational,
    pub z: Rational,
    pub transverse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendrianLift {
    pub samples: Vec<LiftSample>,
    pub self_intersections: Vec<SelfIntersection>,
}

impl LegendrianLift {
    /// Embedded iff the front only crosses itself transversally.
    pub fn embedded(&self) -> bool {
        self.self_intersections.iter().all(|x| x.transverse)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LegendrianError {
    #[error("vertical tangency at s = {0}: y' vanishes while z' does not, so this is not a front")]
    VerticalTangency(String),
    #[error("y' and z' vanish identically; cusps are not isolated")]
    NonIsolatedCusp,
}

pub fn legendrian_lift(front: &PolynomialFront, samples: &[Rational]) -> Result<LegendrianLift, LegendrianError> {
    let dy = front.y.derivative();
    let dz = front.z.derivative();
    if dy.is_zero() && dz.is_zero() {
        return Err(LegendrianError::NonIsolatedCusp);
    }
    if dy.is_zero() {
        let s = samples
            .iter()
            .find(|s| !dz.eval(s).is_zero())
            .cloned()
            .unwrap_or_else(Rational::zero);
        return Err(LegendrianError::VerticalTangency(format_rational(&s)));
    }
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        let yp = dy.eval(s);
        let zp = dz.eval(s);
        let (x, cusp) = if !yp.is_zero() {
            (-(&zp / &yp), false)
        } else if !zp.is_zero() {
            return Err(LegendrianError::VerticalTangency(format_rational(s)));
        } else {
            (cusp_limit(&dy, &dz, s)?, true)
        };
        let residual = &zp + &x * &yp;
        debug_assert!(residual.is_zero());
        out.push(LiftSample {
            s: s.clone(),
            y: front.y.eval(s),
            z: front.z.eval(s),
            x,
            contact_residual: residual,
            cusp,
        });
    }
    let self_intersections = polyline_self_intersections(&out);
    Ok(LegendrianLift { samples: out, self_intersections })
}

/// Limit of -z'/y' at a common zero, by repeated differentiation.
fn cusp_limit(dy: &Polynomial, dz: &Polynomial, s: &Rational) -> Result<Rational, LegendrianError> {
    let mut py = dy.clone();
    let mut pz = dz.clone();
    loop {
        py = py.derivative();
        pz = pz.derivative();
        let a = py.eval(s);
        let b = pz.eval(s);
        if !a.is_zero() {
            return Ok(-(b / a));
        }
        if !b.is_zero() || py.is_zero() {
            return Err(LegendrianError::VerticalTangency(format_rational(s)));
        }
    }
}

fn polyline_self_intersections(samples: &[LiftSample]) -> Vec<SelfIntersection> {
    let pts: Vec<(&Rational, &Rational)> = samples.iter().map(|p| (&p.y, &p.z)).collect();
    let mut out = Vec::new();
    if pts.len() < 4 {
        return out;
    }
    for i in 0..pts.len() - 1 {
        for j in i + 2..pts.len() - 1 {
            let (p0, p1) = (pts[i], pts[i + 1]);
            let (q0, q1) = (pts[j], pts[j + 1]);
            let d1 = (p1.0 - p0.0, p1.1 - p0.1);
            let d2 = (q1.0 - q0.0, q1.1 - q0.1);
            let cross = &d1.0 * &d2.1 - &d1.1 * &d2.0;
            if cross.is_zero() {
                // parallel; report overlap of collinear segments as a tangency
                let w = (q0.0 - p0.0, q0.1 - p0.1);
                let collinear = (&d1.0 * &w.1 - &d1.1 * &w.0).is_zero();
                if collinear && segments_overlap(p0, p1, q0, q1) {
                    out.push(SelfIntersection {
                        segments: (i, j),
                        y: q0.0.clone(),
                        z: q0.1.clone(),
                        transverse: false,
                    });
                }
                continue;
            }
            let w = (q0.0 - p0.0, q0.1 - p0.1);
            let t = (&w.0 * &d2.1 - &w.1 * &d2.0) / &cross;
            let u = (&w.0 * &d1.1 - &w.1 * &d1.0) / &cross;
            let unit = |v: &Rational| !v.is_negative() && v <= &Rational::from_integer(1.into());
            if unit(&t) && unit(&u) {
                out.push(SelfIntersection {
                    segments: (i, j),
                    y: p0.0 + &t * &d1.0,
                    z: p0.1 + &t * &d1.1,
                    transverse: true,
                });
            }
        }
    }
    out
}

fn segments_overlap(
    p0: (&Rational, &Rational),
    p1: (&Rational, &Rational),
    q0: (&Rational, &Rational),
    q1: (&Rational, &Rational),
) -> bool {
    let key = |p: (&Rational, &Rational)| (p.0.clone(), p.1.clone());
    let (a0, a1) = {
        let (x, y) = (key(p0), key(p1));
        if x <= y { (x, y) } else { (y, x) }
    };
    let (b0, b1) = {
        let (x, y) = (key(q0), key(q1));
        if x <= y { (x, y) } else { (y, x) }
    };
    a0 <= b1 && b0 <= a1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<Rational> {
        (-4..=4).map(|k| Rational::new(k.into(), 2.into())).collect()
    }

    #[test]
    fn parabola_lifts_to_minus_two_s() {
        let front = PolynomialFront { y: Polynomial::from_ints(&[0, 1]), z: Polynomial::from_ints(&[0, 0, 1]) };
        let lift = legendrian_lift(&front, &grid()).unwrap();
        for p in &lift.samples {
            assert_eq!(p.x, -Rational::from_integer(2.into()) * &p.s);
            assert!(p.contact_residual.is_zero());
        }
        assert!(lift.self_intersections.is_empty());
    }

    #[test]
    fn flat_front_lifts_to_zero() {
        let front = PolynomialFront { y: Polynomial::from_ints(&[0, 1]), z: Polynomial::zero() };
        let lift = legendrian_lift(&front, &grid()).unwrap();
        assert!(lift.samples.iter().all(|p| p.x.is_zero()));
    }

    #[test]
    fn vertical_segment_is_rejected() {
        let front = PolynomialFront { y: Polynomial::zero(), z: Polynomial::from_ints(&[0, 1]) };
        assert!(matches!(legendrian_lift(&front, &grid()), Err(LegendrianError::VerticalTangency(_))));
        let point = PolynomialFront { y: Polynomial::zero(), z: Polynomial::zero() };
        assert_eq!(legendrian_lift(&point, &grid()), Err(LegendrianError::NonIsolatedCusp));
    }

    #[test]
    fn semicubical_cusp() {
        // y = s^2, z = s^3: x = -3s/2, finite at the cusp s = 0
        let front = PolynomialFront { y: Polynomial::from_ints(&[0, 0, 1]), z: Polynomial::from_ints(&[0, 0, 0, 1]) };
        let lift = legendrian_lift(&front, &grid()).unwrap();
        let c = lift.samples.iter().find(|p| p.s.is_zero()).unwrap();
        assert!(c.cusp);
        assert!(c.x.is_zero());
        for p in &lift.samples {
            assert_eq!(p.x, Rational::new((-3).into(), 2.into()) * &p.s);
        }
    }

    #[test]
    fn front_with_double_point() {
        // y = s^2, z = s^5 - s^3: cusp at s = 0, double point (1, 0) at s = ±1
        // with slopes +1 and -1
        let front = PolynomialFront {
            y: Polynomial::from_ints(&[0, 0, 1]),
            z: Polynomial::from_ints(&[0, 0, 0, -1, 0, 1]),
        };
        let samples: Vec<Rational> = (-6..=6).map(|k| Rational::new(k.into(), 4.into())).collect();
        let lift = legendrian_lift(&front, &samples).unwrap();
        assert!(!lift.self_intersections.is_empty());
        assert!(lift.self_intersections.iter().all(|x| x.y == Rational::from_integer(1.into()) && x.z.is_zero()));
        assert!(lift.embedded());
    }
}
