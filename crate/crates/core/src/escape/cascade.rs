use num_traits::{One, Signed, Zero};

use super::{EscapeError, GrowthBound};
use crate::algebra::{format_rational, Pid};
use crate::bifurcation::{evolve, EventKind, EventRecord, FlowCounter};
use crate::cerf::{Arc, ArcId, CerfTuple, Profile};
use crate::scenario::{PhiSpec, ScenarioFile};
use crate::tracker::{track_class, Chain, SpectralTrace, TraceStatus, Window};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeParams {
    pub n: usize,
    pub base: Rational,
    pub ratio: Rational,
}

impl CascadeParams {
    pub fn new(n: usize, base: Rational, ratio: Rational) -> Self {
        CascadeParams { n, base, ratio }
    }

    /// Height reached by `c_{k+1}` after its rise.
    pub fn height(&self, k: usize) -> Rational {
        let mut h = self.base.clone();
        for _ in 0..k {
            h *= &self.ratio;
        }
        h
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cascade<R: Pid> {
    pub params: CascadeParams,
    pub tuple: CerfTuple,
    pub gamma0: FlowCounter<R>,
    pub events: Vec<EventRecord<R>>,
    /// `[c1]`, the class that climbs.
    pub class: Chain<R>,
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn pow2(k: usize) -> Rational {
    Rational::from_integer(num_bigint::BigInt::from(1) << k)
}

/// Chord `c1` sits at `base`. For `k = 1..=n`, chord `c_{k+1}` waits just
/// below `c1`, receives a handle-slide from `c1` at `r_k`, then rises to
/// `base·ratio^k` over `[t_k, t_k + 2^-(k+2)]` with `t_k = 1 - 2^-k`. Each
/// `c_{k+1}` bounds a flat sink `s_{k+1}`, so after the slide the class of
/// `c1` is carried by `c1 - δc2 - … - δc_{k+1}` and its spectral value
/// follows the rising chord.
pub fn build_cascade<R: Pid>(n: usize, base: &Rational, ratio: &Rational, delta: &R) -> Result<Cascade<R>, EscapeError> {
    if !base.is_positive() {
        return Err(EscapeError::InvalidParameters("base must be positive".into()));
    }
    if ratio <= &Rational::one() {
        return Err(EscapeError::InvalidParameters("ratio must exceed 1".into()));
    }
    let params = CascadeParams::new(n, base.clone(), ratio.clone());
    let (zero, one) = (Rational::zero(), Rational::one());
    let profile = |pts: Vec<(Rational, Rational)>| {
        Profile::new(pts).map_err(|e| EscapeError::InvalidParameters(e.to_string()))
    };
    let mut arcs = vec![Arc::chord("c1", profile(vec![(zero.clone(), base.clone()), (one.clone(), base.clone())])?)];
    let mut entries = Vec::new();
    let mut events = Vec::new();
    for k in 1..=n {
        let c = ArcId::new(format!("c{}", k + 1));
        let s = ArcId::new(format!("s{}", k + 1));
        let low = base * q(k as i64 + 3) / q(2 * (k as i64 + 2));
        let t_k = &one - pow2(k).recip();
        let t_end = &t_k + pow2(k + 2).recip();
        let r_k = &t_k - pow2(k + 3).recip();
        arcs.push(Arc::chord(
            c.clone(),
            profile(vec![
                (zero.clone(), low.clone()),
                (t_k, low),
                (t_end, params.height(k)),
                (one.clone(), params.height(k)),
            ])?,
        ));
        let sink = -q(k as i64 + 1);
        arcs.push(Arc::chord(s.clone(), profile(vec![(zero.clone(), sink.clone()), (one.clone(), sink)])?));
        entries.push((c.clone(), s, R::one()));
        events.push(EventRecord {
            id: format!("slide{k}"),
            r: r_k,
            kind: EventKind::HandleSlide { delta: vec![(ArcId::new("c1"), c, delta.clone())] },
        });
    }
    let tuple = CerfTuple::new(arcs, Vec::new()).map_err(|e| EscapeError::InvalidParameters(e.to_string()))?;
    let gamma0 = FlowCounter::from_entries(tuple.alive_at(&zero), entries)?;
    evolve(&gamma0, &events, &tuple)?;
    Ok(Cascade { params, tuple, gamma0, events, class: Chain::generator(ArcId::new("c1")) })
}

impl<R: Pid> Cascade<R> {
    /// Band well beyond every action value of the cascade.
    pub fn window(&self) -> Window {
        let top = self.params.height(self.params.n) * q(2) + q(1);
        Window::constant(-top.clone() - q(self.params.n as i64 + 2), top).expect("nonempty band")
    }

    /// ρ-trace of `[c1]`.
    pub fn trace(&self) -> Result<SpectralTrace<R>, EscapeError> {
        let log = evolve(&self.gamma0, &self.events, &self.tuple)?;
        Ok(track_class(&self.tuple, &log, &self.class, &self.window())?)
    }

    /// Scenario file with `Φ = linear(c=1)` and `[c1]` as the tracked class.
    pub fn to_scenario(&self) -> ScenarioFile {
        let p = &self.params;
        let mut s = ScenarioFile::empty(
            format!("cascade-n{}-base{}-ratio{}", p.n, format_rational(&p.base), format_rational(&p.ratio)),
            R::RING,
        );
        s.arcs = self.tuple.arcs().to_vec();
        s.gamma = self.gamma0.entries().into_iter().map(|(a, b, v)| (a, b, v.to_rational())).collect();
        s.events = self
            .events
            .iter()
            .map(|e| {
                let EventKind::HandleSlide { delta } = &e.kind else { unreachable!("cascades only slide") };
                EventRecord {
                    id: e.id.clone(),
                    r: e.r.clone(),
                    kind: EventKind::HandleSlide {
                        delta: delta.iter().map(|(a, b, v)| (a.clone(), b.clone(), v.to_rational())).collect(),
                    },
                }
            })
            .collect();
        s.window = Some(self.window());
        s.phi = Some(PhiSpec { phi: GrowthBound::linear(Rational::one()), kappa: None, rho0: None });
        s.track = Some(self.class.to_string());
        s
    }

    /// Parameter at which the last rise ends.
    pub fn climb_time(&self) -> Rational {
        if self.params.n == 0 {
            return Rational::zero();
        }
        Rational::one() - pow2(self.params.n).recip() + pow2(self.params.n + 2).recip()
    }
}

/// One row of the desk-scale escape statement: for the bound `b` the
/// cascade with `n` steps pushes ρ beyond `b` before `r_exceed < 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessRow {
    pub bound: Rational,
    pub n: usize,
    pub final_value: Rational,
    pub r_exceed: Rational,
}

/// For each bound `B = base·ratio^j` up to `ceiling`, the smallest cascade
/// whose tracked trace exceeds `B`, verified by actually tracking it.
pub fn escape_witness<R: Pid>(
    ceiling: &Rational,
    base: &Rational,
    ratio: &Rational,
) -> Result<Vec<WitnessRow>, EscapeError> {
    let mut rows = Vec::new();
    let mut bound = base.clone();
    while &bound <= ceiling {
        let mut n = 0;
        let params = CascadeParams::new(0, base.clone(), ratio.clone());
        while params.height(n) <= bound {
            n += 1;
        }
        let cascade = build_cascade::<R>(n, base, ratio, &R::one())?;
        let trace = cascade.trace()?;
        if trace.status != TraceStatus::Survived {
            return Err(EscapeError::InvalidParameters(format!("cascade trace status: {}", trace.status)));
        }
        let seg = trace
            .segments
            .iter()
            .find(|s| s.rho_hi.as_ref().is_some_and(|v| v > &bound))
            .ok_or_else(|| EscapeError::InvalidParameters(format!("trace never exceeds the bound at n = {n}")))?;
        // first r in the segment where ρ > bound, by linear interpolation
        let (v0, v1) = (seg.rho_lo.clone().unwrap_or_else(Rational::zero), seg.rho_hi.clone().unwrap_or_else(Rational::zero));
        let r_exceed = if v0 > bound || v1 == v0 {
            seg.lo.clone()
        } else {
            &seg.lo + (&seg.hi - &seg.lo) * (&bound - &v0) / (&v1 - &v0)
        };
        rows.push(WitnessRow {
            bound: bound.clone(),
            n,
            final_value: trace.final_value().cloned().unwrap_or_else(Rational::zero),
            r_exceed,
        });
        bound *= ratio;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Z2;
    use crate::BigInt;

    #[test]
    fn one_step_is_the_slide_fixture_shape() {
        let c = build_cascade::<Z2>(1, &q(2), &q(2), &Z2::one()).unwrap();
        assert_eq!(c.tuple.arcs().len(), 3);
        let log = evolve(&c.gamma0, &c.events, &c.tuple).unwrap();
        assert_eq!(log.last().get(&ArcId::new("c1"), &ArcId::new("s2")), Z2::one());
        let tr = c.trace().unwrap();
        assert_eq!(tr.transfers.len(), 1);
        assert_eq!(tr.final_value(), Some(&q(4)));
    }

    #[test]
    fn empty_cascade_is_constant() {
        let c = build_cascade::<BigInt>(0, &q(1), &q(2), &BigInt::one()).unwrap();
        let tr = c.trace().unwrap();
        assert!(tr.transfers.is_empty());
        assert_eq!(tr.initial_value(), tr.final_value());
    }

    #[test]
    fn heights_double() {
        let c = build_cascade::<BigInt>(4, &q(1), &q(2), &BigInt::one()).unwrap();
        let tr = c.trace().unwrap();
        assert_eq!(tr.transfer_heights(), vec![q(1), q(2), q(4), q(8)]);
        assert_eq!(tr.final_value(), Some(&q(16)));
        assert_eq!(tr.segments.last().unwrap().representative.to_string(), "c1 - c2 - c3 - c4 - c5");
        assert!(c.climb_time() < Rational::one());
    }

    #[test]
    fn scenario_round_trip() {
        let c = build_cascade::<BigInt>(3, &q(1), &q(2), &BigInt::one()).unwrap();
        let s = c.to_scenario();
        let back = crate::scenario::parse_str(&s.to_string()).unwrap();
        assert_eq!(back, s);
        let inst = back.instantiate::<BigInt>().unwrap();
        assert_eq!(inst.gamma0, c.gamma0);
        assert_eq!(inst.events, c.events);
    }

    #[test]
    fn bad_parameters() {
        assert!(build_cascade::<Z2>(2, &q(0), &q(2), &Z2::one()).is_err());
        assert!(build_cascade::<Z2>(2, &q(1), &q(1), &Z2::one()).is_err());
    }
}
