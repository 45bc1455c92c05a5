use std::fmt;

use num_traits::Signed;

use super::{continuation_map, spectral_value_in, Chain, Side, TrackerError, Window};
use crate::algebra::{format_rational, Pid};
use crate::bifurcation::EvolutionLog;
use crate::cerf::{ArcId, CerfTuple, Difference};
use crate::Rational;

/// ρ on a sub-interval where the action order of all generators is fixed;
/// there ρ(r) = F3(top(r)) is linear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSegment<R: Pid> {
    pub interval: usize,
    pub lo: Rational,
    pub hi: Rational,
    pub top: Option<ArcId>,
    pub rho_lo: Option<Rational>,
    pub rho_hi: Option<Rational>,
    pub representative: Chain<R>,
}

/// Change of the generator carrying ρ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub r: Rational,
    pub from: Option<ArcId>,
    pub to: Option<ArcId>,
    pub value: Option<Rational>,
    /// Set when `r` is an event parameter.
    pub at_event: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStatus {
    Survived,
    LeftWindow { side: Side, r: Rational },
    WindowInvalid(String),
}

impl fmt::Display for TraceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceStatus::Survived => f.write_str("survived"),
            TraceStatus::LeftWindow { side, r } => write!(f, "left window {side} at r = {}", format_rational(r)),
            TraceStatus::WindowInvalid(m) => write!(f, "window invalid: {m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralTrace<R: Pid> {
    pub segments: Vec<TraceSegment<R>>,
    pub transfers: Vec<Transfer>,
    pub status: TraceStatus,
}

impl<R: Pid> SpectralTrace<R> {
    pub fn initial_value(&self) -> Option<&Rational> {
        self.segments.first().and_then(|s| s.rho_lo.as_ref())
    }

    pub fn final_value(&self) -> Option<&Rational> {
        self.segments.last().and_then(|s| s.rho_hi.as_ref())
    }

    /// ρ at every transfer, in parameter order.
    pub fn transfer_heights(&self) -> Vec<Rational> {
        self.transfers.iter().filter_map(|t| t.value.clone()).collect()
    }

    /// Largest jump of ρ between adjacent segments; zero when ρ is continuous.
    pub fn max_jump(&self) -> Rational {
        let mut worst = Rational::from_integer(0.into());
        for w in self.segments.windows(2) {
            if let (Some(a), Some(b)) = (&w[0].rho_hi, &w[1].rho_lo) {
                let j = (a - b).abs();
                if j > worst {
                    worst = j;
                }
            }
        }
        worst
    }
}

impl<R: Pid> fmt::Display for SpectralTrace<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &Option<Rational>| v.as_ref().map_or("-inf".to_string(), format_rational);
        writeln!(f, "# interval\tr_lo\tr_hi\trho_lo\trho_hi\ttop\trepresentative")?;
        for s in &self.segments {
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                s.interval,
                format_rational(&s.lo),
                format_rational(&s.hi),
                show(&s.rho_lo),
                show(&s.rho_hi),
                s.top.as_ref().map_or("-", |c| c.as_str()),
                s.representative
            )?;
        }
        for t in &self.transfers {
            writeln!(
                f,
                "# transfer at r = {}: {} -> {} at rho = {}{}",
                format_rational(&t.r),
                t.from.as_ref().map_or("-", |c| c.as_str()),
                t.to.as_ref().map_or("-", |c| c.as_str()),
                show(&t.value),
                if t.at_event { " (event)" } else { "" }
            )?;
        }
        writeln!(f, "# status: {}", self.status)
    }
}

/// Sub-interval cut points of `[lo, hi]`: profile breakpoints of the
/// generators and their pairwise action crossings.
fn cut_points(t: &CerfTuple, basis: &[ArcId], lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut cuts = vec![lo.clone(), hi.clone()];
    let profiles: Vec<_> = basis.iter().filter_map(|c| t.arc(c)).map(|a| &a.profile).collect();
    for (k, p) in profiles.iter().enumerate() {
        cuts.extend(p.interior_breaks(lo, hi));
        for q in &profiles[k + 1..] {
            if let Some(d) = Difference::of(p, q, lo, hi) {
                for z in d.zeros() {
                    cuts.push(z.r.clone());
                    if let Some(e) = z.r_end {
                        cuts.push(e);
                    }
                }
            }
        }
    }
    cuts.retain(|r| r >= lo && r <= hi);
    cuts.sort();
    cuts.dedup();
    cuts
}

/// Follows the class of `h0` through every event of `log`, recording ρ on
/// each action-order piece and the transfers between them. The window is an
/// observation band; ρ is computed in the full complex.
pub fn track_class<R: Pid>(
    t: &CerfTuple,
    log: &EvolutionLog<R>,
    h0: &Chain<R>,
    w: &Window,
) -> Result<SpectralTrace<R>, TrackerError> {
    let mut v = h0.to_vec(log.first().basis())?;
    let mut segments: Vec<TraceSegment<R>> = Vec::new();
    for (k, iv) in log.intervals.iter().enumerate() {
        if k > 0 {
            let step = &log.steps[k - 1];
            v = continuation_map(step, log)?.forward(&v)?;
        }
        let fc = &iv.counter;
        let cuts = cut_points(t, fc.basis(), &iv.lo, &iv.hi);
        for pair in cuts.windows(2) {
            let mid = (&pair[0] + &pair[1]) / Rational::from_integer(2.into());
            let sv = spectral_value_in(fc, t, &mid, &v)?;
            let at = |r: &Rational| sv.top.as_ref().and_then(|c| t.f3(c, r));
            segments.push(TraceSegment {
                interval: k,
                lo: pair[0].clone(),
                hi: pair[1].clone(),
                rho_lo: at(&pair[0]),
                rho_hi: at(&pair[1]),
                top: sv.top.clone(),
                representative: sv.representative,
            });
        }
    }
    let lambda = log.lambda();
    let transfers = segments
        .windows(2)
        .filter(|s| s[0].top != s[1].top)
        .map(|s| Transfer {
            r: s[1].lo.clone(),
            from: s[0].top.clone(),
            to: s[1].top.clone(),
            value: s[1].rho_lo.clone(),
            at_event: lambda.contains(&s[1].lo),
        })
        .collect();
    let status = observe(&segments, t, w);
    Ok(SpectralTrace { segments, transfers, status })
}

fn observe<R: Pid>(segments: &[TraceSegment<R>], t: &CerfTuple, w: &Window) -> TraceStatus {
    let Some(first) = segments.first() else {
        return TraceStatus::WindowInvalid("empty trace".into());
    };
    match &first.rho_lo {
        Some(v) if w.contains(&first.lo, v) => {}
        Some(v) => {
            return TraceStatus::WindowInvalid(format!("initial value {} lies outside the window", format_rational(v)))
        }
        None => return TraceStatus::WindowInvalid("the class is zero".into()),
    }
    for s in segments {
        let Some(top) = s.top.as_ref().and_then(|c| t.arc(c)) else { continue };
        for (side, cut) in [(Side::Above, &w.b), (Side::Below, &w.a)] {
            let Some(d) = Difference::of(cut, &top.profile, &s.lo, &s.hi) else { continue };
            let outside = |v: &Rational| match side {
                Side::Above => !v.is_positive(),
                Side::Below => !v.is_negative(),
            };
            // first grid point where ρ reaches the cutoff, interpolated
            for k in 0..d.grid.len() {
                if outside(&d.values[k]) {
                    let r = if k == 0 {
                        d.grid[0].clone()
                    } else {
                        let (x0, x1) = (&d.grid[k - 1], &d.grid[k]);
                        let (v0, v1) = (&d.values[k - 1], &d.values[k]);
                        x0 + (x1 - x0) * v0 / (v0 - v1)
                    };
                    return TraceStatus::LeftWindow { side, r };
                }
            }
        }
    }
    TraceStatus::Survived
}
