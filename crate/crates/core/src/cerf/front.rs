use super::profile::Difference;
use super::{births_deaths, Arc, ArcId, CerfError, CerfTuple, EndTag, Profile, Vertex, VertexId, VertexKind};
use crate::Rational;

/// One arc drawn in the (r, action) plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyline {
    pub arc: ArcId,
    pub points: Vec<(Rational, Rational)>,
    pub lo_tag: EndTag,
    pub hi_tag: EndTag,
}

/// Cusp of the front at a birth or death vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cusp {
    pub vertex: VertexId,
    pub kind: VertexKind,
    pub r: Rational,
    pub f3: Rational,
    pub plus: ArcId,
    pub minus: ArcId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontCrossing {
    pub first: ArcId,
    pub second: ArcId,
    pub r: Rational,
    pub f3: Rational,
    pub transverse: bool,
}

/// The Cerf diagram: every arc as a polyline plus cusp markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontDiagram {
    pub polylines: Vec<Polyline>,
    pub cusps: Vec<Cusp>,
}

pub fn front_projection(t: &CerfTuple) -> Result<FrontDiagram, CerfError> {
    let (births, deaths) = births_deaths(t)?;
    let polylines = t
        .arcs()
        .iter()
        .map(|a| Polyline {
            arc: a.id.clone(),
            points: a.profile.points().to_vec(),
            lo_tag: a.lo_tag.clone(),
            hi_tag: a.hi_tag.clone(),
        })
        .collect();
    let mut cusps: Vec<Cusp> = births
        .into_iter()
        .chain(deaths)
        .map(|b| Cusp { vertex: b.vertex, kind: b.kind, r: b.r, f3: b.f3, plus: b.plus, minus: b.minus })
        .collect();
    cusps.sort_by(|x, y| x.r.cmp(&y.r));
    Ok(FrontDiagram { polylines, cusps })
}

impl FrontDiagram {
    /// Points where two polylines meet away from shared cusps.
    pub fn crossings(&self) -> Vec<FrontCrossing> {
        let mut out = Vec::new();
        for (i, p) in self.polylines.iter().enumerate() {
            for q in &self.polylines[i + 1..] {
                let (Ok(pp), Ok(qq)) = (Profile::new(p.points.clone()), Profile::new(q.points.clone())) else {
                    continue;
                };
                let lo = pp.lo().max(qq.lo()).clone();
                let hi = pp.hi().min(qq.hi()).clone();
                if lo > hi {
                    continue;
                }
                let Some(d) = Difference::of(&pp, &qq, &lo, &hi) else { continue };
                for z in d.zeros() {
                    if self.cusps.iter().any(|c| c.r == z.r && z.r_end.is_none()) && (z.r == lo || z.r == hi) {
                        continue;
                    }
                    out.push(FrontCrossing {
                        first: p.arc.clone(),
                        second: q.arc.clone(),
                        f3: pp.eval(&z.r).expect("inside footprint"),
                        r: z.r,
                        transverse: z.transverse,
                    });
                }
            }
        }
        out.sort_by(|a, b| a.r.cmp(&b.r).then_with(|| a.first.cmp(&b.first)));
        out
    }

    /// Reads the breakpoints back into a tuple.
    pub fn to_cerf_tuple(&self) -> Result<CerfTuple, CerfError> {
        let mut arcs = Vec::new();
        for p in &self.polylines {
            let profile = Profile::new(p.points.clone()).map_err(|e| CerfError::InvalidTuple(e.to_string()))?;
            arcs.push(Arc::new(p.arc.clone(), profile, p.lo_tag.clone(), p.hi_tag.clone()));
        }
        let vertices = self
            .cusps
            .iter()
            .map(|c| Vertex { id: c.vertex.clone(), kind: c.kind, r: c.r.clone(), f3: c.f3.clone() })
            .collect();
        CerfTuple::new(arcs, vertices)
    }
}
