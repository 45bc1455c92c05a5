//! Growth-bound models for homotopies of Rabinowitz action functionals.
//!
//! Only the bounds `|∂ρ/∂r| <= Φ(|ρ|)` extracted from each tameness class are
//! modelled. Every verdict assumes a regular homotopy of Floer systems
//! exists (H3) and says so.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::format_rational;
use crate::algebra::ring::rational_to_f64;
use crate::escape::{check_h2, log_threshold, EscapeError, GrowthBound, IntegralValue};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TameClass {
    Tame,
    LogTame { depth: u32 },
    SquareTame,
}

impl fmt::Display for TameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TameClass::Tame => f.write_str("tame"),
            TameClass::LogTame { depth } => write!(f, "logtame(depth={depth})"),
            TameClass::SquareTame => f.write_str("squaretame"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Variant {
    Hypersurface,
    /// Homotopy of symplectic forms: Θ replaces 𝔥 in Φ; ℜ, when known,
    /// replaces 𝔥 in the period bound.
    SymplecticForm { theta: Rational, r_const: Option<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyModel {
    /// 𝔥 = max_r ‖∂_r H_r‖_∞
    pub h_sup: Rational,
    /// tameness constant
    pub c: Rational,
    pub class: TameClass,
    pub variant: Variant,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RabinowitzError {
    #[error("r = {0} lies outside [0, 1]")]
    OutOfRange(f64),
    #[error("square-tame classification needs {0}")]
    MissingClassData(&'static str),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Escape(#[from] EscapeError),
}

impl HomotopyModel {
    pub fn new(h_sup: Rational, c: Rational, class: TameClass) -> Result<Self, RabinowitzError> {
        let m = HomotopyModel { h_sup, c, class, variant: Variant::Hypersurface };
        m.validate()?;
        Ok(m)
    }

    pub fn with_variant(mut self, variant: Variant) -> Result<Self, RabinowitzError> {
        self.variant = variant;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), RabinowitzError> {
        if self.h_sup.is_negative() {
            return Err(RabinowitzError::InvalidModel("h_sup must be nonnegative".into()));
        }
        if !self.c.is_positive() {
            return Err(RabinowitzError::InvalidModel("c must be positive".into()));
        }
        if let TameClass::LogTame { depth } = self.class {
            if depth == 0 {
                return Err(RabinowitzError::InvalidModel("logtame depth must be at least 1".into()));
            }
        }
        if let Variant::SymplecticForm { theta, r_const } = &self.variant {
            if theta.is_negative() || r_const.as_ref().is_some_and(|x| x.is_negative()) {
                return Err(RabinowitzError::InvalidModel("theta and r_const must be nonnegative".into()));
            }
        }
        Ok(())
    }

    /// Coefficient multiplying `|s|` in Φ: 𝔥, or Θ for a symplectic-form
    /// homotopy.
    pub fn phi_scale(&self) -> &Rational {
        match &self.variant {
            Variant::Hypersurface => &self.h_sup,
            Variant::SymplecticForm { theta, .. } => theta,
        }
    }

    /// Growth rate of the period bound: 𝔥, or ℜ when given.
    pub fn eta_rate(&self) -> &Rational {
        match &self.variant {
            Variant::SymplecticForm { r_const: Some(r), .. } => r,
            _ => &self.h_sup,
        }
    }
}

impl fmt::Display for HomotopyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} model, h_sup = {}, c = {}", self.class, format_rational(&self.h_sup), format_rational(&self.c))?;
        if let Variant::SymplecticForm { theta, r_const } = &self.variant {
            write!(f, ", symplectic-form homotopy with theta = {}", format_rational(theta))?;
            if let Some(r) = r_const {
                write!(f, ", r_const = {}", format_rational(r))?;
            }
        }
        Ok(())
    }
}

/// Period bound `|η_r| <= e^{k r}|η0|` next to a fourth-order integration of
/// the comparison equation `η' = k η`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaBound {
    pub r: f64,
    pub rate: f64,
    pub bound: f64,
    pub numeric: f64,
}

impl EtaBound {
    pub fn relative_error(&self) -> f64 {
        if self.bound == 0.0 {
            self.numeric.abs()
        } else {
            ((self.numeric - self.bound) / self.bound).abs()
        }
    }
}

const RK4_STEPS: usize = 1000;
const ETA_TOLERANCE: f64 = 1e-6;

fn rk4_growth(rate: f64, eta0: f64, r: f64) -> f64 {
    let h = r / RK4_STEPS as f64;
    let f = |y: f64| rate * y;
    let mut y = eta0;
    for _ in 0..RK4_STEPS {
        let k1 = f(y);
        let k2 = f(y + h * k1 / 2.0);
        let k3 = f(y + h * k2 / 2.0);
        let k4 = f(y + h * k3);
        y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    y
}

pub fn eta_bound(model: &HomotopyModel, eta0: f64, r: f64) -> Result<EtaBound, RabinowitzError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(RabinowitzError::OutOfRange(r));
    }
    let rate = rational_to_f64(model.eta_rate());
    let bound = (rate * r).exp() * eta0.abs();
    let numeric = rk4_growth(rate, eta0.abs(), r);
    let out = EtaBound { r, rate, bound, numeric };
    if out.relative_error() > ETA_TOLERANCE {
        return Err(RabinowitzError::VerificationFailed(format!(
            "closed form {bound} and integration {numeric} disagree at r = {r}"
        )));
    }
    Ok(out)
}

/// `(r, bound)` at `samples + 1` equally spaced parameters.
pub fn eta_trajectory(model: &HomotopyModel, eta0: f64, samples: usize) -> Result<Vec<(f64, f64)>, RabinowitzError> {
    let n = samples.max(1);
    (0..=n)
        .map(|k| {
            let r = k as f64 / n as f64;
            eta_bound(model, eta0, r).map(|b| (r, b.bound))
        })
        .collect()
}

/// Integer edge above which the first `depth` iterated logarithms are
/// positive.
fn log_gap(depth: u32) -> Rational {
    Rational::from_integer(((log_threshold(depth).floor() as i64) + 1).into())
}

/// Φ extracted from the tameness class: `c𝔥|s|` for tame, `c𝔥|s|L1···Ld`
/// for logarithmic-tame, `c s²` for square-tame. `rho0` sets the gap of the
/// square-tame bound.
pub fn phi_for_class(model: &HomotopyModel, rho0: Option<&Rational>) -> GrowthBound {
    let k = &model.c * model.phi_scale();
    match model.class {
        TameClass::Tame => GrowthBound::linear(k).with_gap(-Rational::one(), Rational::one()),
        TameClass::LogTame { depth } => {
            let t = log_gap(depth);
            GrowthBound::iterlog(k, depth).with_gap(-t.clone(), t)
        }
        TameClass::SquareTame => {
            let g = rho0.map(|r| r.abs()).unwrap_or_else(Rational::zero);
            GrowthBound::square(model.c.clone()).with_gap(-g.clone(), g)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InvarianceVerdict {
    /// Both tails of ∫1/Φ diverge: homology is invariant.
    Invariant,
    /// ∫ from |ρ0| reaches `1 + κ`: the class survives.
    ClassSurvives { integral: IntegralValue },
    Inconclusive { integral: IntegralValue, needed: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub model: HomotopyModel,
    pub phi: GrowthBound,
    pub verdict: InvarianceVerdict,
    /// Always set: the verdict assumes H3.
    pub conditional_on_h3: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.model)?;
        writeln!(f, "Φ = {}", self.phi)?;
        let v = match &self.verdict {
            InvarianceVerdict::Invariant => "invariant".to_string(),
            InvarianceVerdict::ClassSurvives { integral } => format!("class survives (integral {integral})"),
            InvarianceVerdict::Inconclusive { integral, needed } => {
                format!("inconclusive (integral {integral} < {})", format_rational(needed))
            }
        };
        write!(f, "verdict: {v}")?;
        if self.conditional_on_h3 {
            write!(f, " (conditional on H3)")?;
        }
        writeln!(f)
    }
}

pub fn classify_invariance(
    model: &HomotopyModel,
    rho0: Option<&Rational>,
    kappa: Option<&Rational>,
) -> Result<Classification, RabinowitzError> {
    model.validate()?;
    let phi = phi_for_class(model, rho0);
    let verdict = match model.class {
        TameClass::Tame | TameClass::LogTame { .. } => {
            if phi.tail_diverges() {
                InvarianceVerdict::Invariant
            } else {
                InvarianceVerdict::Inconclusive { integral: phi.tail_integral(&Rational::one())?, needed: Rational::one() }
            }
        }
        TameClass::SquareTame => {
            let rho0 = rho0.ok_or(RabinowitzError::MissingClassData("rho0"))?;
            let kappa = kappa.ok_or(RabinowitzError::MissingClassData("kappa"))?;
            let h2 = check_h2(&phi, kappa, rho0)?;
            let integral = if h2.upper.at_least(&h2.needed) { h2.lower.clone() } else { h2.upper.clone() };
            if h2.holds() {
                InvarianceVerdict::ClassSurvives { integral }
            } else {
                InvarianceVerdict::Inconclusive { integral, needed: h2.needed }
            }
        }
    };
    Ok(Classification { model: model.clone(), phi, verdict, conditional_on_h3: true })
}

/// Tameness constant of a restricted contact-type hypersurface.
pub fn restricted_contact_constant() -> (Rational, &'static str) {
    (
        Rational::one(),
        "a restricted contact hypersurface has a global Liouville form λ with dλ = ω, so the action of a loop is bounded by its period: tame with c = 1",
    )
}
