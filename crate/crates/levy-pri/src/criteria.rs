//! The integral criteria `J` and `L` and the partial-right-inverse decision
//! procedure.
//!
//! `J = ∫_0^1 x² Π(dx) / D(x)²` and `L = ∫_0^1 x² Π(dx) / D(x)` with
//! `D(x) = ∫_0^x ∫_y^1 tail_minus(s) ds dy`. Both integrals are evaluated over
//! dyadic bands `[2^-k, 2^-k+1)` with a least-squares decay fit deciding
//! convergence; see [`BandProtocol`] for the thresholds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{
    classify_variation, integrability_report, LevyMeasureSpec, LevyTriplet, MassClass, Side,
    VariationClass, VariationKind,
};
use crate::quad::{
    adaptive_simpson_with_breaks, classify_dyadic_bands, BandMass, BandProtocol, IntegralResult,
    IntegralStatus, QuadConfig,
};

pub use crate::quad::{IntegralResult as CriterionIntegral, QuadConfig as CriterionQuad};

/// `D(x) = ∫_0^x ∫_y^1 tail_minus(s) ds dy` for x in (0, 1].
///
/// Closed form for power-law and atomic minus tails, numeric otherwise.
/// Errors when the minus tail is identically zero (criterion undefined).
pub fn denominator_d(spec: &LevyMeasureSpec, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain(format!("D requires x in (0,1], got {x}")));
    }
    if spec.side_mass_class(Side::Minus)?.is_zero() {
        return Err(Error::Domain(
            "minus tail identically zero: D ≡ 0 and the criterion is undefined".into(),
        ));
    }
    Ok(d_unchecked(spec, x))
}

fn d_unchecked(spec: &LevyMeasureSpec, x: f64) -> f64 {
    match spec {
        LevyMeasureSpec::PowerLawTails { alpha, c_minus, .. } => {
            let (c, a) = (*c_minus, *alpha);
            if (a - 1.0).abs() < 1e-12 {
                c * x * (1.0 - x.ln())
            } else {
                c / (1.0 - a) * (x - x.powf(2.0 - a) / (2.0 - a))
            }
        }
        LevyMeasureSpec::FiniteActivity { total_mass, jump_law } => match jump_law {
            crate::measures::JumpLaw::Dirac { at } if *at < 0.0 => {
                let a = (-at).min(1.0);
                if x <= a {
                    total_mass * (a * x - 0.5 * x * x)
                } else {
                    total_mass * 0.5 * a * a
                }
            }
            crate::measures::JumpLaw::Dirac { .. } => 0.0,
            crate::measures::JumpLaw::Uniform { .. } => d_numeric(spec, x),
        },
        LevyMeasureSpec::SpectrallyPositive { .. } => 0.0,
        LevyMeasureSpec::SpectrallyNegative { inner } => d_unchecked(inner, x),
        LevyMeasureSpec::Superposition { components } => {
            components.iter().map(|c| d_unchecked(c, x)).sum()
        }
        LevyMeasureSpec::TabulatedTails { .. } => d_numeric(spec, x),
    }
}

fn d_numeric(spec: &LevyMeasureSpec, x: f64) -> f64 {
    // The inner integral ∫_y^1 tail ds is evaluated exactly per variant; the
    // outer integral is smooth away from tail breakpoints.
    let cfg = QuadConfig { rel_tol: 1e-10, abs_tol: 1e-14, max_evals: 100_000 };
    let mut budget = cfg.max_evals;
    let breaks = spec.breakpoints(Side::Minus);
    let f = |y: f64| spec.integrated_tail(Side::Minus, y);
    adaptive_simpson_with_breaks(&f, 0.0, x, &breaks, &cfg, &mut budget)
        .map(|(v, _)| v)
        .unwrap_or(f64::NAN)
}

fn check_jl_preconditions(spec: &LevyMeasureSpec) -> Result<()> {
    let report = integrability_report(spec)?;
    if report.plus.is_zero() {
        return Err(Error::Precondition(
            "criterion requires Π(R+) > 0; the decision procedure short-circuits first".into(),
        ));
    }
    if !report.minus.is_infinite() {
        return Err(Error::Precondition(
            "criterion requires Π(R-) = ∞; the decision procedure short-circuits first".into(),
        ));
    }
    Ok(())
}

/// Evaluate `J = ∫_0^1 x² Π(dx) / D(x)²` over dyadic bands.
pub fn evaluate_j(t: &LevyTriplet, quad: &QuadConfig) -> Result<IntegralResult> {
    evaluate_criterion(&t.measure, quad, 2)
}

/// Evaluate `L = ∫_0^1 x² Π(dx) / D(x)` over dyadic bands.
pub fn evaluate_l(t: &LevyTriplet, quad: &QuadConfig) -> Result<IntegralResult> {
    evaluate_criterion(&t.measure, quad, 1)
}

fn evaluate_criterion(
    spec: &LevyMeasureSpec,
    quad: &QuadConfig,
    denom_power: i32,
) -> Result<IntegralResult> {
    check_jl_preconditions(spec)?;
    let protocol = BandProtocol::default();
    let mut budget = quad.max_evals;
    let support_inf = spec.support_infimum(Side::Plus);
    let breaks = spec.breakpoints(Side::Plus);

    let g = |x: f64| {
        let d = d_unchecked(spec, x);
        x * x / d.powi(denom_power)
    };
    let g_prime = |x: f64| {
        let d = d_unchecked(spec, x);
        let dp = spec.integrated_tail(Side::Minus, x);
        match denom_power {
            2 => (2.0 * x * d - 2.0 * x * x * dp) / d.powi(3),
            _ => (2.0 * x * d - x * x * dp) / (d * d),
        }
    };

    let atom_term = spec.mass_at(Side::Plus, 1.0) * g(1.0);

    let result = classify_dyadic_bands(atom_term, &protocol, |k| {
        let lo = (2f64).powi(-(k as i32));
        let hi = (2f64).powi(-(k as i32) + 1);
        if support_inf >= hi {
            return Ok(BandMass { mass: 0.0, quad_error: 0.0, support_exhausted: true });
        }
        // ∫_[lo,hi) g dΠ+ by parts against the plus tail.
        let boundary = g(lo) * spec.tail_unchecked(Side::Plus, lo)
            - g(hi) * spec.tail_unchecked(Side::Plus, hi);
        let f = |x: f64| g_prime(x) * spec.tail_unchecked(Side::Plus, x);
        let (inner, err) = adaptive_simpson_with_breaks(&f, lo, hi, &breaks, quad, &mut budget)?;
        Ok(BandMass { mass: boundary + inner, quad_error: err, support_exhausted: false })
    });

    let mut result = match result {
        Ok(r) => r,
        Err(Error::Budget(_)) => IntegralResult {
            status: IntegralStatus::Indeterminate,
            band_masses: vec![],
            partial_sums: vec![],
            fitted_slope: None,
            analytic_exponent: None,
        },
        Err(e) => return Err(e),
    };
    if let LevyMeasureSpec::PowerLawTails { alpha, beta, c_plus, .. } = spec {
        if *c_plus > 0.0 {
            result.analytic_exponent = Some(match denom_power {
                2 => 2.0 * alpha - 3.0 - beta,
                _ => alpha - 1.0 - beta,
            });
        }
    }
    Ok(result)
}

/// Answer of the decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriAnswer {
    Exists,
    NotExists,
    Indeterminate,
}

/// Which branch of the case analysis fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionCase {
    ContinuousSigma,
    ContinuousDriftPositive,
    ContinuousDriftNegative,
    ContinuousDegenerate,
    FiniteActivitySigma,
    FiniteActivityDriftPositive,
    FiniteActivityDriftNonpositive,
    UvSigma,
    SpectrallyNegativeUnbounded,
    BvDriftPositive,
    BvDriftNonpositive,
    BvPlusSideInfinite,
    UvMinusSideFinite,
    UvJFinite,
    UvJDivergent,
    UvJIndeterminate,
    ClassificationIndeterminate,
}

impl DecisionCase {
    /// Short branch label used in reports.
    pub fn label(&self) -> &'static str {
        use DecisionCase::*;
        match self {
            ContinuousSigma => "continuous/sigma",
            ContinuousDriftPositive => "continuous/drift-positive",
            ContinuousDriftNegative => "continuous/drift-negative",
            ContinuousDegenerate => "continuous/degenerate",
            FiniteActivitySigma => "finite-activity/sigma",
            FiniteActivityDriftPositive => "finite-activity/drift-positive",
            FiniteActivityDriftNonpositive => "finite-activity/drift-nonpositive",
            UvSigma => "UV/sigma",
            SpectrallyNegativeUnbounded => "SN/unbounded-variation",
            BvDriftPositive => "BV/drift-positive",
            BvDriftNonpositive => "BV/drift-nonpositive",
            BvPlusSideInfinite => "BV/plus-side-infinite",
            UvMinusSideFinite => "UV/minus-side-finite",
            UvJFinite => "UV/J-finite",
            UvJDivergent => "UV/J-divergent",
            UvJIndeterminate => "UV/J-indeterminate",
            ClassificationIndeterminate => "classification-indeterminate",
        }
    }
}

/// Full output of the decision procedure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriDecision {
    pub answer: PriAnswer,
    pub case: DecisionCase,
    pub variation: Option<VariationClass>,
    pub j: Option<IntegralResult>,
}

impl PriDecision {
    fn bare(answer: PriAnswer, case: DecisionCase) -> Self {
        Self { answer, case, variation: None, j: None }
    }
}

/// Decide PRI existence from the triplet, consulting `J` only in the genuinely
/// two-sided unbounded-variation case.
pub fn decide_pri(t: &LevyTriplet) -> Result<PriDecision> {
    decide_pri_with(t, &QuadConfig::default())
}

pub fn decide_pri_with(t: &LevyTriplet, quad: &QuadConfig) -> Result<PriDecision> {
    use DecisionCase::*;
    use PriAnswer::*;

    let report = match integrability_report(&t.measure) {
        Ok(r) => r,
        Err(Error::Indeterminate(_)) => {
            return Ok(PriDecision::bare(Indeterminate, ClassificationIndeterminate))
        }
        Err(e) => return Err(e),
    };

    // No jumps at all: the process is γt + σB.
    if report.total.is_zero() {
        return Ok(if t.sigma > 0.0 {
            PriDecision::bare(Exists, ContinuousSigma)
        } else if t.gamma > 0.0 {
            PriDecision::bare(Exists, ContinuousDriftPositive)
        } else if t.gamma < 0.0 {
            PriDecision::bare(NotExists, ContinuousDriftNegative)
        } else {
            // Constant path: hits no positive level.
            PriDecision::bare(NotExists, ContinuousDegenerate)
        });
    }

    // Finite total mass: up to the first jump the path is σB + bt.
    if let MassClass::Finite(_) = report.total {
        if t.sigma > 0.0 {
            return Ok(PriDecision::bare(Exists, FiniteActivitySigma));
        }
        let b = t.gamma - t.measure.mean_jump_le1()?;
        return Ok(if b > 0.0 {
            PriDecision::bare(Exists, FiniteActivityDriftPositive)
        } else {
            PriDecision::bare(NotExists, FiniteActivityDriftNonpositive)
        });
    }

    // Infinite total mass from here on.
    if t.sigma > 0.0 {
        return Ok(PriDecision::bare(Exists, UvSigma));
    }

    let variation = match classify_variation(t) {
        Ok(v) => v,
        Err(Error::Indeterminate(_)) => {
            return Ok(PriDecision::bare(Indeterminate, ClassificationIndeterminate))
        }
        Err(e) => return Err(e),
    };

    if !report.minus.is_infinite() {
        // Positive jumps dominate: never hits small levels when σ = 0.
        let case = match variation.kind {
            VariationKind::BoundedVariation { .. } => BvPlusSideInfinite,
            VariationKind::UnboundedVariation => UvMinusSideFinite,
        };
        return Ok(PriDecision {
            answer: NotExists,
            case,
            variation: Some(variation),
            j: None,
        });
    }

    if !report.plus.is_infinite() {
        // Spectrally-negative reduction: passes continuously over positive
        // levels iff unbounded variation or positive drift.
        let (answer, case) = match variation.kind {
            VariationKind::UnboundedVariation => (Exists, SpectrallyNegativeUnbounded),
            VariationKind::BoundedVariation { b } if b > 0.0 => (Exists, BvDriftPositive),
            VariationKind::BoundedVariation { .. } => (NotExists, BvDriftNonpositive),
        };
        return Ok(PriDecision { answer, case, variation: Some(variation), j: None });
    }

    // Both sides infinitely active.
    if let VariationKind::BoundedVariation { .. } = variation.kind {
        return Ok(PriDecision {
            answer: NotExists,
            case: BvPlusSideInfinite,
            variation: Some(variation),
            j: None,
        });
    }
    let j = evaluate_j(t, quad)?;
    let (answer, case) = match j.status {
        IntegralStatus::Convergent { .. } => (Exists, UvJFinite),
        IntegralStatus::Divergent { .. } => (NotExists, UvJDivergent),
        IntegralStatus::Indeterminate => (Indeterminate, UvJIndeterminate),
    };
    Ok(PriDecision { answer, case, variation: Some(variation), j: Some(j) })
}

/// Analytic phase decision for exact power-law tails with σ = 0 and
/// exponents `1 < alpha < 2`, `0 <= beta < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollaryDecision {
    pub pri: bool,
    pub creeps: bool,
}

pub fn corollary_decision(alpha: f64, beta: f64) -> Result<CorollaryDecision> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "corollary requires 1 < alpha < 2 (alpha = 1 is undecided here), got {alpha}"
        )));
    }
    if !(0.0..2.0).contains(&beta) {
        return Err(Error::Domain(format!("corollary requires 0 <= beta < 2, got {beta}")));
    }
    // Strict inequalities: the equality boundary resolves divergent for exact
    // power laws.
    Ok(CorollaryDecision { pri: beta < 2.0 * alpha - 2.0, creeps: beta < alpha })
}
