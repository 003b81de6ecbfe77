//! Lévy triplets and jump-measure specifications.
//!
//! A jump measure is described through its one-sided tail functions. We use
//! the left-closed convention `tail(x) = Π({ jumps with magnitude >= x on the
//! given side })`, which matches the integral criteria downstream: with an
//! exact power model truncated at 1, `tail(x) = c * x^(-e)` on (0, 1] carries
//! an atom of mass `c` at 1 and vanishes beyond it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which half-line of the jump measure is being queried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

/// Total mass of a (one-sided) measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassClass {
    Zero,
    Finite(f64),
    Infinite,
}

impl MassClass {
    pub fn is_infinite(&self) -> bool {
        matches!(self, MassClass::Infinite)
    }
    pub fn is_zero(&self) -> bool {
        matches!(self, MassClass::Zero)
    }
}

/// Jump distribution of a finite-activity measure; carries a sampler and a
/// tail function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpLaw {
    /// All jumps have the same size `at` (may be negative).
    Dirac { at: f64 },
    /// Jumps uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
}

impl JumpLaw {
    fn validate(&self) -> Result<()> {
        match self {
            JumpLaw::Dirac { at } => {
                if *at == 0.0 || !at.is_finite() {
                    return Err(Error::InvalidSpec("dirac jump size must be nonzero finite".into()));
                }
            }
            JumpLaw::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidSpec("uniform jump law needs lo < hi, finite".into()));
                }
            }
        }
        Ok(())
    }

    /// P(J >= x) for x > 0 (plus side) or P(J <= -x) (minus side).
    fn side_tail(&self, side: Side, x: f64) -> f64 {
        match self {
            JumpLaw::Dirac { at } => {
                let (mag, on_side) = side_magnitude(*at, side);
                if on_side && mag >= x {
                    1.0
                } else {
                    0.0
                }
            }
            JumpLaw::Uniform { lo, hi } => {
                let len = hi - lo;
                match side {
                    Side::Plus => ((hi - x.max(*lo)) / len).clamp(0.0, 1.0),
                    Side::Minus => ((-x).min(*hi) - lo).max(0.0).min(len) / len,
                }
            }
        }
    }

    /// Fraction of the law lying strictly on the given side of zero.
    fn side_fraction(&self, side: Side) -> f64 {
        // Tail at 0+ in the limit; both laws have no atom at 0.
        match self {
            JumpLaw::Dirac { at } => {
                let (_, on_side) = side_magnitude(*at, side);
                if on_side {
                    1.0
                } else {
                    0.0
                }
            }
            JumpLaw::Uniform { lo, hi } => match side {
                Side::Plus => (hi.max(0.0) - lo.max(0.0)) / (hi - lo),
                Side::Minus => (hi.min(0.0) - lo.min(0.0)) / (hi - lo),
            },
        }
    }
}

fn side_magnitude(jump: f64, side: Side) -> (f64, bool) {
    match side {
        Side::Plus => (jump, jump > 0.0),
        Side::Minus => (-jump, jump < 0.0),
    }
}

/// Specification of a Lévy jump measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum LevyMeasureSpec {
    /// Exact power-law tails truncated to `[-1, 1]`:
    /// `tail_minus(x) = c_minus * x^(-alpha)`, `tail_plus(x) = c_plus * x^(-beta)`
    /// on `(0, 1]`, zero beyond 1. Each side carries an atom at 1.
    PowerLawTails {
        alpha: f64,
        beta: f64,
        c_minus: f64,
        c_plus: f64,
    },
    /// Finite total mass with a named jump distribution.
    FiniteActivity { total_mass: f64, jump_law: JumpLaw },
    /// Tails tabulated on a positive grid; log-log linear interpolation
    /// between grid points, constant extrapolation toward 0+, zero beyond the
    /// last grid point. Ties at grid points take the grid value.
    TabulatedTails {
        grid: Vec<f64>,
        tail_plus: Vec<f64>,
        tail_minus: Vec<f64>,
    },
    /// Only positive jumps: the minus side of `inner` is discarded.
    SpectrallyPositive { inner: Box<LevyMeasureSpec> },
    /// Only negative jumps: the plus side of `inner` is discarded.
    SpectrallyNegative { inner: Box<LevyMeasureSpec> },
    /// Sum of independent components.
    Superposition { components: Vec<LevyMeasureSpec> },
}

/// Tabulated-tail slope flatter than this (in log-log units) at the left edge
/// is taken as "the tail has levelled off"; activity questions are otherwise
/// indeterminate below the grid.
const FLAT_SLOPE_TOL: f64 = 0.1;

impl LevyMeasureSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasureSpec::PowerLawTails { alpha, beta, c_minus, c_plus } => {
                if !(0.0..2.0).contains(alpha) || !(0.0..2.0).contains(beta) {
                    return Err(Error::InvalidSpec(format!(
                        "power-law exponents must lie in [0,2): alpha={alpha}, beta={beta}"
                    )));
                }
                if !(*c_minus > 0.0) || !c_minus.is_finite() {
                    return Err(Error::InvalidSpec("c_minus must be a positive real".into()));
                }
                if !(*c_plus >= 0.0) || !c_plus.is_finite() {
                    return Err(Error::InvalidSpec("c_plus must be a nonnegative real".into()));
                }
            }
            LevyMeasureSpec::FiniteActivity { total_mass, jump_law } => {
                if !(*total_mass >= 0.0) || !total_mass.is_finite() {
                    return Err(Error::InvalidSpec("total_mass must be nonnegative finite".into()));
                }
                jump_law.validate()?;
            }
            LevyMeasureSpec::TabulatedTails { grid, tail_plus, tail_minus } => {
                if grid.is_empty() || grid.len() != tail_plus.len() || grid.len() != tail_minus.len() {
                    return Err(Error::InvalidSpec(
                        "tabulated grid and tail vectors must be nonempty and equal length".into(),
                    ));
                }
                if grid[0] <= 0.0 || grid.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidSpec("grid must be strictly increasing and positive".into()));
                }
                for vals in [tail_plus, tail_minus] {
                    if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
                        return Err(Error::InvalidSpec("tail values must be finite and nonnegative".into()));
                    }
                    if vals.windows(2).any(|w| w[0] < w[1]) {
                        return Err(Error::InvalidSpec("tail values must be nonincreasing".into()));
                    }
                }
            }
            LevyMeasureSpec::SpectrallyPositive { inner } | LevyMeasureSpec::SpectrallyNegative { inner } => {
                inner.validate()?;
            }
            LevyMeasureSpec::Superposition { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidSpec("superposition needs at least one component".into()));
                }
                for c in components {
                    c.validate()?;
                }
            }
        }
        Ok(())
    }

    /// One-sided tail `Π̄^side(x)` for x > 0. Nonincreasing in x, zero beyond
    /// the support.
    pub fn tail(&self, side: Side, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("tail requires x > 0, got {x}")));
        }
        Ok(self.tail_unchecked(side, x))
    }

    pub(crate) fn tail_unchecked(&self, side: Side, x: f64) -> f64 {
        match self {
            LevyMeasureSpec::PowerLawTails { alpha, beta, c_minus, c_plus } => {
                let (c, e) = match side {
                    Side::Plus => (*c_plus, *beta),
                    Side::Minus => (*c_minus, *alpha),
                };
                if x > 1.0 || c == 0.0 {
                    0.0
                } else {
                    c * x.powf(-e)
                }
            }
            LevyMeasureSpec::FiniteActivity { total_mass, jump_law } => {
                total_mass * jump_law.side_tail(side, x)
            }
            LevyMeasureSpec::TabulatedTails { grid, tail_plus, tail_minus } => {
                let vals = match side {
                    Side::Plus => tail_plus,
                    Side::Minus => tail_minus,
                };
                interpolate_tabulated(grid, vals, x)
            }
            LevyMeasureSpec::SpectrallyPositive { inner } => match side {
                Side::Plus => inner.tail_unchecked(side, x),
                Side::Minus => 0.0,
            },
            LevyMeasureSpec::SpectrallyNegative { inner } => match side {
                Side::Plus => 0.0,
                Side::Minus => inner.tail_unchecked(side, x),
            },
            LevyMeasureSpec::Superposition { components } => {
                components.iter().map(|c| c.tail_unchecked(side, x)).sum()
            }
        }
    }

    /// Atom mass of the side measure at magnitude `x > 0`.
    pub fn mass_at(&self, side: Side, x: f64) -> f64 {
        match self {
            LevyMeasureSpec::PowerLawTails { .. } => {
                if x == 1.0 {
                    self.tail_unchecked(side, 1.0)
                } else {
                    0.0
                }
            }
            LevyMeasureSpec::FiniteActivity { total_mass, jump_law } => match jump_law {
                JumpLaw::Dirac { at } => {
                    let (mag, on_side) = side_magnitude(*at, side);
                    if on_side && mag == x {
                        *total_mass
                    } else {
                        0.0
                    }
                }
                JumpLaw::Uniform { .. } => 0.0,
            },
            LevyMeasureSpec::TabulatedTails { .. } => 0.0,
            LevyMeasureSpec::SpectrallyPositive { inner } => match side {
                Side::Plus => inner.mass_at(side, x),
                Side::Minus => 0.0,
            },
            LevyMeasureSpec::SpectrallyNegative { inner } => match side {
                Side::Plus => 0.0,
                Side::Minus => inner.mass_at(side, x),
            },
            LevyMeasureSpec::Superposition { components } => {
                components.iter().map(|c| c.mass_at(side, x)).sum()
            }
        }
    }

    /// Tail just beyond 1, i.e. the side mass strictly above magnitude 1.
    pub fn tail_beyond_one(&self, side: Side) -> f64 {
        (self.tail_unchecked(side, 1.0) - self.mass_at(side, 1.0)).max(0.0)
    }

    /// `∫_x^1 tail(side, s) ds` for x in [0, 1]. Infinite results are returned
    /// as `f64::INFINITY` (possible only at x = 0 for non-integrable tails).
    pub fn integrated_tail(&self, side: Side, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        if x >= 1.0 {
            return 0.0;
        }
        match self {
            LevyMeasureSpec::PowerLawTails { alpha, beta, c_minus, c_plus } => {
                let (c, e) = match side {
                    Side::Plus => (*c_plus, *beta),
                    Side::Minus => (*c_minus, *alpha),
                };
                if c == 0.0 {
                    0.0
                } else {
                    power_integral(c, e, x, 1.0)
                }
            }
            LevyMeasureSpec::FiniteActivity { total_mass, jump_law } => match jump_law {
                JumpLaw::Dirac { at } => {
                    let (mag, on_side) = side_magnitude(*at, side);
                    if !on_side {
                        0.0
                    } else {
                        total_mass * (mag.min(1.0) - x).max(0.0)
                    }
                }
                JumpLaw::Uniform { .. } => {
                    // Tail is piecewise linear; the trapezoid rule on
                    // breakpoints is exact.
                    piecewise_linear_integral(|s| self.tail_unchecked(side, s), &self.breakpoints(side), x, 1.0)
                }
            },
            LevyMeasureSpec::TabulatedTails { grid, tail_plus, tail_minus } => {
                let vals = match side {
                    Side::Plus => tail_plus,
                    Side::Minus => tail_minus,
                };
                tabulated_integral(grid, vals, x, 1.0)
            }
            LevyMeasureSpec::SpectrallyPositive { inner } => match side {
                Side::Plus => inner.integrated_tail(side, x),
                Side::Minus => 0.0,
            },
            LevyMeasureSpec::SpectrallyNegative { inner } => match side {
                Side::Plus => 0.0,
                Side::Minus => inner.integrated_tail(side, x),
            },
            LevyMeasureSpec::Superposition { components } => {
                components.iter().map(|c| c.integrated_tail(side, x)).sum()
            }
        }
    }

    /// `∫_0^b 2 s tail(side, s) ds` for b in (0, 1]. Always finite for valid
    /// specs (second-moment integrability).
    pub fn twice_s_tail_integral(&self, side: Side, b: f64) -> f64 {
        debug_assert!(b > 0.0 && b <= 1.0);
        match self {
            LevyMeasureSpec::PowerLawTails { alpha, beta, c_minus, c_plus } => {
                let (c, e) = match side {
                    Side::Plus => (*c_plus, *beta),
                    Side::Minus => (*c_minus, *alpha),
                };
                // ∫ 2 c s^{1-e} ds = 2 c b^{2-e} / (2-e), e < 2
                2.0 * c * b.powf(2.0 - e) / (2.0 - e)
            }
            LevyMeasureSpec::FiniteActivity { total_mass, jump_law } => match jump_law {
                JumpLaw::Dirac { at } => {
                    let (mag, on_side) = side_magnitude(*at, side);
                    if !on_side {
                        0.0
                    } else {
                        total_mass * mag.min(b).powi(2)
                    }
                }
                JumpLaw::Uniform { .. } => {
                    // 2 s * (piecewise linear) is piecewise quadratic; Simpson
                    // on breakpoints is exact.
                    piecewise_simpson_integral(
                        |s| 2.0 * s * self.tail_unchecked(side, s),
                        &self.breakpoints(side),
                        0.0,
                        b,
                    )
                }
            },
            LevyMeasureSpec::TabulatedTails { grid, tail_plus, tail_minus } => {
                let vals = match side {
                    Side::Plus => tail_plus,
                    Side::Minus => tail_minus,
                };
                tabulated_moment_integral(grid, vals, b)
            }
            LevyMeasureSpec::SpectrallyPositive { inner } => match side {
                Side::Plus => inner.twice_s_tail_integral(side, b),
                Side::Minus => 0.0,
            },
            LevyMeasureSpec::SpectrallyNegative { inner } => match side {
                Side::Plus => 0.0,
                Side::Minus => inner.twice_s_tail_integral(side, b),
            },
            LevyMeasureSpec::Superposition { components } => {
                components.iter().map(|c| c.twice_s_tail_integral(side, b)).sum()
            }
        }
    }

    /// `∫_{(0,b)} s^2 Π^side(ds)` (open at b; excludes any atom at b).
    pub fn second_moment_below(&self, side: Side, b: f64) -> f64 {
        let b = b.min(1.0);
        if b <= 0.0 {
            return 0.0;
        }
        (self.twice_s_tail_integral(side, b) - b * b * self.tail_unchecked(side, b)).max(0.0)
    }

    /// `∫_{[eps,1]} s Π^side(ds)`.
    pub fn mean_between(&self, side: Side, eps: f64) -> f64 {
        debug_assert!(eps > 0.0 && eps <= 1.0);
        eps * self.tail_unchecked(side, eps) + self.integrated_tail(side, eps)
            - self.tail_beyond_one(side)
    }

    /// `∫_{|x|<=1} x Π(dx)`; requires `∫(1∧|x|)Π < ∞`.
    pub fn mean_jump_le1(&self) -> Result<f64> {
        if !self.one_abs_integrable()? {
            return Err(Error::Precondition(
                "∫(1∧|x|)Π(dx) is infinite; truncated mean undefined".into(),
            ));
        }
        let plus = self.integrated_tail(Side::Plus, 0.0) - self.tail_beyond_one(Side::Plus);
        let minus = self.integrated_tail(Side::Minus, 0.0) - self.tail_beyond_one(Side::Minus);
        Ok(plus - minus)
    }

    /// No side mass strictly below this magnitude; `f64::INFINITY` when the
    /// side is empty.
    pub fn support_infimum(&self, side: Side) -> f64 {
        match self {
            LevyMeasureSpec::PowerLawTails { alpha, beta, c_minus, c_plus } => {
                let (c, e) = match side {
                    Side::Plus => (*c_plus, *beta),
                    Side::Minus => (*c_minus, *alpha),
                };
                if c == 0.0 {
                    f64::INFINITY
                } else if e == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            LevyMeasureSpec::FiniteActivity { total_mass, jump_law } => {
                if *total_mass == 0.0 {
                    return f64::INFINITY;
                }
                match jump_law {
                    JumpLaw::Dirac { at } => {
                        let (mag, on_side) = side_magnitude(*at, side);
                        if on_side {
                            mag
                        } else {
                            f64::INFINITY
                        }
                    }
                    JumpLaw::Uniform { lo, hi } => match side {
                        Side::Plus => {
                            if *hi <= 0.0 {
                                f64::INFINITY
                            } else {
                                lo.max(0.0)
                            }
                        }
                        Side::Minus => {
                            if *lo >= 0.0 {
                                f64::INFINITY
                            } else {
                                (-hi).max(0.0)
                            }
                        }
                    },
                }
            }
            LevyMeasureSpec::TabulatedTails { grid, tail_plus, tail_minus } => {
                let vals = match side {
                    Side::Plus => tail_plus,
                    Side::Minus => tail_minus,
                };
                if vals[0] == 0.0 {
                    f64::INFINITY
                } else {
                    grid[0]
                }
            }
            LevyMeasureSpec::SpectrallyPositive { inner } => match side {
                Side::Plus => inner.support_infimum(side),
                Side::Minus => f64::INFINITY,
            },
            LevyMeasureSpec::SpectrallyNegative { inner } => match side {
                Side::Plus => f64::INFINITY,
                Side::Minus => inner.support_infimum(side),
            },
            LevyMeasureSpec::Superposition { components } => components
                .iter()
                .map(|c| c.support_infimum(side))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Magnitudes in (0, 1] where the side tail is not smooth (used to split
    /// quadrature intervals). Sorted, deduplicated.
    pub fn breakpoints(&self, side: Side) -> Vec<f64> {
        let mut pts = Vec::new();
        self.collect_breakpoints(side, &mut pts);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    fn collect_breakpoints(&self, side: Side, out: &mut Vec<f64>) {
        let push = |out: &mut Vec<f64>, x: f64| {
            if x > 0.0 && x <= 1.0 {
                out.push(x);
            }
        };
        match self {
            LevyMeasureSpec::PowerLawTails { .. } => push(out, 1.0),
            LevyMeasureSpec::FiniteActivity { jump_law, .. } => match jump_law {
                JumpLaw::Dirac { at } => {
                    let (mag, on_side) = side_magnitude(*at, side);
                    if on_side {
                        push(out, mag);
                    }
                }
                JumpLaw::Uniform { lo, hi } => {
                    for v in [*lo, *hi] {
                        push(out, v.abs());
                    }
                }
            },
            LevyMeasureSpec::TabulatedTails { grid, .. } => {
                for g in grid {
                    push(out, *g);
                }
            }
            LevyMeasureSpec::SpectrallyPositive { inner } => {
                if side == Side::Plus {
                    inner.collect_breakpoints(side, out);
                }
            }
            LevyMeasureSpec::SpectrallyNegative { inner } => {
                if side == Side::Minus {
                    inner.collect_breakpoints(side, out);
                }
            }
            LevyMeasureSpec::Superposition { components } => {
                for c in components {
                    c.collect_breakpoints(side, out);
                }
            }
        }
    }

    /// Total mass of one side.
    pub fn side_mass_class(&self, side: Side) -> Result<MassClass> {
        match self {
            LevyMeasureSpec::PowerLawTails { alpha, beta, c_minus, c_plus } => {
                let (c, e) = match side {
                    Side::Plus => (*c_plus, *beta),
                    Side::Minus => (*c_minus, *alpha),
                };
                Ok(if c == 0.0 {
                    MassClass::Zero
                } else if e > 0.0 {
                    MassClass::Infinite
                } else {
                    MassClass::Finite(c)
                })
            }
            LevyMeasureSpec::FiniteActivity { total_mass, jump_law } => {
                let m = total_mass * jump_law.side_fraction(side);
                Ok(if m == 0.0 { MassClass::Zero } else { MassClass::Finite(m) })
            }
            LevyMeasureSpec::TabulatedTails { grid, tail_plus, tail_minus } => {
                let vals = match side {
                    Side::Plus => tail_plus,
                    Side::Minus => tail_minus,
                };
                if vals[0] == 0.0 {
                    return Ok(MassClass::Zero);
                }
                if !tabulated_left_edge_flat(grid, vals) {
                    return Err(Error::Indeterminate(
                        "tabulated tail still rising at the smallest grid point; \
                         activity below the grid cannot be decided"
                            .into(),
                    ));
                }
                Ok(MassClass::Finite(vals[0]))
            }
            LevyMeasureSpec::SpectrallyPositive { inner } => match side {
                Side::Plus => inner.side_mass_class(side),
                Side::Minus => Ok(MassClass::Zero),
            },
            LevyMeasureSpec::SpectrallyNegative { inner } => match side {
                Side::Plus => Ok(MassClass::Zero),
                Side::Minus => inner.side_mass_class(side),
            },
            LevyMeasureSpec::Superposition { components } => {
                let mut total = 0.0;
                let mut indeterminate: Option<Error> = None;
                for c in components {
                    match c.side_mass_class(side) {
                        Ok(MassClass::Infinite) => return Ok(MassClass::Infinite),
                        Ok(MassClass::Finite(m)) => total += m,
                        Ok(MassClass::Zero) => {}
                        Err(e) => indeterminate = Some(e),
                    }
                }
                if let Some(e) = indeterminate {
                    return Err(e);
                }
                Ok(if total == 0.0 { MassClass::Zero } else { MassClass::Finite(total) })
            }
        }
    }

    /// Whether `∫(1∧|x|)Π(dx) < ∞`.
    pub fn one_abs_integrable(&self) -> Result<bool> {
        match self {
            LevyMeasureSpec::PowerLawTails { alpha, beta, c_plus, .. } => {
                Ok(*alpha < 1.0 && (*c_plus == 0.0 || *beta < 1.0))
            }
            LevyMeasureSpec::FiniteActivity { .. } => Ok(true),
            LevyMeasureSpec::TabulatedTails { grid, tail_plus, tail_minus } => {
                for vals in [tail_plus, tail_minus] {
                    if vals[0] > 0.0 && !tabulated_left_edge_flat(grid, vals) {
                        return Err(Error::Indeterminate(
                            "tabulated tail too coarse to decide ∫(1∧|x|)Π".into(),
                        ));
                    }
                }
                Ok(true)
            }
            LevyMeasureSpec::SpectrallyPositive { inner } => {
                match inner.side_mass_class(Side::Plus)? {
                    MassClass::Zero | MassClass::Finite(_) => Ok(true),
                    MassClass::Infinite => Ok(inner.one_abs_side_integrable(Side::Plus)?),
                }
            }
            LevyMeasureSpec::SpectrallyNegative { inner } => {
                match inner.side_mass_class(Side::Minus)? {
                    MassClass::Zero | MassClass::Finite(_) => Ok(true),
                    MassClass::Infinite => Ok(inner.one_abs_side_integrable(Side::Minus)?),
                }
            }
            LevyMeasureSpec::Superposition { components } => {
                for c in components {
                    if !c.one_abs_integrable()? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn one_abs_side_integrable(&self, side: Side) -> Result<bool> {
        match self {
            LevyMeasureSpec::PowerLawTails { alpha, beta, c_plus, .. } => Ok(match side {
                Side::Plus => *c_plus == 0.0 || *beta < 1.0,
                Side::Minus => *alpha < 1.0,
            }),
            LevyMeasureSpec::Superposition { components } => {
                for c in components {
                    if !c.one_abs_side_integrable(side)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            LevyMeasureSpec::SpectrallyPositive { inner } => match side {
                Side::Plus => inner.one_abs_side_integrable(side),
                Side::Minus => Ok(true),
            },
            LevyMeasureSpec::SpectrallyNegative { inner } => match side {
                Side::Plus => Ok(true),
                Side::Minus => inner.one_abs_side_integrable(side),
            },
            _ => self.one_abs_integrable(),
        }
    }
}

/// Whether the tabulated tail has levelled off at the left edge.
fn tabulated_left_edge_flat(grid: &[f64], vals: &[f64]) -> bool {
    if grid.len() < 2 {
        return false;
    }
    if vals[0] == vals[1] {
        return true;
    }
    if vals[0] <= 0.0 || vals[1] <= 0.0 {
        return false;
    }
    let slope = (vals[1].ln() - vals[0].ln()) / (grid[1].ln() - grid[0].ln());
    slope.abs() <= FLAT_SLOPE_TOL
}

/// Log-log linear interpolation of a tabulated tail.
fn interpolate_tabulated(grid: &[f64], vals: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if x <= grid[0] {
        return vals[0];
    }
    if x > grid[n - 1] {
        return 0.0;
    }
    let i = match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
        Ok(i) => return vals[i],
        Err(i) => i - 1,
    };
    let (x0, x1, v0, v1) = (grid[i], grid[i + 1], vals[i], vals[i + 1]);
    if v0 == 0.0 {
        return 0.0;
    }
    if v1 == 0.0 {
        // Linear fallback on segments that hit zero.
        return v0 * (x1 - x) / (x1 - x0);
    }
    let t = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
    (v0.ln() * (1.0 - t) + v1.ln() * t).exp()
}

/// Exact `∫_a^b c s^{-e} ds`.
fn power_integral(c: f64, e: f64, a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    if (e - 1.0).abs() < 1e-12 {
        c * (b.ln() - if a > 0.0 { a.ln() } else { return f64::INFINITY })
    } else {
        let p = 1.0 - e;
        if a == 0.0 && p < 0.0 {
            return f64::INFINITY;
        }
        c * (b.powf(p) - a.powf(p)) / p
    }
}

/// Exact integral of a tabulated tail (piecewise power between knots,
/// constant below the grid, zero beyond).
fn tabulated_integral(grid: &[f64], vals: &[f64], a: f64, b: f64) -> f64 {
    segment_integral(grid, vals, a, b, |v0, x0, p, lo, hi| {
        if p == 0.0 {
            v0 * (hi - lo)
        } else if (p + 1.0).abs() < 1e-12 {
            v0 * x0 * (hi.ln() - lo.ln())
        } else {
            v0 * x0.powf(-p) * (hi.powf(p + 1.0) - lo.powf(p + 1.0)) / (p + 1.0)
        }
    })
}

/// Exact `∫_0^b 2 s tail(s) ds` for a tabulated tail.
fn tabulated_moment_integral(grid: &[f64], vals: &[f64], b: f64) -> f64 {
    segment_integral(grid, vals, 0.0, b, |v0, x0, p, lo, hi| {
        if (p + 2.0).abs() < 1e-12 {
            2.0 * v0 * x0.powf(-p) * (hi.ln() - lo.ln())
        } else {
            2.0 * v0 * x0.powf(-p) * (hi.powf(p + 2.0) - lo.powf(p + 2.0)) / (p + 2.0)
        }
    })
}

fn segment_integral(
    grid: &[f64],
    vals: &[f64],
    a: f64,
    b: f64,
    piece: impl Fn(f64, f64, f64, f64, f64) -> f64,
) -> f64 {
    let n = grid.len();
    let mut total = 0.0;
    // Constant piece below the grid.
    let lo0 = a.min(grid[0]);
    let hi0 = b.min(grid[0]);
    if hi0 > lo0 && vals[0] > 0.0 {
        total += piece(vals[0], grid[0], 0.0, lo0.max(a), hi0);
    }
    for i in 0..n - 1 {
        let (x0, x1, v0, v1) = (grid[i], grid[i + 1], vals[i], vals[i + 1]);
        let lo = a.max(x0);
        let hi = b.min(x1);
        if hi <= lo || v0 == 0.0 {
            continue;
        }
        if v1 == 0.0 {
            // Linear fallback segment: integrate v0 (x1 - s)/(x1 - x0) by
            // the trapezoid rule (exact for linear).
            let f = |s: f64| v0 * (x1 - s) / (x1 - x0);
            total += 0.5 * (f(lo) + f(hi)) * (hi - lo);
            continue;
        }
        let p = (v1.ln() - v0.ln()) / (x1.ln() - x0.ln());
        total += piece(v0, x0, p, lo, hi);
    }
    total
}

/// Trapezoid on breakpoints; exact when `f` is piecewise linear between them.
fn piecewise_linear_integral(f: impl Fn(f64) -> f64, breaks: &[f64], a: f64, b: f64) -> f64 {
    fold_segments(breaks, a, b, |lo, hi| 0.5 * (f(lo) + f(hi)) * (hi - lo))
}

/// Simpson on breakpoints; exact when `f` is piecewise quadratic between them.
fn piecewise_simpson_integral(f: impl Fn(f64) -> f64, breaks: &[f64], a: f64, b: f64) -> f64 {
    fold_segments(breaks, a, b, |lo, hi| {
        (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi))
    })
}

fn fold_segments(breaks: &[f64], a: f64, b: f64, seg: impl Fn(f64, f64) -> f64) -> f64 {
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += seg(w[0], w[1]);
        }
    }
    total
}

/// The (γ, σ, Π) characterization of a Lévy process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    /// Centering drift of the jump-truncated decomposition.
    pub gamma: f64,
    /// Gaussian coefficient, σ ≥ 0.
    pub sigma: f64,
    pub measure: LevyMeasureSpec,
}

impl LevyTriplet {
    pub fn new(gamma: f64, sigma: f64, measure: LevyMeasureSpec) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidSpec("gamma must be finite".into()));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidSpec("sigma must be nonnegative finite".into()));
        }
        measure.validate()?;
        Ok(Self { gamma, sigma, measure })
    }
}

/// Activity of one side of the jump measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activity {
    Zero,
    Finite,
    Infinite,
}

impl From<&MassClass> for Activity {
    fn from(m: &MassClass) -> Self {
        match m {
            MassClass::Zero => Activity::Zero,
            MassClass::Finite(_) => Activity::Finite,
            MassClass::Infinite => Activity::Infinite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VariationKind {
    /// σ = 0 and ∫(1∧|x|)Π < ∞; `b` is the drift coefficient of the
    /// drift-plus-subordinators form, b = γ − ∫_{|x|≤1} x Π(dx).
    BoundedVariation { b: f64 },
    UnboundedVariation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationClass {
    pub kind: VariationKind,
    pub plus_side: Activity,
    pub minus_side: Activity,
}

/// Classify the path variation of the process and the activity of each side.
pub fn classify_variation(t: &LevyTriplet) -> Result<VariationClass> {
    let plus = t.measure.side_mass_class(Side::Plus)?;
    let minus = t.measure.side_mass_class(Side::Minus)?;
    let kind = if t.sigma > 0.0 || !t.measure.one_abs_integrable()? {
        VariationKind::UnboundedVariation
    } else {
        VariationKind::BoundedVariation { b: t.gamma - t.measure.mean_jump_le1()? }
    };
    Ok(VariationClass {
        kind,
        plus_side: Activity::from(&plus),
        minus_side: Activity::from(&minus),
    })
}

/// Mass summary feeding the case split of the decision procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrabilityReport {
    pub total: MassClass,
    pub plus: MassClass,
    pub minus: MassClass,
    pub one_abs_finite: bool,
}

pub fn integrability_report(spec: &LevyMeasureSpec) -> Result<IntegrabilityReport> {
    let plus = spec.side_mass_class(Side::Plus)?;
    let minus = spec.side_mass_class(Side::Minus)?;
    let total = match (&plus, &minus) {
        (MassClass::Infinite, _) | (_, MassClass::Infinite) => MassClass::Infinite,
        (MassClass::Zero, MassClass::Zero) => MassClass::Zero,
        (a, b) => {
            let m = match a {
                MassClass::Finite(m) => *m,
                _ => 0.0,
            } + match b {
                MassClass::Finite(m) => *m,
                _ => 0.0,
            };
            MassClass::Finite(m)
        }
    };
    Ok(IntegrabilityReport {
        total,
        plus,
        minus,
        one_abs_finite: spec.one_abs_integrable()?,
    })
}

/// `∫(1∧x²)Π(dx)` estimated over `bands` dyadic bands; used by the refining
/// log-grid convergence check.
pub fn second_moment_log_grid(spec: &LevyMeasureSpec, bands: u32) -> f64 {
    let mut total = 0.0;
    for side in [Side::Plus, Side::Minus] {
        // Mass at and beyond 1 counts with weight 1 (the 1∧x² cap).
        total += spec.tail_unchecked(side, 1.0);
        for k in 1..=bands {
            let hi = (2f64).powi(-(k as i32) + 1);
            let lo = (2f64).powi(-(k as i32));
            let mass = (spec.tail_unchecked(side, lo) - spec.tail_unchecked(side, hi)).max(0.0);
            let mid = (lo * hi).sqrt();
            total += mid * mid * mass;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn power_law(alpha: f64, beta: f64, c_minus: f64, c_plus: f64) -> LevyMeasureSpec {
        LevyMeasureSpec::PowerLawTails { alpha, beta, c_minus, c_plus }
    }

    #[test]
    fn power_law_tail_values() {
        let spec = power_law(1.5, 0.5, 1.0, 1.0);
        assert_relative_eq!(spec.tail(Side::Minus, 0.25).unwrap(), 8.0);
        assert_eq!(spec.tail(Side::Plus, 2.0).unwrap(), 0.0);
        assert_eq!(spec.tail(Side::Minus, 2.0).unwrap(), 0.0);
        assert!(spec.tail(Side::Plus, 0.0).is_err());
        assert!(spec.tail(Side::Plus, -1.0).is_err());
    }

    #[test]
    fn tabulated_log_log_interpolation() {
        // Hand oracle: tails 5.0 at 0.1 and 1.0 at 0.5 lie on tail(x) = 0.5/x,
        // so the log-log interpolant at 0.3 is 0.5/0.3.
        let spec = LevyMeasureSpec::TabulatedTails {
            grid: vec![0.1, 0.5],
            tail_plus: vec![5.0, 1.0],
            tail_minus: vec![0.0, 0.0],
        };
        assert_relative_eq!(spec.tail(Side::Plus, 0.3).unwrap(), 0.5 / 0.3, max_relative = 1e-12);
        // Knot ties take the grid value; constant extrapolation toward 0+.
        assert_eq!(spec.tail(Side::Plus, 0.5).unwrap(), 1.0);
        assert_eq!(spec.tail(Side::Plus, 0.05).unwrap(), 5.0);
        assert_eq!(spec.tail(Side::Plus, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn classify_examples() {
        let t = LevyTriplet::new(0.0, 0.0, power_law(0.5, 0.5, 1.0, 1.0)).unwrap();
        let vc = classify_variation(&t).unwrap();
        assert!(matches!(vc.kind, VariationKind::BoundedVariation { .. }));

        let t = LevyTriplet::new(0.0, 1.0, power_law(0.5, 0.5, 1.0, 1.0)).unwrap();
        let vc = classify_variation(&t).unwrap();
        assert_eq!(vc.kind, VariationKind::UnboundedVariation);

        let t = LevyTriplet::new(0.0, 0.0, power_law(1.5, 0.5, 1.0, 1.0)).unwrap();
        let vc = classify_variation(&t).unwrap();
        assert_eq!(vc.kind, VariationKind::UnboundedVariation);
        assert_eq!(vc.plus_side, Activity::Infinite);
        assert_eq!(vc.minus_side, Activity::Infinite);
    }

    #[test]
    fn bounded_variation_drift_convention() {
        // b = γ − c₊/(1−β) + c₋/(1−α) for α, β < 1.
        let t = LevyTriplet::new(1.0, 0.0, power_law(0.5, 0.25, 2.0, 3.0)).unwrap();
        match classify_variation(&t).unwrap().kind {
            VariationKind::BoundedVariation { b } => {
                let expect = 1.0 - 3.0 / 0.75 + 2.0 / 0.5;
                assert_relative_eq!(b, expect, max_relative = 1e-12);
            }
            _ => panic!("expected bounded variation"),
        }
    }

    #[test]
    fn integrability_examples() {
        let r = integrability_report(&power_law(1.5, 0.0, 1.0, 2.0)).unwrap();
        assert_eq!(r.plus, MassClass::Finite(2.0));
        assert_eq!(r.minus, MassClass::Infinite);
        assert!(r.total.is_infinite());

        let fa = LevyMeasureSpec::FiniteActivity {
            total_mass: 3.0,
            jump_law: JumpLaw::Dirac { at: 1.0 },
        };
        let r = integrability_report(&fa).unwrap();
        assert_eq!(r.total, MassClass::Finite(3.0));

        let zero = LevyMeasureSpec::FiniteActivity {
            total_mass: 0.0,
            jump_law: JumpLaw::Dirac { at: 1.0 },
        };
        let r = integrability_report(&zero).unwrap();
        assert!(r.total.is_zero());
    }

    #[test]
    fn tabulated_steep_edge_is_indeterminate() {
        let spec = LevyMeasureSpec::TabulatedTails {
            grid: vec![0.01, 0.1, 1.0],
            tail_plus: vec![100.0, 10.0, 1.0],
            tail_minus: vec![100.0, 10.0, 1.0],
        };
        assert!(matches!(
            spec.side_mass_class(Side::Plus),
            Err(Error::Indeterminate(_))
        ));
        // Flat edge is conclusive.
        let flat = LevyMeasureSpec::TabulatedTails {
            grid: vec![0.01, 0.1, 1.0],
            tail_plus: vec![10.0, 10.0, 1.0],
            tail_minus: vec![10.0, 10.0, 1.0],
        };
        assert_eq!(flat.side_mass_class(Side::Plus).unwrap(), MassClass::Finite(10.0));
    }

    #[test]
    fn integrated_tail_closed_forms() {
        let spec = power_law(1.5, 0.5, 1.0, 1.0);
        // ∫_x^1 s^{-1.5} ds = 2(x^{-1/2} − 1)
        assert_relative_eq!(
            spec.integrated_tail(Side::Minus, 0.25),
            2.0 * (2.0 - 1.0),
            max_relative = 1e-12
        );
        // ∫_x^1 s^{-1/2} ds = 2(1 − √x)
        assert_relative_eq!(
            spec.integrated_tail(Side::Plus, 0.25),
            1.0,
            max_relative = 1e-12
        );
        // Dirac atom: ∫_x^1 m·1_{s≤a} ds = m(a−x)₊
        let fa = LevyMeasureSpec::FiniteActivity {
            total_mass: 2.0,
            jump_law: JumpLaw::Dirac { at: -0.8 },
        };
        assert_relative_eq!(fa.integrated_tail(Side::Minus, 0.3), 1.0, max_relative = 1e-12);
        assert_eq!(fa.integrated_tail(Side::Plus, 0.3), 0.0);
    }

    #[test]
    fn mean_jump_truncated() {
        // Uniform on [0.5, 1.5], mass m: ∫_{|x|≤1} x Π = m ∫_{0.5}^{1} s ds / 1
        let fa = LevyMeasureSpec::FiniteActivity {
            total_mass: 2.0,
            jump_law: JumpLaw::Uniform { lo: 0.5, hi: 1.5 },
        };
        assert_relative_eq!(fa.mean_jump_le1().unwrap(), 2.0 * 0.375, max_relative = 1e-12);
        // Power law α, β < 1: c₊/(1−β) − c₋/(1−α).
        let p = power_law(0.5, 0.25, 2.0, 3.0);
        assert_relative_eq!(
            p.mean_jump_le1().unwrap(),
            3.0 / 0.75 - 2.0 / 0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn variation_invariant_under_far_finite_component() {
        // Adding finite activity supported outside [−δ, δ] must not change
        // the variation class or drift-free classification outcome.
        let base = LevyTriplet::new(0.3, 0.0, power_law(1.5, 0.5, 1.0, 1.0)).unwrap();
        let bumped = LevyTriplet::new(
            0.3,
            0.0,
            LevyMeasureSpec::Superposition {
                components: vec![
                    power_law(1.5, 0.5, 1.0, 1.0),
                    LevyMeasureSpec::FiniteActivity {
                        total_mass: 5.0,
                        jump_law: JumpLaw::Uniform { lo: -0.9, hi: -0.4 },
                    },
                ],
            },
        )
        .unwrap();
        let a = classify_variation(&base).unwrap();
        let b = classify_variation(&bumped).unwrap();
        assert_eq!(a.kind, b.kind);
        assert_eq!(a.plus_side, b.plus_side);
        assert_eq!(a.minus_side, b.minus_side);
    }

    #[test]
    fn second_moment_log_grid_cauchy() {
        for spec in [
            power_law(1.5, 0.5, 1.0, 1.0),
            power_law(0.5, 1.9, 1.0, 1.0),
            power_law(1.9, 0.1, 0.5, 2.0),
        ] {
            let s40 = second_moment_log_grid(&spec, 40);
            let s80 = second_moment_log_grid(&spec, 80);
            let s160 = second_moment_log_grid(&spec, 160);
            // Refinement differences shrink geometrically.
            let d1 = (s80 - s40).abs();
            let d2 = (s160 - s80).abs();
            assert!(d2 <= d1 + 1e-12, "not Cauchy: {d1} then {d2} for {spec:?}");
            assert!(s160.is_finite());
        }
    }

    #[test]
    fn spectral_wrappers_zero_one_side() {
        let spec = LevyMeasureSpec::SpectrallyPositive {
            inner: Box::new(power_law(1.5, 0.5, 1.0, 1.0)),
        };
        assert_eq!(spec.tail(Side::Minus, 0.25).unwrap(), 0.0);
        assert!(spec.tail(Side::Plus, 0.25).unwrap() > 0.0);
        assert!(spec.side_mass_class(Side::Minus).unwrap().is_zero());
    }

    #[test]
    fn serde_round_trip() {
        let spec = LevyMeasureSpec::Superposition {
            components: vec![
                power_law(1.5, 0.5, 1.0, 1.0),
                LevyMeasureSpec::FiniteActivity {
                    total_mass: 2.0,
                    jump_law: JumpLaw::Dirac { at: 1.0 },
                },
            ],
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"variant\":\"superposition\""));
        let back: LevyMeasureSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tails_are_monotone(
                alpha in 0.0..1.99f64,
                beta in 0.0..1.99f64,
                c_minus in 0.01..10.0f64,
                c_plus in 0.0..10.0f64,
                x in 1e-6..1.0f64,
                factor in 1.0..100.0f64,
            ) {
                let spec = power_law(alpha, beta, c_minus, c_plus);
                let y = (x * factor).min(3.0);
                for side in [Side::Plus, Side::Minus] {
                    let tx = spec.tail(side, x).unwrap();
                    let ty = spec.tail(side, y).unwrap();
                    prop_assert!(tx >= ty);
                }
            }

            #[test]
            fn uniform_law_tail_monotone(
                lo in -2.0..0.0f64,
                span in 0.1..3.0f64,
                x in 1e-4..2.0f64,
                dx in 0.0..1.0f64,
            ) {
                let spec = LevyMeasureSpec::FiniteActivity {
                    total_mass: 1.0,
                    jump_law: JumpLaw::Uniform { lo, hi: lo + span },
                };
                for side in [Side::Plus, Side::Minus] {
                    let a = spec.tail(side, x).unwrap();
                    let b = spec.tail(side, x + dx).unwrap();
                    prop_assert!(a >= b - 1e-12);
                }
            }
        }
    }
}
