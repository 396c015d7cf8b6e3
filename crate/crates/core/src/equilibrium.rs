//! Equilibrium contract completeness.
//!
//! A contract fills a fraction `g` of its possible gaps. Filling one more
//! percent saves ex post dispute costs at the rate
//! `MB(g) = b_scale * (1 - g)^beta` and costs `MC(g) = k_scale * g^kappa / (1 - g)`.
//! The benefit curve falls to zero at full completeness while the cost curve
//! diverges there, so the crossing `g*` is always interior: equilibrium
//! contracts are incomplete.
//!
//! A cost shock reduces `k_scale` (drafting gets cheaper) and `b_scale`
//! (ex post resolution gets cheaper, so avoiding it is worth less). The two
//! push `g*` in opposite directions.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Iteration cap for the bisection solver.
pub const MAX_ITERATIONS: u32 = 200;

/// Default residual tolerance for [`solve_completeness`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Marginal benefit and marginal cost of gap-filling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapCurve {
    pub b_scale: f64,
    pub beta: f64,
    pub k_scale: f64,
    pub kappa: f64,
}

impl GapCurve {
    pub fn new(b_scale: f64, beta: f64, k_scale: f64, kappa: f64) -> Result<Self> {
        let curve = GapCurve {
            b_scale,
            beta,
            k_scale,
            kappa,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("b_scale", self.b_scale),
            ("beta", self.beta),
            ("k_scale", self.k_scale),
            ("kappa", self.kappa),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(domain(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for GapCurve {
    fn default() -> Self {
        GapCurve {
            b_scale: 1.0,
            beta: 1.0,
            k_scale: 1.0,
            kappa: 1.0,
        }
    }
}

/// Fractional reductions applied by a labor-augmenting cost shock.
///
/// `delta_contracting` scales down the marginal cost of drafting,
/// `delta_litigation` scales down the ex post savings from a complete contract.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AiShock {
    #[serde(default)]
    pub delta_contracting: f64,
    #[serde(default)]
    pub delta_litigation: f64,
}

impl AiShock {
    pub const NONE: AiShock = AiShock {
        delta_contracting: 0.0,
        delta_litigation: 0.0,
    };

    pub fn new(delta_contracting: f64, delta_litigation: f64) -> Result<Self> {
        let shock = AiShock {
            delta_contracting,
            delta_litigation,
        };
        shock.validate()?;
        Ok(shock)
    }

    /// Both effects at the same size.
    pub fn balanced(delta: f64) -> Result<Self> {
        Self::new(delta, delta)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("delta_contracting", self.delta_contracting),
            ("delta_litigation", self.delta_litigation),
        ] {
            if !(0.0..1.0).contains(&value) {
                return Err(domain(format!("{name} must lie in [0, 1), got {value}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessSolution {
    /// Equilibrium fraction of gaps filled.
    pub g_star: f64,
    /// Common value of MB and MC at `g_star`.
    pub level: f64,
    pub residual: f64,
    pub iterations: u32,
}

pub fn marginal_benefit(g: f64, curve: &GapCurve) -> Result<f64> {
    curve.validate()?;
    if !(0.0..=1.0).contains(&g) {
        return Err(domain(format!("completeness must lie in [0, 1], got {g}")));
    }
    Ok(mb(g, curve))
}

pub fn marginal_cost(g: f64, curve: &GapCurve) -> Result<f64> {
    curve.validate()?;
    if !(0.0..1.0).contains(&g) {
        return Err(domain(format!(
            "completeness must lie in [0, 1) for marginal cost, got {g}"
        )));
    }
    Ok(mc(g, curve))
}

#[inline]
fn mb(g: f64, curve: &GapCurve) -> f64 {
    curve.b_scale * (1.0 - g).powf(curve.beta)
}

#[inline]
fn mc(g: f64, curve: &GapCurve) -> f64 {
    curve.k_scale * g.powf(curve.kappa) / (1.0 - g)
}

/// MB - MC, with the divergent cost at `g = 1` mapped to `-inf`.
#[inline]
fn excess_benefit(g: f64, curve: &GapCurve) -> f64 {
    if g >= 1.0 {
        f64::NEG_INFINITY
    } else {
        mb(g, curve) - mc(g, curve)
    }
}

/// Finds the completeness level where marginal benefit meets marginal cost.
pub fn solve_completeness(curve: &GapCurve, tolerance: f64) -> Result<CompletenessSolution> {
    solve_completeness_within(curve, tolerance, 0.0, 1.0)
}

/// [`solve_completeness`] restricted to the bracket `[lo, hi]`, which must
/// lie inside `[0, 1]` and contain the crossing.
pub fn solve_completeness_within(
    curve: &GapCurve,
    tolerance: f64,
    lo: f64,
    hi: f64,
) -> Result<CompletenessSolution> {
    curve.validate()?;
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(domain(format!("tolerance must be > 0, got {tolerance}")));
    }
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(domain(format!(
            "bracket [{lo}, {hi}] must satisfy 0 <= lo < hi <= 1"
        )));
    }
    if excess_benefit(lo, curve) < 0.0 || excess_benefit(hi, curve) > 0.0 {
        return Err(domain(format!(
            "bracket [{lo}, {hi}] does not contain the crossing"
        )));
    }

    let (mut lo, mut hi) = (lo, hi);
    let mut g = 0.5 * (lo + hi);
    let mut excess = excess_benefit(g, curve);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        g = 0.5 * (lo + hi);
        excess = excess_benefit(g, curve);
        if excess == 0.0 || (excess.abs() <= tolerance && hi - lo <= tolerance) {
            break;
        }
        if excess > 0.0 {
            lo = g;
        } else {
            hi = g;
        }
        // Bracket collapsed to adjacent floats.
        if 0.5 * (lo + hi) == lo || 0.5 * (lo + hi) == hi {
            break;
        }
    }

    let residual = excess.abs();
    if residual.is_nan() || residual > tolerance || g <= 0.0 || g >= 1.0 {
        return Err(Error::NoConvergence {
            iterations,
            residual,
            tolerance,
        });
    }
    Ok(CompletenessSolution {
        g_star: g,
        level: mb(g, curve),
        residual,
        iterations,
    })
}

/// Returns the curve after the shock; the input is left untouched.
pub fn apply_shock(curve: &GapCurve, shock: &AiShock) -> Result<GapCurve> {
    curve.validate()?;
    shock.validate()?;
    Ok(GapCurve {
        b_scale: curve.b_scale * (1.0 - shock.delta_litigation),
        k_scale: curve.k_scale * (1.0 - shock.delta_contracting),
        ..*curve
    })
}

/// `g*` after the shock minus `g*` before it. Positive means the contracting
/// effect dominates.
pub fn completeness_response(curve: &GapCurve, shock: &AiShock, tolerance: f64) -> Result<f64> {
    let baseline = solve_completeness(curve, tolerance)?;
    let shocked = solve_completeness(&apply_shock(curve, shock)?, tolerance)?;
    Ok(shocked.g_star - baseline.g_star)
}
