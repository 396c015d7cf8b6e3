//! Settlement versus trial under divergent expectations.
//!
//! The plaintiff accepts any settlement at least as large as his expected
//! value of trial; the defendant pays any settlement no larger than her
//! expected cost of trial. Settlement happens whenever that interval is
//! non-empty. Settling itself is free.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// One plaintiff/defendant pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dispute {
    /// Plaintiff's subjective probability of winning.
    pub p_q: f64,
    /// Defendant's subjective probability of losing.
    pub p_g: f64,
    /// Judgment awarded if the plaintiff wins.
    pub j: f64,
    /// Plaintiff's trial cost.
    pub c_q: f64,
    /// Defendant's trial cost.
    pub c_g: f64,
}

impl Dispute {
    pub fn new(p_q: f64, p_g: f64, j: f64, c_q: f64, c_g: f64) -> Result<Self> {
        let d = Dispute {
            p_q,
            p_g,
            j,
            c_q,
            c_g,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_q", self.p_q), ("p_g", self.p_g)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(domain(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(domain(format!("j must be finite and > 0, got {}", self.j)));
        }
        for (name, c) in [("c_q", self.c_q), ("c_g", self.c_g)] {
            if !(c.is_finite() && c >= 0.0) {
                return Err(domain(format!("{name} must be finite and >= 0, got {c}")));
            }
        }
        Ok(())
    }

    fn total_cost(&self) -> f64 {
        self.c_q + self.c_g
    }
}

/// Who bears trial costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeeRule {
    /// Each side pays its own costs.
    American,
    /// The loser pays both sides' costs.
    English,
}

impl FeeRule {
    pub const ALL: [FeeRule; 2] = [FeeRule::American, FeeRule::English];

    pub fn as_str(self) -> &'static str {
        match self {
            FeeRule::American => "american",
            FeeRule::English => "english",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettlementRange {
    /// Plaintiff's minimum acceptable settlement.
    pub lower: f64,
    /// Defendant's maximum acceptable settlement.
    pub upper: f64,
    pub width: f64,
}

impl SettlementRange {
    pub fn is_feasible(&self) -> bool {
        self.width >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Settle { amount: f64 },
    Trial,
}

impl Outcome {
    pub fn is_trial(&self) -> bool {
        matches!(self, Outcome::Trial)
    }
}

/// Plaintiff's expected net value of going to trial.
pub fn plaintiff_trial_value(d: &Dispute, rule: FeeRule) -> f64 {
    match rule {
        FeeRule::American => d.p_q * d.j - d.c_q,
        FeeRule::English => d.p_q * d.j - (1.0 - d.p_q) * d.total_cost(),
    }
}

/// Defendant's expected total outlay if the case is tried.
pub fn defendant_trial_cost(d: &Dispute, rule: FeeRule) -> f64 {
    match rule {
        FeeRule::American => d.p_g * d.j + d.c_g,
        FeeRule::English => d.p_g * (d.j + d.c_g + d.c_q),
    }
}

pub fn settlement_range(d: &Dispute, rule: FeeRule) -> SettlementRange {
    let lower = plaintiff_trial_value(d, rule);
    let upper = defendant_trial_cost(d, rule);
    SettlementRange {
        lower,
        upper,
        width: upper - lower,
    }
}

/// Trial when the range is empty, otherwise settle at its midpoint. A
/// zero-width range settles.
pub fn decide(d: &Dispute, rule: FeeRule) -> Outcome {
    let range = settlement_range(d, rule);
    if range.is_feasible() {
        Outcome::Settle {
            amount: 0.5 * (range.lower + range.upper),
        }
    } else {
        Outcome::Trial
    }
}

/// Lowers both parties' trial costs by `delta_c`.
pub fn apply_cost_reduction(d: &Dispute, delta_c: f64) -> Result<Dispute> {
    d.validate()?;
    if !(delta_c.is_finite() && delta_c >= 0.0) {
        return Err(domain(format!(
            "cost reduction must be >= 0, got {delta_c}"
        )));
    }
    if delta_c > d.c_q.min(d.c_g) {
        return Err(domain(format!(
            "cost reduction {delta_c} exceeds the smaller trial cost {}",
            d.c_q.min(d.c_g)
        )));
    }
    Ok(Dispute {
        c_q: d.c_q - delta_c,
        c_g: d.c_g - delta_c,
        ..*d
    })
}

/// American-rule width shrinkage divided by English-rule width shrinkage for
/// an equal cost reduction: `1 / (p_g + 1 - p_q)`.
pub fn shrink_ratio(d: &Dispute) -> Result<f64> {
    // Written as 1 - (p_q - p_g) so equal beliefs give exactly 1.
    let denom = 1.0 - (d.p_q - d.p_g);
    if denom == 0.0 {
        return Err(domain("shrink ratio undefined when p_q = 1 and p_g = 0"));
    }
    Ok(1.0 / denom)
}

/// How much the range narrows per unit of `delta_c` applied to both parties.
pub fn width_shrink_per_unit_cost(d: &Dispute, rule: FeeRule) -> f64 {
    match rule {
        FeeRule::American => 2.0,
        FeeRule::English => 2.0 * (1.0 - (d.p_q - d.p_g)),
    }
}

/// Derivative of the width with respect to the judgment, `p_g - p_q` under
/// both rules. Larger judgments make trial more likely only when the
/// plaintiff is the more optimistic party.
pub fn width_judgment_sensitivity(d: &Dispute) -> f64 {
    d.p_g - d.p_q
}
