//! The frivolous-suit game.
//!
//! A plaintiff files at a cost. The defendant, who cannot tell a frivolous
//! claim from a meritorious one, settles for an exogenous `s`, defaults and
//! pays the judgment, or hires counsel at cost `d`. Once she defends, the
//! plaintiff either drops the suit or goes to trial. A frivolous plaintiff
//! always loses at trial, a meritorious one always wins.
//!
//! Everything is solved backwards from the payoffs. The defendant's belief
//! that the claim has merit is an explicit parameter.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrivolousConfig {
    /// Frivolous plaintiff's filing cost.
    pub f_o: f64,
    /// Meritorious plaintiff's filing cost.
    pub f_q: f64,
    /// Defendant's cost of defending.
    pub d: f64,
    /// Settlement amount.
    pub s: f64,
    /// Judgment, also paid on default.
    pub j: f64,
    /// Plaintiff's trial cost.
    pub c_p: f64,
    /// Defendant's own trial cost when she loses on the merits.
    #[serde(default)]
    pub defendant_trial_cost: f64,
    /// Defendant's probability that the claim is meritorious.
    #[serde(default)]
    pub belief_merit: f64,
}

impl FrivolousConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("f_o", self.f_o),
            ("f_q", self.f_q),
            ("d", self.d),
            ("s", self.s),
            ("c_p", self.c_p),
            ("defendant_trial_cost", self.defendant_trial_cost),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(domain(format!("j must be finite and > 0, got {}", self.j)));
        }
        check_belief(self.belief_merit)
    }

    fn filing_cost(&self, kind: PlaintiffType) -> f64 {
        match kind {
            PlaintiffType::Frivolous => self.f_o,
            PlaintiffType::Meritorious => self.f_q,
        }
    }
}

fn check_belief(belief: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&belief) {
        return Err(domain(format!(
            "belief_merit must lie in [0, 1], got {belief}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaintiffType {
    Frivolous,
    Meritorious,
}

impl PlaintiffType {
    pub const ALL: [PlaintiffType; 2] = [PlaintiffType::Frivolous, PlaintiffType::Meritorious];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefendantAction {
    Settle,
    Defend,
    Default,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Followup {
    Drop,
    Trial,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameOutcome {
    pub plaintiff_type: PlaintiffType,
    pub filed: bool,
    pub defendant_action: DefendantAction,
    pub plaintiff_followup: Followup,
    pub plaintiff_payoff: f64,
    /// Negative of the defendant's total outlay.
    pub defendant_payoff: f64,
}

/// Plaintiff's move after the defendant hires counsel.
pub fn plaintiff_followup(kind: PlaintiffType, config: &FrivolousConfig) -> Followup {
    match kind {
        // Trial means a certain loss plus the trial cost.
        PlaintiffType::Frivolous => Followup::Drop,
        PlaintiffType::Meritorious => {
            if config.j - config.c_p > 0.0 {
                Followup::Trial
            } else {
                Followup::Drop
            }
        }
    }
}

/// Cheapest response for the defendant given her belief that the claim has
/// merit. Ties go to Settle, then Defend, then Default.
pub fn defendant_best_response(
    belief_merit: f64,
    config: &FrivolousConfig,
) -> Result<DefendantAction> {
    config.validate()?;
    check_belief(belief_merit)?;
    let settle = config.s;
    let default = config.j;
    let defend = config.d + belief_merit * merit_loss(config);
    Ok(if settle <= defend && settle <= default {
        DefendantAction::Settle
    } else if defend <= default {
        DefendantAction::Defend
    } else {
        DefendantAction::Default
    })
}

/// What a defended meritorious claim costs the defendant beyond `d`.
fn merit_loss(config: &FrivolousConfig) -> f64 {
    match plaintiff_followup(PlaintiffType::Meritorious, config) {
        Followup::Trial => config.j + config.defendant_trial_cost,
        _ => 0.0,
    }
}

fn plaintiff_payoff(
    kind: PlaintiffType,
    response: DefendantAction,
    config: &FrivolousConfig,
) -> f64 {
    let fee = config.filing_cost(kind);
    match response {
        DefendantAction::Settle => config.s - fee,
        DefendantAction::Default => config.j - fee,
        DefendantAction::Defend => match (kind, plaintiff_followup(kind, config)) {
            (PlaintiffType::Meritorious, Followup::Trial) => config.j - fee - config.c_p,
            // A frivolous trial is a sure loss; it is never chosen.
            (PlaintiffType::Frivolous, Followup::Trial) => -fee - config.c_p,
            _ => -fee,
        },
        DefendantAction::NotApplicable => 0.0,
    }
}

/// Whether the plaintiff files, anticipating `response`. He files when the
/// continuation pays at least zero and does not end in dropping the suit.
pub fn plaintiff_files(
    kind: PlaintiffType,
    response: DefendantAction,
    config: &FrivolousConfig,
) -> bool {
    if response == DefendantAction::NotApplicable {
        return false;
    }
    if response == DefendantAction::Defend && plaintiff_followup(kind, config) == Followup::Drop {
        return false;
    }
    plaintiff_payoff(kind, response, config) >= 0.0
}

/// Plays the whole game for one plaintiff type at `config.belief_merit`.
pub fn play(kind: PlaintiffType, config: &FrivolousConfig) -> Result<GameOutcome> {
    let response = defendant_best_response(config.belief_merit, config)?;
    if !plaintiff_files(kind, response, config) {
        return Ok(GameOutcome {
            plaintiff_type: kind,
            filed: false,
            defendant_action: DefendantAction::NotApplicable,
            plaintiff_followup: Followup::NotApplicable,
            plaintiff_payoff: 0.0,
            defendant_payoff: 0.0,
        });
    }
    let followup = match response {
        DefendantAction::Defend => plaintiff_followup(kind, config),
        _ => Followup::NotApplicable,
    };
    let defendant_payoff = match (response, kind, followup) {
        (DefendantAction::Settle, ..) => -config.s,
        (DefendantAction::Default, ..) => -config.j,
        (DefendantAction::Defend, PlaintiffType::Meritorious, Followup::Trial) => {
            -config.d - config.j - config.defendant_trial_cost
        }
        (DefendantAction::Defend, ..) => -config.d,
        (DefendantAction::NotApplicable, ..) => 0.0,
    };
    Ok(GameOutcome {
        plaintiff_type: kind,
        filed: true,
        defendant_action: response,
        plaintiff_followup: followup,
        plaintiff_payoff: plaintiff_payoff(kind, response, config),
        defendant_payoff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilingShift {
    MoreFilings,
    FewerFilings,
    Unchanged,
}

/// Direction in which the frivolous filing window `[f_o, d]` moves when
/// filing costs fall by `delta_f` and defence costs by `delta_d`.
pub fn filing_region_shift(
    config: &FrivolousConfig,
    delta_f: f64,
    delta_d: f64,
) -> Result<FilingShift> {
    config.validate()?;
    shocked_config(config, delta_f, delta_d)?;
    let before = config.d - config.f_o;
    let after = (config.d - delta_d) - (config.f_o - delta_f);
    Ok(if after > before {
        FilingShift::MoreFilings
    } else if after < before {
        FilingShift::FewerFilings
    } else {
        FilingShift::Unchanged
    })
}

/// The config after filing costs (both plaintiff types) fall by `delta_f`
/// and the defence cost by `delta_d`.
pub fn shocked_config(
    config: &FrivolousConfig,
    delta_f: f64,
    delta_d: f64,
) -> Result<FrivolousConfig> {
    for (name, v) in [("delta_f", delta_f), ("delta_d", delta_d)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(domain(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    let shocked = FrivolousConfig {
        f_o: config.f_o - delta_f,
        f_q: (config.f_q - delta_f).max(0.0),
        d: config.d - delta_d,
        ..*config
    };
    if shocked.f_o < 0.0 || shocked.d < 0.0 {
        return Err(domain(format!(
            "cost reductions leave negative costs (f_o = {}, d = {})",
            shocked.f_o, shocked.d
        )));
    }
    Ok(shocked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(f_o: f64, s: f64, d: f64, j: f64, c_p: f64) -> FrivolousConfig {
        FrivolousConfig {
            f_o,
            f_q: f_o,
            d,
            s,
            j,
            c_p,
            defendant_trial_cost: 0.0,
            belief_merit: 0.0,
        }
    }

    #[test]
    fn followups() {
        let c = cfg(1.0, 5.0, 10.0, 100.0, 10.0);
        assert_eq!(
            plaintiff_followup(PlaintiffType::Frivolous, &c),
            Followup::Drop
        );
        assert_eq!(
            plaintiff_followup(PlaintiffType::Meritorious, &c),
            Followup::Trial
        );
        let small = cfg(1.0, 5.0, 10.0, 5.0, 10.0);
        assert_eq!(
            plaintiff_followup(PlaintiffType::Meritorious, &small),
            Followup::Drop
        );
    }

    #[test]
    fn best_responses() {
        let br = |s, d, j| defendant_best_response(0.0, &cfg(1.0, s, d, j, 10.0)).unwrap();
        assert_eq!(br(5.0, 10.0, 100.0), DefendantAction::Settle);
        assert_eq!(br(20.0, 10.0, 100.0), DefendantAction::Defend);
        assert_eq!(br(200.0, 150.0, 100.0), DefendantAction::Default);
        // S = d settles.
        assert_eq!(br(10.0, 10.0, 100.0), DefendantAction::Settle);
        // A defendant sure of merit pays d + J to defend, so settles at 20.
        let c = cfg(1.0, 20.0, 10.0, 100.0, 10.0);
        assert_eq!(
            defendant_best_response(1.0, &c).unwrap(),
            DefendantAction::Settle
        );
        assert!(defendant_best_response(1.5, &c).is_err());
    }

    #[test]
    fn filing_decisions() {
        let c = cfg(1.0, 5.0, 10.0, 100.0, 10.0);
        assert!(plaintiff_files(
            PlaintiffType::Frivolous,
            DefendantAction::Settle,
            &c
        ));
        for f_o in [0.0, 1.0, 50.0] {
            let c = cfg(f_o, 5.0, 10.0, 100.0, 10.0);
            assert!(!plaintiff_files(
                PlaintiffType::Frivolous,
                DefendantAction::Defend,
                &c
            ));
        }
        let free = cfg(0.0, 0.0, 10.0, 100.0, 10.0);
        assert!(plaintiff_files(
            PlaintiffType::Frivolous,
            DefendantAction::Settle,
            &free
        ));
        let dear = cfg(6.0, 5.0, 10.0, 100.0, 10.0);
        assert!(!plaintiff_files(
            PlaintiffType::Frivolous,
            DefendantAction::Settle,
            &dear
        ));
    }

    #[test]
    fn played_games() {
        let settled = play(PlaintiffType::Frivolous, &cfg(1.0, 5.0, 10.0, 100.0, 10.0)).unwrap();
        assert!(settled.filed);
        assert_eq!(settled.defendant_action, DefendantAction::Settle);
        assert_eq!(settled.plaintiff_followup, Followup::NotApplicable);
        assert_eq!(settled.plaintiff_payoff, 4.0);
        assert_eq!(settled.defendant_payoff, -5.0);

        let deterred = play(PlaintiffType::Frivolous, &cfg(1.0, 20.0, 10.0, 100.0, 10.0)).unwrap();
        assert!(!deterred.filed);
        assert_eq!(deterred.defendant_action, DefendantAction::NotApplicable);
        assert_eq!(deterred.plaintiff_followup, Followup::NotApplicable);
        assert_eq!(
            (deterred.plaintiff_payoff, deterred.defendant_payoff),
            (0.0, 0.0)
        );

        let tried = play(
            PlaintiffType::Meritorious,
            &cfg(1.0, 20.0, 10.0, 100.0, 10.0),
        )
        .unwrap();
        assert!(tried.filed);
        assert_eq!(tried.defendant_action, DefendantAction::Defend);
        assert_eq!(tried.plaintiff_followup, Followup::Trial);
        assert_eq!(tried.plaintiff_payoff, 89.0);
        assert_eq!(tried.defendant_payoff, -110.0);

        let defaulted = play(
            PlaintiffType::Frivolous,
            &cfg(1.0, 200.0, 150.0, 100.0, 10.0),
        )
        .unwrap();
        assert_eq!(defaulted.defendant_action, DefendantAction::Default);
        assert_eq!(defaulted.plaintiff_payoff, 99.0);
        assert_eq!(defaulted.defendant_payoff, -100.0);
    }

    #[test]
    fn filing_shifts() {
        let c = cfg(2.0, 5.0, 10.0, 100.0, 10.0);
        assert_eq!(
            filing_region_shift(&c, 1.0, 0.0).unwrap(),
            FilingShift::MoreFilings
        );
        assert_eq!(
            filing_region_shift(&c, 0.0, 1.0).unwrap(),
            FilingShift::FewerFilings
        );
        assert_eq!(
            filing_region_shift(&c, 1.5, 1.5).unwrap(),
            FilingShift::Unchanged
        );
        assert!(filing_region_shift(&c, 3.0, 0.0).is_err());
        assert!(filing_region_shift(&c, 0.0, 11.0).is_err());
    }

    #[test]
    fn invalid_configs() {
        let mut c = cfg(1.0, 5.0, 10.0, 100.0, 10.0);
        c.j = 0.0;
        assert!(play(PlaintiffType::Frivolous, &c).is_err());
        let mut c = cfg(1.0, 5.0, 10.0, 100.0, 10.0);
        c.d = -1.0;
        assert!(play(PlaintiffType::Frivolous, &c).is_err());
    }
}
