//! Selection of legal rules through litigation.
//!
//! Each rule in an area of law is either efficient or inefficient. Every
//! period a rule may generate a dispute; the parties draw divergent beliefs
//! about the outcome and either settle or go to trial under the settlement
//! model, and a trial overturns the rule with probability `q`. Inefficient
//! rules raise the stakes of their disputes, reach trial more often and are
//! therefore overturned more often, so the population drifts toward
//! efficiency.
//!
//! Per rule this is a two-state Markov chain with flip probabilities
//! `p_ie` (inefficient to efficient) and `p_ei` (the converse). Its mean path
//! and stationary point serve as the oracle for the agent simulation.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{self, AiShock, GapCurve};
use crate::error::{domain, Error, Result};
use crate::frivolous::{self, Followup, FrivolousConfig, PlaintiffType};
use crate::rng;
use crate::settlement::{self, Dispute, FeeRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaKind {
    Tort,
    Contract,
    Property,
}

/// Overturn probabilities that differ by direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionalOverturn {
    /// Probability a trial turns an inefficient rule efficient.
    pub ie: f64,
    /// Probability a trial turns an efficient rule inefficient.
    pub ei: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegalArea {
    pub name: String,
    pub kind: AreaKind,
    /// Gap-filling curve of the contracts governing the area. Torts have none.
    #[serde(default)]
    pub gap_curve: Option<GapCurve>,
    /// Per-rule probability of a dispute each period, before contracts gate it.
    pub dispute_rate: f64,
    /// Judgment at stake under an efficient rule.
    pub stakes_j: f64,
    /// Inefficient rules put `stakes_j * stakes_multiplier` at stake.
    pub stakes_multiplier: f64,
    pub cost_q: f64,
    pub cost_g: f64,
    /// Centre of both parties' beliefs.
    #[serde(default = "default_belief_mean")]
    pub belief_mean: f64,
    /// Half-width of the uniform divergence between the parties' beliefs.
    pub belief_spread: f64,
    pub overturn_prob: f64,
    #[serde(default)]
    pub directional_overturn: Option<DirectionalOverturn>,
    pub fee_rule: FeeRule,
}

fn default_belief_mean() -> f64 {
    0.5
}

impl LegalArea {
    pub fn validate(&self) -> Result<()> {
        match (self.kind, &self.gap_curve) {
            (AreaKind::Tort, Some(_)) => {
                return Err(domain("tort areas have no gap curve"));
            }
            (AreaKind::Contract | AreaKind::Property, None) => {
                return Err(domain("contract and property areas need a gap curve"));
            }
            (_, Some(curve)) => curve.validate()?,
            _ => {}
        }
        unit_interval("dispute_rate", self.dispute_rate)?;
        if !(self.stakes_j.is_finite() && self.stakes_j > 0.0) {
            return Err(domain(format!(
                "stakes_j must be > 0, got {}",
                self.stakes_j
            )));
        }
        if !(self.stakes_multiplier.is_finite() && self.stakes_multiplier >= 1.0) {
            return Err(domain(format!(
                "stakes_multiplier must be >= 1, got {}",
                self.stakes_multiplier
            )));
        }
        for (name, c) in [("cost_q", self.cost_q), ("cost_g", self.cost_g)] {
            if !(c.is_finite() && c >= 0.0) {
                return Err(domain(format!("{name} must be >= 0, got {c}")));
            }
        }
        unit_interval("belief_mean", self.belief_mean)?;
        if !(self.belief_spread.is_finite() && self.belief_spread >= 0.0) {
            return Err(domain(format!(
                "belief_spread must be >= 0, got {}",
                self.belief_spread
            )));
        }
        unit_interval("overturn_prob", self.overturn_prob)?;
        if let Some(dir) = self.directional_overturn {
            unit_interval("directional_overturn.ie", dir.ie)?;
            unit_interval("directional_overturn.ei", dir.ei)?;
        }
        Ok(())
    }

    fn overturn(&self) -> DirectionalOverturn {
        self.directional_overturn.unwrap_or(DirectionalOverturn {
            ie: self.overturn_prob,
            ei: self.overturn_prob,
        })
    }

    /// Accident law with high-stakes inefficient rules.
    pub fn tort_preset() -> Self {
        LegalArea {
            name: "tort".into(),
            kind: AreaKind::Tort,
            gap_curve: None,
            dispute_rate: 0.2,
            stakes_j: 100.0,
            stakes_multiplier: 3.0,
            cost_q: 10.0,
            cost_g: 10.0,
            belief_mean: 0.5,
            belief_spread: 0.3,
            overturn_prob: 0.5,
            directional_overturn: None,
            fee_rule: FeeRule::American,
        }
    }

    pub fn contract_preset() -> Self {
        LegalArea {
            name: "contract".into(),
            kind: AreaKind::Contract,
            gap_curve: Some(GapCurve::default()),
            ..Self::tort_preset()
        }
    }

    pub fn property_preset() -> Self {
        LegalArea {
            name: "property".into(),
            kind: AreaKind::Property,
            gap_curve: Some(GapCurve {
                b_scale: 1.0,
                beta: 2.0,
                k_scale: 0.5,
                kappa: 1.0,
            }),
            ..Self::tort_preset()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "tort" => Some(Self::tort_preset()),
            "contract" => Some(Self::contract_preset()),
            "property" => Some(Self::property_preset()),
            _ => None,
        }
    }
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(domain(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

/// Number of rules and how many of them are currently efficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RulePopulation {
    pub n_rules: u64,
    pub efficient: u64,
}

impl RulePopulation {
    pub fn new(n_rules: u64, efficient: u64) -> Result<Self> {
        if n_rules == 0 {
            return Err(domain("population needs at least one rule"));
        }
        if efficient > n_rules {
            return Err(domain(format!(
                "{efficient} efficient rules exceeds population of {n_rules}"
            )));
        }
        Ok(RulePopulation { n_rules, efficient })
    }

    /// Rounds `fraction * n_rules` to the nearest whole rule.
    pub fn from_fraction(n_rules: u64, fraction: f64) -> Result<Self> {
        unit_interval("fraction_efficient", fraction)?;
        Self::new(n_rules, (fraction * n_rules as f64).round() as u64)
    }

    pub fn fraction_efficient(&self) -> f64 {
        self.efficient as f64 / self.n_rules as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipRates {
    /// Per-period probability an inefficient rule becomes efficient.
    pub p_ie: f64,
    /// Per-period probability an efficient rule becomes inefficient.
    pub p_ei: f64,
}

impl FlipRates {
    pub fn new(p_ie: f64, p_ei: f64) -> Result<Self> {
        unit_interval("p_ie", p_ie)?;
        unit_interval("p_ei", p_ei)?;
        Ok(FlipRates { p_ie, p_ei })
    }
}

/// Estimated probability that a dispute goes to trial at each stakes level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialProbabilities {
    pub inefficient: f64,
    pub efficient: f64,
}

/// Dispute rate after contracts filter out the disputes they pre-empt.
pub fn effective_dispute_rate(area: &LegalArea, shock: &AiShock, tolerance: f64) -> Result<f64> {
    area.validate()?;
    shock.validate()?;
    match &area.gap_curve {
        None => Ok(area.dispute_rate),
        Some(curve) => {
            let shocked = equilibrium::apply_shock(curve, shock)?;
            let g = equilibrium::solve_completeness(&shocked, tolerance)?.g_star;
            Ok(area.dispute_rate * (1.0 - g))
        }
    }
}

/// Beliefs `(p_q, p_g)` for a divergence `eps`.
fn beliefs(area: &LegalArea, eps: f64) -> (f64, f64) {
    (
        (area.belief_mean + eps).clamp(0.0, 1.0),
        (area.belief_mean - eps).clamp(0.0, 1.0),
    )
}

fn divergence(area: &LegalArea, u: f64) -> f64 {
    area.belief_spread * (2.0 * u - 1.0)
}

fn reduced_costs(area: &LegalArea, cost_delta: f64) -> Result<(f64, f64)> {
    if !(cost_delta.is_finite() && cost_delta >= 0.0) {
        return Err(domain(format!("cost_delta must be >= 0, got {cost_delta}")));
    }
    if cost_delta > area.cost_q.min(area.cost_g) {
        return Err(domain(format!(
            "cost_delta {cost_delta} exceeds the smaller trial cost {}",
            area.cost_q.min(area.cost_g)
        )));
    }
    Ok((area.cost_q - cost_delta, area.cost_g - cost_delta))
}

fn goes_to_trial(area: &LegalArea, eps: f64, stakes: f64, costs: (f64, f64)) -> bool {
    let (p_q, p_g) = beliefs(area, eps);
    let dispute = Dispute {
        p_q,
        p_g,
        j: stakes,
        c_q: costs.0,
        c_g: costs.1,
    };
    settlement::decide(&dispute, area.fee_rule).is_trial()
}

/// Monte Carlo estimate of the trial probability at both stakes levels, with
/// trial costs lowered by `cost_delta`. Both levels see the same belief
/// draws, and the draws depend only on `seed`.
pub fn trial_probabilities(
    area: &LegalArea,
    cost_delta: f64,
    n_samples: u64,
    seed: u64,
) -> Result<TrialProbabilities> {
    area.validate()?;
    if n_samples == 0 {
        return Err(domain("n_samples must be >= 1"));
    }
    let costs = reduced_costs(area, cost_delta)?;
    let high = area.stakes_j * area.stakes_multiplier;
    let mut rng = rng::stream(seed, rng::ESTIMATION_STREAM);
    let (mut inefficient, mut efficient) = (0u64, 0u64);
    for _ in 0..n_samples {
        let eps = divergence(area, rng::unit(&mut rng));
        inefficient += goes_to_trial(area, eps, high, costs) as u64;
        efficient += goes_to_trial(area, eps, area.stakes_j, costs) as u64;
    }
    Ok(TrialProbabilities {
        inefficient: inefficient as f64 / n_samples as f64,
        efficient: efficient as f64 / n_samples as f64,
    })
}

pub fn flip_rates(
    area: &LegalArea,
    shock: &AiShock,
    cost_delta: f64,
    n_samples: u64,
    seed: u64,
) -> Result<FlipRates> {
    let rate = effective_dispute_rate(area, shock, equilibrium::DEFAULT_TOLERANCE)?;
    let trial = trial_probabilities(area, cost_delta, n_samples, seed)?;
    let q = area.overturn();
    FlipRates::new(
        rate * trial.inefficient * q.ie,
        rate * trial.efficient * q.ei,
    )
}

/// Long-run fraction of efficient rules, `p_ie / (p_ie + p_ei)`.
pub fn stationary_fraction(rates: &FlipRates) -> Result<f64> {
    let total = rates.p_ie + rates.p_ei;
    if total <= 0.0 {
        return Err(Error::DegenerateChain);
    }
    Ok(rates.p_ie / total)
}

/// Mean fraction efficient over time, starting from `x0`. The result has
/// `periods + 1` entries, the first being `x0`.
pub fn expected_path(x0: f64, rates: &FlipRates, periods: u64) -> Result<Vec<f64>> {
    unit_interval("x0", x0)?;
    let mut path = Vec::with_capacity(periods as usize + 1);
    let mut x = x0;
    path.push(x);
    for _ in 0..periods {
        x = x * (1.0 - rates.p_ei) + (1.0 - x) * rates.p_ie;
        path.push(x);
    }
    Ok(path)
}

/// Periods until the mean path has closed `closed_fraction` of its initial
/// distance to the stationary point. `None` when the chain never moves.
pub fn gap_closure_time(x0: f64, rates: &FlipRates, closed_fraction: f64) -> Result<Option<u64>> {
    unit_interval("x0", x0)?;
    if !(closed_fraction > 0.0 && closed_fraction < 1.0) {
        return Err(domain(format!(
            "closed_fraction must lie in (0, 1), got {closed_fraction}"
        )));
    }
    let target = match stationary_fraction(rates) {
        Ok(x) => x,
        Err(Error::DegenerateChain) => return Ok(None),
        Err(e) => return Err(e),
    };
    if x0 == target {
        return Ok(Some(0));
    }
    // The gap contracts by |1 - p_ie - p_ei| per period.
    let contraction = (1.0 - rates.p_ie - rates.p_ei).abs();
    if contraction == 0.0 {
        return Ok(Some(1));
    }
    let periods = ((1.0 - closed_fraction).ln() / contraction.ln()).ceil();
    Ok(Some(periods.max(1.0) as u64))
}

/// A stream of frivolous suits layered on top of the genuine disputes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrivolousStream {
    /// Per-rule probability of a frivolous claim each period.
    pub rate: f64,
    pub game: FrivolousConfig,
}

impl FrivolousStream {
    pub fn validate(&self) -> Result<()> {
        unit_interval("frivolous.rate", self.rate)?;
        self.game.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub periods: u64,
    pub shock: AiShock,
    pub cost_delta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodRecord {
    pub t: u64,
    pub efficient: u64,
    pub disputes: u64,
    pub settlements: u64,
    pub trials: u64,
    /// Trials that flipped the rule.
    pub overturns: u64,
    pub frivolous_filings: u64,
    pub frivolous_trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub seed: u64,
    pub area: String,
    pub shock: AiShock,
    pub cost_delta: f64,
    pub n_rules: u64,
    /// One record per period; `records[0]` is the initial state.
    pub records: Vec<PeriodRecord>,
}

impl EvolutionTrace {
    pub fn fraction_efficient(&self, t: usize) -> f64 {
        self.records[t].efficient as f64 / self.n_rules as f64
    }

    pub fn fractions(&self) -> Vec<f64> {
        (0..self.records.len())
            .map(|t| self.fraction_efficient(t))
            .collect()
    }
}

/// Agent simulation of an area's rule population.
pub fn simulate(
    area: &LegalArea,
    population: &RulePopulation,
    params: &RunParams,
) -> Result<EvolutionTrace> {
    run(area, population, params, None)
}

/// [`simulate`] with frivolous claims arriving alongside the genuine
/// disputes. Frivolous arrivals use their own random streams, so the genuine
/// dispute draws are the same as without them.
pub fn simulate_with_frivolous(
    area: &LegalArea,
    population: &RulePopulation,
    params: &RunParams,
    frivolous: &FrivolousStream,
) -> Result<EvolutionTrace> {
    frivolous.validate()?;
    run(area, population, params, Some(frivolous))
}

fn rule_streams(seed: u64, base: u64, n: u64) -> Vec<ChaCha8Rng> {
    (0..n).map(|i| rng::stream(seed, base | i)).collect()
}

/// Rules `0..efficient` start efficient.
fn initial_states(population: &RulePopulation) -> Vec<bool> {
    (0..population.n_rules)
        .map(|i| i < population.efficient)
        .collect()
}

fn run(
    area: &LegalArea,
    population: &RulePopulation,
    params: &RunParams,
    frivolous: Option<&FrivolousStream>,
) -> Result<EvolutionTrace> {
    area.validate()?;
    let population = RulePopulation::new(population.n_rules, population.efficient)?;
    let rate = effective_dispute_rate(area, &params.shock, equilibrium::DEFAULT_TOLERANCE)?;
    let costs = reduced_costs(area, params.cost_delta)?;
    let q = area.overturn();
    let high = area.stakes_j * area.stakes_multiplier;

    // A frivolous claim's fate does not depend on the rule, only on the game.
    let frivolous_path = frivolous
        .map(|f| frivolous::play(PlaintiffType::Frivolous, &f.game).map(|o| (f.rate, o)))
        .transpose()?;

    let mut states = initial_states(&population);
    let mut streams = rule_streams(params.seed, rng::RULE_STREAMS, population.n_rules);
    let mut frivolous_streams = match frivolous_path {
        Some(_) => rule_streams(params.seed, rng::FRIVOLOUS_STREAMS, population.n_rules),
        None => Vec::new(),
    };

    let mut efficient = population.efficient;
    let mut records = Vec::with_capacity(params.periods as usize + 1);
    records.push(PeriodRecord {
        t: 0,
        efficient,
        disputes: 0,
        settlements: 0,
        trials: 0,
        overturns: 0,
        frivolous_filings: 0,
        frivolous_trials: 0,
    });

    for t in 1..=params.periods {
        let mut rec = PeriodRecord {
            t,
            efficient: 0,
            disputes: 0,
            settlements: 0,
            trials: 0,
            overturns: 0,
            frivolous_filings: 0,
            frivolous_trials: 0,
        };
        for (i, state) in states.iter_mut().enumerate() {
            // Three draws per rule per period, used or not, to keep the
            // stream aligned with the period.
            let stream = &mut streams[i];
            let u_dispute = rng::unit(stream);
            let u_belief = rng::unit(stream);
            let u_overturn = rng::unit(stream);

            if let Some((f_rate, outcome)) = frivolous_path {
                if rng::unit(&mut frivolous_streams[i]) < f_rate && outcome.filed {
                    rec.frivolous_filings += 1;
                    if outcome.plaintiff_followup == Followup::Trial {
                        rec.frivolous_trials += 1;
                    }
                }
            }

            if u_dispute >= rate {
                continue;
            }
            rec.disputes += 1;
            let stakes = if *state { area.stakes_j } else { high };
            if !goes_to_trial(area, divergence(area, u_belief), stakes, costs) {
                rec.settlements += 1;
                continue;
            }
            rec.trials += 1;
            let q_flip = if *state { q.ei } else { q.ie };
            if u_overturn < q_flip {
                rec.overturns += 1;
                if *state {
                    efficient -= 1;
                } else {
                    efficient += 1;
                }
                *state = !*state;
            }
        }
        rec.efficient = efficient;
        records.push(rec);
    }

    Ok(EvolutionTrace {
        seed: params.seed,
        area: area.name.clone(),
        shock: params.shock,
        cost_delta: params.cost_delta,
        n_rules: population.n_rules,
        records,
    })
}

/// Simulates the bare two-state chain at fixed flip rates. Every flip is
/// recorded as a dispute that went to trial and overturned the rule.
pub fn simulate_chain(
    rates: &FlipRates,
    population: &RulePopulation,
    periods: u64,
    seed: u64,
) -> Result<EvolutionTrace> {
    let rates = FlipRates::new(rates.p_ie, rates.p_ei)?;
    let population = RulePopulation::new(population.n_rules, population.efficient)?;
    let mut states = initial_states(&population);
    let mut streams = rule_streams(seed, rng::RULE_STREAMS, population.n_rules);
    let mut efficient = population.efficient;
    let mut records = Vec::with_capacity(periods as usize + 1);
    records.push(PeriodRecord {
        t: 0,
        efficient,
        disputes: 0,
        settlements: 0,
        trials: 0,
        overturns: 0,
        frivolous_filings: 0,
        frivolous_trials: 0,
    });
    for t in 1..=periods {
        let mut flips = 0;
        for (state, stream) in states.iter_mut().zip(streams.iter_mut()) {
            let p = if *state { rates.p_ei } else { rates.p_ie };
            if rng::unit(stream) < p {
                flips += 1;
                if *state {
                    efficient -= 1;
                } else {
                    efficient += 1;
                }
                *state = !*state;
            }
        }
        records.push(PeriodRecord {
            t,
            efficient,
            disputes: flips,
            settlements: 0,
            trials: flips,
            overturns: flips,
            frivolous_filings: 0,
            frivolous_trials: 0,
        });
    }
    Ok(EvolutionTrace {
        seed,
        area: "chain".into(),
        shock: AiShock::NONE,
        cost_delta: 0.0,
        n_rules: population.n_rules,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tort() -> LegalArea {
        LegalArea::tort_preset()
    }

    fn params(periods: u64, seed: u64) -> RunParams {
        RunParams {
            periods,
            shock: AiShock::NONE,
            cost_delta: 0.0,
            seed,
        }
    }

    /// Trial probability by midpoint quadrature over the belief divergence.
    fn quadrature_trial_probability(area: &LegalArea, stakes: f64, costs: (f64, f64)) -> f64 {
        let n = 200_000;
        let hits = (0..n)
            .filter(|&i| {
                let u = (i as f64 + 0.5) / n as f64;
                goes_to_trial(area, divergence(area, u), stakes, costs)
            })
            .count();
        hits as f64 / n as f64
    }

    #[test]
    fn dispute_rates() {
        let shock = AiShock::new(0.3, 0.1).unwrap();
        assert_eq!(effective_dispute_rate(&tort(), &shock, 1e-9).unwrap(), 0.2);

        let contract = LegalArea::contract_preset();
        let base = effective_dispute_rate(&contract, &AiShock::NONE, 1e-9).unwrap();
        assert!((base - 0.2 * (1.0 - 0.381_966_011_250_105)).abs() < 1e-9);
        assert!((base - 0.1236).abs() < 1e-4);
        let drafted =
            effective_dispute_rate(&contract, &AiShock::new(0.4, 0.0).unwrap(), 1e-9).unwrap();
        assert!(drafted < base);
    }

    #[test]
    fn area_validation() {
        let mut a = tort();
        a.gap_curve = Some(GapCurve::default());
        assert!(a.validate().is_err());
        let mut c = LegalArea::contract_preset();
        c.gap_curve = None;
        assert!(c.validate().is_err());
        let mut m = tort();
        m.stakes_multiplier = 0.9;
        assert!(m.validate().is_err());
        let mut q = tort();
        q.overturn_prob = 1.2;
        assert!(q.validate().is_err());
        let mut r = tort();
        r.dispute_rate = 1.5;
        assert!(r.validate().is_err());
        assert!(LegalArea::property_preset().validate().is_ok());
        assert!(LegalArea::preset("admiralty").is_none());
    }

    #[test]
    fn symmetric_stakes_give_symmetric_rates() {
        let mut a = tort();
        a.stakes_multiplier = 1.0;
        let r = flip_rates(&a, &AiShock::NONE, 0.0, 50_000, 3).unwrap();
        assert_eq!(r.p_ie, r.p_ei);
        assert!(r.p_ie > 0.0);
    }

    #[test]
    fn agreeing_parties_never_litigate() {
        let mut a = tort();
        a.belief_spread = 0.0;
        let r = flip_rates(&a, &AiShock::NONE, 0.0, 10_000, 3).unwrap();
        assert_eq!((r.p_ie, r.p_ei), (0.0, 0.0));
        assert_eq!(stationary_fraction(&r), Err(Error::DegenerateChain));
    }

    #[test]
    fn higher_stakes_litigate_more() {
        let a = tort();
        let est = trial_probabilities(&a, 0.0, 200_000, 11).unwrap();
        let costs = (a.cost_q, a.cost_g);
        let hi = quadrature_trial_probability(&a, a.stakes_j * a.stakes_multiplier, costs);
        let lo = quadrature_trial_probability(&a, a.stakes_j, costs);
        assert!(hi > lo);
        assert!(
            (est.inefficient - hi).abs() < 5e-3,
            "{} vs {hi}",
            est.inefficient
        );
        assert!(
            (est.efficient - lo).abs() < 5e-3,
            "{} vs {lo}",
            est.efficient
        );
        let r = flip_rates(&a, &AiShock::NONE, 0.0, 200_000, 11).unwrap();
        assert!(r.p_ie > r.p_ei);
        assert!(stationary_fraction(&r).unwrap() > 0.5);
    }

    #[test]
    fn flip_rates_are_seed_deterministic() {
        let a = tort();
        let x = flip_rates(&a, &AiShock::NONE, 2.0, 10_000, 99).unwrap();
        let y = flip_rates(&a, &AiShock::NONE, 2.0, 10_000, 99).unwrap();
        assert_eq!(x, y);
        assert!(flip_rates(&a, &AiShock::NONE, 11.0, 10, 1).is_err());
        assert!(flip_rates(&a, &AiShock::NONE, 0.0, 0, 1).is_err());
    }

    #[test]
    fn stationary_points() {
        let sym = FlipRates::new(0.1, 0.1).unwrap();
        assert_eq!(stationary_fraction(&sym).unwrap(), 0.5);
        let r = FlipRates::new(0.2, 0.1).unwrap();
        assert!((stationary_fraction(&r).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let absorbing = FlipRates::new(0.05, 0.0).unwrap();
        assert_eq!(stationary_fraction(&absorbing).unwrap(), 1.0);
    }

    #[test]
    fn mean_paths() {
        let r = FlipRates::new(0.2, 0.1).unwrap();
        let p = expected_path(0.0, &r, 2).unwrap();
        assert_eq!(p.len(), 3);
        assert!((p[1] - 0.2).abs() < 1e-15);
        assert!((p[2] - 0.34).abs() < 1e-15);
        let fixed = expected_path(2.0 / 3.0, &r, 50).unwrap();
        assert!(fixed.iter().all(|x| (x - 2.0 / 3.0).abs() < 1e-15));
        let still = expected_path(0.3, &FlipRates::new(0.0, 0.0).unwrap(), 10).unwrap();
        assert!(still.iter().all(|&x| x == 0.3));
        assert!(expected_path(1.2, &r, 3).is_err());
    }

    #[test]
    fn closure_time_matches_iteration() {
        for (p_ie, p_ei, x0) in [
            (0.02, 0.01, 0.0),
            (0.2, 0.1, 1.0),
            (0.05, 0.3, 0.4),
            (0.7, 0.6, 0.0),
        ] {
            let r = FlipRates::new(p_ie, p_ei).unwrap();
            let target = stationary_fraction(&r).unwrap();
            let path = expected_path(x0, &r, 10_000).unwrap();
            let gap0 = (x0 - target).abs();
            let iterated = path
                .iter()
                .position(|x| (x - target).abs() <= 0.1 * gap0 * (1.0 + 1e-12))
                .unwrap() as u64;
            assert_eq!(gap_closure_time(x0, &r, 0.9).unwrap(), Some(iterated));
        }
        let none = FlipRates::new(0.0, 0.0).unwrap();
        assert_eq!(gap_closure_time(0.5, &none, 0.9).unwrap(), None);
    }

    #[test]
    fn simulation_invariants() {
        let pop = RulePopulation::from_fraction(500, 0.2).unwrap();
        let trace = simulate(&tort(), &pop, &params(60, 5)).unwrap();
        assert_eq!(trace.records.len(), 61);
        assert_eq!(trace.records[0].efficient, 100);
        for r in &trace.records {
            assert_eq!(r.disputes, r.settlements + r.trials);
            assert!(r.overturns <= r.trials);
            assert!(r.efficient <= 500);
        }
        assert_eq!(trace, simulate(&tort(), &pop, &params(60, 5)).unwrap());
        assert_ne!(trace, simulate(&tort(), &pop, &params(60, 6)).unwrap());
    }

    #[test]
    fn no_overturns_means_no_change() {
        let pop = RulePopulation::from_fraction(300, 0.4).unwrap();
        let mut a = tort();
        a.overturn_prob = 0.0;
        let t = simulate(&a, &pop, &params(40, 1)).unwrap();
        assert!(t.records.iter().all(|r| r.efficient == 120));
        assert!(t.records.iter().any(|r| r.trials > 0));

        let mut quiet = tort();
        quiet.dispute_rate = 0.0;
        let t = simulate(&quiet, &pop, &params(40, 1)).unwrap();
        assert!(t
            .records
            .iter()
            .all(|r| r.efficient == 120 && r.disputes == 0));
    }

    #[test]
    fn growing_population_keeps_existing_draws() {
        // Rules keep their own streams, so the first rules' disputes are the
        // same regardless of how many rules follow them.
        let mut a = tort();
        a.overturn_prob = 0.0;
        let small = simulate(&a, &RulePopulation::new(10, 10).unwrap(), &params(30, 8)).unwrap();
        let large = simulate(&a, &RulePopulation::new(20, 20).unwrap(), &params(30, 8)).unwrap();
        for (s, l) in small.records.iter().zip(&large.records) {
            assert!(l.disputes >= s.disputes, "t={}", s.t);
            assert!(l.trials >= s.trials, "t={}", s.t);
        }
    }

    #[test]
    fn simulation_tracks_mean_path() {
        let a = tort();
        let pop = RulePopulation::new(10_000, 0).unwrap();
        let rates = flip_rates(&a, &AiShock::NONE, 0.0, 1_000_000, 17).unwrap();
        let trace = simulate(&a, &pop, &params(200, 2024)).unwrap();
        let path = expected_path(0.0, &rates, 200).unwrap();
        for t in (10..=200).step_by(10) {
            let x = path[t];
            let sigma = (x * (1.0 - x) / 10_000.0).sqrt();
            let sim = trace.fraction_efficient(t);
            assert!((sim - x).abs() <= 3.0 * sigma, "t={t}: {sim} vs {x}");
        }
    }

    #[test]
    fn chain_records_flips() {
        let r = FlipRates::new(0.2, 0.1).unwrap();
        let t = simulate_chain(&r, &RulePopulation::new(1000, 0).unwrap(), 20, 4).unwrap();
        for w in t.records.windows(2) {
            let delta = w[1].efficient as i64 - w[0].efficient as i64;
            assert!(delta.unsigned_abs() <= w[1].overturns);
            assert_eq!(w[1].disputes, w[1].trials);
        }
        assert!(simulate_chain(
            &r,
            &RulePopulation {
                n_rules: 0,
                efficient: 0
            },
            5,
            1
        )
        .is_err());
    }
}
