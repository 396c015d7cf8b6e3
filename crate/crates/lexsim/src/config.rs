//! Run configuration files.
//!
//! A config is a JSON object naming the model and carrying one parameter
//! block for it:
//!
//! ```json
//! { "model": "settle", "seed": 42,
//!   "settle": { "dispute": { "p_q": 0.6, "p_g": 0.5, "j": 100, "c_q": 10, "c_g": 10 } } }
//! ```
//!
//! Presets are expanded before parsing: `evolve.area` may be a preset name
//! (`"tort"`, `"contract"`, `"property"`) or an object with a `"preset"` key
//! plus overrides, and `composition.areas` may be `"caseload_2019"`.
//! Every field is then checked and all violations are reported together.

use std::path::{Path, PathBuf};

use lexsim_core::composition::{self, AreaShare};
use lexsim_core::equilibrium::{AiShock, GapCurve, DEFAULT_TOLERANCE};
use lexsim_core::evolution::{AreaKind, FlipRates, FrivolousStream, LegalArea};
use lexsim_core::frivolous::FrivolousConfig;
use lexsim_core::settlement::{Dispute, FeeRule};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{HarnessError, Result, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Equilibrium,
    Settle,
    Frivolous,
    Evolve,
    Composition,
}

impl Model {
    pub const ALL: [Model; 5] = [
        Model::Equilibrium,
        Model::Settle,
        Model::Frivolous,
        Model::Evolve,
        Model::Composition,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Equilibrium => "equilibrium",
            Model::Settle => "settle",
            Model::Frivolous => "frivolous",
            Model::Evolve => "evolve",
            Model::Composition => "composition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<EquilibriumParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settle: Option<SettleParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frivolous: Option<FrivolousParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composition: Option<CompositionParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumParams {
    #[serde(default)]
    pub curve: GapCurve,
    #[serde(default)]
    pub shock: AiShock,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Grid size for the plotted curves.
    #[serde(default = "default_curve_points")]
    pub curve_points: usize,
}

impl Default for EquilibriumParams {
    fn default() -> Self {
        EquilibriumParams {
            curve: GapCurve::default(),
            shock: AiShock::NONE,
            tolerance: DEFAULT_TOLERANCE,
            curve_points: default_curve_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettleParams {
    pub dispute: Dispute,
    #[serde(default = "all_rules")]
    pub rules: Vec<FeeRule>,
    /// Equal reduction of both parties' trial costs.
    #[serde(default)]
    pub cost_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrivolousParams {
    pub game: FrivolousConfig,
    /// Reduction in filing costs.
    #[serde(default)]
    pub delta_f: f64,
    /// Reduction in the defence cost.
    #[serde(default)]
    pub delta_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationParams {
    pub n_rules: u64,
    #[serde(default)]
    pub initial_fraction_efficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveParams {
    /// Agent simulation of an area of law. Exclusive with `rates`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<LegalArea>,
    /// Bare two-state chain at fixed flip rates. Exclusive with `area`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<FlipRates>,
    pub population: PopulationParams,
    pub periods: u64,
    #[serde(default)]
    pub shock: AiShock,
    #[serde(default)]
    pub cost_delta: f64,
    /// Monte Carlo draws used to estimate flip rates for the mean path.
    #[serde(default = "default_rate_samples")]
    pub rate_samples: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frivolous: Option<FrivolousStream>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionParams {
    pub areas: Vec<AreaShare>,
    pub flat_reduction: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_curve_points() -> usize {
    101
}

fn default_rate_samples() -> u64 {
    100_000
}

fn all_rules() -> Vec<FeeRule> {
    FeeRule::ALL.to_vec()
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    RunConfig::from_value(value)
}

impl RunConfig {
    /// Expands presets, parses and validates a JSON value.
    pub fn from_value(mut value: Value) -> Result<RunConfig> {
        let mut violations = Vec::new();
        expand_presets(&mut value, &mut violations);
        if !violations.is_empty() {
            return Err(HarnessError::Validation(violations));
        }
        let mut config: RunConfig =
            serde_json::from_value(value).map_err(|e| HarnessError::Parse(e.to_string()))?;
        if config.model == Model::Equilibrium && config.equilibrium.is_none() {
            config.equilibrium = Some(EquilibriumParams::default());
        }
        config.validate()?;
        Ok(config)
    }

    /// The config as JSON with presets expanded and defaults filled in.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Validation(violations))
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Checker::default();
        let present = [
            (Model::Equilibrium, self.equilibrium.is_some()),
            (Model::Settle, self.settle.is_some()),
            (Model::Frivolous, self.frivolous.is_some()),
            (Model::Evolve, self.evolve.is_some()),
            (Model::Composition, self.composition.is_some()),
        ];
        for (model, is_present) in present {
            if model == self.model && !is_present {
                v.push(
                    model.as_str(),
                    format!("missing parameter block for model {}", model.as_str()),
                );
            } else if model != self.model && is_present {
                v.push(
                    model.as_str(),
                    format!("block does not belong to model {}", self.model.as_str()),
                );
            }
        }
        if let Some(p) = &self.equilibrium {
            check_equilibrium(&mut v, p);
        }
        if let Some(p) = &self.settle {
            check_settle(&mut v, p);
        }
        if let Some(p) = &self.frivolous {
            check_frivolous(&mut v, p);
        }
        if let Some(p) = &self.evolve {
            check_evolve(&mut v, p);
        }
        if let Some(p) = &self.composition {
            check_composition(&mut v, p);
        }
        v.0
    }

    pub fn equilibrium(&self) -> &EquilibriumParams {
        self.equilibrium
            .as_ref()
            .expect("validated equilibrium block")
    }

    pub fn settle(&self) -> &SettleParams {
        self.settle.as_ref().expect("validated settle block")
    }

    pub fn frivolous(&self) -> &FrivolousParams {
        self.frivolous.as_ref().expect("validated frivolous block")
    }

    pub fn evolve(&self) -> &EvolveParams {
        self.evolve.as_ref().expect("validated evolve block")
    }

    pub fn composition(&self) -> &CompositionParams {
        self.composition
            .as_ref()
            .expect("validated composition block")
    }
}

fn expand_presets(value: &mut Value, violations: &mut Vec<Violation>) {
    if let Some(area) = value.pointer_mut("/evolve/area") {
        let (preset, overrides) = match area {
            Value::String(name) => (Some(name.clone()), Map::new()),
            Value::Object(map) => match map.remove("preset") {
                Some(Value::String(name)) => (Some(name), map.clone()),
                Some(_) => {
                    violations.push(Violation {
                        path: "evolve.area.preset".into(),
                        message: "preset must be a string".into(),
                    });
                    (None, Map::new())
                }
                None => (None, Map::new()),
            },
            _ => (None, Map::new()),
        };
        if let Some(name) = preset {
            match LegalArea::preset(&name) {
                Some(base) => {
                    let mut expanded = serde_json::to_value(base).expect("area serializes");
                    let obj = expanded.as_object_mut().expect("area is an object");
                    for (k, v) in overrides {
                        obj.insert(k, v);
                    }
                    *area = expanded;
                }
                None => violations.push(Violation {
                    path: "evolve.area.preset".into(),
                    message: format!(
                        "unknown area preset {name:?} (expected tort, contract or property)"
                    ),
                }),
            }
        }
    }
    if let Some(areas) = value.pointer_mut("/composition/areas") {
        if let Value::String(name) = areas {
            if name == "caseload_2019" {
                *areas = serde_json::to_value(composition::caseload_2019_preset())
                    .expect("areas serialize");
            } else {
                violations.push(Violation {
                    path: "composition.areas".into(),
                    message: format!(
                        "unknown composition preset {name:?} (expected caseload_2019)"
                    ),
                });
            }
        }
    }
}

#[derive(Default)]
struct Checker(Vec<Violation>);

impl Checker {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, x: f64) {
        if !(x.is_finite() && x > 0.0) {
            self.push(path, format!("must be finite and > 0, got {x}"));
        }
    }

    fn nonnegative(&mut self, path: &str, x: f64) {
        if !(x.is_finite() && x >= 0.0) {
            self.push(path, format!("must be finite and >= 0, got {x}"));
        }
    }

    fn probability(&mut self, path: &str, x: f64) {
        if !(0.0..=1.0).contains(&x) {
            self.push(path, format!("must lie in [0, 1], got {x}"));
        }
    }

    fn shock(&mut self, path: &str, shock: &AiShock) {
        for (name, x) in [
            ("delta_contracting", shock.delta_contracting),
            ("delta_litigation", shock.delta_litigation),
        ] {
            if !(0.0..1.0).contains(&x) {
                self.push(
                    format!("{path}.{name}"),
                    format!("must lie in [0, 1), got {x}"),
                );
            }
        }
    }

    fn curve(&mut self, path: &str, c: &GapCurve) {
        self.positive(&format!("{path}.b_scale"), c.b_scale);
        self.positive(&format!("{path}.beta"), c.beta);
        self.positive(&format!("{path}.k_scale"), c.k_scale);
        self.positive(&format!("{path}.kappa"), c.kappa);
    }

    fn game(&mut self, path: &str, g: &FrivolousConfig) {
        for (name, x) in [
            ("f_o", g.f_o),
            ("f_q", g.f_q),
            ("d", g.d),
            ("s", g.s),
            ("c_p", g.c_p),
            ("defendant_trial_cost", g.defendant_trial_cost),
        ] {
            self.nonnegative(&format!("{path}.{name}"), x);
        }
        self.positive(&format!("{path}.j"), g.j);
        self.probability(&format!("{path}.belief_merit"), g.belief_merit);
    }

    fn reduction(&mut self, path: &str, delta: f64, limit: f64, what: &str) {
        self.nonnegative(path, delta);
        if delta.is_finite() && delta > limit {
            self.push(path, format!("{delta} exceeds {what} {limit}"));
        }
    }
}

fn check_equilibrium(v: &mut Checker, p: &EquilibriumParams) {
    v.curve("equilibrium.curve", &p.curve);
    v.shock("equilibrium.shock", &p.shock);
    v.positive("equilibrium.tolerance", p.tolerance);
    if p.curve_points < 2 {
        v.push(
            "equilibrium.curve_points",
            format!("must be >= 2, got {}", p.curve_points),
        );
    }
}

fn check_settle(v: &mut Checker, p: &SettleParams) {
    let d = &p.dispute;
    v.probability("settle.dispute.p_q", d.p_q);
    v.probability("settle.dispute.p_g", d.p_g);
    v.positive("settle.dispute.j", d.j);
    v.nonnegative("settle.dispute.c_q", d.c_q);
    v.nonnegative("settle.dispute.c_g", d.c_g);
    if p.rules.is_empty() {
        v.push("settle.rules", "must name at least one fee rule");
    }
    v.reduction(
        "settle.cost_delta",
        p.cost_delta,
        d.c_q.min(d.c_g),
        "the smaller trial cost",
    );
}

fn check_frivolous(v: &mut Checker, p: &FrivolousParams) {
    v.game("frivolous.game", &p.game);
    v.reduction("frivolous.delta_f", p.delta_f, p.game.f_o, "f_o");
    v.reduction("frivolous.delta_d", p.delta_d, p.game.d, "d");
}

fn check_evolve(v: &mut Checker, p: &EvolveParams) {
    match (&p.area, &p.rates) {
        (Some(_), Some(_)) => v.push("evolve", "give either area or rates, not both"),
        (None, None) => v.push("evolve", "needs an area or fixed rates"),
        _ => {}
    }
    if let Some(a) = &p.area {
        match (a.kind, &a.gap_curve) {
            (AreaKind::Tort, Some(_)) => {
                v.push("evolve.area.gap_curve", "tort areas have no gap curve")
            }
            (AreaKind::Contract | AreaKind::Property, None) => v.push(
                "evolve.area.gap_curve",
                "contract and property areas need a gap curve",
            ),
            (_, Some(c)) => v.curve("evolve.area.gap_curve", c),
            _ => {}
        }
        v.probability("evolve.area.dispute_rate", a.dispute_rate);
        v.positive("evolve.area.stakes_j", a.stakes_j);
        if !(a.stakes_multiplier.is_finite() && a.stakes_multiplier >= 1.0) {
            v.push(
                "evolve.area.stakes_multiplier",
                format!("must be >= 1, got {}", a.stakes_multiplier),
            );
        }
        v.nonnegative("evolve.area.cost_q", a.cost_q);
        v.nonnegative("evolve.area.cost_g", a.cost_g);
        v.probability("evolve.area.belief_mean", a.belief_mean);
        v.nonnegative("evolve.area.belief_spread", a.belief_spread);
        v.probability("evolve.area.overturn_prob", a.overturn_prob);
        if let Some(d) = a.directional_overturn {
            v.probability("evolve.area.directional_overturn.ie", d.ie);
            v.probability("evolve.area.directional_overturn.ei", d.ei);
        }
        v.reduction(
            "evolve.cost_delta",
            p.cost_delta,
            a.cost_q.min(a.cost_g),
            "the smaller trial cost",
        );
    } else if p.cost_delta != 0.0 {
        v.push("evolve.cost_delta", "only applies to an area simulation");
    }
    if let Some(r) = &p.rates {
        v.probability("evolve.rates.p_ie", r.p_ie);
        v.probability("evolve.rates.p_ei", r.p_ei);
    }
    if p.population.n_rules == 0 {
        v.push("evolve.population.n_rules", "must be >= 1");
    }
    v.probability(
        "evolve.population.initial_fraction_efficient",
        p.population.initial_fraction_efficient,
    );
    if p.periods == 0 {
        v.push("evolve.periods", "must be >= 1");
    }
    v.shock("evolve.shock", &p.shock);
    if p.rate_samples == 0 {
        v.push("evolve.rate_samples", "must be >= 1");
    }
    if let Some(f) = &p.frivolous {
        if p.area.is_none() {
            v.push(
                "evolve.frivolous",
                "a frivolous stream needs an area simulation",
            );
        }
        v.probability("evolve.frivolous.rate", f.rate);
        v.game("evolve.frivolous.game", &f.game);
    }
}

fn check_composition(v: &mut Checker, p: &CompositionParams) {
    if p.areas.is_empty() {
        v.push("composition.areas", "must list at least one area");
    }
    let mut total = 0.0;
    for (i, a) in p.areas.iter().enumerate() {
        v.probability(&format!("composition.areas[{i}].share"), a.share);
        v.positive(&format!("composition.areas[{i}].unit_cost"), a.unit_cost);
        v.positive(
            &format!("composition.areas[{i}].demand_elasticity"),
            a.demand_elasticity,
        );
        total += a.share;
        if a.unit_cost.is_finite() && p.flat_reduction >= a.unit_cost {
            v.push(
                "composition.flat_reduction",
                format!(
                    "{} is not below {}'s unit cost {}",
                    p.flat_reduction, a.name, a.unit_cost
                ),
            );
        }
    }
    if total > 1.0 + 1e-12 {
        v.push(
            "composition.areas",
            format!("shares sum to {total}, more than 1"),
        );
    }
    v.nonnegative("composition.flat_reduction", p.flat_reduction);
}
