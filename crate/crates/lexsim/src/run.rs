//! Single runs: config in, CSV table and optional SVG chart out.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use lexsim_core::composition;
use lexsim_core::equilibrium::{self, GapCurve};
use lexsim_core::evolution::{self, EvolutionTrace, FlipRates, RulePopulation, RunParams};
use lexsim_core::frivolous::{self, FrivolousConfig, GameOutcome, PlaintiffType};
use lexsim_core::settlement::{self, Outcome};

use crate::config::{
    CompositionParams, EquilibriumParams, EvolveParams, FrivolousParams, Model, RunConfig,
    SettleParams,
};
use crate::error::{HarnessError, Result};
use crate::format::g17;
use crate::svg::{LineChart, Series};

pub const EQUILIBRIUM_HEADER: [&str; 12] = [
    "b_scale",
    "beta",
    "k_scale",
    "kappa",
    "delta_contracting",
    "delta_litigation",
    "g_star_baseline",
    "g_star",
    "delta_g_star",
    "level",
    "residual",
    "iterations",
];

pub const SETTLE_HEADER: [&str; 13] = [
    "rule",
    "cost_delta",
    "p_q",
    "p_g",
    "j",
    "c_q",
    "c_g",
    "lower",
    "upper",
    "width",
    "outcome",
    "amount",
    "shrink_ratio",
];

pub const FRIVOLOUS_HEADER: [&str; 13] = [
    "scenario",
    "plaintiff_type",
    "belief_merit",
    "f_o",
    "f_q",
    "d",
    "s",
    "filed",
    "defendant_action",
    "plaintiff_followup",
    "plaintiff_payoff",
    "defendant_payoff",
    "filing_region_shift",
];

pub const EVOLVE_HEADER: [&str; 9] = [
    "t",
    "fraction_efficient",
    "expected_fraction",
    "disputes",
    "settlements",
    "trials",
    "overturns",
    "frivolous_filings",
    "frivolous_trials",
];

pub const COMPOSITION_HEADER: [&str; 6] = [
    "name",
    "unit_cost",
    "demand_elasticity",
    "relative_price_change",
    "old_share",
    "new_share",
];

/// Share of the initial gap to the stationary fraction that counts as closed.
const CLOSED_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// Everything a run produces, before anything touches the filesystem.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub table: Table,
    pub chart: LineChart,
    /// One-row digest of the run, used as the sweep columns.
    pub summary: Vec<(String, String)>,
}

pub fn execute(config: &RunConfig) -> Result<Artifacts> {
    config.validate()?;
    match config.model {
        Model::Equilibrium => equilibrium_run(config.equilibrium()),
        Model::Settle => settle_run(config.settle()),
        Model::Frivolous => frivolous_run(config.frivolous()),
        Model::Evolve => evolve_run(config.evolve(), config.seed),
        Model::Composition => composition_run(config.composition()),
    }
}

/// Runs `config` and writes the CSV to `out` and, if given, the chart to `svg`.
pub fn run(config: &RunConfig, out: &Path, svg: Option<&Path>) -> Result<Artifacts> {
    let artifacts = execute(config)?;
    let svg_text = svg.map(|_| artifacts.chart.render());
    write_outputs(out, &artifacts.table.to_csv(), svg.zip(svg_text.as_deref()))?;
    Ok(artifacts)
}

/// Writes each file through a temporary sibling and a rename. On any
/// failure, files already written by this call are removed.
pub fn write_outputs(csv_path: &Path, csv: &str, svg: Option<(&Path, &str)>) -> Result<()> {
    let mut written: Vec<PathBuf> = Vec::new();
    let files = std::iter::once((csv_path, csv)).chain(svg);
    for (path, contents) in files {
        if let Err(e) = write_atomic(path, contents) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path.to_path_buf());
    }
    Ok(())
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let wrap = |source| HarnessError::Write {
        path: path.to_path_buf(),
        source,
    };
    let file_name = path.file_name().ok_or_else(|| {
        wrap(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "not a file path",
        ))
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(contents.as_bytes())?;
            f.sync_all()
        })
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(wrap(e));
    }
    Ok(())
}

fn equilibrium_run(p: &EquilibriumParams) -> Result<Artifacts> {
    let baseline = equilibrium::solve_completeness(&p.curve, p.tolerance)?;
    let shocked_curve = equilibrium::apply_shock(&p.curve, &p.shock)?;
    let shocked = equilibrium::solve_completeness(&shocked_curve, p.tolerance)?;

    let mut table = Table::new(&EQUILIBRIUM_HEADER);
    table.rows.push(vec![
        g17(p.curve.b_scale),
        g17(p.curve.beta),
        g17(p.curve.k_scale),
        g17(p.curve.kappa),
        g17(p.shock.delta_contracting),
        g17(p.shock.delta_litigation),
        g17(baseline.g_star),
        g17(shocked.g_star),
        g17(shocked.g_star - baseline.g_star),
        g17(shocked.level),
        g17(shocked.residual),
        shocked.iterations.to_string(),
    ]);
    let summary = table
        .header
        .iter()
        .cloned()
        .zip(table.rows[0].iter().cloned())
        .collect();

    // Plot the curves up to a little past the larger equilibrium, where MC
    // is still on the same scale as MB.
    let g_max = (baseline.g_star.max(shocked.g_star) * 1.6).min(0.99);
    let grid: Vec<f64> = (0..p.curve_points)
        .map(|i| g_max * i as f64 / (p.curve_points - 1) as f64)
        .collect();
    let curve_series = |name: &str, curve: &GapCurve, benefit: bool| -> Result<Series> {
        let points = grid
            .iter()
            .map(|&g| {
                let y = if benefit {
                    equilibrium::marginal_benefit(g, curve)?
                } else {
                    equilibrium::marginal_cost(g, curve)?
                };
                Ok((g, y))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Series::new(name, points))
    };
    let mut chart = LineChart::new("Contract completeness", "completeness g", "marginal value")
        .with_series(curve_series("MB", &p.curve, true)?)
        .with_series(curve_series("MC", &p.curve, false)?);
    if shocked_curve != p.curve {
        chart = chart
            .with_series(curve_series("MB shocked", &shocked_curve, true)?)
            .with_series(curve_series("MC shocked", &shocked_curve, false)?);
    }
    Ok(Artifacts {
        table,
        chart,
        summary,
    })
}

fn outcome_cells(outcome: Outcome) -> (String, String) {
    match outcome {
        Outcome::Settle { amount } => ("Settle".into(), g17(amount)),
        Outcome::Trial => ("Trial".into(), String::new()),
    }
}

fn settle_run(p: &SettleParams) -> Result<Artifacts> {
    let shrink = settlement::shrink_ratio(&p.dispute)?;
    let mut scenarios = vec![(0.0, p.dispute)];
    if p.cost_delta != 0.0 {
        scenarios.push((
            p.cost_delta,
            settlement::apply_cost_reduction(&p.dispute, p.cost_delta)?,
        ));
    }

    let mut table = Table::new(&SETTLE_HEADER);
    let mut summary = Vec::new();
    for (delta, d) in &scenarios {
        for &rule in &p.rules {
            let range = settlement::settlement_range(d, rule);
            let (outcome, amount) = outcome_cells(settlement::decide(d, rule));
            table.rows.push(vec![
                rule.as_str().into(),
                g17(*delta),
                g17(d.p_q),
                g17(d.p_g),
                g17(d.j),
                g17(d.c_q),
                g17(d.c_g),
                g17(range.lower),
                g17(range.upper),
                g17(range.width),
                outcome.clone(),
                amount.clone(),
                g17(shrink),
            ]);
            // The sweep digest reports the final scenario.
            if *delta == p.cost_delta {
                let r = rule.as_str();
                summary.push((format!("{r}_lower"), g17(range.lower)));
                summary.push((format!("{r}_upper"), g17(range.upper)));
                summary.push((format!("{r}_width"), g17(range.width)));
                summary.push((format!("{r}_outcome"), outcome));
                summary.push((format!("{r}_amount"), amount));
            }
        }
    }
    summary.push(("shrink_ratio".into(), g17(shrink)));

    let max_delta = p.dispute.c_q.min(p.dispute.c_g);
    let mut chart = LineChart::new("Settlement range width", "cost reduction", "width");
    for &rule in &p.rules {
        let points = (0..=50)
            .map(|i| {
                let delta = max_delta * i as f64 / 50.0;
                let d = settlement::apply_cost_reduction(&p.dispute, delta)?;
                Ok((delta, settlement::settlement_range(&d, rule).width))
            })
            .collect::<Result<Vec<_>>>()?;
        chart = chart.with_series(Series::new(rule.as_str(), points));
    }
    Ok(Artifacts {
        table,
        chart,
        summary,
    })
}

fn frivolous_row(
    scenario: &str,
    cfg: &FrivolousConfig,
    o: &GameOutcome,
    shift: &str,
) -> Vec<String> {
    vec![
        scenario.into(),
        format!("{:?}", o.plaintiff_type),
        g17(cfg.belief_merit),
        g17(cfg.f_o),
        g17(cfg.f_q),
        g17(cfg.d),
        g17(cfg.s),
        o.filed.to_string(),
        format!("{:?}", o.defendant_action),
        format!("{:?}", o.plaintiff_followup),
        g17(o.plaintiff_payoff),
        g17(o.defendant_payoff),
        shift.into(),
    ]
}

fn frivolous_run(p: &FrivolousParams) -> Result<Artifacts> {
    let shift = format!(
        "{:?}",
        frivolous::filing_region_shift(&p.game, p.delta_f, p.delta_d)?
    );
    let mut scenarios = vec![("baseline", p.game)];
    if p.delta_f != 0.0 || p.delta_d != 0.0 {
        scenarios.push((
            "shocked",
            frivolous::shocked_config(&p.game, p.delta_f, p.delta_d)?,
        ));
    }

    let mut table = Table::new(&FRIVOLOUS_HEADER);
    let mut summary = Vec::new();
    for (i, (scenario, cfg)) in scenarios.iter().enumerate() {
        for kind in PlaintiffType::ALL {
            let o = frivolous::play(kind, cfg)?;
            table.rows.push(frivolous_row(scenario, cfg, &o, &shift));
            if i == scenarios.len() - 1 {
                let k = format!("{kind:?}").to_lowercase();
                summary.push((format!("{k}_filed"), o.filed.to_string()));
                summary.push((
                    format!("{k}_defendant_action"),
                    format!("{:?}", o.defendant_action),
                ));
                summary.push((
                    format!("{k}_followup"),
                    format!("{:?}", o.plaintiff_followup),
                ));
                summary.push((format!("{k}_payoff"), g17(o.plaintiff_payoff)));
            }
        }
    }
    summary.push(("filing_region_shift".into(), shift));

    // Plaintiff payoffs as the settlement amount varies over [0, j].
    let mut chart = LineChart::new(
        "Plaintiff payoff by settlement amount",
        "settlement s",
        "plaintiff payoff",
    );
    for kind in PlaintiffType::ALL {
        let points = (0..=50)
            .map(|i| {
                let s = p.game.j * i as f64 / 50.0;
                let o = frivolous::play(kind, &FrivolousConfig { s, ..p.game })?;
                Ok((s, o.plaintiff_payoff))
            })
            .collect::<Result<Vec<_>>>()?;
        chart = chart.with_series(Series::new(format!("{kind:?}"), points));
    }
    Ok(Artifacts {
        table,
        chart,
        summary,
    })
}

fn evolve_run(p: &EvolveParams, seed: u64) -> Result<Artifacts> {
    let population = RulePopulation::from_fraction(
        p.population.n_rules,
        p.population.initial_fraction_efficient,
    )?;
    let (trace, rates): (EvolutionTrace, FlipRates) = match (&p.area, &p.rates) {
        (Some(area), _) => {
            let params = RunParams {
                periods: p.periods,
                shock: p.shock,
                cost_delta: p.cost_delta,
                seed,
            };
            let trace = match &p.frivolous {
                Some(stream) => {
                    evolution::simulate_with_frivolous(area, &population, &params, stream)?
                }
                None => evolution::simulate(area, &population, &params)?,
            };
            let rates = evolution::flip_rates(area, &p.shock, p.cost_delta, p.rate_samples, seed)?;
            (trace, rates)
        }
        (None, Some(rates)) => (
            evolution::simulate_chain(rates, &population, p.periods, seed)?,
            *rates,
        ),
        (None, None) => unreachable!("validated evolve block has a driver"),
    };
    let x0 = population.fraction_efficient();
    let expected = evolution::expected_path(x0, &rates, p.periods)?;
    let fractions = trace.fractions();

    let mut table = Table::new(&EVOLVE_HEADER);
    for ((r, x), e) in trace.records.iter().zip(&fractions).zip(&expected) {
        table.rows.push(vec![
            r.t.to_string(),
            g17(*x),
            g17(*e),
            r.disputes.to_string(),
            r.settlements.to_string(),
            r.trials.to_string(),
            r.overturns.to_string(),
            r.frivolous_filings.to_string(),
            r.frivolous_trials.to_string(),
        ]);
    }

    let stationary = evolution::stationary_fraction(&rates)
        .map(g17)
        .unwrap_or_default();
    let closure = evolution::gap_closure_time(x0, &rates, CLOSED_FRACTION)?
        .map(|t| t.to_string())
        .unwrap_or_default();
    let total = |f: fn(&evolution::PeriodRecord) -> u64| {
        trace.records.iter().map(f).sum::<u64>().to_string()
    };
    let summary = vec![
        (
            "final_fraction_efficient".into(),
            g17(*fractions.last().expect("initial record")),
        ),
        (
            "expected_final_fraction".into(),
            g17(*expected.last().expect("initial value")),
        ),
        ("stationary_fraction".into(), stationary),
        ("p_ie".into(), g17(rates.p_ie)),
        ("p_ei".into(), g17(rates.p_ei)),
        ("gap_closure_time".into(), closure),
        ("total_trials".into(), total(|r| r.trials)),
        ("total_overturns".into(), total(|r| r.overturns)),
        (
            "total_frivolous_trials".into(),
            total(|r| r.frivolous_trials),
        ),
    ];

    let ts = (0..fractions.len()).map(|t| t as f64);
    let chart = LineChart::new(
        format!("Rule evolution: {}", trace.area),
        "period t",
        "fraction efficient",
    )
    .with_series(Series::new(
        "simulated",
        ts.clone().zip(fractions.iter().copied()).collect(),
    ))
    .with_series(Series::new(
        "expected",
        ts.zip(expected.iter().copied()).collect(),
    ));
    Ok(Artifacts {
        table,
        chart,
        summary,
    })
}

fn composition_run(p: &CompositionParams) -> Result<Artifacts> {
    let shifted = composition::shift_composition(&p.areas, p.flat_reduction)?;
    let prices = composition::relative_price_change(&p.areas, p.flat_reduction)?;

    let mut table = Table::new(&COMPOSITION_HEADER);
    let mut summary = Vec::new();
    for ((a, s), pc) in p.areas.iter().zip(&shifted).zip(&prices) {
        table.rows.push(vec![
            a.name.clone(),
            g17(a.unit_cost),
            g17(a.demand_elasticity),
            g17(pc.fractional_decline),
            g17(s.old_share),
            g17(s.new_share),
        ]);
        summary.push((format!("{}_new_share", a.name), g17(s.new_share)));
    }

    let min_cost = p
        .areas
        .iter()
        .map(|a| a.unit_cost)
        .fold(f64::INFINITY, f64::min);
    let reductions: Vec<f64> = (0..=50)
        .map(|i| 0.95 * min_cost * i as f64 / 50.0)
        .collect();
    let paths = reductions
        .iter()
        .map(|&r| composition::shift_composition(&p.areas, r))
        .collect::<lexsim_core::Result<Vec<_>>>()?;
    let mut chart = LineChart::new("Caseload composition", "flat cost reduction", "share");
    for (i, a) in p.areas.iter().enumerate() {
        let points = reductions
            .iter()
            .zip(&paths)
            .map(|(&r, s)| (r, s[i].new_share))
            .collect();
        chart = chart.with_series(Series::new(a.name.clone(), points));
    }
    Ok(Artifacts {
        table,
        chart,
        summary,
    })
}
