//! Caseload composition under a flat litigation-cost reduction.
//!
//! A flat reduction is a larger proportional cut for cheap areas of law than
//! for expensive ones. With constant-elasticity demand, volume in area `i`
//! scales by `(c_i / (c_i - r))^eps_i`, so the caseload shifts toward the
//! areas whose relative price fell most.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaShare {
    pub name: String,
    /// Fraction of incoming cases.
    pub share: f64,
    /// Litigation cost per case.
    pub unit_cost: f64,
    /// Volume responds as `cost^-demand_elasticity`.
    #[serde(default = "unit_elasticity")]
    pub demand_elasticity: f64,
}

fn unit_elasticity() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShareShift {
    pub name: String,
    pub old_share: f64,
    pub new_share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceChange {
    pub name: String,
    /// `flat_reduction / unit_cost`.
    pub fractional_decline: f64,
}

/// State-court incoming caseload shares for 2019 (civil 51%, contract 17%,
/// tort 2%) with illustrative per-case costs. The costs are fixtures, not data.
pub fn caseload_2019_preset() -> Vec<AreaShare> {
    [
        ("civil", 0.51, 10.0),
        ("contract", 0.17, 10.0),
        ("tort", 0.02, 30.0),
    ]
    .into_iter()
    .map(|(name, share, unit_cost)| AreaShare {
        name: name.into(),
        share,
        unit_cost,
        demand_elasticity: 1.0,
    })
    .collect()
}

pub fn validate(areas: &[AreaShare], flat_reduction: f64) -> Result<()> {
    if areas.is_empty() {
        return Err(domain("composition needs at least one area"));
    }
    let mut total = 0.0;
    for a in areas {
        if !(0.0..=1.0).contains(&a.share) {
            return Err(domain(format!(
                "{}: share must lie in [0, 1], got {}",
                a.name, a.share
            )));
        }
        if !(a.unit_cost.is_finite() && a.unit_cost > 0.0) {
            return Err(domain(format!(
                "{}: unit_cost must be > 0, got {}",
                a.name, a.unit_cost
            )));
        }
        if !(a.demand_elasticity.is_finite() && a.demand_elasticity > 0.0) {
            return Err(domain(format!(
                "{}: demand_elasticity must be > 0, got {}",
                a.name, a.demand_elasticity
            )));
        }
        total += a.share;
    }
    if total > 1.0 + 1e-12 {
        return Err(domain(format!("shares sum to {total}, more than 1")));
    }
    if !(flat_reduction.is_finite() && flat_reduction >= 0.0) {
        return Err(domain(format!(
            "flat_reduction must be >= 0, got {flat_reduction}"
        )));
    }
    if let Some(a) = areas.iter().find(|a| flat_reduction >= a.unit_cost) {
        return Err(domain(format!(
            "flat_reduction {flat_reduction} is not below {}'s unit cost {}",
            a.name, a.unit_cost
        )));
    }
    Ok(())
}

/// New shares after costs fall by `flat_reduction`, renormalised so the
/// listed areas keep their combined share.
pub fn shift_composition(areas: &[AreaShare], flat_reduction: f64) -> Result<Vec<ShareShift>> {
    validate(areas, flat_reduction)?;
    let volumes: Vec<f64> = areas
        .iter()
        .map(|a| a.share * (a.unit_cost / (a.unit_cost - flat_reduction)).powf(a.demand_elasticity))
        .collect();
    let old_total: f64 = areas.iter().map(|a| a.share).sum();
    let new_total: f64 = volumes.iter().sum();
    let scale = if new_total > 0.0 {
        old_total / new_total
    } else {
        0.0
    };
    Ok(areas
        .iter()
        .zip(volumes)
        .map(|(a, v)| ShareShift {
            name: a.name.clone(),
            old_share: a.share,
            new_share: v * scale,
        })
        .collect())
}

pub fn relative_price_change(areas: &[AreaShare], flat_reduction: f64) -> Result<Vec<PriceChange>> {
    validate(areas, flat_reduction)?;
    Ok(areas
        .iter()
        .map(|a| PriceChange {
            name: a.name.clone(),
            fractional_decline: flat_reduction / a.unit_cost,
        })
        .collect())
}
