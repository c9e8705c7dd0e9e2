//! Cross-checks between independent evaluations of the same quantity.

use anyhow::Result;
use pslab_core::extremal::family_cone_frustrum;
use pslab_core::field::{DEFAULT_LEVELS, LAYER_CAKE_TOL};
use pslab_core::functionals::{
    levelwise_psi_distance, psi1_oracle_grid, psi2_bound_grid, psi_distance_grid, psi_distance_spec,
};
use pslab_core::geometry::{
    ball_symdiff_volume, ball_volume, kn_by_quadrature, kn_constant, symdiff_bound,
};
use pslab_core::{Error, YoungFunction};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{OracleKind, ScenarioConfig};
use crate::fields::random_smooth_field;
use crate::Outcome;

const DEFAULT_RESOLUTION: usize = 96;
const DEFAULT_PAIRS: usize = 4;
/// Shown per check when it fails.
const WORST_SHOWN: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub case: String,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: OracleKind,
    pub cases: usize,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// The largest discrepancies, listed when the check fails.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub worst: Vec<Case>,
}

fn check(name: OracleKind, mut cases: Vec<Case>, declared: f64, tolerance: Option<f64>) -> Check {
    let tolerance = tolerance.unwrap_or(declared);
    let max = cases.iter().map(|c| c.discrepancy).fold(0.0, f64::max);
    let passed = max <= tolerance && cases.iter().all(|c| c.discrepancy.is_finite());
    let count = cases.len();
    let worst = if passed {
        Vec::new()
    } else {
        cases.sort_by(|a, b| b.discrepancy.total_cmp(&a.discrepancy));
        cases.truncate(WORST_SHOWN);
        cases
    };
    Check {
        name,
        cases: count,
        max_discrepancy: max,
        tolerance,
        passed,
        worst,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Young functions with `Psi'(0) = 0`, as the double-integral form needs.
pub fn oracle_young_functions() -> Vec<(String, YoungFunction)> {
    vec![
        ("t^2".into(), YoungFunction::power(2.0).expect("valid")),
        ("t^1.5".into(), YoungFunction::power(1.5).expect("valid")),
        (
            "piecewise".into(),
            YoungFunction::piecewise_linear(vec![(0.0, 0.0), (0.1, 0.0), (0.5, 0.4)], Some(2.0))
                .expect("valid"),
        ),
    ]
}

fn kn_identity() -> Vec<Case> {
    (1..=10)
        .map(|n| Case {
            case: format!("n={n}"),
            discrepancy: rel(kn_constant(n).expect("n >= 1"), kn_by_quadrature(n)),
        })
        .collect()
}

/// Violations of the translate bound on a radius/offset/dimension grid, and
/// the distance from equality in 1D.
fn symdiff_cases() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for i in 0..20 {
            let r = 0.1 + 0.1 * i as f64;
            for j in 0..20 {
                let d = 2.5 * r * j as f64 / 19.0;
                let exact = ball_symdiff_volume(n, r, d)?;
                let bound = symdiff_bound(n, ball_volume(n, r)?, d)?;
                let excess = if bound > 0.0 {
                    ((exact - bound) / bound).max(0.0)
                } else {
                    exact
                };
                // In 1D the bound is attained while the intervals overlap.
                let gap = if n == 1 && d <= 2.0 * r {
                    rel(exact, bound)
                } else {
                    0.0
                };
                out.push(Case {
                    case: format!("n={n} r={r} d={d}"),
                    discrepancy: excess.max(gap),
                });
            }
        }
    }
    Ok(out)
}

fn pairs(config: &ScenarioConfig) -> Vec<(u64, u64)> {
    let count = config.grid.count.unwrap_or(DEFAULT_PAIRS) as u64;
    (0..count)
        .map(|i| {
            let s = config.seed.wrapping_add(2 * i);
            (s, s.wrapping_add(1))
        })
        .collect()
}

fn layer_cake_cases(config: &ScenarioConfig) -> Result<Vec<Case>> {
    let res = config.grid.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let levels = config.grid.levels.unwrap_or(DEFAULT_LEVELS);
    let mut young = oracle_young_functions();
    young.push(("t".into(), YoungFunction::power(1.0)?));
    pairs(config)
        .par_iter()
        .map(|&(seed, _)| -> Result<Vec<Case>> {
            let u = random_smooth_field(seed, res);
            young
                .iter()
                .map(|(name, psi)| {
                    let d = match u.psi_integral(psi, levels) {
                        Ok(lc) => rel(lc.direct, lc.layer_cake),
                        Err(Error::LayerCakeMismatch { direct, layer_cake }) => {
                            rel(direct, layer_cake)
                        }
                        Err(e) => return Err(e.into()),
                    };
                    Ok(Case {
                        case: format!("seed={seed} psi={name}"),
                        discrepancy: d,
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}

/// `psi_distance_grid` against the lattice double integral.
pub fn psi1_cases(config: &ScenarioConfig) -> Result<Vec<Case>> {
    let res = config.grid.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let levels = config.grid.levels.unwrap_or(DEFAULT_LEVELS);
    let young = oracle_young_functions();
    pairs(config)
        .par_iter()
        .map(|&(a, b)| -> Result<Vec<Case>> {
            let (u, v) = (random_smooth_field(a, res), random_smooth_field(b, res));
            young
                .iter()
                .map(|(name, psi)| {
                    let direct = psi_distance_grid(&u, &v, psi)?;
                    let lattice = psi1_oracle_grid(&u, &v, psi, levels)?;
                    Ok(Case {
                        case: format!("seeds=({a},{b}) psi={name}"),
                        discrepancy: rel(direct, lattice.value),
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}

/// Excess of `int Psi(|u - v|)` over the levelwise bound, plus the gap from
/// equality for linear `Psi`.
pub fn psi2_cases(config: &ScenarioConfig) -> Result<Vec<Case>> {
    let res = config.grid.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let mut young = oracle_young_functions();
    young.push(("t".into(), YoungFunction::power(1.0)?));
    pairs(config)
        .par_iter()
        .map(|&(a, b)| -> Result<Vec<Case>> {
            let (u, v) = (random_smooth_field(a, res), random_smooth_field(b, res));
            young
                .iter()
                .map(|(name, psi)| {
                    let direct = psi_distance_grid(&u, &v, psi)?;
                    let bound = psi2_bound_grid(&u, &v, psi)?;
                    let excess = if bound > 0.0 {
                        ((direct - bound) / bound).max(0.0)
                    } else {
                        direct
                    };
                    let gap = if name == "t" { rel(direct, bound) } else { 0.0 };
                    Ok(Case {
                        case: format!("seeds=({a},{b}) psi={name}"),
                        discrepancy: excess.max(gap),
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}

/// Levelwise ball geometry against volumetric sampling on frustrum pairs.
fn levelwise_cases() -> Result<Vec<Case>> {
    let mut young = vec![("t".to_string(), YoungFunction::power(1.0)?)];
    young.extend(oracle_young_functions());
    let mut out = Vec::new();
    for e in [0.1, 0.2] {
        let u = family_cone_frustrum(2, 0.5, 0.5, 0.3, &[e, 0.0])?;
        let v = u.aligned_rearrangement();
        for (name, psi) in &young {
            let level = levelwise_psi_distance(&u, &v, psi)?;
            let volume = psi_distance_spec(&u, &v, psi, None)?;
            out.push(Case {
                case: format!("frustrum e={e} psi={name}"),
                discrepancy: rel(level, volume),
            });
        }
    }
    Ok(out)
}

pub fn run_check(kind: OracleKind, config: &ScenarioConfig) -> Result<Check> {
    let tol = config.tolerance;
    Ok(match kind {
        OracleKind::KnIdentity => check(kind, kn_identity(), 1e-10, tol),
        OracleKind::SymdiffBound => check(kind, symdiff_cases()?, 1e-12, tol),
        OracleKind::LayerCake => check(kind, layer_cake_cases(config)?, LAYER_CAKE_TOL, tol),
        OracleKind::Psi1 => check(kind, psi1_cases(config)?, 1e-2, tol),
        OracleKind::Psi2 => check(kind, psi2_cases(config)?, 1e-12, tol),
        OracleKind::Levelwise => check(kind, levelwise_cases()?, 5e-3, tol),
    })
}

pub fn oracle_suite(config: &ScenarioConfig) -> Result<Outcome> {
    let kinds: Vec<OracleKind> = config
        .oracles
        .clone()
        .unwrap_or_else(|| OracleKind::ALL.to_vec());
    let checks = kinds
        .iter()
        .map(|&k| run_check(k, config))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    out.violated = checks.iter().any(|c| !c.passed);
    for c in &checks {
        out.lines.push(format!(
            "{:<14} cases={:<5} max={:.3e} tol={:.1e} {}",
            json!(c.name).as_str().unwrap_or(""),
            c.cases,
            c.max_discrepancy,
            c.tolerance,
            if c.passed { "passed" } else { "FAILED" }
        ));
    }
    out.json(
        "oracle.json",
        &json!({ "passed": !out.violated, "checks": checks }),
    )?;
    Ok(out)
}
