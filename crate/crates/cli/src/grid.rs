//! The rearrange-grid scenario: discrete Pólya–Szegő on random or sampled fields.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Result;
use pslab_core::field::DEFAULT_LEVELS;
use pslab_core::functionals::dirichlet_grid;
use pslab_core::rearrangement::rearrange;
use pslab_core::{BoundReport, GridField, Verdict};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::ScenarioConfig;
use crate::fields::random_smooth_field;
use crate::Outcome;

/// Relative slack for the discrete inequality: centered differences do not
/// commute exactly with rearrangement.
pub const GRID_PS_TOLERANCE: f64 = 0.02;

const DEFAULT_RESOLUTION: usize = 256;

#[derive(Debug, Serialize)]
pub struct FieldSummary {
    pub index: usize,
    pub seed: Option<u64>,
    pub equimeasurable: bool,
    pub max_value: f64,
    pub reports: Vec<BoundReport>,
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = v.iter().copied().filter(|&x| x != 0.0).collect();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Gradient and Dirichlet comparisons of `u` and its rearrangement.
pub fn polya_szego_reports(
    u: &GridField,
    star: &GridField,
    ps: &[f64],
    phi: &pslab_core::YoungFunction,
    tolerance: f64,
) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for &p in ps {
        let mut params = BTreeMap::new();
        params.insert("p".to_string(), json!(p));
        out.push(BoundReport::new(
            "polya-szego",
            params,
            star.gradient_norm_lp(p)?,
            u.gradient_norm_lp(p)?,
            tolerance,
        ));
    }
    let mut params = BTreeMap::new();
    params.insert("phi".to_string(), serde_json::to_value(phi)?);
    out.push(BoundReport::new(
        "polya-szego-dirichlet",
        params,
        dirichlet_grid(star, phi),
        dirichlet_grid(u, phi),
        tolerance,
    ));
    Ok(out)
}

pub fn rearrange_grid(config: &ScenarioConfig) -> Result<Outcome> {
    let resolution = config.grid.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let levels = config.grid.levels.unwrap_or(DEFAULT_LEVELS);
    let (phi, _) = config.young()?;
    let tolerance = config.tolerance.unwrap_or(GRID_PS_TOLERANCE);
    let fields: Vec<(Option<u64>, GridField)> = match &config.family {
        Some(f) => vec![(None, config.build_family(f)?.sample(resolution)?)],
        None => {
            let count = config.grid.count.unwrap_or(1);
            (0..count as u64)
                .map(|i| {
                    let seed = config.seed.wrapping_add(i);
                    (Some(seed), random_smooth_field(seed, resolution))
                })
                .collect()
        }
    };
    let results: Vec<(FieldSummary, GridField)> = fields
        .par_iter()
        .enumerate()
        .map(|(index, (seed, u))| -> Result<_> {
            let star = rearrange(u);
            Ok((
                FieldSummary {
                    index,
                    seed: *seed,
                    equimeasurable: sorted(u.values()) == sorted(star.values()),
                    max_value: u.max_value(),
                    reports: polya_szego_reports(u, &star, &config.p, &phi, tolerance)?,
                },
                star,
            ))
        })
        .collect::<Result<_>>()?;

    let mut out = Outcome::default();
    for (s, _) in &results {
        out.violated |=
            !s.equimeasurable || s.reports.iter().any(|r| r.verdict == Verdict::Violated);
        for r in &s.reports {
            out.lines.push(format!(
                "field {:>3} {:<22} star={:.6e} original={:.6e} ratio={:.5} {:?}",
                s.index,
                r.bound_id,
                r.lhs,
                r.rhs,
                r.ratio.unwrap_or(f64::NAN),
                r.verdict
            ));
        }
    }
    let summaries: Vec<&FieldSummary> = results.iter().map(|(s, _)| s).collect();
    out.json(
        "rearrange.json",
        &json!({ "resolution": resolution, "fields": summaries }),
    )?;
    if let (Some((_, u)), Some((_, star))) = (fields.first(), results.first()) {
        let dist = u.distribution_function(&u.default_thresholds(levels))?;
        let mut dat = String::from("# level F\n");
        for (t, f) in dist.thresholds.iter().zip(&dist.values) {
            writeln!(dat, "{t} {f}")?;
        }
        out.file("distribution.dat", dat);
        let mut bin = Vec::new();
        star.write_binary(&mut bin)?;
        out.file("rearranged.bin", bin);
    }
    Ok(out)
}
