//! The verify-bounds and sweep scenarios.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use pslab_core::extremal::{family_cone_frustrum, ExtremalSpec};
use pslab_core::functionals::levelwise_symdiff;
use pslab_core::verify::{
    verify_cf_bound, verify_coarea_bound, verify_corollary_finite, verify_corollary_young,
    verify_density_bound, verify_theorem_finite, verify_theorem_main, verify_theorem_morrey,
};
use pslab_core::{BoundReport, Verdict, YoungFunction};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{BoundKind, Exponent, ScenarioConfig};
use crate::{fmt_opt, Outcome};

/// Levels sampled for the symmetric-difference plot.
const SYMDIFF_LEVELS: usize = 200;

pub fn exponents(kind: BoundKind, config: &ScenarioConfig) -> Vec<Option<f64>> {
    match kind.exponent() {
        Exponent::P => config.p.iter().map(|&p| Some(p)).collect(),
        Exponent::Q => config.q.iter().map(|&q| Some(q)).collect(),
        Exponent::None => vec![None],
    }
}

/// One bound on one spec.
pub fn evaluate(
    spec: &ExtremalSpec,
    kind: BoundKind,
    exponent: Option<f64>,
    config: &ScenarioConfig,
    phi: &YoungFunction,
    psi: &YoungFunction,
) -> pslab_core::Result<BoundReport> {
    let e = || exponent.expect("exponent for this bound");
    let report = match kind {
        BoundKind::TheoremMain => verify_theorem_main(spec, e())?,
        BoundKind::TheoremFinite => verify_theorem_finite(spec, e())?,
        BoundKind::TheoremMorrey => {
            let m = config.morrey_constant.ok_or_else(|| {
                pslab_core::Error::InvalidArgument("the Morrey constant has no default".into())
            })?;
            verify_theorem_morrey(spec, e(), m)?
        }
        BoundKind::CfBound => verify_cf_bound(spec, e())?,
        BoundKind::DensityBound => verify_density_bound(spec, e())?,
        BoundKind::CorollaryYoung => verify_corollary_young(spec, phi, psi)?,
        BoundKind::CorollaryFinite => verify_corollary_finite(spec, phi)?,
        BoundKind::CoareaBound => verify_coarea_bound(spec, e())?,
    };
    Ok(match config.tolerance {
        Some(t) => report.with_tolerance(t),
        None => report,
    })
}

fn line(r: &BoundReport, exponent: Option<f64>) -> String {
    format!(
        "{:<17} {:>5} lhs={:<12.6e} rhs={:<12.6e} ratio={:<10} {:?}{}",
        r.bound_id,
        fmt_opt(exponent),
        r.lhs,
        r.rhs,
        r.ratio.map_or_else(|| "-".into(), |x| format!("{x:.6}")),
        r.verdict,
        if r.vacuous { " (vacuous)" } else { "" }
    )
}

#[derive(Serialize)]
struct Skipped {
    bound_id: BoundKind,
    exponent: Option<f64>,
    reason: String,
}

pub fn verify_bounds(config: &ScenarioConfig) -> Result<Outcome> {
    let family = config
        .family
        .as_ref()
        .context("config field `family`: required")?;
    let spec = config.build_family(family)?;
    let (phi, psi) = config.young()?;
    let mut kinds = vec![
        BoundKind::TheoremMain,
        BoundKind::TheoremFinite,
        BoundKind::CfBound,
        BoundKind::DensityBound,
        BoundKind::CorollaryYoung,
        BoundKind::CorollaryFinite,
        BoundKind::CoareaBound,
    ];
    if config.morrey_constant.is_some() {
        kinds.insert(2, BoundKind::TheoremMorrey);
    }
    let mut out = Outcome::default();
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for kind in kinds {
        for exponent in exponents(kind, config) {
            match evaluate(&spec, kind, exponent, config, &phi, &psi) {
                Ok(r) => {
                    out.violated |= r.verdict == Verdict::Violated;
                    out.lines.push(line(&r, exponent));
                    reports.push(r);
                }
                Err(e) => {
                    out.lines.push(format!(
                        "{:<17} {:>5} skipped: {e}",
                        json!(kind).as_str().unwrap_or(""),
                        fmt_opt(exponent)
                    ));
                    skipped.push(Skipped {
                        bound_id: kind,
                        exponent,
                        reason: e.to_string(),
                    });
                }
            }
        }
    }
    out.json(
        "reports.json",
        &json!({
            "family": family,
            "xi_infinity": spec.xi_infinity(),
            "reports": reports,
            "skipped": skipped,
        }),
    )?;
    out.file("spec.json", spec.to_json()? + "\n");
    let top = spec.top_height();
    let heights: Vec<f64> = (0..SYMDIFF_LEVELS)
        .map(|i| top * i as f64 / SYMDIFF_LEVELS as f64)
        .collect();
    let sd = levelwise_symdiff(&spec, &spec.aligned_rearrangement(), &heights)?;
    let mut dat = String::from("# level symdiff\n");
    for (t, v) in heights.iter().zip(sd) {
        writeln!(dat, "{t} {v}")?;
    }
    out.file("symdiff.dat", dat);
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Tuple {
    a: f64,
    rho: f64,
    rho_inner: f64,
    e: f64,
}

/// One CSV row.
#[derive(Debug, Clone)]
pub struct Row {
    pub bound: BoundKind,
    pub exponent: Option<f64>,
    pub n: usize,
    pub a: f64,
    pub rho: f64,
    pub rho_inner: f64,
    pub e: f64,
    pub report: BoundReport,
    key: (usize, usize, usize),
}

pub const CSV_HEADER: [&str; 11] = [
    "bound_id",
    "n",
    "p_or_q",
    "a",
    "rho",
    "rho_inner",
    "e",
    "lhs",
    "rhs",
    "ratio",
    "verdict",
];

fn tuples(config: &ScenarioConfig) -> Vec<Tuple> {
    let s = &config.sweep;
    let mut out = Vec::new();
    for &a in &s.a {
        for &rho in &s.rho {
            for &ratio in &s.inner_ratio {
                let rho_inner = rho * ratio;
                for k in 0..s.e_steps {
                    let e = if s.e_steps == 1 {
                        0.0
                    } else {
                        (rho - rho_inner) * k as f64 / (s.e_steps - 1) as f64
                    };
                    out.push(Tuple {
                        a,
                        rho,
                        rho_inner,
                        e,
                    });
                }
            }
        }
    }
    out
}

/// Runs every bound on every cone-frustrum tuple; rows come out ordered by
/// bound, exponent, then tuple, whatever the thread count.
pub fn sweep_rows(config: &ScenarioConfig) -> Result<Vec<Row>> {
    let s = &config.sweep;
    let (phi, psi) = config.young()?;
    let len = s.direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dir: Vec<f64> = s.direction.iter().map(|x| x / len).collect();
    let n = dir.len();
    let tuples = tuples(config);
    let chunks: Vec<Vec<Row>> = tuples
        .par_iter()
        .enumerate()
        .map(|(ti, t)| -> Result<Vec<Row>> {
            let e: Vec<f64> = dir.iter().map(|d| d * t.e).collect();
            let spec = family_cone_frustrum(n, t.a, t.rho, t.rho_inner, &e).with_context(|| {
                format!(
                    "cone-frustrum a={} rho={} rho_inner={} e={}",
                    t.a, t.rho, t.rho_inner, t.e
                )
            })?;
            let mut rows = Vec::new();
            for (bi, &bound) in s.bounds.iter().enumerate() {
                for (ei, exponent) in exponents(bound, config).into_iter().enumerate() {
                    let report = evaluate(&spec, bound, exponent, config, &phi, &psi)
                        .with_context(|| {
                            format!(
                                "{bound:?} at exponent {} on a={} e={}",
                                fmt_opt(exponent),
                                t.a,
                                t.e
                            )
                        })?;
                    rows.push(Row {
                        bound,
                        exponent,
                        n,
                        a: t.a,
                        rho: t.rho,
                        rho_inner: t.rho_inner,
                        e: t.e,
                        report,
                        key: (bi, ei, ti),
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<Row> = chunks.into_iter().flatten().collect();
    rows.sort_by_key(|r| r.key);
    Ok(rows)
}

pub fn sweep_csv(rows: &[Row]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.report.bound_id.clone(),
            r.n.to_string(),
            fmt_opt(r.exponent),
            r.a.to_string(),
            r.rho.to_string(),
            r.rho_inner.to_string(),
            r.e.to_string(),
            r.report.lhs.to_string(),
            r.report.rhs.to_string(),
            fmt_opt(r.report.ratio),
            json!(r.report.verdict).as_str().unwrap_or("").to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

pub fn sweep(config: &ScenarioConfig) -> Result<Outcome> {
    let rows = sweep_rows(config)?;
    let mut out = Outcome::default();
    out.file("sweep.csv", sweep_csv(&rows)?);

    let mut dat =
        String::from("# e ratio, one block per bound, exponent and (a, rho, rho_inner)\n");
    let mut current = None;
    for r in &rows {
        let block = (
            r.key.0,
            r.key.1,
            r.a.to_bits(),
            r.rho.to_bits(),
            r.rho_inner.to_bits(),
        );
        if current != Some(block) {
            if current.is_some() {
                dat.push_str("\n\n");
            }
            writeln!(
                dat,
                "# {} p_or_q={} a={} rho={} rho_inner={}",
                r.report.bound_id,
                fmt_opt(r.exponent),
                r.a,
                r.rho,
                r.rho_inner
            )?;
            current = Some(block);
        }
        writeln!(dat, "{} {}", r.e, fmt_opt(r.report.ratio))?;
    }
    out.file("ratio_vs_e.dat", dat);

    let violated = rows
        .iter()
        .filter(|r| r.report.verdict == Verdict::Violated)
        .count();
    out.violated = violated > 0;
    let mut max_ratio = serde_json::Map::new();
    for r in &rows {
        if let Some(x) = r.report.ratio {
            let key = format!("{} {}", r.report.bound_id, fmt_opt(r.exponent));
            let entry = max_ratio.entry(key).or_insert(json!(x));
            if entry.as_f64().is_some_and(|m| x > m) {
                *entry = json!(x);
            }
        }
    }
    let ordering = rows
        .iter()
        .filter_map(|r| {
            r.report
                .params
                .get("finite_over_cf")
                .and_then(|v| v.as_f64())
        })
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    out.json(
        "summary.json",
        &json!({
            "rows": rows.len(),
            "violated": violated,
            "max_ratio": max_ratio,
            "max_finite_over_cf": ordering,
        }),
    )?;
    out.lines
        .push(format!("{} rows, {} violated", rows.len(), violated));
    for (k, v) in &max_ratio {
        out.lines.push(format!("max ratio {k}: {v}"));
    }
    Ok(out)
}
