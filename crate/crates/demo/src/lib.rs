//! WebAssembly bindings behind `www/index.html`.
//!
//! Every export returns a JSON string so the page needs no glue beyond
//! `JSON.parse`.

use pslab_core::extremal::{family_cone_frustrum, ExtremalSpec};
use pslab_core::field::Domain;
use pslab_core::functionals::levelwise_symdiff;
use pslab_core::rearrangement::rearrange;
use pslab_core::verify::{verify_cf_bound, verify_theorem_finite, verify_theorem_main};
use pslab_core::GridField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_RESOLUTION: usize = 256;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn bumps(seed: u64, resolution: usize) -> Result<GridField, JsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=5);
    let bumps: Vec<([f64; 2], f64, f64)> = (0..k)
        .map(|_| {
            let c = [rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)];
            (c, rng.gen_range(0.2..0.5), rng.gen_range(0.3..1.0))
        })
        .collect();
    GridField::from_function(
        |x| {
            bumps
                .iter()
                .map(|(c, w, a)| {
                    a * (1.0 - ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)) / (w * w))
                        .max(0.0)
                        .powi(3)
                })
                .sum()
        },
        &Domain::cube(2, 1.0),
        resolution.clamp(8, MAX_RESOLUTION),
    )
    .map_err(err)
}

/// A seeded sum of bumps and its symmetric decreasing rearrangement.
///
/// Returns `{resolution, max, original, rearranged, gradient_l2: [u, u*]}`.
#[wasm_bindgen]
pub fn rearrange_random(seed: u32, resolution: usize) -> Result<String, JsError> {
    let u = bumps(seed as u64, resolution)?;
    let star = rearrange(&u);
    Ok(json!({
        "resolution": u.dims()[0],
        "max": u.max_value(),
        "original": u.values(),
        "rearranged": star.values(),
        "gradient_l2": [u.gradient_norm_lp(2.0).map_err(err)?, star.gradient_norm_lp(2.0).map_err(err)?],
    })
    .to_string())
}

fn frustrum(a: f64, rho: f64, rho_inner: f64, e: f64) -> Result<ExtremalSpec, JsError> {
    family_cone_frustrum(2, a, rho, rho_inner, &[e, 0.0]).map_err(err)
}

/// A sampled cone frustrum with its main, finite-measure and CF bound reports.
#[wasm_bindgen]
pub fn frustrum_bounds(
    a: f64,
    rho: f64,
    rho_inner: f64,
    e: f64,
    resolution: usize,
) -> Result<String, JsError> {
    let spec = frustrum(a, rho, rho_inner, e)?;
    let image = spec
        .sample(resolution.clamp(8, MAX_RESOLUTION))
        .map_err(err)?;
    let reports = [
        verify_theorem_main(&spec, 1.0),
        verify_theorem_main(&spec, 2.0),
        verify_theorem_finite(&spec, 2.0),
        verify_cf_bound(&spec, 2.0),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(err)?;
    Ok(json!({
        "resolution": image.dims()[0],
        "max": image.max_value(),
        "image": image.values(),
        "reports": reports,
    })
    .to_string())
}

/// `|{u > t} symdiff {u* > t}|` against `t`, with `u*` translated optimally.
#[wasm_bindgen]
pub fn symdiff_curve(
    a: f64,
    rho: f64,
    rho_inner: f64,
    e: f64,
    levels: usize,
) -> Result<String, JsError> {
    let spec = frustrum(a, rho, rho_inner, e)?;
    let levels = levels.clamp(2, 2000);
    let top = spec.top_height();
    let heights: Vec<f64> = (0..levels)
        .map(|i| top * i as f64 / (levels - 1) as f64)
        .collect();
    let values = levelwise_symdiff(&spec, &spec.aligned_rearrangement(), &heights).map_err(err)?;
    Ok(json!({ "heights": heights, "symdiff": values }).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_produce_json() {
        let r: serde_json::Value = serde_json::from_str(&rearrange_random(5, 32).unwrap()).unwrap();
        assert_eq!(r["rearranged"].as_array().unwrap().len(), 32 * 32);
        let f: serde_json::Value =
            serde_json::from_str(&frustrum_bounds(0.5, 0.5, 0.3, 0.2, 16).unwrap()).unwrap();
        assert_eq!(f["reports"].as_array().unwrap().len(), 4);
        let s: serde_json::Value =
            serde_json::from_str(&symdiff_curve(0.5, 0.5, 0.3, 0.2, 11).unwrap()).unwrap();
        assert_eq!(s["symdiff"].as_array().unwrap().len(), 11);
    }
}
