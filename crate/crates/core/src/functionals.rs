//! Young functions, Dirichlet-type functionals and distances of the form
//! `int Psi(|u - v|)`, evaluated directly and through level sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::ExtremalSpec;
use crate::field::{Domain, GridField};
use crate::geometry::{ball_difference_unchecked, DimConstants};
use crate::measure::distance;
use crate::quad;

/// A nonnegative, nondecreasing convex function on `[0, inf)` vanishing at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum YoungFunction {
    /// `coef * t^q`, `q >= 1`.
    Power { q: f64, coef: f64 },
    /// Linear interpolation of `points` (starting at `(0, 0)`), continued
    /// with slope `tail_slope` after the last point.
    PiecewiseLinear {
        points: Vec<(f64, f64)>,
        tail_slope: f64,
    },
}

/// Young functions as written in configs: `{"power": q}` or
/// `{"breakpoints": [[t, Phi(t)], ...], "tail_slope": s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum YoungConfig {
    Power {
        power: f64,
    },
    Breakpoints {
        breakpoints: Vec<(f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_slope: Option<f64>,
    },
}

/// Validates a configured Young function.
pub fn young_validate(config: &YoungConfig) -> Result<YoungFunction> {
    match config {
        YoungConfig::Power { power } => YoungFunction::power(*power),
        YoungConfig::Breakpoints {
            breakpoints,
            tail_slope,
        } => YoungFunction::piecewise_linear(breakpoints.clone(), *tail_slope),
    }
}

const SLOPE_EPS: f64 = 1e-12;

impl YoungFunction {
    pub fn power(q: f64) -> Result<Self> {
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::NotYoung(format!(
                "power must be a finite q >= 1, got {q}"
            )));
        }
        Ok(Self::Power { q, coef: 1.0 })
    }

    /// `tail_slope` defaults to the slope of the last piece.
    pub fn piecewise_linear(points: Vec<(f64, f64)>, tail_slope: Option<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NotYoung("no breakpoints".into()));
        }
        if points
            .iter()
            .any(|(t, v)| !(t.is_finite() && v.is_finite()))
        {
            return Err(Error::NotYoung("breakpoints must be finite".into()));
        }
        if points[0] != (0.0, 0.0) {
            return Err(Error::NotYoung(format!(
                "Phi(0) must be 0 at t = 0, got {:?}",
                points[0]
            )));
        }
        if let Some(&(t, v)) = points.iter().find(|(_, v)| *v < 0.0) {
            return Err(Error::NotYoung(format!("negative value {v} at t = {t}")));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::NotYoung(
                "breakpoints must be strictly increasing in t".into(),
            ));
        }
        let slopes: Vec<f64> = points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        let tail = tail_slope.unwrap_or_else(|| slopes.last().copied().unwrap_or(0.0));
        if !(tail.is_finite()) {
            return Err(Error::NotYoung("tail slope must be finite".into()));
        }
        let mut all = slopes.clone();
        all.push(tail);
        if all[0] < 0.0 {
            return Err(Error::NotYoung("Phi must be nondecreasing".into()));
        }
        for (i, w) in all.windows(2).enumerate() {
            if w[1] < w[0] - SLOPE_EPS * (1.0 + w[0].abs()) {
                return Err(Error::NotConvex(points[i + 1].0));
            }
        }
        Ok(Self::PiecewiseLinear {
            points,
            tail_slope: tail,
        })
    }

    /// Slopes of the pieces followed by the tail slope.
    fn slopes(&self) -> Vec<f64> {
        match self {
            Self::Power { .. } => Vec::new(),
            Self::PiecewiseLinear { points, tail_slope } => {
                let mut s: Vec<f64> = points
                    .windows(2)
                    .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
                    .collect();
                s.push(*tail_slope);
                s
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Power { q, coef } => coef * t.powf(*q),
            Self::PiecewiseLinear { points, tail_slope } => {
                let i = points.partition_point(|p| p.0 <= t);
                if i == points.len() {
                    let (tl, vl) = points[points.len() - 1];
                    return vl + tail_slope * (t - tl);
                }
                let (a, b) = (points[i - 1], points[i]);
                a.1 + (t - a.0) / (b.0 - a.0) * (b.1 - a.1)
            }
        }
    }

    /// Right derivative `Psi'(t+)`.
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            Self::Power { q, coef } => {
                if *q == 1.0 {
                    *coef
                } else {
                    coef * q * t.powf(q - 1.0)
                }
            }
            Self::PiecewiseLinear { points, .. } => {
                let slopes = self.slopes();
                let i = points.partition_point(|p| p.0 <= t);
                slopes[i - 1]
            }
        }
    }

    /// `Psi'(0+)`, the part of `Psi` that is linear near 0.
    pub fn initial_slope(&self) -> f64 {
        self.derivative(0.0)
    }

    /// Density of the absolutely continuous part of `nu = Psi''` on `(0, inf)`.
    pub fn nu_density(&self, s: f64) -> f64 {
        match self {
            Self::Power { q, coef } if *q > 1.0 && s > 0.0 => {
                coef * q * (q - 1.0) * s.powf(q - 2.0)
            }
            _ => 0.0,
        }
    }

    /// Atoms `(position, mass)` of `nu` on `(0, inf)`.
    pub fn nu_atoms(&self) -> Vec<(f64, f64)> {
        match self {
            Self::Power { .. } => Vec::new(),
            Self::PiecewiseLinear { points, .. } => {
                let slopes = self.slopes();
                (1..points.len())
                    .map(|i| (points[i].0, slopes[i] - slopes[i - 1]))
                    .filter(|(_, m)| *m > SLOPE_EPS)
                    .collect()
            }
        }
    }

    /// `phi = lim Phi(t) / t`.
    pub fn slope_at_infinity(&self) -> f64 {
        match self {
            Self::Power { q, coef } => {
                if *q == 1.0 {
                    *coef
                } else {
                    f64::INFINITY
                }
            }
            Self::PiecewiseLinear { tail_slope, .. } => *tail_slope,
        }
    }

    /// The maximal open set `V` on whose components the function is affine.
    pub fn affine_set(&self) -> Vec<(f64, f64)> {
        match self {
            Self::Power { q, .. } => {
                if *q == 1.0 {
                    vec![(0.0, f64::INFINITY)]
                } else {
                    Vec::new()
                }
            }
            Self::PiecewiseLinear { .. } => {
                let mut cuts: Vec<f64> = vec![0.0];
                cuts.extend(self.nu_atoms().iter().map(|a| a.0));
                cuts.push(f64::INFINITY);
                cuts.windows(2).map(|w| (w[0], w[1])).collect()
            }
        }
    }

    pub fn in_affine_set(&self, g: f64) -> bool {
        self.affine_set().iter().any(|&(a, b)| g > a && g < b)
    }

    pub fn strictly_increasing(&self) -> bool {
        match self {
            Self::Power { coef, .. } => *coef > 0.0,
            Self::PiecewiseLinear { .. } => self.slopes()[0] > 0.0,
        }
    }

    /// `t -> Phi(t / c)`.
    pub fn scaled_argument(&self, c: f64) -> Self {
        match self {
            Self::Power { q, coef } => Self::Power {
                q: *q,
                coef: coef * c.powf(-q),
            },
            Self::PiecewiseLinear { points, tail_slope } => Self::PiecewiseLinear {
                points: points.iter().map(|&(t, v)| (t * c, v)).collect(),
                tail_slope: tail_slope / c,
            },
        }
    }

    /// Breakpoints of `Psi'` (empty for powers).
    pub fn kinks(&self) -> Vec<f64> {
        self.nu_atoms().iter().map(|a| a.0).collect()
    }
}

/// An oracle value with the error budget it was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    /// Relative error budget.
    pub tolerance: f64,
}

/// `int Phi(|grad u|)` with finite-difference gradients. Grids carry no
/// singular part, so the `phi ||D^s u||` term is absent.
pub fn dirichlet_grid(field: &GridField, phi: &YoungFunction) -> f64 {
    field
        .gradient_magnitudes()
        .iter()
        .map(|&g| phi.value(g))
        .sum::<f64>()
        * field.cell_volume()
}

/// `int Phi(|grad u|) + phi ||D^s u||`, exact for a spec.
pub fn dirichlet_spec(spec: &ExtremalSpec, phi: &YoungFunction) -> Result<f64> {
    let ac = spec.gradient_integral(|g| phi.value(g), |_| true);
    let sv = spec.stats().singular_variation;
    if sv == 0.0 {
        return Ok(ac);
    }
    let slope = phi.slope_at_infinity();
    if slope.is_infinite() {
        return Err(Error::FunctionalInfinite(
            "value jumps with superlinear Phi",
        ));
    }
    Ok(ac + slope * sv)
}

fn check_same_grid(u: &GridField, v: &GridField) -> Result<()> {
    if u.dims() != v.dims() || u.origin() != v.origin() || u.spacing() != v.spacing() {
        return Err(Error::Incompatible("fields live on different grids".into()));
    }
    Ok(())
}

fn check_same_dim(u: &ExtremalSpec, v: &ExtremalSpec) -> Result<()> {
    if u.n() != v.n() {
        return Err(Error::Incompatible(
            "specs live in different dimensions".into(),
        ));
    }
    if !(1..=3).contains(&u.n()) {
        return Err(Error::UnsupportedDimension(
            u.n(),
            "1, 2 or 3 for levelwise geometry",
        ));
    }
    Ok(())
}

/// `sum Psi(|u - v|) h^n`.
pub fn psi_distance_grid(u: &GridField, v: &GridField, psi: &YoungFunction) -> Result<f64> {
    check_same_grid(u, v)?;
    Ok(u.values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| psi.value((a - b).abs()))
        .sum::<f64>()
        * u.cell_volume())
}

/// Default cells per axis for volumetric integration of specs.
pub fn default_volume_resolution(n: usize) -> usize {
    match n {
        1 => 1 << 16,
        2 => 1024,
        _ => 128,
    }
}

/// `int Psi(|u - v|)` by midpoint integration over a cube holding both
/// supports.
pub fn psi_distance_spec(
    u: &ExtremalSpec,
    v: &ExtremalSpec,
    psi: &YoungFunction,
    resolution: Option<usize>,
) -> Result<f64> {
    check_same_dim(u, v)?;
    let n = u.n();
    let res = resolution.unwrap_or_else(|| default_volume_resolution(n));
    let half = u.bounding_radius().max(v.bounding_radius()) * 1.02 + 1e-12;
    let h = 2.0 * half / res as f64;
    let total = res.pow(n as u32);
    let rows: Vec<f64> = (0..total / res)
        .into_par_iter()
        .map(|row| {
            let mut x = vec![0.0; n];
            let mut rest = row;
            for a in (0..n - 1).rev() {
                x[a] = -half + (rest % res) as f64 * h + 0.5 * h;
                rest /= res;
            }
            (0..res)
                .map(|j| {
                    x[n - 1] = -half + (j as f64 + 0.5) * h;
                    psi.value((u.eval(&x) - v.eval(&x)).abs())
                })
                .sum::<f64>()
        })
        .collect();
    Ok(rows.iter().sum::<f64>() * h.powi(n as i32))
}

/// Lattice evaluation of the double level-set integral
/// `int int [lambda({u > t} \ {v > t - s}) + lambda({v > t} \ {u > t - s})] dnu(s) dt`
/// with heights rounded to a lattice of `levels` steps. Independent of the
/// direct sum: it only counts cells in pairs of level sets.
pub fn psi1_oracle_grid(
    u: &GridField,
    v: &GridField,
    psi: &YoungFunction,
    levels: usize,
) -> Result<OracleValue> {
    check_same_grid(u, v)?;
    if psi.initial_slope() != 0.0 {
        return Err(Error::NotYoung(
            "the double integral needs Psi'(0) = 0".into(),
        ));
    }
    let levels = levels.max(1);
    let top = u.max_value().max(v.max_value());
    if top == 0.0 {
        return Ok(OracleValue {
            value: 0.0,
            tolerance: 0.0,
        });
    }
    let step = top / levels as f64;
    let l = levels + 1;
    // hist[a][b]: cells with lattice heights (a, b).
    let mut hist = vec![0f64; l * l];
    for (&x, &y) in u.values().iter().zip(v.values()) {
        let a = ((x / step).round() as usize).min(levels);
        let b = ((y / step).round() as usize).min(levels);
        hist[a * l + b] += 1.0;
    }
    // count(first, second)[i][j] = #{first > i, second <= j}.
    let count = |swap: bool| -> Vec<f64> {
        let get = |a: usize, b: usize| {
            if swap {
                hist[b * l + a]
            } else {
                hist[a * l + b]
            }
        };
        let mut out = vec![0f64; l * l];
        for i in (0..levels).rev() {
            let mut prefix = 0.0;
            for j in 0..l {
                prefix += get(i + 1, j);
                out[i * l + j] = out[(i + 1) * l + j] + prefix;
            }
        }
        out
    };
    let n_uv = count(false);
    let n_vu = count(true);
    // nu-mass seen by a lattice cell at offset k.
    let w: Vec<f64> = (0..l)
        .map(|k| {
            let kf = k as f64;
            if k == 0 {
                psi.value(step)
            } else {
                psi.value((kf + 1.0) * step) - 2.0 * psi.value(kf * step)
                    + psi.value((kf - 1.0) * step)
            }
        })
        .collect();
    let mut total = 0.0;
    for i in 0..l {
        for k in 0..=i {
            let j = i - k;
            total += w[k] * (n_uv[i * l + j] + n_vu[i * l + j]);
        }
    }
    let value = total * u.cell_volume();
    // Rounding moves |u - v| by at most one step.
    let support = u
        .values()
        .iter()
        .zip(v.values())
        .filter(|(a, b)| **a > 0.0 || **b > 0.0)
        .count() as f64
        * u.cell_volume();
    let budget = psi.derivative(top) * step * support;
    Ok(OracleValue {
        value,
        tolerance: if value > 0.0 { budget / value } else { 0.0 },
    })
}

/// `int Psi(|u - v|)` from level balls: the linear part of `Psi` through
/// `int lambda({u > t} sym.diff. {v > t}) dt`, the rest through the double
/// integral against `nu`.
pub fn levelwise_psi_distance(
    u: &ExtremalSpec,
    v: &ExtremalSpec,
    psi: &YoungFunction,
) -> Result<f64> {
    check_same_dim(u, v)?;
    let mut total = 0.0;
    let slope0 = psi.initial_slope();
    if slope0 > 0.0 {
        total += slope0 * levelwise_symdiff_integral(u, v, |_| 1.0, &[]);
    }
    for (b, mass) in psi.nu_atoms() {
        total += mass * shifted_difference_integral(u, v, b);
    }
    if let YoungFunction::Power { q, coef } = psi {
        if *q > 1.0 {
            total += coef * power_double_integral(u, v, *q);
        }
    }
    Ok(total)
}

/// Lemma-style double integral; requires `Psi'(0) = 0`.
pub fn psi1_oracle_spec(
    u: &ExtremalSpec,
    v: &ExtremalSpec,
    psi: &YoungFunction,
) -> Result<OracleValue> {
    if psi.initial_slope() != 0.0 {
        return Err(Error::NotYoung(
            "the double integral needs Psi'(0) = 0".into(),
        ));
    }
    Ok(OracleValue {
        value: levelwise_psi_distance(u, v, psi)?,
        tolerance: LEVELWISE_TOL,
    })
}

/// Declared relative error of the levelwise quadratures.
pub const LEVELWISE_TOL: f64 = 1e-6;

/// `sum (Psi(max(u, v)) - Psi(min(u, v))) h^n`, which is
/// `int lambda({u > t} sym.diff. {v > t}) Psi'(t) dt` cell by cell.
pub fn psi2_bound_grid(u: &GridField, v: &GridField, psi: &YoungFunction) -> Result<f64> {
    check_same_grid(u, v)?;
    Ok(u.values()
        .iter()
        .zip(v.values())
        .map(|(&a, &b)| psi.value(a.max(b)) - psi.value(a.min(b)))
        .sum::<f64>()
        * u.cell_volume())
}

/// `int lambda({u > t} sym.diff. {v > t}) Psi'(t) dt` from level balls.
pub fn psi2_bound_spec(u: &ExtremalSpec, v: &ExtremalSpec, psi: &YoungFunction) -> Result<f64> {
    check_same_dim(u, v)?;
    Ok(levelwise_symdiff_integral(
        u,
        v,
        |t| psi.derivative(t),
        &psi.kinks(),
    ))
}

/// `lambda_n({u > t} sym.diff. {v > t})` at each height.
pub fn levelwise_symdiff(u: &ExtremalSpec, v: &ExtremalSpec, heights: &[f64]) -> Result<Vec<f64>> {
    check_same_dim(u, v)?;
    Ok(heights.iter().map(|&t| symdiff_at(u, v, t)).collect())
}

/// `{u > t}` as (center, radius); `None` when `t < 0` (the whole space).
fn level(spec: &ExtremalSpec, t: f64) -> Option<(&[f64], f64)> {
    if t < 0.0 {
        return None;
    }
    Some((spec.center_at(t), spec.profile().radius(t)))
}

/// `lambda_n({u > t} \ {v > s})`.
fn level_difference(u: &ExtremalSpec, t: f64, v: &ExtremalSpec, s: f64) -> f64 {
    let Some((cu, ru)) = level(u, t) else {
        return f64::INFINITY;
    };
    if ru <= 0.0 {
        return 0.0;
    }
    let Some((cv, rv)) = level(v, s) else {
        return 0.0;
    };
    ball_difference_unchecked(u.n(), ru, rv, distance(cu, cv))
}

fn symdiff_at(u: &ExtremalSpec, v: &ExtremalSpec, t: f64) -> f64 {
    level_difference(u, t, v, t) + level_difference(v, t, u, t)
}

fn knot_heights(spec: &ExtremalSpec) -> Vec<f64> {
    spec.profile().heights()
}

const OUTER_PANELS: usize = 8;
const INNER_PANELS: usize = 4;

fn levelwise_symdiff_integral<W: Fn(f64) -> f64>(
    u: &ExtremalSpec,
    v: &ExtremalSpec,
    weight: W,
    extra: &[f64],
) -> f64 {
    let top = u.top_height().max(v.top_height());
    let mut breaks = knot_heights(u);
    breaks.extend(knot_heights(v));
    breaks.extend_from_slice(extra);
    quad::piecewise(0.0, top, &breaks, OUTER_PANELS, |t| {
        symdiff_at(u, v, t) * weight(t)
    })
}

/// `int [lambda({u > t} \ {v > t - b}) + lambda({v > t} \ {u > t - b})] dt`
/// `= int (|u - v| - b)_+`.
fn shifted_difference_integral(u: &ExtremalSpec, v: &ExtremalSpec, b: f64) -> f64 {
    let top = u.top_height().max(v.top_height());
    let mut breaks: Vec<f64> = Vec::new();
    for h in knot_heights(u).into_iter().chain(knot_heights(v)) {
        breaks.push(h);
        breaks.push(h + b);
    }
    quad::piecewise(b, top, &breaks, OUTER_PANELS, |t| {
        level_difference(u, t, v, t - b) + level_difference(v, t, u, t - b)
    })
}

/// `int_t int_0^t q (q - 1) s^{q-2} [lambda(U_t \ V_{t-s}) + lambda(V_t \ U_{t-s})] ds dt`.
/// For `q < 2` the inner variable is `y = s^{q-1}`, which makes `dnu = q dy`.
fn power_double_integral(u: &ExtremalSpec, v: &ExtremalSpec, q: f64) -> f64 {
    let top = u.top_height().max(v.top_height());
    let hu = knot_heights(u);
    let hv = knot_heights(v);
    let mut outer_breaks = hu.clone();
    outer_breaks.extend(&hv);
    let all: Vec<f64> = outer_breaks.clone();
    let at = |t: f64| {
        let inner = |s: f64| level_difference(u, t, v, t - s) + level_difference(v, t, u, t - s);
        let s_breaks: Vec<f64> = all
            .iter()
            .map(|h| t - h)
            .filter(|&s| s > 0.0 && s < t)
            .collect();
        if q < 2.0 {
            let e = q - 1.0;
            let y_breaks: Vec<f64> = s_breaks.iter().map(|s| s.powf(e)).collect();
            q * quad::piecewise(0.0, t.powf(e), &y_breaks, INNER_PANELS, |y| {
                inner(y.powf(1.0 / e))
            })
        } else {
            quad::piecewise(0.0, t, &s_breaks, INNER_PANELS, |s| {
                q * (q - 1.0) * s.powf(q - 2.0) * inner(s)
            })
        }
    };
    if q < 2.0 {
        // The inner integral behaves like t^{q-1} near 0; integrate in z = t^{q-1}.
        let e = q - 1.0;
        let z_breaks: Vec<f64> = outer_breaks.iter().map(|t| t.max(0.0).powf(e)).collect();
        quad::piecewise(0.0, top.powf(e), &z_breaks, OUTER_PANELS, |z| {
            let t = z.powf(1.0 / e);
            at(t) * t / (e * z)
        })
    } else {
        quad::piecewise(0.0, top, &outer_breaks, OUTER_PANELS, at)
    }
}

/// Unit-ball constants for a spec.
pub(crate) fn dims_of(spec: &ExtremalSpec) -> DimConstants {
    DimConstants::new(spec.n()).expect("validated dimension")
}

/// Samples `Psi(|u - v|)` on a domain for plotting or checks.
pub fn sample_difference(
    u: &ExtremalSpec,
    v: &ExtremalSpec,
    domain: &Domain,
    resolution: usize,
) -> Result<GridField> {
    check_same_dim(u, v)?;
    GridField::from_function(|x| (u.eval(x) - v.eval(x)).abs(), domain, resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{family_cone, family_cone_frustrum};
    use std::f64::consts::PI;

    #[test]
    fn young_examples() {
        let sq = young_validate(&YoungConfig::Power { power: 2.0 }).unwrap();
        assert!(sq.slope_at_infinity().is_infinite());
        assert!(sq.affine_set().is_empty());
        let pl = YoungFunction::piecewise_linear(
            vec![(0.0, 0.0), (1.0, 0.0), (2.0, 1.0), (3.0, 2.0)],
            Some(2.0),
        )
        .unwrap();
        assert_eq!(pl.slope_at_infinity(), 2.0);
        assert_eq!(
            pl.affine_set(),
            vec![(0.0, 1.0), (1.0, 3.0), (3.0, f64::INFINITY)]
        );
        assert!(!pl.strictly_increasing());
        assert!(matches!(
            YoungFunction::piecewise_linear(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 3.0)], None),
            Err(Error::NotConvex(_))
        ));
        assert!(YoungFunction::piecewise_linear(vec![(0.0, 1.0), (1.0, 2.0)], None).is_err());
        assert!(YoungFunction::piecewise_linear(vec![(0.0, 0.0), (1.0, -1.0)], None).is_err());
        let cfg: YoungConfig =
            serde_json::from_str(r#"{"breakpoints": [[0, 0], [1, 1], [2, 3]], "tail_slope": 3}"#)
                .unwrap();
        let phi = young_validate(&cfg).unwrap();
        assert_eq!(phi.value(3.0), 6.0);
        assert!(phi.in_affine_set(1.5) && !phi.in_affine_set(1.0));
        let s = phi.scaled_argument(2.0);
        assert!((s.value(3.0) - phi.value(1.5)).abs() < 1e-15);
        let p = YoungFunction::power(3.0).unwrap().scaled_argument(2.0);
        assert!((p.value(1.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_examples() {
        let cone = family_cone(2).unwrap();
        let phi = YoungFunction::power(2.0).unwrap();
        assert!((dirichlet_spec(&cone, &phi).unwrap() - PI).abs() < 1e-12);
        let f = family_cone_frustrum(2, 0.5, 0.5, 0.3, &[0.2, 0.0]).unwrap();
        assert_eq!(
            dirichlet_spec(&f, &phi).unwrap(),
            dirichlet_spec(&f.rearranged(), &phi).unwrap()
        );
    }

    #[test]
    fn levelwise_cone_against_zero() {
        let cone = family_cone(2).unwrap();
        let zero = crate::extremal::build_extremal(
            crate::rearrangement::RadialProfile::zero(2),
            crate::measure::CenterPath::constant(vec![0.0, 0.0]),
        )
        .unwrap();
        let lin = YoungFunction::power(1.0).unwrap();
        assert!((levelwise_psi_distance(&cone, &zero, &lin).unwrap() - PI / 3.0).abs() < 1e-10);
        let sq = YoungFunction::power(2.0).unwrap();
        let o = psi1_oracle_spec(&cone, &zero, &sq).unwrap();
        assert!((o.value - PI / 6.0).abs() < 1e-8, "{}", o.value);
        let q15 = YoungFunction::power(1.5).unwrap();
        // int (1-|x|)^{3/2} dx = 2 pi B(2, 5/2) = 2 pi * 4/35
        let exact = 2.0 * PI * 4.0 / 35.0;
        let got = levelwise_psi_distance(&cone, &zero, &q15).unwrap();
        assert!((got - exact).abs() < 1e-6, "{got} {exact}");
        assert!(psi1_oracle_spec(&cone, &zero, &lin).is_err());
    }

    #[test]
    fn levelwise_matches_volume_on_frustrum_pair() {
        let f = family_cone_frustrum(2, 0.5, 0.5, 0.3, &[0.2, 0.0]).unwrap();
        let g = f.aligned_rearrangement();
        for psi in [
            YoungFunction::power(1.0).unwrap(),
            YoungFunction::power(2.0).unwrap(),
            YoungFunction::power(1.5).unwrap(),
            YoungFunction::piecewise_linear(vec![(0.0, 0.0), (0.05, 0.0), (0.1, 0.05)], None)
                .unwrap(),
        ] {
            let lw = levelwise_psi_distance(&f, &g, &psi).unwrap();
            let vol = psi_distance_spec(&f, &g, &psi, Some(1024)).unwrap();
            assert!((lw / vol - 1.0).abs() < 5e-3, "{psi:?}: {lw} vs {vol}");
            let b = psi2_bound_spec(&f, &g, &psi).unwrap();
            assert!(lw <= b * (1.0 + 1e-9));
        }
        let lin = YoungFunction::power(1.0).unwrap();
        let a = levelwise_psi_distance(&f, &g, &lin).unwrap();
        let b = psi2_bound_spec(&f, &g, &lin).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn translated_cones_l1_matches_symdiff() {
        let cone = family_cone(2).unwrap();
        let moved = cone.translate(&[0.2, 0.0]).unwrap();
        let lin = YoungFunction::power(1.0).unwrap();
        let d = levelwise_psi_distance(&cone, &moved, &lin).unwrap();
        let by_geometry = quad::piecewise(0.0, 1.0, &[], 64, |t| {
            crate::geometry::ball_symdiff_volume(2, (1.0 - t).max(1e-300), 0.2).unwrap()
        });
        assert!((d - by_geometry).abs() < 1e-6);
        let sq = YoungFunction::power(2.0).unwrap();
        assert!(
            levelwise_psi_distance(&cone, &moved, &sq).unwrap()
                < psi2_bound_spec(&cone, &moved, &sq).unwrap()
        );
    }

    #[test]
    fn grid_oracle_matches_direct() {
        let f = family_cone_frustrum(2, 0.5, 0.5, 0.3, &[0.2, 0.0]).unwrap();
        let u = f.sample(256).unwrap();
        let v = f.rearranged().translate(&[-0.1, 0.05]).unwrap();
        let v = GridField::from_function(
            |x| v.eval(x),
            &Domain {
                lo: u.origin().to_vec(),
                hi: u
                    .origin()
                    .iter()
                    .map(|o| o + u.dims()[0] as f64 * u.spacing())
                    .collect(),
            },
            u.dims()[0],
        )
        .unwrap();
        for psi in [
            YoungFunction::power(2.0).unwrap(),
            YoungFunction::power(3.0).unwrap(),
        ] {
            let direct = psi_distance_grid(&u, &v, &psi).unwrap();
            let oracle = psi1_oracle_grid(&u, &v, &psi, 1024).unwrap();
            assert!(
                (oracle.value / direct - 1.0).abs() < 0.01,
                "{direct} {oracle:?}"
            );
            assert!(direct <= psi2_bound_grid(&u, &v, &psi).unwrap());
        }
        assert_eq!(
            psi_distance_grid(&u, &u, &YoungFunction::power(2.0).unwrap()).unwrap(),
            0.0
        );
        assert_eq!(
            psi1_oracle_grid(&u, &u, &YoungFunction::power(2.0).unwrap(), 64)
                .unwrap()
                .value,
            0.0
        );
    }
}
