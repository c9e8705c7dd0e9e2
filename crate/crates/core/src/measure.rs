//! The measure induced by the distribution function, its decomposition,
//! the critical set, the radius function and the centers of level balls.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::{increment, GridField};
use crate::geometry::DimConstants;
use crate::rearrangement::RadialProfile;

/// Largest isoperimetric-type ratio accepted for a level set to count as a ball.
pub const BALL_TEST_LIMIT: f64 = 1.1;

/// Level sets with fewer cells than this are too coarse for the ball test.
pub const BALL_TEST_MIN_CELLS: usize = 24;

/// Where a distribution function came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Cell counts of a grid field.
    Empirical {
        ess_sup: f64,
        /// `lambda_n({u = max})`, i.e. `F(ess sup-)`.
        top_plateau_mass: f64,
        top_plateau_cells: usize,
    },
    /// Exact, from a radial profile: `F = omega_n r^n`.
    Analytic { profile: RadialProfile },
}

/// `F(t) = lambda_n({u > t})` sampled at increasing thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistFn {
    pub n: usize,
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl DistFn {
    /// Tabulates `f` at `thresholds`, treating the result as grid data.
    pub fn empirical<F: Fn(f64) -> f64>(
        n: usize,
        thresholds: Vec<f64>,
        f: F,
        ess_sup: f64,
    ) -> Self {
        let values = thresholds
            .iter()
            .map(|&t| if t >= ess_sup { 0.0 } else { f(t) })
            .collect();
        Self {
            n,
            thresholds,
            values,
            provenance: Provenance::Empirical {
                ess_sup,
                top_plateau_mass: 0.0,
                top_plateau_cells: 0,
            },
        }
    }

    /// Exact distribution function of the function with the given profile,
    /// tabulated at `thresholds` for export.
    pub fn from_profile(profile: &RadialProfile, thresholds: &[f64]) -> Self {
        let c = DimConstants::new(profile.n()).expect("profile dimension >= 1");
        Self {
            n: profile.n(),
            thresholds: thresholds.to_vec(),
            values: thresholds
                .iter()
                .map(|&t| c.ball_volume(profile.radius(t)))
                .collect(),
            provenance: Provenance::Analytic {
                profile: profile.clone(),
            },
        }
    }

    pub fn ess_sup(&self) -> f64 {
        match &self.provenance {
            Provenance::Empirical { ess_sup, .. } => *ess_sup,
            Provenance::Analytic { profile } => profile.top_height(),
        }
    }

    pub fn profile(&self) -> Option<&RadialProfile> {
        match &self.provenance {
            Provenance::Analytic { profile } => Some(profile),
            Provenance::Empirical { .. } => None,
        }
    }

    /// `F(t)`: exact for analytic provenance, linear interpolation between
    /// thresholds otherwise.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.provenance {
            Provenance::Analytic { profile } => ball(self.n, profile.radius(t)),
            Provenance::Empirical {
                ess_sup,
                top_plateau_mass,
                ..
            } => {
                if t >= *ess_sup || self.thresholds.is_empty() {
                    return 0.0;
                }
                let th = &self.thresholds;
                if t <= th[0] {
                    return self.values[0];
                }
                let i = th.partition_point(|&x| x <= t);
                let (t0, f0) = (th[i - 1], self.values[i - 1]);
                let (t1, f1) = if i < th.len() {
                    (th[i], self.values[i])
                } else {
                    (*ess_sup, *top_plateau_mass)
                };
                if t1 <= t0 {
                    return f0;
                }
                f0 + (t - t0) / (t1 - t0) * (f1 - f0)
            }
        }
    }

    /// `F(t-) = lambda_n({u >= t})`.
    pub fn eval_left(&self, t: f64) -> f64 {
        match &self.provenance {
            Provenance::Analytic { profile } => ball(self.n, profile.radius_left(t)),
            Provenance::Empirical {
                ess_sup,
                top_plateau_mass,
                ..
            } => {
                if t == *ess_sup {
                    *top_plateau_mass
                } else {
                    self.eval(t)
                }
            }
        }
    }
}

fn ball(n: usize, r: f64) -> f64 {
    DimConstants::new(n).expect("n >= 1").ball_volume(r)
}

/// A point mass of `mu` at height `height`, i.e. a plateau of `u*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jump {
    pub height: f64,
    /// The height is only known to lie in `(lo, hi]` (grid provenance).
    pub lo: f64,
    pub hi: f64,
    /// `F(a-) - F(a)`.
    pub mass: f64,
    /// Stands in for singular-continuous mass of a depth-truncated profile.
    pub surrogate: bool,
}

/// The plateau at `ess sup u`, which `mu` leaves out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopPlateau {
    pub mass: f64,
    pub cells: Option<usize>,
    /// Several grid cells share the maximum: either a genuine plateau or a
    /// discretization artifact. Flagged, not decided.
    pub flagged: bool,
}

/// `mu = mu^ac + mu^s` with `mu^s` split into point masses and a
/// singular-continuous part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureDecomposition {
    pub n: usize,
    pub ess_sup: f64,
    pub thresholds: Vec<f64>,
    /// Average of `-F'` over each threshold interval, jumps removed.
    pub ac_density: Vec<f64>,
    /// Point masses in `(0, ess sup)`, including surrogate ones.
    pub jumps: Vec<Jump>,
    /// `mu^s((t, ess sup))` restricted to the singular-continuous part, at
    /// each threshold. Analytic provenance only.
    pub singular_continuous: Option<Vec<f64>>,
    /// `F^s(t) = mu^s((t, ess sup))` at each threshold.
    pub f_s: Vec<f64>,
    /// `F(0+) - F(ess sup-)`.
    pub total_mass: f64,
    pub ac_mass: f64,
    pub jump_mass: f64,
    pub singular_continuous_mass: f64,
    pub top_plateau: TopPlateau,
    /// The jump threshold used (grid provenance).
    pub jump_tol: Option<f64>,
}

impl MeasureDecomposition {
    /// `F^s(t) = mu^s((t, ess sup))`, from the jump list.
    pub fn f_s_at(&self, t: f64) -> f64 {
        self.jumps
            .iter()
            .filter(|j| j.height > t)
            .map(|j| j.mass)
            .sum()
    }

    /// `mu^s((s, t])`.
    pub fn singular_mass_between(&self, s: f64, t: f64) -> f64 {
        self.jumps
            .iter()
            .filter(|j| j.height > s && j.height <= t)
            .map(|j| j.mass)
            .sum()
    }

    /// `mu^s((0, ess sup))`.
    pub fn singular_mass(&self) -> f64 {
        self.jump_mass + self.singular_continuous_mass
    }

    /// Heights carrying singular mass (the set `S` minus heights where only
    /// the density fails to be differentiable).
    pub fn singular_heights(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.height).collect()
    }

    /// Heights carrying singular-continuous mass. These are what the
    /// approximating sequence slices away; genuine plateaus stay.
    pub fn singular_continuous_heights(&self) -> Vec<f64> {
        self.jumps
            .iter()
            .filter(|j| j.surrogate)
            .map(|j| j.height)
            .collect()
    }

    /// `|ac + jumps + singular continuous - total|`.
    pub fn conservation_error(&self) -> f64 {
        (self.ac_mass + self.jump_mass + self.singular_continuous_mass - self.total_mass).abs()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Decomposes `mu`. Analytic distribution functions are split exactly; for
/// grid data a drop of `F` across one threshold interval larger than
/// `jump_tol` is read as a plateau. The default `jump_tol` is four times the
/// largest typical AC mass per interval (a running median of the drops).
pub fn decompose(dist: &DistFn, jump_tol: Option<f64>) -> Result<MeasureDecomposition> {
    match &dist.provenance {
        Provenance::Analytic { profile } => Ok(decompose_profile(dist, profile)),
        Provenance::Empirical {
            ess_sup,
            top_plateau_mass,
            top_plateau_cells,
        } => decompose_empirical(
            dist,
            *ess_sup,
            *top_plateau_mass,
            *top_plateau_cells,
            jump_tol,
        ),
    }
}

fn decompose_profile(dist: &DistFn, profile: &RadialProfile) -> MeasureDecomposition {
    let n = dist.n;
    let jumps: Vec<Jump> = profile
        .interior_jumps()
        .map(|k| Jump {
            height: k.t,
            lo: k.t,
            hi: k.t,
            mass: ball(n, k.r_minus) - ball(n, k.r_plus),
            surrogate: k.surrogate,
        })
        .collect();
    let top = profile.top_height();
    let top_mass = ball(n, profile.top_plateau_radius());
    let total_mass = (ball(n, profile.support_radius()) - top_mass).max(0.0);
    let jump_mass: f64 = jumps.iter().filter(|j| !j.surrogate).map(|j| j.mass).sum();
    let sc_mass: f64 = jumps.iter().filter(|j| j.surrogate).map(|j| j.mass).sum();
    let ac_mass = profile
        .segments()
        .map(|s| ball(n, s.r0) - ball(n, s.r1))
        .sum::<f64>();
    let th = &dist.thresholds;
    let ac_density = th
        .windows(2)
        .map(|w| {
            let drop = dist.eval(w[0]) - dist.eval(w[1]);
            let singular: f64 = jumps
                .iter()
                .filter(|j| j.height > w[0] && j.height <= w[1])
                .map(|j| j.mass)
                .sum();
            ((drop - singular) / (w[1] - w[0])).max(0.0)
        })
        .collect();
    let f_s_at = |t: f64| -> f64 { jumps.iter().filter(|j| j.height > t).map(|j| j.mass).sum() };
    let sc_at = |t: f64| -> f64 {
        jumps
            .iter()
            .filter(|j| j.surrogate && j.height > t)
            .map(|j| j.mass)
            .sum()
    };
    MeasureDecomposition {
        n,
        ess_sup: top,
        thresholds: th.clone(),
        ac_density,
        f_s: th.iter().map(|&t| f_s_at(t)).collect(),
        singular_continuous: Some(th.iter().map(|&t| sc_at(t)).collect()),
        jumps,
        total_mass,
        ac_mass,
        jump_mass,
        singular_continuous_mass: sc_mass,
        top_plateau: TopPlateau {
            mass: top_mass,
            cells: None,
            flagged: top_mass > 0.0,
        },
        jump_tol: None,
    }
}

fn median3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).min(a.min(b).max(c))
}

fn decompose_empirical(
    dist: &DistFn,
    ess_sup: f64,
    top_mass: f64,
    top_cells: usize,
    jump_tol: Option<f64>,
) -> Result<MeasureDecomposition> {
    let th = &dist.thresholds;
    let f = &dist.values;
    if th.len() < 2 {
        return Err(invalid("need at least two thresholds"));
    }
    if f.windows(2).any(|w| w[1] > w[0]) {
        return Err(invalid("distribution function must be nonincreasing"));
    }
    let m = th.len() - 1;
    let mut drops: Vec<f64> = f.windows(2).map(|w| w[0] - w[1]).collect();
    // The top plateau sits at the last threshold when it equals the maximum;
    // it is not part of mu.
    if th[m] >= ess_sup {
        drops[m - 1] = (drops[m - 1] - top_mass).max(0.0);
    }
    let at = |i: isize| -> f64 {
        if i < 0 || i as usize >= drops.len() {
            0.0
        } else {
            drops[i as usize]
        }
    };
    let typical = (0..m as isize)
        .map(|i| median3(at(i - 1), at(i), at(i + 1)))
        .fold(0.0, f64::max);
    let tol = match jump_tol {
        Some(tol) => {
            if tol < 2.0 * typical {
                let (i, mass) = drops
                    .iter()
                    .cloned()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("nonempty");
                return Err(Error::UnresolvedJump {
                    height: th[i + 1],
                    jump_tol: tol,
                    mass,
                });
            }
            tol
        }
        None => 4.0 * typical,
    };
    let mut jumps = Vec::new();
    let mut ac_density = Vec::with_capacity(m);
    for i in 0..m {
        let d = drops[i];
        let mut ac = d;
        if d > tol && d > 0.0 {
            let base = 0.5 * (at(i as isize - 1) + at(i as isize + 1));
            let mass = (d - base).max(0.0).min(d);
            ac = d - mass;
            jumps.push(Jump {
                height: 0.5 * (th[i] + th[i + 1]),
                lo: th[i],
                hi: th[i + 1],
                mass,
                surrogate: false,
            });
        }
        ac_density.push(ac / (th[i + 1] - th[i]));
    }
    let jump_mass: f64 = jumps.iter().map(|j| j.mass).sum();
    let ac_mass: f64 = ac_density
        .iter()
        .zip(th.windows(2))
        .map(|(a, w)| a * (w[1] - w[0]))
        .sum();
    let f_s = th
        .iter()
        .map(|&t| jumps.iter().filter(|j| j.height > t).map(|j| j.mass).sum())
        .collect();
    let f0 = if th[0] <= 0.0 { f[0] } else { dist.eval(0.0) };
    Ok(MeasureDecomposition {
        n: dist.n,
        ess_sup,
        thresholds: th.clone(),
        ac_density,
        jumps,
        singular_continuous: None,
        f_s,
        total_mass: (f0 - top_mass).max(0.0),
        ac_mass,
        jump_mass,
        singular_continuous_mass: 0.0,
        top_plateau: TopPlateau {
            mass: top_mass,
            cells: Some(top_cells),
            flagged: top_cells > 1,
        },
        jump_tol: Some(tol),
    })
}

/// `C = {0 < u < ess sup u, grad u = 0}`: a cell mask on grids, a measure
/// for analytic extremals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalSet {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<bool>>,
    pub measure: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl CriticalSet {
    pub fn analytic(measure: f64) -> Self {
        Self {
            mask: None,
            measure,
            eps: None,
        }
    }
}

/// Cells with `0 < u < max` and finite-difference `|grad u| < eps`.
pub fn critical_set(field: &GridField, eps: f64) -> Result<CriticalSet> {
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    let max = field.max_value();
    let grads = field.gradient_magnitudes();
    let mask: Vec<bool> = field
        .values()
        .iter()
        .zip(&grads)
        .map(|(&v, &g)| v > 0.0 && v < max && g < eps)
        .collect();
    let count = mask.iter().filter(|&&b| b).count();
    Ok(CriticalSet {
        mask: Some(mask),
        measure: count as f64 * field.cell_volume(),
        eps: Some(eps),
    })
}

/// `R(x) = (F(u(x)) / omega_n)^{1/n}` at every cell. Cells where `u = 0`
/// get the support radius.
pub fn radius_function(field: &GridField, dist: &DistFn) -> Result<GridField> {
    if dist.n != field.n() {
        return Err(Error::Incompatible(
            "distribution function dimension differs from field".into(),
        ));
    }
    let c = DimConstants::new(field.n())?;
    let values = field
        .values()
        .iter()
        .map(|&v| c.volume_radius(dist.eval(v)))
        .collect();
    Ok(field.with_values(values))
}

/// Centers `xi_t` of the level balls `{u > t}` and the limit center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterPath {
    /// Increasing heights; `centers[i]` holds on `[heights[i], heights[i+1])`.
    pub heights: Vec<f64>,
    pub centers: Vec<Vec<f64>>,
    pub xi_infinity: Vec<f64>,
}

impl CenterPath {
    /// A path with a single center for all heights.
    pub fn constant(center: Vec<f64>) -> Self {
        Self {
            heights: vec![0.0],
            centers: vec![center.clone()],
            xi_infinity: center,
        }
    }

    pub fn dim(&self) -> usize {
        self.xi_infinity.len()
    }

    /// `xi_t`, right-continuous in `t`.
    pub fn center_at(&self, t: f64) -> &[f64] {
        let i = self.heights.partition_point(|&h| h <= t).saturating_sub(1);
        &self.centers[i]
    }

    /// Total variation `||D xi||` of the piecewise-constant path.
    pub fn total_variation(&self) -> f64 {
        self.centers
            .windows(2)
            .map(|w| distance(&w[0], &w[1]))
            .sum()
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Shape statistic of a cell set: 1 for a ball, larger otherwise.
///
/// In 2D this is `perimeter^2 / (4 pi area)` with the perimeter of the
/// level curve from marching squares; in 1D and 3D it is the second moment
/// about the centroid divided by that of the ball of equal volume.
pub fn ball_ratio(field: &GridField, t: f64) -> Option<f64> {
    let inside: Vec<bool> = field.values().iter().map(|&v| v > t).collect();
    let count = inside.iter().filter(|&&b| b).count();
    if count == 0 {
        return None;
    }
    let vol = count as f64 * field.cell_volume();
    if field.n() == 2 {
        let perimeter = contour_length(field, t);
        return Some(perimeter * perimeter / (4.0 * std::f64::consts::PI * vol));
    }
    let n = field.n();
    let centroid = centroid_of(field, &inside);
    let mut moment = 0.0;
    for (k, &b) in inside.iter().enumerate() {
        if b {
            let c = field.cell_center(k);
            moment += c
                .iter()
                .zip(&centroid)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>();
        }
    }
    moment *= field.cell_volume();
    let r = DimConstants::new(n).ok()?.volume_radius(vol);
    let ball_moment = vol * r * r * n as f64 / (n as f64 + 2.0);
    // The grid adds h^2/12 per axis to the second moment of any cell set.
    let cell_term = vol * n as f64 * field.spacing().powi(2) / 12.0;
    Some(moment / (ball_moment + cell_term))
}

fn centroid_of(field: &GridField, inside: &[bool]) -> Vec<f64> {
    let n = field.n();
    let mut sum = vec![0.0; n];
    let mut count = 0usize;
    let mut idx = vec![0usize; n];
    for &b in inside {
        if b {
            for a in 0..n {
                sum[a] += field.origin()[a] + (idx[a] as f64 + 0.5) * field.spacing();
            }
            count += 1;
        }
        increment(&mut idx, field.dims());
    }
    sum.iter().map(|s| s / count.max(1) as f64).collect()
}

/// Length of the level curve `{u = t}` of a 2D field, marching squares over
/// the dual grid of cell centers with linear interpolation along edges.
fn contour_length(field: &GridField, t: f64) -> f64 {
    let (rows, cols) = (field.dims()[0], field.dims()[1]);
    let v = field.values();
    let h = field.spacing();
    let at = |i: usize, j: usize| v[i * cols + j];
    let mut total = 0.0;
    // Crossings whose outside sample sits exactly on the level carry no
    // sub-cell position; when they dominate, the set is a union of cells and
    // its length is estimated from the staircase instead (Cauchy-Crofton:
    // a staircase is 4/pi times longer than the curve on average).
    let (mut sharp, mut crossings, mut faces) = (0usize, 0usize, 0usize);
    for i in 0..rows {
        for j in 0..cols {
            let a = at(i, j) > t;
            if i + 1 < rows && a != (at(i + 1, j) > t) {
                faces += 1;
            }
            if j + 1 < cols && a != (at(i, j + 1) > t) {
                faces += 1;
            }
        }
    }
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            // Corners counterclockwise: (i,j), (i,j+1), (i+1,j+1), (i+1,j).
            let c = [at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j)];
            let pos = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)];
            let ins: Vec<bool> = c.iter().map(|&x| x > t).collect();
            let n_in = ins.iter().filter(|&&b| b).count();
            if n_in == 0 || n_in == 4 {
                continue;
            }
            let cross = |e: usize| -> (f64, f64) {
                let (a, b) = (e, (e + 1) % 4);
                let s = ((c[a] - t) / (c[a] - c[b])).clamp(0.0, 1.0);
                (
                    pos[a].0 + s * (pos[b].0 - pos[a].0),
                    pos[a].1 + s * (pos[b].1 - pos[a].1),
                )
            };
            let crossing: Vec<usize> = (0..4).filter(|&e| ins[e] != ins[(e + 1) % 4]).collect();
            crossings += crossing.len();
            sharp += crossing
                .iter()
                .filter(|&&e| c[e] == t || c[(e + 1) % 4] == t)
                .count();
            let seg =
                |p: (f64, f64), q: (f64, f64)| ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
            if crossing.len() == 2 {
                total += seg(cross(crossing[0]), cross(crossing[1]));
            } else {
                // Saddle: pair edges according to the value at the center.
                let center_in = c.iter().sum::<f64>() / 4.0 > t;
                let p: Vec<(f64, f64)> = (0..4).map(cross).collect();
                if center_in == ins[0] {
                    total += seg(p[0], p[1]) + seg(p[2], p[3]);
                } else {
                    total += seg(p[3], p[0]) + seg(p[1], p[2]);
                }
            }
        }
    }
    if 2 * sharp > crossings {
        return faces as f64 * h * std::f64::consts::FRAC_PI_4;
    }
    total * h
}

/// Centers of `{u > t}` for a grid extremal: centroids per threshold, after
/// a ball test at every level set large enough to resolve its shape.
/// `xi_inf` is the centroid of the smallest nonempty thresholded level set.
pub fn center_path(field: &GridField, thresholds: &[f64]) -> Result<CenterPath> {
    if thresholds.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("thresholds must be strictly increasing"));
    }
    let max = field.max_value();
    let mut heights = Vec::new();
    let mut centers = Vec::new();
    for &t in thresholds {
        let inside: Vec<bool> = field.values().iter().map(|&v| v > t).collect();
        let count = inside.iter().filter(|&&b| b).count();
        if count == 0 {
            break;
        }
        if count >= BALL_TEST_MIN_CELLS {
            if let Some(ratio) = ball_ratio(field, t) {
                if ratio > BALL_TEST_LIMIT {
                    return Err(Error::NotABall {
                        height: t,
                        ratio,
                        limit: BALL_TEST_LIMIT,
                    });
                }
            }
        }
        heights.push(t);
        centers.push(centroid_of(field, &inside));
    }
    let xi_infinity = match centers.last() {
        Some(c) => c.clone(),
        None => {
            if max <= 0.0 {
                return Err(invalid("zero field has no level balls"));
            }
            let inside: Vec<bool> = field.values().iter().map(|&v| v >= max).collect();
            centroid_of(field, &inside)
        }
    };
    if heights.is_empty() {
        heights.push(0.0);
        centers.push(xi_infinity.clone());
    }
    Ok(CenterPath {
        heights,
        centers,
        xi_infinity,
    })
}

/// `(mu^s((s, t]) / omega_n)^{1/n}` bounds `|xi_s - xi_t|`; without heights,
/// `(lambda_n(C) / omega_n)^{1/n}` with `lambda_n(C) = mu^s((0, ess sup))`
/// bounds the total variation of the center path.
pub fn center_variation_bound(
    decomposition: &MeasureDecomposition,
    heights: Option<(f64, f64)>,
) -> Result<f64> {
    let c = DimConstants::new(decomposition.n)?;
    let mass = match heights {
        Some((s, t)) => {
            if !(s < t) {
                return Err(invalid("need s < t"));
            }
            decomposition.singular_mass_between(s, t)
        }
        None => decomposition.singular_mass(),
    };
    Ok(c.volume_radius(mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Domain;
    use crate::rearrangement::ProfileKnot;
    use std::f64::consts::PI;

    fn norm(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn frustrum_profile() -> RadialProfile {
        RadialProfile::new(
            2,
            vec![
                ProfileKnot::continuous(0.0, 1.0),
                ProfileKnot::new(0.5, 0.5, 0.3),
                ProfileKnot::new(1.0, 0.0, 0.0),
            ],
        )
        .unwrap()
    }

    fn frustrum_field(e: f64, res: usize) -> GridField {
        GridField::from_function(
            |x| {
                let r0 = norm(x);
                let r1 = norm(&[x[0] - e, x[1]]);
                if r1 < 0.3 {
                    0.5 + 0.5 * (1.0 - r1 / 0.3)
                } else if r0 < 0.5 {
                    0.5
                } else {
                    (1.0 - r0).max(0.0)
                }
            },
            &Domain::cube(2, 1.25),
            res,
        )
        .unwrap()
    }

    #[test]
    fn cone_decomposition() {
        let d = DistFn::empirical(
            2,
            (0..=256).map(|i| i as f64 / 256.0).collect(),
            |t| PI * (1.0 - t).powi(2),
            1.0,
        );
        let m = decompose(&d, None).unwrap();
        assert!(m.jumps.is_empty());
        assert!(m.f_s.iter().all(|&v| v == 0.0));
        let mid = 0.5 * (m.thresholds[100] + m.thresholds[101]);
        assert!((m.ac_density[100] - 2.0 * PI * (1.0 - mid)).abs() < 1e-3);
        assert!(m.conservation_error() < 1e-12);
    }

    #[test]
    fn frustrum_has_one_jump() {
        let d = DistFn::from_profile(&frustrum_profile(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = decompose(&d, None).unwrap();
        assert_eq!(m.jumps.len(), 1);
        assert!((m.jumps[0].mass - 0.16 * PI).abs() < 1e-12);
        assert!((m.jumps[0].mass - 0.50265).abs() < 1e-5);
        assert!(m.conservation_error() < 1e-12);
        assert!((center_variation_bound(&m, Some((0.3, 0.7))).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(center_variation_bound(&m, Some((0.6, 0.7))).unwrap(), 0.0);
    }

    #[test]
    fn grid_frustrum_jump_and_critical_set() {
        let u = frustrum_field(0.2, 512);
        let d = u.distribution_function(&u.default_thresholds(512)).unwrap();
        let m = decompose(&d, None).unwrap();
        assert_eq!(m.jumps.len(), 1, "{:?}", m.jumps);
        assert!((m.jumps[0].mass / (0.16 * PI) - 1.0).abs() < 0.03);
        assert!(m.conservation_error() < 1e-9);
        let c = critical_set(&u, 0.6).unwrap();
        assert!(
            (c.measure / (0.16 * PI) - 1.0).abs() < 0.05,
            "{}",
            c.measure
        );
    }

    #[test]
    fn flat_distribution_has_no_jumps() {
        let sq = GridField::from_function(
            |x| if norm(x) < 0.5 { 1.0 } else { 0.0 },
            &Domain::cube(2, 1.0),
            64,
        )
        .unwrap();
        let d = sq
            .distribution_function(&sq.default_thresholds(32))
            .unwrap();
        let m = decompose(&d, None).unwrap();
        assert!(m.jumps.is_empty());
        assert!(m.top_plateau.flagged);
        assert!(m.total_mass.abs() < 1e-12);
    }

    #[test]
    fn jump_tol_below_resolution_is_rejected() {
        let d = DistFn::empirical(
            2,
            (0..=64).map(|i| i as f64 / 64.0).collect(),
            |t| PI * (1.0 - t).powi(2),
            1.0,
        );
        assert!(matches!(
            decompose(&d, Some(1e-6)),
            Err(Error::UnresolvedJump { .. })
        ));
    }

    #[test]
    fn cone_critical_set_vanishes() {
        let u = GridField::from_function(|x| (1.0 - norm(x)).max(0.0), &Domain::cube(2, 1.5), 256)
            .unwrap();
        let c = critical_set(&u, 0.1).unwrap();
        assert!(c.measure < 1e-3);
        let z = GridField::from_function(|_| 0.0, &Domain::cube(2, 1.0), 16).unwrap();
        assert_eq!(critical_set(&z, 0.1).unwrap().measure, 0.0);
    }

    #[test]
    fn cone_radius_function() {
        let u = GridField::from_function(|x| (1.0 - norm(x)).max(0.0), &Domain::cube(2, 1.5), 256)
            .unwrap();
        let d = u.distribution_function(&u.default_thresholds(512)).unwrap();
        let r = radius_function(&u, &d).unwrap();
        for (k, &v) in u.values().iter().enumerate() {
            let x = u.cell_center(k);
            let rad = norm(&x);
            if v > 0.0 && rad > 0.2 {
                assert!((r.values()[k] / rad - 1.0).abs() < 0.02, "{rad}");
            }
            if v == 0.0 {
                assert!((r.values()[k] - 1.0).abs() < 0.02);
            }
        }
    }

    #[test]
    fn grid_center_paths() {
        let cone =
            GridField::from_function(|x| (1.0 - norm(x)).max(0.0), &Domain::cube(2, 1.5), 128)
                .unwrap();
        let p = center_path(&cone, &cone.default_thresholds(32)).unwrap();
        assert!(norm(&p.xi_infinity) < 1e-9);
        let u = frustrum_field(0.2, 256);
        let p = center_path(&u, &u.default_thresholds(64)).unwrap();
        assert!(norm(p.center_at(0.3)) < 0.01);
        assert!((p.center_at(0.7)[0] - 0.2).abs() < 0.01);
        assert!((p.xi_infinity[0] - 0.2).abs() < 0.01);
        let two = GridField::from_function(
            |x| {
                (0.5 - norm(&[x[0] - 0.8, x[1]])).max(0.0)
                    + (0.5 - norm(&[x[0] + 0.8, x[1]])).max(0.0)
            },
            &Domain::cube(2, 1.5),
            128,
        )
        .unwrap();
        assert!(matches!(
            center_path(&two, &two.default_thresholds(16)),
            Err(Error::NotABall { .. })
        ));
    }

    #[test]
    fn ball_ratio_in_one_and_three_dimensions() {
        let bump1 =
            GridField::from_function(|x| (1.0 - x[0].abs()).max(0.0), &Domain::cube(1, 1.5), 256)
                .unwrap();
        assert!((ball_ratio(&bump1, 0.2).unwrap() - 1.0).abs() < 0.02);
        let two1 = GridField::from_function(
            |x| (0.3 - (x[0] - 0.6).abs()).max(0.0) + (0.3 - (x[0] + 0.6).abs()).max(0.0),
            &Domain::cube(1, 1.5),
            256,
        )
        .unwrap();
        assert!(ball_ratio(&two1, 0.1).unwrap() > 1.5);
        let ball3 =
            GridField::from_function(|x| (1.0 - norm(x)).max(0.0), &Domain::cube(3, 1.25), 48)
                .unwrap();
        assert!((ball_ratio(&ball3, 0.3).unwrap() - 1.0).abs() < 0.05);
    }
}
