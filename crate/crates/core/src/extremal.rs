//! Exact extremals: a radial profile `t -> r(t)` together with the centers
//! `xi_t` of the level balls, so that `{u > t} = B(xi_t, r(t))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{Domain, GridField};
use crate::geometry::DimConstants;
use crate::measure::{decompose, distance, CenterPath, CriticalSet, DistFn, MeasureDecomposition};
use crate::quad;
use crate::rearrangement::{ProfileKnot, RadialProfile, SliceSet};

/// Slack allowed in the nestedness check, relative to the radii involved.
const NEST_TOL: f64 = 1e-12;

/// How a spec was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Custom,
    Cone,
    ConeFrustrum {
        a: f64,
        rho: f64,
        rho_inner: f64,
        e: Vec<f64>,
    },
    Staircase {
        levels: Vec<(f64, f64)>,
    },
    DevilsStaircase {
        depth: u32,
        weight: f64,
    },
}

/// A validated extremal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ExtremalSpec {
    n: usize,
    profile: RadialProfile,
    centers: SpecCenters,
    family: Family,
}

/// Serialized form of the center path: one center per piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpecCenters {
    heights: Vec<f64>,
    centers: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawSpec {
    n: usize,
    profile: RadialProfile,
    centers: SpecCenters,
    family: Family,
}

impl TryFrom<RawSpec> for ExtremalSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        if raw.profile.n() != raw.n {
            return Err(invalid("profile dimension differs from spec dimension"));
        }
        let profile = RadialProfile::new(raw.n, raw.profile.knots().to_vec())?;
        let path = path_from(raw.centers.heights, raw.centers.centers)?;
        let mut spec = build_extremal(profile, path)?;
        spec.family = raw.family;
        Ok(spec)
    }
}

fn path_from(heights: Vec<f64>, centers: Vec<Vec<f64>>) -> Result<CenterPath> {
    if heights.len() != centers.len() || heights.is_empty() {
        return Err(invalid("center path needs one center per height"));
    }
    let xi_infinity = centers.last().expect("nonempty").clone();
    Ok(CenterPath {
        heights,
        centers,
        xi_infinity,
    })
}

/// Validates a profile and center path as an extremal.
///
/// Centers may move only at heights where `r` jumps, and by at most the size
/// of the jump; then `|xi_s - xi_t| <= r(s) - r(t)` for all `s < t`.
pub fn build_extremal(profile: RadialProfile, centers: CenterPath) -> Result<ExtremalSpec> {
    let n = profile.n();
    if centers.heights.len() != centers.centers.len() || centers.heights.is_empty() {
        return Err(invalid("center path needs one center per height"));
    }
    if centers.centers.iter().any(|c| c.len() != n) {
        return Err(invalid(format!("centers must have {n} coordinates")));
    }
    if centers.centers.iter().flatten().any(|x| !x.is_finite()) {
        return Err(invalid("centers must be finite"));
    }
    if centers.heights[0] != 0.0 {
        return Err(invalid("center path must start at height 0"));
    }
    if centers.heights.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("center heights must be strictly increasing"));
    }
    let top = profile.top_height();
    for i in 1..centers.heights.len() {
        let h = centers.heights[i];
        let knot = profile
            .knots()
            .iter()
            .find(|k| k.t == h)
            .filter(|k| h < top && k.r_minus > k.r_plus);
        let Some(knot) = knot else {
            return Err(Error::CenterJumpWithoutPlateau(h));
        };
        let d = distance(&centers.centers[i - 1], &centers.centers[i]);
        let drop = knot.r_minus - knot.r_plus;
        if d > drop + NEST_TOL * (1.0 + knot.r_minus) {
            return Err(Error::NotNested {
                lower: centers.heights[i - 1],
                upper: h,
                distance: d,
                drop,
            });
        }
    }
    let mut centers = centers;
    centers.xi_infinity = centers.centers.last().expect("nonempty").clone();
    // Drop pieces that do not move the center.
    let mut heights = vec![centers.heights[0]];
    let mut cs = vec![centers.centers[0].clone()];
    for (h, c) in centers.heights.iter().zip(&centers.centers).skip(1) {
        if c != cs.last().expect("nonempty") {
            heights.push(*h);
            cs.push(c.clone());
        }
    }
    Ok(ExtremalSpec {
        n,
        profile,
        centers: SpecCenters {
            heights,
            centers: cs,
        },
        family: Family::Custom,
    })
}

/// Closed-form statistics of an extremal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalStats {
    pub n: usize,
    /// `lambda_n(supp u) = F(0+)`.
    pub support_measure: f64,
    /// `lambda_n(C)`: total mass of the plateaus below the top.
    pub critical_measure: f64,
    /// Plateau at `ess sup u`, not part of `C`.
    pub top_plateau_measure: f64,
    pub ess_sup: f64,
    /// No value jumps: `u` is a Sobolev function.
    pub sobolev: bool,
    /// `||D^s u||`: jump heights times sphere areas, for value jumps.
    pub singular_variation: f64,
    /// `||D xi||`.
    pub center_variation: f64,
}

impl ExtremalSpec {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn top_height(&self) -> f64 {
        self.profile.top_height()
    }

    pub fn center_path(&self) -> CenterPath {
        CenterPath {
            heights: self.centers.heights.clone(),
            centers: self.centers.centers.clone(),
            xi_infinity: self.xi_infinity().to_vec(),
        }
    }

    pub fn xi_infinity(&self) -> &[f64] {
        self.centers.centers.last().expect("nonempty")
    }

    /// `xi_t`, right-continuous.
    pub fn center_at(&self, t: f64) -> &[f64] {
        let i = self
            .centers
            .heights
            .partition_point(|&h| h <= t)
            .saturating_sub(1);
        &self.centers.centers[i]
    }

    /// Heights where the center moves.
    pub fn center_jump_heights(&self) -> &[f64] {
        &self.centers.heights[1..]
    }

    /// `u(x) = sup { t : |x - xi_t| < r(t) }`, exact.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let hs = &self.centers.heights;
        let top = self.top_height();
        for j in (0..hs.len()).rev() {
            let d = distance(x, &self.centers.centers[j]);
            if self.profile.radius(hs[j]) > d {
                let end = if j + 1 < hs.len() { hs[j + 1] } else { top };
                return self.profile.height_where_radius_at_most(d).min(end);
            }
        }
        0.0
    }

    /// `R(x) = (F(u(x)) / omega_n)^{1/n} = r(u(x))`.
    pub fn radius_at(&self, x: &[f64]) -> f64 {
        self.profile.radius(self.eval(x))
    }

    /// Support radius plus the largest center offset.
    pub fn bounding_radius(&self) -> f64 {
        let off = self
            .centers
            .centers
            .iter()
            .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        self.profile.support_radius() + off
    }

    /// The exact distribution function, tabulated at `thresholds`.
    pub fn distfn(&self, thresholds: &[f64]) -> DistFn {
        DistFn::from_profile(&self.profile, thresholds)
    }

    /// `levels + 1` uniform thresholds on `[0, ess sup]`.
    pub fn default_thresholds(&self, levels: usize) -> Vec<f64> {
        let top = self.top_height();
        (0..=levels)
            .map(|i| top * i as f64 / levels as f64)
            .collect()
    }

    pub fn decomposition(&self) -> MeasureDecomposition {
        decompose(&self.distfn(&self.default_thresholds(64)), None)
            .expect("analytic decomposition cannot fail")
    }

    pub fn critical_set(&self) -> CriticalSet {
        CriticalSet::analytic(self.stats().critical_measure)
    }

    pub fn stats(&self) -> ExtremalStats {
        let c = self.dims();
        let support_measure = c.ball_volume(self.profile.support_radius());
        let critical_measure = self
            .profile
            .interior_jumps()
            .map(|k| c.ball_volume(k.r_minus) - c.ball_volume(k.r_plus))
            .sum();
        let singular_variation = self
            .profile
            .segments()
            .filter(|s| s.is_flat() && s.r0 > 0.0)
            .map(|s| (s.t1 - s.t0) * c.sphere_area(s.r0))
            .sum::<f64>();
        ExtremalStats {
            n: self.n,
            support_measure,
            critical_measure,
            top_plateau_measure: c.ball_volume(self.profile.top_plateau_radius()),
            ess_sup: self.top_height(),
            sobolev: singular_variation == 0.0,
            singular_variation,
            center_variation: self.center_path().total_variation(),
        }
    }

    pub(crate) fn dims(&self) -> DimConstants {
        DimConstants::new(self.n).expect("validated dimension")
    }

    /// `||grad u||_p`, exact: on a linear piece `|grad u| = 1/|r'|` on an
    /// annulus of volume `omega_n (r0^n - r1^n)`. Value jumps make the
    /// gradient a measure, so `None` for `p > 1`; at `p = 1` the jump part
    /// is left out (see [`ExtremalStats::singular_variation`]).
    pub fn gradient_lp(&self, p: f64) -> Option<f64> {
        if !(p >= 1.0) {
            return None;
        }
        let c = self.dims();
        let mut sum = 0.0;
        for s in self.profile.segments() {
            if s.is_flat() {
                if p > 1.0 && s.r0 > 0.0 {
                    return None;
                }
                continue;
            }
            let g = (s.t1 - s.t0) / (s.r0 - s.r1);
            sum += g.powf(p) * (c.ball_volume(s.r0) - c.ball_volume(s.r1));
        }
        Some(sum.powf(1.0 / p))
    }

    /// `int Phi(|grad u|)` over the pieces whose gradient satisfies `keep`.
    pub(crate) fn gradient_integral<F: Fn(f64) -> f64, K: Fn(f64) -> bool>(
        &self,
        phi: F,
        keep: K,
    ) -> f64 {
        let c = self.dims();
        self.profile
            .segments()
            .filter(|s| !s.is_flat())
            .map(|s| {
                let g = (s.t1 - s.t0) / (s.r0 - s.r1);
                if keep(g) {
                    phi(g) * (c.ball_volume(s.r0) - c.ball_volume(s.r1))
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `||u||_q^q = int_0^inf F(t) q t^{q-1} dt`, exact on linear pieces.
    pub fn lq_power(&self, q: f64) -> f64 {
        let c = self.dims();
        let n = self.n as i32;
        let mut total = 0.0;
        for s in self.profile.segments() {
            let beta = s.slope();
            let alpha = s.r0 - beta * s.t0;
            // int (alpha + beta t)^n q t^{q-1} dt by binomial expansion.
            let mut binom = 1.0;
            for k in 0..=n {
                if k > 0 {
                    binom *= (n - k + 1) as f64 / k as f64;
                }
                let e = k as f64 + q;
                let coeff = binom * alpha.powi(n - k) * beta.powi(k) * q / e;
                total += coeff * (s.t1.powf(e) - s.t0.powf(e));
            }
        }
        c.omega_n * total
    }

    pub fn lq_norm(&self, q: f64) -> f64 {
        self.lq_power(q).max(0.0).powf(1.0 / q)
    }

    /// `||u X_C||_q^q = sum_a a^q mu({a})` over plateaus below the top.
    pub fn critical_lq_power(&self, q: f64) -> f64 {
        let c = self.dims();
        self.profile
            .interior_jumps()
            .map(|k| k.t.powf(q) * (c.ball_volume(k.r_minus) - c.ball_volume(k.r_plus)))
            .sum()
    }

    /// `int_{C'} Psi(u)` where `C'` is `C` plus the annuli whose gradient
    /// satisfies `in_v`, and `lambda_n(C')`.
    pub fn extended_critical<P: Fn(f64) -> f64, V: Fn(f64) -> bool>(
        &self,
        psi: P,
        in_v: V,
    ) -> (f64, f64) {
        let c = self.dims();
        let mut integral = 0.0;
        let mut measure = 0.0;
        for k in self.profile.interior_jumps() {
            let m = c.ball_volume(k.r_minus) - c.ball_volume(k.r_plus);
            integral += psi(k.t) * m;
            measure += m;
        }
        for s in self.profile.segments().filter(|s| !s.is_flat()) {
            let g = (s.t1 - s.t0) / (s.r0 - s.r1);
            if !in_v(g) {
                continue;
            }
            measure += c.ball_volume(s.r0) - c.ball_volume(s.r1);
            // -dF/dt = n omega r^{n-1} |r'|
            let rate = (s.r0 - s.r1) / (s.t1 - s.t0);
            integral += quad::piecewise(s.t0, s.t1, &[], 4, |t| {
                psi(t) * c.sphere_area(s.radius_at(t)) * rate
            });
        }
        (integral, measure)
    }

    /// `F^s(t) = mu^s((t, ess sup))`, exact.
    pub fn f_s(&self, t: f64) -> f64 {
        let c = self.dims();
        self.profile
            .interior_jumps()
            .filter(|k| k.t > t)
            .map(|k| c.ball_volume(k.r_minus) - c.ball_volume(k.r_plus))
            .sum()
    }

    /// `sup_{t < ess sup} F^s(t) / F(t)`, attained at the left limit of a
    /// plateau height.
    pub fn density_sup(&self) -> f64 {
        let c = self.dims();
        let jumps: Vec<&ProfileKnot> = self.profile.interior_jumps().collect();
        let mut best: f64 = 0.0;
        let mut above = 0.0;
        for k in jumps.iter().rev() {
            above += c.ball_volume(k.r_minus) - c.ball_volume(k.r_plus);
            let f_left = c.ball_volume(k.r_minus);
            if f_left > 0.0 {
                best = best.max(above / f_left);
            }
        }
        best
    }

    /// `u_lambda(x) = u(x / lambda)`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("dilation factor must be positive"));
        }
        let mut out = self.clone();
        out.profile = self.profile.scaled(1.0, lambda);
        for c in &mut out.centers.centers {
            c.iter_mut().for_each(|x| *x *= lambda);
        }
        out.family = Family::Custom;
        Ok(out)
    }

    /// `x -> u(x - shift)`.
    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.n {
            return Err(invalid("shift dimension differs from spec"));
        }
        let mut out = self.clone();
        for c in &mut out.centers.centers {
            c.iter_mut().zip(shift).for_each(|(x, s)| *x += s);
        }
        out.family = Family::Custom;
        Ok(out)
    }

    /// `u*`: the same profile, centered at the origin.
    pub fn rearranged(&self) -> Self {
        Self {
            n: self.n,
            profile: self.profile.clone(),
            centers: SpecCenters {
                heights: vec![0.0],
                centers: vec![vec![0.0; self.n]],
            },
            family: Family::Custom,
        }
    }

    /// `u* o tau` with `tau(x) = x - xi_inf`.
    pub fn aligned_rearrangement(&self) -> Self {
        let mut out = self.rearranged();
        out.centers.centers[0] = self.xi_infinity().to_vec();
        out
    }

    /// `f o u` for the slice map of `slices`.
    pub fn sliced(&self, slices: &SliceSet) -> Result<Self> {
        let profile = slices.apply_profile(&self.profile);
        let mut heights = Vec::new();
        let mut centers: Vec<Vec<f64>> = Vec::new();
        // The top knot bounds the empty set, so it carries no center.
        let below_top = profile.knots().len().saturating_sub(1).max(1);
        for k in &profile.knots()[..below_top] {
            let c = self.center_at(slices.preimage(k.t)).to_vec();
            if centers.last() != Some(&c) {
                heights.push(k.t);
                centers.push(c);
            }
        }
        if heights.first() != Some(&0.0) {
            heights.insert(0, 0.0);
            centers.insert(0, self.center_at(0.0).to_vec());
        }
        build_extremal(profile, path_from(heights, centers)?)
    }

    /// `(min(u, a), (u - a)_+)`.
    pub fn split_at(&self, a: f64) -> Result<(Self, Self)> {
        let top = self.top_height();
        if !(a > 0.0 && a < top) {
            return Err(invalid(
                "split height must lie strictly inside (0, ess sup)",
            ));
        }
        let lower = self.sliced(&SliceSet::new(vec![(a, f64::INFINITY)])?)?;
        let mut knots = vec![ProfileKnot::continuous(0.0, self.profile.radius(a))];
        knots.extend(
            self.profile
                .knots()
                .iter()
                .filter(|k| k.t > a)
                .map(|k| ProfileKnot { t: k.t - a, ..*k }),
        );
        let profile = RadialProfile::new(self.n, knots)?;
        let mut heights = vec![0.0];
        let mut centers = vec![self.center_at(a).to_vec()];
        for (&h, c) in self.centers.heights.iter().zip(&self.centers.centers) {
            if h > a {
                heights.push(h - a);
                centers.push(c.clone());
            }
        }
        let upper = build_extremal(profile, path_from(heights, centers)?)?;
        Ok((lower, upper))
    }

    /// Samples `u` on a cube grid holding the support with a zero margin.
    pub fn sample(&self, resolution: usize) -> Result<GridField> {
        if self.n > 3 {
            return Err(Error::UnsupportedDimension(
                self.n,
                "1, 2 or 3 for sampling",
            ));
        }
        let half = self.bounding_radius() * 1.1 + 1e-9;
        let domain = Domain::cube(self.n, half.max(1e-6));
        let probe = GridField::from_function(|_| 0.0, &domain, resolution)?;
        let values: Vec<f64> = (0..probe.len())
            .into_par_iter()
            .map(|k| self.eval(&probe.cell_center(k)))
            .collect();
        GridField::new(
            probe.dims().to_vec(),
            probe.origin().to_vec(),
            probe.spacing(),
            values,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `u = (1 - |x|)_+`.
pub fn family_cone(n: usize) -> Result<ExtremalSpec> {
    let profile = RadialProfile::from_points(n, &[(0.0, 1.0), (1.0, 0.0)])?;
    Ok(build_extremal(profile, CenterPath::constant(vec![0.0; n]))?.with_family(Family::Cone))
}

/// A cone of height 1 and radius 1 cut at height `a` into a frustrum with a
/// plateau of radius `rho`, carrying a smaller cone of base radius
/// `rho_inner` centered at `e`.
pub fn family_cone_frustrum(
    n: usize,
    a: f64,
    rho: f64,
    rho_inner: f64,
    e: &[f64],
) -> Result<ExtremalSpec> {
    if !(a > 0.0 && a < 1.0) {
        return Err(invalid(format!("need 0 < a < 1, got {a}")));
    }
    if !(rho_inner > 0.0 && rho_inner < rho && rho < 1.0) {
        return Err(invalid(format!(
            "need 0 < rho_inner < rho < 1, got rho = {rho}, rho_inner = {rho_inner}"
        )));
    }
    if e.len() != n {
        return Err(invalid(format!("offset must have {n} coordinates")));
    }
    let profile = RadialProfile::new(
        n,
        vec![
            ProfileKnot::continuous(0.0, 1.0),
            ProfileKnot::new(a, rho, rho_inner),
            ProfileKnot::new(1.0, 0.0, 0.0),
        ],
    )?;
    let path = path_from(vec![0.0, a], vec![vec![0.0; n], e.to_vec()])?;
    let spec = if e.iter().all(|&x| x == 0.0) {
        build_extremal(profile, CenterPath::constant(vec![0.0; n]))?
    } else {
        build_extremal(profile, path)?
    };
    Ok(spec.with_family(Family::ConeFrustrum {
        a,
        rho,
        rho_inner,
        e: e.to_vec(),
    }))
}

/// Piecewise constant extremal: value `h_i` on `B(c_i, r_i)` minus the next
/// ball, for levels `(h_i, r_i)` with increasing heights and decreasing radii.
pub fn family_staircase(
    n: usize,
    levels: &[(f64, f64)],
    centers: &[Vec<f64>],
) -> Result<ExtremalSpec> {
    if levels.is_empty() {
        return Err(invalid("staircase needs at least one level"));
    }
    if centers.len() != levels.len() {
        return Err(invalid("staircase needs one center per level"));
    }
    for w in levels.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(invalid("staircase heights must increase"));
        }
        if !(w[1].1 < w[0].1) {
            return Err(Error::ProfileIncreasing(w[1].0));
        }
    }
    if !(levels[0].0 > 0.0 && levels[levels.len() - 1].1 > 0.0) {
        return Err(invalid("staircase heights and radii must be positive"));
    }
    let mut knots = vec![ProfileKnot::continuous(0.0, levels[0].1)];
    for i in 0..levels.len() {
        let next = if i + 1 < levels.len() {
            levels[i + 1].1
        } else {
            0.0
        };
        knots.push(ProfileKnot::new(levels[i].0, levels[i].1, next));
    }
    let profile = RadialProfile::new(n, knots)?;
    let mut heights = vec![0.0];
    heights.extend(levels[..levels.len() - 1].iter().map(|l| l.0));
    let spec = build_extremal(profile, path_from(heights, centers.to_vec())?)?;
    Ok(spec.with_family(Family::Staircase {
        levels: levels.to_vec(),
    }))
}

/// Weight of the Cantor part in the devil's staircase profile.
pub const DEVIL_WEIGHT: f64 = 0.5;

/// `r(t) = (1 - c)(1 - t) + c (1 - G_k(t))` on `[0, 1]`, where `G_k` is the
/// depth-`k` Cantor staircase with a step of `2^{-k}` at the midpoint of
/// each of the `2^k` surviving intervals. The steps are plateaus standing in
/// for the singular-continuous Cantor measure and are marked as surrogates.
pub fn family_devils_staircase(n: usize, depth: u32) -> Result<ExtremalSpec> {
    if depth > 20 {
        return Err(invalid("Cantor depth must be at most 20"));
    }
    let c = DEVIL_WEIGHT;
    // Left endpoints of surviving intervals, in ternary.
    let len = 3f64.powi(-(depth as i32));
    let count = 1usize << depth;
    let mut steps: Vec<f64> = (0..count)
        .map(|i| {
            let mut left = 0.0;
            let mut scale = 1.0;
            for bit in (0..depth).rev() {
                scale /= 3.0;
                if (i >> bit) & 1 == 1 {
                    left += 2.0 * scale;
                }
            }
            left + 0.5 * len
        })
        .collect();
    steps.sort_by(|a, b| a.total_cmp(b));
    let step = 1.0 / count as f64;
    let base = |t: f64| (1.0 - c) * (1.0 - t);
    let mut knots = vec![ProfileKnot::continuous(0.0, 1.0)];
    for (i, &t) in steps.iter().enumerate() {
        let before = base(t) + c * (1.0 - step * i as f64);
        let after = base(t) + c * (1.0 - step * (i + 1) as f64);
        knots.push(ProfileKnot {
            t,
            r_minus: before,
            r_plus: after,
            surrogate: true,
        });
    }
    knots.push(ProfileKnot::new(1.0, 0.0, 0.0));
    let profile = RadialProfile::new(n, knots)?;
    Ok(build_extremal(profile, CenterPath::constant(vec![0.0; n]))?
        .with_family(Family::DevilsStaircase { depth, weight: c }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn frustrum(e: f64) -> ExtremalSpec {
        family_cone_frustrum(2, 0.5, 0.5, 0.3, &[e, 0.0]).unwrap()
    }

    #[test]
    fn builder_rules() {
        let cone = family_cone(2).unwrap();
        assert_eq!(cone.xi_infinity(), &[0.0, 0.0]);
        let bad = build_extremal(
            cone.profile().clone(),
            path_from(vec![0.0, 0.5], vec![vec![0.0, 0.0], vec![0.1, 0.0]]).unwrap(),
        );
        assert!(matches!(bad, Err(Error::CenterJumpWithoutPlateau(_))));
        assert!(family_cone_frustrum(2, 0.5, 0.5, 0.3, &[0.2, 0.0]).is_ok());
        assert!(matches!(
            family_cone_frustrum(2, 0.5, 0.5, 0.3, &[0.21, 0.0]),
            Err(Error::NotNested { .. })
        ));
    }

    #[test]
    fn evaluation() {
        let cone = family_cone(2).unwrap();
        assert!((cone.eval(&[0.3, 0.0]) - 0.7).abs() < 1e-12);
        let f = frustrum(0.2);
        assert!((f.eval(&[0.2, 0.0]) - 1.0).abs() < 1e-12);
        assert_eq!(f.eval(&[1.3, 0.0]), 0.0);
        assert_eq!(f.eval(&[0.0, 0.45]), 0.5);
        assert!((f.eval(&[0.2, 0.15]) - 0.75).abs() < 1e-12);
        assert!((f.eval(&[-0.8, 0.0]) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn exact_stats() {
        let cone = family_cone(2).unwrap();
        let s = cone.stats();
        assert_eq!(s.critical_measure, 0.0);
        for p in [1.0, 2.0, 4.0] {
            assert!((cone.gradient_lp(p).unwrap() - PI.powf(1.0 / p)).abs() < 1e-12);
        }
        assert!((cone.lq_norm(1.0) - PI / 3.0).abs() < 1e-12);
        let f = frustrum(0.2);
        let s = f.stats();
        assert!((s.critical_measure - 0.16 * PI).abs() < 1e-12);
        assert!((f.lq_norm(1.0) - PI * (7.0 / 24.0 + 0.015)).abs() < 1e-12);
        assert!((f.lq_norm(1.0) - 0.96342).abs() < 1e-5);
        assert!((f.critical_lq_power(1.0) - 0.25133).abs() < 1e-5);
        assert!((s.center_variation - 0.2).abs() < 1e-15);
        // int_0^1 F(t) 2t dt = ||u||_2^2 checked against quadrature
        let q2 = quad::piecewise(0.0, 1.0, &[0.5], 8, |t| f.distfn(&[]).eval(t) * 2.0 * t);
        assert!((f.lq_power(2.0) - q2).abs() < 1e-12);
        let q15 = quad::piecewise(0.0, 1.0, &[0.5], 64, |t| {
            f.distfn(&[]).eval(t) * 1.5 * t.sqrt()
        });
        assert!((f.lq_power(1.5) - q15).abs() < 1e-6);
    }

    #[test]
    fn staircase_is_bv() {
        let s = family_staircase(
            2,
            &[(1.0, 1.0), (2.0, 0.6), (3.0, 0.3)],
            &[vec![0.0, 0.0], vec![0.4, 0.0], vec![0.4, 0.3]],
        )
        .unwrap();
        assert!(s.gradient_lp(2.0).is_none());
        let st = s.stats();
        assert!(!st.sobolev);
        assert!((st.center_variation - 0.7).abs() < 1e-12);
        assert_eq!(s.xi_infinity(), &[0.4, 0.3]);
        // value jumps of size 1 across circles of radius 1, 0.6, 0.3
        assert!((st.singular_variation - 2.0 * PI * 1.9).abs() < 1e-12);
        assert!(family_staircase(
            2,
            &[(1.0, 0.5), (2.0, 0.6)],
            &[vec![0.0, 0.0], vec![0.0, 0.0]]
        )
        .is_err());
        assert!(s.density_sup() < 1.0);
    }

    #[test]
    fn devils_staircase_masses() {
        let one = family_devils_staircase(1, 1).unwrap();
        let jumps: Vec<f64> = one.profile().interior_jumps().map(|k| k.t).collect();
        assert_eq!(jumps.len(), 2);
        assert!((jumps[0] - 1.0 / 6.0).abs() < 1e-15 && (jumps[1] - 5.0 / 6.0).abs() < 1e-15);
        let masses: Vec<f64> = [4, 8, 12]
            .iter()
            .map(|&d| {
                family_devils_staircase(1, d)
                    .unwrap()
                    .stats()
                    .critical_measure
            })
            .collect();
        for m in &masses {
            assert!((m - 2.0 * DEVIL_WEIGHT).abs() < 1e-12);
        }
        let m2: Vec<f64> = [8, 12]
            .iter()
            .map(|&d| {
                family_devils_staircase(2, d)
                    .unwrap()
                    .stats()
                    .critical_measure
            })
            .collect();
        assert!((m2[0] - m2[1]).abs() < 1e-3);
    }

    #[test]
    fn json_round_trip() {
        let f = frustrum(0.2);
        let back = ExtremalSpec::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        let tampered = f.to_json().unwrap().replace("0.2", "0.3");
        assert!(ExtremalSpec::from_json(&tampered).is_err());
    }

    #[test]
    fn slicing_and_splitting() {
        let f = frustrum(0.2);
        let (lo, hi) = f.split_at(0.5).unwrap();
        assert_eq!(lo.top_height(), 0.5);
        assert!((lo.profile().top_plateau_radius() - 0.5).abs() < 1e-15);
        assert_eq!(hi.xi_infinity(), &[0.2, 0.0]);
        assert!((hi.eval(&[0.2, 0.0]) - 0.5).abs() < 1e-12);
        let cut = f.sliced(&SliceSet::new(vec![(0.4, 0.6)]).unwrap()).unwrap();
        assert!((cut.top_height() - 0.8).abs() < 1e-12);
        assert_eq!(cut.xi_infinity(), &[0.2, 0.0]);
        assert_eq!(cut.center_jump_heights(), &[0.4]);
    }

    #[test]
    fn sampled_gradient_matches_exact() {
        let f = frustrum(0.2);
        let g = f.sample(512).unwrap();
        let exact = f.gradient_lp(2.0).unwrap();
        let grid = g.gradient_norm_lp(2.0).unwrap();
        assert!((grid / exact - 1.0).abs() < 0.03, "{grid} vs {exact}");
        assert_eq!(f.rearranged().gradient_lp(2.0), f.gradient_lp(2.0));
    }
}
