//! Symmetric decreasing rearrangement, slice removal and the approximating
//! sequence that trades singular-continuous mass for plateaus.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::GridField;
use crate::geometry::DimConstants;
use crate::measure::{DistFn, MeasureDecomposition, Provenance};

/// A knot of a radial profile: left limit and value of `r` at height `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileKnot {
    pub t: f64,
    /// `r(t-)`.
    pub r_minus: f64,
    /// `r(t)`; right-continuous value.
    pub r_plus: f64,
    /// The jump at this knot stands in for singular-continuous mass (depth-
    /// truncated Cantor profiles) rather than a genuine plateau.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub surrogate: bool,
}

impl ProfileKnot {
    pub fn new(t: f64, r_minus: f64, r_plus: f64) -> Self {
        Self {
            t,
            r_minus,
            r_plus,
            surrogate: false,
        }
    }

    pub fn continuous(t: f64, r: f64) -> Self {
        Self::new(t, r, r)
    }

    pub fn jump(&self) -> f64 {
        self.r_minus - self.r_plus
    }
}

/// Radius `t -> r(t)` of the level balls `{u* > t}`.
///
/// Piecewise linear between knots, right-continuous, nonincreasing. The
/// first knot sits at `t = 0` and carries the support radius; the last knot
/// sits at the top height with `r_plus = 0` and `r_minus` equal to the radius
/// of the top plateau (0 for a peak).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    n: usize,
    knots: Vec<ProfileKnot>,
}

/// One linear piece of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub index: usize,
    pub t0: f64,
    pub t1: f64,
    pub r0: f64,
    pub r1: f64,
}

impl Segment {
    /// `dr/dt` (nonpositive).
    pub fn slope(&self) -> f64 {
        (self.r1 - self.r0) / (self.t1 - self.t0)
    }

    pub fn radius_at(&self, t: f64) -> f64 {
        self.r0 + (t - self.t0) * self.slope()
    }

    /// A flat piece: the function jumps in value across one sphere.
    pub fn is_flat(&self) -> bool {
        self.r0 == self.r1
    }
}

impl RadialProfile {
    pub fn new(n: usize, mut knots: Vec<ProfileKnot>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if knots.is_empty() {
            return Err(invalid("profile needs at least one knot"));
        }
        if knots[0].t != 0.0 {
            return Err(invalid("first knot must sit at t = 0"));
        }
        knots[0].r_minus = knots[0].r_plus;
        for k in &knots {
            if !(k.t.is_finite() && k.r_minus.is_finite() && k.r_plus.is_finite()) {
                return Err(invalid("profile knots must be finite"));
            }
            if k.r_plus < 0.0 || k.r_minus < 0.0 {
                return Err(invalid(format!("negative radius at t = {}", k.t)));
            }
            if k.r_plus > k.r_minus {
                return Err(Error::ProfileIncreasing(k.t));
            }
        }
        for w in knots.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(invalid("knot heights must be strictly increasing"));
            }
            if w[1].r_minus > w[0].r_plus {
                return Err(Error::ProfileIncreasing(w[1].t));
            }
        }
        let last = knots.last().expect("nonempty");
        if last.r_plus != 0.0 {
            return Err(invalid("last knot must close the profile with r = 0"));
        }
        Ok(Self { n, knots })
    }

    /// Profile of the zero function.
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            knots: vec![ProfileKnot::continuous(0.0, 0.0)],
        }
    }

    /// Profile through `(t_i, r_i)` with linear pieces and no jumps except
    /// the drop to 0 at the last point.
    pub fn from_points(n: usize, points: &[(f64, f64)]) -> Result<Self> {
        let mut knots: Vec<ProfileKnot> = points
            .iter()
            .map(|&(t, r)| ProfileKnot::continuous(t, r))
            .collect();
        if let Some(last) = knots.last_mut() {
            last.r_plus = 0.0;
        }
        Self::new(n, knots)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn knots(&self) -> &[ProfileKnot] {
        &self.knots
    }

    /// Essential supremum of the function.
    pub fn top_height(&self) -> f64 {
        self.knots.last().expect("nonempty").t
    }

    pub fn support_radius(&self) -> f64 {
        self.knots[0].r_plus
    }

    /// Radius of the plateau at the top height (0 for a peak).
    pub fn top_plateau_radius(&self) -> f64 {
        if self.knots.len() == 1 {
            return 0.0;
        }
        self.knots.last().expect("nonempty").r_minus
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.knots.windows(2).enumerate().map(|(index, w)| Segment {
            index,
            t0: w[0].t,
            t1: w[1].t,
            r0: w[0].r_plus,
            r1: w[1].r_minus,
        })
    }

    /// Index of the last knot with `t_k <= t`.
    fn knot_index(&self, t: f64) -> usize {
        self.knots.partition_point(|k| k.t <= t).saturating_sub(1)
    }

    /// `r(t)`, right-continuous. For `t < 0` this is the support radius.
    pub fn radius(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.support_radius();
        }
        if t >= self.top_height() {
            return 0.0;
        }
        let k = self.knot_index(t);
        let a = &self.knots[k];
        if t == a.t {
            return a.r_plus;
        }
        let b = &self.knots[k + 1];
        a.r_plus + (t - a.t) / (b.t - a.t) * (b.r_minus - a.r_plus)
    }

    /// `r(t-)`.
    pub fn radius_left(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.support_radius();
        }
        if t > self.top_height() {
            return 0.0;
        }
        let k = self.knot_index(t);
        if self.knots[k].t == t {
            return self.knots[k].r_minus;
        }
        self.radius(t)
    }

    /// Interior knots (strictly between 0 and the top) where `r` jumps:
    /// `(t, r(t-), r(t), surrogate)`.
    pub fn interior_jumps(&self) -> impl Iterator<Item = &ProfileKnot> + '_ {
        let last = self.knots.len().saturating_sub(1);
        self.knots
            .iter()
            .enumerate()
            .filter(move |(i, k)| *i > 0 && *i < last && k.r_minus > k.r_plus)
            .map(|(_, k)| k)
    }

    /// `inf { s >= 0 : r(s) < rho }`; `None` when `rho <= 0`.
    pub fn height_where_radius_below(&self, rho: f64) -> Option<f64> {
        if rho <= 0.0 {
            return None;
        }
        if self.support_radius() < rho {
            return Some(0.0);
        }
        for seg in self.segments() {
            if seg.r0 < rho {
                return Some(seg.t0);
            }
            if seg.r1 < rho {
                // r0 >= rho > r1: crossing inside the piece.
                let s = seg.t0 + (seg.r0 - rho) / (seg.r0 - seg.r1) * (seg.t1 - seg.t0);
                return Some(s);
            }
        }
        Some(self.top_height())
    }

    /// `inf { t : r(t) <= rho }`, so that `{r > rho} = [0, result)`.
    /// Binary search over knots; exact on linear pieces.
    pub fn height_where_radius_at_most(&self, rho: f64) -> f64 {
        let ks = &self.knots;
        if ks[0].r_plus <= rho {
            return 0.0;
        }
        // First knot whose right value is <= rho; the last knot qualifies.
        let k = ks.partition_point(|kn| kn.r_plus > rho);
        let (a, b) = (&ks[k - 1], &ks[k]);
        if b.r_minus <= rho {
            // Crossing inside the piece from a to b.
            if a.r_plus == b.r_minus {
                return a.t;
            }
            return a.t + (a.r_plus - rho) / (a.r_plus - b.r_minus) * (b.t - a.t);
        }
        b.t
    }

    /// `F(t) = omega_n r(t)^n`.
    pub fn distribution(&self, t: f64) -> f64 {
        DimConstants::new(self.n)
            .expect("n >= 1")
            .ball_volume(self.radius(t))
    }

    /// Heights scaled by `height` and radii by `length`.
    pub fn scaled(&self, height: f64, length: f64) -> Self {
        Self {
            n: self.n,
            knots: self
                .knots
                .iter()
                .map(|k| ProfileKnot {
                    t: k.t * height,
                    r_minus: k.r_minus * length,
                    r_plus: k.r_plus * length,
                    surrogate: k.surrogate,
                })
                .collect(),
        }
    }

    /// Knot heights.
    pub fn heights(&self) -> Vec<f64> {
        self.knots.iter().map(|k| k.t).collect()
    }
}

/// Rearranges a grid field: the sorted values are assigned to cells sorted
/// by distance from the origin (ties broken lexicographically on the
/// multi-index), on a grid centered at the origin.
///
/// The output has the same spacing; it keeps the input's cell counts unless
/// the ball holding the support would reach the boundary layer, in which case
/// the grid is enlarged.
pub fn rearrange(field: &GridField) -> GridField {
    let n = field.n();
    let h = field.spacing();
    let mut values: Vec<f64> = field.values().to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    let positive = values.iter().take_while(|&&v| v > 0.0).count();

    // Radius of the ball holding `positive` cells, with a margin of two layers.
    let omega = DimConstants::new(n).expect("n in 1..=3").omega_n;
    let needed = ((positive as f64 * field.cell_volume()) / omega).powf(1.0 / n as f64) + 3.0 * h;
    let dims: Vec<usize> = field
        .dims()
        .iter()
        .map(|&d| {
            let min_cells = (2.0 * needed / h).ceil() as usize + 2;
            let mut d = d.max(min_cells);
            if d % 2 != field.dims()[0] % 2 && d != field.dims()[0] {
                d += 1;
            }
            d
        })
        .collect();
    let origin: Vec<f64> = dims.iter().map(|&d| -(d as f64) * h / 2.0).collect();
    let len: usize = dims.iter().product();

    let out_template = GridField::from_parts_unchecked(dims.clone(), origin, h, vec![0.0; len]);
    let mut order: Vec<(f64, usize)> = (0..len)
        .map(|k| {
            let c = out_template.cell_center(k);
            (c.iter().map(|x| x * x).sum::<f64>(), k)
        })
        .collect();
    // Flat index order equals lexicographic multi-index order.
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut out = vec![0.0; len];
    for (&(_, k), &v) in order.iter().zip(values.iter()) {
        out[k] = v;
    }
    out_template.with_values(out)
}

/// `r(t) = (F(t) / omega_n)^{1/n}` at every knot of the distribution function.
pub fn rearrange_profile(dist: &DistFn) -> Result<RadialProfile> {
    let c = DimConstants::new(dist.n)?;
    match &dist.provenance {
        Provenance::Analytic { profile } => Ok(profile.clone()),
        Provenance::Empirical { ess_sup, .. } => {
            if *ess_sup <= 0.0 {
                return Ok(RadialProfile::zero(dist.n));
            }
            let radius = |f: f64| c.volume_radius(f);
            let mut knots: Vec<ProfileKnot> = dist
                .thresholds
                .iter()
                .zip(&dist.values)
                .filter(|(t, _)| **t < *ess_sup)
                .map(|(&t, &f)| ProfileKnot::continuous(t, radius(f)))
                .collect();
            if knots.first().map(|k| k.t) != Some(0.0) {
                let f0 = dist.eval(0.0);
                knots.insert(0, ProfileKnot::continuous(0.0, radius(f0)));
            }
            let last_r = knots.last().map(|k| k.r_plus).unwrap_or(0.0);
            let top_r = radius(dist.eval_left(*ess_sup)).min(last_r);
            knots.push(ProfileKnot::new(*ess_sup, top_r, 0.0));
            RadialProfile::new(dist.n, knots)
        }
    }
}

/// A finite union of disjoint open intervals `I` in `[0, inf)`, and the slice
/// map `f(t) = lambda_1([0, t] \ I)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSet {
    intervals: Vec<(f64, f64)>,
}

impl SliceSet {
    /// Intervals must be ordered, disjoint, with `0 <= lo < hi`; `hi` may be
    /// infinite. Touching intervals are merged.
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for &(lo, hi) in &intervals {
            if !(lo >= 0.0 && hi > lo) || lo.is_nan() || hi.is_nan() {
                return Err(invalid(format!("bad interval ({lo}, {hi})")));
            }
            if let Some(prev) = merged.last_mut() {
                if lo < prev.1 {
                    return Err(invalid(format!(
                        "intervals overlap or are unordered at ({lo}, {hi})"
                    )));
                }
                if lo == prev.1 {
                    prev.1 = hi;
                    continue;
                }
            }
            merged.push((lo, hi));
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| t > a && t < b)
    }

    /// `f(t) = lambda_1([0, t] \ I)`.
    pub fn map(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let removed: f64 = self
            .intervals
            .iter()
            .map(|&(a, b)| (t.min(b) - a).max(0.0))
            .sum();
        t - removed
    }

    /// `sup { t : f(t) <= tau }`, so that `{f(u) > tau} = {u > t}`.
    pub fn preimage(&self, tau: f64) -> f64 {
        let mut removed = 0.0;
        for &(a, b) in &self.intervals {
            if a - removed > tau {
                return tau + removed;
            }
            if b.is_infinite() {
                return f64::INFINITY;
            }
            removed += b - a;
        }
        tau + removed
    }

    /// `f o u`, applied valuewise.
    pub fn apply_field(&self, field: &GridField) -> GridField {
        field.with_values(field.values().iter().map(|&v| self.map(v)).collect())
    }

    /// Profile of `f o u*`, i.e. `(f o u)*`.
    pub fn apply_profile(&self, profile: &RadialProfile) -> RadialProfile {
        let top = profile.top_height();
        let n = profile.n();
        if top <= 0.0 {
            return RadialProfile::zero(n);
        }
        // Removed intervals clipped to [0, top].
        let cuts: Vec<(f64, f64)> = self
            .intervals
            .iter()
            .filter(|(a, _)| *a < top)
            .map(|&(a, b)| (a, b.min(top)))
            .collect();
        let mut knots: Vec<ProfileKnot> = Vec::new();
        let push = |k: ProfileKnot, knots: &mut Vec<ProfileKnot>| {
            if let Some(last) = knots.last_mut() {
                if k.t <= last.t {
                    // Merge coincident knots: keep the earliest left limit.
                    last.r_plus = k.r_plus;
                    last.surrogate = false;
                    return;
                }
            }
            knots.push(k);
        };

        let mut cursor = 0.0;
        let mut cut_iter = cuts.iter().peekable();
        if cut_iter.peek().map(|c| c.0) != Some(0.0) {
            push(
                ProfileKnot::continuous(0.0, profile.radius(0.0)),
                &mut knots,
            );
        }
        let original = profile.knots();
        let mut next_knot = 0usize;
        loop {
            let (piece_end, cut) = match cut_iter.next() {
                Some(&(a, b)) => (a, Some((a, b))),
                None => (top, None),
            };
            // Original knots strictly inside the kept piece (cursor, piece_end).
            while next_knot < original.len() && original[next_knot].t <= cursor {
                next_knot += 1;
            }
            while next_knot < original.len() && original[next_knot].t < piece_end {
                let k = original[next_knot];
                push(
                    ProfileKnot {
                        t: self.map(k.t),
                        ..k
                    },
                    &mut knots,
                );
                next_knot += 1;
            }
            match cut {
                Some((a, b)) => {
                    let tau = self.map(a);
                    let r_minus = profile.radius_left(a);
                    let r_plus = if b >= top { 0.0 } else { profile.radius(b) };
                    let mut k = ProfileKnot::new(tau, r_minus, r_plus);
                    if tau == 0.0 {
                        k.r_minus = r_plus;
                    }
                    push(k, &mut knots);
                    cursor = b;
                    if b >= top {
                        break;
                    }
                }
                None => {
                    let last = original.last().expect("nonempty");
                    push(
                        ProfileKnot::new(self.map(top), last.r_minus, 0.0),
                        &mut knots,
                    );
                    break;
                }
            }
        }
        if let Some(first) = knots.first_mut() {
            first.r_minus = first.r_plus;
        }
        if knots.len() == 1 {
            return RadialProfile::zero(n);
        }
        RadialProfile::new(n, knots).expect("slicing preserves profile invariants")
    }
}

/// The removed set `S_m` of the approximating sequence: open intervals of
/// total length at most `2^{-m}` centered on the singular-continuous heights
/// of the decomposition, clipped to `(0, ess sup)`. With `tails`, `[0, 1/m)` and
/// `(m, inf)` are removed as well (unbounded functions or infinite support).
pub fn approximation_slices(
    decomposition: &MeasureDecomposition,
    m: u32,
    tails: bool,
) -> Result<SliceSet> {
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    let top = decomposition.ess_sup;
    let heights = decomposition.singular_continuous_heights();
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    if tails {
        intervals.push((0.0, 1.0 / m as f64));
    }
    if !heights.is_empty() {
        let half = 2f64.powi(-(m as i32)) / (2.0 * heights.len() as f64);
        for &s in &heights {
            let lo = (s - half).max(0.0);
            let hi = (s + half).min(top);
            if hi > lo {
                intervals.push((lo, hi));
            }
        }
    }
    if tails {
        intervals.push((m as f64, f64::INFINITY));
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(prev) if lo <= prev.1 => prev.1 = prev.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    SliceSet::new(merged)
}

/// `u_m = f_m o u` with `f_m` removing [`approximation_slices`].
pub fn approximation_sequence(
    field: &GridField,
    decomposition: &MeasureDecomposition,
    m: u32,
    tails: bool,
) -> Result<GridField> {
    if decomposition.n != field.n() {
        return Err(Error::Incompatible(
            "decomposition dimension differs from field".into(),
        ));
    }
    Ok(approximation_slices(decomposition, m, tails)?.apply_field(field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Domain;
    use std::f64::consts::PI;

    fn norm(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn sorted(v: &[f64]) -> Vec<f64> {
        let mut s = v.to_vec();
        s.sort_by(|a, b| a.total_cmp(b));
        s
    }

    #[test]
    fn two_squares_become_a_disc() {
        let u = GridField::from_function(
            |x| {
                let a = (x[0] + 1.2).abs() < 0.5 && x[1].abs() < 0.5;
                let b = (x[0] - 1.2).abs() < 0.5 && x[1].abs() < 0.5;
                if a || b {
                    1.0
                } else {
                    0.0
                }
            },
            &Domain::cube(2, 2.0),
            128,
        )
        .unwrap();
        let s = rearrange(&u);
        let h = s.spacing();
        let r = (2.0 / PI).sqrt();
        assert!((r - 0.7979).abs() < 1e-4);
        let disc = GridField::from_function(
            |x| if norm(x) < r { 1.0 } else { 0.0 },
            &Domain {
                lo: s.origin().to_vec(),
                hi: s
                    .origin()
                    .iter()
                    .zip(s.dims())
                    .map(|(o, &d)| o + d as f64 * h)
                    .collect(),
            },
            s.dims()[0],
        )
        .unwrap();
        let symdiff = s
            .values()
            .iter()
            .zip(disc.values())
            .filter(|(a, b)| a != b)
            .count() as f64
            * s.cell_volume();
        assert!(symdiff <= 4.0 * 2.0 * PI * r * h, "symdiff {symdiff}");
        assert_eq!(
            sorted(s.values()).iter().filter(|&&v| v > 0.0).count(),
            2048
        );
    }

    #[test]
    fn radial_input_is_a_fixed_point() {
        let u = GridField::from_function(|x| (1.0 - norm(x)).max(0.0), &Domain::cube(2, 1.5), 64)
            .unwrap();
        let s = rearrange(&u);
        assert_eq!(s.dims(), u.dims());
        let diff: f64 = s
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(diff * s.cell_volume() < 1e-12, "{diff}");
    }

    #[test]
    fn rearrangement_is_equimeasurable() {
        let u = GridField::from_function(
            |x| {
                (0.8 - norm(&[x[0] - 0.3, x[1]])).max(0.0)
                    + 0.5 * (0.4 - norm(&[x[0] + 0.6, x[1] - 0.5])).max(0.0)
            },
            &Domain::cube(2, 2.0),
            64,
        )
        .unwrap();
        let s = rearrange(&u);
        let a = sorted(u.values());
        let b = sorted(s.values());
        let pa: Vec<f64> = a.into_iter().filter(|&v| v > 0.0).collect();
        let pb: Vec<f64> = b.into_iter().filter(|&v| v > 0.0).collect();
        assert_eq!(pa, pb);
    }

    #[test]
    fn cone_profile_from_samples() {
        let d = DistFn::empirical(
            2,
            (0..=10).map(|i| i as f64 / 10.0).collect(),
            |t| PI * (1.0 - t).powi(2),
            1.0,
        );
        let p = rearrange_profile(&d).unwrap();
        for i in 0..10 {
            let t = i as f64 / 10.0;
            assert!((p.radius(t) - (1.0 - t)).abs() < 1e-12);
        }
        assert_eq!(p.radius(1.0), 0.0);
    }

    #[test]
    fn jump_is_preserved() {
        let prof = RadialProfile::new(
            2,
            vec![
                ProfileKnot::continuous(0.0, 1.0),
                ProfileKnot::new(0.5, 0.5, 0.3),
                ProfileKnot::new(1.0, 0.0, 0.0),
            ],
        )
        .unwrap();
        let d = DistFn::from_profile(&prof, &[0.25, 0.5, 0.75]);
        let p = rearrange_profile(&d).unwrap();
        let f_minus = d.eval_left(0.5);
        let f = d.eval(0.5);
        let expected = (f_minus / PI).sqrt() - (f / PI).sqrt();
        assert!((p.radius_left(0.5) - p.radius(0.5) - expected).abs() < 1e-12);
        assert!((expected - 0.2).abs() < 1e-12);
    }

    #[test]
    fn zero_distribution() {
        let d = DistFn::empirical(2, vec![0.0, 0.5, 1.0], |_| 0.0, 0.0);
        let p = rearrange_profile(&d).unwrap();
        assert_eq!(p.radius(0.0), 0.0);
        assert_eq!(p.radius(0.7), 0.0);
    }

    #[test]
    fn slice_map_basics() {
        let s = SliceSet::new(vec![(0.5, 1.0)]).unwrap();
        assert_eq!(s.map(0.3), 0.3);
        assert_eq!(s.map(0.7), 0.5);
        assert_eq!(s.map(1.0), 0.5);
        assert_eq!(s.map(1.5), 1.0);
        assert_eq!(s.preimage(0.5), 1.0);
        assert_eq!(s.preimage(0.25), 0.25);
        assert!(SliceSet::new(vec![(0.5, 1.0), (0.7, 2.0)]).is_err());
        assert!(SliceSet::new(vec![(0.5, 1.0), (0.1, 0.2)]).is_err());
        let all = SliceSet::new(vec![(0.0, f64::INFINITY)]).unwrap();
        assert_eq!(all.map(3.0), 0.0);
        assert_eq!(SliceSet::empty().map(0.37), 0.37);
    }

    #[test]
    fn truncated_cone() {
        let u = GridField::from_function(|x| (1.0 - norm(x)).max(0.0), &Domain::cube(2, 1.5), 64)
            .unwrap();
        let s = SliceSet::new(vec![(0.5, 1.0)]).unwrap();
        let v = s.apply_field(&u);
        for (a, b) in u.values().iter().zip(v.values()) {
            assert_eq!(*b, a.min(0.5));
        }
        let none = SliceSet::empty().apply_field(&u);
        assert_eq!(none, u);
        let all = SliceSet::new(vec![(0.0, f64::INFINITY)])
            .unwrap()
            .apply_field(&u);
        assert!(all.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn profile_slicing_merges_into_plateau() {
        let cone = RadialProfile::from_points(2, &[(0.0, 1.0), (1.0, 0.0)]).unwrap();
        let s = SliceSet::new(vec![(0.4, 0.6)]).unwrap();
        let p = s.apply_profile(&cone);
        assert!((p.top_height() - 0.8).abs() < 1e-15);
        let jumps: Vec<_> = p.interior_jumps().collect();
        assert_eq!(jumps.len(), 1);
        assert!((jumps[0].t - 0.4).abs() < 1e-15);
        assert!((jumps[0].r_minus - 0.6).abs() < 1e-15);
        assert!((jumps[0].r_plus - 0.4).abs() < 1e-15);
        // cap removed entirely
        let capped = SliceSet::new(vec![(0.5, f64::INFINITY)])
            .unwrap()
            .apply_profile(&cone);
        assert!((capped.top_height() - 0.5).abs() < 1e-15);
        assert!((capped.top_plateau_radius() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn slicing_commutes_with_rearrangement_on_profiles() {
        // (f o u)* computed from the sliced grid vs f o u* from the profile.
        let u = GridField::from_function(
            |x| (1.0 - norm(&[x[0] - 0.2, x[1]])).max(0.0),
            &Domain::cube(2, 1.5),
            96,
        )
        .unwrap();
        let s = SliceSet::new(vec![(0.3, 0.45), (0.7, 0.8)]).unwrap();
        let sliced = s.apply_field(&u);
        let t = sliced.default_thresholds(64);
        let lhs = rearrange_profile(&sliced.distribution_function(&t).unwrap()).unwrap();
        let base = rearrange_profile(
            &u.distribution_function(&u.default_thresholds(2048))
                .unwrap(),
        )
        .unwrap();
        let rhs = s.apply_profile(&base);
        for &tau in &t[1..t.len() - 1] {
            let a = lhs.radius(tau);
            let b = rhs.radius(tau);
            assert!((a - b).abs() < 2.0 * u.spacing(), "tau {tau}: {a} vs {b}");
        }
    }
}
