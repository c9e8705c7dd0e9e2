//! Both sides of every stability bound, evaluated on exact extremals.
//!
//! The distance `u - u* o tau` is always taken with `tau(x) = x - xi_inf`,
//! so that `u* o tau` is the rearrangement recentered on the top of `u`.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::extremal::ExtremalSpec;
use crate::field::GridField;
use crate::functionals::{dims_of, dirichlet_spec, levelwise_psi_distance, YoungFunction};
use crate::measure::{center_path, distance};
use crate::quad;

/// Default relative tolerance of the levelwise quadratures.
pub const DEFAULT_TOLERANCE: f64 = 1e-3;

/// Absolute size below which a distance counts as zero.
const ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    HoldsWithinTolerance,
    Violated,
}

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, when `rhs > 0`.
    pub ratio: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Both sides vanish: the degenerate case rather than a real test.
    pub vacuous: bool,
}

impl BoundReport {
    pub fn new(
        bound_id: &str,
        params: BTreeMap<String, Value>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let vacuous = rhs == 0.0 && lhs.abs() <= ZERO;
        let verdict = if vacuous || lhs <= rhs {
            Verdict::Holds
        } else if lhs <= rhs * (1.0 + tolerance) {
            Verdict::HoldsWithinTolerance
        } else {
            Verdict::Violated
        };
        Self {
            bound_id: bound_id.to_string(),
            params,
            lhs,
            rhs,
            ratio: (rhs > 0.0).then(|| lhs / rhs),
            tolerance,
            verdict,
            vacuous,
        }
    }

    /// The same comparison judged with another relative tolerance.
    pub fn with_tolerance(self, tolerance: f64) -> Self {
        let vacuous = self.vacuous;
        let mut r = Self::new(&self.bound_id, self.params, self.lhs, self.rhs, tolerance);
        r.vacuous = vacuous;
        r
    }

    pub fn holds(&self) -> bool {
        self.verdict != Verdict::Violated
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

fn base_params(spec: &ExtremalSpec) -> BTreeMap<String, Value> {
    let mut p = BTreeMap::new();
    p.insert("n".into(), json!(spec.n()));
    p.insert(
        "family".into(),
        serde_json::to_value(spec.family()).unwrap_or(Value::Null),
    );
    p.insert("xi_infinity".into(), json!(spec.xi_infinity()));
    p
}

/// The shift `xi_inf` such that `u* o tau` with `tau(x) = x - xi_inf` is
/// aligned with `u` at the top.
pub fn optimal_translation(spec: &ExtremalSpec) -> Vec<f64> {
    spec.xi_infinity().to_vec()
}

/// [`optimal_translation`] for a sampled extremal: the limit center of its
/// level balls. Fails when a level set is not a ball.
pub fn optimal_translation_grid(field: &GridField, thresholds: &[f64]) -> Result<Vec<f64>> {
    Ok(center_path(field, thresholds)?.xi_infinity)
}

/// `int |u - u* o tau|^q` from level balls.
pub fn aligned_lq_power(spec: &ExtremalSpec, q: f64) -> Result<f64> {
    let psi = YoungFunction::power(q)?;
    levelwise_psi_distance(spec, &spec.aligned_rearrangement(), &psi)
}

/// `||u - u* o tau||_q`.
pub fn aligned_lq_distance(spec: &ExtremalSpec, q: f64) -> Result<f64> {
    Ok(aligned_lq_power(spec, q)?.max(0.0).powf(1.0 / q))
}

/// Nonincreasing piecewise-linear function given by knot heights with left
/// and right values.
struct Pl {
    t: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl Pl {
    /// `inf { s : f(s) < rho }`.
    fn first_below(&self, rho: f64) -> f64 {
        if self.right[0] < rho {
            return self.t[0];
        }
        for k in 0..self.t.len() - 1 {
            let (a, b) = (self.right[k], self.left[k + 1]);
            if b < rho {
                if a == b {
                    return self.t[k];
                }
                return self.t[k] + (a - rho) / (a - b) * (self.t[k + 1] - self.t[k]);
            }
            if self.right[k + 1] < rho {
                return self.t[k + 1];
            }
        }
        *self.t.last().expect("nonempty")
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.left.iter().chain(&self.right).copied()
    }
}

/// `||u - u* o tau||_inf`, exact.
///
/// `u - v > t - s` somewhere iff `{u > t}` is not inside `{v > s}`, i.e.
/// `|xi_t - xi_inf| + r(t) > r(s)`; symmetrically `v - u > t - s` iff
/// `r(s) - |xi_inf - xi_s| < r(t)`. Both sides are piecewise linear in `t`,
/// so the suprema are attained at knots or where the left side crosses a
/// knot value of the right side; those candidates are checked on both sides.
pub fn aligned_sup_distance(spec: &ExtremalSpec) -> f64 {
    let prof = spec.profile();
    let xi = spec.xi_infinity();
    let knots = prof.knots();
    let top = prof.top_height();
    let off = |t: f64| distance(spec.center_at(t), xi);
    let off_left = |k: usize| {
        if k == 0 {
            off(0.0)
        } else {
            off(knots[k - 1].t)
        }
    };
    let r = Pl {
        t: knots.iter().map(|k| k.t).collect(),
        left: knots.iter().map(|k| k.r_minus).collect(),
        right: knots.iter().map(|k| k.r_plus).collect(),
    };
    let g = Pl {
        t: r.t.clone(),
        left: knots
            .iter()
            .enumerate()
            .map(|(k, kn)| kn.r_minus - off_left(k))
            .collect(),
        right: knots.iter().map(|kn| kn.r_plus - off(kn.t)).collect(),
    };
    let eps = 1e-12 * top.max(1e-300);
    let mut best: f64 = 0.0;
    for k in 0..knots.len().saturating_sub(1) {
        let (t0, t1) = (knots[k].t, knots[k + 1].t);
        let (r0, r1) = (knots[k].r_plus, knots[k + 1].r_minus);
        let d = off(t0);
        let radius = |t: f64| r0 + (t - t0) / (t1 - t0) * (r1 - r0);
        let mut cands = vec![t0, t0 + eps, t1 - eps];
        let mut cross = |rho: f64| {
            if r0 != r1 {
                let t = t0 + (r0 - rho) / (r0 - r1) * (t1 - t0);
                if t > t0 && t < t1 {
                    cands.extend([t - eps, t, t + eps]);
                }
            }
        };
        for v in r.values() {
            cross(v - d);
        }
        for v in g.values() {
            cross(v);
        }
        for t in cands {
            if !(t >= t0 && t < t1) {
                continue;
            }
            let rt = radius(t);
            if rt <= 0.0 {
                continue;
            }
            best = best.max(t - r.first_below(rt + d));
            best = best.max(t - g.first_below(rt));
        }
    }
    // Inverting r rounds; residues at the ulp scale of the heights are zero.
    if best <= 64.0 * f64::EPSILON * top {
        0.0
    } else {
        best
    }
}

/// Main bound: `||u - u* o tau||_q <= K_n^{1/q} ||u||_q^{1/n'} ||u X_C||_q^{1/n}`.
///
/// The q-th power chain gives `K_n` in front of `||u||_q^{q/n'} ||u X_C||_q^{q/n}`;
/// both normalizations are reported.
pub fn verify_theorem_main(spec: &ExtremalSpec, q: f64) -> Result<BoundReport> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid("q must be in [1, inf)"));
    }
    let c = dims_of(spec);
    let n = spec.n() as f64;
    let u_q = spec.lq_norm(q);
    let uc_q = spec.critical_lq_power(q).max(0.0).powf(1.0 / q);
    let lhs = aligned_lq_distance(spec, q)?;
    let core = u_q.powf(1.0 - 1.0 / n) * uc_q.powf(1.0 / n);
    let rhs = c.k_n.powf(1.0 / q) * core;
    Ok(BoundReport::new(
        "theorem-main",
        base_params(spec),
        lhs,
        rhs,
        DEFAULT_TOLERANCE,
    )
    .with("q", q)
    .with("u_lq", u_q)
    .with("u_critical_lq", uc_q)
    .with("lhs_q_power", lhs.powf(q))
    .with("rhs_q_power", c.k_n * core.powf(q))
    .with("rhs_k_n_unrooted", c.k_n * core))
}

fn sobolev_gradient(spec: &ExtremalSpec, p: f64) -> Result<f64> {
    spec.gradient_lp(p)
        .ok_or(Error::NotSobolev("value jumps make the gradient a measure"))
}

/// `(lambda_n(C) / omega_n)^{1/n}`.
fn critical_radius(spec: &ExtremalSpec) -> f64 {
    dims_of(spec).volume_radius(spec.stats().critical_measure)
}

/// Finite-measure bound: `||u - u* o tau||_p <= ||grad u||_p (lambda_n(C)/omega_n)^{1/n}`.
pub fn verify_theorem_finite(spec: &ExtremalSpec, p: f64) -> Result<BoundReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p must be in (1, inf)"));
    }
    let grad = sobolev_gradient(spec, p)?;
    let lhs = aligned_lq_distance(spec, p)?;
    let rc = critical_radius(spec);
    Ok(BoundReport::new(
        "theorem-finite",
        base_params(spec),
        lhs,
        grad * rc,
        DEFAULT_TOLERANCE,
    )
    .with("p", p)
    .with("gradient_lp", grad)
    .with("critical_radius", rc))
}

/// Sup-norm bound with a caller-supplied Morrey constant `M`:
/// `||u - u* o tau||_inf <= M ||grad u||_p (lambda_n(C)/omega_n)^{1/n - 1/p}`.
/// The report carries the `M`-free ratio as `dimensionless_ratio`.
pub fn verify_theorem_morrey(
    spec: &ExtremalSpec,
    p: f64,
    morrey_constant: f64,
) -> Result<BoundReport> {
    let n = spec.n() as f64;
    if !(p > n && p.is_finite()) {
        return Err(invalid(format!(
            "need n < p < inf, got p = {p} with n = {n}"
        )));
    }
    if !(morrey_constant > 0.0 && morrey_constant.is_finite()) {
        return Err(invalid("the Morrey constant must be positive"));
    }
    let grad = sobolev_gradient(spec, p)?;
    let scale = grad * critical_radius(spec).powf(1.0 - n / p);
    let lhs = aligned_sup_distance(spec);
    let ratio = if scale > 0.0 {
        Value::from(lhs / scale)
    } else {
        Value::Null
    };
    Ok(BoundReport::new(
        "theorem-morrey",
        base_params(spec),
        lhs,
        morrey_constant * scale,
        DEFAULT_TOLERANCE,
    )
    .with("p", p)
    .with("morrey_constant", morrey_constant)
    .with("gradient_lp", grad)
    .with("dimensionless_ratio", ratio))
}

/// The earlier L^1 bound with
/// `L_n = 2^{1/p'} omega_n^{-1/n}`:
/// `||u - u* o tau||_1 <= L_n ||grad u||_p |supp u|^{1/p' + (2n-1)/(2n^2)} |C|^{1/(2n^2)}`.
///
/// Also reports the finite-measure bound turned into an L^1 bound by
/// Hölder, `|supp u|^{1/p'} ||grad u||_p (|C|/omega_n)^{1/n}`, and its ratio
/// to this right-hand side.
pub fn verify_cf_bound(spec: &ExtremalSpec, p: f64) -> Result<BoundReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p must be in (1, inf)"));
    }
    let c = dims_of(spec);
    let n = spec.n() as f64;
    let stats = spec.stats();
    let grad = sobolev_gradient(spec, p)?;
    let p_dual_inv = 1.0 - 1.0 / p;
    let supp = stats.support_measure;
    let crit = stats.critical_measure;
    let rhs = c.cf_constant(p)
        * grad
        * supp.powf(p_dual_inv + (2.0 * n - 1.0) / (2.0 * n * n))
        * crit.powf(1.0 / (2.0 * n * n));
    let lhs = aligned_lq_distance(spec, 1.0)?;
    let finite_l1 = supp.powf(p_dual_inv) * grad * c.volume_radius(crit);
    let cmp = if rhs > 0.0 {
        Value::from(finite_l1 / rhs)
    } else {
        Value::Null
    };
    Ok(
        BoundReport::new("cf-bound", base_params(spec), lhs, rhs, DEFAULT_TOLERANCE)
            .with("p", p)
            .with("l_n", c.cf_constant(p))
            .with("gradient_lp", grad)
            .with("finite_bound_l1_rhs", finite_l1)
            .with("finite_over_cf", cmp),
    )
}

/// `||u - u* o tau||_q^q / ||u||_q^q <= K_n sup_t (F^s(t)/F(t))^{1/n}`.
pub fn verify_density_bound(spec: &ExtremalSpec, q: f64) -> Result<BoundReport> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid("q must be in [1, inf)"));
    }
    let c = dims_of(spec);
    let norm = spec.lq_power(q);
    let dist = aligned_lq_power(spec, q)?;
    let lhs = if norm > 0.0 { dist / norm } else { 0.0 };
    let sup = spec.density_sup();
    Ok(BoundReport::new(
        "density-bound",
        base_params(spec),
        lhs,
        c.k_n * sup.powf(1.0 / spec.n() as f64),
        DEFAULT_TOLERANCE,
    )
    .with("q", q)
    .with("density_sup", sup))
}

/// `int Psi(u)` by layer cake, exact for powers.
fn psi_integral(spec: &ExtremalSpec, psi: &YoungFunction) -> f64 {
    if let YoungFunction::Power { q, coef } = psi {
        return coef * spec.lq_power(*q);
    }
    let c = dims_of(spec);
    let mut breaks = spec.profile().heights();
    breaks.extend(psi.kinks());
    quad::piecewise(0.0, spec.top_height(), &breaks, 8, |t| {
        c.ball_volume(spec.profile().radius(t)) * psi.derivative(t)
    })
}

/// Young-function version of the main bound:
/// `int Psi(|u - u* o tau|) <= K_n (int Psi(u))^{1/n'} (int_{C_Phi} Psi(u))^{1/n}`,
/// where `C_Phi` adds to `C` the points whose gradient lies in the affine
/// set of `Phi`.
pub fn verify_corollary_young(
    spec: &ExtremalSpec,
    phi: &YoungFunction,
    psi: &YoungFunction,
) -> Result<BoundReport> {
    if !phi.strictly_increasing() {
        return Err(Error::NotYoung("Phi must be strictly increasing".into()));
    }
    let functional = dirichlet_spec(spec, phi)?;
    let c = dims_of(spec);
    let n = spec.n() as f64;
    let lhs = levelwise_psi_distance(spec, &spec.aligned_rearrangement(), psi)?;
    let total = psi_integral(spec, psi);
    let (on_c_phi, c_phi) = spec.extended_critical(|t| psi.value(t), |g| phi.in_affine_set(g));
    let rhs = c.k_n * total.powf(1.0 - 1.0 / n) * on_c_phi.powf(1.0 / n);
    Ok(BoundReport::new(
        "corollary-young",
        base_params(spec),
        lhs,
        rhs,
        DEFAULT_TOLERANCE,
    )
    .with("phi", serde_json::to_value(phi).unwrap_or(Value::Null))
    .with("psi", serde_json::to_value(psi).unwrap_or(Value::Null))
    .with("dirichlet", functional)
    .with("psi_integral", total)
    .with("psi_on_c_phi", on_c_phi)
    .with("c_phi_measure", c_phi)
    .with("critical_measure", spec.stats().critical_measure))
}

/// `int Phi(|u - u* o tau| (lambda_n(C_Phi)/omega_n)^{-1/n}) <= F(u)`,
/// with the intermediate `int Psi(|u - u* o tau|) <= int Psi(|grad u| ||D xi||)`
/// for `Psi(t) = Phi(t / ||D xi||)` in the parameters. For `Phi(t) = t` the
/// parameters also hold the L^1 form `||u - u* o tau||_1` against
/// `||grad u||_1 (lambda_n(C_Phi)/omega_n)^{1/n}`.
pub fn verify_corollary_finite(spec: &ExtremalSpec, phi: &YoungFunction) -> Result<BoundReport> {
    let functional = dirichlet_spec(spec, phi)?;
    let c = dims_of(spec);
    let (_, c_phi) = spec.extended_critical(|_| 0.0, |g| phi.in_affine_set(g));
    let aligned = spec.aligned_rearrangement();
    let params = base_params(spec)
        .into_iter()
        .chain([
            (
                "phi".to_string(),
                serde_json::to_value(phi).unwrap_or(Value::Null),
            ),
            ("c_phi_measure".to_string(), json!(c_phi)),
        ])
        .collect();
    if c_phi <= 0.0 {
        // The left side is infinite unless u = u* o tau; the bound says nothing.
        let mut r = BoundReport::new("corollary-finite", params, 0.0, 0.0, DEFAULT_TOLERANCE);
        r.vacuous = true;
        return Ok(r.with("dirichlet", functional));
    }
    let rho = c.volume_radius(c_phi);
    let lhs = levelwise_psi_distance(spec, &aligned, &phi.scaled_argument(rho))?;
    let mut report = BoundReport::new(
        "corollary-finite",
        params,
        lhs,
        functional,
        DEFAULT_TOLERANCE,
    )
    .with("c_phi_radius", rho);
    let dxi = spec.stats().center_variation;
    if dxi > 0.0 {
        let psi = phi.scaled_argument(dxi);
        let psi2_lhs = levelwise_psi_distance(spec, &aligned, &psi)?;
        let psi2_rhs = spec.gradient_integral(|g| phi.value(g), |_| true);
        report = report
            .with("center_variation", dxi)
            .with("psi2_lhs", psi2_lhs)
            .with("psi2_rhs", psi2_rhs)
            .with(
                "psi2_holds",
                psi2_lhs <= psi2_rhs * (1.0 + DEFAULT_TOLERANCE),
            );
    }
    if let YoungFunction::Power { q, coef } = phi {
        if *q == 1.0 && *coef == 1.0 {
            if let Some(g1) = spec.gradient_lp(1.0) {
                report = report
                    .with("l1_lhs", aligned_lq_distance(spec, 1.0)?)
                    .with("l1_rhs", g1 * rho);
            }
        }
    }
    Ok(report)
}

/// `||u - u* o tau||_q^q <= K_n int F^s(u)^{1/n} |grad u^q|`, the right side
/// by the coarea formula over the linear pieces of the profile.
pub fn verify_coarea_bound(spec: &ExtremalSpec, q: f64) -> Result<BoundReport> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid("q must be in [1, inf)"));
    }
    if !spec.stats().sobolev {
        return Err(Error::NotSobolev("coarea form needs a Sobolev function"));
    }
    let c = dims_of(spec);
    let n = spec.n() as f64;
    let lhs = aligned_lq_power(spec, q)?;
    let mut integral = 0.0;
    for s in spec.profile().segments() {
        if s.is_flat() {
            continue;
        }
        integral += quad::piecewise(s.t0, s.t1, &[], 4, |t| {
            spec.f_s(t).powf(1.0 / n) * q * t.powf(q - 1.0) * c.sphere_area(s.radius_at(t))
        });
    }
    Ok(BoundReport::new(
        "coarea-bound",
        base_params(spec),
        lhs,
        c.k_n * integral,
        DEFAULT_TOLERANCE,
    )
    .with("q", q))
}
