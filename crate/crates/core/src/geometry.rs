//! Dimensional constants and exact ball geometry.
//!
//! Everything here is closed form. Ball intersections are available in
//! dimensions 1, 2 and 3 (interval arithmetic, lens areas, spherical caps);
//! in higher dimensions only the constants and the symmetric-difference bound
//! are provided.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad;

/// Volume of the unit ball in `R^n`, `pi^{n/2} / Gamma(n/2 + 1)`. `n = 0` gives 1.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    PI.powf(half) / libm::tgamma(half + 1.0)
}

/// Constants attached to a dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimConstants {
    pub n: usize,
    pub omega_n: f64,
    pub omega_n_minus_1: f64,
    /// `2 omega_{n-1} / omega_n`.
    pub k_n: f64,
}

impl DimConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let omega_n = unit_ball_volume(n);
        let omega_n_minus_1 = unit_ball_volume(n - 1);
        Ok(Self {
            n,
            omega_n,
            omega_n_minus_1,
            k_n: 2.0 * omega_n_minus_1 / omega_n,
        })
    }

    /// `L_n = 2^{1/p'} omega_n^{-1/n}` for the Cianchi–Fusco bound.
    pub fn cf_constant(&self, p: f64) -> f64 {
        let p_dual_inv = 1.0 - 1.0 / p;
        2f64.powf(p_dual_inv) * self.omega_n.powf(-1.0 / self.n as f64)
    }

    /// Radius of the ball with the given volume.
    pub fn volume_radius(&self, volume: f64) -> f64 {
        (volume.max(0.0) / self.omega_n).powf(1.0 / self.n as f64)
    }

    /// Surface area `n omega_n r^{n-1}` of the sphere of radius `r`.
    pub fn sphere_area(&self, r: f64) -> f64 {
        if self.n == 1 {
            return 2.0;
        }
        self.n as f64 * self.omega_n * r.powi(self.n as i32 - 1)
    }

    pub fn ball_volume(&self, r: f64) -> f64 {
        self.omega_n * r.powi(self.n as i32)
    }
}

/// `omega_n r^n`.
pub fn ball_volume(n: usize, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(r >= 0.0) {
        return Err(invalid(format!("radius must be nonnegative, got {r}")));
    }
    Ok(unit_ball_volume(n) * r.powi(n as i32))
}

/// Stability constant `K_n = 2 omega_{n-1} / omega_n`.
pub fn kn_constant(n: usize) -> Result<f64> {
    Ok(DimConstants::new(n)?.k_n)
}

/// `(int_0^{pi/2} cos^n theta dtheta)^{-1}` by adaptive quadrature; the
/// independent route to `K_n`.
pub fn kn_by_quadrature(n: usize) -> f64 {
    let f = |theta: f64| theta.cos().powi(n as i32);
    1.0 / quad::adaptive_simpson(&f, 0.0, PI / 2.0, 1e-14)
}

fn check_low_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n, "1, 2 or 3"))
    }
}

/// Volume of `B(xi, r1) ∩ B(eta, r2)` for `|xi - eta| = d`.
pub fn ball_intersection_volume(n: usize, r1: f64, r2: f64, d: f64) -> Result<f64> {
    check_low_dim(n)?;
    if !(r1 >= 0.0 && r2 >= 0.0 && d >= 0.0) {
        return Err(invalid("radii and distance must be nonnegative"));
    }
    Ok(intersection_unchecked(n, r1, r2, d))
}

pub(crate) fn intersection_unchecked(n: usize, r1: f64, r2: f64, d: f64) -> f64 {
    if r1 <= 0.0 || r2 <= 0.0 || d >= r1 + r2 {
        return 0.0;
    }
    let (small, large) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    if d <= large - small {
        return unit_ball_volume(n) * small.powi(n as i32);
    }
    match n {
        1 => r1 + r2 - d,
        2 => {
            let c1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
            let c2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
            let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
            r1 * r1 * c1.acos() + r2 * r2 * c2.acos() - 0.5 * k.max(0.0).sqrt()
        }
        3 => {
            let s = r1 + r2 - d;
            PI * s * s * (d * d + 2.0 * d * (r1 + r2) - 3.0 * (r1 - r2).powi(2)) / (12.0 * d)
        }
        _ => unreachable!("dimension checked by caller"),
    }
}

/// `lambda_n(B(xi, r1) \ B(eta, r2))` for `|xi - eta| = d`.
pub(crate) fn ball_difference_unchecked(n: usize, r1: f64, r2: f64, d: f64) -> f64 {
    if r1 <= 0.0 || d + r1 <= r2 {
        return 0.0;
    }
    let v = unit_ball_volume(n) * r1.powi(n as i32);
    (v - intersection_unchecked(n, r1, r2, d)).max(0.0)
}

/// Exact symmetric difference of two balls of radius `r` whose centers are `d` apart.
pub fn ball_symdiff_volume(n: usize, r: f64, d: f64) -> Result<f64> {
    check_low_dim(n)?;
    if !(r > 0.0) || !(d >= 0.0) {
        return Err(invalid("need r > 0 and d >= 0"));
    }
    let v = unit_ball_volume(n) * r.powi(n as i32);
    if d >= 2.0 * r {
        return Ok(2.0 * v);
    }
    Ok(2.0 * (v - intersection_unchecked(n, r, r, d)))
}

/// `2 omega_{n-1} (V / omega_n)^{1 - 1/n} d`: upper bound for the symmetric
/// difference of two translates, `d` apart, of a ball of volume `V`.
pub fn symdiff_bound(n: usize, ball_volume: f64, d: f64) -> Result<f64> {
    let c = DimConstants::new(n)?;
    if !(ball_volume >= 0.0 && d >= 0.0) {
        return Err(invalid("volume and distance must be nonnegative"));
    }
    let exponent = 1.0 - 1.0 / n as f64;
    Ok(2.0 * c.omega_n_minus_1 * (ball_volume / c.omega_n).powf(exponent) * d)
}
