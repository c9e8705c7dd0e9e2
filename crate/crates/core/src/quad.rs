//! One-dimensional quadrature helpers shared by the levelwise integrators.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

const GAUSS_ORDER: usize = 16;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(GAUSS_ORDER).unwrap()))
}

/// Gauss–Legendre (16 nodes) over `[a, b]`.
pub fn gauss<F: FnMut(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    if b <= a {
        return 0.0;
    }
    rule().integrate(a, b, f)
}

/// Composite Gauss–Legendre over `[lo, hi]`, split at every break point inside
/// the interval and then into `panels` equal panels per piece.
///
/// Integrands here are smooth between break points (profile knots, Young
/// function breakpoints), so splitting there restores spectral accuracy.
pub fn piecewise<F: FnMut(f64) -> f64>(
    lo: f64,
    hi: f64,
    breaks: &[f64],
    panels: usize,
    mut f: F,
) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    cuts.push(lo);
    cuts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
    let panels = panels.max(1);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let step = (b - a) / panels as f64;
        for k in 0..panels {
            let pa = a + step * k as f64;
            let pb = if k + 1 == panels { b } else { pa + step };
            total += gauss(pa, pb, &mut f);
        }
    }
    total
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }

    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_is_exact_for_polynomials() {
        let v = gauss(0.0, 2.0, |x| x.powi(7) - 3.0 * x * x);
        let exact = 2f64.powi(8) / 8.0 - 8.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn piecewise_handles_kinks() {
        let v = piecewise(-1.0, 2.0, &[0.0, 1.0], 2, |x: f64| {
            x.abs() + (x - 1.0).max(0.0)
        });
        assert!((v - (0.5 + 2.0 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn simpson_sine() {
        let v = adaptive_simpson(&f64::sin, 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
    }
}
