//! Invariants of built extremals, checked on random profiles and center paths.

use proptest::prelude::*;
use pslab_core::extremal::{build_extremal, ExtremalSpec};
use pslab_core::geometry::DimConstants;
use pslab_core::measure::{center_variation_bound, CenterPath};
use pslab_core::rearrangement::{ProfileKnot, RadialProfile};
use pslab_core::verify::{aligned_lq_distance, aligned_sup_distance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
struct Step {
    dt: f64,
    shrink: f64,
    drop: f64,
    moves: f64,
    dir: Vec<f64>,
}

fn step(n: usize) -> impl Strategy<Value = Step> {
    (
        0.05..1.0f64,
        prop_oneof![Just(0.0), 0.05..0.5f64],
        prop_oneof![Just(0.0), 0.1..0.6f64],
        0.0..1.0f64,
        proptest::collection::vec(-1.0..1.0f64, n),
    )
        .prop_map(|(dt, shrink, drop, moves, dir)| Step {
            dt,
            shrink,
            drop,
            moves,
            dir,
        })
}

fn spec_strategy() -> impl Strategy<Value = ExtremalSpec> {
    (1usize..=3)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(step(n), 1..6)))
        .prop_map(|(n, steps)| build(n, &steps, true))
}

fn build(n: usize, steps: &[Step], move_centers: bool) -> ExtremalSpec {
    let mut knots = vec![ProfileKnot::continuous(0.0, 1.0)];
    let mut heights = vec![0.0];
    let mut centers = vec![vec![0.0; n]];
    let (mut t, mut r) = (0.0, 1.0);
    for (i, s) in steps.iter().enumerate() {
        t += s.dt;
        let r_minus = r * (1.0 - s.shrink);
        if i + 1 == steps.len() {
            knots.push(ProfileKnot::new(t, r_minus, 0.0));
            break;
        }
        let r_plus = r_minus * (1.0 - s.drop);
        knots.push(ProfileKnot::new(t, r_minus, r_plus));
        let len = s.dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if move_centers && r_plus < r_minus && len > 1e-3 {
            let scale = s.moves * (r_minus - r_plus) / len;
            let last = centers.last().unwrap().clone();
            heights.push(t);
            centers.push(
                last.iter()
                    .zip(&s.dir)
                    .map(|(c, d)| c + scale * d)
                    .collect(),
            );
        }
        r = r_plus;
    }
    let xi = centers.last().unwrap().clone();
    let profile = RadialProfile::new(n, knots).expect("valid profile");
    build_extremal(
        profile,
        CenterPath {
            heights,
            centers,
            xi_infinity: xi,
        },
    )
    .expect("nested by construction")
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `mu^s((s, t])` including the atom at the top, which `-dF` also carries.
fn singular_mass(spec: &ExtremalSpec, s: f64, t: f64) -> f64 {
    let d = spec.decomposition();
    let top = if t >= spec.top_height() && s < spec.top_height() {
        d.top_plateau.mass
    } else {
        0.0
    };
    d.singular_mass_between(s, t) + top
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn center_variation(spec in spec_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = spec.top_height();
        let d = spec.decomposition();
        for _ in 0..100 {
            let a = rng.gen_range(0.0..top);
            let b = rng.gen_range(0.0..top);
            let (s, t) = if a < b { (a, b) } else { (b, a) };
            if s == t {
                continue;
            }
            let moved = dist(spec.center_at(s), spec.center_at(t));
            let bound = center_variation_bound(&d, Some((s, t))).unwrap();
            prop_assert!(moved <= bound * (1.0 + 1e-12) + 1e-15, "{moved} > {bound}");
        }
        // Total variation of the path against the singular variation of r.
        let tv = spec.center_path().total_variation();
        let jumps: f64 = spec.profile().interior_jumps().map(|k| k.jump()).sum();
        prop_assert!(tv <= jumps + 1e-12);
        prop_assert!(tv <= center_variation_bound(&d, None).unwrap() + 1e-12);
    }

    #[test]
    fn radius_function_is_lipschitz_up_to_singular_mass(spec in spec_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = spec.n();
        let c = DimConstants::new(n).unwrap();
        let box_r = spec.bounding_radius() * 1.05;
        for _ in 0..10_000 / 48 + 1 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-box_r..box_r)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-box_r..box_r)).collect();
            let (ux, uy) = (spec.eval(&x), spec.eval(&y));
            let (lo, hi) = if ux <= uy { (&x, &y) } else { (&y, &x) };
            let (s, t) = (ux.min(uy), ux.max(uy));
            let lhs = (spec.radius_at(lo) - spec.radius_at(hi)).abs();
            let rhs = dist(lo, hi) + c.volume_radius(singular_mass(&spec, s, t));
            prop_assert!(lhs <= rhs + 1e-12, "{lhs} > {rhs} at {x:?} {y:?}");
        }
    }

    #[test]
    fn perimeter_identity_at_regular_heights(spec in spec_strategy()) {
        let n = spec.n();
        let c = DimConstants::new(n).unwrap();
        let omega = pslab_core::geometry::unit_ball_volume(n);
        for seg in spec.profile().segments().filter(|s| !s.is_flat() && s.r1 > 0.0) {
            let t = 0.5 * (seg.t0 + seg.t1);
            let h = 1e-6 * (seg.t1 - seg.t0);
            let f = |t: f64| spec.profile().distribution(t);
            let f_prime = (f(t + h) - f(t - h)) / (2.0 * h);
            let grad = 1.0 / seg.slope().abs();
            let per = n as f64 * omega.powf(1.0 / n as f64) * f(t).powf(1.0 - 1.0 / n as f64);
            prop_assert!((-f_prime * grad / per - 1.0).abs() < 1e-6);
            prop_assert!((per / c.sphere_area(seg.radius_at(t)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_set_carries_the_singular_part(spec in spec_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = spec.decomposition();
        let total = spec.stats().critical_measure;
        prop_assert!((d.singular_mass() - total).abs() <= 1e-12 * (1.0 + total));
        for _ in 0..20 {
            let t = rng.gen_range(0.0..spec.top_height());
            prop_assert!((spec.f_s(t) - d.f_s_at(t)).abs() <= 1e-12 * (1.0 + total));
        }
    }

    #[test]
    fn no_singular_part_means_no_distance(steps in proptest::collection::vec(step(2), 1..5), shift in proptest::collection::vec(-2.0..2.0f64, 2)) {
        let steps: Vec<Step> = steps
            .into_iter()
            .map(|s| Step { shrink: s.shrink.max(0.05), drop: 0.0, ..s })
            .collect();
        let spec = build(2, &steps, true).translate(&shift).unwrap();
        prop_assert_eq!(spec.decomposition().singular_mass(), 0.0);
        for q in [1.0, 2.0] {
            prop_assert_eq!(aligned_lq_distance(&spec, q).unwrap(), 0.0);
        }
        prop_assert_eq!(aligned_sup_distance(&spec), 0.0);
    }

    #[test]
    fn distances_ignore_translation(spec in spec_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..spec.n()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let moved = spec.translate(&shift).unwrap();
        let a = aligned_lq_distance(&spec, 1.0).unwrap();
        let b = aligned_lq_distance(&moved, 1.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        prop_assert!((aligned_sup_distance(&spec) - aligned_sup_distance(&moved)).abs() < 1e-9);
    }
}

#[test]
fn center_jump_without_plateau_is_rejected() {
    let profile = RadialProfile::from_points(2, &[(0.0, 1.0), (1.0, 0.0)]).unwrap();
    let path = CenterPath {
        heights: vec![0.0, 0.5],
        centers: vec![vec![0.0, 0.0], vec![0.1, 0.0]],
        xi_infinity: vec![0.1, 0.0],
    };
    assert!(build_extremal(profile, path).is_err());
}

#[test]
fn single_jump_identity_at_collinear_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let (a, rho) = (rng.gen_range(0.2..0.8), rng.gen_range(0.3..0.9));
        let rho_inner = rho * rng.gen_range(0.2..0.9);
        let len = rng.gen_range(0.0..1.0) * (rho - rho_inner);
        let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let e = [len * ang.cos(), len * ang.sin()];
        let spec = pslab_core::extremal::family_cone_frustrum(2, a, rho, rho_inner, &e).unwrap();
        let s = rng.gen_range(0.0..a);
        let t = rng.gen_range(a..1.0);
        let (cs, ct) = (spec.center_at(s).to_vec(), spec.center_at(t).to_vec());
        let moved = dist(&cs, &ct);
        if moved == 0.0 {
            continue;
        }
        let dir: Vec<f64> = ct.iter().zip(&cs).map(|(b, a)| (b - a) / moved).collect();
        let (rs, rt) = (spec.profile().radius(s), spec.profile().radius(t));
        let x: Vec<f64> = cs.iter().zip(&dir).map(|(c, d)| c + rs * d).collect();
        let y: Vec<f64> = ct.iter().zip(&dir).map(|(c, d)| c + rt * d).collect();
        // Both points sit on level boundaries, where R is the level radius.
        assert!((spec.profile().radius(spec.eval(&x)) - rs).abs() < 1e-9);
        assert!((spec.profile().radius(spec.eval(&y)) - rt).abs() < 1e-9);
        let identity = (rs - rt).abs() - dist(&x, &y);
        assert!((identity - moved).abs() < 1e-9, "{identity} vs {moved}");
    }
}

#[test]
fn singular_radius_variation_in_one_dimension() {
    // In 1D each plateau contributes two endpoint jumps of R of size
    // r- - r+, which is exactly its mass under mu.
    let spec = pslab_core::extremal::family_staircase(
        1,
        &[(1.0, 1.0), (2.0, 0.6), (3.0, 0.25)],
        &[vec![0.0], vec![0.3], vec![0.5]],
    )
    .unwrap();
    let jumps: f64 = spec
        .profile()
        .interior_jumps()
        .map(|k| 2.0 * k.jump())
        .sum();
    let d = spec.decomposition();
    let inf_f = spec.profile().distribution(spec.top_height() - 1e-12);
    assert!(jumps <= d.singular_mass() + inf_f + 1e-12);
}
