//! Seeded random test fields.

use pslab_core::field::Domain;
use pslab_core::GridField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Half width of the square the random fields live on.
pub const HALF_WIDTH: f64 = 1.0;

/// A sum of 2 to 5 compactly supported `C^2` bumps `a (1 - |x - c|^2 / w^2)_+^3`
/// on `[-1, 1]^2`, vanishing near the boundary.
pub fn random_smooth_field(seed: u64, resolution: usize) -> GridField {
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
                    let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
                    a * (1.0 - d2 / (w * w)).max(0.0).powi(3)
                })
                .sum()
        },
        &Domain::cube(2, HALF_WIDTH),
        resolution,
    )
    .expect("bumps stay inside the domain")
}
