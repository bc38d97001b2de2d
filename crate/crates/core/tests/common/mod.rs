#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segdist::{GridMask, Mask, Metric, MetricResult64, Outcome};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spacings whose products and sums stay exact in binary floating point.
pub const SPACINGS_2D: [[f64; 2]; 4] = [[1.0, 1.0], [0.5, 0.5], [0.5, 2.0], [0.75, 1.25]];
pub const SPACINGS_3D: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [0.5, 0.5, 2.0], [0.75, 1.25, 1.5]];

/// A pair of overlapping ellipsoid blobs with speckle noise.
pub fn random_pair(rng: &mut ChaCha8Rng, dims: Vec<usize>, spacing: Vec<f64>) -> (Mask, Mask) {
    let blob = |rng: &mut ChaCha8Rng, jitter: f64| {
        let c: Vec<f64> = dims.iter().map(|&n| n as f64 * rng.gen_range(0.35..0.65)).collect();
        let r: Vec<f64> = dims.iter().map(|&n| (n as f64 * rng.gen_range(0.15..0.35)).max(1.0)).collect();
        let noise = rng.gen_range(0.0..0.08);
        let seed = rng.gen::<u64>();
        let mut local = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = c.iter().map(|_| local.gen_range(-jitter..=jitter)).collect();
        GridMask::from_fn(dims.clone(), spacing.clone(), |i| {
            let q: f64 = i
                .iter()
                .enumerate()
                .map(|(k, &x)| ((x as f64 - c[k] - shift[k]) / r[k]).powi(2))
                .sum();
            (q <= 1.0) ^ local.gen_bool(noise)
        })
        .unwrap()
    };
    let a = blob(rng, 0.0);
    let b = blob(rng, 2.0);
    (a, b)
}

pub fn random_dims(rng: &mut ChaCha8Rng, three_d: bool, max2: usize, max3: usize) -> Vec<usize> {
    if three_d {
        (0..3).map(|_| rng.gen_range(4..=max3)).collect()
    } else {
        (0..2).map(|_| rng.gen_range(4..=max2)).collect()
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn outcomes_close(x: &MetricResult64, y: &MetricResult64, tol: f64) -> Result<(), String> {
    for m in Metric::ALL {
        match (x.outcome(m), y.outcome(m)) {
            (Outcome::Value { value: a, warning: wa }, Outcome::Value { value: b, warning: wb }) => {
                if !rel_close(a, b, tol) || wa != wb {
                    return Err(format!("{m}: {a} ({wa:?}) vs {b} ({wb:?})"));
                }
            }
            (o1, o2) if o1 == o2 => {}
            (o1, o2) => return Err(format!("{m}: {o1:?} vs {o2:?}")),
        }
    }
    Ok(())
}
