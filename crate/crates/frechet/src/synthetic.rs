//! Deterministic synthetic curve generation for tests and benchmarks.

use crate::error::{FrechetError, Result};
use crate::geometry::Curve;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Families of generated curves. All generators are deterministic in
/// `(kind, n, seed)` and collapse duplicate vertices.
#[derive(Debug, Clone)]
pub enum SyntheticKind {
    /// Random walk with the given step length, in `dim` dimensions.
    Walk { dim: usize, step: f64 },
    /// Horizontal sawtooth alternating between +amplitude and -amplitude.
    Zigzag { amplitude: f64 },
    /// Noisy arc samples of a circle with the given radius.
    Circle { radius: f64 },
    /// A copy of `base` with uniform noise of the given magnitude per
    /// coordinate. `n` is ignored; the copy keeps the base vertex count.
    PerturbedCopy { base: Curve, noise: f64 },
}

pub fn generate_synthetic(kind: &SyntheticKind, n: usize, seed: u64) -> Result<Curve> {
    if n < 2 {
        return Err(FrechetError::InvalidInput(
            "synthetic curves need n >= 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SyntheticKind::Walk { dim, step } => {
            if *dim == 0 {
                return Err(FrechetError::InvalidInput("walk dimension 0".into()));
            }
            let mut pts = Vec::with_capacity(n);
            let mut cur = vec![0.0; *dim];
            pts.push(cur.clone());
            for _ in 1..n {
                for x in cur.iter_mut() {
                    *x += step * (rng.gen::<f64>() * 2.0 - 1.0);
                }
                pts.push(cur.clone());
            }
            Curve::new(pts)
        }
        SyntheticKind::Zigzag { amplitude } => {
            let pts = (0..n)
                .map(|i| {
                    let y = if i % 2 == 0 { *amplitude } else { -*amplitude };
                    vec![i as f64, y]
                })
                .collect();
            Curve::new(pts)
        }
        SyntheticKind::Circle { radius } => {
            let pts = (0..n)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * (i as f64) / (n as f64);
                    let jitter = 1.0 + 0.02 * (rng.gen::<f64>() - 0.5);
                    vec![radius * jitter * a.cos(), radius * jitter * a.sin()]
                })
                .collect();
            Curve::new(pts)
        }
        SyntheticKind::PerturbedCopy { base, noise } => {
            let pts = base
                .vertices()
                .map(|p| {
                    p.iter()
                        .map(|x| x + noise * (rng.gen::<f64>() * 2.0 - 1.0))
                        .collect()
                })
                .collect();
            Curve::new(pts)
        }
    }
}
