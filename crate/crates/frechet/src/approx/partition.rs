//! Block partition of a curve pair for the fast decision procedure. Both
//! curves are padded by splitting their final edge into equal parts until
//! the edge counts are divisible by the block sizes; padding leaves the
//! traced curve unchanged.

use crate::error::Result;
use crate::geometry::Curve;
use crate::params::Params;

#[derive(Debug, Clone)]
pub struct Partition {
    /// Padded long curve (block size mu1).
    pub tau: Curve,
    /// Padded short curve (block size mu2).
    pub sigma: Curve,
    /// Vertex indices of block starts on tau: `0, mu1, 2*mu1, ...,
    /// n_edges` (includes the final boundary).
    pub tau_starts: Vec<usize>,
    pub sigma_starts: Vec<usize>,
    /// Extra edges appended to each curve by padding.
    pub tau_pad_edges: usize,
    pub sigma_pad_edges: usize,
}

/// Split the final edge into `1 + extra` equal parts.
pub(crate) fn pad_final_edge(c: &Curve, extra: usize) -> Curve {
    if extra == 0 || c.n_edges() == 0 {
        return c.clone();
    }
    let n = c.n_vertices();
    let a = c.pt(n - 2).to_vec();
    let b = c.pt(n - 1).to_vec();
    let mut pts: Vec<Vec<f64>> = (0..n - 1).map(|i| c.pt(i).to_vec()).collect();
    let parts = extra + 1;
    for k in 1..=parts {
        let f = k as f64 / parts as f64;
        pts.push(
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x + f * (y - x))
                .collect(),
        );
    }
    Curve::new(pts).expect("padding cannot create duplicates on a proper edge")
}

fn pad_to_multiple(c: &Curve, block: usize) -> (Curve, usize) {
    let e = c.n_edges();
    let rem = e % block;
    let extra = if rem == 0 { 0 } else { block - rem };
    (pad_final_edge(c, extra), extra)
}

/// Partition the (already role-ordered) pair into blocks per the parameter
/// schedule.
pub fn partition(tau: &Curve, sigma: &Curve, p: &Params) -> Result<Partition> {
    let (tau_p, tau_pad) = pad_to_multiple(tau, p.mu1);
    let (sigma_p, sigma_pad) = pad_to_multiple(sigma, p.mu2);
    let tau_starts = (0..=tau_p.n_edges() / p.mu1).map(|k| k * p.mu1).collect();
    let sigma_starts = (0..=sigma_p.n_edges() / p.mu2).map(|l| l * p.mu2).collect();
    Ok(Partition {
        tau: tau_p,
        sigma: sigma_p,
        tau_starts,
        sigma_starts,
        tau_pad_edges: tau_pad,
        sigma_pad_edges: sigma_pad,
    })
}

impl Partition {
    pub fn n_tau_blocks(&self) -> usize {
        self.tau_starts.len() - 1
    }

    pub fn n_sigma_blocks(&self) -> usize {
        self.sigma_starts.len() - 1
    }

    /// Block k of tau as an owned curve (vertices `[k*mu1, (k+1)*mu1]`).
    pub fn tau_block(&self, k: usize) -> Curve {
        self.block_of(&self.tau, self.tau_starts[k], self.tau_starts[k + 1])
    }

    pub fn sigma_block(&self, l: usize) -> Curve {
        self.block_of(&self.sigma, self.sigma_starts[l], self.sigma_starts[l + 1])
    }

    fn block_of(&self, c: &Curve, a: usize, b: usize) -> Curve {
        c.subcurve(c.vertex_cp(a), c.vertex_cp(b))
            .expect("block boundaries are ordered")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ScheduleOverride;
    use crate::synthetic::{generate_synthetic, SyntheticKind};
    use crate::wavefront::decide_exact;

    fn params(mu1: usize, mu2: usize, mu3: usize) -> Params {
        Params::with_overrides(
            1.0,
            0.5,
            100,
            0,
            ScheduleOverride {
                mu1: Some(mu1),
                mu2: Some(mu2),
                mu3: Some(mu3),
                omega: Some(1),
            },
        )
        .unwrap()
    }

    #[test]
    fn block_boundaries_follow_schedule() {
        // 10 edges, blocks of 5: starts at vertices 0, 5, 10.
        let tau = generate_synthetic(&SyntheticKind::Walk { dim: 2, step: 1.0 }, 11, 3).unwrap();
        let sigma = generate_synthetic(&SyntheticKind::Walk { dim: 2, step: 1.0 }, 5, 4).unwrap();
        let p = params(5, 2, 1);
        let part = partition(&tau, &sigma, &p).unwrap();
        assert_eq!(part.tau_starts, vec![0, 5, 10]);
        // 4 edges, blocks of 2: starts 0, 2, 4.
        assert_eq!(part.sigma_starts, vec![0, 2, 4]);
        assert_eq!(part.tau_pad_edges, 0);
    }

    #[test]
    fn padding_splits_final_edge_and_preserves_distance() {
        // 7 edges, block size 3: pad to 9 edges.
        let tau = generate_synthetic(&SyntheticKind::Walk { dim: 2, step: 1.0 }, 8, 9).unwrap();
        let sigma = generate_synthetic(&SyntheticKind::Walk { dim: 2, step: 1.0 }, 5, 2).unwrap();
        let p = params(3, 2, 1);
        let part = partition(&tau, &sigma, &p).unwrap();
        assert_eq!(part.tau.n_edges(), 9);
        assert_eq!(part.tau_pad_edges, 2);
        assert!(decide_exact(&tau, &part.tau, 0.0).unwrap());
    }

    #[test]
    fn sub_block_boundaries() {
        // Sub-blocks tile all but the first edge of each sigma block:
        // with mu2 = 2, mu3 = 1 the only sub-block covers the second edge.
        let p = params(4, 2, 1);
        assert_eq!((p.mu2 - 1) / p.mu3, 1);
        // Local boundary vertices within a block: 1 + r*mu3.
        let bounds: Vec<usize> = (0..=(p.mu2 - 1) / p.mu3).map(|r| 1 + r * p.mu3).collect();
        assert_eq!(bounds, vec![1, 2]);
    }
}
