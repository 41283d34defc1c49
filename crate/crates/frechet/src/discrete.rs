//! Discrete Fréchet distance: vertex-to-vertex reachability propagation with
//! arbitrary vertex-set sources, plus exact decision and value computation.

use crate::counters::WorkCounters;
use crate::error::{FrechetError, Result};
use crate::geometry::{dist_slice, Curve};

/// Membership over the vertices of a host curve. Sparse sets are kept as
/// sorted index lists, dense ones as bitsets; the crossover is 1/8 density.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexSet {
    Sparse { len: usize, members: Vec<u32> },
    Dense { len: usize, words: Vec<u64> },
}

impl VertexSet {
    pub fn empty(len: usize) -> VertexSet {
        VertexSet::Sparse {
            len,
            members: Vec::new(),
        }
    }

    pub fn from_sorted(len: usize, members: Vec<u32>) -> VertexSet {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.iter().all(|&m| (m as usize) < len));
        let s = VertexSet::Sparse { len, members };
        s.normalized()
    }

    pub fn singleton(len: usize, v: usize) -> VertexSet {
        VertexSet::from_sorted(len, vec![v as u32])
    }

    pub fn full(len: usize) -> VertexSet {
        VertexSet::from_sorted(len, (0..len as u32).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            VertexSet::Sparse { len, .. } | VertexSet::Dense { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn count(&self) -> usize {
        match self {
            VertexSet::Sparse { members, .. } => members.len(),
            VertexSet::Dense { words, .. } => words.iter().map(|w| w.count_ones() as usize).sum(),
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        match self {
            VertexSet::Sparse { members, .. } => members.binary_search(&(v as u32)).is_ok(),
            VertexSet::Dense { words, .. } => {
                (words[v / 64] >> (v % 64)) & 1 == 1
            }
        }
    }

    pub fn insert(&mut self, v: usize) {
        match self {
            VertexSet::Sparse { members, .. } => {
                if let Err(pos) = members.binary_search(&(v as u32)) {
                    members.insert(pos, v as u32);
                }
            }
            VertexSet::Dense { words, .. } => {
                words[v / 64] |= 1 << (v % 64);
            }
        }
        if let VertexSet::Sparse { len, members } = self {
            if members.len() * 8 > *len {
                *self = VertexSet::from_members_dense(*len, members);
            }
        }
    }

    fn from_members_dense(len: usize, members: &[u32]) -> VertexSet {
        let mut words = vec![0u64; (len + 63) / 64];
        for &m in members {
            words[m as usize / 64] |= 1 << (m as usize % 64);
        }
        VertexSet::Dense { len, words }
    }

    fn normalized(self) -> VertexSet {
        match &self {
            VertexSet::Sparse { len, members } if members.len() * 8 > *len => {
                VertexSet::from_members_dense(*len, members)
            }
            _ => self,
        }
    }

    pub fn iter_sorted(&self) -> Vec<usize> {
        match self {
            VertexSet::Sparse { members, .. } => members.iter().map(|&m| m as usize).collect(),
            VertexSet::Dense { len, words } => {
                let mut out = Vec::new();
                for v in 0..*len {
                    if (words[v / 64] >> (v % 64)) & 1 == 1 {
                        out.push(v);
                    }
                }
                out
            }
        }
    }

    pub fn max_member(&self) -> Option<usize> {
        match self {
            VertexSet::Sparse { members, .. } => members.last().map(|&m| m as usize),
            VertexSet::Dense { len, words } => {
                for v in (0..*len).rev() {
                    if (words[v / 64] >> (v % 64)) & 1 == 1 {
                        return Some(v);
                    }
                }
                None
            }
        }
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for v in other.iter_sorted() {
            self.insert(v);
        }
    }
}

/// Pairwise vertex reachability from arbitrary start sources.
///
/// `w_j` ends up in the set of `v_i` iff `(v_i, w_j)` is delta-reachable
/// from `(v_1, w_p)` for some `w_p` in `s_sigma` or from `(v_x, w_1)` for
/// some `v_x` in `s_tau`, where reachable means a monotone vertex matching
/// of the bounded subsequences stays within delta.
pub struct DisWaveOutput {
    /// `per_tau_vertex[i]`: vertices of sigma reachable together with `v_i`.
    pub per_tau_vertex: Vec<VertexSet>,
    /// `per_sigma_vertex[j]`: vertices of tau reachable together with `w_j`.
    pub per_sigma_vertex: Vec<VertexSet>,
}

pub fn dis_wave(
    tau: &Curve,
    sigma: &Curve,
    delta: f64,
    s_tau: &VertexSet,
    s_sigma: &VertexSet,
) -> Result<DisWaveOutput> {
    let mut c = WorkCounters::default();
    let grid = dis_wave_grid(
        &tau.vertices().collect::<Vec<_>>(),
        &sigma.vertices().collect::<Vec<_>>(),
        delta,
        s_tau,
        s_sigma,
        &mut c,
    )?;
    Ok(grid.into_output())
}

/// Boolean reachability grid, row-major over tau.
pub(crate) struct DisGrid {
    pub n: usize,
    pub m: usize,
    bits: Vec<u64>,
}

impl DisGrid {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        let idx = i * self.m + j;
        (self.bits[idx / 64] >> (idx % 64)) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        let idx = i * self.m + j;
        self.bits[idx / 64] |= 1 << (idx % 64);
    }

    pub fn into_output(self) -> DisWaveOutput {
        let mut per_tau = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut members = Vec::new();
            for j in 0..self.m {
                if self.get(i, j) {
                    members.push(j as u32);
                }
            }
            per_tau.push(VertexSet::from_sorted(self.m, members));
        }
        let mut per_sigma = Vec::with_capacity(self.m);
        for j in 0..self.m {
            let mut members = Vec::new();
            for i in 0..self.n {
                if self.get(i, j) {
                    members.push(i as u32);
                }
            }
            per_sigma.push(VertexSet::from_sorted(self.n, members));
        }
        DisWaveOutput {
            per_tau_vertex: per_tau,
            per_sigma_vertex: per_sigma,
        }
    }
}

pub(crate) fn dis_wave_grid(
    tau: &[&[f64]],
    sigma: &[&[f64]],
    delta: f64,
    s_tau: &VertexSet,
    s_sigma: &VertexSet,
    counters: &mut WorkCounters,
) -> Result<DisGrid> {
    let n = tau.len();
    let m = sigma.len();
    if s_tau.len() != n || s_sigma.len() != m {
        return Err(FrechetError::InvalidInput(format!(
            "vertex set size mismatch: {}/{} and {}/{}",
            s_tau.len(),
            n,
            s_sigma.len(),
            m
        )));
    }
    if delta < 0.0 {
        return Err(FrechetError::InvalidInput("negative delta".into()));
    }
    let mut g = DisGrid {
        n,
        m,
        bits: vec![0; (n * m + 63) / 64],
    };
    for j in 0..m {
        counters.wavefront_cells += 1;
        let seeded = s_sigma.contains(j) || (j == 0 && s_tau.contains(0));
        if dist_slice(tau[0], sigma[j]) <= delta && (seeded || (j > 0 && g.get(0, j - 1))) {
            g.set(0, j);
        }
    }
    // First column restarts from tau-side sources.
    for i in 1..n {
        counters.wavefront_cells += 1;
        if dist_slice(tau[i], sigma[0]) <= delta && (s_tau.contains(i) || g.get(i - 1, 0)) {
            g.set(i, 0);
        }
    }
    for i in 1..n {
        for j in 1..m {
            counters.wavefront_cells += 1;
            if dist_slice(tau[i], sigma[j]) <= delta
                && (g.get(i - 1, j) || g.get(i, j - 1) || g.get(i - 1, j - 1))
            {
                g.set(i, j);
            }
        }
    }
    Ok(g)
}

/// Exact decision for the discrete Fréchet distance.
pub fn discrete_decide_exact(tau: &Curve, sigma: &Curve, delta: f64) -> Result<bool> {
    let mut c = WorkCounters::default();
    discrete_decide_exact_counted(tau, sigma, delta, &mut c)
}

pub fn discrete_decide_exact_counted(
    tau: &Curve,
    sigma: &Curve,
    delta: f64,
    counters: &mut WorkCounters,
) -> Result<bool> {
    let tv: Vec<&[f64]> = tau.vertices().collect();
    let sv: Vec<&[f64]> = sigma.vertices().collect();
    decide_discrete_slices(&tv, &sv, delta, counters)
}

pub(crate) fn decide_discrete_slices(
    tau: &[&[f64]],
    sigma: &[&[f64]],
    delta: f64,
    counters: &mut WorkCounters,
) -> Result<bool> {
    let n = tau.len();
    let m = sigma.len();
    if n == 0 || m == 0 {
        return Err(FrechetError::EmptyCurve);
    }
    // Rolling single row of the reachability DP.
    let mut prev = vec![false; m];
    for i in 0..n {
        let mut cur = vec![false; m];
        for j in 0..m {
            counters.wavefront_cells += 1;
            if dist_slice(tau[i], sigma[j]) > delta {
                continue;
            }
            let ok = if i == 0 && j == 0 {
                true
            } else {
                (i > 0 && prev[j]) || (j > 0 && cur[j - 1]) || (i > 0 && j > 0 && prev[j - 1])
            };
            cur[j] = ok;
        }
        prev = cur;
    }
    Ok(prev[m - 1])
}

/// Exact discrete Fréchet value: binary search over the sorted multiset of
/// pairwise vertex distances (the value is always one of them).
pub fn discrete_compute_exact(tau: &Curve, sigma: &Curve) -> Result<f64> {
    let mut c = WorkCounters::default();
    discrete_compute_exact_counted(tau, sigma, &mut c)
}

pub fn discrete_compute_exact_counted(
    tau: &Curve,
    sigma: &Curve,
    counters: &mut WorkCounters,
) -> Result<f64> {
    if tau.dim() != sigma.dim() {
        return Err(FrechetError::DimensionMismatch(tau.dim(), sigma.dim()));
    }
    let tv: Vec<&[f64]> = tau.vertices().collect();
    let sv: Vec<&[f64]> = sigma.vertices().collect();
    let mut dists: Vec<f64> = Vec::with_capacity(tv.len() * sv.len());
    for a in &tv {
        for b in &sv {
            dists.push(dist_slice(a, b));
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dists.dedup();
    let mut lo = 0usize;
    let mut hi = dists.len() - 1;
    if decide_discrete_slices(&tv, &sv, dists[lo], counters)? {
        return Ok(dists[lo]);
    }
    debug_assert!(decide_discrete_slices(&tv, &sv, dists[hi], counters).unwrap());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if decide_discrete_slices(&tv, &sv, dists[mid], counters)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(dists[hi])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn curve2(pts: &[(f64, f64)]) -> Curve {
        Curve::new(pts.iter().map(|&(x, y)| vec![x, y]).collect()).unwrap()
    }

    /// Textbook max-min recurrence, used as a local cross-check.
    fn dp_value(tau: &Curve, sigma: &Curve) -> f64 {
        let n = tau.n_vertices();
        let m = sigma.n_vertices();
        let mut dp = vec![vec![0.0f64; m]; n];
        for i in 0..n {
            for j in 0..m {
                let d = dist_slice(tau.pt(i), sigma.pt(j));
                let prev: f64 = if i == 0 && j == 0 {
                    0.0
                } else {
                    let mut best = f64::INFINITY;
                    if i > 0 {
                        best = best.min(dp[i - 1][j]);
                    }
                    if j > 0 {
                        best = best.min(dp[i][j - 1]);
                    }
                    if i > 0 && j > 0 {
                        best = best.min(dp[i - 1][j - 1]);
                    }
                    best
                };
                dp[i][j] = d.max(prev);
            }
        }
        dp[n - 1][m - 1]
    }

    #[test]
    fn empty_sources_empty_output() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 0.0)]);
        let sigma = curve2(&[(0.0, 0.0), (1.0, 0.0)]);
        let out = dis_wave(
            &tau,
            &sigma,
            10.0,
            &VertexSet::empty(2),
            &VertexSet::empty(2),
        )
        .unwrap();
        assert!(out.per_tau_vertex.iter().all(|s| s.is_empty()));
    }

    #[test]
    fn huge_delta_full_reach() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (2.0, 1.0)]);
        let out = dis_wave(
            &tau,
            &sigma,
            100.0,
            &VertexSet::singleton(3, 0),
            &VertexSet::singleton(2, 0),
        )
        .unwrap();
        assert_eq!(out.per_tau_vertex[2].count(), 2);
    }

    #[test]
    fn equal_sequences_zero() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]);
        assert_eq!(discrete_compute_exact(&tau, &tau).unwrap(), 0.0);
    }

    #[test]
    fn offset_pair_is_one() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(discrete_compute_exact(&tau, &sigma).unwrap(), 1.0);
    }

    #[test]
    fn value_matches_textbook_dp() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let n = rng.gen_range(2..40);
            let m = rng.gen_range(2..40);
            let tau = crate::synthetic::generate_synthetic(
                &crate::synthetic::SyntheticKind::Walk { dim: 2, step: 1.0 },
                n,
                rng.gen(),
            )
            .unwrap();
            let sigma = crate::synthetic::generate_synthetic(
                &crate::synthetic::SyntheticKind::Walk { dim: 2, step: 1.0 },
                m,
                rng.gen(),
            )
            .unwrap();
            let v = discrete_compute_exact(&tau, &sigma).unwrap();
            let w = dp_value(&tau, &sigma);
            assert!((v - w).abs() <= 1e-12 * (1.0 + w));
        }
    }

    #[test]
    fn vertex_set_representation_switches() {
        let mut s = VertexSet::empty(64);
        for v in 0..16 {
            s.insert(v * 4);
        }
        assert!(matches!(s, VertexSet::Dense { .. }));
        assert_eq!(s.count(), 16);
        assert!(s.contains(60));
        assert!(!s.contains(61));
        assert_eq!(s.max_member(), Some(60));
    }
}
