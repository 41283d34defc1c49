//! Vertex-restricted curve simplification with certified error, under both
//! the continuous and the discrete distance.
//!
//! Continuous: the minimum-vertex subsequence (keeping both endpoints) in
//! which every shortcut segment stays within `c_simp * delta` Fréchet
//! distance of the subcurve it replaces. Discrete: the minimum-size
//! subsequence within `c_simp * delta` discrete Fréchet distance of the
//! whole sequence. Both are computed by dynamic programming and certified
//! against the exact decision procedures.

use crate::error::{FrechetError, Result};
use crate::geometry::{Curve, CurvePoint};
use crate::matching::{
    build_discrete_matching_slices, build_matching, DiscreteMatching, Matching,
};
use crate::counters::WorkCounters;
use crate::wavefront::decide_exact_counted;

/// Default multiplier paid for restricting simplification vertices to the
/// input's vertices.
pub const DEFAULT_C_SIMP: f64 = 2.0;

/// The matching between an original curve and its simplification.
#[derive(Debug, Clone)]
pub enum SimplificationMatching {
    Continuous(Matching),
    Discrete(DiscreteMatching),
}

/// A simplified curve with its certificate.
#[derive(Debug, Clone)]
pub struct Simplification {
    pub simplified: Curve,
    /// Indices into the original curve's vertices (strictly increasing,
    /// first and last kept).
    pub vertex_indices: Vec<usize>,
    pub matching: SimplificationMatching,
    /// Certified distance between original and simplified curve.
    pub error_bound: f64,
    pub budget_used: usize,
}

impl Simplification {
    pub fn matching_continuous(&self) -> &Matching {
        match &self.matching {
            SimplificationMatching::Continuous(m) => m,
            SimplificationMatching::Discrete(_) => panic!("discrete matching"),
        }
    }

    pub fn matching_discrete(&self) -> &DiscreteMatching {
        match &self.matching {
            SimplificationMatching::Discrete(m) => m,
            SimplificationMatching::Continuous(_) => panic!("continuous matching"),
        }
    }
}

/// Shortcut feasibility: is the segment `v_a v_b` within `threshold` of the
/// subcurve between those vertices?
pub(crate) fn shortcut_feasible(
    tau: &Curve,
    a: usize,
    b: usize,
    threshold: f64,
    counters: &mut WorkCounters,
) -> Result<bool> {
    debug_assert!(a < b);
    let seg = Curve::new(vec![tau.pt(a).to_vec(), tau.pt(b).to_vec()])
        .expect("proper edge endpoints");
    let sub = tau.subcurve(tau.vertex_cp(a), tau.vertex_cp(b))?;
    decide_exact_counted(&seg, &sub, threshold, counters)
}

/// All-pairs shortcut reachability inside one curve: `dist[a][b]` is the
/// minimum vertex count of a shortcut path from `a` to `b`, `parent` its
/// reconstruction table. Shared by the per-block preprocessing.
pub(crate) struct ShortcutIndex {
    n: usize,
    #[allow(dead_code)]
    feas: Vec<bool>,
    dist: Vec<u32>,
    parent: Vec<u32>,
}

impl ShortcutIndex {
    pub fn build(tau: &Curve, threshold: f64, counters: &mut WorkCounters) -> Result<ShortcutIndex> {
        let n = tau.n_vertices();
        let mut feas = vec![false; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                feas[a * n + b] = shortcut_feasible(tau, a, b, threshold, counters)?;
            }
        }
        let mut dist = vec![u32::MAX; n * n];
        let mut parent = vec![u32::MAX; n * n];
        for a in 0..n {
            dist[a * n + a] = 1;
            for b in (a + 1)..n {
                let mut best = u32::MAX;
                let mut arg = u32::MAX;
                for c in a..b {
                    if feas[c * n + b] && dist[a * n + c] != u32::MAX {
                        let cand = dist[a * n + c] + 1;
                        if cand < best {
                            best = cand;
                            arg = c as u32;
                        }
                    }
                }
                dist[a * n + b] = best;
                parent[a * n + b] = arg;
            }
        }
        Ok(ShortcutIndex { n, feas, dist, parent })
    }

    /// Minimum vertex count of a shortcut path from `a` to `b` inclusive.
    pub fn min_vertices(&self, a: usize, b: usize) -> Option<usize> {
        let d = self.dist[a * self.n + b];
        if d == u32::MAX {
            None
        } else {
            Some(d as usize)
        }
    }

    pub fn path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        self.min_vertices(a, b)?;
        let mut out = vec![b];
        let mut cur = b;
        while cur != a {
            let p = self.parent[a * self.n + cur];
            debug_assert!(p != u32::MAX);
            cur = p as usize;
            out.push(cur);
        }
        out.reverse();
        Some(out)
    }
}

/// Minimum-vertex vertex-restricted simplification under the continuous
/// distance, or `None` if it needs more than `budget` vertices.
pub fn simplify_continuous(
    tau: &Curve,
    delta: f64,
    budget: usize,
    c_simp: f64,
) -> Result<Option<Simplification>> {
    let mut c = WorkCounters::default();
    simplify_continuous_counted(tau, delta, budget, c_simp, &mut c)
}

pub fn simplify_continuous_counted(
    tau: &Curve,
    delta: f64,
    budget: usize,
    c_simp: f64,
    counters: &mut WorkCounters,
) -> Result<Option<Simplification>> {
    if delta < 0.0 || budget < 2 {
        return Err(FrechetError::InvalidInput(
            "need delta >= 0 and budget >= 2".into(),
        ));
    }
    if tau.n_vertices() < 2 {
        return Err(FrechetError::InvalidInput(
            "simplification needs >= 2 vertices".into(),
        ));
    }
    let idx = ShortcutIndex::build(tau, c_simp * delta, counters)?;
    simplify_continuous_from_index(tau, &idx, 0, tau.n_vertices() - 1, delta, budget, c_simp)
}

/// Continuous simplification of the vertex range `[a, b]` using a prebuilt
/// shortcut index for the whole curve.
pub(crate) fn simplify_continuous_from_index(
    tau: &Curve,
    idx: &ShortcutIndex,
    a: usize,
    b: usize,
    delta: f64,
    budget: usize,
    c_simp: f64,
) -> Result<Option<Simplification>> {
    let count = match idx.min_vertices(a, b) {
        Some(k) if k <= budget => k,
        _ => return Ok(None),
    };
    let path = idx.path(a, b).expect("path exists when count does");
    debug_assert_eq!(path.len(), count);
    let simplified = Curve::new(path.iter().map(|&v| tau.pt(v).to_vec()).collect())?;
    let original = tau.subcurve(tau.vertex_cp(a), tau.vertex_cp(b))?;
    let bound = c_simp * delta;
    // A hair of slack: the bound holds mathematically, but the certification
    // re-decides it in floating point.
    let matching = build_matching(&original, &simplified, bound).or_else(|_| {
        build_matching(&original, &simplified, bound * (1.0 + 1e-12) + 1e-12)
    })?;
    Ok(Some(Simplification {
        simplified,
        vertex_indices: path,
        matching: SimplificationMatching::Continuous(matching),
        error_bound: bound,
        budget_used: count,
    }))
}

/// Minimum subsequence size such that the discrete distance between the
/// range `[a, b]` of `pts` and the subsequence is at most `threshold`.
/// Returns the chosen original indices, or `None` above `cap`.
pub(crate) fn discrete_min_subsequence(
    pts: &[&[f64]],
    threshold: f64,
    cap: usize,
) -> Option<Vec<usize>> {
    use crate::geometry::dist_slice;
    let n = pts.len();
    if n == 1 {
        return Some(vec![0]);
    }
    // State (i, j): position i in the sequence currently matched to chosen
    // vertex j. Steps: advance i; open a new chosen vertex j' > j (with or
    // without advancing i). Feasible states need dist(i, j) <= threshold.
    const INF: u32 = u32::MAX;
    let mut dp = vec![INF; n * n];
    let mut par = vec![(u32::MAX, u32::MAX); n * n];
    let feas = |i: usize, j: usize| dist_slice(pts[i], pts[j]) <= threshold;
    if !feas(0, 0) {
        return None; // dist(p0,p0)=0, cannot happen
    }
    dp[0] = 1;
    for i in 0..n {
        for j in 0..n {
            let cur = dp[i * n + j];
            if cur == INF {
                continue;
            }
            // advance along the sequence, same chosen vertex
            if i + 1 < n && feas(i + 1, j) && dp[(i + 1) * n + j] > cur {
                dp[(i + 1) * n + j] = cur;
                par[(i + 1) * n + j] = (i as u32, j as u32);
            }
            for j2 in (j + 1)..n {
                // open a new chosen vertex, optionally advancing
                if feas(i, j2) && dp[i * n + j2] > cur + 1 {
                    dp[i * n + j2] = cur + 1;
                    par[i * n + j2] = (i as u32, j as u32);
                }
                if i + 1 < n && feas(i + 1, j2) && dp[(i + 1) * n + j2] > cur + 1 {
                    dp[(i + 1) * n + j2] = cur + 1;
                    par[(i + 1) * n + j2] = (i as u32, j as u32);
                }
            }
        }
    }
    let best = dp[(n - 1) * n + (n - 1)];
    if best == INF || best as usize > cap {
        return None;
    }
    // Reconstruct the chosen subsequence: collect the j-coordinates on the
    // parent chain where j changed.
    let mut chosen = vec![n - 1];
    let mut cur = ((n - 1) as u32, (n - 1) as u32);
    loop {
        let p = par[cur.0 as usize * n + cur.1 as usize];
        if p.0 == u32::MAX {
            break;
        }
        if p.1 != cur.1 {
            chosen.push(p.1 as usize);
        }
        cur = p;
    }
    chosen.reverse();
    debug_assert_eq!(chosen.len(), best as usize);
    Some(chosen)
}

/// Minimum-size subsequence simplification under the discrete distance, or
/// `None` if it needs more than `budget` vertices.
pub fn simplify_discrete(
    tau: &Curve,
    delta: f64,
    budget: usize,
    c_simp: f64,
) -> Result<Option<Simplification>> {
    if delta < 0.0 || budget < 2 {
        return Err(FrechetError::InvalidInput(
            "need delta >= 0 and budget >= 2".into(),
        ));
    }
    let pts: Vec<&[f64]> = tau.vertices().collect();
    simplify_discrete_slices(&pts, delta, budget, c_simp)
}

pub(crate) fn simplify_discrete_slices(
    pts: &[&[f64]],
    delta: f64,
    budget: usize,
    c_simp: f64,
) -> Result<Option<Simplification>> {
    let threshold = c_simp * delta;
    let chosen = match discrete_min_subsequence(pts, threshold, budget) {
        Some(c) => c,
        None => return Ok(None),
    };
    let simplified = Curve::new(chosen.iter().map(|&v| pts[v].to_vec()).collect())?;
    let sub: Vec<&[f64]> = chosen.iter().map(|&v| pts[v]).collect();
    let matching = build_discrete_matching_slices(pts, &sub, threshold)?;
    let count = chosen.len();
    Ok(Some(Simplification {
        simplified,
        vertex_indices: chosen,
        matching: SimplificationMatching::Discrete(matching),
        error_bound: threshold,
        budget_used: count,
    }))
}

/// Convenience wrapper: map a simplification's vertex index back to the
/// original curve address.
pub fn original_vertex_cp(tau: &Curve, idx: usize) -> CurvePoint {
    tau.vertex_cp(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefront::decide_exact;
    use rand::Rng;
    use rand::SeedableRng;

    fn curve2(pts: &[(f64, f64)]) -> Curve {
        Curve::new(pts.iter().map(|&(x, y)| vec![x, y]).collect()).unwrap()
    }

    #[test]
    fn collinear_curve_collapses_to_two_vertices() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.0)).collect();
        let c = curve2(&pts);
        let s = simplify_continuous(&c, 0.5, 2, DEFAULT_C_SIMP)
            .unwrap()
            .expect("fits budget");
        assert_eq!(s.simplified.n_vertices(), 2);
        assert!(decide_exact(&c, &s.simplified, 0.0).unwrap());
    }

    #[test]
    fn large_delta_forces_endpoints_only() {
        let c = curve2(&[(0.0, 0.0), (1.0, 3.0), (2.0, -2.0), (3.0, 0.0)]);
        let s = simplify_continuous(&c, 100.0, 10, DEFAULT_C_SIMP)
            .unwrap()
            .unwrap();
        assert_eq!(s.simplified.n_vertices(), 2);
        assert_eq!(s.vertex_indices, vec![0, 3]);
    }

    #[test]
    fn over_budget_returns_none() {
        // Tall zigzag, tiny threshold: nothing can be dropped.
        let pts: Vec<(f64, f64)> = (0..8)
            .map(|i| (i as f64, if i % 2 == 0 { 5.0 } else { -5.0 }))
            .collect();
        let c = curve2(&pts);
        assert!(simplify_continuous(&c, 0.01, 3, DEFAULT_C_SIMP)
            .unwrap()
            .is_none());
    }

    /// Exhaustive oracle over subsequences: the smallest vertex count whose
    /// every shortcut passes the feasibility test.
    fn exhaustive_min_shortcut(tau: &Curve, threshold: f64) -> usize {
        let n = tau.n_vertices();
        let mut c = WorkCounters::default();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << (n - 2)) {
            let mut verts = vec![0usize];
            for b in 0..(n - 2) {
                if (mask >> b) & 1 == 1 {
                    verts.push(b + 1);
                }
            }
            verts.push(n - 1);
            let ok = verts.windows(2).all(|w| {
                shortcut_feasible(tau, w[0], w[1], threshold, &mut c).unwrap()
            });
            if ok {
                best = best.min(verts.len());
            }
        }
        best
    }

    #[test]
    fn continuous_minimality_matches_exhaustive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..15 {
            let n = rng.gen_range(4..10);
            let tau = crate::synthetic::generate_synthetic(
                &crate::synthetic::SyntheticKind::Walk { dim: 2, step: 1.0 },
                n,
                rng.gen(),
            )
            .unwrap();
            let delta = rng.gen_range(0.1..2.0);
            let s = simplify_continuous(&tau, delta, tau.n_vertices(), DEFAULT_C_SIMP)
                .unwrap()
                .unwrap();
            let best = exhaustive_min_shortcut(&tau, DEFAULT_C_SIMP * delta);
            assert_eq!(s.simplified.n_vertices(), best);
            // certified error
            assert!(decide_exact(&tau, &s.simplified, s.error_bound).unwrap());
        }
    }

    #[test]
    fn discrete_zero_delta_keeps_everything() {
        let c = curve2(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]);
        let s = simplify_discrete(&c, 0.0, 10, DEFAULT_C_SIMP).unwrap().unwrap();
        assert_eq!(s.simplified, c);
    }

    #[test]
    fn discrete_near_duplicates_collapse() {
        // Points hugging two cluster centers within threshold.
        let c = curve2(&[
            (0.0, 0.0),
            (0.1, 0.05),
            (0.05, -0.1),
            (3.0, 0.0),
            (3.1, 0.1),
        ]);
        let s = simplify_discrete(&c, 0.2, 10, 1.0).unwrap().unwrap();
        assert_eq!(s.simplified.n_vertices(), 2);
    }

    /// Exhaustive oracle over subsequences under the discrete distance.
    fn exhaustive_min_discrete(tau: &Curve, threshold: f64) -> usize {
        let n = tau.n_vertices();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << (n - 2)) {
            let mut verts = vec![0usize];
            for b in 0..(n - 2) {
                if (mask >> b) & 1 == 1 {
                    verts.push(b + 1);
                }
            }
            verts.push(n - 1);
            let sub = Curve::new(verts.iter().map(|&v| tau.pt(v).to_vec()).collect()).unwrap();
            if crate::discrete::discrete_decide_exact(tau, &sub, threshold).unwrap() {
                best = best.min(verts.len());
            }
        }
        best
    }

    #[test]
    fn discrete_minimality_matches_exhaustive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        for _ in 0..15 {
            let n = rng.gen_range(4..10);
            let tau = crate::synthetic::generate_synthetic(
                &crate::synthetic::SyntheticKind::Walk { dim: 2, step: 1.0 },
                n,
                rng.gen(),
            )
            .unwrap();
            let delta = rng.gen_range(0.1..2.0);
            let s = simplify_discrete(&tau, delta, tau.n_vertices(), DEFAULT_C_SIMP)
                .unwrap()
                .unwrap();
            let best = exhaustive_min_discrete(&tau, DEFAULT_C_SIMP * delta);
            assert_eq!(
                s.simplified.n_vertices(),
                best,
                "curve {:?} delta {}",
                tau,
                delta
            );
        }
    }
}
