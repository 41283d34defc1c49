//! Explicit monotone matchings realizing a given distance bound.
//!
//! A matching is stored as the images of both vertex families plus the merged
//! monotone breakpoint polyline in the joint parameter square; any point can
//! then be mapped across in O(log) time by binary search and linear
//! interpolation. Between breakpoints both motions are linear, so the
//! realized distance is attained at breakpoints.

use crate::error::{FrechetError, Result};
use crate::geometry::{dist_slice, Curve, CurvePoint, IntervalArray};
use crate::wavefront::{decide_exact, wavefront};
use crate::discrete::{dis_wave_grid, VertexSet};
use crate::counters::WorkCounters;

/// A monotone matching between two curves realizing `bound`.
#[derive(Debug, Clone)]
pub struct Matching {
    /// Image on sigma of each tau vertex.
    pub tau_images: Vec<CurvePoint>,
    /// Image on tau of each sigma vertex.
    pub sigma_images: Vec<CurvePoint>,
    /// The distance this matching is certified to realize.
    pub bound: f64,
    /// Monotone breakpoints `(position on tau, position on sigma)` as global
    /// parameters (edge index + t).
    breakpoints: Vec<(f64, f64)>,
}

fn gp_to_cp(curve: &Curve, gp: f64) -> CurvePoint {
    if curve.n_edges() == 0 {
        return CurvePoint { edge: 0, t: 0.0 };
    }
    let max = curve.n_edges() as f64;
    let g = gp.clamp(0.0, max);
    let edge = (g.floor() as usize).min(curve.n_edges() - 1);
    CurvePoint {
        edge,
        t: g - edge as f64,
    }
}

impl Matching {
    /// Map a point of tau to its matched point on sigma.
    pub fn query_tau(&self, sigma: &Curve, x: CurvePoint) -> CurvePoint {
        let g = x.gp();
        gp_to_cp(sigma, self.interp(g, true))
    }

    /// Map a point of sigma to its matched point on tau.
    pub fn query_sigma(&self, tau: &Curve, p: CurvePoint) -> CurvePoint {
        let g = p.gp();
        gp_to_cp(tau, self.interp(g, false))
    }

    /// Interpolate the breakpoint polyline; `from_tau` selects which
    /// coordinate is the key.
    fn interp(&self, g: f64, from_tau: bool) -> f64 {
        let key = |bp: &(f64, f64)| if from_tau { bp.0 } else { bp.1 };
        let val = |bp: &(f64, f64)| if from_tau { bp.1 } else { bp.0 };
        let bps = &self.breakpoints;
        if g <= key(&bps[0]) {
            return val(&bps[0]);
        }
        if g >= key(bps.last().unwrap()) {
            return val(bps.last().unwrap());
        }
        let mut lo = 0usize;
        let mut hi = bps.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if key(&bps[mid]) <= g {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (a, b) = (&bps[lo], &bps[hi]);
        let ka = key(a);
        let kb = key(b);
        if kb - ka <= 1e-300 {
            return val(a);
        }
        let f = (g - ka) / (kb - ka);
        val(a) + f * (val(b) - val(a))
    }

    /// Exact realized distance: the maximum over breakpoints.
    pub fn realized_distance(&self, tau: &Curve, sigma: &Curve) -> f64 {
        self.breakpoints
            .iter()
            .map(|&(gt, gs)| {
                let pt = tau.point_at(gp_to_cp(tau, gt));
                let ps = sigma.point_at(gp_to_cp(sigma, gs));
                dist_slice(&pt, &ps)
            })
            .fold(0.0, f64::max)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }
}

/// Build a matching realizing `delta` by backtracking the reachability
/// propagation from the canonical start sources. Fails when the bound is not
/// realizable.
pub fn build_matching(tau: &Curve, sigma: &Curve, delta: f64) -> Result<Matching> {
    if !decide_exact(tau, sigma, delta)? {
        return Err(FrechetError::BoundNotRealized { delta });
    }
    let n = tau.n_vertices();
    let m = sigma.n_vertices();
    let mut tau_images: Vec<Option<CurvePoint>> = vec![None; n];
    let mut sigma_images: Vec<Option<CurvePoint>> = vec![None; m];

    if n == 1 || m == 1 {
        // Degenerate: every vertex of the longer curve maps to the single
        // point, and vice versa.
        for (i, img) in tau_images.iter_mut().enumerate() {
            *img = Some(sigma.vertex_cp(if m == 1 { 0 } else { i.min(m - 1) }));
        }
        for (j, img) in sigma_images.iter_mut().enumerate() {
            *img = Some(tau.vertex_cp(if n == 1 { 0 } else { j.min(n - 1) }));
        }
        return finish_matching(
            tau,
            sigma,
            tau_images.into_iter().map(|x| x.unwrap()).collect(),
            sigma_images.into_iter().map(|x| x.unwrap()).collect(),
            delta,
        );
    }

    let s_tau = IntervalArray::point_source(tau.n_edges(), tau.start_cp());
    let s_sigma = IntervalArray::point_source(sigma.n_edges(), sigma.start_cp());
    let out = wavefront(tau, sigma, delta, &s_tau, &s_sigma)?;
    let wv = &out.per_tau_vertex;
    let ww = &out.per_sigma_vertex;

    tau_images[n - 1] = Some(sigma.end_cp());
    sigma_images[m - 1] = Some(tau.end_cp());
    let mut i = n - 1;
    let mut j = m - 1;
    // Which image was fixed last. This drives the branch order; together
    // with the start-propagation rule of the recurrence it guarantees that
    // every newly assigned image stays monotone.
    enum Last {
        SigmaInTauEdge, // M(w_j) lies on tau edge i-1
        TauInSigmaEdge, // M(v_i) lies on sigma edge j-1
    }
    let mut last = Last::SigmaInTauEdge;
    while i > 0 && j > 0 {
        let wv_prev = wv[i - 1].span(j - 1);
        let ww_prev = ww[j - 1].span(i - 1);
        let take_tau = match last {
            Last::SigmaInTauEdge => wv_prev.is_some(),
            Last::TauInSigmaEdge => ww_prev.is_none(),
        };
        if take_tau {
            let s = match wv_prev {
                Some(s) => s,
                None => return Err(FrechetError::BoundNotRealized { delta }),
            };
            tau_images[i - 1] = Some(gp_to_cp(sigma, (j - 1) as f64 + s.lo));
            i -= 1;
            last = Last::TauInSigmaEdge;
        } else {
            let s = match ww_prev {
                Some(s) => s,
                None => return Err(FrechetError::BoundNotRealized { delta }),
            };
            sigma_images[j - 1] = Some(gp_to_cp(tau, (i - 1) as f64 + s.lo));
            j -= 1;
            last = Last::SigmaInTauEdge;
        }
    }
    // Tail: one side may still have unmatched leading vertices; they all map
    // to the other curve's start.
    for j2 in 0..=j {
        if sigma_images[j2].is_none() {
            sigma_images[j2] = Some(tau.start_cp());
        }
    }
    for i2 in 0..=i {
        if tau_images[i2].is_none() {
            tau_images[i2] = Some(sigma.start_cp());
        }
    }
    finish_matching(
        tau,
        sigma,
        tau_images.into_iter().map(|x| x.unwrap()).collect(),
        sigma_images.into_iter().map(|x| x.unwrap()).collect(),
        delta,
    )
}

fn finish_matching(
    tau: &Curve,
    sigma: &Curve,
    tau_images: Vec<CurvePoint>,
    sigma_images: Vec<CurvePoint>,
    delta: f64,
) -> Result<Matching> {
    let mut bps: Vec<(f64, f64)> = Vec::with_capacity(tau_images.len() + sigma_images.len());
    for (i, img) in tau_images.iter().enumerate() {
        let g = if tau.n_edges() == 0 {
            0.0
        } else {
            tau.vertex_cp(i).gp()
        };
        bps.push((g, img.gp()));
    }
    for (j, img) in sigma_images.iter().enumerate() {
        let g = if sigma.n_edges() == 0 {
            0.0
        } else {
            sigma.vertex_cp(j).gp()
        };
        bps.push((img.gp(), g));
    }
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Monotonicity in both coordinates is the defining invariant.
    let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for bp in &mut bps {
        if bp.1 < prev.1 {
            debug_assert!(prev.1 - bp.1 < 1e-6, "matching breakpoints out of order");
            bp.1 = prev.1;
        }
        prev = *bp;
    }
    Ok(Matching {
        tau_images,
        sigma_images,
        bound: delta,
        breakpoints: bps,
    })
}

/// A monotone vertex-to-vertex matching realizing `bound` for the discrete
/// distance, stored as the step sequence plus first-seen vertex images.
#[derive(Debug, Clone)]
pub struct DiscreteMatching {
    /// Pairs from `(n-1, m-1)` down to `(0, 0)`; consecutive entries differ
    /// by a step in {(-1,0),(0,-1),(-1,-1)}.
    pub pairs: Vec<(usize, usize)>,
    /// Image vertex on sigma of each tau vertex.
    pub tau_images: Vec<usize>,
    /// Image vertex on tau of each sigma vertex.
    pub sigma_images: Vec<usize>,
    pub bound: f64,
}

impl DiscreteMatching {
    pub fn query_tau(&self, i: usize) -> usize {
        self.tau_images[i]
    }
    pub fn query_sigma(&self, j: usize) -> usize {
        self.sigma_images[j]
    }
}

pub fn build_discrete_matching(tau: &Curve, sigma: &Curve, delta: f64) -> Result<DiscreteMatching> {
    let tv: Vec<&[f64]> = tau.vertices().collect();
    let sv: Vec<&[f64]> = sigma.vertices().collect();
    build_discrete_matching_slices(&tv, &sv, delta)
}

pub(crate) fn build_discrete_matching_slices(
    tau: &[&[f64]],
    sigma: &[&[f64]],
    delta: f64,
) -> Result<DiscreteMatching> {
    let n = tau.len();
    let m = sigma.len();
    let mut c = WorkCounters::default();
    let g = dis_wave_grid(
        tau,
        sigma,
        delta,
        &VertexSet::singleton(n, 0),
        &VertexSet::singleton(m, 0),
        &mut c,
    )?;
    if !g.get(n - 1, m - 1) {
        return Err(FrechetError::BoundNotRealized { delta });
    }
    let mut pairs = Vec::with_capacity(n + m);
    let mut i = n - 1;
    let mut j = m - 1;
    pairs.push((i, j));
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && g.get(i - 1, j - 1) {
            i -= 1;
            j -= 1;
        } else if i > 0 && g.get(i - 1, j) {
            i -= 1;
        } else if j > 0 && g.get(i, j - 1) {
            j -= 1;
        } else if i > 0 && j == 0 {
            i -= 1;
        } else {
            j -= 1;
        }
        pairs.push((i, j));
    }
    let mut tau_images = vec![usize::MAX; n];
    let mut sigma_images = vec![usize::MAX; m];
    for &(a, b) in &pairs {
        if tau_images[a] == usize::MAX {
            tau_images[a] = b;
        }
        if sigma_images[b] == usize::MAX {
            sigma_images[b] = a;
        }
    }
    Ok(DiscreteMatching {
        pairs,
        tau_images,
        sigma_images,
        bound: delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn curve2(pts: &[(f64, f64)]) -> Curve {
        Curve::new(pts.iter().map(|&(x, y)| vec![x, y]).collect()).unwrap()
    }

    fn sample_realized(m: &Matching, tau: &Curve, sigma: &Curve, k: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..=k {
            let g = tau.n_edges() as f64 * (s as f64) / (k as f64);
            let x = gp_to_cp(tau, g);
            let y = m.query_tau(sigma, x);
            worst = worst.max(dist_slice(&tau.point_at(x), &sigma.point_at(y)));
        }
        worst
    }

    #[test]
    fn identical_curves_match_to_self() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        let m = build_matching(&tau, &tau, 0.0).unwrap();
        for (i, img) in m.tau_images.iter().enumerate() {
            let own = tau.vertex_cp(i);
            assert!(
                dist_slice(&tau.point_at(*img), &tau.point_at(own)) < 1e-9,
                "vertex {} mapped away",
                i
            );
        }
        assert!(m.realized_distance(&tau, &tau) < 1e-9);
    }

    #[test]
    fn offset_segments_at_one() {
        let tau = curve2(&[(0.0, 0.0), (2.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (2.0, 1.0)]);
        let m = build_matching(&tau, &sigma, 1.0).unwrap();
        assert!(m.tau_images[0].gp() < 1e-9);
        assert!((m.tau_images[1].gp() - 1.0).abs() < 1e-9);
        assert!(sample_realized(&m, &tau, &sigma, 1000) <= 1.0 + 1e-9);
    }

    #[test]
    fn midpoint_maps_to_midpoint_for_segments() {
        let tau = curve2(&[(0.0, 0.0), (2.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (2.0, 1.0)]);
        let m = build_matching(&tau, &sigma, 1.5).unwrap();
        let img = m.query_tau(&sigma, CurvePoint { edge: 0, t: 0.5 });
        assert!((img.t - 0.5).abs() < 1e-9);
    }

    #[test]
    fn precondition_failure_is_error() {
        let tau = curve2(&[(0.0, 0.0), (2.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (2.0, 1.0)]);
        match build_matching(&tau, &sigma, 0.5) {
            Err(FrechetError::BoundNotRealized { delta }) => assert_eq!(delta, 0.5),
            other => panic!("expected BoundNotRealized, got {:?}", other),
        }
    }

    #[test]
    fn random_instances_realize_bound_and_are_monotone() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let n = rng.gen_range(2..16);
            let m = rng.gen_range(2..16);
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
            let d = crate::wavefront::compute_exact(&tau, &sigma, 1e-9).unwrap();
            let delta = d * 1.0001 + 1e-9;
            let mt = build_matching(&tau, &sigma, delta).unwrap();
            assert!(
                sample_realized(&mt, &tau, &sigma, 1000) <= delta + 1e-7,
                "realized bound violated"
            );
            // query monotone
            let mut prev = -1.0;
            for s in 0..=200 {
                let g = tau.n_edges() as f64 * (s as f64) / 200.0;
                let img = mt.query_tau(&sigma, gp_to_cp(&tau, g));
                assert!(img.gp() >= prev - 1e-9);
                prev = img.gp();
            }
        }
    }

    #[test]
    fn discrete_equal_sequences_diagonal() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        let m = build_discrete_matching(&tau, &tau, 0.0).unwrap();
        assert_eq!(m.pairs, vec![(2, 2), (1, 1), (0, 0)]);
    }

    #[test]
    fn discrete_forced_steps() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (1.0, 1.0)]);
        let m = build_discrete_matching(&tau, &sigma, 1.0).unwrap();
        assert_eq!(m.pairs, vec![(1, 1), (0, 0)]);
    }

    #[test]
    fn discrete_random_pairs_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.gen_range(2..12);
            let m = rng.gen_range(2..12);
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
            let d = crate::discrete::discrete_compute_exact(&tau, &sigma).unwrap();
            let mt = build_discrete_matching(&tau, &sigma, d).unwrap();
            for w in mt.pairs.windows(2) {
                let di = w[0].0 as isize - w[1].0 as isize;
                let dj = w[0].1 as isize - w[1].1 as isize;
                assert!((di, dj) == (1, 0) || (di, dj) == (0, 1) || (di, dj) == (1, 1));
            }
            for &(a, b) in &mt.pairs {
                assert!(dist_slice(tau.pt(a), sigma.pt(b)) <= d + 1e-12);
            }
            // every vertex of both curves has an image
            assert!(mt.tau_images.iter().all(|&x| x != usize::MAX));
            assert!(mt.sigma_images.iter().all(|&x| x != usize::MAX));
        }
    }
}
