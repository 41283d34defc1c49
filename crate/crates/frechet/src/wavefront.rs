//! Reachability propagation between two polygonal curves, parameterized by
//! source arrays on the first vertex of either curve, plus the exact
//! decision and value computations built on it.
//!
//! `wavefront(tau, sigma, delta, s_tau, s_sigma)` returns, for every vertex
//! `v_i` of tau, the set of points `q` on sigma such that `(v_i, q)` is
//! delta-reachable from `(v_1, p)` for some `p` covered by `s_sigma` or from
//! `(x, w_1)` for some `x` covered by `s_tau`; and symmetrically for every
//! vertex of sigma. Reachable means: a monotone matching of the bounded
//! subcurves realizes distance at most delta.

use crate::counters::WorkCounters;
use crate::error::{FrechetError, Result};
use crate::geometry::{
    clip_segment_to_ball, dist_slice, Curve, IntervalArray, Span, Tol,
};

/// Full propagation output: one induced array per vertex of either curve.
#[derive(Debug, Clone)]
pub struct WaveFrontOutput {
    /// `per_tau_vertex[i]` is induced by sigma and belongs to `v_i`.
    pub per_tau_vertex: Vec<IntervalArray>,
    /// `per_sigma_vertex[j]` is induced by tau and belongs to `w_j`.
    pub per_sigma_vertex: Vec<IntervalArray>,
}

#[inline]
fn forward_clip(clip: Option<Span>, from: f64, tol_t: f64) -> Option<Span> {
    match clip {
        Some(c) => {
            let lo = c.lo.max(from);
            if lo <= c.hi + tol_t {
                Some(Span {
                    lo: lo.min(c.hi),
                    hi: c.hi,
                })
            } else {
                None
            }
        }
        None => None,
    }
}

/// First row of the propagation: reachable points on `host` for the fixed
/// vertex `center` of the other curve. `sources` is induced by `host`;
/// `corner` states whether the joint start pair is itself a source.
fn init_row(
    host: &Curve,
    center: &[f64],
    delta: f64,
    sources: &IntervalArray,
    corner: bool,
    tol: &Tol,
) -> IntervalArray {
    let ne = host.n_edges();
    let mut out = IntervalArray::empty(ne);
    for j in 0..ne {
        let (a, b) = host.edge(j);
        let clip = clip_segment_to_ball(a, b, center, delta);
        let from_prev = if j == 0 {
            corner && dist_slice(host.pt(0), center) <= delta + tol.geo
        } else {
            matches!(out.span(j - 1), Some(s) if s.hi >= 1.0 - tol.t)
        };
        let span = if from_prev {
            clip
        } else if let Some(src) = sources.span(j) {
            // Propagation starts at the source's first point, but only if the
            // source actually touches the ball section of this edge.
            match clip {
                Some(c) if src.hi >= c.lo - tol.t => forward_clip(Some(c), src.lo, tol.t),
                _ => None,
            }
        } else {
            None
        };
        out.set(j, span);
    }
    out
}

pub(crate) fn init_row_pub(
    host: &Curve,
    center: &[f64],
    delta: f64,
    sources: &IntervalArray,
    corner: bool,
    tol: &Tol,
) -> IntervalArray {
    init_row(host, center, delta, sources, corner, tol)
}

/// Full propagation with all per-vertex arrays retained.
pub fn wavefront(
    tau: &Curve,
    sigma: &Curve,
    delta: f64,
    s_tau: &IntervalArray,
    s_sigma: &IntervalArray,
) -> Result<WaveFrontOutput> {
    let mut c = WorkCounters::default();
    wavefront_counted(tau, sigma, delta, s_tau, s_sigma, &mut c)
}

pub fn wavefront_counted(
    tau: &Curve,
    sigma: &Curve,
    delta: f64,
    s_tau: &IntervalArray,
    s_sigma: &IntervalArray,
    counters: &mut WorkCounters,
) -> Result<WaveFrontOutput> {
    if tau.dim() != sigma.dim() {
        return Err(FrechetError::DimensionMismatch(tau.dim(), sigma.dim()));
    }
    if s_tau.len() != tau.n_edges() || s_sigma.len() != sigma.n_edges() {
        return Err(FrechetError::InvalidInput(format!(
            "induced array length mismatch: {}/{} vs {}/{}",
            s_tau.len(),
            tau.n_edges(),
            s_sigma.len(),
            sigma.n_edges()
        )));
    }
    if delta < 0.0 {
        return Err(FrechetError::InvalidInput("negative delta".into()));
    }
    let tol = Tol::for_curves(&[tau, sigma]);
    let n = tau.n_vertices();
    let m = sigma.n_vertices();

    let mut wv: Vec<IntervalArray> = Vec::with_capacity(n);
    let mut ww: Vec<IntervalArray> = Vec::with_capacity(m);
    // The joint start pair is a source when the opposite curve's start is
    // covered at its very first point.
    let tau_start_covered = s_tau.covers(tau.start_cp(), tol.t);
    let sigma_start_covered = s_sigma.covers(sigma.start_cp(), tol.t);
    wv.push(init_row(
        sigma,
        tau.pt(0),
        delta,
        s_sigma,
        tau_start_covered,
        &tol,
    ));
    ww.push(init_row(
        tau,
        sigma.pt(0),
        delta,
        s_tau,
        sigma_start_covered,
        &tol,
    ));
    for _ in 1..n {
        wv.push(IntervalArray::empty(m.saturating_sub(1)));
    }
    for _ in 1..m {
        ww.push(IntervalArray::empty(n.saturating_sub(1)));
    }

    for i in 0..n.saturating_sub(1) {
        for j in 0..m.saturating_sub(1) {
            counters.wavefront_cells += 1;
            let cur_v = wv[i].span(j);
            let cur_w = ww[j].span(i);
            let next_v = if cur_w.is_some() {
                let (a, b) = sigma.edge(j);
                clip_segment_to_ball(a, b, tau.pt(i + 1), delta)
            } else if let Some(v) = cur_v {
                let (a, b) = sigma.edge(j);
                forward_clip(clip_segment_to_ball(a, b, tau.pt(i + 1), delta), v.lo, tol.t)
            } else {
                None
            };
            let next_w = if cur_v.is_some() {
                let (a, b) = tau.edge(i);
                clip_segment_to_ball(a, b, sigma.pt(j + 1), delta)
            } else if let Some(w) = cur_w {
                let (a, b) = tau.edge(i);
                forward_clip(clip_segment_to_ball(a, b, sigma.pt(j + 1), delta), w.lo, tol.t)
            } else {
                None
            };
            wv[i + 1].set(j, next_v);
            ww[j + 1].set(i, next_w);
        }
    }
    Ok(WaveFrontOutput {
        per_tau_vertex: wv,
        per_sigma_vertex: ww,
    })
}

/// Streaming variant that only reports whether the final pair is reachable
/// from the canonical start sources. Memory stays O(n+m).
fn reachable_end_to_end(tau: &Curve, sigma: &Curve, delta: f64, counters: &mut WorkCounters) -> bool {
    let tol = Tol::for_curves(&[tau, sigma]);
    let n = tau.n_vertices();
    let m = sigma.n_vertices();
    if dist_slice(tau.pt(0), sigma.pt(0)) > delta + tol.geo
        || dist_slice(tau.pt(n - 1), sigma.pt(m - 1)) > delta + tol.geo
    {
        return false;
    }
    if n == 1 || m == 1 {
        // One side is a single point: every point of the other curve must lie
        // in its ball.
        let (point, other) = if n == 1 { (tau, sigma) } else { (sigma, tau) };
        return other
            .vertices()
            .all(|p| dist_slice(p, point.pt(0)) <= delta + tol.geo);
    }

    let s_tau = IntervalArray::point_source(tau.n_edges(), tau.start_cp());
    let s_sigma = IntervalArray::point_source(sigma.n_edges(), sigma.start_cp());
    let mut row_v = init_row(sigma, tau.pt(0), delta, &s_sigma, true, &tol);
    let mut col_w = init_row(tau, sigma.pt(0), delta, &s_tau, true, &tol);

    for i in 0..n - 1 {
        let mut prev_v: Option<Span> = None; // wv[i+1][j-1] as we sweep j
        for j in 0..m - 1 {
            counters.wavefront_cells += 1;
            let cur_v = row_v.span(j);
            let cur_w = col_w.span(i);
            let next_v = if cur_w.is_some() {
                let (a, b) = sigma.edge(j);
                clip_segment_to_ball(a, b, tau.pt(i + 1), delta)
            } else if let Some(v) = cur_v {
                let (a, b) = sigma.edge(j);
                forward_clip(clip_segment_to_ball(a, b, tau.pt(i + 1), delta), v.lo, tol.t)
            } else {
                None
            };
            let next_w = if cur_v.is_some() {
                let (a, b) = tau.edge(i);
                clip_segment_to_ball(a, b, sigma.pt(j + 1), delta)
            } else if let Some(w) = cur_w {
                let (a, b) = tau.edge(i);
                forward_clip(clip_segment_to_ball(a, b, sigma.pt(j + 1), delta), w.lo, tol.t)
            } else {
                None
            };
            if let Some(p) = prev_v {
                row_v.set(j - 1, Some(p));
            }
            prev_v = next_v;
            if prev_v.is_none() {
                row_v.set(j, None);
            }
            col_w.set(i, next_w);
        }
        if let Some(p) = prev_v {
            row_v.set(m - 2, Some(p));
        }
    }
    matches!(row_v.span(m - 2), Some(s) if s.hi >= 1.0 - tol.t)
}

/// Exact decision: is the Fréchet distance between the curves at most delta?
pub fn decide_exact(tau: &Curve, sigma: &Curve, delta: f64) -> Result<bool> {
    let mut c = WorkCounters::default();
    decide_exact_counted(tau, sigma, delta, &mut c)
}

pub fn decide_exact_counted(
    tau: &Curve,
    sigma: &Curve,
    delta: f64,
    counters: &mut WorkCounters,
) -> Result<bool> {
    if tau.dim() != sigma.dim() {
        return Err(FrechetError::DimensionMismatch(tau.dim(), sigma.dim()));
    }
    if delta < 0.0 {
        return Err(FrechetError::InvalidInput("negative delta".into()));
    }
    Ok(reachable_end_to_end(tau, sigma, delta, counters))
}

/// Exact value by bisection over the decision procedure.
///
/// The result `v` satisfies `decide(v (1+rel_tol)) = yes` and
/// `decide(v (1-rel_tol)) = no` (or `v = 0` for identical curves). The
/// initial bracket is `[max endpoint distance, that plus both lengths]`.
pub fn compute_exact(tau: &Curve, sigma: &Curve, rel_tol: f64) -> Result<f64> {
    let mut c = WorkCounters::default();
    compute_exact_counted(tau, sigma, rel_tol, &mut c)
}

pub fn compute_exact_counted(
    tau: &Curve,
    sigma: &Curve,
    rel_tol: f64,
    counters: &mut WorkCounters,
) -> Result<f64> {
    if rel_tol <= 0.0 {
        return Err(FrechetError::InvalidInput("rel_tol must be positive".into()));
    }
    let n = tau.n_vertices();
    let m = sigma.n_vertices();
    let endpoint_lb = dist_slice(tau.pt(0), sigma.pt(0)).max(dist_slice(tau.pt(n - 1), sigma.pt(m - 1)));
    let mut lo = endpoint_lb;
    let mut hi = endpoint_lb + tau.length() + sigma.length();
    if decide_exact_counted(tau, sigma, lo, counters)? {
        return Ok(lo);
    }
    debug_assert!(decide_exact_counted(tau, sigma, hi, counters).unwrap_or(true));
    // Invariant: decide(lo) = no, decide(hi) = yes.
    let scale = hi.max(1e-300);
    for _ in 0..200 {
        if hi - lo <= rel_tol * hi.max(1e-300) || hi - lo <= 1e-15 * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if decide_exact_counted(tau, sigma, mid, counters)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurvePoint;

    fn curve2(pts: &[(f64, f64)]) -> Curve {
        Curve::new(pts.iter().map(|&(x, y)| vec![x, y]).collect()).unwrap()
    }

    fn point_sources(tau: &Curve, sigma: &Curve) -> (IntervalArray, IntervalArray) {
        (
            IntervalArray::point_source(tau.n_edges(), tau.start_cp()),
            IntervalArray::point_source(sigma.n_edges(), sigma.start_cp()),
        )
    }

    #[test]
    fn empty_sources_give_empty_output() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (2.0, 1.0)]);
        let out = wavefront(
            &tau,
            &sigma,
            10.0,
            &IntervalArray::empty(tau.n_edges()),
            &IntervalArray::empty(sigma.n_edges()),
        )
        .unwrap();
        assert!(out.per_tau_vertex.iter().all(|a| a.is_all_empty()));
        assert!(out.per_sigma_vertex.iter().all(|a| a.is_all_empty()));
    }

    #[test]
    fn huge_delta_gives_full_ball_clips() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]);
        let delta = 100.0;
        let (s, s2) = point_sources(&tau, &sigma);
        let out = wavefront(&tau, &sigma, delta, &s, &s2).unwrap();
        for (i, arr) in out.per_tau_vertex.iter().enumerate() {
            for (j, span) in arr.iter() {
                let (a, b) = sigma.edge(j);
                let clip = clip_segment_to_ball(a, b, tau.pt(i), delta).unwrap();
                let span = span.expect("full free space");
                assert!((span.lo - clip.lo).abs() < 1e-12);
                assert!((span.hi - clip.hi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tangent_output_is_degenerate_at_end() {
        // Offset parallel segments at delta exactly 1: the only reachable
        // point of v_2 on sigma is its very end.
        let tau = curve2(&[(0.0, 0.0), (2.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (2.0, 1.0)]);
        let (s, s2) = point_sources(&tau, &sigma);
        let out = wavefront(&tau, &sigma, 1.0, &s, &s2).unwrap();
        let last = out.per_tau_vertex[1].span(0).expect("reachable");
        assert!((last.lo - 1.0).abs() < 1e-9);
        assert!((last.hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn output_spans_lie_in_vertex_balls() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 2.0), (3.0, -1.0), (4.0, 0.5)]);
        let sigma = curve2(&[(0.2, 0.3), (1.5, 1.0), (3.5, 0.0)]);
        let delta = 1.7;
        let (s, s2) = point_sources(&tau, &sigma);
        let out = wavefront(&tau, &sigma, delta, &s, &s2).unwrap();
        for (i, arr) in out.per_tau_vertex.iter().enumerate() {
            for (j, span) in arr.iter() {
                if let Some(sp) = span {
                    for t in [sp.lo, sp.hi] {
                        let p = sigma.point_at(CurvePoint { edge: j, t });
                        assert!(dist_slice(&p, tau.pt(i)) <= delta + 1e-9);
                    }
                }
            }
        }
        for (j, arr) in out.per_sigma_vertex.iter().enumerate() {
            for (i, span) in arr.iter() {
                if let Some(sp) = span {
                    for t in [sp.lo, sp.hi] {
                        let p = tau.point_at(CurvePoint { edge: i, t });
                        assert!(dist_slice(&p, sigma.pt(j)) <= delta + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn decide_identical_curves_at_zero() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        assert!(decide_exact(&tau, &tau, 0.0).unwrap());
    }

    #[test]
    fn decide_offset_segments_threshold() {
        let tau = curve2(&[(0.0, 0.0), (2.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (2.0, 1.0)]);
        assert!(!decide_exact(&tau, &sigma, 0.999).unwrap());
        assert!(decide_exact(&tau, &sigma, 1.0).unwrap());
    }

    #[test]
    fn decide_single_point_curves() {
        let p = Curve::new(vec![vec![0.0, 0.0]]).unwrap();
        let sigma = curve2(&[(0.0, 1.0), (2.0, 1.0)]);
        assert!(!decide_exact(&p, &sigma, 1.5).unwrap());
        assert!(decide_exact(&p, &sigma, 5f64.sqrt() + 1e-12).unwrap());
    }

    #[test]
    fn streaming_decision_matches_full_output() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(2..10);
            let m = rng.gen_range(2..10);
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
            let delta = rng.gen_range(0.0..4.0);
            let (s, s2) = point_sources(&tau, &sigma);
            let out = wavefront(&tau, &sigma, delta, &s, &s2).unwrap();
            let full = matches!(
                out.per_tau_vertex[tau.n_vertices() - 1].span(sigma.n_edges() - 1),
                Some(sp) if sp.hi >= 1.0 - 1e-9
            );
            assert_eq!(full, decide_exact(&tau, &sigma, delta).unwrap());
        }
    }

    #[test]
    fn decide_monotone_in_delta() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let tau = crate::synthetic::generate_synthetic(
                &crate::synthetic::SyntheticKind::Walk { dim: 2, step: 1.0 },
                rng.gen_range(2..12),
                rng.gen(),
            )
            .unwrap();
            let sigma = crate::synthetic::generate_synthetic(
                &crate::synthetic::SyntheticKind::Walk { dim: 2, step: 1.0 },
                rng.gen_range(2..12),
                rng.gen(),
            )
            .unwrap();
            let mut prev = false;
            for k in 0..8 {
                let delta = 0.5 * k as f64;
                let d = decide_exact(&tau, &sigma, delta).unwrap();
                assert!(!prev || d, "monotonicity violated");
                prev = d;
            }
        }
    }

    #[test]
    fn compute_exact_identical_is_zero() {
        let tau = curve2(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        assert_eq!(compute_exact(&tau, &tau, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn compute_exact_offset_segments() {
        let tau = curve2(&[(0.0, 0.0), (2.0, 0.0)]);
        let sigma = curve2(&[(0.0, 1.0), (2.0, 1.0)]);
        let v = compute_exact(&tau, &sigma, 1e-9).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn compute_exact_sandwich_on_random_pair() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let tau = crate::synthetic::generate_synthetic(
                &crate::synthetic::SyntheticKind::Walk { dim: 2, step: 1.0 },
                16,
                rng.gen(),
            )
            .unwrap();
            let sigma = crate::synthetic::generate_synthetic(
                &crate::synthetic::SyntheticKind::Walk { dim: 2, step: 1.0 },
                16,
                rng.gen(),
            )
            .unwrap();
            let v = compute_exact(&tau, &sigma, 1e-9).unwrap();
            // Continuous value is bounded above by the discrete one and below
            // by the endpoint distances.
            let disc = crate::discrete::discrete_compute_exact(&tau, &sigma).unwrap();
            let lb = dist_slice(tau.pt(0), sigma.pt(0))
                .max(dist_slice(tau.pt(15), sigma.pt(15)));
            assert!(v <= disc + 1e-6);
            assert!(v >= lb - 1e-6);
        }
    }
}
