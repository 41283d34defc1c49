//! Strongly subquadratic approximate decision and computation for the
//! continuous Fréchet distance.
//!
//! The decision procedure partitions both curves into blocks, preprocesses
//! each block of the longer curve once, and sweeps the block grid advancing
//! approximate reachability arrays with [`reach`]. A returned `yes`
//! certifies distance at most `ratio_bound * delta`; a returned `no`
//! certifies distance greater than `delta`. Randomness only affects probing
//! work, never the answer.

pub mod block;
pub mod partition;
pub mod reach;

pub use block::{preprocess_block, BlockIndex};
pub use partition::{partition, Partition};
pub use reach::{reach, ReachCtx};

use crate::counters::WorkCounters;
use crate::error::{FrechetError, Result};
use crate::geometry::{clip_segment_to_ball, Curve, IntervalArray, Span, Tol};
use crate::params::{Params, ScheduleOverride};

/// Value with certified bracket and the ratio bound it was certified under.
#[derive(Debug, Clone, Copy)]
pub struct ApproxResult {
    /// The returned estimate; equals `upper`.
    pub value: f64,
    /// Certified strict lower bound on the true distance (0 when exact).
    pub lower: f64,
    /// Certified upper bound on the true distance.
    pub upper: f64,
    /// The end-to-end ratio bound: `value <= (1+eps) * ratio_bound * d`.
    pub ratio_bound: f64,
    /// Decision calls spent.
    pub decisions: u32,
}

/// True reachability of one curve's start vertex along the other curve: the
/// longest prefix run inside the vertex's ball.
fn start_reach(host: &Curve, center: &[f64], delta: f64, tol: &Tol) -> IntervalArray {
    let mut out = IntervalArray::empty(host.n_edges());
    if crate::geometry::dist_slice(host.pt(0), center) > delta + tol.geo {
        return out;
    }
    for e in 0..host.n_edges() {
        let (a, b) = host.edge(e);
        let clip = match clip_segment_to_ball(a, b, center, delta) {
            Some(c) if c.lo <= tol.t => c,
            _ => break,
        };
        out.set(e, Some(Span { lo: 0.0, hi: clip.hi }));
        if clip.hi < 1.0 - tol.t {
            break;
        }
    }
    out
}

fn restrict(arr: &IntervalArray, from: usize, to: usize) -> IntervalArray {
    let mut out = IntervalArray::empty(to - from);
    for e in from..to {
        out.set(e - from, arr.span(e));
    }
    out
}

/// Approximate decision with default schedule and fresh counters.
pub fn decide_approx(tau: &Curve, sigma: &Curve, delta: f64, eps: f64, seed: u64) -> Result<bool> {
    let mut c = WorkCounters::default();
    let (tau, sigma) = role_order(tau, sigma)?;
    let params = Params::new(delta, eps, sigma.n_vertices(), seed)?;
    decide_approx_with(tau, sigma, &params, &mut c)
}

/// Order the pair so the second curve is the shorter one.
fn role_order<'a>(tau: &'a Curve, sigma: &'a Curve) -> Result<(&'a Curve, &'a Curve)> {
    if tau.n_vertices() < 2 || sigma.n_vertices() < 2 {
        return Err(FrechetError::InvalidInput(
            "the approximate pipeline requires curves with at least 2 vertices".into(),
        ));
    }
    if tau.dim() != sigma.dim() {
        return Err(FrechetError::DimensionMismatch(tau.dim(), sigma.dim()));
    }
    if sigma.n_vertices() <= tau.n_vertices() {
        Ok((tau, sigma))
    } else {
        Ok((sigma, tau))
    }
}

/// Approximate decision with explicit parameters (callers must have ordered
/// the pair so `sigma` is the shorter curve).
pub fn decide_approx_with(
    tau: &Curve,
    sigma: &Curve,
    params: &Params,
    counters: &mut WorkCounters,
) -> Result<bool> {
    let part = partition::partition(tau, sigma, params)?;
    let tol = Tol::for_curves(&[&part.tau, &part.sigma]);
    let k_blocks = part.n_tau_blocks();
    let l_blocks = part.n_sigma_blocks();
    log::debug!(
        "decision at delta={} over {}x{} blocks (mu1={}, mu2={}, mu3={}, omega={})",
        params.delta,
        k_blocks,
        l_blocks,
        params.mu1,
        params.mu2,
        params.mu3,
        params.omega
    );
    let mut blocks = Vec::with_capacity(k_blocks);
    for k in 0..k_blocks {
        blocks.push(block::preprocess_block_counted(
            &part.tau_block(k),
            params,
            counters,
        )?);
    }
    let r_v = start_reach(&part.sigma, part.tau.pt(0), params.delta, &tol);
    let r_w = start_reach(&part.tau, part.sigma.pt(0), params.delta, &tol);
    let mut a_w_rows: Vec<IntervalArray> = (0..k_blocks)
        .map(|k| restrict(&r_w, part.tau_starts[k], part.tau_starts[k + 1]))
        .collect();
    let full_n = part.tau.n_vertices();
    for l in 0..l_blocks {
        let sigma_l = part.sigma_block(l);
        let mut a_v = restrict(&r_v, part.sigma_starts[l], part.sigma_starts[l + 1]);
        for (k, ix) in blocks.iter().enumerate() {
            let ctx = ReachCtx {
                full_n,
                k: k as u64,
                l: l as u64,
            };
            let (next_v, next_w) = reach::reach(ix, &sigma_l, &a_v, &a_w_rows[k], &ctx, counters)?;
            a_v = next_v;
            a_w_rows[k] = next_w;
        }
    }
    let last = &a_w_rows[k_blocks - 1];
    Ok(matches!(last.span(last.len() - 1), Some(s) if s.hi >= 1.0 - tol.t))
}

/// Approximate computation: geometric bracketing, then bisection on the
/// approximate decision. The result satisfies
/// `d <= value <= (1+eps) * ratio_bound * d`.
pub fn compute_approx(tau: &Curve, sigma: &Curve, eps: f64, seed: u64) -> Result<ApproxResult> {
    let mut c = WorkCounters::default();
    compute_approx_with(tau, sigma, eps, seed, ScheduleOverride::default(), &mut c)
}

pub fn compute_approx_with(
    tau: &Curve,
    sigma: &Curve,
    eps: f64,
    seed: u64,
    ov: ScheduleOverride,
    counters: &mut WorkCounters,
) -> Result<ApproxResult> {
    let (tau, sigma) = role_order(tau, sigma)?;
    let m = sigma.n_vertices();
    let ratio = Params::with_overrides(1.0, eps, m, seed, ov)?.audit().ratio_bound;
    let mut decisions = 0u32;
    let mut decide = |delta: f64, counters: &mut WorkCounters| -> Result<bool> {
        decisions += 1;
        let params = Params::with_overrides(delta, eps, m, seed, ov)?;
        decide_approx_with(tau, sigma, &params, counters)
    };
    let n = tau.n_vertices();
    let endpoint_lb = crate::geometry::dist_slice(tau.pt(0), sigma.pt(0))
        .max(crate::geometry::dist_slice(tau.pt(n - 1), sigma.pt(m - 1)));
    let ub0 = endpoint_lb + tau.length() + sigma.length();
    if ub0 <= 0.0 {
        // Both curves are the same single point... impossible here (>= 2
        // distinct vertices), but keep the degenerate exit honest.
        return Ok(ApproxResult {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            ratio_bound: ratio,
            decisions,
        });
    }
    if endpoint_lb == 0.0 && crate::wavefront::decide_exact(tau, sigma, 0.0)? {
        return Ok(ApproxResult {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            ratio_bound: ratio,
            decisions,
        });
    }
    // Geometric descent to a certified `no`.
    let mut hi = ub0;
    let mut lo;
    let floor = (endpoint_lb / ratio).max(ub0 * 1e-15);
    loop {
        let cand = hi / 2.0;
        if cand <= floor {
            // Below the certified lower bound: distance exceeds cand.
            lo = cand.max(1e-300);
            break;
        }
        if decide(cand, counters)? {
            hi = cand;
        } else {
            lo = cand;
            break;
        }
    }
    // Multiplicative bisection.
    let mut iter = 0;
    while hi > lo * (1.0 + eps) && iter < 200 {
        iter += 1;
        let mid = (lo * hi).sqrt();
        if decide(mid, counters)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let value = ratio * hi;
    Ok(ApproxResult {
        value,
        lower: lo,
        upper: value,
        ratio_bound: ratio,
        decisions,
    })
}
