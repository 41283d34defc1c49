//! Independent brute-force reference implementations, used only by tests and
//! the acceptance suite. They share the `frechet` crate's curve types but
//! none of its algorithm code: propagation here is the classic cell-by-cell
//! free-space recurrence with its own primitives.

use frechet::error::{FrechetError, Result};
use frechet::geometry::{Curve, CurvePoint, IntervalArray, Span};

/// Entry cap for the exponential simplification search.
pub const SIMPLIFICATION_CAP: usize = 12;

/// A recorded cross-check between the oracle and the main path.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub query: String,
    pub oracle_answer: String,
    pub main_answer: String,
    pub agree: bool,
    pub witness: Option<f64>,
}

impl OracleReport {
    pub fn new(query: String, oracle: String, main: String, witness: Option<f64>) -> OracleReport {
        let agree = oracle == main;
        OracleReport {
            query,
            oracle_answer: oracle,
            main_answer: main,
            agree,
            witness,
        }
    }
}

#[inline]
fn d2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
fn dd(a: &[f64], b: &[f64]) -> f64 {
    d2(a, b).sqrt()
}

/// Instance-scaled tolerance, same convention as the main crate but derived
/// locally: 1e-9 of the joint extent.
fn eta(curves: &[&Curve]) -> f64 {
    let mut scale: f64 = 0.0;
    for c in curves {
        scale = scale.max(c.bbox_diameter());
        for d in curves {
            scale = scale.max(dd(c.pt(0), d.pt(0)));
        }
    }
    1e-9 * (scale + 1.0)
}

/// Local quadratic clip of a segment against a ball, independent of the main
/// crate's primitive.
fn ball_clip(p: &[f64], q: &[f64], c: &[f64], r: f64) -> Option<(f64, f64)> {
    let mut qa = 0.0;
    let mut qb = 0.0;
    let mut qc = -r * r;
    for k in 0..p.len() {
        let e = q[k] - p[k];
        let f = p[k] - c[k];
        qa += e * e;
        qb += 2.0 * e * f;
        qc += f * f;
    }
    if qa <= 0.0 {
        return if qc <= 0.0 { Some((0.0, 1.0)) } else { None };
    }
    let mut disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        if disc > -1e-12 * (qb * qb + (4.0 * qa * qc).abs() + 1e-300) {
            disc = 0.0;
        } else {
            return None;
        }
    }
    let s = disc.sqrt();
    let lo = ((-qb - s) / (2.0 * qa)).max(0.0);
    let hi = ((-qb + s) / (2.0 * qa)).min(1.0);
    if lo <= hi {
        Some((lo, hi))
    } else if lo - hi <= 1e-12 {
        Some((hi, hi))
    } else {
        None
    }
}

/// Free-space propagation over the full cell grid from arbitrary boundary
/// sources. Sources enter on the bottom boundary (`s_tau`, pairs
/// `(x, sigma-start)`) and the left boundary (`s_sigma`, pairs
/// `(tau-start, p)`).
pub struct FreeSpaceReach {
    /// `left[i][j]`: reachable part of sigma edge j for tau vertex i.
    pub left: Vec<Vec<Option<(f64, f64)>>>,
    /// `bottom[j][i]`: reachable part of tau edge i for sigma vertex j.
    pub bottom: Vec<Vec<Option<(f64, f64)>>>,
}

pub fn fs_reach(
    tau: &Curve,
    sigma: &Curve,
    delta: f64,
    s_tau: &IntervalArray,
    s_sigma: &IntervalArray,
) -> FreeSpaceReach {
    let n = tau.n_vertices();
    let m = sigma.n_vertices();
    let ne = n.saturating_sub(1);
    let me = m.saturating_sub(1);
    let eps = eta(&[tau, sigma]).max(1e-9);
    let mut reach_l: Vec<Vec<Option<(f64, f64)>>> = vec![vec![None; me]; n];
    let mut reach_b: Vec<Vec<Option<(f64, f64)>>> = vec![vec![None; ne]; m];

    // Boundary column {tau-start} x sigma: climb from left-boundary sources.
    let mut carry = s_tau.covers(tau.start_cp(), eps) && dd(tau.pt(0), sigma.pt(0)) <= delta + eps;
    for j in 0..me {
        let (a, b) = sigma.edge(j);
        let free = ball_clip(a, b, tau.pt(0), delta);
        let mut cell: Option<(f64, f64)> = None;
        if carry {
            if let Some((lo, hi)) = free {
                if lo <= eps {
                    cell = Some((0.0, hi));
                }
            }
        }
        if cell.is_none() {
            if let Some(src) = s_sigma.span(j) {
                if let Some((lo, hi)) = free {
                    if src.hi >= lo - eps {
                        let start = lo.max(src.lo);
                        if start <= hi + eps {
                            cell = Some((start.min(hi), hi));
                        }
                    }
                }
            }
        }
        carry = matches!(cell, Some((_, hi)) if hi >= 1.0 - eps);
        reach_l[0][j] = cell;
    }
    // Boundary row tau x {sigma-start}.
    let mut carry = s_sigma.covers(sigma.start_cp(), eps) && dd(tau.pt(0), sigma.pt(0)) <= delta + eps;
    for i in 0..ne {
        let (a, b) = tau.edge(i);
        let free = ball_clip(a, b, sigma.pt(0), delta);
        let mut cell: Option<(f64, f64)> = None;
        if carry {
            if let Some((lo, hi)) = free {
                if lo <= eps {
                    cell = Some((0.0, hi));
                }
            }
        }
        if cell.is_none() {
            if let Some(src) = s_tau.span(i) {
                if let Some((lo, hi)) = free {
                    if src.hi >= lo - eps {
                        let start = lo.max(src.lo);
                        if start <= hi + eps {
                            cell = Some((start.min(hi), hi));
                        }
                    }
                }
            }
        }
        carry = matches!(cell, Some((_, hi)) if hi >= 1.0 - eps);
        reach_b[0][i] = cell;
    }

    // Cell sweep: each free-space cell is convex, so a point on an exit edge
    // is reachable iff it is free and not before the earliest entry point.
    for i in 0..ne {
        for j in 0..me {
            let entry_left = reach_l[i][j];
            let entry_bottom = reach_b[j][i];
            let (sa, sb) = sigma.edge(j);
            let right_free = ball_clip(sa, sb, tau.pt(i + 1), delta);
            let right = match (entry_bottom, entry_left, right_free) {
                (Some(_), _, Some((lo, hi))) => Some((lo, hi)),
                (None, Some((llo, _)), Some((lo, hi))) => {
                    let start = lo.max(llo);
                    if start <= hi + eps {
                        Some((start.min(hi), hi))
                    } else {
                        None
                    }
                }
                _ => None,
            };
            reach_l[i + 1][j] = right;
            let (ta, tb) = tau.edge(i);
            let top_free = ball_clip(ta, tb, sigma.pt(j + 1), delta);
            let top = match (entry_left, entry_bottom, top_free) {
                (Some(_), _, Some((lo, hi))) => Some((lo, hi)),
                (None, Some((blo, _)), Some((lo, hi))) => {
                    let start = lo.max(blo);
                    if start <= hi + eps {
                        Some((start.min(hi), hi))
                    } else {
                        None
                    }
                }
                _ => None,
            };
            reach_b[j + 1][i] = top;
        }
    }
    FreeSpaceReach {
        left: reach_l,
        bottom: reach_b,
    }
}

fn point_sources(tau: &Curve, sigma: &Curve) -> (IntervalArray, IntervalArray) {
    (
        IntervalArray::point_source(tau.n_edges().max(1), tau.start_cp()),
        IntervalArray::point_source(sigma.n_edges().max(1), sigma.start_cp()),
    )
}

/// Exact decision by the classic free-space propagation.
pub fn brute_decide(tau: &Curve, sigma: &Curve, delta: f64) -> Result<bool> {
    if delta < 0.0 {
        return Err(FrechetError::InvalidInput("negative delta".into()));
    }
    let eps = eta(&[tau, sigma]).max(1e-9);
    let n = tau.n_vertices();
    let m = sigma.n_vertices();
    if dd(tau.pt(0), sigma.pt(0)) > delta + eps || dd(tau.pt(n - 1), sigma.pt(m - 1)) > delta + eps
    {
        return Ok(false);
    }
    if n == 1 || m == 1 {
        let (point, other) = if n == 1 { (tau, sigma) } else { (sigma, tau) };
        return Ok(other.vertices().all(|p| dd(p, point.pt(0)) <= delta + eps));
    }
    let (s_tau, s_sigma) = point_sources(tau, sigma);
    let r = fs_reach(tau, sigma, delta, &s_tau, &s_sigma);
    Ok(matches!(r.left[n - 1][m - 2], Some((_, hi)) if hi >= 1.0 - eps))
}

/// Is `to` reachable from `from` at the given bound? Decided on the bounded
/// subcurves, which is the definition.
pub fn brute_reachable_pair(
    tau: &Curve,
    sigma: &Curve,
    delta: f64,
    from: (CurvePoint, CurvePoint),
    to: (CurvePoint, CurvePoint),
) -> Result<bool> {
    if from.0.gp() > to.0.gp() || from.1.gp() > to.1.gp() {
        return Ok(false);
    }
    let sub_t = tau.subcurve(from.0, to.0)?;
    let sub_s = sigma.subcurve(from.1, to.1)?;
    brute_decide(&sub_t, &sub_s, delta)
}

/// True reachability intervals from the joint start, restricted to block
/// boundaries.
pub struct ReachRestriction {
    /// Intervals of tau vertex `tau_v` over sigma edges `[range)`, re-indexed
    /// from 0.
    pub on_sigma: IntervalArray,
    /// Intervals of sigma vertex `sigma_v` over tau edges `[range)`.
    pub on_tau: IntervalArray,
}

pub fn brute_reach_restriction(
    tau: &Curve,
    sigma: &Curve,
    delta: f64,
    tau_v: usize,
    sigma_v: usize,
    tau_range: (usize, usize),
    sigma_range: (usize, usize),
) -> Result<ReachRestriction> {
    let (s_tau, s_sigma) = point_sources(tau, sigma);
    let r = fs_reach(tau, sigma, delta, &s_tau, &s_sigma);
    let mut on_sigma = IntervalArray::empty(sigma_range.1 - sigma_range.0);
    for j in sigma_range.0..sigma_range.1 {
        if let Some((lo, hi)) = r.left[tau_v][j] {
            on_sigma.set(j - sigma_range.0, Some(Span { lo, hi }));
        }
    }
    let mut on_tau = IntervalArray::empty(tau_range.1 - tau_range.0);
    for i in tau_range.0..tau_range.1 {
        if let Some((lo, hi)) = r.bottom[sigma_v][i] {
            on_tau.set(i - tau_range.0, Some(Span { lo, hi }));
        }
    }
    Ok(ReachRestriction { on_sigma, on_tau })
}

/// Coverage oracle: every point y of `block` such that some source-covered
/// x not after it has the subcurve `[x, y]` within `delta_prime` of `query`.
pub fn brute_cover(
    block: &Curve,
    query: &Curve,
    delta_prime: f64,
    sources: &IntervalArray,
) -> Result<IntervalArray> {
    let ne = block.n_edges();
    let mut out = IntervalArray::empty(ne);
    let eps = eta(&[block, query]).max(1e-9);
    if query.n_vertices() == 1 {
        // Single-point query: ball runs of the block started at a source.
        let c = query.pt(0);
        let mut carry = false;
        for i in 0..ne {
            let (a, b) = block.edge(i);
            let free = ball_clip(a, b, c, delta_prime);
            let mut span: Option<(f64, f64)> = None;
            if let Some((lo, hi)) = free {
                let mut start: Option<f64> = None;
                if carry && lo <= eps {
                    start = Some(0.0);
                }
                if start.is_none() {
                    if let Some(src) = sources.span(i) {
                        if src.hi >= lo - eps {
                            let s = lo.max(src.lo);
                            if s <= hi + eps {
                                start = Some(s.min(hi));
                            }
                        }
                    }
                }
                if let Some(s) = start {
                    span = Some((s, hi));
                }
            }
            carry = matches!(span, Some((_, hi)) if hi >= 1.0 - eps);
            if let Some((lo, hi)) = span {
                out.set(i, Some(Span { lo, hi }));
            }
        }
        return Ok(out);
    }
    let r = fs_reach(
        block,
        query,
        delta_prime,
        sources,
        &IntervalArray::empty(query.n_edges()),
    );
    for i in 0..ne {
        if let Some((lo, hi)) = r.bottom[query.n_vertices() - 1][i] {
            out.set(i, Some(Span { lo, hi }));
        }
    }
    Ok(out)
}

/// All block edges touched by some subcurve within `delta` of `query`.
pub fn brute_marked_edges(block: &Curve, query: &Curve, delta: f64) -> Result<Vec<usize>> {
    let ne = block.n_edges();
    let mut marked = vec![false; ne];
    for e in 0..ne {
        // Sources limited to edges at or before e: a valid range starting
        // there and ending at or after edge e touches edge e.
        let mut sources = IntervalArray::empty(ne);
        for i in 0..=e {
            let (a, b) = block.edge(i);
            if let Some((lo, hi)) = ball_clip(a, b, query.pt(0), delta) {
                sources.set(i, Some(Span { lo, hi }));
            }
        }
        let ends = brute_cover(block, query, delta, &sources)?;
        for (i, s) in ends.iter() {
            if s.is_some() && i >= e {
                marked[e] = true;
                break;
            }
        }
    }
    Ok(marked
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| i)
        .collect())
}

/// Textbook discrete Fréchet value by the max-min recurrence.
pub fn brute_discrete(tau: &Curve, sigma: &Curve) -> Result<f64> {
    let n = tau.n_vertices();
    let m = sigma.n_vertices();
    let mut dp = vec![vec![0.0f64; m]; n];
    for i in 0..n {
        for j in 0..m {
            let d = dd(tau.pt(i), sigma.pt(j));
            let prev = if i == 0 && j == 0 {
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
    Ok(dp[n - 1][m - 1])
}

/// Discrete pair reachability on the bounded vertex ranges.
pub fn brute_discrete_reachable(
    tau: &Curve,
    sigma: &Curve,
    delta: f64,
    from: (usize, usize),
    to: (usize, usize),
) -> bool {
    if from.0 > to.0 || from.1 > to.1 {
        return false;
    }
    let n = to.0 - from.0 + 1;
    let m = to.1 - from.1 + 1;
    let mut dp = vec![vec![f64::INFINITY; m]; n];
    for i in 0..n {
        for j in 0..m {
            let d = dd(tau.pt(from.0 + i), sigma.pt(from.1 + j));
            let prev = if i == 0 && j == 0 {
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
    dp[n - 1][m - 1] <= delta
}

/// Exhaustive minimum vertex count of any polygonal curve over a grid net
/// within `delta` of `tau` (continuous distance). Exponential; hard-capped.
pub fn brute_min_simplification(
    tau: &Curve,
    delta: f64,
    net_resolution: f64,
    max_vertices: usize,
) -> Result<Option<usize>> {
    if tau.n_vertices() > SIMPLIFICATION_CAP {
        return Err(FrechetError::SizeCapExceeded {
            size: tau.n_vertices(),
            cap: SIMPLIFICATION_CAP,
        });
    }
    if tau.dim() != 2 {
        return Err(FrechetError::InvalidInput(
            "net search is implemented for the plane".into(),
        ));
    }
    let (lo, hi) = tau.bbox();
    let step = net_resolution.max(1e-9);
    let inflate = delta;
    let nx = (((hi[0] - lo[0]) + 2.0 * inflate) / step).ceil() as usize + 1;
    let ny = (((hi[1] - lo[1]) + 2.0 * inflate) / step).ceil() as usize + 1;
    if nx * ny > 4000 {
        return Err(FrechetError::SizeCapExceeded {
            size: nx * ny,
            cap: 4000,
        });
    }
    let mut net: Vec<Vec<f64>> = Vec::with_capacity(nx * ny);
    for ix in 0..nx {
        for iy in 0..ny {
            net.push(vec![
                lo[0] - inflate + ix as f64 * step,
                lo[1] - inflate + iy as f64 * step,
            ]);
        }
    }
    for k in 1..=max_vertices {
        let combos = (net.len() as f64).powi(k as i32);
        if combos > 3_000_000.0 {
            return Err(FrechetError::SizeCapExceeded {
                size: usize::MAX,
                cap: 3_000_000,
            });
        }
        let mut idx = vec![0usize; k];
        'outer: loop {
            let pts: Vec<Vec<f64>> = idx.iter().map(|&i| net[i].clone()).collect();
            if let Ok(cand) = Curve::new(pts) {
                if brute_decide(&cand, tau, delta)? {
                    return Ok(Some(k));
                }
            }
            let mut p = 0;
            loop {
                if p == k {
                    break 'outer;
                }
                idx[p] += 1;
                if idx[p] < net.len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }
    Ok(None)
}
