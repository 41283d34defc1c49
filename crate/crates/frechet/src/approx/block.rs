//! Per-block preprocessing for the fast decision procedure: whole-block,
//! prefix and suffix simplifications with matchings, per-vertex forward and
//! backward simplification anchors, the coverage index answering subcurve
//! coverage queries in near-linear time, and the surrogate search seeded by
//! a marked edge.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::counters::WorkCounters;
use crate::error::{FrechetError, Result};
use crate::geometry::{
    clip_segment_to_ball, Curve, CurvePoint, IntervalArray, Tol,
};
use crate::params::{Params, RatioAudit};
use crate::simplify::{simplify_continuous_from_index, ShortcutIndex, Simplification};
use crate::wavefront::{decide_exact_counted, wavefront_counted};

/// Backward (suffix ending at the vertex) and forward (prefix starting at
/// the vertex) simplification anchors at one block vertex.
pub struct VertexAnchors {
    /// Longest suffix `[back_start, v]` whose simplification fits the budget.
    pub back: Simplification,
    pub back_start: usize,
    /// Longest prefix `[v, fwd_end]` whose simplification fits the budget.
    pub fwd: Simplification,
    pub fwd_end: usize,
}

/// Discretized single-source coverage arrays for one vertex-to-vertex
/// subcurve of the block and one block edge.
struct EdgeDisc {
    /// Source parameters on the edge, spaced `eps_inner * delta_prime`
    /// apart in arc length, starting at the ball clip's first point.
    ts: Vec<f64>,
    /// Coverage array of the subcurve's end vertex per source point.
    arrays: Vec<IntervalArray>,
    /// Largest edge index with a non-empty entry, -1 if none.
    maxs: Vec<isize>,
}

struct PairData {
    per_edge: Vec<Option<EdgeDisc>>,
}

/// Coverage index: for a query subcurve and a source array, report every
/// block point reachable from a covered source by a sub-traversal within
/// `delta_prime` of the query subcurve (completeness at `delta_prime`,
/// soundness at `(1 + eps_inner) * delta_prime`).
pub struct CoverIndex {
    pub delta_prime: f64,
    pub eps_inner: f64,
    cache: Mutex<HashMap<(u32, u32), Arc<PairData>>>,
}

/// All per-block preprocessing.
pub struct BlockIndex {
    pub block: Curve,
    pub params: Params,
    pub audit: RatioAudit,
    /// Whole-block simplification within the budget, when one exists.
    pub zeta_full: Option<Simplification>,
    pub zeta_pre: Simplification,
    /// Local vertex index ending the longest simplifiable prefix.
    pub i_pre: usize,
    pub zeta_suf: Simplification,
    /// Local vertex index starting the longest simplifiable suffix.
    pub i_suf: usize,
    shortcut: ShortcutIndex,
    anchors: Mutex<HashMap<usize, Arc<VertexAnchors>>>,
    pub cover: CoverIndex,
}

/// Build the index for one block at the parameters' delta.
pub fn preprocess_block(block: &Curve, params: &Params) -> Result<BlockIndex> {
    let mut c = WorkCounters::default();
    preprocess_block_counted(block, params, &mut c)
}

pub fn preprocess_block_counted(
    block: &Curve,
    params: &Params,
    counters: &mut WorkCounters,
) -> Result<BlockIndex> {
    let audit = params.audit();
    let threshold = params.c_simp * params.delta;
    let shortcut = ShortcutIndex::build(block, threshold, counters)?;
    let budget = params.simp_budget();
    let last = block.n_vertices() - 1;
    let zeta_full =
        simplify_continuous_from_index(block, &shortcut, 0, last, params.delta, budget, params.c_simp)?;
    // Longest prefix [0, e] within budget; e = 1 always fits (two vertices).
    let mut i_pre = 1;
    for e in (1..=last).rev() {
        if matches!(shortcut.min_vertices(0, e), Some(k) if k <= budget) {
            i_pre = e;
            break;
        }
    }
    // The stored prefix extends one vertex past the fitting extent: the
    // extra hop is an original edge, so the certified error is unchanged,
    // and boundary witnesses that start or end inside the next edge stay
    // inside the stored range.
    let zeta_pre = extended_simp(block, &shortcut, params, ExtendEnd::Forward, 0, i_pre)?;
    let mut i_suf = last - 1;
    for a in 0..last {
        if matches!(shortcut.min_vertices(a, last), Some(k) if k <= budget) {
            i_suf = a;
            break;
        }
    }
    let zeta_suf = extended_simp(block, &shortcut, params, ExtendEnd::Backward, i_suf, last)?;
    let cover = CoverIndex {
        delta_prime: audit.cover_threshold * params.delta,
        eps_inner: params.eps_inner,
        cache: Mutex::new(HashMap::new()),
    };
    Ok(BlockIndex {
        block: block.clone(),
        params: params.clone(),
        audit,
        zeta_full,
        zeta_pre,
        i_pre,
        zeta_suf,
        i_suf,
        shortcut,
        anchors: Mutex::new(HashMap::new()),
        cover,
    })
}

impl BlockIndex {
    /// Anchors at a block vertex, built on first use.
    pub fn anchors(&self, v: usize, counters: &mut WorkCounters) -> Result<Arc<VertexAnchors>> {
        if let Some(a) = self.anchors.lock().unwrap().get(&v) {
            return Ok(a.clone());
        }
        let budget = self.params.simp_budget();
        let last = self.block.n_vertices() - 1;
        let mut back_start = v;
        for a in 0..=v {
            if matches!(self.shortcut.min_vertices(a, v), Some(k) if k <= budget) {
                back_start = a;
                break;
            }
        }
        let back = extended_simp(
            &self.block,
            &self.shortcut,
            &self.params,
            ExtendEnd::Backward,
            back_start,
            v,
        )?;
        let back_start = back.vertex_indices[0];
        let mut fwd_end = v;
        for e in (v..=last).rev() {
            if matches!(self.shortcut.min_vertices(v, e), Some(k) if k <= budget) {
                fwd_end = e;
                break;
            }
        }
        let fwd = extended_simp(
            &self.block,
            &self.shortcut,
            &self.params,
            ExtendEnd::Forward,
            v,
            fwd_end,
        )?;
        let fwd_end = *fwd.vertex_indices.last().unwrap();
        let _ = counters;
        let arc = Arc::new(VertexAnchors {
            back,
            back_start,
            fwd,
            fwd_end,
        });
        self.anchors.lock().unwrap().insert(v, arc.clone());
        Ok(arc)
    }

    /// Coverage query against this block's index. `delta_prime` must match
    /// the value the index was built for.
    pub fn cover_query(
        &self,
        from: CurvePoint,
        to: CurvePoint,
        delta_prime: f64,
        sources: &IntervalArray,
        counters: &mut WorkCounters,
    ) -> Result<IntervalArray> {
        let dp = self.cover.delta_prime;
        if (delta_prime - dp).abs() > 1e-9 * (1.0 + dp.abs()) {
            return Err(FrechetError::IndexDeltaMismatch {
                expected: dp,
                got: delta_prime,
            });
        }
        if sources.len() != self.block.n_edges() {
            return Err(FrechetError::InvalidInput(
                "source array not induced by the block".into(),
            ));
        }
        counters.cover_queries += 1;
        let tol = Tol::for_curves(&[&self.block]);
        let ne = self.block.n_edges();
        if from.gp() > to.gp() + tol.t {
            return Err(FrechetError::InvalidInput(
                "query subcurve endpoints out of order".into(),
            ));
        }
        if sources.is_all_empty() {
            return Ok(IntervalArray::empty(ne));
        }
        // Short queries go straight through the propagation.
        if to.gp() - from.gp() <= 2.0 + tol.t {
            let sub = self.block.subcurve(from, to)?;
            let out = wavefront_counted(
                &self.block,
                &sub,
                dp,
                sources,
                &IntervalArray::empty(sub.n_edges()),
                counters,
            )?;
            return Ok(out.per_sigma_vertex.last().unwrap().clone());
        }
        let i1 = from.gp().ceil() as usize;
        let i2 = (to.gp() + tol.t).floor() as usize;
        debug_assert!(i1 < i2);
        // Head: reach across the initial partial edge.
        let head = self.block.subcurve(from, self.block.vertex_cp(i1))?;
        let s1 = wavefront_counted(
            &self.block,
            &head,
            dp,
            sources,
            &IntervalArray::empty(head.n_edges()),
            counters,
        )?
        .per_sigma_vertex
        .last()
        .unwrap()
        .clone();
        // Core: merge precomputed single-source coverage arrays.
        let pair = self.pair_data(i1, i2, counters)?;
        let mut s2 = IntervalArray::empty(ne);
        let v_i1 = self.block.pt(i1).to_vec();
        let mut write_head = 0usize;
        for i in 0..ne {
            counters.cover_steps += 1;
            let t_span = match s1.span(i) {
                Some(s) => s,
                None => continue,
            };
            let disc = match &pair.per_edge[i] {
                Some(d) => d,
                None => continue,
            };
            let (ea, eb) = self.block.edge(i);
            let clip = match clip_segment_to_ball(ea, eb, &v_i1, dp) {
                Some(c) => c,
                None => continue,
            };
            let t = match t_span.intersect(&clip, tol.t) {
                Some(s) => s,
                None => continue,
            };
            // Largest discretization point not after the intersection start.
            let b = match disc.ts.iter().rposition(|&p| p <= t.lo + tol.t) {
                Some(b) => b,
                None => 0,
            };
            let mx = disc.maxs[b];
            if mx < 0 || (mx as usize) < write_head {
                continue;
            }
            let arr = &disc.arrays[b];
            for w in write_head..=(mx as usize) {
                counters.cover_steps += 1;
                let mut span = arr.span(w);
                if w == i {
                    // The stored array starts at the rounded-down source
                    // point; on the source edge itself, coverage before the
                    // first true source has no witness and is trimmed.
                    span = span.and_then(|s| {
                        let lo = s.lo.max(t.lo);
                        if lo <= s.hi + tol.t {
                            Some(crate::geometry::Span { lo: lo.min(s.hi), hi: s.hi })
                        } else {
                            None
                        }
                    });
                }
                s2.set(w, span);
            }
            write_head = mx as usize + 1;
            if write_head >= ne {
                break;
            }
        }
        // Tail: reach across the final partial edge.
        let tail = self.block.subcurve(self.block.vertex_cp(i2), to)?;
        let out = wavefront_counted(
            &self.block,
            &tail,
            dp,
            &s2,
            &IntervalArray::empty(tail.n_edges()),
            counters,
        )?;
        Ok(out.per_sigma_vertex.last().unwrap().clone())
    }

    fn pair_data(&self, i1: usize, i2: usize, counters: &mut WorkCounters) -> Result<Arc<PairData>> {
        if let Some(p) = self.cover.cache.lock().unwrap().get(&(i1 as u32, i2 as u32)) {
            return Ok(p.clone());
        }
        let dp = self.cover.delta_prime;
        let spacing = self.cover.eps_inner * dp;
        let ne = self.block.n_edges();
        let sub = self
            .block
            .subcurve(self.block.vertex_cp(i1), self.block.vertex_cp(i2))?;
        let v_i1 = self.block.pt(i1).to_vec();
        let mut per_edge = Vec::with_capacity(ne);
        for i in 0..ne {
            let (ea, eb) = self.block.edge(i);
            let clip = match clip_segment_to_ball(ea, eb, &v_i1, dp) {
                Some(c) => c,
                None => {
                    per_edge.push(None);
                    continue;
                }
            };
            let edge_len = crate::geometry::dist_slice(ea, eb);
            let arc_len = (clip.hi - clip.lo) * edge_len;
            let count = if spacing <= 1e-300 {
                1
            } else {
                ((arc_len / spacing).floor() as usize + 1)
                    .min((2.0 / self.cover.eps_inner) as usize + 2)
            };
            let mut ts = Vec::with_capacity(count);
            for a in 0..count {
                let t = clip.lo + (a as f64) * spacing / edge_len.max(1e-300);
                if t > clip.hi + 1e-12 {
                    break;
                }
                ts.push(t.min(clip.hi));
            }
            if ts.is_empty() {
                ts.push(clip.lo);
            }
            let mut arrays = Vec::with_capacity(ts.len());
            let mut maxs = Vec::with_capacity(ts.len());
            for &t in &ts {
                let src = IntervalArray::point_source(ne, CurvePoint { edge: i, t });
                let out = wavefront_counted(
                    &self.block,
                    &sub,
                    dp,
                    &src,
                    &IntervalArray::empty(sub.n_edges()),
                    counters,
                )?;
                let arr = out.per_sigma_vertex.last().unwrap().clone();
                let mx = arr
                    .iter()
                    .filter(|(_, s)| s.is_some())
                    .map(|(e, _)| e as isize)
                    .max()
                    .unwrap_or(-1);
                arrays.push(arr);
                maxs.push(mx);
            }
            per_edge.push(Some(EdgeDisc { ts, arrays, maxs }));
        }
        let data = Arc::new(PairData { per_edge });
        self.cover
            .cache
            .lock()
            .unwrap()
            .insert((i1 as u32, i2 as u32), data.clone());
        Ok(data)
    }

    /// Direct access to one stored coverage array, for spot checks.
    #[doc(hidden)]
    pub fn cover_entry(
        &self,
        i1: usize,
        i2: usize,
        edge: usize,
        b: usize,
        counters: &mut WorkCounters,
    ) -> Result<Option<(f64, IntervalArray, isize)>> {
        let pair = self.pair_data(i1, i2, counters)?;
        Ok(pair.per_edge[edge].as_ref().and_then(|d| {
            d.ts.get(b)
                .map(|&t| (t, d.arrays[b].clone(), d.maxs[b]))
        }))
    }

    /// Surrogate search from a marked edge: a subcurve of the block within
    /// `audit.surrogate_bound * delta` of `sigma_prime`, or None — in which
    /// case the edge is not marked by `sigma_prime` at delta.
    pub fn find_surrogate_from_marked_edge(
        &self,
        sigma_prime: &Curve,
        edge: usize,
        counters: &mut WorkCounters,
    ) -> Result<Option<(CurvePoint, CurvePoint)>> {
        if sigma_prime.n_vertices() < 2 {
            return Err(FrechetError::InvalidInput(
                "query curve needs at least 2 vertices".into(),
            ));
        }
        let tol = Tol::for_curves(&[&self.block, sigma_prime]);
        let back = self.anchors(edge, counters)?;
        let fwd = self.anchors(edge + 1, counters)?;
        let joined = JoinedAnchors::new(self, edge, back, fwd)?;
        let thr = self.audit.simplified_threshold * self.params.delta;
        let first = sigma_prime.pt(0).to_vec();
        let last = sigma_prime.pt(sigma_prime.n_vertices() - 1).to_vec();
        let mut xs: Vec<CurvePoint> = Vec::new();
        let mut ys: Vec<CurvePoint> = Vec::new();
        for e in 0..joined.curve.n_edges() {
            let (a, b) = joined.curve.edge(e);
            if let Some(c) = clip_segment_to_ball(a, b, &first, thr) {
                xs.push(CurvePoint { edge: e, t: c.lo });
            }
            if let Some(c) = clip_segment_to_ball(a, b, &last, thr) {
                ys.push(CurvePoint { edge: e, t: c.hi });
            }
        }
        for x in &xs {
            for y in &ys {
                if x.gp() > y.gp() + tol.t {
                    continue;
                }
                let cand = joined.curve.subcurve(*x, *y)?;
                counters.surrogate_tests += 1;
                if decide_exact_counted(&cand, sigma_prime, thr, counters)? {
                    let bx = joined.map_back(self, *x);
                    let by = joined.map_back(self, *y);
                    let (bx, by) = if bx.gp() <= by.gp() { (bx, by) } else { (by, bx) };
                    return Ok(Some((bx, by)));
                }
            }
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy)]
enum ExtendEnd {
    Backward,
    Forward,
}

/// Simplification of the vertex range `[a, b]` extended one vertex outward
/// at the given end (when possible). The extension hop is an original edge,
/// so the certified error bound is unchanged.
fn extended_simp(
    block: &Curve,
    shortcut: &ShortcutIndex,
    params: &Params,
    end: ExtendEnd,
    a: usize,
    b: usize,
) -> Result<Simplification> {
    let last = block.n_vertices() - 1;
    let (a2, b2) = match end {
        ExtendEnd::Backward => (a.saturating_sub(1), b),
        ExtendEnd::Forward => (a, (b + 1).min(last)),
    };
    let base = simplify_continuous_from_index(
        block,
        shortcut,
        a,
        b,
        params.delta,
        usize::MAX,
        params.c_simp,
    )?
    .expect("unbounded budget always fits");
    if (a2, b2) == (a, b) {
        return Ok(base);
    }
    let mut indices = base.vertex_indices.clone();
    match end {
        ExtendEnd::Backward => indices.insert(0, a2),
        ExtendEnd::Forward => indices.push(b2),
    }
    let simplified = Curve::new(indices.iter().map(|&v| block.pt(v).to_vec()).collect())?;
    let original = block.subcurve(block.vertex_cp(a2), block.vertex_cp(b2))?;
    let bound = params.c_simp * params.delta;
    let matching = crate::matching::build_matching(&original, &simplified, bound)
        .or_else(|_| {
            crate::matching::build_matching(&original, &simplified, bound * (1.0 + 1e-12) + 1e-12)
        })?;
    let count = indices.len();
    Ok(Simplification {
        simplified,
        vertex_indices: indices,
        matching: crate::simplify::SimplificationMatching::Continuous(matching),
        error_bound: bound,
        budget_used: count,
    })
}

/// The concatenation of a backward anchor ending at `v_edge`, the block edge
/// itself, and a forward anchor starting at `v_{edge+1}`, with the piecewise
/// mapping back to block coordinates. Anchors are vertex-restricted, so the
/// joining segment is exactly the block edge.
struct JoinedAnchors {
    curve: Curve,
    back_simp: Arc<VertexAnchors>,
    fwd_simp: Arc<VertexAnchors>,
    /// Standalone subcurves the anchor matchings refer to.
    back_sub: Curve,
    fwd_sub: Curve,
    back_edges: usize,
    block_edge: usize,
}

impl JoinedAnchors {
    fn new(
        ix: &BlockIndex,
        edge: usize,
        back: Arc<VertexAnchors>,
        fwd: Arc<VertexAnchors>,
    ) -> Result<JoinedAnchors> {
        let mut pts: Vec<Vec<f64>> = back
            .back
            .simplified
            .vertices()
            .map(|p| p.to_vec())
            .collect();
        let back_edges = back.back.simplified.n_edges();
        pts.extend(fwd.fwd.simplified.vertices().map(|p| p.to_vec()));
        let curve = Curve::new(pts)?;
        let back_sub = sub_of(ix, back.back_start, edge);
        let fwd_sub = sub_of(ix, edge + 1, fwd.fwd_end);
        Ok(JoinedAnchors {
            curve,
            back_simp: back,
            fwd_simp: fwd,
            back_sub,
            fwd_sub,
            back_edges,
            block_edge: edge,
        })
    }

    /// Map a point of the joined curve to the corresponding block point.
    fn map_back(&self, ix: &BlockIndex, cp: CurvePoint) -> CurvePoint {
        if cp.edge < self.back_edges {
            let p = self
                .back_simp
                .back
                .matching_continuous()
                .query_sigma(&self.back_sub, cp);
            return shift_cp(&ix.block, p, self.back_simp.back_start);
        }
        if cp.edge == self.back_edges {
            // The joining segment is the block edge itself.
            return ix.block.canon(self.block_edge, cp.t);
        }
        let local = CurvePoint {
            edge: cp.edge - self.back_edges - 1,
            t: cp.t,
        };
        if self.fwd_sub.n_edges() == 0 {
            return ix.block.vertex_cp(self.block_edge + 1);
        }
        let p = self
            .fwd_simp
            .fwd
            .matching_continuous()
            .query_sigma(&self.fwd_sub, local);
        shift_cp(&ix.block, p, self.block_edge + 1)
    }
}

fn sub_of(ix: &BlockIndex, a: usize, b: usize) -> Curve {
    ix.block
        .subcurve(ix.block.vertex_cp(a), ix.block.vertex_cp(b))
        .expect("ordered")
}

fn shift_cp(block: &Curve, cp: CurvePoint, offset: usize) -> CurvePoint {
    block.canon(cp.edge + offset, cp.t)
}
