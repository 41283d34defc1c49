//! Validation of the block machinery (coverage index, surrogate search,
//! block advancement) against brute-force oracles on randomized instances.

use frechet::approx::block::{preprocess_block, BlockIndex};
use frechet::approx::reach::{reach, ReachCtx};
use frechet::counters::WorkCounters;
use frechet::geometry::{Curve, CurvePoint, IntervalArray, Span};
use frechet::params::{Params, ScheduleOverride};
use frechet::synthetic::{generate_synthetic, SyntheticKind};
use frechet_oracles::oracle;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn walk(n: usize, seed: u64) -> Curve {
    generate_synthetic(&SyntheticKind::Walk { dim: 2, step: 1.0 }, n, seed).unwrap()
}

fn random_array(rng: &mut ChaCha8Rng, n_edges: usize, density: f64) -> IntervalArray {
    let mut a = IntervalArray::empty(n_edges);
    for e in 0..n_edges {
        if rng.gen::<f64>() < density {
            let lo = rng.gen::<f64>();
            let hi = lo + (1.0 - lo) * rng.gen::<f64>();
            a.set(e, Some(Span { lo, hi }));
        }
    }
    a
}

/// `inner` fits inside `outer` within slack.
fn contained(inner: &IntervalArray, outer: &IntervalArray, eta: f64) -> bool {
    for (e, s) in inner.iter() {
        if let Some(s) = s {
            match outer.span(e) {
                Some(o) => {
                    if s.lo < o.lo - eta || s.hi > o.hi + eta {
                        return false;
                    }
                }
                None => return false,
            }
        }
    }
    true
}

fn block_params(rng: &mut ChaCha8Rng, delta: f64, mu1: usize) -> Params {
    let mu2 = rng.gen_range(2..=((mu1 / 2).max(2)));
    let mu3 = rng.gen_range(1..=((mu2 - 1).max(1)));
    Params::with_overrides(
        delta,
        0.5,
        100,
        rng.gen(),
        ScheduleOverride {
            mu1: Some(mu1),
            mu2: Some(mu2),
            mu3: Some(mu3),
            omega: Some(rng.gen_range(1..4)),
        },
    )
    .unwrap()
}

fn random_block_index(rng: &mut ChaCha8Rng, max_mu1: usize) -> (Curve, Params, BlockIndex) {
    let mu1 = rng.gen_range(4..=max_mu1);
    let block = walk(mu1 + 1, rng.gen());
    let delta = rng.gen_range(0.3..2.5);
    let p = block_params(rng, delta, mu1);
    let ix = preprocess_block(&block, &p).unwrap();
    (block, p, ix)
}

#[test]
fn cover_query_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut queries = 0;
    while queries < 500 {
        let (block, p, ix) = random_block_index(&mut rng, 14);
        let dp = p.audit().cover_threshold * p.delta;
        for _ in 0..5 {
            queries += 1;
            // Random query subcurve of the block.
            let g1 = rng.gen_range(0.0..block.n_edges() as f64);
            let g2 = rng.gen_range(g1..block.n_edges() as f64);
            let cp = |g: f64| -> CurvePoint {
                let e = (g.floor() as usize).min(block.n_edges() - 1);
                CurvePoint { edge: e, t: g - e as f64 }
            };
            let (from, to) = (cp(g1), cp(g2));
            let sources = random_array(&mut rng, block.n_edges(), 0.5);
            let mut c = WorkCounters::default();
            let out = ix.cover_query(from, to, dp, &sources, &mut c).unwrap();
            let query_sub = block.subcurve(from, to).unwrap();
            let lower = oracle::brute_cover(&block, &query_sub, dp, &sources).unwrap();
            let upper = oracle::brute_cover(
                &block,
                &query_sub,
                (1.0 + p.eps_inner) * dp,
                &sources,
            )
            .unwrap();
            let eta = 1e-6;
            assert!(
                contained(&lower, &out, eta),
                "completeness violated: {:?} vs {:?} (q=({:.3},{:.3}))",
                lower,
                out,
                g1,
                g2
            );
            assert!(
                contained(&out, &upper, eta),
                "soundness violated: out={:?} upper={:?} (q=({:.3},{:.3}))",
                out,
                upper,
                g1,
                g2
            );
        }
    }
}

#[test]
fn cover_entries_match_fresh_propagation() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let mut checks = 0;
    while checks < 50 {
        let (block, p, ix) = random_block_index(&mut rng, 10);
        let dp = p.audit().cover_threshold * p.delta;
        let last = block.n_vertices() - 1;
        let i1 = rng.gen_range(0..last - 1);
        let i2 = rng.gen_range(i1 + 1..=last);
        let edge = rng.gen_range(0..block.n_edges());
        let mut c = WorkCounters::default();
        if let Some((t, arr, mx)) = ix.cover_entry(i1, i2, edge, 0, &mut c).unwrap() {
            checks += 1;
            let sub = block
                .subcurve(block.vertex_cp(i1), block.vertex_cp(i2))
                .unwrap();
            let src = IntervalArray::point_source(block.n_edges(), CurvePoint { edge, t });
            let fresh = frechet::wavefront(&block, &sub, dp, &src, &IntervalArray::empty(sub.n_edges()))
                .unwrap();
            let expect = fresh.per_sigma_vertex.last().unwrap();
            assert_eq!(&arr, expect);
            let expect_max = expect
                .iter()
                .filter(|(_, s)| s.is_some())
                .map(|(e, _)| e as isize)
                .max()
                .unwrap_or(-1);
            assert_eq!(mx, expect_max);
        }
    }
}

#[test]
fn surrogate_search_null_means_unmarked() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let mut nulls = 0;
    let mut hits = 0;
    for _ in 0..120 {
        let (block, p, ix) = random_block_index(&mut rng, 12);
        // Query curve: sometimes near the block, sometimes far.
        let near = rng.gen::<f64>() < 0.7;
        let mut q = walk(rng.gen_range(2..=(p.mu2 + 1)), rng.gen());
        if near {
            // overlay onto a random block position
            let anchor = block.pt(rng.gen_range(0..block.n_vertices())).to_vec();
            let pts: Vec<Vec<f64>> = q
                .vertices()
                .map(|v| vec![v[0] + anchor[0], v[1] + anchor[1]])
                .collect();
            q = Curve::new(pts).unwrap();
        } else {
            let pts: Vec<Vec<f64>> = q.vertices().map(|v| vec![v[0] + 500.0, v[1]]).collect();
            q = Curve::new(pts).unwrap();
        }
        let marked = oracle::brute_marked_edges(&block, &q, p.delta).unwrap();
        let mut c = WorkCounters::default();
        for edge in 0..block.n_edges() {
            let res = ix.find_surrogate_from_marked_edge(&q, edge, &mut c).unwrap();
            match res {
                None => {
                    nulls += 1;
                    assert!(
                        !marked.contains(&edge),
                        "null returned for marked edge {} (marked set {:?})",
                        edge,
                        marked
                    );
                }
                Some((from, to)) => {
                    hits += 1;
                    // The returned range is certified within the audited
                    // multiple of delta.
                    let sub = block.subcurve(from, to).unwrap();
                    let bound = p.audit().surrogate_bound * p.delta;
                    assert!(
                        oracle::brute_decide(&sub, &q, bound * (1.0 + 1e-7) + 1e-9).unwrap(),
                        "surrogate not within the certified bound"
                    );
                }
            }
        }
    }
    assert!(nulls > 50 && hits > 50, "want both outcomes: {} {}", nulls, hits);
}

/// Inputs for one advancement call derived from the true reachability of the
/// full pair, restricted to a random block.
struct BlockInstance {
    tau: Curve,
    sigma: Curve,
    params: Params,
    tau_range: (usize, usize),
    sigma_range: (usize, usize),
    block: Curve,
    sigma_l: Curve,
}

fn random_block_instance(rng: &mut ChaCha8Rng) -> BlockInstance {
    // Sizes up to 60 vertices, block sizes dividing the padded edge counts.
    let mu1 = rng.gen_range(4..14);
    let k_blocks = rng.gen_range(1..4usize);
    let n = mu1 * k_blocks + 1;
    let mu2 = rng.gen_range(2..=mu1.min(6));
    let l_blocks = rng.gen_range(1..4usize);
    let m = mu2 * l_blocks + 1;
    let tau = walk(n, rng.gen());
    let sigma = walk(m, rng.gen());
    let delta = rng.gen_range(0.5..4.0);
    let p = block_params(rng, delta, mu1);
    let p = Params {
        mu2,
        mu3: {
            let want = rng.gen_range(1..=(mu2 - 1).max(1));
            (1..=want).rev().find(|d| (mu2 - 1) % d == 0).unwrap_or(1)
        },
        ..p
    };
    let k = rng.gen_range(0..k_blocks);
    let l = rng.gen_range(0..l_blocks);
    let tau_range = (k * mu1, (k + 1) * mu1);
    let sigma_range = (l * mu2, (l + 1) * mu2);
    let block = tau
        .subcurve(tau.vertex_cp(tau_range.0), tau.vertex_cp(tau_range.1))
        .unwrap();
    let sigma_l = sigma
        .subcurve(sigma.vertex_cp(sigma_range.0), sigma.vertex_cp(sigma_range.1))
        .unwrap();
    BlockInstance {
        tau,
        sigma,
        params: p,
        tau_range,
        sigma_range,
        block,
        sigma_l,
    }
}

#[test]
fn reach_covers_truth_and_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let mut nontrivial = 0;
    let mut tested = 0;
    while tested < 100 {
        let inst = random_block_instance(&mut rng);
        let p = &inst.params;
        // True reachability restrictions at the block entry boundaries.
        let entry = oracle::brute_reach_restriction(
            &inst.tau,
            &inst.sigma,
            p.delta,
            inst.tau_range.0,
            inst.sigma_range.0,
            inst.tau_range,
            inst.sigma_range,
        )
        .unwrap();
        let exit = oracle::brute_reach_restriction(
            &inst.tau,
            &inst.sigma,
            p.delta,
            inst.tau_range.1,
            inst.sigma_range.1,
            inst.tau_range,
            inst.sigma_range,
        )
        .unwrap();
        tested += 1;
        let ix = preprocess_block(&inst.block, p).unwrap();
        let mut c = WorkCounters::default();
        let ctx = ReachCtx {
            full_n: inst.tau.n_vertices(),
            k: 0,
            l: 0,
        };
        let (out_v, out_w) = reach(&ix, &inst.sigma_l, &entry.on_sigma, &entry.on_tau, &ctx, &mut c).unwrap();
        // Completeness: the true exit restrictions are covered.
        let eta = 1e-6;
        assert!(
            contained(&exit.on_sigma, &out_v, eta),
            "exit sigma coverage missing: true={:?} out={:?}",
            exit.on_sigma,
            out_v
        );
        assert!(
            contained(&exit.on_tau, &out_w, eta),
            "exit tau coverage missing: true={:?} out={:?}",
            exit.on_tau,
            out_w
        );
        if !exit.on_sigma.is_all_empty() || !exit.on_tau.is_all_empty() {
            nontrivial += 1;
        }
        // Soundness: every covered point is reachable at the audited ratio.
        let ratio = p.audit().ratio_bound;
        let certify_delta = ratio * p.delta * (1.0 + 1e-9) + 1e-9;
        for (e, s) in out_v.iter() {
            if let Some(s) = s {
                for t in [s.lo, s.hi] {
                    let q = CurvePoint {
                        edge: inst.sigma_range.0 + e,
                        t,
                    };
                    let okv = oracle::brute_reachable_pair(
                        &inst.tau,
                        &inst.sigma,
                        certify_delta,
                        (inst.tau.start_cp(), inst.sigma.start_cp()),
                        (inst.tau.vertex_cp(inst.tau_range.1), q),
                    )
                    .unwrap();
                    assert!(okv, "unsound sigma cover at edge {} t {}", e, t);
                }
            }
        }
        for (e, s) in out_w.iter() {
            if let Some(s) = s {
                for t in [s.lo, s.hi] {
                    let y = CurvePoint {
                        edge: inst.tau_range.0 + e,
                        t,
                    };
                    let okw = oracle::brute_reachable_pair(
                        &inst.tau,
                        &inst.sigma,
                        certify_delta,
                        (inst.tau.start_cp(), inst.sigma.start_cp()),
                        (y, inst.sigma.vertex_cp(inst.sigma_range.1)),
                    )
                    .unwrap();
                    assert!(okw, "unsound tau cover at edge {} t {}", e, t);
                }
            }
        }
    }
    assert!(nontrivial >= 20, "want nontrivial instances, got {}", nontrivial);
}
