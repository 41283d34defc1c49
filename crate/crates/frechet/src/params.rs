//! Parameters of the approximate decision pipeline: the block-size schedule,
//! sampling configuration, and the audited approximation constants.

use crate::error::{FrechetError, Result};
use crate::simplify::DEFAULT_C_SIMP;

/// All knobs of one approximate decision run.
#[derive(Debug, Clone)]
pub struct Params {
    /// Decision threshold.
    pub delta: f64,
    /// Headline accuracy parameter in (0,1).
    pub eps: f64,
    /// Inner accuracy used by the coverage-index discretization; eps/10.
    pub eps_inner: f64,
    /// Block size on the longer curve.
    pub mu1: usize,
    /// Block size on the shorter curve.
    pub mu2: usize,
    /// Sub-block size; divides mu2 - 1.
    pub mu3: usize,
    /// Density threshold for edge sampling.
    pub omega: usize,
    /// Sampling constant in the per-sub-block draw cap.
    pub sample_constant: f64,
    /// Vertex-restriction multiplier of the simplifier.
    pub c_simp: f64,
    pub seed: u64,
    /// Skip probabilistic probing entirely.
    pub deterministic_fallback_only: bool,
}

/// Requested block-size overrides; `None` falls back to the schedule.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScheduleOverride {
    pub mu1: Option<usize>,
    pub mu2: Option<usize>,
    pub mu3: Option<usize>,
    pub omega: Option<usize>,
}

fn round_pow(m: usize, e: f64) -> usize {
    (m as f64).powf(e).round() as usize
}

/// Largest divisor of `v` that is at most `cap`.
fn largest_divisor_at_most(v: usize, cap: usize) -> usize {
    let cap = cap.clamp(1, v);
    (1..=cap).rev().find(|d| v % d == 0).unwrap_or(1)
}

impl Params {
    /// Default schedule for curves with `m` vertices on the shorter side.
    pub fn new(delta: f64, eps: f64, m: usize, seed: u64) -> Result<Params> {
        Params::with_overrides(delta, eps, m, seed, ScheduleOverride::default())
    }

    pub fn with_overrides(
        delta: f64,
        eps: f64,
        m: usize,
        seed: u64,
        ov: ScheduleOverride,
    ) -> Result<Params> {
        if !(0.0..1.0).contains(&eps) || eps <= 0.0 {
            return Err(FrechetError::InvalidInput("eps must be in (0,1)".into()));
        }
        if delta < 0.0 {
            return Err(FrechetError::InvalidInput("negative delta".into()));
        }
        let mu1 = ov.mu1.unwrap_or_else(|| round_pow(m, 0.24).max(2));
        let mu2 = ov.mu2.unwrap_or_else(|| round_pow(m, 0.02).max(2));
        let mu3 = ov.mu3.unwrap_or_else(|| round_pow(m, 0.01).max(1));
        let omega = ov.omega.unwrap_or_else(|| round_pow(m, 0.12).max(1));
        if mu3 > mu2 || mu2 > mu1 {
            return Err(FrechetError::InvalidInput(format!(
                "block sizes must satisfy mu3 <= mu2 <= mu1, got {} {} {}",
                mu3, mu2, mu1
            )));
        }
        if mu2 < 2 {
            return Err(FrechetError::InvalidInput("mu2 must be at least 2".into()));
        }
        // Sub-blocks tile all but the first edge of a block.
        let mu3 = largest_divisor_at_most(mu2 - 1, mu3);
        Ok(Params {
            delta,
            eps,
            eps_inner: eps / 10.0,
            mu1,
            mu2,
            mu3,
            omega,
            sample_constant: 0.5,
            c_simp: DEFAULT_C_SIMP,
            seed,
            deterministic_fallback_only: false,
        })
    }

    /// Per-sub-block cap on sampled probes.
    pub fn sample_cap(&self, n: usize) -> usize {
        let v = 2.0 * self.sample_constant * (n.max(2) as f64).ln() * self.mu1 as f64
            / self.omega as f64;
        v.ceil() as usize
    }

    /// Simplification budget for whole-block and prefix/suffix surrogates.
    pub fn simp_budget(&self) -> usize {
        2 * self.mu2 + 2
    }

    /// Simplification budget in the discrete pipeline.
    pub fn simp_budget_discrete(&self) -> usize {
        self.mu2 + 2
    }

    pub fn audit(&self) -> RatioAudit {
        RatioAudit::new(self.c_simp, self.eps_inner)
    }
}

/// The approximation constants implied by a simplifier error multiplier `s`
/// and the coverage-index slack `eps_inner`, derived by chaining triangle
/// inequalities through every surrogate step.
///
/// With an ideal `(1 + eps_inner)` simplifier these reproduce the constants
/// of the underlying analysis; with the vertex-restricted `s = 2` simplifier
/// they are larger, and `ratio_bound` is the number certified to callers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioAudit {
    /// Simplifier error multiplier `s`.
    pub c_simp: f64,
    pub eps_inner: f64,
    /// Threshold multiplier for propagation against a simplified curve:
    /// true distance plus one simplification error, `1 + s`.
    pub simplified_threshold: f64,
    /// Distance multiplier certified by the marked-edge surrogate search:
    /// `1 + 2s` (one simplification in, one out).
    pub surrogate_bound: f64,
    /// Query threshold of the coverage index: `2 + 2s` (surrogate bound plus
    /// the true distance).
    pub cover_threshold: f64,
    /// End-to-end certified ratio:
    /// `(1 + eps_inner) * (2 + 2s) + (1 + 2s)`.
    pub ratio_bound: f64,
}

impl RatioAudit {
    pub fn new(c_simp: f64, eps_inner: f64) -> RatioAudit {
        let s = c_simp;
        let simplified_threshold = 1.0 + s;
        let surrogate_bound = 1.0 + 2.0 * s;
        let cover_threshold = 2.0 + 2.0 * s;
        let ratio_bound = (1.0 + eps_inner) * cover_threshold + surrogate_bound;
        RatioAudit {
            c_simp,
            eps_inner,
            simplified_threshold,
            surrogate_bound,
            cover_threshold,
            ratio_bound,
        }
    }
}

/// The certified end-to-end ratio bound for the given accuracy parameter,
/// with the default vertex-restricted simplifier.
pub fn ratio_bound(eps: f64) -> f64 {
    RatioAudit::new(DEFAULT_C_SIMP, eps / 10.0).ratio_bound
}
