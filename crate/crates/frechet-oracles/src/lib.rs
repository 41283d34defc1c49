//! Brute-force reference implementations for cross-validating the `frechet`
//! crate. Deterministic, exact where feasible, and hard-capped where the
//! search is exponential. Nothing here shares algorithm code with the main
//! crate.

pub mod oracle;

pub use oracle::{
    brute_cover, brute_decide, brute_discrete, brute_discrete_reachable, brute_marked_edges,
    brute_min_simplification, brute_reach_restriction, brute_reachable_pair, fs_reach,
    FreeSpaceReach, OracleReport, ReachRestriction, SIMPLIFICATION_CAP,
};
