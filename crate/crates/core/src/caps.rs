//! Search caps shared by the exponential procedures.
//!
//! `MDL_CAP_OVERRIDE=<k>` multiplies every cap by `k`. Raised caps may not
//! terminate in reasonable time.

use std::sync::OnceLock;

pub const CANDIDATE_FLATS: usize = 5000;
pub const COVER_NODES: usize = 20_000_000;
pub const STACK_EVALUATIONS: usize = 1_000_000;
pub const MINOR_SEARCH_NODES: usize = 5_000_000;
pub const REP_RANK: usize = 5;
pub const REP_POINTS: usize = 40;
pub const REP_NODES: usize = 2_000_000;

fn multiplier() -> usize {
    static MULT: OnceLock<usize> = OnceLock::new();
    *MULT.get_or_init(|| {
        std::env::var("MDL_CAP_OVERRIDE")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .unwrap_or(1)
    })
}

pub fn scaled(cap: usize) -> usize {
    cap.saturating_mul(multiplier())
}
