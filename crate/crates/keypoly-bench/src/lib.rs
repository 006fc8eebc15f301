//! Shared fixtures for the benchmarks.

use keypoly::limits::{artin_schreier_family_with_depth, KeyFamily};
use keypoly::{Poly, PuiseuxSeries};

pub fn scenario(p: u64, depth: u32) -> (KeyFamily<PuiseuxSeries>, Poly<PuiseuxSeries>) {
    artin_schreier_family_with_depth(p, depth, depth + 8).expect("scenario builds")
}
