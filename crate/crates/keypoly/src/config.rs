//! Numeric defaults and their environment overrides.

/// Environment variable overriding the default certification depth of
/// evaluation handles.
pub const PRECISION_ENV: &str = "KEYPOLY_PRECISION_DEPTH";

pub const DEFAULT_PRECISION_DEPTH: u32 = 24;
pub const DEFAULT_FAMILY_DEPTH: u32 = 8;
pub const DEFAULT_N_MAX: u32 = 12;
pub const DEFAULT_CASES: u32 = 64;
pub const DEFAULT_TUPLE_CAP: u64 = 1_000_000;
pub const DEFAULT_RANDOM_WITNESSES: u32 = 64;

/// Certification depth for evaluation handles: the environment override
/// when present and well-formed, the default otherwise.
pub fn precision_depth() -> u32 {
    match std::env::var(PRECISION_ENV) {
        Ok(s) => s.trim().parse().unwrap_or(DEFAULT_PRECISION_DEPTH),
        Err(_) => DEFAULT_PRECISION_DEPTH,
    }
}
