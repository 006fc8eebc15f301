//! A small deterministic generator (splitmix64) and samplers for field
//! elements and polynomials. Reports must be byte-identical for a given
//! seed across platforms, so no external randomness enters anywhere.

use crate::field::puiseux::PuiseuxSeries;
use crate::field::ratfunc::{RatFunc, TPoly};
use crate::field::Coefficient;
use crate::poly::Poly;
use crate::value::Rat;

#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            state: seed ^ 0x9e37_79b9_7f4a_7c15,
        }
    }

    /// Independent stream for a named section; insensitive to the order
    /// in which sections run.
    pub fn fork(&self, label: &str) -> Rng {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        for b in label.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        Rng::new(self.state ^ h)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Size profile for sampled elements.
#[derive(Debug, Clone)]
pub struct SampleProfile {
    pub max_terms: usize,
    pub max_level: u32,
    pub exp_range: i64,
}

impl Default for SampleProfile {
    fn default() -> Self {
        SampleProfile {
            max_terms: 3,
            max_level: 3,
            exp_range: 4,
        }
    }
}

/// Coefficient types that can be sampled deterministically.
pub trait SampleCoefficient: Coefficient {
    fn sample(rng: &mut Rng, p: u64, profile: &SampleProfile) -> Self;

    fn sample_nonzero(rng: &mut Rng, p: u64, profile: &SampleProfile) -> Self {
        loop {
            let c = Self::sample(rng, p, profile);
            if !c.is_zero() {
                return c;
            }
        }
    }
}

impl SampleCoefficient for PuiseuxSeries {
    fn sample(rng: &mut Rng, p: u64, profile: &SampleProfile) -> Self {
        let terms = rng.below(profile.max_terms as u64 + 1);
        let mut acc = PuiseuxSeries::zero(p);
        for _ in 0..terms {
            let level = rng.below(profile.max_level as u64 + 1) as u32;
            let den = (p as i64).pow(level);
            let num = rng.range_i64(-profile.exp_range * den, profile.exp_range * den);
            let coeff = 1 + rng.below(p - 1);
            acc = acc.add(&PuiseuxSeries::monomial(p, Rat::new(num, den), coeff));
        }
        acc
    }
}

impl SampleCoefficient for RatFunc {
    fn sample(rng: &mut Rng, p: u64, profile: &SampleProfile) -> Self {
        let deg = rng.below(profile.max_terms as u64 + 1) as usize;
        let num = TPoly::from_coeffs(p, (0..=deg).map(|_| rng.below(p)).collect());
        if num.is_zero() {
            return RatFunc::zero(p);
        }
        // denominators stay small monic; a plain power of t now and then
        let den = if rng.chance(1, 3) {
            TPoly::t_pow(p, rng.below(3) as usize)
        } else {
            let d = rng.below(2) as usize + 1;
            let mut coeffs: Vec<u64> = (0..d).map(|_| rng.below(p)).collect();
            coeffs.push(1);
            TPoly::from_coeffs(p, coeffs)
        };
        RatFunc::from_parts(num, den)
    }
}

/// A polynomial with degree in `deg_lo..=deg_hi` (certified nonzero
/// leading coefficient).
pub fn sample_poly<C: SampleCoefficient>(
    rng: &mut Rng,
    p: u64,
    deg_lo: usize,
    deg_hi: usize,
    profile: &SampleProfile,
) -> Poly<C> {
    let deg = deg_lo as u64 + rng.below((deg_hi - deg_lo + 1) as u64);
    let mut coeffs: Vec<C> = (0..deg).map(|_| C::sample(rng, p, profile)).collect();
    coeffs.push(C::sample_nonzero(rng, p, profile));
    Poly::from_coeffs(p, coeffs)
}

/// A monic polynomial of exact degree `deg`.
pub fn sample_monic<C: SampleCoefficient>(
    rng: &mut Rng,
    p: u64,
    deg: usize,
    profile: &SampleProfile,
) -> Poly<C> {
    let mut coeffs: Vec<C> = (0..deg).map(|_| C::sample(rng, p, profile)).collect();
    coeffs.push(C::one(p));
    Poly::from_coeffs(p, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let mut a = Rng::new(7);
        let mut b = Rng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = Rng::new(7).fork("section");
        let mut d = Rng::new(7).fork("section");
        let mut e = Rng::new(7).fork("other");
        let (x, y, z) = (c.next_u64(), d.next_u64(), e.next_u64());
        assert_eq!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn sampled_series_respect_the_level_bound() {
        let mut rng = Rng::new(42);
        let profile = SampleProfile::default();
        for _ in 0..50 {
            let s = PuiseuxSeries::sample(&mut rng, 2, &profile);
            assert!(s.level() <= profile.max_level);
        }
    }

    #[test]
    fn sampled_polys_have_certified_degree() {
        let mut rng = Rng::new(42);
        let profile = SampleProfile::default();
        for _ in 0..50 {
            let f: Poly<RatFunc> = sample_poly(&mut rng, 3, 1, 4, &profile);
            let d = f.deg().unwrap();
            assert!((1..=4).contains(&d));
        }
    }
}
