//! The seeded randomized property suite. Every section checks one exact
//! identity or bound on sampled inputs; a given seed produces the same
//! samples, the same outcomes, and byte-identical JSON on every run.
//! Failing samples are shrunk degree-first before reporting.

use std::sync::Arc;

use serde::Serialize;

use crate::compare::{compare_expansions, compare_same_degree};
use crate::config;
use crate::deriv::{derivative_drop, leibniz_expand, reconstruct, tuple_value_bound};
use crate::field::puiseux::PuiseuxSeries;
use crate::field::ratfunc::RatFunc;
use crate::field::Coefficient;
use crate::fp;
use crate::limits::{
    artin_schreier_companion, artin_schreier_family_with_depth, bound_checks, in_s_alpha,
    KeyFamily, SAlphaStatus,
};
use crate::poly::Poly;
use crate::rng::{sample_poly, Rng, SampleCoefficient, SampleProfile};
use crate::valuation::{EngineError, ValuationHandle};
use crate::value::{ExtValue, Rat};

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub p: u64,
    pub seed: u64,
    pub cases: u32,
    pub n_max: u32,
    pub cap: u64,
    /// Pairs `(m, n)` with `m < n <= pair_max` for the comparison sections.
    pub pair_max: u32,
    pub precision_depth: u32,
    /// Run only the named sections when non-empty.
    pub sections: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            p: 2,
            seed: 0,
            cases: config::DEFAULT_CASES,
            n_max: config::DEFAULT_N_MAX,
            cap: config::DEFAULT_TUPLE_CAP,
            pair_max: 4,
            precision_depth: config::DEFAULT_PRECISION_DEPTH,
            sections: vec![],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub case: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionReport {
    pub name: String,
    pub cases: u32,
    pub failures: Vec<Failure>,
}

impl SectionReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub p: u64,
    pub seed: u64,
    pub cases: u32,
    pub sections: Vec<SectionReport>,
    pub pass: bool,
}

pub const SECTION_NAMES: &[&str] = &[
    "monomial-axioms",
    "truncation-axioms",
    "level-product",
    "delta-additivity",
    "small-level-remainder",
    "hasse-leibniz",
    "leibniz-reconstruction",
    "tuple-bounds",
    "drop-bound",
    "derivative-drop",
    "same-degree",
    "expansion-compare",
    "family-bounds",
    "s-alpha",
];

struct Ctx {
    p: u64,
    cases: u32,
    n_max: u32,
    cap: u64,
    pair_max: u32,
    family: KeyFamily<PuiseuxSeries>,
    minimal: Poly<PuiseuxSeries>,
    companion: Poly<PuiseuxSeries>,
}

/// Run the configured sections and collect one report per section.
/// Computation errors inside a section (undecided values, precision
/// loss) are recorded as failures of that section, not panics.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, EngineError> {
    let family_depth = cfg.pair_max.max(6);
    let approx = cfg.precision_depth.max(cfg.n_max + 4).max(family_depth + 4);
    let (family, minimal) = artin_schreier_family_with_depth(cfg.p, family_depth, approx)?;
    let companion = artin_schreier_companion(cfg.p);
    let ctx = Ctx {
        p: cfg.p,
        cases: cfg.cases,
        n_max: cfg.n_max,
        cap: cfg.cap,
        pair_max: cfg.pair_max,
        family,
        minimal,
        companion,
    };
    for requested in &cfg.sections {
        if !SECTION_NAMES.contains(&requested.as_str()) {
            return Err(EngineError::InvalidInput(format!(
                "unknown suite section {requested:?}; known sections: {}",
                SECTION_NAMES.join(", ")
            )));
        }
    }
    let root = Rng::new(cfg.seed);
    let mut sections = vec![];
    for name in SECTION_NAMES {
        if !cfg.sections.is_empty() && !cfg.sections.iter().any(|s| s == name) {
            continue;
        }
        let mut rng = root.fork(name);
        let report = run_section(name, &ctx, &mut rng);
        sections.push(report);
    }
    let pass = sections.iter().all(|s| s.pass());
    Ok(SuiteReport {
        p: cfg.p,
        seed: cfg.seed,
        cases: cfg.cases,
        sections,
        pass,
    })
}

fn run_section(name: &str, ctx: &Ctx, rng: &mut Rng) -> SectionReport {
    let failures = match name {
        "monomial-axioms" => monomial_axioms(ctx, rng),
        "truncation-axioms" => truncation_axioms(ctx, rng),
        "level-product" => level_product(ctx, rng),
        "delta-additivity" => delta_additivity(ctx, rng),
        "small-level-remainder" => small_level_remainder(ctx, rng),
        "hasse-leibniz" => hasse_leibniz(ctx, rng),
        "leibniz-reconstruction" => leibniz_reconstruction(ctx, rng),
        "tuple-bounds" => tuple_bounds(ctx, rng),
        "drop-bound" => drop_bound(ctx, rng),
        "derivative-drop" => derivative_drop_section(ctx, rng),
        "same-degree" => same_degree(ctx),
        "expansion-compare" => expansion_compare(ctx, rng),
        "family-bounds" => family_bounds(ctx, rng),
        "s-alpha" => s_alpha(ctx, rng),
        other => vec![Failure {
            case: other.into(),
            message: "unknown section".into(),
        }],
    };
    SectionReport {
        name: name.into(),
        cases: ctx.cases,
        failures,
    }
}

// ---- helpers ----------------------------------------------------------

fn random_gamma(rng: &mut Rng) -> Rat {
    let den = rng.range_i64(1, 4);
    let num = rng.range_i64(-4, 4);
    Rat::new(num, den)
}

fn scenario_profile() -> SampleProfile {
    SampleProfile {
        max_terms: 2,
        max_level: 3,
        exp_range: 3,
    }
}

/// Degree-first shrink: drop leading coefficients while the predicate
/// still fails.
fn shrink_pair<C: Coefficient>(
    mut f: Poly<C>,
    mut g: Poly<C>,
    mut message: String,
    fails: impl Fn(&Poly<C>, &Poly<C>) -> Option<String>,
) -> (Poly<C>, Poly<C>, String) {
    loop {
        let mut reduced = false;
        for which in 0..2 {
            let target = if which == 0 { &f } else { &g };
            if let Some(d) = target.deg() {
                if d == 0 {
                    continue;
                }
                let smaller = Poly::from_coeffs(target.p(), target.coeffs()[..d].to_vec());
                if smaller.is_zero() {
                    continue;
                }
                let (a, b) = if which == 0 {
                    (smaller.clone(), g.clone())
                } else {
                    (f.clone(), smaller.clone())
                };
                if let Some(msg) = fails(&a, &b) {
                    f = a;
                    g = b;
                    message = msg;
                    reduced = true;
                    break;
                }
            }
        }
        if !reduced {
            return (f, g, message);
        }
    }
}

fn check_axioms<C: Coefficient>(
    v: &ValuationHandle<C>,
    f: &Poly<C>,
    g: &Poly<C>,
) -> Option<String> {
    let run = || -> Result<Option<String>, EngineError> {
        let vf = v.nu(f)?;
        let vg = v.nu(g)?;
        let vfg = v.nu(&f.mul(g))?;
        let expected = match vf.checked_add(&vg) {
            Ok(e) => e,
            Err(e) => return Ok(Some(e.to_string())),
        };
        if vfg != expected {
            return Ok(Some(format!(
                "nu(fg) = {vfg} but nu(f) + nu(g) = {expected}"
            )));
        }
        let vsum = v.nu(&f.add(g))?;
        let min = vf.clone().min(vg.clone());
        if vsum < min {
            return Ok(Some(format!("nu(f+g) = {vsum} below min {min}")));
        }
        if v.nu(&Poly::one(f.p()))? != ExtValue::zero() {
            return Ok(Some("nu(1) != 0".into()));
        }
        if v.nu(&Poly::zero(f.p()))? != ExtValue::PosInf {
            return Ok(Some("nu(0) != inf".into()));
        }
        Ok(None)
    };
    match run() {
        Ok(out) => out,
        Err(e) => Some(e.to_string()),
    }
}

fn push_shrunk<C: Coefficient>(
    failures: &mut Vec<Failure>,
    f: Poly<C>,
    g: Poly<C>,
    message: String,
    fails: impl Fn(&Poly<C>, &Poly<C>) -> Option<String>,
) {
    let (f, g, message) = shrink_pair(f, g, message, fails);
    failures.push(Failure {
        case: format!("f = {f}, g = {g}"),
        message,
    });
}

// ---- sections ---------------------------------------------------------

fn monomial_axioms(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = SampleProfile::default();
    for _ in 0..ctx.cases {
        let gamma = random_gamma(rng);
        let v: Arc<ValuationHandle<RatFunc>> = ValuationHandle::monomial(ctx.p, gamma.clone());
        let f: Poly<RatFunc> = sample_poly(rng, ctx.p, 0, 5, &profile);
        let g: Poly<RatFunc> = sample_poly(rng, ctx.p, 0, 5, &profile);
        if let Some(msg) = check_axioms(v.as_ref(), &f, &g) {
            let vv = v.clone();
            push_shrunk(&mut failures, f, g, msg, move |a, b| {
                check_axioms(vv.as_ref(), a, b)
            });
        }

        let vp: Arc<ValuationHandle<PuiseuxSeries>> = ValuationHandle::monomial(ctx.p, gamma);
        let fp: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 0, 4, &scenario_profile());
        let gp: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 0, 4, &scenario_profile());
        if let Some(msg) = check_axioms(vp.as_ref(), &fp, &gp) {
            let vv = vp.clone();
            push_shrunk(&mut failures, fp, gp, msg, move |a, b| {
                check_axioms(vv.as_ref(), a, b)
            });
        }
    }
    failures
}

fn truncation_axioms(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = scenario_profile();
    for _ in 0..ctx.cases {
        let k = 1 + rng.below(ctx.pair_max as u64 - 1) as u32;
        let trunc = match ctx.family.truncation(k) {
            Ok(t) => t,
            Err(e) => {
                failures.push(Failure {
                    case: format!("member {k}"),
                    message: e.to_string(),
                });
                continue;
            }
        };
        let f: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 0, 4, &profile);
        let g: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 0, 4, &profile);
        if let Some(msg) = check_axioms(trunc.as_ref(), &f, &g) {
            let vv = trunc.clone();
            push_shrunk(&mut failures, f, g, msg, move |a, b| {
                check_axioms(vv.as_ref(), a, b)
            });
            continue;
        }
        // the truncation never exceeds the value, a unique attaining
        // index forces equality, and derivatives obey the level bound
        let check_bound = |a: &Poly<PuiseuxSeries>| -> Option<String> {
            let run = || -> Result<Option<String>, EngineError> {
                if a.is_zero() {
                    return Ok(None);
                }
                let tv = trunc.nu(a)?;
                let vv = ctx.family.valuation.nu(a)?;
                if tv > vv {
                    return Ok(Some(format!("nu_Q = {tv} above nu = {vv}")));
                }
                let q = ctx.family.member(k);
                let exp = ctx.family.valuation.expansion_data(a, &q)?;
                if exp.min_set.len() == 1 && tv != vv {
                    return Ok(Some(format!(
                        "unique attaining index but nu_Q = {tv} != nu = {vv}"
                    )));
                }
                let eps = ctx.family.valuation.level(&q)?.epsilon;
                for b in 1..=a.deg().unwrap_or(0) {
                    let da = a.hasse_derivative(b);
                    if da.is_zero() {
                        continue;
                    }
                    let lhs = trunc.nu(&da)?;
                    let rhs = tv.checked_sub(&eps.mul_nat(b))?;
                    if lhs < rhs {
                        return Ok(Some(format!(
                            "nu_Q(d_{b} f) = {lhs} below nu_Q(f) - b*eps = {rhs}"
                        )));
                    }
                }
                Ok(None)
            };
            match run() {
                Ok(out) => out,
                Err(e) => Some(e.to_string()),
            }
        };
        if let Some(msg) = check_bound(&f) {
            failures.push(Failure {
                case: format!("f = {f}, member {k}"),
                message: msg,
            });
        }
    }
    failures
}

fn check_level_product<C: Coefficient>(
    v: &ValuationHandle<C>,
    f: &Poly<C>,
    g: &Poly<C>,
) -> Option<String> {
    let run = || -> Result<Option<String>, EngineError> {
        if f.is_zero() || g.is_zero() {
            return Ok(None);
        }
        let lf = v.level(f)?.epsilon;
        let lg = v.level(g)?.epsilon;
        let lfg = v.level(&f.mul(g))?.epsilon;
        let expected = lf.clone().max(lg.clone());
        if lfg != expected {
            return Ok(Some(format!(
                "eps(fg) = {lfg} but max(eps(f), eps(g)) = {expected}"
            )));
        }
        Ok(None)
    };
    match run() {
        Ok(out) => out,
        Err(e) => Some(e.to_string()),
    }
}

fn level_product(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = SampleProfile::default();
    for _ in 0..ctx.cases {
        let gamma = random_gamma(rng);
        let v: Arc<ValuationHandle<RatFunc>> = ValuationHandle::monomial(ctx.p, gamma);
        let f: Poly<RatFunc> = sample_poly(rng, ctx.p, 1, 4, &profile);
        let g: Poly<RatFunc> = sample_poly(rng, ctx.p, 1, 4, &profile);
        if let Some(msg) = check_level_product(v.as_ref(), &f, &g) {
            let vv = v.clone();
            push_shrunk(&mut failures, f, g, msg, move |a, b| {
                check_level_product(vv.as_ref(), a, b)
            });
        }

        let f: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 1, 3, &scenario_profile());
        let g: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 1, 3, &scenario_profile());
        if let Some(msg) = check_level_product(ctx.family.valuation.as_ref(), &f, &g) {
            let vv = ctx.family.valuation.clone();
            push_shrunk(&mut failures, f, g, msg, move |a, b| {
                check_level_product(vv.as_ref(), a, b)
            });
        }
    }
    failures
}

fn delta_additivity(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = scenario_profile();
    for _ in 0..ctx.cases {
        let k = 1 + rng.below(ctx.pair_max as u64 - 1) as u32;
        let q = ctx.family.member(k);
        let v = &ctx.family.valuation;
        let f: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 1, 3, &profile);
        let g: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 1, 3, &profile);
        let check = |a: &Poly<PuiseuxSeries>, b: &Poly<PuiseuxSeries>| -> Option<String> {
            let run = || -> Result<Option<String>, EngineError> {
                if a.is_zero() || b.is_zero() {
                    return Ok(None);
                }
                let ea = v.expansion_data(a, &q)?;
                let eb = v.expansion_data(b, &q)?;
                let eab = v.expansion_data(&a.mul(b), &q)?;
                if eab.delta != ea.delta + eb.delta {
                    return Ok(Some(format!(
                        "delta_Q(fg) = {} but {} + {}",
                        eab.delta, ea.delta, eb.delta
                    )));
                }
                let sum = ea.nu_q.checked_add(&eb.nu_q)?;
                if eab.nu_q != sum {
                    return Ok(Some(format!(
                        "nu_Q(fg) = {} but nu_Q(f) + nu_Q(g) = {sum}",
                        eab.nu_q
                    )));
                }
                if ea.min_set.len() == 1
                    && eb.min_set.len() == 1
                    && eab.min_set != [ea.delta + eb.delta].into_iter().collect()
                {
                    return Ok(Some(format!(
                        "singleton attaining sets but S(fg) = {:?}",
                        eab.min_set
                    )));
                }
                Ok(None)
            };
            match run() {
                Ok(out) => out,
                Err(e) => Some(e.to_string()),
            }
        };
        if let Some(msg) = check(&f, &g) {
            push_shrunk(&mut failures, f, g, msg, check);
        }
    }
    failures
}

/// Sample a polynomial whose level stays below the level of `Q_k`:
/// products of earlier members scaled by constants, plus a constant.
fn sample_small_level(ctx: &Ctx, rng: &mut Rng, k: u32) -> Poly<PuiseuxSeries> {
    let profile = scenario_profile();
    let factors = rng.below(3);
    let mut f = Poly::constant(PuiseuxSeries::sample_nonzero(rng, ctx.p, &profile));
    for _ in 0..factors {
        let j = 1 + rng.below(k as u64) as u32;
        if j < k {
            f = f.mul(&ctx.family.member(j));
        }
    }
    f
}

fn check_small_level_remainder<C: Coefficient>(
    v: &ValuationHandle<C>,
    f: &Poly<C>,
    q: &Poly<C>,
) -> Result<Option<String>, EngineError> {
    let lf = v.level(f)?.epsilon;
    let lq = v.level(q)?.epsilon;
    if lf >= lq {
        return Ok(None); // sampled outside the hypothesis
    }
    let (quo, rem) = f.euclid_divide(q)?;
    let vf = v.nu(f)?;
    let vr = v.nu(&rem)?;
    let vqq = v.nu(&quo.mul(q))?;
    if vf != vr {
        return Ok(Some(format!("nu(f) = {vf} != nu(r) = {vr}")));
    }
    if !quo.is_zero() && vqq <= vf {
        return Ok(Some(format!("nu(qQ) = {vqq} not above nu(f) = {vf}")));
    }
    let exp = v.expansion_data(f, q)?;
    if exp.delta != 0 {
        return Ok(Some(format!("delta_Q(f) = {} != 0", exp.delta)));
    }
    Ok(None)
}

fn small_level_remainder(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    for _ in 0..ctx.cases {
        let k = 2 + rng.below(ctx.pair_max as u64 - 1) as u32;
        let q = ctx.family.member(k);
        let v = &ctx.family.valuation;
        let f = sample_small_level(ctx, rng, k);
        match check_small_level_remainder(v.as_ref(), &f, &q) {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(Failure {
                case: format!("f = {f}, member {k}"),
                message: msg,
            }),
            Err(e) => failures.push(Failure {
                case: format!("f = {f}, member {k}"),
                message: e.to_string(),
            }),
        }

        // monomial handle with a positive slope and base x; the sampler
        // is filtered on the level hypothesis inside the check
        let gamma = Rat::new(rng.range_i64(1, 4), 1);
        let vm: Arc<ValuationHandle<RatFunc>> = ValuationHandle::monomial(ctx.p, gamma);
        let g: Poly<RatFunc> = sample_poly(rng, ctx.p, 0, 3, &SampleProfile::default());
        if g.is_zero() {
            continue;
        }
        match check_small_level_remainder(vm.as_ref(), &g, &Poly::x(ctx.p)) {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(Failure {
                case: format!("g = {g}, base x"),
                message: msg,
            }),
            Err(e) => failures.push(Failure {
                case: format!("g = {g}, base x"),
                message: e.to_string(),
            }),
        }
    }
    failures
}

fn check_hasse_leibniz<C: Coefficient>(f: &Poly<C>, g: &Poly<C>) -> Option<String> {
    let prod = f.mul(g);
    let top = prod.deg().unwrap_or(0);
    for b in 1..=top {
        let mut sum = Poly::zero(f.p());
        for i in 0..=b {
            sum = sum.add(&f.hasse_derivative(i).mul(&g.hasse_derivative(b - i)));
        }
        if sum != prod.hasse_derivative(b) {
            return Some(format!("order {b} differs"));
        }
    }
    None
}

fn hasse_leibniz(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = SampleProfile::default();
    for _ in 0..ctx.cases {
        let f: Poly<RatFunc> = sample_poly(rng, ctx.p, 0, 5, &profile);
        let g: Poly<RatFunc> = sample_poly(rng, ctx.p, 0, 5, &profile);
        if let Some(msg) = check_hasse_leibniz(&f, &g) {
            push_shrunk(&mut failures, f, g, msg, check_hasse_leibniz);
        }
        let f: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 0, 4, &scenario_profile());
        let g: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 0, 4, &scenario_profile());
        if let Some(msg) = check_hasse_leibniz(&f, &g) {
            push_shrunk(&mut failures, f, g, msg, check_hasse_leibniz);
        }
    }
    failures
}

fn leibniz_reconstruction(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = SampleProfile::default();
    for _ in 0..ctx.cases {
        let qdeg = 1 + rng.below(3) as usize;
        let q: Poly<RatFunc> = crate::rng::sample_monic(rng, ctx.p, qdeg, &profile);
        let h: Poly<RatFunc> = sample_poly(rng, ctx.p, 0, qdeg - 1, &profile);
        let n = 1 + rng.below(3) as usize;
        let b = 1 + rng.below((n * qdeg + 1) as u64) as usize;
        let run = || -> Result<Option<String>, EngineError> {
            let tuples = leibniz_expand(&h, &q, n, b, ctx.cap)?;
            let direct = h.mul(&q.pow(n)).hasse_derivative(b);
            if reconstruct(ctx.p, &tuples) != direct {
                return Ok(Some("reconstruction differs".into()));
            }
            Ok(None)
        };
        match run() {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(Failure {
                case: format!("h = {h}, q = {q}, n = {n}, b = {b}"),
                message: msg,
            }),
            Err(e) => failures.push(Failure {
                case: format!("h = {h}, q = {q}, n = {n}, b = {b}"),
                message: e.to_string(),
            }),
        }
    }
    failures
}

fn tuple_bounds(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = scenario_profile();
    for _ in 0..ctx.cases {
        let k = 1 + rng.below(ctx.pair_max as u64) as u32;
        let q = ctx.family.member(k);
        let v = &ctx.family.valuation;
        let h = Poly::constant(PuiseuxSeries::sample_nonzero(rng, ctx.p, &profile));
        let n = 1 + rng.below(3) as usize;
        let b = 1 + rng.below((n + 1) as u64) as usize;
        let run = || -> Result<Option<String>, EngineError> {
            let q_level = v.level(&q)?;
            let tuples = leibniz_expand(&h, &q, n, b, ctx.cap)?;
            for tuple in &tuples {
                tuple_value_bound(v, tuple, &h, &q, n, &q_level)?;
            }
            Ok(None)
        };
        match run() {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(Failure {
                case: format!("h = {h}, member {k}, n = {n}, b = {b}"),
                message: msg,
            }),
            Err(e) => failures.push(Failure {
                case: format!("h = {h}, member {k}, n = {n}, b = {b}"),
                message: e.to_string(),
            }),
        }
    }
    failures
}

fn drop_bound(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = scenario_profile();
    for _ in 0..ctx.cases {
        let k = 1 + rng.below(ctx.pair_max as u64) as u32;
        let q = ctx.family.member(k);
        let v = &ctx.family.valuation;
        let h = Poly::constant(PuiseuxSeries::sample_nonzero(rng, ctx.p, &profile));
        let n = 1 + rng.below(4) as usize;
        let b = 1 + rng.below(n as u64) as usize; // b_max = 1 divides every b
        let run = || -> Result<Option<String>, EngineError> {
            let q_level = v.level(&q)?;
            let hqn = h.mul(&q.pow(n));
            let dbf = hqn.hasse_derivative(b);
            if dbf.is_zero() {
                return Ok(None); // hypothesis empty
            }
            let trunc = ValuationHandle::truncation(v.clone(), q.clone())?;
            let lhs = trunc.nu(&dbf)?;
            let hypothesis = v.nu(&hqn)?.checked_sub(&q_level.epsilon.mul_nat(b))?;
            if lhs != hypothesis {
                return Ok(None); // hypothesis fails, nothing to check
            }
            let exp = v.expansion_data(&dbf, &q)?;
            let cap = n - b; // b_max = 1
            if exp.delta > cap {
                return Ok(Some(format!(
                    "delta = {} above n - b/b_max = {cap}",
                    exp.delta
                )));
            }
            let binom = fp::lucas_binom(ctx.p, n as u64, b as u64);
            let equality = exp.delta == cap;
            if equality != (binom != 0) {
                return Ok(Some(format!(
                    "equality = {equality} but binom(n, b/b_max) = {binom} mod p"
                )));
            }
            Ok(None)
        };
        match run() {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(Failure {
                case: format!("h = {h}, member {k}, n = {n}, b = {b}"),
                message: msg,
            }),
            Err(e) => failures.push(Failure {
                case: format!("h = {h}, member {k}, n = {n}, b = {b}"),
                message: e.to_string(),
            }),
        }
    }
    failures
}

fn derivative_drop_section(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = scenario_profile();
    let v = &ctx.family.valuation;
    for case in 0..ctx.cases {
        let k = 2 + rng.below(ctx.pair_max as u64 - 1) as u32;
        let q = ctx.family.member(k);
        // rotate through structured samples and random ones
        let f = match case % 4 {
            0 => ctx.minimal.clone(),
            1 => ctx.companion.clone(),
            2 => {
                let i = 1 + rng.below(k as u64) as u32;
                let j = 1 + rng.below(k as u64) as u32;
                ctx.family.member(i).mul(&ctx.family.member(j))
            }
            _ => sample_poly(rng, ctx.p, 1, 3, &profile),
        };
        let run = || -> Result<Option<String>, EngineError> {
            if f.is_zero() {
                return Ok(None);
            }
            let exp = v.expansion_data(&f, &q)?;
            if exp.delta == 0 {
                return Ok(None);
            }
            derivative_drop(v, &f, &q)?;
            Ok(None)
        };
        match run() {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(Failure {
                case: format!("f = {f}, member {k}"),
                message: msg,
            }),
            Err(e) => failures.push(Failure {
                case: format!("f = {f}, member {k}"),
                message: e.to_string(),
            }),
        }
    }
    failures
}

fn same_degree(ctx: &Ctx) -> Vec<Failure> {
    let mut failures = vec![];
    for m in 1..=ctx.pair_max {
        for n in (m + 1)..=ctx.pair_max {
            let q1 = ctx.family.member(m);
            let q2 = ctx.family.member(n);
            if let Err(e) = compare_same_degree(&ctx.family.valuation, &q1, &q2) {
                failures.push(Failure {
                    case: format!("members ({m}, {n})"),
                    message: e.to_string(),
                });
            }
        }
    }
    failures
}

fn expansion_compare(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let profile = scenario_profile();
    // fixed random targets, each compared across every member pair
    let mut targets: Vec<Poly<PuiseuxSeries>> = vec![
        ctx.minimal.clone(),
        ctx.companion.clone(),
        ctx.family.member(1),
    ];
    let n_random = (ctx.cases / 2).min(32);
    for _ in 0..n_random {
        let f: Poly<PuiseuxSeries> = sample_poly(rng, ctx.p, 0, 3, &profile);
        if !f.is_zero() {
            targets.push(f);
        }
    }
    for m in 1..=ctx.pair_max {
        for n in (m + 1)..=ctx.pair_max {
            let q1 = ctx.family.member(m);
            let q2 = ctx.family.member(n);
            for f in &targets {
                if let Err(e) = compare_expansions(&ctx.family.valuation, f, &q1, &q2) {
                    failures.push(Failure {
                        case: format!("f = {f}, members ({m}, {n})"),
                        message: e.to_string(),
                    });
                }
            }
        }
    }
    failures
}

fn family_bounds(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let v = &ctx.family.valuation;
    if let Err(e) = bound_checks(&ctx.family, 1, ctx.family.depth) {
        failures.push(Failure {
            case: format!("members 1..={}", ctx.family.depth),
            message: e.to_string(),
        });
    }
    // interior digits of re-expanded power-index digit monomials stay
    // above delta * B, and stable power-index coefficients have the
    // boundary value (delta - i) * B
    let structural = || -> Result<Option<String>, EngineError> {
        let report = crate::limits::limit_structure(&ctx.family, &ctx.minimal, ctx.family.depth)?;
        let delta_b = &report.delta_b;
        for (i, value) in &report.coefficient_values {
            if report.lambda.contains(i) {
                let expected = ctx.family.sup_value.mul_nat(report.delta - i);
                if value != &expected {
                    return Ok(Some(format!(
                        "coefficient {i} has value {value}, expected {expected}"
                    )));
                }
            }
        }
        for m in 1..ctx.family.depth {
            let q1 = ctx.family.member(m);
            let q2 = ctx.family.member(m + 1);
            let digits = ctx.minimal.q_expand(&q1)?;
            for (j, digit) in digits.digits.iter().enumerate() {
                if j < 2 || digit.is_zero() {
                    continue;
                }
                let re = digit.mul(&q1.pow(j)).q_expand(&q2)?;
                for i in 1..j {
                    let inner = re.digit(i);
                    if inner.is_zero() {
                        continue;
                    }
                    let value = v.nu(&inner)?.checked_add(&v.nu(&q2)?.mul_nat(i))?;
                    if value <= *delta_b {
                        return Ok(Some(format!(
                            "re-expanded digit {j} of member {m}: interior index {i} \
                             has value {value}, not above {delta_b}"
                        )));
                    }
                }
            }
        }
        Ok(None)
    };
    match structural() {
        Ok(None) => {}
        Ok(Some(msg)) => failures.push(Failure {
            case: "limit expansion structure".into(),
            message: msg,
        }),
        Err(e) => failures.push(Failure {
            case: "limit expansion structure".into(),
            message: e.to_string(),
        }),
    }
    // the limit polynomial's level dominates every member level, and small
    // degrees are dominated by some member
    let run = || -> Result<Option<String>, EngineError> {
        let lf = v.level(&ctx.minimal)?.epsilon;
        for n in 1..=ctx.family.depth {
            let ln = v.level(&ctx.family.member(n))?.epsilon;
            if lf <= ln {
                return Ok(Some(format!("eps(F) = {lf} not above member {n}: {ln}")));
            }
        }
        let profile = scenario_profile();
        let mut rng = rng.clone();
        for _ in 0..8 {
            let g: Poly<PuiseuxSeries> =
                sample_poly(&mut rng, ctx.p, 0, ctx.family.alpha, &profile);
            if g.is_zero() {
                continue;
            }
            let lg = v.level(&g)?.epsilon;
            let dominated = (1..=ctx.family.depth)
                .map(|n| v.level(&ctx.family.member(n)))
                .collect::<Result<Vec<_>, _>>()?
                .iter()
                .any(|l| lg <= l.epsilon);
            if !dominated {
                return Ok(Some(format!(
                    "eps(g) = {lg} dominates the whole family, g = {g}"
                )));
            }
        }
        Ok(None)
    };
    match run() {
        Ok(None) => {}
        Ok(Some(msg)) => failures.push(Failure {
            case: "family level ordering".into(),
            message: msg,
        }),
        Err(e) => failures.push(Failure {
            case: "family level ordering".into(),
            message: e.to_string(),
        }),
    }
    failures
}

fn s_alpha(ctx: &Ctx, rng: &mut Rng) -> Vec<Failure> {
    let mut failures = vec![];
    let mut check = |name: String, f: &Poly<PuiseuxSeries>, expect_in: bool| match in_s_alpha(
        &ctx.family,
        f,
        ctx.n_max,
    ) {
        Ok(report) => {
            let ok = match report.status {
                SAlphaStatus::InCertified => expect_in,
                SAlphaStatus::Out { .. } => !expect_in,
                SAlphaStatus::InSampled | SAlphaStatus::Undetermined => false,
            };
            if !ok {
                failures.push(Failure {
                    case: name,
                    message: format!("status {:?}, expected in = {expect_in}", report.status),
                });
            }
        }
        Err(e) => failures.push(Failure {
            case: name,
            message: e.to_string(),
        }),
    };
    check("limit polynomial".into(), &ctx.minimal, true);
    check("companion".into(), &ctx.companion, true);
    check("x".into(), &Poly::x(ctx.p), false);
    for k in 1..=ctx.family.depth {
        check(format!("member {k}"), &ctx.family.member(k), false);
    }
    let profile = scenario_profile();
    for i in 0..16 {
        let c = PuiseuxSeries::sample(rng, ctx.p, &profile);
        let f = Poly::from_coeffs(ctx.p, vec![c, PuiseuxSeries::one(ctx.p)]);
        check(format!("random linear {i}: {f}"), &f, false);
    }
    failures
}
