//! Command implementations behind the `keypoly` binary: expression
//! evaluation, expansion tables, scenario reports, named checks, and the
//! seeded property suite. Text output is for people; `--json` emits the
//! exact-value report schema with deterministic bytes.

use std::fmt::Write as _;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value as Json;

use keypoly::compare::{compare_expansions, compare_same_degree};
use keypoly::config;
use keypoly::deriv::{derivative_drop, leibniz_expand, tuple_value_bound};
use keypoly::limits::{
    artin_schreier_companion, artin_schreier_family_with_depth, bound_checks, in_s_alpha,
    limit_structure, remove_high_monomials, KeyFamily,
};
use keypoly::report::scenario_report;
use keypoly::suite::{run_suite, SuiteConfig};
use keypoly::{
    parse_poly, Coefficient, EngineError, ExtValue, Poly, PuiseuxSeries, Rat, RatFunc,
    ValuationHandle,
};

#[derive(Parser, Debug)]
#[command(
    name = "keypoly",
    version,
    about = "Exact key-polynomial computations over rank-one valued fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    /// Level-bounded Puiseux series over F_p.
    Puiseux,
    /// Exact rational functions F_p(t).
    Rational,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate expressions: value, level, and maximizing orders
    Eval {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, value_enum, default_value_t = FieldArg::Puiseux)]
        field: FieldArg,
        /// Valuation spec: `monomial:<rat>`, `artin-schreier`, or JSON
        #[arg(long)]
        valuation: String,
        #[arg(long = "expr", required = true)]
        exprs: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Expansion data of expressions in a monic base
    Expand {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, value_enum, default_value_t = FieldArg::Puiseux)]
        field: FieldArg,
        #[arg(long)]
        valuation: String,
        /// The monic base polynomial
        #[arg(long)]
        q: String,
        #[arg(long = "expr", required = true)]
        exprs: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run a named scenario end to end and print the report
    Scenario {
        /// Scenario name (currently: artin-schreier)
        name: String,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = config::DEFAULT_FAMILY_DEPTH)]
        depth: u32,
        #[arg(long)]
        json: bool,
    },
    /// Run one named check against scenario inputs
    Check {
        #[command(subcommand)]
        check: CheckCommand,
    },
    /// Run the seeded randomized property suite
    Suite {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = config::DEFAULT_CASES)]
        cases: u32,
        /// Restrict to named sections (repeatable)
        #[arg(long = "section")]
        sections: Vec<String>,
        #[arg(long, default_value_t = config::DEFAULT_N_MAX)]
        n_max: u32,
        #[arg(long, default_value_t = config::DEFAULT_TUPLE_CAP)]
        cap: u64,
        #[arg(long, default_value_t = 4)]
        pair_max: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = config::DEFAULT_FAMILY_DEPTH)]
    pub depth: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Same-degree comparison of family members m and n
    SameDegree {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
    },
    /// Expansion comparison of an expression against members m and n
    Expansions {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        /// Defaults to the scenario's limit polynomial
        #[arg(long)]
        expr: Option<String>,
    },
    /// Derivative drop of an expression at member n
    DerivativeDrop {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        expr: Option<String>,
    },
    /// Per-tuple value bounds of d_order(h * Q_n^power)
    TupleBounds {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        power: usize,
        #[arg(long)]
        order: usize,
        /// Constant factor h; defaults to 1
        #[arg(long)]
        h: Option<String>,
    },
    /// Membership of an expression in the limit set
    SAlpha {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = config::DEFAULT_N_MAX)]
        n_max: u32,
    },
    /// Family-wide derivative and tuple bounds
    FamilyBounds {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Structure analysis of a limit candidate at member n
    LimitStructure {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        expr: Option<String>,
    },
    /// Remove expansion parts above the certified truncation bound
    RemoveHigh {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = config::DEFAULT_N_MAX)]
        n_max: u32,
    },
    /// Try to refute a key-polynomial candidate with the default
    /// witness set (smaller monomials, family members, random samples)
    RefuteKey {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// The monic candidate
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = config::DEFAULT_RANDOM_WITNESSES)]
        witnesses: u32,
    },
}

#[derive(Serialize)]
struct RefuteRow {
    q: String,
    level: ExtValue,
    refuted: bool,
    witness: Option<String>,
    witness_level: Option<ExtValue>,
    witness_pool: usize,
}

/// Result of one command: the rendered output and whether any checked
/// property failed (distinct from hard errors).
pub struct Outcome {
    pub text: String,
    pub failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            failed: false,
        }
    }
}

pub fn exit_code_for(err: &EngineError) -> i32 {
    err.exit_class().code()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

// ---- valuation specs --------------------------------------------------

fn parse_rat(s: &str) -> Result<Rat, EngineError> {
    s.parse()
        .map_err(|e: String| EngineError::InvalidInput(format!("bad rational {s:?}: {e}")))
}

fn monomial_from_json<C: Coefficient>(
    p: u64,
    spec: &Json,
) -> Result<Arc<ValuationHandle<C>>, EngineError> {
    let gamma = spec.get("gamma").and_then(Json::as_str).ok_or_else(|| {
        EngineError::InvalidInput("monomial spec needs a \"gamma\" string".into())
    })?;
    Ok(ValuationHandle::monomial(p, parse_rat(gamma)?))
}

/// Parse a valuation spec over the Puiseux field. Accepts the shorthand
/// `monomial:<rat>` and `artin-schreier`, or a JSON object
/// (`{"kind": "monomial" | "evaluation" | "truncation", ...}`,
/// optionally wrapped as `{"valuation": ...}`).
pub fn parse_valuation_puiseux(
    p: u64,
    spec: &str,
) -> Result<Arc<ValuationHandle<PuiseuxSeries>>, EngineError> {
    let spec = spec.trim();
    if let Some(gamma) = spec.strip_prefix("monomial:") {
        return Ok(ValuationHandle::monomial(p, parse_rat(gamma)?));
    }
    if spec == "artin-schreier" {
        let (family, _) = artin_schreier_family_with_depth(p, 2, config::precision_depth())?;
        return Ok(family.valuation);
    }
    if spec.starts_with('{') {
        let json: Json = serde_json::from_str(spec)
            .map_err(|e| EngineError::InvalidInput(format!("bad valuation JSON: {e}")))?;
        return puiseux_from_json(p, json.get("valuation").unwrap_or(&json));
    }
    Err(EngineError::InvalidInput(format!(
        "unrecognized valuation spec {spec:?}"
    )))
}

fn puiseux_from_json(
    p: u64,
    spec: &Json,
) -> Result<Arc<ValuationHandle<PuiseuxSeries>>, EngineError> {
    match spec.get("kind").and_then(Json::as_str) {
        Some("monomial") => monomial_from_json(p, spec),
        Some("evaluation") => {
            let scenario = spec
                .get("scenario")
                .and_then(Json::as_str)
                .unwrap_or("artin-schreier");
            if scenario != "artin-schreier" {
                return Err(EngineError::InvalidInput(format!(
                    "unknown scenario {scenario:?}"
                )));
            }
            let p = spec.get("p").and_then(Json::as_u64).unwrap_or(p);
            let depth = spec
                .get("depth")
                .and_then(Json::as_u64)
                .map(|d| d as u32)
                .unwrap_or_else(config::precision_depth);
            let (family, _) = artin_schreier_family_with_depth(p, 2, depth)?;
            Ok(family.valuation)
        }
        Some("truncation") => {
            let inner = spec
                .get("inner")
                .ok_or_else(|| EngineError::InvalidInput("truncation needs \"inner\"".into()))?;
            let key = spec
                .get("Q")
                .and_then(Json::as_str)
                .ok_or_else(|| EngineError::InvalidInput("truncation needs \"Q\"".into()))?;
            let inner = puiseux_from_json(p, inner)?;
            ValuationHandle::truncation(inner, parse_poly(p, key)?)
        }
        other => Err(EngineError::InvalidInput(format!(
            "unknown valuation kind {other:?}"
        ))),
    }
}

/// Parse a valuation spec over the rational-function field: monomial and
/// truncation kinds only.
pub fn parse_valuation_ratfunc(
    p: u64,
    spec: &str,
) -> Result<Arc<ValuationHandle<RatFunc>>, EngineError> {
    let spec = spec.trim();
    if let Some(gamma) = spec.strip_prefix("monomial:") {
        return Ok(ValuationHandle::monomial(p, parse_rat(gamma)?));
    }
    if spec.starts_with('{') {
        let json: Json = serde_json::from_str(spec)
            .map_err(|e| EngineError::InvalidInput(format!("bad valuation JSON: {e}")))?;
        return ratfunc_from_json(p, json.get("valuation").unwrap_or(&json));
    }
    Err(EngineError::InvalidInput(format!(
        "unrecognized valuation spec {spec:?} for the rational-function field"
    )))
}

fn ratfunc_from_json(p: u64, spec: &Json) -> Result<Arc<ValuationHandle<RatFunc>>, EngineError> {
    match spec.get("kind").and_then(Json::as_str) {
        Some("monomial") => monomial_from_json(p, spec),
        Some("truncation") => {
            let inner = spec
                .get("inner")
                .ok_or_else(|| EngineError::InvalidInput("truncation needs \"inner\"".into()))?;
            let key = spec
                .get("Q")
                .and_then(Json::as_str)
                .ok_or_else(|| EngineError::InvalidInput("truncation needs \"Q\"".into()))?;
            let inner = ratfunc_from_json(p, inner)?;
            ValuationHandle::truncation(inner, parse_poly(p, key)?)
        }
        Some("evaluation") => Err(EngineError::InvalidInput(
            "evaluation valuations need the Puiseux field".into(),
        )),
        other => Err(EngineError::InvalidInput(format!(
            "unknown valuation kind {other:?}"
        ))),
    }
}

// ---- report rows -------------------------------------------------------

#[derive(Serialize)]
struct EvalRow {
    expr: String,
    nu: ExtValue,
    epsilon: ExtValue,
    #[serde(rename = "I")]
    argmax: Vec<usize>,
    b_max: Option<usize>,
}

#[derive(Serialize)]
struct ExpandRow {
    expr: String,
    q: String,
    digits: Vec<String>,
    values: Vec<ExtValue>,
    nu_q: ExtValue,
    #[serde(rename = "S")]
    min_set: Vec<usize>,
    delta: usize,
    deg_q: usize,
}

fn eval_rows<C: Coefficient>(
    v: &ValuationHandle<C>,
    p: u64,
    exprs: &[String],
) -> Result<Vec<EvalRow>, EngineError> {
    let mut rows = vec![];
    for text in exprs {
        let f: Poly<C> = parse_poly(p, text)?;
        let nu = v.nu(&f)?;
        let (epsilon, argmax, b_max) = if f.is_zero() {
            (ExtValue::PosInf, vec![], None)
        } else {
            let level = v.level(&f)?;
            (
                level.epsilon,
                level.argmax.iter().copied().collect(),
                level.b_max,
            )
        };
        rows.push(EvalRow {
            expr: f.to_string(),
            nu,
            epsilon,
            argmax,
            b_max,
        });
    }
    Ok(rows)
}

fn render_eval(rows: &[EvalRow], json: bool) -> String {
    if json {
        return to_json(&rows);
    }
    let mut out = String::new();
    for row in rows {
        let _ = writeln!(out, "expr: {}", row.expr);
        let _ = writeln!(
            out,
            "  nu = {}    eps = {}    I = {:?}    b_max = {:?}",
            row.nu, row.epsilon, row.argmax, row.b_max
        );
    }
    out
}

fn expand_rows<C: Coefficient>(
    v: &ValuationHandle<C>,
    p: u64,
    q_text: &str,
    exprs: &[String],
) -> Result<Vec<ExpandRow>, EngineError> {
    let q: Poly<C> = parse_poly(p, q_text)?;
    let mut rows = vec![];
    for text in exprs {
        let f: Poly<C> = parse_poly(p, text)?;
        let exp = v.expansion_data(&f, &q)?;
        let digits = f
            .q_expand(&q)?
            .digits
            .iter()
            .map(|d| d.to_string())
            .collect();
        rows.push(ExpandRow {
            expr: f.to_string(),
            q: q.to_string(),
            digits,
            values: exp.values,
            nu_q: exp.nu_q,
            min_set: exp.min_set.iter().copied().collect(),
            delta: exp.delta,
            deg_q: exp.deg_q,
        });
    }
    Ok(rows)
}

fn render_expand(rows: &[ExpandRow], json: bool) -> String {
    if json {
        return to_json(&rows);
    }
    let mut out = String::new();
    for row in rows {
        let _ = writeln!(out, "expr: {}  (base {})", row.expr, row.q);
        for (i, (digit, value)) in row.digits.iter().zip(&row.values).enumerate() {
            let _ = writeln!(out, "  digit {i}: {digit}   value {value}");
        }
        let _ = writeln!(
            out,
            "  nu_Q = {}    S = {:?}    delta = {}    deg_Q = {}",
            row.nu_q, row.min_set, row.delta, row.deg_q
        );
    }
    out
}

fn scenario_family(
    p: u64,
    depth: u32,
) -> Result<(KeyFamily<PuiseuxSeries>, Poly<PuiseuxSeries>), EngineError> {
    let approx = config::precision_depth().max(depth + 4);
    artin_schreier_family_with_depth(p, depth, approx)
}

fn parse_or_minimal(
    p: u64,
    expr: &Option<String>,
    minimal: &Poly<PuiseuxSeries>,
) -> Result<Poly<PuiseuxSeries>, EngineError> {
    match expr {
        Some(text) => Ok(parse_poly(p, text)?),
        None => Ok(minimal.clone()),
    }
}

/// Execute a parsed command, producing the rendered output.
pub fn execute(cli: Cli) -> Result<Outcome, EngineError> {
    match cli.command {
        Command::Eval {
            p,
            field,
            valuation,
            exprs,
            json,
        } => {
            let rows = match field {
                FieldArg::Puiseux => {
                    let v = parse_valuation_puiseux(p, &valuation)?;
                    eval_rows(v.as_ref(), p, &exprs)?
                }
                FieldArg::Rational => {
                    let v = parse_valuation_ratfunc(p, &valuation)?;
                    eval_rows(v.as_ref(), p, &exprs)?
                }
            };
            Ok(Outcome::ok(render_eval(&rows, json)))
        }
        Command::Expand {
            p,
            field,
            valuation,
            q,
            exprs,
            json,
        } => {
            let rows = match field {
                FieldArg::Puiseux => {
                    let v = parse_valuation_puiseux(p, &valuation)?;
                    expand_rows(v.as_ref(), p, &q, &exprs)?
                }
                FieldArg::Rational => {
                    let v = parse_valuation_ratfunc(p, &valuation)?;
                    expand_rows(v.as_ref(), p, &q, &exprs)?
                }
            };
            Ok(Outcome::ok(render_expand(&rows, json)))
        }
        Command::Scenario {
            name,
            p,
            depth,
            json,
        } => {
            if name != "artin-schreier" {
                return Err(EngineError::InvalidInput(format!(
                    "unknown scenario {name:?}"
                )));
            }
            let report = scenario_report(p, depth, config::precision_depth())?;
            let failed = !(report.theorem1.pass && report.theorem2.pass);
            let text = if json {
                to_json(&report)
            } else {
                let mut out = String::new();
                let _ = writeln!(out, "scenario artin-schreier, p = {p}, depth = {depth}");
                for m in &report.per_n {
                    let _ = writeln!(
                        out,
                        "  n = {}: nu(Q) = {}  eps(Q) = {}  I = {:?}  nu_Q(F) = {}  S = {:?}  delta = {}",
                        m.n, m.nu_q, m.eps_q, m.argmax, m.nu_trunc, m.min_set, m.delta
                    );
                }
                let _ = writeln!(
                    out,
                    "  degree structure: r = {}, pass = {}",
                    report.theorem1.r, report.theorem1.pass
                );
                let _ = writeln!(
                    out,
                    "  power support {:?}, pass = {}",
                    report.theorem2.p_power_indices, report.theorem2.pass
                );
                out
            };
            Ok(Outcome { text, failed })
        }
        Command::Check { check } => run_check(check),
        Command::Suite {
            p,
            seed,
            cases,
            sections,
            n_max,
            cap,
            pair_max,
            json,
        } => {
            let cfg = SuiteConfig {
                p,
                seed,
                cases,
                n_max,
                cap,
                pair_max,
                precision_depth: config::precision_depth(),
                sections,
            };
            let report = run_suite(&cfg)?;
            let failed = !report.pass;
            let text = if json {
                to_json(&report)
            } else {
                let mut out = String::new();
                let _ = writeln!(out, "suite: p = {p}, seed = {seed}, cases = {cases}");
                for s in &report.sections {
                    let _ = writeln!(
                        out,
                        "  {:<24} {}",
                        s.name,
                        if s.pass() {
                            "ok".to_string()
                        } else {
                            format!("{} FAILURES", s.failures.len())
                        }
                    );
                    for f in &s.failures {
                        let _ = writeln!(out, "    {}: {}", f.case, f.message);
                    }
                }
                let _ = writeln!(out, "pass: {}", report.pass);
                out
            };
            Ok(Outcome { text, failed })
        }
    }
}

fn run_check(check: CheckCommand) -> Result<Outcome, EngineError> {
    match check {
        CheckCommand::SameDegree { scenario, m, n } => {
            let (family, _) = scenario_family(scenario.p, scenario.depth.max(n).max(m))?;
            let report =
                compare_same_degree(&family.valuation, &family.member(m), &family.member(n))?;
            Ok(Outcome::ok(if scenario.json {
                to_json(&report)
            } else {
                format!("{report:#?}\n")
            }))
        }
        CheckCommand::Expansions {
            scenario,
            m,
            n,
            expr,
        } => {
            let (family, minimal) = scenario_family(scenario.p, scenario.depth.max(n).max(m))?;
            let f = parse_or_minimal(scenario.p, &expr, &minimal)?;
            let report =
                compare_expansions(&family.valuation, &f, &family.member(m), &family.member(n))?;
            Ok(Outcome::ok(if scenario.json {
                to_json(&report)
            } else {
                format!("{report:#?}\n")
            }))
        }
        CheckCommand::DerivativeDrop { scenario, n, expr } => {
            let (family, minimal) = scenario_family(scenario.p, scenario.depth.max(n))?;
            let f = parse_or_minimal(scenario.p, &expr, &minimal)?;
            let report = derivative_drop(&family.valuation, &f, &family.member(n))?;
            Ok(Outcome::ok(if scenario.json {
                to_json(&report)
            } else {
                format!("{report:#?}\n")
            }))
        }
        CheckCommand::TupleBounds {
            scenario,
            n,
            power,
            order,
            h,
        } => {
            let (family, _) = scenario_family(scenario.p, scenario.depth.max(n))?;
            let q = family.member(n);
            let h: Poly<PuiseuxSeries> = match h {
                Some(text) => parse_poly(scenario.p, &text)?,
                None => Poly::one(scenario.p),
            };
            let v = &family.valuation;
            let q_level = v.level(&q)?;
            let tuples = leibniz_expand(&h, &q, power, order, config::DEFAULT_TUPLE_CAP)?;
            let mut bounds = vec![];
            for tuple in &tuples {
                bounds.push(tuple_value_bound(v, tuple, &h, &q, power, &q_level)?);
            }
            Ok(Outcome::ok(if scenario.json {
                to_json(&bounds)
            } else {
                format!("{bounds:#?}\n")
            }))
        }
        CheckCommand::SAlpha {
            scenario,
            expr,
            n_max,
        } => {
            let (family, _) = scenario_family(scenario.p, scenario.depth)?;
            let f: Poly<PuiseuxSeries> = parse_poly(scenario.p, &expr)?;
            let report = in_s_alpha(&family, &f, n_max)?;
            Ok(Outcome::ok(if scenario.json {
                to_json(&report)
            } else {
                format!("{report:#?}\n")
            }))
        }
        CheckCommand::FamilyBounds { scenario } => {
            let (family, _) = scenario_family(scenario.p, scenario.depth)?;
            let report = bound_checks(&family, 1, scenario.depth)?;
            Ok(Outcome::ok(if scenario.json {
                to_json(&report)
            } else {
                format!("{report:#?}\n")
            }))
        }
        CheckCommand::LimitStructure { scenario, n, expr } => {
            let (family, minimal) = scenario_family(scenario.p, scenario.depth.max(n))?;
            let f = parse_or_minimal(scenario.p, &expr, &minimal)?;
            let report = limit_structure(&family, &f, n)?;
            Ok(Outcome::ok(if scenario.json {
                to_json(&report)
            } else {
                format!("{report:#?}\n")
            }))
        }
        CheckCommand::RemoveHigh {
            scenario,
            n,
            expr,
            n_max,
        } => {
            let (family, _) = scenario_family(scenario.p, scenario.depth.max(n))?;
            let f: Poly<PuiseuxSeries> = parse_poly(scenario.p, &expr)?;
            let (_, report) = remove_high_monomials(&family, &f, n, n_max)?;
            Ok(Outcome::ok(if scenario.json {
                to_json(&report)
            } else {
                format!("{report:#?}\n")
            }))
        }
        CheckCommand::RefuteKey {
            scenario,
            q,
            seed,
            witnesses,
        } => {
            let (family, _) = scenario_family(scenario.p, scenario.depth)?;
            let q: Poly<PuiseuxSeries> = parse_poly(scenario.p, &q)?;
            let mut rng = keypoly::rng::Rng::new(seed);
            let set = keypoly::limits::default_witnesses(&family, &q, &mut rng, witnesses);
            let row = match family.valuation.refute_key(&q, &set)? {
                keypoly::KeyRefutation::Refuted {
                    witness,
                    witness_level,
                    level,
                } => RefuteRow {
                    q: q.to_string(),
                    level,
                    refuted: true,
                    witness: Some(witness.to_string()),
                    witness_level: Some(witness_level),
                    witness_pool: set.len(),
                },
                keypoly::KeyRefutation::NotRefuted {
                    level,
                    witnesses_checked,
                } => RefuteRow {
                    q: q.to_string(),
                    level,
                    refuted: false,
                    witness: None,
                    witness_level: None,
                    witness_pool: witnesses_checked,
                },
            };
            let failed = row.refuted;
            let text = if scenario.json {
                to_json(&row)
            } else {
                format!(
                    "candidate {}: level {}, {}\n",
                    row.q,
                    row.level,
                    if row.refuted {
                        format!(
                            "REFUTED by {} (level {})",
                            row.witness.clone().unwrap(),
                            row.witness_level.clone().unwrap()
                        )
                    } else {
                        format!("not refuted by {} witnesses", row.witness_pool)
                    }
                )
            };
            Ok(Outcome { text, failed })
        }
    }
}

/// Companion polynomial helper exposed for tests.
pub fn companion(p: u64) -> Poly<PuiseuxSeries> {
    artin_schreier_companion(p)
}
