use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use hamming_duality::construct::{greedy_maximal, random_covering_search, GreedyOrder};
use hamming_duality::ensembles::{
    beta_epsilon_grid, render_csv, render_json, sweep, EnsembleSpec, Family, Mode, Predicate,
};
use hamming_duality::io::{code_to_json, parse_code_auto, parse_generator_json};
use hamming_duality::linear::{count_linear, count_nonlinear, DEFAULT_ENUM_BUDGET};
use hamming_duality::metrics::{
    check_sphere_bounds, covering_radius, is_good_covering, is_good_packing, is_maximal,
    min_distance, r_density, Code,
};
use hamming_duality::rule::parse_rational;
use hamming_duality::verify::{
    check_supercode_lemma, supercode_lemma_sweep, verify_lemma3, verify_lemma4, verify_theorem1,
    verify_theorem5, verify_theorem6, VerificationReport, VerifyOptions,
};
use hamming_duality::{GoodnessRule, LinearCode};

use crate::config::*;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SEARCH_FAILED: u8 = 3;

type CodeSelector<'a> = Box<dyn Fn(&Code) -> hamming_duality::Result<bool> + Sync + 'a>;
type LinearSelector<'a> = Box<dyn Fn(&LinearCode) -> hamming_duality::Result<bool> + Sync + 'a>;

pub const BUDGET_ENV: &str = "HDL_ENUM_BUDGET";

pub fn enum_budget() -> Result<u64> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{BUDGET_ENV}={v:?} is not an integer")),
        Err(_) => Ok(DEFAULT_ENUM_BUDGET),
    }
}

/// Main output of a command plus its exit status.
pub struct Outcome {
    pub output: String,
    pub status: u8,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome {
            output,
            status: EXIT_OK,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_code(path: &Path) -> Result<Code> {
    let text = read(path)?;
    let parsed = parse_code_auto(&text).with_context(|| format!("loading {}", path.display()))?;
    Ok(parsed.code)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let budget = enum_budget()?;
    match &cfg.command {
        Command::Analyze(a) => analyze(a, cfg.format),
        Command::Verify(v) => verify(v, cfg.seed, budget),
        Command::Sweep(s) => run_sweep(s, cfg.seed, cfg.format, budget),
        Command::Construct(c) => construct(c, cfg.seed),
        Command::Count(c) => count(c, cfg.format),
    }
}

fn analyze(a: &AnalyzeArgs, format: Option<Format>) -> Result<Outcome> {
    let text = read(&a.file)?;
    let is_generator = a.generator
        || serde_json::from_str::<Value>(&text)
            .map(|v| v.get("rows").is_some())
            .unwrap_or(false);
    let code = if is_generator {
        parse_generator_json(&text)
            .with_context(|| format!("loading {}", a.file.display()))?
            .codewords()?
    } else {
        parse_code_auto(&text)
            .with_context(|| format!("loading {}", a.file.display()))?
            .code
    };

    let r = covering_radius(&code);
    let phi_r = r_density(&code, r)?;
    let mut fields: Vec<(&str, Value)> = vec![
        ("n", json!(code.len())),
        ("size", json!(code.size())),
        ("R", json!(r)),
        ("phi_R", json!(phi_r.pretty())),
    ];
    match min_distance(&code) {
        Ok(d) => {
            let bounds = check_sphere_bounds(&code)?;
            fields.insert(2, ("d", json!(d)));
            fields.insert(4, ("t", json!(bounds.packing_radius)));
            fields.push(("phi_t", json!(bounds.phi_t.pretty())));
            fields.push(("phi_d_minus_1", json!(r_density(&code, d - 1)?.pretty())));
            fields.push(("maximal", json!(is_maximal(&code)?)));
            fields.push(("sphere_packing_bound", json!(bounds.packing_ok)));
            fields.push(("sphere_covering_bound", json!(bounds.covering_ok)));
        }
        Err(_) => {
            fields.insert(2, ("d", Value::Null));
            fields.push(("maximal", Value::Null));
        }
    }
    let output = match format {
        Some(Format::Json) => {
            let map: serde_json::Map<String, Value> = fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
            serde_json::to_string_pretty(&Value::Object(map))? + "\n"
        }
        _ => fields
            .into_iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k} = {s}\n"),
                Value::Null => format!("{k} = undefined\n"),
                other => format!("{k} = {other}\n"),
            })
            .collect(),
    };
    Ok(Outcome::ok(output))
}

fn code_selector<'a>(sel: SelectorArg, f: &'a GoodnessRule) -> CodeSelector<'a> {
    match sel {
        SelectorArg::All => Box::new(|_| Ok(true)),
        SelectorArg::Packing => Box::new(move |c| is_good_packing(c, f)),
        SelectorArg::Covering => Box::new(move |c| is_good_covering(c, f)),
        SelectorArg::Maximal => Box::new(is_maximal),
    }
}

fn linear_selector<'a>(sel: SelectorArg, f: &'a GoodnessRule) -> LinearSelector<'a> {
    match sel {
        SelectorArg::All => Box::new(|_| Ok(true)),
        SelectorArg::Packing => Box::new(move |l| Predicate::GoodPacking(f.clone()).eval_linear(l)),
        SelectorArg::Covering => {
            Box::new(move |l| Predicate::GoodCovering(f.clone()).eval_linear(l))
        }
        SelectorArg::Maximal => Box::new(|l| Ok(l.covering_radius()? < l.min_distance()?)),
    }
}

fn verify(v: &VerifyArgs, seed: u64, budget: u64) -> Result<Outcome> {
    let f = parse_rule(&v.f).map_err(anyhow::Error::msg)?;
    let opts = VerifyOptions {
        mode: Mode::from(v.mode),
        samples: v.samples,
        seed,
        budget,
    };
    let (n, m, k) = (v.n.unwrap_or(0), v.m.unwrap_or(0), v.k.unwrap_or(0));
    let report: VerificationReport = match v.claim {
        Claim::Theorem1 => verify_theorem1(&load_code(v.code.as_deref().expect("validated"))?, &f)?,
        Claim::Lemma2 => match (&v.sub, &v.sup) {
            (Some(a), Some(b)) => check_supercode_lemma(&load_code(a)?, &load_code(b)?)?,
            _ => supercode_lemma_sweep(n, v.pairs.unwrap_or(0), seed)?,
        },
        Claim::Lemma3 => verify_lemma3(n, m, &*code_selector(v.selector, &f), budget)?,
        Claim::Lemma4 => verify_lemma4(n, k, &*linear_selector(v.selector, &f), budget)?,
        Claim::Theorem5 => verify_theorem5(n, m, &f, &opts)?,
        Claim::Theorem6 => verify_theorem6(n, k, &f, &opts)?,
    };
    let status = if report.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok(Outcome {
        output: report.to_json() + "\n",
        status,
    })
}

fn run_sweep(s: &SweepArgs, seed: u64, format: Option<Format>, budget: u64) -> Result<Outcome> {
    let f = parse_rule(&s.f).map_err(anyhow::Error::msg)?;
    let (grid, mode) = match (&s.lambda, &s.epsilon) {
        (Some(l), Some(e)) => (
            beta_epsilon_grid(&s.n, &parse_rational(l)?, &parse_rational(e)?)?,
            Mode::MonteCarlo,
        ),
        _ => {
            let predicate = match s.predicate {
                PredicateArg::Packing => Predicate::GoodPacking(f),
                PredicateArg::Covering => Predicate::GoodCovering(f),
            };
            let mut grid = Vec::new();
            for &n in &s.n {
                let families: Vec<Family> = match s.family {
                    FamilyArg::Nonlinear => {
                        s.m.iter().map(|&m| Family::Nonlinear { n, m }).collect()
                    }
                    FamilyArg::Linear => s.k.iter().map(|&k| Family::Linear { n, k }).collect(),
                };
                for family in families {
                    grid.push(EnsembleSpec::new(family, predicate.clone())?);
                }
            }
            (grid, Mode::from(s.mode))
        }
    };
    let rows = sweep(&grid, mode, s.samples, seed, budget)?;
    let output = match format {
        Some(Format::Json) => render_json(&rows),
        _ => render_csv(&rows),
    };
    Ok(Outcome::ok(output))
}

fn construct(c: &ConstructArgs, seed: u64) -> Result<Outcome> {
    match c.method {
        Method::Gv => {
            let order = match c.order {
                OrderArg::Lex => GreedyOrder::Lexicographic,
                OrderArg::Random => GreedyOrder::RandomPermutation(seed),
            };
            let g = greedy_maximal(c.n, c.d.expect("validated"), order)?;
            eprintln!(
                "gv: n={} |C|={} d={} R={} phi_(d-1)={} phi/n={:.6}",
                c.n,
                g.code.size(),
                g.min_distance,
                g.covering_radius,
                g.phi.pretty(),
                g.phi_over_n()
            );
            Ok(Outcome::ok(
                code_to_json(&g.code, Some(serde_json::to_value(&g.provenance)?)) + "\n",
            ))
        }
        Method::Cover => {
            let out =
                random_covering_search(c.n, c.r.expect("validated"), c.budget, seed, c.linear)?;
            let provenance = serde_json::to_value(&out.provenance)?;
            match &out.code {
                Some(code) => {
                    eprintln!(
                        "cover: n={} |C|={} R={} phi_R={} bound_met={}",
                        c.n,
                        code.size(),
                        out.covering_radius.unwrap_or_default(),
                        out.phi.map(|p| p.pretty()).unwrap_or_default(),
                        out.bound_met.unwrap_or(false)
                    );
                    Ok(Outcome::ok(code_to_json(code, Some(provenance)) + "\n"))
                }
                None => {
                    let report = json!({
                        "status": "not-found",
                        "n": c.n,
                        "R": c.r,
                        "trials": c.budget,
                        "provenance": provenance,
                    });
                    eprintln!(
                        "cover: no code with R <= {} in {} trials",
                        c.r.unwrap_or(0),
                        c.budget
                    );
                    Ok(Outcome {
                        output: serde_json::to_string_pretty(&report)? + "\n",
                        status: EXIT_SEARCH_FAILED,
                    })
                }
            }
        }
    }
}

fn count(c: &CountArgs, format: Option<Format>) -> Result<Outcome> {
    let (label, size, value) = match c.family {
        FamilyArg::Nonlinear => {
            let m = c.m.expect("validated");
            ("nonlinear", m, count_nonlinear(c.n, m)?)
        }
        FamilyArg::Linear => {
            let k = c.k.expect("validated");
            if k > c.n {
                bail!("k={k} exceeds n={}", c.n);
            }
            ("linear", u64::from(k), count_linear(c.n, k)?)
        }
    };
    let output = match format {
        Some(Format::Json) => {
            serde_json::to_string_pretty(&json!({
                "family": label, "n": c.n, "M_or_k": size, "count": value.to_string()
            }))? + "\n"
        }
        _ => format!("{value}\n"),
    };
    Ok(Outcome::ok(output))
}
