//! Command-line grammar and its canonical rendering.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hamming_duality::ensembles::Mode;
use hamming_duality::rule::parse_rational;
use hamming_duality::GoodnessRule;

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(
    name = "hdl",
    version,
    about = "Packing and covering densities of binary codes"
)]
pub struct RunConfig {
    /// Base seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output never depends on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the canonical form of the parsed command line and exit.
    #[arg(long, global = true)]
    pub dry_run: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    #[value(alias = "monte-carlo")]
    Mc,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Mc => Mode::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Claim {
    Theorem1,
    Lemma2,
    Lemma3,
    Lemma4,
    Theorem5,
    Theorem6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectorArg {
    All,
    Packing,
    Covering,
    Maximal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Nonlinear,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredicateArg {
    Packing,
    Covering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Gv,
    Cover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Lex,
    Random,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Distance, radii, densities and maximality of a code file.
    Analyze(AnalyzeArgs),
    /// Run one of the duality checks and emit a JSON report.
    Verify(VerifyArgs),
    /// Fractions of good codes over a parameter grid.
    Sweep(SweepArgs),
    /// Build a greedy packing or a random covering code.
    Construct(ConstructArgs),
    /// Ensemble cardinalities |C(n,M)| and |L(n,k)|.
    Count(CountArgs),
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Treat the file as a generator matrix.
    #[arg(long)]
    pub generator: bool,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub claim: Claim,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, default_value = "const:1")]
    pub f: String,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value = "all")]
    pub selector: SelectorArg,
    /// Code file for theorem1.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Subcode file for lemma2.
    #[arg(long)]
    pub sub: Option<PathBuf>,
    /// Supercode file for lemma2.
    #[arg(long)]
    pub sup: Option<PathBuf>,
    /// Number of random nested pairs for lemma2.
    #[arg(long)]
    pub pairs: Option<u64>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "nonlinear")]
    pub family: FamilyArg,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<u32>,
    #[arg(long, value_enum, default_value = "packing")]
    pub predicate: PredicateArg,
    #[arg(long, default_value = "const:1")]
    pub f: String,
    #[arg(long, value_enum, default_value = "mc")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Rate λ; with --epsilon, sweeps L(n, ⌈λn⌉) at threshold n^(1+ε).
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub method: Method,
    #[arg(long)]
    pub n: u32,
    /// Target distance (gv).
    #[arg(long)]
    pub d: Option<u32>,
    /// Target covering radius (cover).
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, value_enum, default_value = "lex")]
    pub order: OrderArg,
    /// Trials for the cover search.
    #[arg(long, default_value_t = 100)]
    pub budget: u64,
    /// Search among linear codes (cover).
    #[arg(long)]
    pub linear: bool,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct CountArgs {
    #[arg(long, value_enum, default_value = "nonlinear")]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub k: Option<u32>,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

fn push_opt<T: ToString>(args: &mut Vec<String>, flag: &str, v: &Option<T>) {
    if let Some(v) = v {
        args.push(flag.into());
        args.push(v.to_string());
    }
}

fn push_list<T: ToString>(args: &mut Vec<String>, flag: &str, v: &[T]) {
    if !v.is_empty() {
        args.push(flag.into());
        args.push(v.iter().map(T::to_string).collect::<Vec<_>>().join(","));
    }
}

fn path(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

impl RunConfig {
    /// Argument vector with every option spelled out, in a fixed order.
    pub fn canonical_args(&self) -> Vec<String> {
        let mut a: Vec<String> = vec!["hdl".into(), "--seed".into(), self.seed.to_string()];
        push_opt(&mut a, "--threads", &self.threads);
        push_opt(&mut a, "--format", &self.format.as_ref().map(value_name));
        push_opt(&mut a, "--out", &path(&self.out));
        if self.dry_run {
            a.push("--dry-run".into());
        }
        match &self.command {
            Command::Analyze(x) => {
                a.push("analyze".into());
                if x.generator {
                    a.push("--generator".into());
                }
                a.push(x.file.display().to_string());
            }
            Command::Verify(x) => {
                a.extend(["verify".into(), value_name(&x.claim)]);
                push_opt(&mut a, "--n", &x.n);
                push_opt(&mut a, "--m", &x.m);
                push_opt(&mut a, "--k", &x.k);
                a.extend([
                    "--f".into(),
                    x.f.clone(),
                    "--mode".into(),
                    value_name(&x.mode),
                ]);
                a.extend([
                    "--samples".into(),
                    x.samples.to_string(),
                    "--selector".into(),
                    value_name(&x.selector),
                ]);
                push_opt(&mut a, "--code", &path(&x.code));
                push_opt(&mut a, "--sub", &path(&x.sub));
                push_opt(&mut a, "--sup", &path(&x.sup));
                push_opt(&mut a, "--pairs", &x.pairs);
            }
            Command::Sweep(x) => {
                a.extend(["sweep".into(), "--family".into(), value_name(&x.family)]);
                push_list(&mut a, "--n", &x.n);
                push_list(&mut a, "--m", &x.m);
                push_list(&mut a, "--k", &x.k);
                a.extend([
                    "--predicate".into(),
                    value_name(&x.predicate),
                    "--f".into(),
                    x.f.clone(),
                ]);
                a.extend([
                    "--mode".into(),
                    value_name(&x.mode),
                    "--samples".into(),
                    x.samples.to_string(),
                ]);
                push_opt(&mut a, "--lambda", &x.lambda);
                push_opt(&mut a, "--epsilon", &x.epsilon);
            }
            Command::Construct(x) => {
                a.extend([
                    "construct".into(),
                    value_name(&x.method),
                    "--n".into(),
                    x.n.to_string(),
                ]);
                push_opt(&mut a, "--d", &x.d);
                push_opt(&mut a, "--r", &x.r);
                a.extend([
                    "--order".into(),
                    value_name(&x.order),
                    "--budget".into(),
                    x.budget.to_string(),
                ]);
                if x.linear {
                    a.push("--linear".into());
                }
            }
            Command::Count(x) => {
                a.extend([
                    "count".into(),
                    "--family".into(),
                    value_name(&x.family),
                    "--n".into(),
                    x.n.to_string(),
                ]);
                push_opt(&mut a, "--m", &x.m);
                push_opt(&mut a, "--k", &x.k);
            }
        }
        a
    }

    pub fn canonical_string(&self) -> String {
        self.canonical_args().join(" ")
    }

    /// Rejects inconsistent option sets before any computation starts.
    pub fn validate(&self) -> Result<(), String> {
        if self.threads == Some(0) {
            return Err("--threads must be at least 1".into());
        }
        match &self.command {
            Command::Analyze(_) => Ok(()),
            Command::Verify(v) => {
                parse_rule(&v.f)?;
                let need = |ok: bool, what: &str| {
                    if ok {
                        Ok(())
                    } else {
                        Err(format!("verify {}: {what}", value_name(&v.claim)))
                    }
                };
                match v.claim {
                    Claim::Theorem1 => need(v.code.is_some(), "requires --code"),
                    Claim::Lemma2 => need(
                        (v.sub.is_some() && v.sup.is_some())
                            || (v.n.is_some() && v.pairs.is_some()),
                        "requires --sub and --sup, or --n and --pairs",
                    ),
                    Claim::Lemma3 | Claim::Theorem5 => {
                        need(v.n.is_some() && v.m.is_some(), "requires --n and --m")
                    }
                    Claim::Lemma4 | Claim::Theorem6 => {
                        need(v.n.is_some() && v.k.is_some(), "requires --n and --k")
                    }
                }?;
                if v.mode == ModeArg::Mc && v.samples == 0 {
                    return Err("--samples must be positive".into());
                }
                Ok(())
            }
            Command::Sweep(s) => {
                parse_rule(&s.f)?;
                if s.n.is_empty() {
                    return Err("sweep: empty grid (give --n)".into());
                }
                match (&s.lambda, &s.epsilon) {
                    (Some(l), Some(e)) => {
                        parse_rational(l).map_err(|e| e.to_string())?;
                        parse_rational(e).map_err(|e| e.to_string())?;
                    }
                    (None, None) => {
                        let sizes_empty = match s.family {
                            FamilyArg::Nonlinear => s.m.is_empty() || !s.k.is_empty(),
                            FamilyArg::Linear => s.k.is_empty() || !s.m.is_empty(),
                        };
                        if sizes_empty {
                            return Err(
                                "sweep: nonlinear grids need --m, linear grids need --k".into()
                            );
                        }
                    }
                    _ => return Err("sweep: --lambda and --epsilon go together".into()),
                }
                if s.mode == ModeArg::Mc && s.samples == 0 {
                    return Err("--samples must be positive".into());
                }
                Ok(())
            }
            Command::Construct(c) => match c.method {
                Method::Gv if c.d.is_none() => Err("construct gv requires --d".into()),
                Method::Cover if c.r.is_none() => Err("construct cover requires --r".into()),
                _ => Ok(()),
            },
            Command::Count(c) => match c.family {
                FamilyArg::Nonlinear if c.m.is_none() => Err("count nonlinear requires --m".into()),
                FamilyArg::Linear if c.k.is_none() => Err("count linear requires --k".into()),
                _ => Ok(()),
            },
        }
    }
}

pub fn parse_rule(s: &str) -> Result<GoodnessRule, String> {
    s.parse::<GoodnessRule>()
        .map_err(|e| format!("bad f-rule {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> RunConfig {
        RunConfig::try_parse_from(line.split_whitespace()).unwrap()
    }

    #[test]
    fn canonical_round_trip() {
        for line in [
            "hdl verify theorem5 --n 4 --m 4 --f const:1 --mode exact",
            "hdl --threads 8 verify lemma2 --n 8 --pairs 1000 --seed 3",
            "hdl sweep --family linear --n 8,10,12 --lambda 1/2 --epsilon 0.5 --samples 200",
            "hdl --format json sweep --n 4 --m 4,5 --predicate covering --f lin:1/2 --mode exact",
            "hdl construct cover --n 10 --r 2 --budget 100 --seed 9 --out code.json",
            "hdl count --family linear --n 5 --k 2",
            "hdl analyze --generator g.json",
        ] {
            let cfg = parse(line);
            let again = RunConfig::try_parse_from(cfg.canonical_args()).unwrap();
            assert_eq!(again, cfg, "{line}");
            assert_eq!(again.canonical_string(), cfg.canonical_string());
        }
    }

    #[test]
    fn invalid_combinations() {
        assert!(parse("hdl verify theorem5 --n 4").validate().is_err());
        assert!(parse("hdl verify theorem1").validate().is_err());
        assert!(parse("hdl verify theorem5 --n 4 --m 4 --f bogus")
            .validate()
            .is_err());
        assert!(parse("hdl sweep --m 4").validate().is_err());
        assert!(parse("hdl sweep --n 4 --lambda 1/2").validate().is_err());
        assert!(parse("hdl construct gv --n 5").validate().is_err());
        assert!(parse("hdl count --family linear --n 5").validate().is_err());
        assert!(parse("hdl --threads 0 count --n 5 --m 2")
            .validate()
            .is_err());
        assert!(parse("hdl verify lemma4 --n 4 --k 2").validate().is_ok());
    }
}
