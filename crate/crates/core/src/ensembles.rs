//! Fractions of good packings / good coverings over C(n, M) and L(n, k).
//!
//! Monte Carlo estimates are reproducible: sample `i` draws from its own
//! ChaCha8 stream (`seed`, stream `i`), and per-sample outcomes are combined
//! by summation, so the worker count never changes a result.

use std::collections::HashSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linear::{
    check_budget, count_linear, count_nonlinear, enumerate_linear, sample_linear_uniform,
    LinearCode,
};
use crate::metrics::{is_good_covering, is_good_packing, Code};
use crate::rule::{format_rational, GoodnessRule};
use crate::word::{check_len, space_size};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// One-sided 95% normal quantile.
pub const Z_95_ONE_SIDED: f64 = 1.644_853_626_951_472_2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Nonlinear { n: u32, m: u64 },
    Linear { n: u32, k: u32 },
}

impl Family {
    pub fn n(&self) -> u32 {
        match *self {
            Family::Nonlinear { n, .. } | Family::Linear { n, .. } => n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Nonlinear { .. } => "nonlinear",
            Family::Linear { .. } => "linear",
        }
    }

    /// M for nonlinear ensembles, k for linear ones.
    pub fn size_param(&self) -> u64 {
        match *self {
            Family::Nonlinear { m, .. } => m,
            Family::Linear { k, .. } => u64::from(k),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Nonlinear { n, m } => {
                check_len(n)?;
                if m < 2 || m > space_size(n) {
                    return Err(Error::Domain(format!(
                        "need 2 <= M <= 2^n, got M={m}, n={n}"
                    )));
                }
            }
            Family::Linear { n, k } => {
                check_len(n)?;
                if k == 0 || k > n {
                    return Err(Error::Domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
                }
            }
        }
        Ok(())
    }

    /// The standing range n <= M <= 2^n − 1 under which the duality for
    /// nonlinear ensembles is stated.
    pub fn check_duality_range(&self) -> Result<()> {
        if let Family::Nonlinear { n, m } = *self {
            check_len(n)?;
            if m < u64::from(n) || m > space_size(n) - 1 {
                return Err(Error::Guard(format!(
                    "duality for C(n,M) assumes n <= M <= 2^n - 1; got n={n}, M={m}"
                )));
            }
        }
        Ok(())
    }

    pub fn cardinality(&self) -> Result<num_bigint::BigUint> {
        match *self {
            Family::Nonlinear { n, m } => count_nonlinear(n, m),
            Family::Linear { n, k } => count_linear(n, k),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Nonlinear { n, m } => write!(f, "C({n},{m})"),
            Family::Linear { n, k } => write!(f, "L({n},{k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    GoodPacking(GoodnessRule),
    GoodCovering(GoodnessRule),
}

impl Predicate {
    pub fn name(&self) -> &'static str {
        match self {
            Predicate::GoodPacking(_) => "packing",
            Predicate::GoodCovering(_) => "covering",
        }
    }

    pub fn rule(&self) -> &GoodnessRule {
        match self {
            Predicate::GoodPacking(f) | Predicate::GoodCovering(f) => f,
        }
    }

    pub fn eval_code(&self, c: &Code) -> Result<bool> {
        match self {
            Predicate::GoodPacking(f) => is_good_packing(c, f),
            Predicate::GoodCovering(f) => is_good_covering(c, f),
        }
    }

    pub fn eval_linear(&self, l: &LinearCode) -> Result<bool> {
        match self {
            Predicate::GoodPacking(f) => {
                let phi = l.r_density(l.min_distance()? - 1)?;
                f.check_ge(l.len(), &phi.to_rational())
            }
            Predicate::GoodCovering(f) => {
                let phi = l.r_density(l.covering_radius()?)?;
                f.check_le(l.len(), &phi.to_rational())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub family: Family,
    pub predicate: Predicate,
}

impl EnsembleSpec {
    pub fn new(family: Family, predicate: Predicate) -> Result<Self> {
        family.validate()?;
        Ok(EnsembleSpec { family, predicate })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionEstimate {
    pub successes: u64,
    pub samples: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: Option<u64>,
    pub mode: Mode,
}

impl FractionEstimate {
    pub(crate) fn exact(successes: u64, total: u64) -> Self {
        let p = successes as f64 / total as f64;
        FractionEstimate {
            successes,
            samples: total,
            ci_low: p,
            ci_high: p,
            seed: None,
            mode: Mode::Exact,
        }
    }

    pub(crate) fn monte_carlo(successes: u64, samples: u64, seed: u64) -> Self {
        let (lo, hi) = wilson_interval(successes, samples, Z_95);
        FractionEstimate {
            successes,
            samples,
            ci_low: lo,
            ci_high: hi,
            seed: Some(seed),
            mode: Mode::MonteCarlo,
        }
    }

    /// successes / samples, reduced.
    pub fn point(&self) -> BigRational {
        BigRational::new(BigInt::from(self.successes), BigInt::from(self.samples))
    }

    pub fn point_f64(&self) -> f64 {
        self.successes as f64 / self.samples as f64
    }

    /// The unreduced fraction "successes/samples".
    pub fn fraction_string(&self) -> String {
        format!("{}/{}", self.successes, self.samples)
    }

    /// Distance from the point estimate to the one-sided 95% Wilson upper bound.
    pub fn upper_margin(&self) -> f64 {
        match self.mode {
            Mode::Exact => 0.0,
            Mode::MonteCarlo => {
                let (_, hi) = wilson_interval(self.successes, self.samples, Z_95_ONE_SIDED);
                hi - self.point_f64()
            }
        }
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
/// The bounds are clamped so that they always bracket the point estimate.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = (center - half).clamp(0.0, 1.0).min(p);
    let hi = (center + half).clamp(0.0, 1.0).max(p);
    (lo, hi)
}

/// The RNG stream owned by sample `index` under master seed `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniformly random M-subset of F_2^n, by Floyd's subset sampling.
pub fn sample_code_uniform<R: Rng + ?Sized>(n: u32, m: u64, rng: &mut R) -> Result<Code> {
    Family::Nonlinear { n, m }.validate()?;
    let total = space_size(n);
    let mut chosen: HashSet<u32> = HashSet::with_capacity(m as usize);
    let mut words = Vec::with_capacity(m as usize);
    for j in (total - m)..total {
        let t = rng.gen_range(0..=j) as u32;
        let pick = if chosen.contains(&t) { j as u32 } else { t };
        chosen.insert(pick);
        words.push(pick);
    }
    words.sort_unstable();
    Ok(Code::from_sorted_unchecked(n, words))
}

fn sample_outcome(spec: &EnsembleSpec, rng: &mut ChaCha8Rng) -> Result<bool> {
    match spec.family {
        Family::Nonlinear { n, m } => spec.predicate.eval_code(&sample_code_uniform(n, m, rng)?),
        Family::Linear { n, k } => spec
            .predicate
            .eval_linear(&sample_linear_uniform(n, k, rng)?),
    }
}

pub fn estimate_fraction(spec: &EnsembleSpec, samples: u64, seed: u64) -> Result<FractionEstimate> {
    spec.family.validate()?;
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let successes = (0..samples)
        .into_par_iter()
        .map(|i| sample_outcome(spec, &mut sample_rng(seed, i)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(FractionEstimate::monte_carlo(successes, samples, seed))
}

/// Every M-subset of F_2^n, as sorted codes, in lexicographic order.
pub fn enumerate_codes(n: u32, m: u64, budget: u64) -> Result<impl Iterator<Item = Code>> {
    Family::Nonlinear { n, m }.validate()?;
    check_budget(&count_nonlinear(n, m)?, budget)?;
    Ok((0..space_size(n) as u32)
        .combinations(m as usize)
        .map(move |w| Code::from_sorted_unchecked(n, w)))
}

fn count_matching<T: Send>(
    items: impl Iterator<Item = T> + Send,
    pred: impl Fn(&T) -> Result<bool> + Sync,
) -> Result<(u64, u64)> {
    items
        .par_bridge()
        .map(|c| pred(&c).map(|ok| (u64::from(ok), 1)))
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
}

pub fn exact_fraction(spec: &EnsembleSpec, budget: u64) -> Result<FractionEstimate> {
    let (good, total) = match spec.family {
        Family::Nonlinear { n, m } => count_matching(enumerate_codes(n, m, budget)?, |c| {
            spec.predicate.eval_code(c)
        })?,
        Family::Linear { n, k } => count_matching(enumerate_linear(n, k, budget)?, |l| {
            spec.predicate.eval_linear(l)
        })?,
    };
    Ok(FractionEstimate::exact(good, total))
}

/// One row of the sweep table; field names are the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub n: u32,
    #[serde(rename = "M_or_k")]
    pub m_or_k: u64,
    pub predicate: String,
    pub f_kind: String,
    pub f_param: String,
    pub mode: String,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub seed: Option<u64>,
}

pub const SWEEP_CSV_HEADER: &str =
    "family,n,M_or_k,predicate,f_kind,f_param,mode,point,ci_low,ci_high,samples,seed";

impl SweepRow {
    pub fn new(spec: &EnsembleSpec, est: &FractionEstimate) -> Self {
        let rule = spec.predicate.rule();
        SweepRow {
            family: spec.family.name().into(),
            n: spec.family.n(),
            m_or_k: spec.family.size_param(),
            predicate: spec.predicate.name().into(),
            f_kind: rule.kind_name().into(),
            f_param: rule.param_string(),
            mode: est.mode.to_string(),
            point: est.point_f64(),
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            samples: est.samples,
            seed: est.seed,
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.m_or_k,
            self.predicate,
            self.f_kind,
            self.f_param,
            self.mode,
            self.point,
            self.ci_low,
            self.ci_high,
            self.samples,
            self.seed.map(|s| s.to_string()).unwrap_or_default()
        )
    }
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn render_json(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize") + "\n"
}

/// Evaluates every grid point, in order.
pub fn sweep(
    grid: &[EnsembleSpec],
    mode: Mode,
    samples: u64,
    seed: u64,
    budget: u64,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Guard("sweep grid is empty".into()));
    }
    grid.iter()
        .map(|spec| {
            let est = match mode {
                Mode::Exact => exact_fraction(spec, budget)?,
                Mode::MonteCarlo => estimate_fraction(spec, samples, seed)?,
            };
            Ok(SweepRow::new(spec, &est))
        })
        .collect()
}

/// k = ⌈λn⌉.
pub fn rate_dimension(n: u32, lambda: &BigRational) -> u32 {
    let k = (lambda * BigRational::from_integer(n.into()))
        .ceil()
        .to_integer();
    k.to_u32().unwrap_or(0)
}

/// Grid for the β_ε trend: L(n, ⌈λn⌉) with good-packing threshold n^(1+ε).
pub fn beta_epsilon_grid(
    ns: &[u32],
    lambda: &BigRational,
    epsilon: &BigRational,
) -> Result<Vec<EnsembleSpec>> {
    if !(lambda.is_positive() && lambda < &BigRational::from_integer(1.into())) {
        return Err(Error::Domain(format!(
            "rate λ={} must lie in (0,1)",
            format_rational(lambda)
        )));
    }
    if !epsilon.is_positive() {
        return Err(Error::Domain("ε must be positive".into()));
    }
    let rule = GoodnessRule::power(epsilon + BigRational::from_integer(1.into()));
    ns.iter()
        .map(|&n| {
            let k = rate_dimension(n, lambda);
            EnsembleSpec::new(
                Family::Linear { n, k },
                Predicate::GoodPacking(rule.clone()),
            )
        })
        .collect()
}

pub fn beta_epsilon_sweep(
    ns: &[u32],
    lambda: &BigRational,
    epsilon: &BigRational,
    samples: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let grid = beta_epsilon_grid(ns, lambda, epsilon)?;
    sweep(&grid, Mode::MonteCarlo, samples, seed, 0)
}

/// Largest possible φ_{d−1} over L(n,k) is at most φ_n = 2^k; a threshold
/// above it makes the packing predicate unsatisfiable.
pub fn packing_unsatisfiable(spec: &EnsembleSpec) -> bool {
    let Predicate::GoodPacking(rule) = &spec.predicate else {
        return false;
    };
    let (n, size) = match spec.family {
        Family::Nonlinear { n, m } => (n, BigInt::from(m)),
        Family::Linear { n, k } => (n, BigInt::from(1u64) << k),
    };
    let max_phi = BigRational::from_integer(size);
    rule.compare(n, &max_phi) == Some(std::cmp::Ordering::Less)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::parse_rational;

    fn rule(s: &str) -> GoodnessRule {
        s.parse().unwrap()
    }

    fn spec(family: Family, pred: Predicate) -> EnsembleSpec {
        EnsembleSpec::new(family, pred).unwrap()
    }

    #[test]
    fn wilson_brackets_point() {
        for (s, n) in [(0, 10), (10, 10), (3, 10), (1, 1), (500, 1000)] {
            let (lo, hi) = wilson_interval(s, n, Z_95);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
        }
        // 5/10 at 95%: [0.2366, 0.7634]
        let (lo, hi) = wilson_interval(5, 10, Z_95);
        assert!((lo - 0.236_593).abs() < 1e-5 && (hi - 0.763_407).abs() < 1e-5);
    }

    #[test]
    fn floyd_sampling_postconditions() {
        let mut rng = sample_rng(1, 0);
        let full = sample_code_uniform(4, 16, &mut rng).unwrap();
        assert_eq!(full, Code::full_space(4).unwrap());
        for i in 0..100 {
            let c = sample_code_uniform(6, 13, &mut sample_rng(9, i)).unwrap();
            assert_eq!(c.size(), 13);
        }
        assert!(sample_code_uniform(3, 1, &mut rng).is_err());
        assert!(sample_code_uniform(3, 9, &mut rng).is_err());
    }

    #[test]
    fn estimate_boundary_predicates() {
        let half = Predicate::GoodCovering(rule("const:1/2"));
        let zero = Predicate::GoodPacking(rule("const:0"));
        for fam in [
            Family::Nonlinear { n: 6, m: 10 },
            Family::Linear { n: 8, k: 3 },
        ] {
            let e = estimate_fraction(&spec(fam.clone(), half.clone()), 300, 5).unwrap();
            assert_eq!(e.successes, 0);
            let e = estimate_fraction(&spec(fam, zero.clone()), 300, 5).unwrap();
            assert_eq!(e.successes, 300);
            assert!(e.ci_low <= 1.0 && e.ci_high == 1.0);
        }
    }

    #[test]
    fn exact_examples() {
        let one = rule("const:1");
        let e = exact_fraction(
            &spec(
                Family::Nonlinear { n: 3, m: 8 },
                Predicate::GoodCovering(one.clone()),
            ),
            1000,
        )
        .unwrap();
        assert_eq!((e.successes, e.samples), (1, 1));
        let e = exact_fraction(
            &spec(
                Family::Linear { n: 3, k: 3 },
                Predicate::GoodCovering(one.clone()),
            ),
            1000,
        )
        .unwrap();
        assert_eq!((e.successes, e.samples), (1, 1));
        assert_eq!(e.ci_low, e.ci_high);
        let too_big = spec(
            Family::Nonlinear { n: 5, m: 8 },
            Predicate::GoodCovering(one),
        );
        assert!(matches!(
            exact_fraction(&too_big, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn determinism_across_thread_counts() {
        let s = spec(
            Family::Nonlinear { n: 7, m: 20 },
            Predicate::GoodCovering(rule("lin:1")),
        );
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_fraction(&s, 2000, 42).unwrap())
        };
        assert_eq!(run(1), run(8));
    }

    #[test]
    fn duality_range_guard() {
        assert!(Family::Nonlinear { n: 4, m: 3 }
            .check_duality_range()
            .is_err());
        assert!(Family::Nonlinear { n: 4, m: 16 }
            .check_duality_range()
            .is_err());
        assert!(Family::Nonlinear { n: 4, m: 4 }
            .check_duality_range()
            .is_ok());
        assert!(Family::Nonlinear { n: 4, m: 1 }.validate().is_err());
    }

    #[test]
    fn csv_schema() {
        let s = spec(
            Family::Linear { n: 6, k: 3 },
            Predicate::GoodPacking(rule("const:1")),
        );
        let rows = sweep(&[s], Mode::Exact, 0, 0, 10_000).unwrap();
        let csv = render_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_CSV_HEADER);
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 12);
        assert_eq!(
            &fields[..7],
            ["linear", "6", "3", "packing", "const", "1", "exact"]
        );
        let json: serde_json::Value = serde_json::from_str(&render_json(&rows)).unwrap();
        let keys: Vec<&str> = json[0]
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        let mut expected: Vec<&str> = SWEEP_CSV_HEADER.split(',').collect();
        expected.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, expected);
        assert!(sweep(&[], Mode::Exact, 0, 0, 10).is_err());
    }

    #[test]
    fn beta_sweep_rows() {
        let half = parse_rational("0.5").unwrap();
        let grid = beta_epsilon_grid(&[8, 10, 12], &half, &half).unwrap();
        let ks: Vec<u64> = grid.iter().map(|s| s.family.size_param()).collect();
        assert_eq!(ks, [4, 5, 6]);
        // with a huge exponent every row is unsatisfiable and estimates 0
        let big = parse_rational("20").unwrap();
        let grid = beta_epsilon_grid(&[8, 10], &half, &big).unwrap();
        assert!(grid.iter().all(packing_unsatisfiable));
        let rows = beta_epsilon_sweep(&[8, 10], &half, &big, 200, 3).unwrap();
        assert!(rows.iter().all(|r| r.point == 0.0));
        // single-point sweep equals the estimate
        let one = beta_epsilon_sweep(&[10], &half, &half, 500, 11).unwrap();
        let est = estimate_fraction(&beta_epsilon_grid(&[10], &half, &half).unwrap()[0], 500, 11)
            .unwrap();
        assert_eq!(
            one[0],
            SweepRow::new(&beta_epsilon_grid(&[10], &half, &half).unwrap()[0], &est)
        );
    }
}
