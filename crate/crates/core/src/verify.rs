//! Executable checks of the packing/covering duality statements.
//!
//! Every check returns a [`VerificationReport`]; a report passes when its
//! violation list is empty. Each violation carries the offending code(s),
//! shrunk by greedy word removal while the violation persists, and the seed
//! when the codes came from random sampling.

use std::collections::{BTreeMap, HashMap, HashSet};

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ensembles::{sample_code_uniform, sample_rng, FractionEstimate, Mode, Predicate};
use crate::error::{Error, Result};
use crate::linear::{
    check_budget, count_linear, count_nonlinear, enumerate_linear, sample_linear_uniform,
    LinearCode, DEFAULT_ENUM_BUDGET,
};
use crate::metrics::{
    covering_radius, is_good_covering, is_good_packing, is_maximal, min_distance, r_density, Code,
};
use crate::rule::{format_rational, GoodnessRule};
use crate::word::{check_len, space_size, Word};

pub type CodePredicate<'a> = &'a (dyn Fn(&Code) -> Result<bool> + Sync);
pub type LinearPredicate<'a> = &'a (dyn Fn(&LinearCode) -> Result<bool> + Sync);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCode {
    pub n: u32,
    pub words: Vec<String>,
}

impl From<&Code> for WitnessCode {
    fn from(c: &Code) -> Self {
        WitnessCode {
            n: c.len(),
            words: c.to_strings(),
        }
    }
}

impl From<&LinearCode> for WitnessCode {
    fn from(l: &LinearCode) -> Self {
        match l.codewords() {
            Ok(c) => WitnessCode::from(&c),
            Err(_) => WitnessCode {
                n: l.len(),
                words: l.row_strings(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub description: String,
    pub witnesses: Vec<WitnessCode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub params: BTreeMap<String, Value>,
    pub mode: String,
    pub checked: u64,
    pub violations: Vec<Violation>,
    pub quantities: BTreeMap<String, Value>,
}

impl VerificationReport {
    fn new(claim: &str, mode: &str) -> Self {
        VerificationReport {
            claim: claim.into(),
            params: BTreeMap::new(),
            mode: mode.into(),
            checked: 0,
            violations: Vec::new(),
            quantities: BTreeMap::new(),
        }
    }

    fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    fn quantity(&mut self, key: &str, value: impl Into<Value>) {
        self.quantities.insert(key.into(), value.into());
    }

    fn finish(mut self) -> Self {
        self.violations.sort_by(|a, b| {
            (
                &a.description,
                &a.witnesses.iter().map(|w| &w.words).collect::<Vec<_>>(),
            )
                .cmp(&(
                    &b.description,
                    &b.witnesses.iter().map(|w| &w.words).collect::<Vec<_>>(),
                ))
        });
        self
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: Mode,
    pub samples: u64,
    pub seed: u64,
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::Exact,
            samples: 10_000,
            seed: 0,
            budget: DEFAULT_ENUM_BUDGET,
        }
    }
}

fn rat_string(q: &BigRational) -> String {
    format_rational(q)
}

/// Removes words from `code` one at a time, keeping each removal that still
/// violates, until no single removal does.
pub fn shrink_code(code: &Code, still_violates: impl Fn(&Code) -> bool) -> Code {
    let mut cur = code.clone();
    loop {
        let smaller = cur
            .words()
            .filter_map(|w| cur.without_word(&w).ok())
            .find(|c| still_violates(c));
        match smaller {
            Some(c) => cur = c,
            None => return cur,
        }
    }
}

/// Shrinks a nested pair C ⊂ C' by deleting shared words from both.
fn shrink_pair(
    sub: &Code,
    sup: &Code,
    still_violates: impl Fn(&Code, &Code) -> bool,
) -> (Code, Code) {
    let (mut a, mut b) = (sub.clone(), sup.clone());
    loop {
        let next = a.words().find_map(|w| {
            let (a2, b2) = (a.without_word(&w).ok()?, b.without_word(&w).ok()?);
            still_violates(&a2, &b2).then_some((a2, b2))
        });
        match next {
            Some((a2, b2)) => (a, b) = (a2, b2),
            None => return (a, b),
        }
    }
}

fn supercode_violation(sub: &Code, sup: &Code) -> Option<(u32, u32)> {
    let r = covering_radius(sub);
    let d = min_distance(sup).ok()?;
    (r < d).then_some((r, d))
}

/// R(C) ≥ d(C') for a proper subcode C ⊂ C'.
pub fn check_supercode_lemma(sub: &Code, sup: &Code) -> Result<VerificationReport> {
    if sub.len() != sup.len() {
        return Err(Error::LengthMismatch(sub.len(), sup.len()));
    }
    if !sub.is_proper_subset_of(sup) {
        return Err(Error::Guard(
            "first code must be a proper subcode of the second".into(),
        ));
    }
    if sup.size() < 2 {
        return Err(Error::DistanceUndefined(sup.size()));
    }
    let r = covering_radius(sub);
    let d = min_distance(sup)?;
    let mut report = VerificationReport::new("lemma2", "exact").param("n", sub.len());
    report.checked = 1;
    report.quantity("covering_radius_sub", r);
    report.quantity("min_distance_super", d);
    if r < d {
        let (a, b) = shrink_pair(sub, sup, |a, b| supercode_violation(a, b).is_some());
        report.violations.push(Violation {
            description: format!("R(C)={r} < d(C')={d}"),
            witnesses: vec![(&a).into(), (&b).into()],
            seed: None,
        });
    }
    Ok(report.finish())
}

/// Draws `pairs` random nested pairs C ⊂ C' at length n and checks R(C) ≥ d(C')
/// on each. Pair `i` uses RNG stream `i` of `seed`.
pub fn supercode_lemma_sweep(n: u32, pairs: u64, seed: u64) -> Result<VerificationReport> {
    check_len(n)?;
    let max_size = space_size(n).min(64);
    let violations: Vec<Violation> = (0..pairs)
        .into_par_iter()
        .map(|i| -> Result<Option<Violation>> {
            let mut rng = sample_rng(seed, i);
            let m_sup = rng.gen_range(2..=max_size);
            let sup = sample_code_uniform(n, m_sup, &mut rng)?;
            let m_sub = rng.gen_range(1..m_sup) as usize;
            let mut keep = sup.bits().to_vec();
            for j in 0..m_sub {
                let t = rng.gen_range(j..keep.len());
                keep.swap(j, t);
            }
            keep.truncate(m_sub);
            let sub = Code::from_bits(n, keep)?;
            Ok(supercode_violation(&sub, &sup).map(|(r, d)| {
                let (a, b) = shrink_pair(&sub, &sup, |a, b| supercode_violation(a, b).is_some());
                Violation {
                    description: format!("pair {i}: R(C)={r} < d(C')={d}"),
                    witnesses: vec![(&a).into(), (&b).into()],
                    seed: Some(seed),
                }
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut report = VerificationReport::new("lemma2", "monte-carlo")
        .param("n", n)
        .param("pairs", pairs)
        .param("seed", seed);
    report.checked = pairs;
    report.violations = violations;
    Ok(report.finish())
}

/// Both sides of the global edge count of the inclusion graph between
/// C(n, M) and C(n, M+1): (M+1)·|C(n,M+1)| and (2^n − M)·|C(n,M)|.
pub fn edge_identity(n: u32, m: u64) -> Result<(BigUint, BigUint)> {
    check_len(n)?;
    if m == 0 || m >= space_size(n) {
        return Err(Error::Domain(format!("need 1 <= M <= 2^n - 1, got M={m}")));
    }
    let right = BigUint::from(m + 1) * count_nonlinear(n, m + 1)?;
    let left = BigUint::from(space_size(n) - m) * count_nonlinear(n, m)?;
    Ok((right, left))
}

fn mask_of(words: &[u32]) -> u64 {
    words.iter().fold(0u64, |acc, &w| acc | 1 << w)
}

/// The inclusion-graph fraction inequality between C(n, M) and C(n, M+1) for
/// S' = {C' : selector(C')} and S its set of M-subcodes.
pub fn verify_lemma3(
    n: u32,
    m: u64,
    selector: CodePredicate<'_>,
    budget: u64,
) -> Result<VerificationReport> {
    check_len(n)?;
    if n > 6 {
        return Err(Error::Guard(
            "exhaustive inclusion graphs need n <= 6".into(),
        ));
    }
    let points = space_size(n);
    if m == 0 || m >= points {
        return Err(Error::Domain(format!("need 1 <= M <= 2^n - 1, got M={m}")));
    }
    let right_total = count_nonlinear(n, m + 1)?;
    let left_total = count_nonlinear(n, m)?;
    check_budget(&(&right_total + &left_total), budget)?;

    let selected: Vec<Vec<u32>> = (0..points as u32)
        .combinations(m as usize + 1)
        .par_bridge()
        .map(|w| -> Result<Option<Vec<u32>>> {
            let keep = selector(&Code::from_sorted_unchecked(n, w.clone()))?;
            Ok(keep.then_some(w))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let enumerated_right = (0..points as u32).combinations(m as usize + 1).count() as u64;
    let enumerated_left = (0..points as u32).combinations(m as usize).count() as u64;

    // left degree of every M-code inside H
    let mut degree: HashMap<u64, u64> = HashMap::new();
    for w in &selected {
        let full = mask_of(w);
        for &x in w {
            *degree.entry(full & !(1 << x)).or_default() += 1;
        }
    }
    let s_prime = selected.len() as u64;
    let s = degree.len() as u64;
    let edges_h: u64 = degree.values().sum();
    let left_degree = points - m;

    let mut report = VerificationReport::new("lemma3", "exact")
        .param("n", n)
        .param("M", m);
    report.checked = enumerated_left + enumerated_right;
    let mut fail = |d: String| {
        report.violations.push(Violation {
            description: d,
            witnesses: vec![],
            seed: None,
        })
    };
    let (id_right, id_left) = edge_identity(n, m)?;
    let counted_right = BigUint::from(m + 1) * BigUint::from(enumerated_right);
    let counted_left = BigUint::from(left_degree) * BigUint::from(enumerated_left);
    if counted_right != counted_left || counted_right != id_right || id_right != id_left {
        fail(format!(
            "edge identity: (M+1)|C(n,M+1)| = {counted_right} but (2^n-M)|C(n,M)| = {counted_left}"
        ));
    }
    if edges_h != (m + 1) * s_prime {
        fail(format!(
            "|E(H)| = {edges_h} differs from (M+1)|S'| = {}",
            (m + 1) * s_prime
        ));
    }
    if edges_h > left_degree * s {
        fail(format!(
            "|E(H)| = {edges_h} exceeds (2^n-M)|S| = {}",
            left_degree * s
        ));
    }
    if BigUint::from(s) * &right_total < BigUint::from(s_prime) * &left_total {
        fail(format!(
            "|S|/|C(n,M)| = {s}/{left_total} is below |S'|/|C(n,M+1)| = {s_prime}/{right_total}"
        ));
    }
    report.quantity("S", s);
    report.quantity("S_prime", s_prime);
    report.quantity("fraction_S", format!("{s}/{left_total}"));
    report.quantity("fraction_S_prime", format!("{s_prime}/{right_total}"));
    report.quantity("edges_G", id_right.to_string());
    report.quantity("edges_H", edges_h);
    Ok(report.finish())
}

/// The linear analogue of [`verify_lemma3`] on L(n, k) ∪ L(n, k+1).
pub fn verify_lemma4(
    n: u32,
    k: u32,
    selector: LinearPredicate<'_>,
    budget: u64,
) -> Result<VerificationReport> {
    check_len(n)?;
    if k == 0 || k >= n {
        return Err(Error::Domain(format!(
            "need 1 <= k <= n-1, got k={k}, n={n}"
        )));
    }
    let left_total = count_linear(n, k)?;
    let right_total = count_linear(n, k + 1)?;
    check_budget(&(&left_total + &right_total), budget)?;

    let rights: Vec<LinearCode> = enumerate_linear(n, k + 1, budget)?.collect();
    let per_right = rights
        .par_iter()
        .map(|l| -> Result<(bool, Vec<LinearCode>)> { Ok((selector(l)?, l.immediate_subcodes()?)) })
        .collect::<Result<Vec<_>>>()?;
    let right_degree_sum: u64 = per_right.iter().map(|(_, subs)| subs.len() as u64).sum();
    let left_degree_sum: u64 = enumerate_linear(n, k, budget)?
        .par_bridge()
        .map(|l| l.immediate_supercodes().map(|s| s.len() as u64))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    let mut degree: HashMap<LinearCode, u64> = HashMap::new();
    let mut s_prime = 0u64;
    for (keep, subs) in per_right {
        if keep {
            s_prime += 1;
            for sub in subs {
                *degree.entry(sub).or_default() += 1;
            }
        }
    }
    let s = degree.len() as u64;
    let edges_h: u64 = degree.values().sum();
    let right_degree = (1u64 << (k + 1)) - 1;
    let left_degree = (1u64 << (n - k)) - 1;

    let mut report = VerificationReport::new("lemma4", "exact")
        .param("n", n)
        .param("k", k);
    report.checked = (&left_total + &right_total).try_into().unwrap_or(u64::MAX);
    let mut fail = |d: String| {
        report.violations.push(Violation {
            description: d,
            witnesses: vec![],
            seed: None,
        })
    };
    let formula_right = BigUint::from(right_degree) * &right_total;
    let formula_left = BigUint::from(left_degree) * &left_total;
    if BigUint::from(right_degree_sum) != formula_right
        || BigUint::from(left_degree_sum) != formula_left
        || right_degree_sum != left_degree_sum
    {
        fail(format!(
            "edge count via subcodes {right_degree_sum} vs via supercodes {left_degree_sum} (formulas {formula_right}, {formula_left})"
        ));
    }
    if edges_h != right_degree * s_prime {
        fail(format!(
            "|E(H)| = {edges_h} differs from (2^(k+1)-1)|S'| = {}",
            right_degree * s_prime
        ));
    }
    if edges_h > left_degree * s {
        fail(format!(
            "|E(H)| = {edges_h} exceeds (2^(n-k)-1)|S| = {}",
            left_degree * s
        ));
    }
    if BigUint::from(s) * &right_total < BigUint::from(s_prime) * &left_total {
        fail(format!(
            "|S|/|L(n,k)| = {s}/{left_total} is below |S'|/|L(n,k+1)| = {s_prime}/{right_total}"
        ));
    }
    report.quantity("S", s);
    report.quantity("S_prime", s_prime);
    report.quantity("fraction_S", format!("{s}/{left_total}"));
    report.quantity("fraction_S_prime", format!("{s_prime}/{right_total}"));
    report.quantity("edges_G", right_degree_sum);
    report.quantity("edges_H", edges_h);
    Ok(report.finish())
}

fn theorem1_failure(c: &Code, f: &GoodnessRule) -> Result<Option<String>> {
    let d = min_distance(c)?;
    let r = covering_radius(c);
    let phi_r = r_density(c, r)?;
    let phi_p = r_density(c, d - 1)?;
    let packing = is_good_packing(c, f)?;
    let covering = is_good_covering(c, f)?;
    let mut why = Vec::new();
    if phi_r > phi_p {
        why.push(format!("φ_R = {phi_r} exceeds φ_(d-1) = {phi_p}"));
    }
    if !(packing || covering) {
        why.push(format!(
            "neither a good packing nor a good covering for f = {f}"
        ));
    }
    Ok((!why.is_empty()).then(|| why.join("; ")))
}

/// A maximal code is an f(n)-good packing or an f(n)-good covering.
pub fn verify_theorem1(c: &Code, f: &GoodnessRule) -> Result<VerificationReport> {
    if !is_maximal(c)? {
        return Err(Error::Guard("code is not maximal (R > d - 1)".into()));
    }
    let mut report = VerificationReport::new("theorem1", "exact")
        .param("n", c.len())
        .param("M", c.size() as u64)
        .param("f", f.to_string());
    report.checked = 1;
    let d = min_distance(c)?;
    let r = covering_radius(c);
    report.quantity("d", d);
    report.quantity("R", r);
    report.quantity("phi_R", r_density(c, r)?.to_string());
    report.quantity("phi_d_minus_1", r_density(c, d - 1)?.to_string());
    report.quantity("good_packing", is_good_packing(c, f)?);
    report.quantity("good_covering", is_good_covering(c, f)?);
    if let Some(why) = theorem1_failure(c, f)? {
        let witness = shrink_code(c, |s| {
            s.size() >= 2
                && is_maximal(s).unwrap_or(false)
                && matches!(theorem1_failure(s, f), Ok(Some(_)))
        });
        report.violations.push(Violation {
            description: why,
            witnesses: vec![(&witness).into()],
            seed: None,
        });
    }
    Ok(report.finish())
}

/// The steps φ_R(C) ≥ φ_d(C) > φ_(d−1)(C') ≥ f(n) for C = C' minus one word,
/// and the conclusion that C is not a good covering. Returns the failed steps.
fn nonlinear_chain(
    sub: &Code,
    sup: &Code,
    f: &GoodnessRule,
    covering: CodePredicate<'_>,
) -> Result<Vec<String>> {
    let n = sub.len();
    let r = covering_radius(sub);
    let d = min_distance(sup)?;
    let phi_r = r_density(sub, r)?;
    let phi_d = r_density(sub, d)?;
    let phi_sup = r_density(sup, d - 1)?;
    let mut failed = Vec::new();
    if r < d {
        failed.push(format!("supercode lemma: R(C)={r} < d(C')={d}"));
    }
    if phi_r < phi_d {
        failed.push(format!("φ_R(C) = {phi_r} < φ_d(C) = {phi_d}"));
    }
    if phi_d <= phi_sup {
        failed.push(format!(
            "φ_d(C) = {phi_d} is not above φ_(d-1)(C') = {phi_sup}"
        ));
    }
    if !f.check_ge(n, &phi_sup.to_rational())? {
        failed.push(format!("φ_(d-1)(C') = {phi_sup} is below f = {f}"));
    }
    if covering(sub)? {
        failed.push("subcode of a good packing is a good covering".into());
    }
    Ok(failed)
}

/// The factor-2 chain φ_R(C) ≥ φ_d(C) > ½φ_(d−1)(C') ≥ f(n) for a linear
/// subcode C of codimension one in C'.
fn linear_chain(
    sub: &LinearCode,
    sup: &LinearCode,
    f: &GoodnessRule,
    covering: LinearPredicate<'_>,
) -> Result<Vec<String>> {
    let n = sub.len();
    let r = sub.covering_radius()?;
    let d = sup.min_distance()?;
    let phi_r = sub.r_density(r)?;
    let phi_d = sub.r_density(d)?;
    let phi_sup = sup.r_density(d - 1)?;
    let two = BigRational::from_integer(2.into());
    let half_sup = phi_sup.to_rational() / &two;
    let mut failed = Vec::new();
    if r < d {
        failed.push(format!("supercode lemma: R(C)={r} < d(C')={d}"));
    }
    if phi_r < phi_d {
        failed.push(format!("φ_R(C) = {phi_r} < φ_d(C) = {phi_d}"));
    }
    if phi_d.to_rational() <= half_sup {
        failed.push(format!(
            "φ_d(C) = {phi_d} is not above ½φ_(d-1)(C') = {}",
            rat_string(&half_sup)
        ));
    }
    if !f.check_ge(n, &half_sup)? {
        failed.push(format!(
            "½φ_(d-1)(C') = {} is below f = {f}",
            rat_string(&half_sup)
        ));
    }
    if covering(sub)? {
        failed.push("subcode of a 2f-good packing is a good covering".into());
    }
    Ok(failed)
}

#[derive(Default)]
struct Tally {
    good: u64,
    total: u64,
    pairs: u64,
    violations: Vec<Violation>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.good += other.good;
        self.total += other.total;
        self.pairs += other.pairs;
        self.violations.extend(other.violations);
        self
    }
}

fn tally_sum(items: Vec<Tally>) -> Tally {
    items.into_iter().fold(Tally::default(), Tally::merge)
}

/// α + β ≤ 1 over C(n, M) and C(n, M+1), with the real good-packing and
/// good-covering predicates.
pub fn verify_theorem5(
    n: u32,
    m: u64,
    f: &GoodnessRule,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let packing = |c: &Code| is_good_packing(c, f);
    let covering = |c: &Code| is_good_covering(c, f);
    verify_theorem5_with(n, m, f, opts, &packing, &covering)
}

/// [`verify_theorem5`] with injectable predicates; α counts `covering` over C(n, M),
/// β counts `packing` over C(n, M+1). Used for mutation testing.
pub fn verify_theorem5_with(
    n: u32,
    m: u64,
    f: &GoodnessRule,
    opts: &VerifyOptions,
    packing: CodePredicate<'_>,
    covering: CodePredicate<'_>,
) -> Result<VerificationReport> {
    crate::ensembles::Family::Nonlinear { n, m }.check_duality_range()?;
    let chain_for = |sup: &Code, x: &Word, seed: Option<u64>| -> Result<Option<Violation>> {
        let sub = sup.without_word(x)?;
        let failed = nonlinear_chain(&sub, sup, f, covering)?;
        if failed.is_empty() {
            return Ok(None);
        }
        let (a, b) = shrink_pair(&sub, sup, |a, b| {
            b.size() >= 2 && matches!(nonlinear_chain(a, b, f, covering), Ok(v) if !v.is_empty())
        });
        Ok(Some(Violation {
            description: failed.join("; "),
            witnesses: vec![(&a).into(), (&b).into()],
            seed,
        }))
    };

    let (alpha, beta, pairs, mut violations) = match opts.mode {
        Mode::Exact => {
            let left = count_nonlinear(n, m)?;
            let right = count_nonlinear(n, m + 1)?;
            check_budget(&(&left + &right), opts.budget)?;
            let points = space_size(n) as u32;
            let a = tally_sum(
                (0..points)
                    .combinations(m as usize)
                    .par_bridge()
                    .map(|w| -> Result<Tally> {
                        let c = Code::from_sorted_unchecked(n, w);
                        Ok(Tally {
                            good: u64::from(covering(&c)?),
                            total: 1,
                            ..Default::default()
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
            let b = tally_sum(
                (0..points)
                    .combinations(m as usize + 1)
                    .par_bridge()
                    .map(|w| -> Result<Tally> {
                        let sup = Code::from_sorted_unchecked(n, w);
                        let mut t = Tally {
                            total: 1,
                            ..Default::default()
                        };
                        if packing(&sup)? {
                            t.good = 1;
                            for x in sup.words() {
                                t.pairs += 1;
                                t.violations.extend(chain_for(&sup, &x, None)?);
                            }
                        }
                        Ok(t)
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
            (
                FractionEstimate::exact(a.good, a.total),
                FractionEstimate::exact(b.good, b.total),
                b.pairs,
                b.violations,
            )
        }
        Mode::MonteCarlo => {
            let seed_b = opts.seed.wrapping_add(1);
            let a = tally_sum(
                (0..opts.samples)
                    .into_par_iter()
                    .map(|i| -> Result<Tally> {
                        let c = sample_code_uniform(n, m, &mut sample_rng(opts.seed, i))?;
                        Ok(Tally {
                            good: u64::from(covering(&c)?),
                            total: 1,
                            ..Default::default()
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
            let b = tally_sum(
                (0..opts.samples)
                    .into_par_iter()
                    .map(|i| -> Result<Tally> {
                        let mut rng = sample_rng(seed_b, i);
                        let sup = sample_code_uniform(n, m + 1, &mut rng)?;
                        let mut t = Tally {
                            total: 1,
                            ..Default::default()
                        };
                        if packing(&sup)? {
                            t.good = 1;
                            t.pairs = 1;
                            let x = sup.bits()[rng.gen_range(0..sup.size())];
                            t.violations
                                .extend(chain_for(&sup, &Word::new(n, x)?, Some(seed_b))?);
                        }
                        Ok(t)
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
            (
                FractionEstimate::monte_carlo(a.good, a.total, opts.seed),
                FractionEstimate::monte_carlo(b.good, b.total, seed_b),
                b.pairs,
                b.violations,
            )
        }
    };

    let mut report = VerificationReport::new("theorem5", &opts.mode.to_string())
        .param("n", n)
        .param("M", m)
        .param("f", f.to_string());
    if opts.mode == Mode::MonteCarlo {
        report = report
            .param("samples", opts.samples)
            .param("seed", opts.seed);
    }
    report.checked = alpha.samples + beta.samples + pairs;
    violations.extend(duality_check(&alpha, &beta));
    report.violations = violations;
    fill_alpha_beta(&mut report, &alpha, &beta, pairs);
    Ok(report.finish())
}

/// α + β ≤ 1, exactly in exact mode; in Monte Carlo mode the advisory check
/// α̂ + β̂ ≤ 1 + (one-sided 95% margins of α̂ and β̂).
fn duality_check(alpha: &FractionEstimate, beta: &FractionEstimate) -> Option<Violation> {
    let one = BigRational::from_integer(1.into());
    let sum = alpha.point() + beta.point();
    let ok = match alpha.mode {
        Mode::Exact => sum <= one,
        Mode::MonteCarlo => {
            alpha.point_f64() + beta.point_f64() <= 1.0 + alpha.upper_margin() + beta.upper_margin()
        }
    };
    (!ok).then(|| Violation {
        description: format!(
            "α + β = {} + {} = {} exceeds 1",
            alpha.fraction_string(),
            beta.fraction_string(),
            rat_string(&sum)
        ),
        witnesses: vec![],
        seed: alpha.seed,
    })
}

fn fill_alpha_beta(
    report: &mut VerificationReport,
    alpha: &FractionEstimate,
    beta: &FractionEstimate,
    pairs: u64,
) {
    report.quantity("alpha", alpha.fraction_string());
    report.quantity("beta", beta.fraction_string());
    report.quantity(
        "alpha_plus_beta",
        rat_string(&(alpha.point() + beta.point())),
    );
    report.quantity("chain_pairs", pairs);
    if alpha.mode == Mode::MonteCarlo {
        report.quantity("alpha_ci", json!([alpha.ci_low, alpha.ci_high]));
        report.quantity("beta_ci", json!([beta.ci_low, beta.ci_high]));
        report.quantity("slack", alpha.upper_margin() + beta.upper_margin());
        report.quantity("advisory", true);
    }
}

/// α over L(n,k) good coverings at f, β over L(n,k+1) good packings at 2f.
pub fn verify_theorem6(
    n: u32,
    k: u32,
    f: &GoodnessRule,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let f2 = f.scaled(BigRational::from_integer(2.into()))?;
    let packing_pred = Predicate::GoodPacking(f2);
    let covering_pred = Predicate::GoodCovering(f.clone());
    let packing = |l: &LinearCode| packing_pred.eval_linear(l);
    let covering = |l: &LinearCode| covering_pred.eval_linear(l);
    verify_theorem6_with(n, k, f, opts, &packing, &covering)
}

pub fn verify_theorem6_with(
    n: u32,
    k: u32,
    f: &GoodnessRule,
    opts: &VerifyOptions,
    packing: LinearPredicate<'_>,
    covering: LinearPredicate<'_>,
) -> Result<VerificationReport> {
    check_len(n)?;
    if k == 0 || k >= n {
        return Err(Error::Guard(format!(
            "need 1 <= k <= n-1, got k={k}, n={n}"
        )));
    }
    let right_tally =
        |sup: &LinearCode, subs: Vec<LinearCode>, seed: Option<u64>| -> Result<Tally> {
            let mut t = Tally {
                total: 1,
                ..Default::default()
            };
            if packing(sup)? {
                t.good = 1;
                for sub in subs {
                    t.pairs += 1;
                    let failed = linear_chain(&sub, sup, f, covering)?;
                    if !failed.is_empty() {
                        t.violations.push(Violation {
                            description: failed.join("; "),
                            witnesses: vec![(&sub).into(), sup.into()],
                            seed,
                        });
                    }
                }
            }
            Ok(t)
        };
    let left_tally = |l: &LinearCode| -> Result<Tally> {
        Ok(Tally {
            good: u64::from(covering(l)?),
            total: 1,
            ..Default::default()
        })
    };

    let (alpha, beta, pairs, mut violations) = match opts.mode {
        Mode::Exact => {
            check_budget(
                &(count_linear(n, k)? + count_linear(n, k + 1)?),
                opts.budget,
            )?;
            let a = tally_sum(
                enumerate_linear(n, k, opts.budget)?
                    .par_bridge()
                    .map(|l| left_tally(&l))
                    .collect::<Result<Vec<_>>>()?,
            );
            let b = tally_sum(
                enumerate_linear(n, k + 1, opts.budget)?
                    .par_bridge()
                    .map(|l| {
                        let subs = if k + 1 >= 2 {
                            l.immediate_subcodes()?
                        } else {
                            vec![]
                        };
                        right_tally(&l, subs, None)
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
            (
                FractionEstimate::exact(a.good, a.total),
                FractionEstimate::exact(b.good, b.total),
                b.pairs,
                b.violations,
            )
        }
        Mode::MonteCarlo => {
            let seed_b = opts.seed.wrapping_add(1);
            let a = tally_sum(
                (0..opts.samples)
                    .into_par_iter()
                    .map(|i| {
                        left_tally(&sample_linear_uniform(n, k, &mut sample_rng(opts.seed, i))?)
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
            let b = tally_sum(
                (0..opts.samples)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = sample_rng(seed_b, i);
                        let sup = sample_linear_uniform(n, k + 1, &mut rng)?;
                        let subs = sup.immediate_subcodes()?;
                        let pick = rng.gen_range(0..subs.len());
                        right_tally(&sup, vec![subs[pick].clone()], Some(seed_b))
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
            (
                FractionEstimate::monte_carlo(a.good, a.total, opts.seed),
                FractionEstimate::monte_carlo(b.good, b.total, seed_b),
                b.pairs,
                b.violations,
            )
        }
    };

    let mut report = VerificationReport::new("theorem6", &opts.mode.to_string())
        .param("n", n)
        .param("k", k)
        .param("f", f.to_string());
    if opts.mode == Mode::MonteCarlo {
        report = report
            .param("samples", opts.samples)
            .param("seed", opts.seed);
    }
    report.checked = alpha.samples + beta.samples + pairs;
    violations.extend(duality_check(&alpha, &beta));
    report.violations = violations;
    fill_alpha_beta(&mut report, &alpha, &beta, pairs);
    Ok(report.finish())
}

/// Distinct M-subcodes of a set of (M+1)-codes; exposed for cross-checks.
pub fn subcodes_of(codes: &[Code]) -> HashSet<Code> {
    codes
        .iter()
        .flat_map(|c| c.words().filter_map(move |w| c.without_word(&w).ok()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::LinearCode;

    fn code(words: &[&str]) -> Code {
        Code::parse_words(words[0].len() as u32, words.iter().copied()).unwrap()
    }

    fn rule(s: &str) -> GoodnessRule {
        s.parse().unwrap()
    }

    fn exact() -> VerifyOptions {
        VerifyOptions::default()
    }

    #[test]
    fn supercode_lemma_examples() {
        let r = check_supercode_lemma(&code(&["000"]), &code(&["000", "111"])).unwrap();
        assert!(r.passed());
        assert_eq!(r.quantities["covering_radius_sub"], 3);
        assert_eq!(r.quantities["min_distance_super"], 3);

        let hamming = LinearCode::hamming_7_4().codewords().unwrap();
        let nonzero = hamming.words().find(|w| w.bits() != 0).unwrap();
        let sub = hamming.without_word(&nonzero).unwrap();
        let r = check_supercode_lemma(&sub, &hamming).unwrap();
        assert!(r.passed());
        assert!(r.quantities["covering_radius_sub"].as_u64().unwrap() >= 3);

        assert!(check_supercode_lemma(&code(&["000", "111"]), &code(&["000", "111"])).is_err());
        assert!(check_supercode_lemma(&code(&["001"]), &code(&["000", "111"])).is_err());
    }

    #[test]
    fn supercode_sweep_small() {
        let r = supercode_lemma_sweep(8, 1000, 17).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 1000);
    }

    #[test]
    fn lemma3_identity_example() {
        let (a, b) = edge_identity(3, 3).unwrap();
        assert_eq!(a, BigUint::from(280u32));
        assert_eq!(b, BigUint::from(280u32));
        let all = |_: &Code| Ok(true);
        let r = verify_lemma3(3, 3, &all, DEFAULT_ENUM_BUDGET).unwrap();
        assert!(r.passed());
        assert_eq!(r.quantities["edges_G"], "280");
        assert_eq!(r.quantities["fraction_S"], "56/56");
        assert_eq!(r.quantities["fraction_S_prime"], "70/70");
    }

    #[test]
    fn lemma3_packing_selector() {
        let f = rule("const:1");
        let sel = |c: &Code| is_good_packing(c, &f);
        let r = verify_lemma3(4, 4, &sel, DEFAULT_ENUM_BUDGET).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn lemma4_examples() {
        let all = |_: &LinearCode| Ok(true);
        let r = verify_lemma4(3, 1, &all, DEFAULT_ENUM_BUDGET).unwrap();
        assert!(r.passed());
        assert_eq!(r.quantities["edges_G"], 21);
        assert_eq!(r.quantities["fraction_S"], "7/7");
        let f = rule("const:1");
        let pred = Predicate::GoodPacking(f);
        let sel = |l: &LinearCode| pred.eval_linear(l);
        assert!(verify_lemma4(4, 2, &sel, DEFAULT_ENUM_BUDGET)
            .unwrap()
            .passed());
        assert!(verify_lemma4(4, 4, &all, DEFAULT_ENUM_BUDGET).is_err());
    }

    #[test]
    fn theorem1_examples() {
        let rep = code(&["000", "111"]);
        for f in ["const:1", "const:0", "lin:1", "sq", "ln2n", "const:100"] {
            assert!(verify_theorem1(&rep, &rule(f)).unwrap().passed(), "{f}");
        }
        let r = verify_theorem1(&rep, &rule("const:1")).unwrap();
        assert_eq!(r.quantities["good_packing"], true);
        assert_eq!(r.quantities["good_covering"], true);
        assert!(matches!(
            verify_theorem1(&code(&["0000", "0011"]), &rule("const:1")),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn theorem5_exact_small() {
        let r = verify_theorem5(3, 3, &rule("const:1"), &exact()).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        let zero = verify_theorem5(4, 4, &rule("const:0"), &exact()).unwrap();
        assert!(zero.passed());
        assert_eq!(zero.quantities["alpha"], "0/1820");
        assert_eq!(zero.quantities["beta"], "4368/4368");
        let high = verify_theorem5(4, 4, &rule("const:1000"), &exact()).unwrap();
        assert!(high.passed());
        assert_eq!(high.quantities["beta"], "0/4368");
    }

    #[test]
    fn theorem5_guards() {
        let f = rule("const:1");
        assert!(matches!(
            verify_theorem5(4, 3, &f, &exact()),
            Err(Error::Guard(_))
        ));
        assert!(matches!(
            verify_theorem5(4, 16, &f, &exact()),
            Err(Error::Guard(_))
        ));
        let tight = VerifyOptions {
            budget: 100,
            ..exact()
        };
        assert!(matches!(
            verify_theorem5(4, 4, &f, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn theorem5_mutation_is_caught() {
        let f = rule("const:1");
        let packing = |c: &Code| is_good_packing(c, &f);
        let inverted = |c: &Code| is_good_covering(c, &f).map(|b| !b);
        let r = verify_theorem5_with(4, 4, &f, &exact(), &packing, &inverted).unwrap();
        assert!(!r.passed());
        assert!(r
            .violations
            .iter()
            .any(|v| v.description.contains("exceeds 1")));
        let chain = r
            .violations
            .iter()
            .find(|v| v.witnesses.len() == 2)
            .unwrap();
        assert!(chain.description.contains("good covering"));
    }

    #[test]
    fn theorem5_monte_carlo_advisory() {
        let opts = VerifyOptions {
            mode: Mode::MonteCarlo,
            samples: 2000,
            seed: 5,
            ..exact()
        };
        let r = verify_theorem5(6, 12, &rule("const:1"), &opts).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.quantities["advisory"], true);
    }

    #[test]
    fn theorem6_examples() {
        let zero = verify_theorem6(5, 2, &rule("const:0"), &exact()).unwrap();
        assert!(zero.passed());
        assert_eq!(zero.quantities["alpha"], "0/155");
        assert_eq!(zero.quantities["beta"], "155/155");
        assert!(verify_theorem6(4, 2, &rule("lin:1/2"), &exact())
            .unwrap()
            .passed());
        assert!(verify_theorem6(5, 5, &rule("const:1"), &exact()).is_err());

        let f = rule("const:1");
        let f2 = f.scaled(BigRational::from_integer(2.into())).unwrap();
        let pack = Predicate::GoodPacking(f2);
        let cover = Predicate::GoodCovering(f.clone());
        let packing = |l: &LinearCode| pack.eval_linear(l);
        let inverted = |l: &LinearCode| cover.eval_linear(l).map(|b| !b);
        let r = verify_theorem6_with(5, 1, &f, &exact(), &packing, &inverted).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn shrinking_keeps_violation() {
        let c = Code::from_bits(5, (0..20).collect()).unwrap();
        let small = shrink_code(&c, |s| s.size() >= 3);
        assert_eq!(small.size(), 3);
    }

    #[test]
    fn report_json_shape() {
        let r = verify_theorem5(3, 3, &rule("const:1"), &exact()).unwrap();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in [
            "claim",
            "params",
            "mode",
            "checked",
            "violations",
            "quantities",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["quantities"]["alpha"].as_str().unwrap().contains('/'));
    }
}
