//! Existence-bound witnesses: greedy maximal packings and random covering codes.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ensembles::{sample_code_uniform, sample_rng};
use crate::error::{Error, Result};
use crate::linear::{sample_linear_uniform, LinearCode};
use crate::metrics::{covering_radius, is_maximal, min_distance, r_density, Code, Density};
use crate::rule::{GoodnessRule, LN2_FLOOR_Q64};
use crate::word::{ball_volume, check_len, for_each_in_ball, space_size};

/// Largest length the greedy scan accepts.
pub const GREEDY_MAX_LEN: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyOrder {
    Lexicographic,
    RandomPermutation(u64),
}

impl GreedyOrder {
    pub fn seed(&self) -> Option<u64> {
        match self {
            GreedyOrder::Lexicographic => None,
            GreedyOrder::RandomPermutation(s) => Some(*s),
        }
    }

    fn sequence(&self, n: u32) -> Vec<u32> {
        let mut all: Vec<u32> = (0..space_size(n) as u32).collect();
        if let GreedyOrder::RandomPermutation(seed) = self {
            all.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
        }
        all
    }
}

impl fmt::Display for GreedyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GreedyOrder::Lexicographic => f.write_str("lexicographic"),
            GreedyOrder::RandomPermutation(s) => write!(f, "random-permutation:{s}"),
        }
    }
}

/// Metadata stored next to a constructed code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub targets: Value,
    pub achieved: Value,
}

#[derive(Debug, Clone)]
pub struct GreedyResult {
    pub code: Code,
    pub min_distance: u32,
    pub covering_radius: u32,
    /// φ_(d−1) at the target distance d.
    pub phi: Density,
    pub provenance: Provenance,
}

impl GreedyResult {
    /// φ_(d−1)/n as a float; reported as data only.
    pub fn phi_over_n(&self) -> f64 {
        self.phi.to_f64() / f64::from(self.code.len())
    }
}

/// Exact minimum distance of a code known to have distance at least `lower`.
fn min_distance_at_least(code: &Code, member: &[u64], lower: u32) -> Result<u32> {
    if code.size() <= 4096 {
        return min_distance(code);
    }
    let n = code.len();
    let hit = code.bits().par_iter().any(|&c| {
        let mut found = false;
        for_each_in_ball(n, c, lower, |y| {
            found |= y != c && member[(y >> 6) as usize] >> (y & 63) & 1 == 1;
        });
        found
    });
    if hit {
        Ok(lower)
    } else {
        min_distance(code)
    }
}

/// Scans F_2^n in `order`, adjoining each word at distance ≥ d from all words
/// taken so far. The result is checked for distance ≥ d, maximality and φ_(d−1) ≥ 1.
pub fn greedy_maximal(n: u32, d: u32, order: GreedyOrder) -> Result<GreedyResult> {
    check_len(n)?;
    if n > GREEDY_MAX_LEN {
        return Err(Error::Guard(format!(
            "greedy scan supports n <= {GREEDY_MAX_LEN}, got {n}"
        )));
    }
    if d == 0 || d > n {
        return Err(Error::Domain(format!("need 1 <= d <= n, got d={d}, n={n}")));
    }
    let total = space_size(n);
    let blocks = total.div_ceil(64) as usize;
    let mut blocked = vec![0u64; blocks];
    let mut member = vec![0u64; blocks];
    let mut words = Vec::new();
    for x in order.sequence(n) {
        if blocked[(x >> 6) as usize] >> (x & 63) & 1 == 1 {
            continue;
        }
        words.push(x);
        member[(x >> 6) as usize] |= 1 << (x & 63);
        for_each_in_ball(n, x, d - 1, |y| blocked[(y >> 6) as usize] |= 1 << (y & 63));
    }
    let code = Code::from_bits(n, words)?;
    let achieved = min_distance_at_least(&code, &member, d)?;
    let radius = covering_radius(&code);
    let phi = r_density(&code, d - 1)?;
    if achieved < d || radius >= d.max(achieved) || phi < Density::new(1, n, n)? {
        return Err(Error::Guard(format!(
            "greedy output failed its checks: d={achieved}, R={radius}, φ={phi}"
        )));
    }
    debug_assert!(is_maximal(&code).unwrap_or(false));
    let provenance = Provenance {
        method: "gv".into(),
        order: Some(order.to_string()),
        seed: order.seed(),
        targets: json!({ "d": d }),
        achieved: json!({
            "d": achieved,
            "R": radius,
            "phi": phi.to_string(),
            "phi_over_n": phi.to_f64() / f64::from(n),
        }),
    };
    Ok(GreedyResult {
        code,
        min_distance: achieved,
        covering_radius: radius,
        phi,
        provenance,
    })
}

/// ⌈(ln 2)·n·2^n / V(n,R)⌉ using the upper end of the ln 2 enclosure, capped at 2^n.
pub fn covering_target_size(n: u32, r: u32) -> Result<u64> {
    check_len(n)?;
    let v = ball_volume(n, r)?.value;
    let num = BigUint::from(LN2_FLOOR_Q64 + 1) * BigUint::from(n) * BigUint::from(space_size(n));
    let den = BigUint::from(v) << 64usize;
    let m = Integer::div_ceil(&num, &den);
    Ok(u64::try_from(m).unwrap_or(u64::MAX).clamp(1, space_size(n)))
}

/// Least k with 2^k·V(n,R) ≥ n·2^n, capped at n.
pub fn covering_target_dim(n: u32, r: u32) -> Result<u32> {
    check_len(n)?;
    let v = u128::from(ball_volume(n, r)?.value);
    let goal = u128::from(n) * u128::from(space_size(n));
    Ok((0..=n).find(|&k| (v << k) >= goal).unwrap_or(n))
}

#[derive(Debug, Clone)]
pub struct CoverOutcome {
    pub n: u32,
    pub target_radius: u32,
    pub linear: bool,
    /// Size M (nonlinear) or dimension k (linear) of every trial code.
    pub size_param: u64,
    pub trials_budget: u64,
    /// Index of the first successful trial.
    pub trial: Option<u64>,
    pub code: Option<Code>,
    pub generator: Option<LinearCode>,
    pub covering_radius: Option<u32>,
    pub phi: Option<Density>,
    /// Whether φ_R ≤ (ln 2)·n (nonlinear) or φ_R ≤ n² (linear).
    pub bound_met: Option<bool>,
    pub provenance: Provenance,
}

impl CoverOutcome {
    pub fn succeeded(&self) -> bool {
        self.code.is_some()
    }
}

/// Draws random codes of the target size until one has covering radius ≤ R.
/// Trial `i` uses RNG stream `i` of `seed`; the lowest successful index wins.
pub fn random_covering_search(
    n: u32,
    r: u32,
    budget: u64,
    seed: u64,
    linear: bool,
) -> Result<CoverOutcome> {
    check_len(n)?;
    if 2 * r > n {
        return Err(Error::Guard(format!("need R <= n/2, got R={r}, n={n}")));
    }
    let size_param = if linear {
        u64::from(covering_target_dim(n, r)?)
    } else {
        covering_target_size(n, r)?
    };
    let found = (0..budget)
        .into_par_iter()
        .map(|i| -> Result<Option<(u64, Code, Option<LinearCode>)>> {
            let mut rng = sample_rng(seed, i);
            if linear {
                let l = sample_linear_uniform(n, size_param as u32, &mut rng)?;
                if l.covering_radius()? <= r {
                    return Ok(Some((i, l.codewords()?, Some(l))));
                }
            } else {
                let c = sample_code_uniform(n, size_param, &mut rng)?;
                if covering_radius(&c) <= r {
                    return Ok(Some((i, c, None)));
                }
            }
            Ok(None)
        })
        .find_map_first(|res| match res {
            Ok(None) => None,
            other => Some(other),
        })
        .transpose()?
        .flatten();

    let bound = if linear {
        GoodnessRule::square()
    } else {
        GoodnessRule::ln2_linear()
    };
    let mut out = CoverOutcome {
        n,
        target_radius: r,
        linear,
        size_param,
        trials_budget: budget,
        trial: None,
        code: None,
        generator: None,
        covering_radius: None,
        phi: None,
        bound_met: None,
        provenance: Provenance {
            method: if linear { "cover-linear" } else { "cover" }.into(),
            order: None,
            seed: Some(seed),
            targets: json!({
                "R": r,
                if linear { "k" } else { "M" }: size_param,
                "bound": bound.to_string(),
                "budget": budget,
                "r_below_half_n": 2 * r < n,
            }),
            achieved: Value::Null,
        },
    };
    if let Some((i, code, generator)) = found {
        let radius = covering_radius(&code);
        let phi = r_density(&code, radius)?;
        let met = bound.check_le(n, &phi.to_rational())?;
        out.provenance.achieved = json!({
            "R": radius,
            "phi": phi.to_string(),
            "bound_met": met,
            "trial": i,
            "d": min_distance(&code).ok(),
        });
        out.trial = Some(i);
        out.code = Some(code);
        out.generator = generator;
        out.covering_radius = Some(radius);
        out.phi = Some(phi);
        out.bound_met = Some(met);
    }
    Ok(out)
}
