//! Goodness thresholds f(n) used by the good-packing / good-covering predicates.
//!
//! Text syntax: `const:<q>`, `lin:<q>` (q·n), `pow:<q>` (n^q), `sq` (n²),
//! `ln2n` ((ln 2)·n), optionally prefixed by a positive scale `<c>*`. Rationals
//! are written as integers, `p/q` fractions or finite decimals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// floor(ln 2 · 2^64). The enclosure of ln 2 is [LN2_FLOOR, LN2_FLOOR + 1] / 2^64.
pub const LN2_FLOOR_Q64: u64 = 0xB172_17F7_D1CF_79AB;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Constant(BigRational),
    Linear(BigRational),
    Power(BigRational),
    Square,
    Ln2Linear,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoodnessRule {
    kind: RuleKind,
    scale: BigRational,
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |msg: &str| Error::parse(format!("rational {s:?}"), msg.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad("bad numerator"))?;
        let q: BigInt = q.trim().parse().map_err(|_| bad("bad denominator"))?;
        if q.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return Err(bad("bad decimal fraction"));
        }
        let digits = format!(
            "{}{}",
            if int_digits.is_empty() {
                "0"
            } else {
                int_digits
            },
            frac
        );
        let mut p: BigInt = digits.parse().map_err(|_| bad("bad decimal"))?;
        if neg {
            p = -p;
        }
        let q = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(p, q));
    }
    let p: BigInt = s.parse().map_err(|_| bad("not a number"))?;
    Ok(BigRational::from_integer(p))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn ratio(n: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl GoodnessRule {
    pub fn new(kind: RuleKind) -> Result<Self> {
        match &kind {
            RuleKind::Constant(q) | RuleKind::Linear(q) if q.is_negative() => {
                return Err(Error::Domain(format!(
                    "coefficient {} must be nonnegative",
                    format_rational(q)
                )))
            }
            _ => {}
        }
        Ok(GoodnessRule {
            kind,
            scale: BigRational::one(),
        })
    }

    pub fn constant(q: BigRational) -> Result<Self> {
        Self::new(RuleKind::Constant(q))
    }

    pub fn constant_int(q: i64) -> Self {
        Self::constant(BigRational::from_integer(q.into())).expect("nonnegative constant")
    }

    pub fn linear(q: BigRational) -> Result<Self> {
        Self::new(RuleKind::Linear(q))
    }

    pub fn power(q: BigRational) -> Self {
        Self::new(RuleKind::Power(q)).expect("power rules are always valid")
    }

    pub fn square() -> Self {
        Self::new(RuleKind::Square).expect("valid")
    }

    pub fn ln2_linear() -> Self {
        Self::new(RuleKind::Ln2Linear).expect("valid")
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    /// The rule c·f(n) for a positive factor c.
    pub fn scaled(&self, factor: BigRational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        Ok(GoodnessRule {
            kind: self.kind.clone(),
            scale: &self.scale * factor,
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            RuleKind::Constant(_) => "const",
            RuleKind::Linear(_) => "lin",
            RuleKind::Power(_) => "pow",
            RuleKind::Square => "sq",
            RuleKind::Ln2Linear => "ln2n",
        }
    }

    /// The parameter column of the CSV schema: the coefficient or exponent,
    /// with any non-unit scale prefixed as `<c>*`.
    pub fn param_string(&self) -> String {
        let base = match &self.kind {
            RuleKind::Constant(q) | RuleKind::Linear(q) | RuleKind::Power(q) => format_rational(q),
            RuleKind::Square | RuleKind::Ln2Linear => String::new(),
        };
        if self.scale.is_one() {
            base
        } else {
            format!("{}*{}", format_rational(&self.scale), base)
        }
    }

    /// Exact value of f(n), when it is rational.
    pub fn exact_value(&self, n: u32) -> Option<BigRational> {
        let base = match &self.kind {
            RuleKind::Constant(q) => q.clone(),
            RuleKind::Linear(q) => q * ratio(n),
            RuleKind::Square => ratio(n) * ratio(n),
            RuleKind::Power(q) => {
                if q.is_integer() {
                    let e = q.to_integer().to_i32()?;
                    num_traits::Pow::pow(ratio(n), e)
                } else if n == 1 {
                    BigRational::one()
                } else {
                    return None;
                }
            }
            RuleKind::Ln2Linear => return None,
        };
        Some(base * &self.scale)
    }

    /// Rational enclosure [lo, hi] of (ln 2)·n·scale.
    pub fn ln2_enclosure(&self, n: u32) -> (BigRational, BigRational) {
        let den: BigInt = BigInt::one() << 64usize;
        let base = BigInt::from(LN2_FLOOR_Q64) * BigInt::from(n);
        let lo = BigRational::new(base.clone(), den.clone()) * &self.scale;
        let hi = BigRational::new(base + BigInt::from(n), den) * &self.scale;
        (lo, hi)
    }

    /// Orders `value` against f(n). `None` means the comparison could not be
    /// decided exactly (only possible for the `ln2n` rule, when `value` falls
    /// inside the enclosure).
    pub fn compare(&self, n: u32, value: &BigRational) -> Option<Ordering> {
        if let Some(f) = self.exact_value(n) {
            return Some(value.cmp(&f));
        }
        match &self.kind {
            RuleKind::Ln2Linear => {
                let (lo, hi) = self.ln2_enclosure(n);
                if value <= &lo {
                    Some(Ordering::Less)
                } else if value >= &hi {
                    Some(Ordering::Greater)
                } else {
                    None
                }
            }
            RuleKind::Power(q) => {
                // value vs scale·n^(p/s)  <=>  (value/scale)^s vs n^p, both sides >= 0.
                if value.is_negative() {
                    return Some(Ordering::Less);
                }
                let v = value / &self.scale;
                let s = q.denom().to_i32()?;
                let p = q.numer().to_i32()?;
                let lhs: BigRational = num_traits::Pow::pow(v, s);
                let rhs: BigRational = num_traits::Pow::pow(ratio(n), p);
                Some(lhs.cmp(&rhs))
            }
            _ => unreachable!("rational kinds handled above"),
        }
    }

    pub fn check_le(&self, n: u32, value: &BigRational) -> Result<bool> {
        self.compare(n, value)
            .map(|o| o != Ordering::Greater)
            .ok_or_else(|| self.indeterminate(n))
    }

    pub fn check_ge(&self, n: u32, value: &BigRational) -> Result<bool> {
        self.compare(n, value)
            .map(|o| o != Ordering::Less)
            .ok_or_else(|| self.indeterminate(n))
    }

    fn indeterminate(&self, n: u32) -> Error {
        Error::Indeterminate {
            rule: self.to_string(),
            n,
        }
    }

    /// Floating-point value of f(n), for display only.
    pub fn approx(&self, n: u32) -> f64 {
        let scale = self.scale.to_f64().unwrap_or(f64::NAN);
        let n = f64::from(n);
        let base = match &self.kind {
            RuleKind::Constant(q) => q.to_f64().unwrap_or(f64::NAN),
            RuleKind::Linear(q) => q.to_f64().unwrap_or(f64::NAN) * n,
            RuleKind::Power(q) => n.powf(q.to_f64().unwrap_or(f64::NAN)),
            RuleKind::Square => n * n,
            RuleKind::Ln2Linear => std::f64::consts::LN_2 * n,
        };
        base * scale
    }
}

impl fmt::Display for GoodnessRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.scale.is_one() {
            write!(f, "{}*", format_rational(&self.scale))?;
        }
        match &self.kind {
            RuleKind::Constant(q) => write!(f, "const:{}", format_rational(q)),
            RuleKind::Linear(q) => write!(f, "lin:{}", format_rational(q)),
            RuleKind::Power(q) => write!(f, "pow:{}", format_rational(q)),
            RuleKind::Square => f.write_str("sq"),
            RuleKind::Ln2Linear => f.write_str("ln2n"),
        }
    }
}

impl FromStr for GoodnessRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (scale, body) = match s.split_once('*') {
            Some((c, body)) => (Some(parse_rational(c)?), body.trim()),
            None => (None, s),
        };
        let rule = match body.split_once(':') {
            Some(("const", q)) => GoodnessRule::constant(parse_rational(q)?)?,
            Some(("lin", q)) => GoodnessRule::linear(parse_rational(q)?)?,
            Some(("pow", q)) => GoodnessRule::power(parse_rational(q)?),
            None if body == "sq" => GoodnessRule::square(),
            None if body == "ln2n" => GoodnessRule::ln2_linear(),
            _ => {
                return Err(Error::parse(
                    format!("rule {s:?}"),
                    "expected const:<q>, lin:<q>, pow:<q>, sq or ln2n",
                ))
            }
        };
        match scale {
            Some(c) => rule.scaled(c),
            None => Ok(rule),
        }
    }
}
