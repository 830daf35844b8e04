//! Points of the Hamming space F_2^n and the arithmetic of Hamming balls.
//!
//! A [`Word`] stores its coordinates packed into a `u32`. The text form is the
//! binary numeral of that value padded to `n` characters, so the leftmost
//! character (coordinate 0) is the most significant bit. Numeric order and
//! lexicographic order of the text form therefore coincide.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported code length. Exhaustive passes touch all 2^n words.
pub const MAX_LEN: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    n: u32,
    bits: u32,
}

pub(crate) fn check_len(n: u32) -> Result<()> {
    if n == 0 || n > MAX_LEN {
        return Err(Error::Domain(format!("length n={n} outside 1..={MAX_LEN}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn space_size(n: u32) -> u64 {
    1u64 << n
}

#[allow(clippy::len_without_is_empty)]
impl Word {
    pub fn new(n: u32, bits: u32) -> Result<Self> {
        check_len(n)?;
        if u64::from(bits) >= space_size(n) {
            return Err(Error::Domain(format!(
                "value {bits} does not fit in {n} bits"
            )));
        }
        Ok(Word { n, bits })
    }

    pub fn zero(n: u32) -> Result<Self> {
        Word::new(n, 0)
    }

    pub(crate) fn from_raw(n: u32, bits: u32) -> Self {
        debug_assert!((1..=MAX_LEN).contains(&n) && u64::from(bits) < space_size(n));
        Word { n, bits }
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Value of coordinate `i` (0 = leftmost character of the text form).
    pub fn coordinate(&self, i: u32) -> bool {
        assert!(i < self.n, "coordinate {i} out of range for n={}", self.n);
        (self.bits >> (self.n - 1 - i)) & 1 == 1
    }

    /// Coordinate-wise sum over GF(2).
    pub fn xor(&self, other: &Word) -> Result<Word> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n, other.n));
        }
        Ok(Word::from_raw(self.n, self.bits ^ other.bits))
    }

    /// Parse the text form of a word of known length.
    pub fn parse_with_len(s: &str, n: u32) -> Result<Self> {
        let w: Word = s.parse()?;
        if w.n != n {
            return Err(Error::LengthMismatch(w.n, n));
        }
        Ok(w)
    }
}

pub(crate) fn format_bits(n: u32, bits: u32) -> String {
    format!("{:0width$b}", bits, width = n as usize)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bits(self.n, self.bits))
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = s.len() as u32;
        check_len(n).map_err(|e| Error::parse(format!("word {s:?}"), e.to_string()))?;
        let mut bits = 0u32;
        for (i, ch) in s.chars().enumerate() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                other => {
                    return Err(Error::parse(
                        format!("word {s:?}, column {}", i + 1),
                        format!("unexpected character {other:?}"),
                    ))
                }
            }
        }
        Ok(Word { n, bits })
    }
}

pub fn hamming_distance(x: &Word, y: &Word) -> Result<u32> {
    if x.n != y.n {
        return Err(Error::LengthMismatch(x.n, y.n));
    }
    Ok((x.bits ^ y.bits).count_ones())
}

pub fn weight(x: &Word) -> u32 {
    x.bits.count_ones()
}

/// Binomial coefficient for arguments small enough that the result fits in a `u64`.
pub(crate) fn binomial_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    u64::try_from(acc).expect("binomial overflow")
}

/// The volume V(n, r) of a Hamming ball, i.e. the sum of C(n, i) for i <= r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallVolume {
    pub n: u32,
    pub r: u32,
    pub value: u64,
}

pub fn ball_volume(n: u32, r: u32) -> Result<BallVolume> {
    check_len(n)?;
    if r > n {
        return Err(Error::Domain(format!("radius {r} exceeds length {n}")));
    }
    let value = (0..=u64::from(r))
        .map(|i| binomial_u64(u64::from(n), i))
        .sum();
    Ok(BallVolume { n, r, value })
}

/// All 2^n words in ascending numeric order.
pub fn enumerate_space(n: u32) -> Result<impl Iterator<Item = Word> + Clone> {
    check_len(n)?;
    Ok((0..space_size(n)).map(move |b| Word::from_raw(n, b as u32)))
}

/// Calls `visit` on every word within distance `r` of `center` (center included).
pub(crate) fn for_each_in_ball(n: u32, center: u32, r: u32, mut visit: impl FnMut(u32)) {
    fn rec(n: u32, start: u32, left: u32, cur: u32, visit: &mut impl FnMut(u32)) {
        visit(cur);
        if left == 0 {
            return;
        }
        for i in start..n {
            rec(n, i + 1, left - 1, cur ^ (1 << i), visit);
        }
    }
    rec(n, 0, r.min(n), center, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&w("000"), &w("000")).unwrap(), 0);
        assert_eq!(hamming_distance(&w("000"), &w("111")).unwrap(), 3);
        assert_eq!(hamming_distance(&w("0110101"), &w("1010110")).unwrap(), 4);
        assert_eq!(
            hamming_distance(&w("01"), &w("011")),
            Err(Error::LengthMismatch(2, 3))
        );
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(&w("0000")), 0);
        assert_eq!(weight(&w("1111")), 4);
        assert_eq!(weight(&w("1010010")), 3);
        let x = w("1010010");
        assert_eq!(
            weight(&x),
            hamming_distance(&x, &Word::zero(7).unwrap()).unwrap()
        );
    }

    #[test]
    fn ball_volume_examples() {
        assert_eq!(ball_volume(5, 0).unwrap().value, 1);
        assert_eq!(ball_volume(7, 1).unwrap().value, 8);
        assert_eq!(ball_volume(7, 3).unwrap().value, 64);
        assert_eq!(ball_volume(30, 30).unwrap().value, 1 << 30);
        assert!(matches!(ball_volume(4, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn ball_volume_matches_brute_force_count() {
        for n in 1..=10u32 {
            for r in 0..=n {
                let v = ball_volume(n, r).unwrap().value;
                for center in [0u32, 1, (1 << n) - 1, 0x2a & ((1 << n) - 1)] {
                    let count = (0..1u32 << n)
                        .filter(|y| (y ^ center).count_ones() <= r)
                        .count() as u64;
                    assert_eq!(count, v, "n={n} r={r}");
                    let mut seen = 0u64;
                    for_each_in_ball(n, center, r, |_| seen += 1);
                    assert_eq!(seen, v);
                }
            }
        }
    }

    #[test]
    fn enumerate_space_order() {
        let words: Vec<String> = enumerate_space(1).unwrap().map(|w| w.to_string()).collect();
        assert_eq!(words, ["0", "1"]);
        let words: Vec<String> = enumerate_space(2).unwrap().map(|w| w.to_string()).collect();
        assert_eq!(words, ["00", "01", "10", "11"]);
        assert_eq!(enumerate_space(3).unwrap().count(), 8);
        assert!(enumerate_space(0).is_err());
        assert!(enumerate_space(31).is_err());
    }

    #[test]
    fn text_form() {
        let x = w("100");
        assert!(x.coordinate(0));
        assert!(!x.coordinate(2));
        assert_eq!(x.bits(), 4);
        assert!("10a".parse::<Word>().is_err());
        assert!("".parse::<Word>().is_err());
        assert!(Word::new(3, 8).is_err());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn triple() -> impl Strategy<Value = (u32, u32, u32, u32)> {
        (1u32..=MAX_LEN).prop_flat_map(|n| {
            let hi = if n == 32 {
                u32::MAX
            } else {
                ((1u64 << n) - 1) as u32
            };
            (Just(n), 0..=hi, 0..=hi, 0..=hi)
        })
    }

    proptest! {
        #[test]
        fn triangle_inequality((n, a, b, c) in triple()) {
            let (x, y, z) = (Word::new(n, a).unwrap(), Word::new(n, b).unwrap(), Word::new(n, c).unwrap());
            let dxz = hamming_distance(&x, &z).unwrap();
            prop_assert!(dxz <= hamming_distance(&x, &y).unwrap() + hamming_distance(&y, &z).unwrap());
            prop_assert!(dxz <= n);
            prop_assert_eq!(dxz, hamming_distance(&z, &x).unwrap());
        }

        #[test]
        fn translation_invariance((n, a, b, t) in triple()) {
            let (x, y, t) = (Word::new(n, a).unwrap(), Word::new(n, b).unwrap(), Word::new(n, t).unwrap());
            prop_assert_eq!(
                hamming_distance(&x.xor(&t).unwrap(), &y.xor(&t).unwrap()).unwrap(),
                hamming_distance(&x, &y).unwrap()
            );
        }

        #[test]
        fn text_round_trip((n, a, _b, _c) in triple()) {
            let x = Word::new(n, a).unwrap();
            prop_assert_eq!(x.to_string().parse::<Word>().unwrap(), x);
        }
    }
}
