//! Minimum distance, covering radius and r-densities of arbitrary binary codes.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::rule::{format_rational, GoodnessRule};
use crate::word::{ball_volume, check_len, format_bits, space_size, Word};

/// A nonempty set of distinct words of a common length, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    n: u32,
    words: Vec<u32>,
}

#[allow(clippy::len_without_is_empty)]
impl Code {
    pub fn new<I: IntoIterator<Item = Word>>(n: u32, words: I) -> Result<Self> {
        let mut bits = Vec::new();
        for w in words {
            if w.len() != n {
                return Err(Error::LengthMismatch(w.len(), n));
            }
            bits.push(w.bits());
        }
        Code::from_bits(n, bits)
    }

    /// Builds a code from packed word values; duplicates are rejected.
    pub fn from_bits(n: u32, mut bits: Vec<u32>) -> Result<Self> {
        check_len(n)?;
        if bits.is_empty() {
            return Err(Error::Domain("a code needs at least one word".into()));
        }
        if let Some(&b) = bits.iter().find(|&&b| u64::from(b) >= space_size(n)) {
            return Err(Error::Domain(format!("value {b} does not fit in {n} bits")));
        }
        bits.sort_unstable();
        if let Some(w) = bits.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateWord(format_bits(n, w[0])));
        }
        Ok(Code { n, words: bits })
    }

    pub(crate) fn from_sorted_unchecked(n: u32, words: Vec<u32>) -> Self {
        debug_assert!(!words.is_empty() && words.windows(2).all(|w| w[0] < w[1]));
        Code { n, words }
    }

    pub fn parse_words<'a, I: IntoIterator<Item = &'a str>>(n: u32, words: I) -> Result<Self> {
        let words = words
            .into_iter()
            .map(|s| Word::parse_with_len(s, n))
            .collect::<Result<Vec<_>>>()?;
        Code::new(n, words)
    }

    pub fn full_space(n: u32) -> Result<Self> {
        check_len(n)?;
        Ok(Code {
            n,
            words: (0..space_size(n)).map(|b| b as u32).collect(),
        })
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn bits(&self) -> &[u32] {
        &self.words
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        self.words.iter().map(move |&b| Word::from_raw(self.n, b))
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.len() == self.n && self.words.binary_search(&w.bits()).is_ok()
    }

    /// C ∪ {x}; errors if x is already a codeword.
    pub fn with_word(&self, x: &Word) -> Result<Code> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch(x.len(), self.n));
        }
        match self.words.binary_search(&x.bits()) {
            Ok(_) => Err(Error::DuplicateWord(x.to_string())),
            Err(pos) => {
                let mut words = self.words.clone();
                words.insert(pos, x.bits());
                Ok(Code { n: self.n, words })
            }
        }
    }

    /// C \ {x}; errors if x is absent or it is the last word.
    pub fn without_word(&self, x: &Word) -> Result<Code> {
        let pos = self
            .words
            .binary_search(&x.bits())
            .map_err(|_| Error::Domain(format!("{x} is not a codeword")))?;
        if self.words.len() == 1 {
            return Err(Error::Domain("cannot remove the last codeword".into()));
        }
        let mut words = self.words.clone();
        words.remove(pos);
        Ok(Code { n: self.n, words })
    }

    pub fn is_subset_of(&self, other: &Code) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .all(|b| other.words.binary_search(b).is_ok())
    }

    pub fn is_proper_subset_of(&self, other: &Code) -> bool {
        self.words.len() < other.words.len() && self.is_subset_of(other)
    }

    /// Words as text, in ascending order.
    pub fn to_strings(&self) -> Vec<String> {
        self.words.iter().map(|&b| format_bits(self.n, b)).collect()
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_strings().join(", "))
    }
}

/// The exact r-density |C|·V(n,r) / 2^n.
#[derive(Debug, Clone, Copy)]
pub struct Density {
    numerator: u128,
    n: u32,
}

impl Density {
    pub fn new(size: u64, n: u32, r: u32) -> Result<Self> {
        let v = ball_volume(n, r)?.value;
        Ok(Density {
            numerator: u128::from(size) * u128::from(v),
            n,
        })
    }

    /// Unreduced numerator |C|·V(n,r).
    pub fn numerator(&self) -> u128 {
        self.numerator
    }

    /// Unreduced denominator 2^n.
    pub fn denominator(&self) -> u128 {
        1u128 << self.n
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator),
            BigInt::from(self.denominator()),
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator() as f64
    }

    /// Renders as "p/q (≈ decimal)".
    pub fn pretty(&self) -> String {
        format!("{} (≈ {:.6})", self, self.to_f64())
    }
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Density {}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> Ordering {
        // numerators are below 2^61 and denominators at most 2^30.
        (self.numerator << other.n).cmp(&(other.numerator << self.n))
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.to_rational()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeMetrics {
    pub min_distance: u32,
    pub covering_radius: u32,
    pub packing_radius: u32,
}

pub fn min_distance(c: &Code) -> Result<u32> {
    if c.words.len() < 2 {
        return Err(Error::DistanceUndefined(c.words.len()));
    }
    let w = &c.words;
    let mut best = u32::MAX;
    for i in 0..w.len() {
        for &y in &w[i + 1..] {
            best = best.min((w[i] ^ y).count_ones());
            if best == 1 {
                return Ok(1);
            }
        }
    }
    Ok(best)
}

const IN_WORD_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// ORs into `dst` every set of positions reachable from `src` by flipping one coordinate.
fn spread(src: &[u64], dst: &mut [u64], n: u32) {
    for i in 0..n.min(6) {
        let m = IN_WORD_MASKS[i as usize];
        let s = 1u32 << i;
        for (d, &w) in dst.iter_mut().zip(src) {
            *d |= ((w & m) << s) | ((w >> s) & m);
        }
    }
    for i in 6..n {
        let stride = 1usize << (i - 6);
        for (j, d) in dst.iter_mut().enumerate() {
            *d |= src[j ^ stride];
        }
    }
}

/// Covering radius by multi-source breadth-first layering over the hypercube.
///
/// Each layer is a bitset over F_2^n; the next layer is the union of the n
/// single-coordinate flips of the current one, minus everything already
/// reached. Cost is O(R·n·2^n / 64) word operations.
pub fn covering_radius(c: &Code) -> u32 {
    let n = c.n;
    let total = space_size(n);
    let blocks = total.div_ceil(64) as usize;
    let mut covered = vec![0u64; blocks];
    for &b in &c.words {
        covered[(b / 64) as usize] |= 1 << (b % 64);
    }
    let mut reached = c.words.len() as u64;
    let mut frontier = covered.clone();
    let mut next = vec![0u64; blocks];
    let mut radius = 0;
    while reached < total {
        radius += 1;
        next.iter_mut().for_each(|w| *w = 0);
        spread(&frontier, &mut next, n);
        for (nw, cw) in next.iter_mut().zip(covered.iter_mut()) {
            *nw &= !*cw;
            *cw |= *nw;
            reached += u64::from(nw.count_ones());
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    radius
}

/// Covering radius by the direct max-min scan; O(|C|·2^n).
pub fn covering_radius_naive(c: &Code) -> u32 {
    (0..space_size(c.n) as u32)
        .map(|x| {
            c.words
                .iter()
                .map(|&y| (x ^ y).count_ones())
                .min()
                .expect("nonempty code")
        })
        .max()
        .expect("nonempty space")
}

pub fn packing_radius(c: &Code) -> Result<u32> {
    Ok((min_distance(c)? - 1) / 2)
}

pub fn metrics(c: &Code) -> Result<CodeMetrics> {
    let d = min_distance(c)?;
    Ok(CodeMetrics {
        min_distance: d,
        covering_radius: covering_radius(c),
        packing_radius: (d - 1) / 2,
    })
}

pub fn r_density(c: &Code, r: u32) -> Result<Density> {
    Density::new(c.words.len() as u64, c.n, r)
}

/// φ_{d−1}(C), the density that decides good packings.
pub fn packing_density(c: &Code) -> Result<Density> {
    r_density(c, min_distance(c)? - 1)
}

/// φ_R(C), the density that decides good coverings.
pub fn covering_density(c: &Code) -> Density {
    r_density(c, covering_radius(c)).expect("covering radius never exceeds n")
}

/// A code is maximal iff R ≤ d − 1.
pub fn is_maximal(c: &Code) -> Result<bool> {
    Ok(covering_radius(c) < min_distance(c)?)
}

/// Maximality straight from the definition: no word outside C can be
/// adjoined without lowering the minimum distance.
pub fn is_maximal_by_adjunction(c: &Code) -> Result<bool> {
    let d = min_distance(c)?;
    let adjoinable = (0..space_size(c.n) as u32).any(|x| {
        c.words.binary_search(&x).is_err() && c.words.iter().all(|&y| (x ^ y).count_ones() >= d)
    });
    Ok(!adjoinable)
}

pub fn is_good_packing(c: &Code, f: &GoodnessRule) -> Result<bool> {
    f.check_ge(c.n, &packing_density(c)?.to_rational())
}

pub fn is_good_covering(c: &Code, f: &GoodnessRule) -> Result<bool> {
    f.check_le(c.n, &covering_density(c).to_rational())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereBoundReport {
    pub packing_radius: u32,
    pub covering_radius: u32,
    /// φ_t(C), must be at most 1.
    pub phi_t: Density,
    /// φ_R(C), must be at least 1.
    pub phi_r: Density,
    pub packing_ok: bool,
    pub covering_ok: bool,
}

impl SphereBoundReport {
    pub fn passed(&self) -> bool {
        self.packing_ok && self.covering_ok
    }
}

pub fn check_sphere_bounds(c: &Code) -> Result<SphereBoundReport> {
    let one = Density::new(1, 1, 1)?;
    let t = packing_radius(c)?;
    let r = covering_radius(c);
    let phi_t = r_density(c, t)?;
    let phi_r = r_density(c, r)?;
    Ok(SphereBoundReport {
        packing_radius: t,
        covering_radius: r,
        phi_t,
        phi_r,
        packing_ok: phi_t <= one,
        covering_ok: phi_r >= one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(words: &[&str]) -> Code {
        Code::parse_words(words[0].len() as u32, words.iter().copied()).unwrap()
    }

    pub(crate) fn hamming74() -> Code {
        let g = [0b1000110u32, 0b0100101, 0b0010011, 0b0001111];
        let words = (0..16u32)
            .map(|m| {
                (0..4)
                    .filter(|i| m >> i & 1 == 1)
                    .fold(0, |acc, i| acc ^ g[i])
            })
            .collect();
        Code::from_bits(7, words).unwrap()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn min_distance_examples() {
        assert_eq!(min_distance(&code(&["000", "111"])).unwrap(), 3);
        assert_eq!(min_distance(&Code::full_space(3).unwrap()).unwrap(), 1);
        assert_eq!(min_distance(&hamming74()).unwrap(), 3);
        assert_eq!(
            min_distance(&code(&["0101"])),
            Err(Error::DistanceUndefined(1))
        );
    }

    #[test]
    fn covering_radius_examples() {
        for n in [1, 3, 6, 7, 9] {
            let single = Code::from_bits(n, vec![0]).unwrap();
            assert_eq!(covering_radius(&single), n);
            assert_eq!(covering_radius(&Code::full_space(n).unwrap()), 0);
        }
        assert_eq!(covering_radius(&code(&["000", "111"])), 1);
        assert_eq!(covering_radius(&hamming74()), 1);
    }

    #[test]
    fn packing_radius_formula() {
        assert_eq!(packing_radius(&code(&["000", "111"])).unwrap(), 1);
        assert_eq!(packing_radius(&code(&["0000", "1111"])).unwrap(), 1);
        assert_eq!(packing_radius(&code(&["0000000", "1111111"])).unwrap(), 3);
    }

    #[test]
    fn density_examples() {
        let full = Code::full_space(5).unwrap();
        assert_eq!(r_density(&full, 0).unwrap().to_rational(), rat(1, 1));
        let rep = code(&["000", "111"]);
        assert_eq!(r_density(&rep, 1).unwrap().to_rational(), rat(1, 1));
        assert_eq!(r_density(&rep, 2).unwrap().to_rational(), rat(14, 8));
        assert_eq!(r_density(&hamming74(), 1).unwrap().to_rational(), rat(1, 1));
        assert_eq!(r_density(&rep, 3).unwrap().to_rational(), rat(2, 1));
        assert!(r_density(&rep, 4).is_err());
        let d = r_density(&rep, 2).unwrap();
        assert_eq!((d.numerator(), d.denominator()), (14, 8));
        assert_eq!(d.to_string(), "7/4");
    }

    #[test]
    fn density_monotone_in_radius() {
        let c = code(&["00000", "01101", "10110"]);
        for r in 0..5 {
            assert!(r_density(&c, r).unwrap() < r_density(&c, r + 1).unwrap());
        }
        assert_eq!(r_density(&c, 5).unwrap().to_rational(), rat(3, 1));
    }

    #[test]
    fn density_ordering_across_lengths() {
        let a = Density::new(2, 3, 1).unwrap(); // 1
        let b = Density::new(16, 7, 1).unwrap(); // 1
        assert_eq!(a, b);
        assert!(Density::new(1, 4, 1).unwrap() < a);
    }

    #[test]
    fn maximality_examples() {
        for words in [
            &["000", "111"][..],
            &["0000", "1111"],
            &["000000", "111111"],
            &["00", "11"],
        ] {
            let c = code(words);
            assert!(is_maximal(&c).unwrap());
            assert!(is_maximal_by_adjunction(&c).unwrap());
        }
        let c = code(&["0000", "0011"]);
        assert!(!is_maximal(&c).unwrap());
        assert!(!is_maximal_by_adjunction(&c).unwrap());
    }

    #[test]
    fn goodness_examples() {
        let rep = code(&["000", "111"]);
        let one = GoodnessRule::constant_int(1);
        let zero = GoodnessRule::constant_int(0);
        assert!(is_good_packing(&rep, &one).unwrap());
        assert!(is_good_packing(&rep, &zero).unwrap());
        assert!(is_good_packing(&Code::full_space(4).unwrap(), &one).unwrap());
        assert!(is_good_covering(&rep, &one).unwrap());
        let half = GoodnessRule::constant(rat(1, 2)).unwrap();
        let c = code(&["00000", "01101", "10110"]);
        assert!(!is_good_covering(&c, &half).unwrap());
        assert!(is_good_covering(&c, &GoodnessRule::constant_int(3)).unwrap());
        assert!(is_good_packing(&code(&["0"]), &one).is_err());
    }

    #[test]
    fn sphere_bounds() {
        let rep = check_sphere_bounds(&code(&["000", "111"])).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.phi_t.to_rational(), rat(1, 1));
        assert_eq!(rep.phi_r.to_rational(), rat(1, 1));
        let full = check_sphere_bounds(&Code::full_space(4).unwrap()).unwrap();
        assert!(full.passed());
        assert_eq!(full.phi_t.to_rational(), rat(1, 1));
    }

    #[test]
    fn code_construction_errors() {
        assert!(matches!(
            Code::parse_words(3, ["000", "000"]),
            Err(Error::DuplicateWord(_))
        ));
        assert!(Code::parse_words(3, ["000", "0000"]).is_err());
        assert!(Code::from_bits(3, vec![]).is_err());
        assert!(Code::from_bits(3, vec![8]).is_err());
    }

    #[test]
    fn adjoin_and_remove() {
        let c = code(&["000", "111"]);
        let x: Word = "011".parse().unwrap();
        let bigger = c.with_word(&x).unwrap();
        assert_eq!(bigger.size(), 3);
        assert!(c.is_proper_subset_of(&bigger));
        assert_eq!(bigger.without_word(&x).unwrap(), c);
        assert!(bigger.with_word(&x).is_err());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::collection::btree_set;
    use proptest::prelude::*;

    fn small_code() -> impl Strategy<Value = Code> {
        (1u32..=12).prop_flat_map(|n| {
            let max = 1u32 << n;
            let cap = (max as usize).min(40);
            btree_set(0..max, 1..=cap)
                .prop_map(move |s| Code::from_bits(n, s.into_iter().collect()).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn bfs_matches_naive_scan(c in small_code()) {
            prop_assert_eq!(covering_radius(&c), covering_radius_naive(&c));
        }

        #[test]
        fn sphere_bounds_hold(c in small_code()) {
            prop_assume!(c.size() >= 2);
            prop_assert!(check_sphere_bounds(&c).unwrap().passed());
        }

        #[test]
        fn maximality_definitions_agree(c in small_code()) {
            prop_assume!(c.size() >= 2 && c.len() <= 8);
            prop_assert_eq!(is_maximal(&c).unwrap(), is_maximal_by_adjunction(&c).unwrap());
        }

        #[test]
        fn adjunction_is_monotone(c in small_code(), x in any::<u32>()) {
            let x = x % (1u32 << c.len());
            let w = Word::new(c.len(), x).unwrap();
            prop_assume!(!c.contains(&w) && c.size() >= 2);
            let bigger = c.with_word(&w).unwrap();
            prop_assert!(covering_radius(&bigger) <= covering_radius(&c));
            prop_assert!(min_distance(&bigger).unwrap() <= min_distance(&c).unwrap());
        }

        #[test]
        fn density_at_full_radius_is_size(c in small_code()) {
            let phi = r_density(&c, c.len()).unwrap().to_rational();
            prop_assert_eq!(phi, BigRational::from_integer((c.size() as i64).into()));
        }
    }
}
