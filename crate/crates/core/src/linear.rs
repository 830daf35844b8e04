//! GF(2) row reduction and the ensemble L(n, k) of binary linear codes.
//!
//! Matrices are stored row-wise as packed `u32` values using the word
//! convention (column 0 is the most significant of the n bits). A linear code
//! is identified by the reduced row-echelon form of any generator matrix, so
//! two [`LinearCode`]s are equal exactly when they span the same subspace.

use std::collections::VecDeque;
use std::fmt;

use itertools::{Combinations, Itertools};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::error::{Error, Result};
use crate::metrics::{Code, Density};
use crate::word::{check_len, format_bits, space_size};

/// Largest dimension whose codewords may be listed.
pub const MAX_CODEWORD_DIM: u32 = 26;
/// Largest redundancy n − k for the syndrome table.
pub const MAX_SYNDROME_BITS: u32 = 26;
/// Default cap on the number of objects an exhaustive pass may visit.
pub const DEFAULT_ENUM_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    pub cols: u32,
    pub rows: Vec<u32>,
}

#[inline]
fn col_bit(n: u32, col: u32) -> u32 {
    1 << (n - 1 - col)
}

#[inline]
fn leading_col(n: u32, row: u32) -> u32 {
    debug_assert!(row != 0);
    row.leading_zeros() - (32 - n)
}

/// Reduced row-echelon form over GF(2). Zero rows are moved to the bottom;
/// the rank is the number of nonzero rows.
pub fn rref(m: &BitMatrix) -> (BitMatrix, usize) {
    let n = m.cols;
    let mut rows = m.rows.clone();
    let mut rank = 0;
    for col in 0..n {
        let bit = col_bit(n, col);
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && *r & bit != 0 {
                *r ^= p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    (BitMatrix { cols: n, rows }, rank)
}

pub fn rank(n: u32, rows: &[u32]) -> usize {
    rref(&BitMatrix {
        cols: n,
        rows: rows.to_vec(),
    })
    .1
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearCode {
    n: u32,
    rows: Vec<u32>,
}

#[allow(clippy::len_without_is_empty)]
impl LinearCode {
    /// Canonicalizes a full-rank generator matrix.
    pub fn from_generator(n: u32, rows: Vec<u32>) -> Result<Self> {
        check_len(n)?;
        if rows.is_empty() {
            return Err(Error::Domain("dimension k must be at least 1".into()));
        }
        if let Some(&r) = rows.iter().find(|&&r| u64::from(r) >= space_size(n)) {
            return Err(Error::Domain(format!("row {r} does not fit in {n} bits")));
        }
        let k = rows.len();
        let (m, rank) = rref(&BitMatrix { cols: n, rows });
        if rank < k {
            return Err(Error::Domain(format!(
                "generator rows are dependent: rank {rank} < {k}"
            )));
        }
        Ok(LinearCode { n, rows: m.rows })
    }

    pub(crate) fn from_rref_unchecked(n: u32, rows: Vec<u32>) -> Self {
        LinearCode { n, rows }
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> u32 {
        self.rows.len() as u32
    }

    /// Generator rows in reduced row-echelon form.
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn row_strings(&self) -> Vec<String> {
        self.rows.iter().map(|&r| format_bits(self.n, r)).collect()
    }

    fn pivot_mask(&self) -> u32 {
        self.rows
            .iter()
            .map(|&r| col_bit(self.n, leading_col(self.n, r)))
            .fold(0, |a, b| a | b)
    }

    /// Reduces x modulo the code; the result is zero on every pivot column and
    /// is the same for all members of a coset.
    pub fn reduce(&self, mut x: u32) -> u32 {
        for &r in &self.rows {
            let p = col_bit(self.n, leading_col(self.n, r));
            if x & p != 0 {
                x ^= r;
            }
        }
        x
    }

    pub fn contains_bits(&self, x: u32) -> bool {
        self.reduce(x) == 0
    }

    pub fn is_subcode_of(&self, other: &LinearCode) -> bool {
        self.n == other.n && self.rows.iter().all(|&r| other.contains_bits(r))
    }

    /// Visits every codeword (Gray-code order, starting at zero).
    pub fn for_each_codeword(&self, mut visit: impl FnMut(u32)) {
        let mut cur = 0u32;
        visit(cur);
        for i in 1u64..(1u64 << self.rows.len()) {
            cur ^= self.rows[i.trailing_zeros() as usize];
            visit(cur);
        }
    }

    pub fn codewords(&self) -> Result<Code> {
        if self.dim() > MAX_CODEWORD_DIM {
            return Err(Error::Guard(format!(
                "k={} exceeds the enumeration limit {MAX_CODEWORD_DIM}",
                self.dim()
            )));
        }
        let mut words = Vec::with_capacity(1 << self.rows.len());
        self.for_each_codeword(|w| words.push(w));
        words.sort_unstable();
        Ok(Code::from_sorted_unchecked(self.n, words))
    }

    /// Minimum nonzero codeword weight.
    pub fn min_distance(&self) -> Result<u32> {
        if self.dim() > MAX_CODEWORD_DIM {
            return Err(Error::Guard(format!(
                "k={} exceeds the enumeration limit {MAX_CODEWORD_DIM}",
                self.dim()
            )));
        }
        let mut best = u32::MAX;
        self.for_each_codeword(|w| {
            if w != 0 {
                best = best.min(w.count_ones());
            }
        });
        Ok(best)
    }

    /// Covering radius as the largest coset-leader weight.
    ///
    /// Syndromes are the reductions of words modulo the code, compressed to
    /// the n − k non-pivot columns. A breadth-first search from the zero
    /// syndrome, stepping by the syndromes of the unit vectors, reaches each
    /// coset at exactly the weight of its leader.
    pub fn covering_radius(&self) -> Result<u32> {
        let n = self.n;
        let r = n - self.dim();
        if r > MAX_SYNDROME_BITS {
            return Err(Error::Guard(format!(
                "n-k={r} exceeds the syndrome-table limit {MAX_SYNDROME_BITS}"
            )));
        }
        if r == 0 {
            return Ok(0);
        }
        let pivots = self.pivot_mask();
        let free: Vec<u32> = (0..n)
            .map(|c| col_bit(n, c))
            .filter(|b| pivots & b == 0)
            .collect();
        let compress = |x: u32| {
            free.iter().enumerate().fold(
                0u32,
                |acc, (i, &b)| if x & b != 0 { acc | 1 << i } else { acc },
            )
        };
        let steps: Vec<u32> = (0..n)
            .map(|c| compress(self.reduce(col_bit(n, c))))
            .filter(|&s| s != 0)
            .unique()
            .collect();
        let states = 1usize << r;
        let mut dist = vec![u8::MAX; states];
        dist[0] = 0;
        let mut queue = VecDeque::from([0u32]);
        let mut radius = 0;
        while let Some(s) = queue.pop_front() {
            let ds = dist[s as usize];
            radius = radius.max(u32::from(ds));
            for &g in &steps {
                let t = (s ^ g) as usize;
                if dist[t] == u8::MAX {
                    dist[t] = ds + 1;
                    queue.push_back(t as u32);
                }
            }
        }
        Ok(radius)
    }

    pub fn r_density(&self, r: u32) -> Result<Density> {
        Density::new(1u64 << self.dim(), self.n, r)
    }

    /// All (k+1)-dimensional codes containing this one.
    pub fn immediate_supercodes(&self) -> Result<Vec<LinearCode>> {
        let k = self.dim();
        if k >= self.n {
            return Err(Error::Guard(
                "the full space has no proper supercode".into(),
            ));
        }
        let pivots = self.pivot_mask();
        let free: Vec<u32> = (0..self.n)
            .map(|c| col_bit(self.n, c))
            .filter(|b| pivots & b == 0)
            .collect();
        let count = 1u64 << free.len();
        Ok((1..count)
            .map(|m| {
                let v = free
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .fold(0u32, |acc, (_, &b)| acc | b);
                let mut rows = self.rows.clone();
                rows.push(v);
                LinearCode::from_generator(self.n, rows).expect("v is outside the code")
            })
            .collect())
    }

    /// All (k−1)-dimensional subcodes: the kernels of the 2^k − 1 nonzero
    /// functionals on the code.
    pub fn immediate_subcodes(&self) -> Result<Vec<LinearCode>> {
        let k = self.rows.len();
        if k < 2 {
            return Err(Error::Guard("subcodes need k >= 2".into()));
        }
        Ok((1u64..(1 << k))
            .map(|a| {
                let j = a.trailing_zeros() as usize;
                let rows = (0..k)
                    .filter(|&i| i != j)
                    .map(|i| {
                        if a >> i & 1 == 1 {
                            self.rows[i] ^ self.rows[j]
                        } else {
                            self.rows[i]
                        }
                    })
                    .collect();
                LinearCode::from_generator(self.n, rows).expect("kernel basis is independent")
            })
            .collect())
    }

    /// The [7,4] Hamming code.
    pub fn hamming_7_4() -> LinearCode {
        LinearCode::from_generator(7, vec![0b1000110, 0b0100101, 0b0010011, 0b0001111])
            .expect("valid generator")
    }

    pub fn repetition(n: u32) -> Result<LinearCode> {
        check_len(n)?;
        LinearCode::from_generator(n, vec![((1u64 << n) - 1) as u32])
    }
}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}]<{}>",
            self.n,
            self.dim(),
            self.row_strings().join(",")
        )
    }
}

/// |L(n, k)|, the Gaussian binomial coefficient over GF(2).
pub fn count_linear(n: u32, k: u32) -> Result<BigUint> {
    if k > n {
        return Err(Error::Domain(format!("dimension {k} exceeds length {n}")));
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= (BigUint::one() << n) - (BigUint::one() << i);
        den *= (BigUint::one() << k) - (BigUint::one() << i);
    }
    Ok(num / den)
}

pub fn binomial(n: &BigUint, k: &BigUint) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let nk = n - k;
    let k = if nk < *k { nk } else { k.clone() };
    let mut acc = BigUint::one();
    let mut i = BigUint::from(0u32);
    while i < k {
        acc = acc * (n - &i) / (&i + 1u32);
        i += 1u32;
    }
    acc
}

/// |C(n, M)| = C(2^n, M).
pub fn count_nonlinear(n: u32, m: u64) -> Result<BigUint> {
    check_len(n)?;
    if m > space_size(n) {
        return Err(Error::Domain(format!("size {m} exceeds 2^{n}")));
    }
    Ok(binomial(&BigUint::from(space_size(n)), &BigUint::from(m)))
}

pub(crate) fn check_budget(count: &BigUint, budget: u64) -> Result<()> {
    if count.to_u64().is_none_or(|c| c > budget) {
        return Err(Error::BudgetExceeded {
            needed: count.to_string(),
            budget,
        });
    }
    Ok(())
}

/// Every k-dimensional subspace of F_2^n exactly once, as RREF generators.
///
/// The stream walks pivot-column choices in lexicographic order and, for each,
/// every assignment of the free entries (columns right of a row's pivot that
/// are not pivots themselves).
pub fn enumerate_linear(n: u32, k: u32, budget: u64) -> Result<LinearSpaces> {
    check_len(n)?;
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    check_budget(&count_linear(n, k)?, budget)?;
    Ok(LinearSpaces {
        n,
        pivots: (0..n).combinations(k as usize),
        current: None,
    })
}

pub struct LinearSpaces {
    n: u32,
    pivots: Combinations<std::ops::Range<u32>>,
    current: Option<PivotCell>,
}

struct PivotCell {
    base: Vec<u32>,
    // (row, bit) for every free entry
    slots: Vec<(usize, u32)>,
    next: u64,
}

impl Iterator for LinearSpaces {
    type Item = LinearCode;

    fn next(&mut self) -> Option<LinearCode> {
        loop {
            if let Some(cell) = &mut self.current {
                if cell.next < 1u64 << cell.slots.len() {
                    let a = cell.next;
                    cell.next += 1;
                    let mut rows = cell.base.clone();
                    for (i, &(row, bit)) in cell.slots.iter().enumerate() {
                        if a >> i & 1 == 1 {
                            rows[row] |= bit;
                        }
                    }
                    return Some(LinearCode::from_rref_unchecked(self.n, rows));
                }
            }
            let pivots = self.pivots.next()?;
            let n = self.n;
            let base = pivots.iter().map(|&p| col_bit(n, p)).collect();
            let slots = pivots
                .iter()
                .enumerate()
                .flat_map(|(row, &p)| {
                    let pivots = &pivots;
                    (p + 1..n)
                        .filter(move |c| !pivots.contains(c))
                        .map(move |c| (row, col_bit(n, c)))
                })
                .collect();
            self.current = Some(PivotCell {
                base,
                slots,
                next: 0,
            });
        }
    }
}

/// A uniformly random member of L(n, k).
///
/// Draws k×n matrices of fair bits until one has rank k. Every subspace has
/// the same number of ordered bases, so the accepted span is uniform.
pub fn sample_linear_uniform<R: Rng + ?Sized>(n: u32, k: u32, rng: &mut R) -> Result<LinearCode> {
    check_len(n)?;
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let mask = ((1u64 << n) - 1) as u32;
    loop {
        let rows: Vec<u32> = (0..k).map(|_| rng.gen::<u32>() & mask).collect();
        if let Ok(code) = LinearCode::from_generator(n, rows) {
            return Ok(code);
        }
    }
}
