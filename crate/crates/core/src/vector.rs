//! Finitely supported integer vectors: the partial semigroups `FIN_k`
//! (unsigned) and `FIN_±k` (signed).
//!
//! A [`BlockVector`] is stored sparsely as strictly increasing
//! `(position, value)` pairs; absent positions are zero. Every vector
//! attains magnitude exactly `k` somewhere, so `FIN_0` is never built.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distance::Distance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Unsigned,
    Signed,
}

impl Mode {
    /// The signs a span may attach to a block in this mode.
    pub fn signs(self) -> &'static [i32] {
        match self {
            Mode::Unsigned => &[1],
            Mode::Signed => &[1, -1],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Unsigned => "unsigned",
            Mode::Signed => "signed",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unsigned" => Ok(Mode::Unsigned),
            "signed" => Ok(Mode::Signed),
            other => Err(Error::Json(format!("unknown mode {other:?}"))),
        }
    }
}

/// An element of `FIN_k` or `FIN_±k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockVector {
    k: u32,
    mode: Mode,
    entries: Vec<(usize, i32)>,
}

impl BlockVector {
    /// Builds a vector, checking ordering, value range and attainment of `k`.
    pub fn new(k: u32, mode: Mode, entries: Vec<(usize, i32)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        let bound = k as i32;
        let mut attained = false;
        for (idx, &(position, value)) in entries.iter().enumerate() {
            if idx > 0 {
                let prev = entries[idx - 1].0;
                if prev >= position {
                    return Err(Error::UnsortedPositions {
                        prev,
                        next: position,
                    });
                }
            }
            let ok = match mode {
                Mode::Unsigned => (1..=bound).contains(&value),
                Mode::Signed => value != 0 && (-bound..=bound).contains(&value),
            };
            if !ok {
                return Err(Error::ValueOutOfRange {
                    position,
                    value,
                    k,
                    mode,
                });
            }
            attained |= value.abs() == bound;
        }
        if !attained {
            return Err(Error::NotAttained { k });
        }
        Ok(BlockVector { k, mode, entries })
    }

    /// Internal constructor for values already known to satisfy the invariants.
    pub(crate) fn from_parts(k: u32, mode: Mode, entries: Vec<(usize, i32)>) -> Self {
        debug_assert!(BlockVector::new(k, mode, entries.clone()).is_ok());
        BlockVector { k, mode, entries }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn entries(&self) -> &[(usize, i32)] {
        &self.entries
    }

    /// `supp p`: the positions carrying a nonzero value, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|&(n, _)| n).collect()
    }

    pub fn min_support(&self) -> usize {
        self.entries[0].0
    }

    pub fn max_support(&self) -> usize {
        self.entries[self.entries.len() - 1].0
    }

    /// Value at `position` (zero when absent).
    pub fn get(&self, position: usize) -> i32 {
        match self.entries.binary_search_by_key(&position, |&(n, _)| n) {
            Ok(idx) => self.entries[idx].1,
            Err(_) => 0,
        }
    }

    fn check_compatible(&self, other: &BlockVector) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::ModeMismatch(self.mode, other.mode));
        }
        if self.k != other.k {
            return Err(Error::KMismatch(self.k, other.k));
        }
        Ok(())
    }

    /// `p < q`: every position of `p` lies strictly left of every position of `q`.
    pub fn block_lt(&self, other: &BlockVector) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.max_support() < other.min_support())
    }

    /// `p + q` for block-ordered `p < q`.
    pub fn block_sum(&self, other: &BlockVector) -> Result<BlockVector> {
        if !self.block_lt(other)? {
            return Err(Error::NotBlockOrdered {
                left_max: self.max_support(),
                right_min: other.min_support(),
            });
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(BlockVector::from_parts(self.k, self.mode, entries))
    }

    /// The tetris operation `T : FIN_k -> FIN_{k-1}`: every nonzero magnitude
    /// drops by one and entries reaching zero disappear.
    pub fn tetris(&self) -> Result<BlockVector> {
        if self.k == 1 {
            return Err(Error::TetrisAtLevelOne);
        }
        let entries = self
            .entries
            .iter()
            .filter(|&&(_, v)| v.abs() > 1)
            .map(|&(n, v)| (n, v - v.signum()))
            .collect();
        Ok(BlockVector::from_parts(self.k - 1, self.mode, entries))
    }

    /// Entries of `T^shift(p)` (still measured against this vector's `k`),
    /// empty once `shift >= k`.
    pub(crate) fn shifted_entries(&self, shift: u32, sign: i32) -> Vec<(usize, i32)> {
        let s = shift as i32;
        self.entries
            .iter()
            .filter(|&&(_, v)| v.abs() > s)
            .map(|&(n, v)| (n, sign * (v - s * v.signum())))
            .collect()
    }

    /// Multiplies every value by −1 (signed mode only).
    pub fn negate(&self) -> Result<BlockVector> {
        if self.mode != Mode::Signed {
            return Err(Error::RequiresSigned);
        }
        let entries = self.entries.iter().map(|&(n, v)| (n, -v)).collect();
        Ok(BlockVector::from_parts(self.k, self.mode, entries))
    }

    /// `||p − q||_∞` with absent entries read as zero.
    pub fn linf_dist(&self, other: &BlockVector) -> u32 {
        linf_entries(&self.entries, &other.entries)
    }
}

pub(crate) fn linf_entries(a: &[(usize, i32)], b: &[(usize, i32)]) -> u32 {
    let (mut i, mut j) = (0, 0);
    let mut best = 0u32;
    while i < a.len() || j < b.len() {
        let diff = match (a.get(i), b.get(j)) {
            (Some(&(pa, va)), Some(&(pb, vb))) => match pa.cmp(&pb) {
                Ordering::Less => {
                    i += 1;
                    va
                }
                Ordering::Greater => {
                    j += 1;
                    vb
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    va - vb
                }
            },
            (Some(&(_, va)), None) => {
                i += 1;
                va
            }
            (None, Some(&(_, vb))) => {
                j += 1;
                vb
            }
            (None, None) => unreachable!(),
        };
        best = best.max(diff.unsigned_abs());
    }
    best
}

// Canonical order: lexicographic on the entry list, which starts with the
// minimum of the support.
impl Ord for BlockVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.entries
            .cmp(&other.entries)
            .then(self.k.cmp(&other.k))
            .then(self.mode.cmp(&other.mode))
    }
}

impl PartialOrd for BlockVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BlockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (idx, (n, v)) in self.entries.iter().enumerate() {
            if idx > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct BlockVectorRepr {
    pub k: Option<u32>,
    pub mode: Option<Mode>,
    pub entries: Vec<(usize, i32)>,
}

impl BlockVectorRepr {
    /// Fills in a missing `k` / `mode` from the defaults; a missing `k`
    /// without a default is taken as the largest magnitude present.
    pub fn build(self, k: Option<u32>, mode: Option<Mode>) -> Result<BlockVector> {
        let mode = self.mode.or(mode).unwrap_or(Mode::Unsigned);
        let k = self.k.or(k).unwrap_or_else(|| {
            self.entries
                .iter()
                .map(|&(_, v)| v.unsigned_abs())
                .max()
                .unwrap_or(0)
        });
        BlockVector::new(k, mode, self.entries)
    }
}

impl Serialize for BlockVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BlockVectorRepr {
            k: Some(self.k),
            mode: Some(self.mode),
            entries: self.entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BlockVectorRepr::deserialize(d)?;
        if repr.k.is_none() || repr.mode.is_none() {
            return Err(serde::de::Error::custom("block vector needs \"k\" and \"mode\""));
        }
        repr.build(None, None).map_err(serde::de::Error::custom)
    }
}

impl Serialize for BlockSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<BlockVector>::deserialize(d)?;
        BlockSequence::new(elements).map_err(serde::de::Error::custom)
    }
}

/// `(A)_ε` membership: some `q ∈ A` lies within ℓ∞ distance `eps` of `p`.
pub fn in_fattening<'a>(
    p: &BlockVector,
    set: impl IntoIterator<Item = &'a BlockVector>,
    eps: u32,
) -> bool {
    set.into_iter().any(|q| p.linf_dist(q) <= eps)
}

/// A finite block sequence `p_0 < p_1 < …` sharing `k` and mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockSequence {
    elements: Vec<BlockVector>,
}

impl BlockSequence {
    pub fn new(elements: Vec<BlockVector>) -> Result<Self> {
        for pair in elements.windows(2) {
            if !pair[0].block_lt(&pair[1])? {
                return Err(Error::NotBlockOrdered {
                    left_max: pair[0].max_support(),
                    right_min: pair[1].min_support(),
                });
            }
        }
        Ok(BlockSequence { elements })
    }

    pub fn elements(&self) -> &[BlockVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `(k, mode)` of the elements, if any.
    pub fn shape(&self) -> Option<(u32, Mode)> {
        self.elements.first().map(|p| (p.k, p.mode))
    }

    pub fn into_elements(self) -> Vec<BlockVector> {
        self.elements
    }
}

impl std::ops::Index<usize> for BlockSequence {
    type Output = BlockVector;

    fn index(&self, idx: usize) -> &BlockVector {
        &self.elements[idx]
    }
}

/// `||A − B|| = sup_n ||a_n − b_n||_∞`; sequences of different lengths are
/// infinitely far apart.
pub fn seq_dist(a: &BlockSequence, b: &BlockSequence) -> Distance {
    if a.len() != b.len() {
        return Distance::Infinite;
    }
    let d = a
        .elements
        .iter()
        .zip(&b.elements)
        .map(|(x, y)| x.linf_dist(y))
        .max()
        .unwrap_or(0);
    Distance::Finite(d)
}

/// One term `sign · T^shift(b_block)` of a span element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockTerm {
    pub block: usize,
    pub sign: i32,
    pub shift: u32,
}

/// `(sign, shift, entries of sign · T^shift(block))`.
type BlockOption = (i32, u32, Vec<(usize, i32)>);

/// Per-block choices available to a span.
fn block_options(block: &BlockVector) -> Vec<BlockOption> {
    let mut out = Vec::new();
    for shift in 0..block.k {
        for &sign in block.mode.signs() {
            out.push((sign, shift, block.shifted_entries(shift, sign)));
        }
    }
    out
}

fn check_sequence(seq: &BlockSequence) -> Result<(u32, Mode)> {
    seq.shape().ok_or(Error::EmptySequence)
}

/// `[P]_k` / `[P]_±k`: all sums `ε_0 T^{j_0}(p_{n_0}) + … + ε_m T^{j_m}(p_{n_m})`
/// over nonempty index sets with `j_i < k` and `min j_i = 0`.
///
/// The enumeration walks the blocks left to right, choosing per block
/// "absent" or a `(sign, shift)` pair, and only emits leaves where some
/// block was taken unshifted. The result is sorted and deduplicated.
pub fn span(seq: &BlockSequence) -> Result<Vec<BlockVector>> {
    let (k, mode) = check_sequence(seq)?;
    let options: Vec<_> = seq.elements.iter().map(block_options).collect();
    let mut out = Vec::new();
    let mut acc = Vec::new();
    span_rec(&options, 0, false, &mut acc, &mut |entries| {
        out.push(BlockVector::from_parts(k, mode, entries.to_vec()));
    });
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn span_rec(
    options: &[Vec<BlockOption>],
    idx: usize,
    has_top: bool,
    acc: &mut Vec<(usize, i32)>,
    emit: &mut impl FnMut(&[(usize, i32)]),
) {
    if idx == options.len() {
        if has_top {
            emit(acc);
        }
        return;
    }
    span_rec(options, idx + 1, has_top, acc, emit);
    for (_, shift, entries) in &options[idx] {
        let mark = acc.len();
        acc.extend_from_slice(entries);
        span_rec(options, idx + 1, has_top || *shift == 0, acc, emit);
        acc.truncate(mark);
    }
}

/// Expresses `v` as a span element of `seq`, returning its nonzero terms in
/// block order, or `None` when `v` is not in the span.
///
/// Blocks have disjoint supports, so each restriction of `v` is matched
/// against `±T^j(b)` independently.
pub fn decompose(seq: &BlockSequence, v: &BlockVector) -> Option<Vec<BlockTerm>> {
    let (k, mode) = seq.shape()?;
    if v.k != k || v.mode != mode {
        return None;
    }
    let mut terms = Vec::new();
    let mut consumed = 0usize;
    let mut has_top = false;
    for (idx, block) in seq.elements.iter().enumerate() {
        let lo = block.min_support();
        let hi = block.max_support();
        let restriction: Vec<(usize, i32)> = v
            .entries
            .iter()
            .copied()
            .filter(|&(n, _)| n >= lo && n <= hi)
            .collect();
        if restriction.is_empty() {
            continue;
        }
        consumed += restriction.len();
        let found = block_options(block)
            .into_iter()
            .find(|(_, _, entries)| *entries == restriction);
        let (sign, shift, _) = found?;
        has_top |= shift == 0;
        terms.push(BlockTerm {
            block: idx,
            sign,
            shift,
        });
    }
    // Entries outside every block window would not have been consumed.
    (consumed == v.entries.len() && has_top).then_some(terms)
}

/// Upper bound on the number of candidate vectors [`span_by_filter`] will scan.
pub const FILTER_LIMIT: u64 = 50_000_000;

/// Generate-then-filter enumeration of the span: every vector supported in
/// the union of the block supports is generated and kept iff [`decompose`]
/// accepts it. Independent of the recursive enumeration in [`span`].
pub fn span_by_filter(seq: &BlockSequence) -> Result<Vec<BlockVector>> {
    let (k, mode) = check_sequence(seq)?;
    let positions: Vec<usize> = seq.elements.iter().flat_map(|b| b.support()).collect();
    let values: Vec<i32> = match mode {
        Mode::Unsigned => (0..=k as i32).collect(),
        Mode::Signed => (-(k as i32)..=k as i32).collect(),
    };
    let total = (values.len() as u64)
        .checked_pow(positions.len() as u32)
        .unwrap_or(u64::MAX);
    if total > FILTER_LIMIT {
        return Err(Error::Problem(format!(
            "span filter would scan {total} candidates"
        )));
    }
    let zero_idx = values.iter().position(|&v| v == 0).unwrap();
    let mut digits = vec![zero_idx; positions.len()];
    let mut out = Vec::new();
    loop {
        // odometer increment
        let mut i = 0;
        loop {
            if i == digits.len() {
                out.sort();
                return Ok(out);
            }
            digits[i] = (digits[i] + 1) % values.len();
            if digits[i] != zero_idx {
                break;
            }
            i += 1;
        }
        let entries: Vec<(usize, i32)> = positions
            .iter()
            .zip(&digits)
            .filter(|(_, &d)| values[d] != 0)
            .map(|(&n, &d)| (n, values[d]))
            .collect();
        if let Ok(v) = BlockVector::new(k, mode, entries) {
            if decompose(seq, &v).is_some() {
                out.push(v);
            }
        }
    }
}

/// A finitely supported real vector (an element of `c_00 ⊂ c_0`).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RealVector {
    pub entries: Vec<(usize, f64)>,
}

impl RealVector {
    pub fn sup_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }

    pub fn get(&self, position: usize) -> f64 {
        match self.entries.binary_search_by_key(&position, |&(n, _)| n) {
            Ok(idx) => self.entries[idx].1,
            Err(_) => 0.0,
        }
    }

    pub fn scale(&self, factor: f64) -> RealVector {
        RealVector {
            entries: self.entries.iter().map(|&(n, v)| (n, v * factor)).collect(),
        }
    }

    pub fn linf_dist(&self, other: &RealVector) -> f64 {
        let mut positions: Vec<usize> = self
            .entries
            .iter()
            .chain(&other.entries)
            .map(|&(n, _)| n)
            .collect();
        positions.sort_unstable();
        positions.dedup();
        positions
            .into_iter()
            .map(|n| (self.get(n) - other.get(n)).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(k: u32, mode: Mode, e: &[(usize, i32)]) -> BlockVector {
        BlockVector::new(k, mode, e.to_vec()).unwrap()
    }

    fn u(k: u32, e: &[(usize, i32)]) -> BlockVector {
        v(k, Mode::Unsigned, e)
    }

    fn s(k: u32, e: &[(usize, i32)]) -> BlockVector {
        v(k, Mode::Signed, e)
    }

    #[test]
    fn constructor_rejects_bad_vectors() {
        assert_eq!(
            BlockVector::new(2, Mode::Unsigned, vec![]),
            Err(Error::EmptyVector)
        );
        assert_eq!(
            BlockVector::new(2, Mode::Unsigned, vec![(0, 1)]),
            Err(Error::NotAttained { k: 2 })
        );
        assert!(matches!(
            BlockVector::new(2, Mode::Unsigned, vec![(0, -2)]),
            Err(Error::ValueOutOfRange { .. })
        ));
        assert!(matches!(
            BlockVector::new(2, Mode::Signed, vec![(3, 2), (1, 1)]),
            Err(Error::UnsortedPositions { .. })
        ));
        assert!(matches!(
            BlockVector::new(1, Mode::Signed, vec![(0, 0), (1, 1)]),
            Err(Error::ValueOutOfRange { .. })
        ));
        assert_eq!(BlockVector::new(0, Mode::Signed, vec![(0, 1)]), Err(Error::ZeroK));
    }

    #[test]
    fn support_reads_keys() {
        assert_eq!(u(2, &[(0, 2), (3, 1)]).support(), vec![0, 3]);
        assert_eq!(u(1, &[(5, 1)]).support(), vec![5]);
        assert_eq!(s(2, &[(0, -2), (1, 2)]).support(), vec![0, 1]);
    }

    #[test]
    fn block_order() {
        assert!(u(1, &[(0, 1)]).block_lt(&u(1, &[(1, 1)])).unwrap());
        assert!(!u(1, &[(0, 1), (2, 1)])
            .block_lt(&u(1, &[(1, 1), (3, 1)]))
            .unwrap());
        assert!(!u(2, &[(3, 2)]).block_lt(&u(2, &[(3, 2)])).unwrap());
        assert!(matches!(
            u(1, &[(0, 1)]).block_lt(&s(1, &[(1, 1)])),
            Err(Error::ModeMismatch(..))
        ));
        assert!(matches!(
            u(1, &[(0, 1)]).block_lt(&u(2, &[(1, 2)])),
            Err(Error::KMismatch(..))
        ));
    }

    #[test]
    fn sums() {
        assert_eq!(
            u(2, &[(0, 2)]).block_sum(&u(2, &[(2, 1), (3, 2)])).unwrap(),
            u(2, &[(0, 2), (2, 1), (3, 2)])
        );
        assert_eq!(
            u(1, &[(0, 1)]).block_sum(&u(1, &[(1, 1)])).unwrap(),
            u(1, &[(0, 1), (1, 1)])
        );
        assert_eq!(
            s(2, &[(1, -2)]).block_sum(&s(2, &[(4, 2)])).unwrap(),
            s(2, &[(1, -2), (4, 2)])
        );
        assert!(matches!(
            u(1, &[(1, 1)]).block_sum(&u(1, &[(0, 1)])),
            Err(Error::NotBlockOrdered { .. })
        ));
    }

    #[test]
    fn tetris_cases() {
        assert_eq!(u(2, &[(0, 2), (3, 1)]).tetris().unwrap(), u(1, &[(0, 1)]));
        assert_eq!(s(2, &[(0, 2), (3, -1)]).tetris().unwrap(), s(1, &[(0, 1)]));
        assert_eq!(
            s(3, &[(1, 3), (2, -3)]).tetris().unwrap(),
            s(2, &[(1, 2), (2, -2)])
        );
        assert_eq!(u(1, &[(0, 1)]).tetris(), Err(Error::TetrisAtLevelOne));
    }

    #[test]
    fn negation() {
        assert_eq!(
            s(2, &[(0, 2), (1, -1)]).negate().unwrap(),
            s(2, &[(0, -2), (1, 1)])
        );
        assert_eq!(s(2, &[(4, -2)]).negate().unwrap(), s(2, &[(4, 2)]));
        let p = s(3, &[(0, 1), (2, -3)]);
        assert_eq!(p.negate().unwrap().negate().unwrap(), p);
        assert_eq!(u(1, &[(0, 1)]).negate(), Err(Error::RequiresSigned));
    }

    #[test]
    fn span_examples() {
        let p = BlockSequence::new(vec![u(1, &[(0, 1)]), u(1, &[(1, 1)])]).unwrap();
        assert_eq!(
            span(&p).unwrap(),
            vec![u(1, &[(0, 1)]), u(1, &[(0, 1), (1, 1)]), u(1, &[(1, 1)])]
        );
        let p = BlockSequence::new(vec![u(2, &[(0, 2)]), u(2, &[(1, 2)])]).unwrap();
        // {0:2}, {1:2}, {0:2,1:2}, {0:2,1:1}, {0:1,1:2}
        assert_eq!(span(&p).unwrap().len(), 5);
        let p = BlockSequence::new(vec![s(1, &[(0, 1)])]).unwrap();
        assert_eq!(span(&p).unwrap(), vec![s(1, &[(0, -1)]), s(1, &[(0, 1)])]);
        assert_eq!(
            span(&BlockSequence::new(vec![]).unwrap()),
            Err(Error::EmptySequence)
        );
    }

    #[test]
    fn span_matches_filter_on_small_case() {
        let p = BlockSequence::new(vec![
            s(2, &[(0, 2), (1, -1)]),
            s(2, &[(2, 1), (3, -2)]),
        ])
        .unwrap();
        assert_eq!(span(&p).unwrap(), span_by_filter(&p).unwrap());
    }

    #[test]
    fn decompose_recovers_terms() {
        let b = BlockSequence::new(vec![u(2, &[(0, 2)]), u(2, &[(1, 1), (2, 2)])]).unwrap();
        let terms = decompose(&b, &u(2, &[(0, 1), (1, 1), (2, 2)])).unwrap();
        assert_eq!(
            terms,
            vec![
                BlockTerm { block: 0, sign: 1, shift: 1 },
                BlockTerm { block: 1, sign: 1, shift: 0 }
            ]
        );
        // outside every block
        assert!(decompose(&b, &u(2, &[(0, 2), (5, 2)])).is_none());
        // partial restriction
        assert!(decompose(&b, &u(2, &[(2, 2)])).is_none());
    }

    #[test]
    fn distances() {
        assert_eq!(u(2, &[(0, 2)]).linf_dist(&u(1, &[(0, 1)])), 1);
        assert_eq!(u(1, &[(0, 1)]).linf_dist(&u(1, &[(1, 1)])), 1);
        assert_eq!(s(2, &[(0, 2), (1, -2)]).linf_dist(&s(2, &[(0, -2)])), 4);
    }

    #[test]
    fn fattening() {
        let a = [u(2, &[(0, 2)])];
        let p = u(1, &[(0, 1)]);
        assert!(in_fattening(&p, &a, 1));
        assert!(!in_fattening(&p, &a, 0));
        let q = u(2, &[(0, 2), (4, 1)]);
        assert!(in_fattening(&q, std::slice::from_ref(&q), 0));
    }

    #[test]
    fn sequence_distance() {
        let a = BlockSequence::new(vec![u(2, &[(0, 2)])]).unwrap();
        let b = BlockSequence::new(vec![u(1, &[(0, 1)])]).unwrap();
        assert_eq!(seq_dist(&a, &a), Distance::ZERO);
        assert_eq!(seq_dist(&a, &b), Distance::Finite(1));
        let c = BlockSequence::new(vec![u(1, &[(0, 1)]), u(1, &[(1, 1)])]).unwrap();
        let d = BlockSequence::new(vec![
            u(1, &[(0, 1)]),
            u(1, &[(1, 1)]),
            u(1, &[(2, 1)]),
        ])
        .unwrap();
        assert_eq!(seq_dist(&c, &d), Distance::Infinite);
    }

    #[test]
    fn block_sequence_requires_order() {
        assert!(BlockSequence::new(vec![u(1, &[(1, 1)]), u(1, &[(0, 1)])]).is_err());
    }
}
