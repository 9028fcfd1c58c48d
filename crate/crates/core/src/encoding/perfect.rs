use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ParamMatrix;
use crate::error::{Error, Result};
use crate::word::{Letter, Symbol, VarWordSequence};

/// Finite-depth description of the perfect set `P_i ⊆ 2^ω` attached to an
/// even-length sequence `Y`, over the positions of `y_0⌢y_1⌢…`.
///
/// Every position is either forced to a bit or belongs to exactly one
/// equality class; each class is the set of variable places of some
/// `y_{2m}` (`m ≥ 1`) lying at or past the threshold `|y_0|+…+|y_{2i−1}|`.
/// Variable places of `y_0` and of the odd-indexed words are forced to 0,
/// since `ψ` of the substituted sequence is 0 there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectSetDescription {
    index: usize,
    forced: BTreeMap<usize, u8>,
    classes: Vec<Vec<usize>>,
}

impl PerfectSetDescription {
    fn from_parts(index: usize, forced: BTreeMap<usize, u8>, classes: Vec<Vec<usize>>) -> Result<Self> {
        let len = forced.len() + classes.iter().map(Vec::len).sum::<usize>();
        let mut seen = vec![false; len];
        let mut mark = |n: usize| -> Result<()> {
            match seen.get_mut(n) {
                Some(slot) if !*slot => {
                    *slot = true;
                    Ok(())
                }
                _ => Err(Error::PerfectSetViolation { index, position: n }),
            }
        };
        for (&n, &b) in &forced {
            if b > 1 {
                return Err(Error::InvalidBit(b as u64));
            }
            mark(n)?;
        }
        for class in &classes {
            if class.is_empty() || class.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Json("equality classes must be nonempty and sorted".into()));
            }
            for &n in class {
                mark(n)?;
            }
        }
        Ok(PerfectSetDescription {
            index,
            forced,
            classes,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Ambient string length `|y_0| + … + |y_{2M−1}|`.
    pub fn len(&self) -> usize {
        self.forced.len() + self.classes.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forced(&self) -> &BTreeMap<usize, u8> {
        &self.forced
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// The least place of each class: the unconstrained coordinates.
    pub fn free_positions(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    /// Number of satisfying strings of the ambient length.
    pub fn count(&self) -> u128 {
        1u128 << self.classes.len()
    }

    /// Checks a 0/1 string against conditions (1)–(3).
    pub fn check(&self, delta: &[u8]) -> Result<()> {
        if delta.len() != self.len() {
            return Err(Error::AmbientLength {
                expected: self.len(),
                got: delta.len(),
            });
        }
        let violation = |position| Error::PerfectSetViolation {
            index: self.index,
            position,
        };
        for (n, &b) in delta.iter().enumerate() {
            if b > 1 {
                return Err(violation(n));
            }
        }
        for (&n, &b) in &self.forced {
            if delta[n] != b {
                return Err(violation(n));
            }
        }
        for class in &self.classes {
            if let Some(&n) = class.iter().find(|&&n| delta[n] != delta[class[0]]) {
                return Err(violation(n));
            }
        }
        Ok(())
    }

    pub fn contains(&self, delta: &[u8]) -> bool {
        self.check(delta).is_ok()
    }

    /// The string with the given free bits, one per class.
    pub fn with_free_bits(&self, bits: &[u8]) -> Vec<u8> {
        let mut delta = vec![0u8; self.len()];
        for (&n, &b) in &self.forced {
            delta[n] = b;
        }
        for (class, &b) in self.classes.iter().zip(bits) {
            for &n in class {
                delta[n] = b;
            }
        }
        delta
    }

    /// All satisfying strings in lexicographic order.
    pub fn enumerate(&self) -> Vec<Vec<u8>> {
        let c = self.classes.len();
        assert!(c < 32, "too many free classes to enumerate");
        (0..1u64 << c)
            .map(|mask| {
                let bits: Vec<u8> = (0..c).map(|j| ((mask >> (c - 1 - j)) & 1) as u8).collect();
                self.with_free_bits(&bits)
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct PerfectRepr {
    index: usize,
    forced: Vec<(usize, u8)>,
    classes: Vec<Vec<usize>>,
}

impl Serialize for PerfectSetDescription {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PerfectRepr {
            index: self.index,
            forced: self.forced.iter().map(|(&n, &b)| (n, b)).collect(),
            classes: self.classes.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PerfectSetDescription {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PerfectRepr::deserialize(d)?;
        let mut forced = BTreeMap::new();
        for (n, b) in r.forced {
            if forced.insert(n, b).is_some() {
                return Err(serde::de::Error::custom(format!("position {n} forced twice")));
            }
        }
        PerfectSetDescription::from_parts(r.index, forced, r.classes).map_err(serde::de::Error::custom)
    }
}

fn check_even(seq: &VarWordSequence) -> Result<()> {
    if seq.len() % 2 == 1 {
        return Err(Error::OddLength(seq.len()));
    }
    Ok(())
}

/// `P_i` for the even-length sequence `seq`.
pub fn perfect_set(seq: &VarWordSequence, i: usize) -> Result<PerfectSetDescription> {
    check_even(seq)?;
    let offsets = seq.offsets();
    let total: usize = seq.words().iter().map(|w| w.len()).sum();
    let threshold = offsets.get(2 * i).copied().unwrap_or(total);
    let mut forced = BTreeMap::new();
    let mut classes = Vec::new();
    for (idx, (word, &start)) in seq.words().iter().zip(&offsets).enumerate() {
        let in_interval = idx >= 2 && idx % 2 == 0 && start >= threshold;
        let mut class = Vec::new();
        for (l, s) in word.symbols().iter().enumerate() {
            let n = start + l;
            match s {
                Symbol::Letter(letter) => {
                    forced.insert(n, letter.bit(i) as u8);
                }
                Symbol::Var(_) if in_interval => class.push(n),
                Symbol::Var(_) => {
                    forced.insert(n, 0);
                }
            }
        }
        if !class.is_empty() {
            classes.push(class);
        }
    }
    PerfectSetDescription::from_parts(i, forced, classes)
}

/// `P_0, …, P_{c−1}` for `c` the alphabet's bit width.
pub fn perfect_sets(seq: &VarWordSequence) -> Result<Vec<PerfectSetDescription>> {
    (0..seq.alphabet().bit_width()).map(|i| perfect_set(seq, i)).collect()
}

/// The matrix with column `i` equal to `δ_i`.
pub fn assemble_matrix(deltas: &[Vec<u8>]) -> Result<ParamMatrix> {
    let rows = deltas.first().map_or(0, Vec::len);
    let mut ones = Vec::new();
    for (i, delta) in deltas.iter().enumerate() {
        if delta.len() != rows {
            return Err(Error::AmbientLength {
                expected: rows,
                got: delta.len(),
            });
        }
        ones.extend(delta.iter().enumerate().filter(|(_, &b)| b == 1).map(|(n, _)| (n, i)));
    }
    ParamMatrix::new(rows, deltas.len(), ones)
}

/// Letters `σ_{2m}` with `σ_{2m}(i) = δ_i(n_m)`, where `n_m` is the first
/// variable place of `y_{2m}`; `σ_0` is the zero letter. Each `δ_i` must
/// lie in `P_i`, one per bit column.
pub fn product_to_sigmas(seq: &VarWordSequence, deltas: &[Vec<u8>]) -> Result<Vec<Letter>> {
    check_even(seq)?;
    let cols = seq.alphabet().bit_width();
    if deltas.len() != cols {
        return Err(Error::ArityMismatch {
            expected: cols,
            got: deltas.len(),
        });
    }
    for (i, delta) in deltas.iter().enumerate() {
        perfect_set(seq, i)?.check(delta)?;
    }
    let offsets = seq.offsets();
    let mut sigmas = Vec::with_capacity(seq.len() / 2);
    for m in 0..seq.len() / 2 {
        let idx = 2 * m;
        let first_var = seq.words()[idx]
            .symbols()
            .iter()
            .position(|s| s.is_var())
            .map(|l| offsets[idx] + l);
        let sigma = match first_var {
            Some(n) if m > 0 => {
                let mask = deltas
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, d)| acc | ((d[n] as u64) << i));
                Letter::from_mask(mask)
            }
            _ => Letter::ZERO,
        };
        if !seq.alphabet().contains_at(sigma, idx) {
            return Err(Error::Grading {
                letter: sigma.to_string(),
                level: idx,
            });
        }
        sigmas.push(sigma);
    }
    Ok(sigmas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{psi_encode, substituted_sequence};
    use crate::vector::Mode;
    use crate::word::{Alphabet, Word};

    fn four_words() -> VarWordSequence {
        // y_2 = "v_1 1 v_1" is the only word inside an interval I_1
        VarWordSequence::new(
            Alphabet::bitstrings(3, 2).unwrap(),
            ["v_1", "01 v_1", "v_1 1 v_1 0", "v_1 0 0 0 0 0 0 v_1 11"]
                .iter()
                .map(|t| Word::parse(1, Mode::Unsigned, t).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn conditions() {
        let y = four_words();
        let p0 = perfect_set(&y, 0).unwrap();
        assert_eq!(p0.len(), 16);
        // letter "01" at place 1 has bit 0 clear, letter "1" at place 4 has it set
        assert_eq!(p0.forced()[&1], 0);
        assert_eq!(p0.forced()[&4], 1);
        assert_eq!(p0.classes(), &[vec![3, 5]]);
        assert_eq!(p0.count(), 2);
        let p1 = perfect_set(&y, 1).unwrap();
        assert_eq!(p1.forced()[&1], 1);
        assert_eq!(p1.classes().len(), 1);
        // threshold |y_0|+…+|y_3| covers everything for i = 2
        let p2 = perfect_set(&y, 2).unwrap();
        assert_eq!(p2.count(), 1);
        assert_eq!(p2.forced()[&3], 0);
    }

    #[test]
    fn enumeration_and_membership() {
        let y = four_words();
        let p0 = perfect_set(&y, 0).unwrap();
        let all = p0.enumerate();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|d| p0.contains(d)));
        let mut bad = all[0].clone();
        bad[5] ^= 1;
        assert_eq!(
            p0.check(&bad),
            Err(Error::PerfectSetViolation { index: 0, position: 5 })
        );
        assert!(matches!(p0.check(&bad[1..]), Err(Error::AmbientLength { .. })));
    }

    #[test]
    fn sigmas_reproduce_matrix() {
        let y = four_words();
        let sets = perfect_sets(&y).unwrap();
        assert_eq!(sets.len(), 2);
        for d0 in sets[0].enumerate() {
            for d1 in sets[1].enumerate() {
                let deltas = vec![d0.clone(), d1.clone()];
                let sigmas = product_to_sigmas(&y, &deltas).unwrap();
                assert_eq!(sigmas[0], Letter::ZERO);
                assert_eq!(sigmas[1].bit(0), d0[3] == 1);
                let x = substituted_sequence(&y, &sigmas).unwrap();
                assert_eq!(psi_encode(&x), assemble_matrix(&deltas).unwrap());
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = perfect_set(&four_words(), 0).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.starts_with(r#"{"index":0,"forced":[[0,0],"#));
        assert_eq!(serde_json::from_str::<PerfectSetDescription>(&text).unwrap(), p);
        assert!(serde_json::from_str::<PerfectSetDescription>(
            r#"{"index":0,"forced":[[0,0]],"classes":[[0]]}"#
        )
        .is_err());
    }
}
