//! Encodings of rapidly increasing word sequences as block sequences and
//! bit matrices, and the finite-depth machinery that inverts them.
//!
//! `φ` records where the variables sit (as a block sequence) and `ψ`
//! records the letters (as a 0/1 matrix indexed by position and bit).

mod decode;
mod perfect;

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::vector::{BlockSequence, BlockVector};
use crate::word::{Symbol, VarWordSequence, Word};

pub use decode::{decode_witness, substituted_sequence, DerivedPair};
pub use perfect::{assemble_matrix, perfect_set, perfect_sets, product_to_sigmas, PerfectSetDescription};

fn variable_block(word: &Word, offset: usize) -> Result<BlockVector> {
    let entries = word
        .symbols()
        .iter()
        .enumerate()
        .filter_map(|(l, s)| match s {
            Symbol::Var(i) => Some((offset + l, *i)),
            _ => None,
        })
        .collect();
    BlockVector::new(word.k(), word.mode(), entries)
}

/// `φ((x_m)) = (a_m)`: `a_m` puts value `i` at `|x_0|+…+|x_{m−1}| + l`
/// whenever `v_i` is the `l`-th symbol of `x_m`.
pub fn phi_encode(seq: &VarWordSequence) -> Result<BlockSequence> {
    let blocks = seq
        .words()
        .iter()
        .zip(seq.offsets())
        .map(|(w, off)| variable_block(w, off))
        .collect::<Result<Vec<_>>>()?;
    BlockSequence::new(blocks)
}

/// `B = (b_m)`: the variable pattern of each odd-indexed `y_{2m+1}`, placed
/// after `|y_0| + … + |y_{2m}|`.
pub fn derive_b(seq: &VarWordSequence) -> Result<BlockSequence> {
    if seq.len() % 2 == 1 {
        return Err(Error::OddLength(seq.len()));
    }
    let offsets = seq.offsets();
    let blocks = (1..seq.len())
        .step_by(2)
        .map(|idx| variable_block(&seq.words()[idx], offsets[idx]))
        .collect::<Result<Vec<_>>>()?;
    BlockSequence::new(blocks)
}

/// A finite section of a `ω × ω` bit matrix: the set of `(row, col)` pairs
/// holding a 1, within `rows × cols`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamMatrix {
    rows: usize,
    cols: usize,
    ones: BTreeSet<(usize, usize)>,
}

impl ParamMatrix {
    pub fn new(rows: usize, cols: usize, ones: impl IntoIterator<Item = (usize, usize)>) -> Result<ParamMatrix> {
        let ones: BTreeSet<_> = ones.into_iter().collect();
        if let Some(&(n, i)) = ones.iter().find(|&&(n, i)| n >= rows || i >= cols) {
            return Err(Error::IndexOutOfRange {
                index: if n >= rows { n } else { i },
                len: if n >= rows { rows } else { cols },
            });
        }
        Ok(ParamMatrix { rows, cols, ones })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ones.iter().copied()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.ones.contains(&(row, col))
    }

    /// The first `rows` rows.
    pub fn truncate(&self, rows: usize) -> ParamMatrix {
        let rows = rows.min(self.rows);
        ParamMatrix {
            rows,
            cols: self.cols,
            ones: self.ones.iter().copied().filter(|&(n, _)| n < rows).collect(),
        }
    }

    /// Column `i` as a 0/1 string of length `rows`.
    pub fn column(&self, col: usize) -> Vec<u8> {
        (0..self.rows).map(|n| self.get(n, col) as u8).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    bits: Vec<(usize, usize)>,
}

impl Serialize for ParamMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            bits: self.ones.iter().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParamMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        ParamMatrix::new(r.rows, r.cols, r.bits).map_err(serde::de::Error::custom)
    }
}

/// `ψ((x_m))(n, i) = σ(i)` when the letter `σ` sits at place `n` of
/// `x_0⌢x_1⌢…`, and 0 at variable places. Columns span the alphabet's bit
/// width; rows span the concatenation.
pub fn psi_encode(seq: &VarWordSequence) -> ParamMatrix {
    let cols = seq.alphabet().bit_width();
    let word = seq.concatenation();
    let mut ones = BTreeSet::new();
    for (n, s) in word.symbols().iter().enumerate() {
        if let Symbol::Letter(l) = s {
            ones.extend((0..cols).filter(|&i| l.bit(i)).map(|i| (n, i)));
        }
    }
    ParamMatrix {
        rows: word.len(),
        cols,
        ones,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::Mode;
    use crate::word::Alphabet;

    fn seq(mode: Mode, k: u32, words: &[&str]) -> VarWordSequence {
        VarWordSequence::new(
            Alphabet::bitstrings(5, 2).unwrap(),
            words.iter().map(|w| Word::parse(k, mode, w).unwrap()).collect(),
        )
        .unwrap()
    }

    fn entries(b: &BlockVector) -> Vec<(usize, i32)> {
        b.entries().to_vec()
    }

    #[test]
    fn phi_examples() {
        let a = phi_encode(&seq(Mode::Unsigned, 2, &["1 v_2 v_1"])).unwrap();
        assert_eq!(entries(&a[0]), vec![(1, 2), (2, 1)]);
        let a = phi_encode(&seq(Mode::Unsigned, 1, &["v_1", "v_1 v_1"])).unwrap();
        assert_eq!(entries(&a[0]), vec![(0, 1)]);
        assert_eq!(entries(&a[1]), vec![(1, 1), (2, 1)]);
        let a = phi_encode(&seq(Mode::Signed, 1, &["v_1 v_-1"])).unwrap();
        assert_eq!(entries(&a[0]), vec![(0, 1), (1, -1)]);
    }

    #[test]
    fn psi_examples() {
        let m = psi_encode(&seq(Mode::Unsigned, 1, &["1 v_1"]));
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.ones().collect::<Vec<_>>(), vec![(0, 0)]);
        let m = psi_encode(&seq(Mode::Unsigned, 1, &["v_1", "v_1 v_1"]));
        assert_eq!(m.ones().count(), 0);
        // a variable replaced by the zero letter leaves ψ unchanged
        let y = seq(Mode::Unsigned, 1, &["v_1 01", "v_1 v_1 1"]);
        let z = seq(Mode::Unsigned, 1, &["v_1 01", "0 v_1 1"]);
        assert_eq!(psi_encode(&y), psi_encode(&z));
        assert!(psi_encode(&y).get(1, 1));
    }

    #[test]
    fn derived_blocks() {
        let y = seq(Mode::Unsigned, 1, &["v_1", "1 v_1 v_1"]);
        let b = derive_b(&y).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(entries(&b[0]), vec![(2, 1), (3, 1)]);
        let y4 = seq(Mode::Signed, 1, &["v_1", "v_-1 1", "v_1 v_1 1 1", "1 v_1 0 0 0 0 0 0 0"]);
        let b = derive_b(&y4).unwrap();
        assert_eq!(entries(&b[0]), vec![(1, -1)]);
        assert_eq!(entries(&b[1]), vec![(8, 1)]);
        assert_eq!(derive_b(&y4.prefix(3).unwrap()), Err(Error::OddLength(3)));
    }

    #[test]
    fn matrix_json_and_bounds() {
        let m = ParamMatrix::new(3, 2, [(0, 1), (2, 0)]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"rows":3,"cols":2,"bits":[[0,1],[2,0]]}"#);
        assert_eq!(serde_json::from_str::<ParamMatrix>(&text).unwrap(), m);
        assert!(ParamMatrix::new(1, 1, [(1, 0)]).is_err());
        assert_eq!(m.truncate(2).ones().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(m.column(0), vec![0, 0, 1]);
    }
}
