use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{derive_b, perfect_sets, PerfectSetDescription};
use crate::error::{Error, Result};
use crate::vector::{decompose, BlockSequence};
use crate::word::{
    compose, tuple_arity, Decomposition, Letter, Segment, SubstitutionTuple, VarWordSequence,
};

/// `B` together with the perfect sets `P_i` and the sequence `Y` they came
/// from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedPair {
    pub b: BlockSequence,
    pub perfect_sets: Vec<PerfectSetDescription>,
    pub source: VarWordSequence,
}

impl DerivedPair {
    pub fn new(y: &VarWordSequence) -> Result<DerivedPair> {
        Ok(DerivedPair {
            b: derive_b(y)?,
            perfect_sets: perfect_sets(y)?,
            source: y.clone(),
        })
    }
}

/// `X = (x_m)` with `x_m = y_{2m}[σ_{2m}]⌢y_{2m+1}`; `sigmas[m]` is
/// `σ_{2m}` and must lie in `L_{2m}`.
pub fn substituted_sequence(y: &VarWordSequence, sigmas: &[Letter]) -> Result<VarWordSequence> {
    if y.len() % 2 == 1 {
        return Err(Error::OddLength(y.len()));
    }
    if sigmas.len() != y.len() / 2 {
        return Err(Error::SigmaCount {
            expected: y.len() / 2,
            got: sigmas.len(),
        });
    }
    let words = sigmas
        .iter()
        .enumerate()
        .map(|(m, &sigma)| {
            if !y.alphabet().contains_at(sigma, 2 * m) {
                return Err(Error::Grading {
                    letter: sigma.to_string(),
                    level: 2 * m,
                });
            }
            y.words()[2 * m].substitute_all(sigma).concat(&y.words()[2 * m + 1])
        })
        .collect::<Result<Vec<_>>>()?;
    VarWordSequence::new(y.alphabet().clone(), words)
}

/// A block sequence `Z` of the substituted sequence `X` with `φ(Z) = A` and
/// `ψ(Z)` equal to `ψ(X)` on the rows `Z` covers.
///
/// Each `a_l` is written over `B = derive_b(Y)` as `Σ s_i T^{j_i}(b_i)` on
/// its minimal index interval `I_l`. The word `z_l` runs over `x_p, …,
/// x_{max I_l}` where `p = max I_{l−1} + 1`: indices in `I_l` contribute
/// `s_i T^{j_i}(x_i)` (with `j_i = k` for blocks absent from `a_l`), the
/// skipped ones contribute `x_i[0⃗]`.
pub fn decode_witness(
    y: &VarWordSequence,
    a: &BlockSequence,
    sigmas: &[Letter],
) -> Result<VarWordSequence> {
    let x = substituted_sequence(y, sigmas)?;
    let b = derive_b(y)?;
    let (k, mode) = (y.k(), y.mode());
    if let Some((ak, amode)) = a.shape() {
        if amode != mode {
            return Err(Error::ModeMismatch(mode, amode));
        }
        if ak != k {
            return Err(Error::KMismatch(k, ak));
        }
    }
    let zero_tuple = SubstitutionTuple::Letters(vec![Letter::ZERO; tuple_arity(mode, k)]);
    let mut next = 0usize;
    let mut words = Vec::with_capacity(a.len());
    for (l, al) in a.elements().iter().enumerate() {
        let terms = decompose(&b, al)
            .ok_or_else(|| Error::NotBlockSubsequence(format!("element {l} is not in the span")))?;
        let by_block: BTreeMap<usize, _> = terms.iter().map(|t| (t.block, *t)).collect();
        let (&lo, _) = by_block.first_key_value().expect("span elements are nonzero");
        let (&hi, _) = by_block.last_key_value().expect("span elements are nonzero");
        if lo < next {
            return Err(Error::NotBlockSubsequence(format!(
                "element {l} overlaps its predecessor"
            )));
        }
        let segments = (next..=hi)
            .map(|q| match by_block.get(&q) {
                Some(t) => Segment {
                    index: q,
                    sign: t.sign,
                    shift: t.shift,
                    subst: SubstitutionTuple::Vars,
                },
                None if q >= lo => Segment {
                    shift: k,
                    ..Segment::generator(q)
                },
                None => Segment {
                    subst: zero_tuple.clone(),
                    ..Segment::generator(q)
                },
            })
            .collect();
        words.push(compose(&x, &Decomposition::new(segments))?);
        next = hi + 1;
    }
    VarWordSequence::new(y.alphabet().clone(), words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{phi_encode, psi_encode};
    use crate::vector::{BlockVector, Mode};
    use crate::word::{is_block_subseq, Alphabet, Word};

    fn y(mode: Mode, k: u32, words: &[&str]) -> VarWordSequence {
        VarWordSequence::new(
            Alphabet::bitstrings(5, 2).unwrap(),
            words.iter().map(|t| Word::parse(k, mode, t).unwrap()).collect(),
        )
        .unwrap()
    }

    fn check(y: &VarWordSequence, a: &BlockSequence, sigmas: &[Letter]) -> VarWordSequence {
        let z = decode_witness(y, a, sigmas).unwrap();
        assert_eq!(&phi_encode(&z).unwrap(), a);
        let x = substituted_sequence(y, sigmas).unwrap();
        let pz = psi_encode(&z);
        assert_eq!(pz, psi_encode(&x).truncate(pz.rows()));
        assert!(is_block_subseq(z.words(), &x));
        z
    }

    #[test]
    fn identity_decode() {
        let y = y(Mode::Unsigned, 2, &["v_2", "1 v_1 v_2", "v_2 v_2 1 0 0", "v_1 0 v_2 0 0 0 0 0 0 0"]);
        let b = derive_b(&y).unwrap();
        let sigmas = [Letter::ZERO, Letter::ZERO];
        let z = check(&y, &b, &sigmas);
        assert_eq!(z.len(), 2);
    }

    #[test]
    fn merged_blocks() {
        let y = y(Mode::Unsigned, 1, &["v_1", "1 v_1", "v_1 v_1 1 0", "v_1 0 v_1 0 0 0 0 0 0"]);
        let b = derive_b(&y).unwrap();
        let sum = b[0].block_sum(&b[1]).unwrap();
        let a = BlockSequence::new(vec![sum]).unwrap();
        let sigmas = [Letter::ZERO, Letter::from_mask(3)];
        let z = check(&y, &a, &sigmas);
        assert_eq!(z.len(), 1);
        assert_eq!(z.words()[0].len(), 16);
    }

    #[test]
    fn skipped_pairs_are_zeroed() {
        let y = y(Mode::Unsigned, 1, &["v_1", "1 v_1", "v_1 v_1 1 0", "v_1 0 v_1 0 0 0 0 0 0"]);
        let b = derive_b(&y).unwrap();
        let a = BlockSequence::new(vec![b[1].clone()]).unwrap();
        let z = check(&y, &a, &[Letter::from_mask(1), Letter::from_mask(2)]);
        assert_eq!(z.words()[0].to_string(), "1 1 0 01 01 1 0 v_1 0 v_1 0 0 0 0 0 0");
    }

    #[test]
    fn signed_reflection() {
        let y = y(Mode::Signed, 2, &["v_2", "v_-1 v_2", "v_2 1 v_1 0", "v_-2 0 0 0 0 0 0 v_1 v_1"]);
        let b = derive_b(&y).unwrap();
        let neg = BlockSequence::new(vec![b[0].negate().unwrap()]).unwrap();
        let sigmas = [Letter::ZERO, Letter::ZERO];
        let z = check(&y, &neg, &sigmas);
        let direct = check(&y, &BlockSequence::new(vec![b[0].clone()]).unwrap(), &sigmas);
        assert_eq!(z.words()[0], direct.words()[0].reflect().unwrap());
    }

    #[test]
    fn rejects_non_members() {
        let y = y(Mode::Unsigned, 1, &["v_1", "1 v_1"]);
        let stray = BlockSequence::new(vec![BlockVector::new(1, Mode::Unsigned, vec![(0, 1)]).unwrap()]).unwrap();
        assert!(matches!(
            decode_witness(&y, &stray, &[Letter::ZERO]),
            Err(Error::NotBlockSubsequence(_))
        ));
        assert!(matches!(
            decode_witness(&y, &stray, &[]),
            Err(Error::SigmaCount { .. })
        ));
    }
}
