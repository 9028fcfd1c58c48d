use serde::Serialize;

use super::{
    compose, parse_support, tuple_arity, tuple_slot, Decomposition, Letter, Segment,
    SubstitutionTuple, Symbol, VarWordSequence, Word,
};
use crate::error::{Error, Result};
use crate::vector::Mode;

/// `v_i ↦ v_{sign(i)·⌊|i|/2⌋}`, with `v_0` read as the zero letter.
fn halve_index(i: i32) -> Symbol {
    match i.signum() * (i.abs() / 2) {
        0 => Symbol::Letter(Letter::ZERO),
        j => Symbol::Var(j),
    }
}

/// `Φ_k`: a word over `v_{±1..±2k}` to one over `v_{±1..±k}`.
pub fn halve(x: &Word) -> Result<Word> {
    if x.mode() != Mode::Signed {
        return Err(Error::RequiresSigned);
    }
    if x.k() % 2 == 1 {
        return Err(Error::OddHalvingBound(x.k()));
    }
    let symbols = x
        .symbols()
        .iter()
        .map(|&s| match s {
            Symbol::Var(i) => halve_index(i),
            letter => letter,
        })
        .collect();
    Word::new(x.k() / 2, Mode::Signed, symbols)
}

impl VarWordSequence {
    /// `Φ_k` applied to every word.
    pub fn halve(&self) -> Result<VarWordSequence> {
        let words = self.words().iter().map(halve).collect::<Result<Vec<_>>>()?;
        VarWordSequence::new(self.alphabet().clone(), words)
    }
}

/// Widens a `2k`-slot signed tuple to `4k` slots so that substituting into a
/// `2k`-word and then halving agrees with halving first:
/// `λ̃_{±1} = 0` and `λ̃_{±2i} = λ̃_{±(2i+1)} = λ_{±i}`.
pub fn widen_tuple(tuple: &SubstitutionTuple, k: u32) -> Result<SubstitutionTuple> {
    let letters = match tuple {
        SubstitutionTuple::Vars => return Ok(SubstitutionTuple::Vars),
        SubstitutionTuple::Letters(l) => l,
    };
    let arity = tuple_arity(Mode::Signed, k);
    if letters.len() != arity {
        return Err(Error::ArityMismatch {
            expected: arity,
            got: letters.len(),
        });
    }
    let wide_k = 2 * k;
    let mut wide = vec![Letter::ZERO; tuple_arity(Mode::Signed, wide_k)];
    for m in (1..=wide_k as i32).flat_map(|m| [m, -m]) {
        if let Symbol::Var(j) = halve_index(m) {
            wide[tuple_slot(Mode::Signed, wide_k, m)] = letters[tuple_slot(Mode::Signed, k, j)];
        }
    }
    Ok(SubstitutionTuple::Letters(wide))
}

/// `ε_0 T^{2j_0}(ỹ_{n_0}[λ̃_0])⌢ …` for a decomposition `d` at level `k`
/// over a sequence `ytilde` at level `2k`.
pub fn lift_double(ytilde: &VarWordSequence, d: &Decomposition) -> Result<Word> {
    if ytilde.mode() != Mode::Signed {
        return Err(Error::RequiresSigned);
    }
    if ytilde.k() % 2 == 1 {
        return Err(Error::OddHalvingBound(ytilde.k()));
    }
    let k = ytilde.k() / 2;
    let segments = d
        .segments
        .iter()
        .map(|s| {
            if s.shift > k {
                return Err(Error::ShiftOutOfRange { shift: s.shift, k });
            }
            Ok(Segment {
                index: s.index,
                sign: s.sign,
                shift: 2 * s.shift,
                subst: widen_tuple(&s.subst, k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    compose(ytilde, &Decomposition::new(segments))
}

/// Which of `x`, `−x` the approximation is close to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Matched {
    Direct,
    Reflected,
}

/// A `(−T)`-span word within distance 1 of `x` or of `−x`.
///
/// Segments already of the form `(−T)^j` are kept; the others get one more
/// tetris step. If no segment of `x` is `+x_n` itself, the rule is applied
/// to `−x` instead.
pub fn approx_negt(seq: &VarWordSequence, x: &Word) -> Result<(Word, Matched)> {
    if seq.mode() != Mode::Signed {
        return Err(Error::RequiresSigned);
    }
    let d = parse_support(seq, x).ok_or(Error::NotInSpan)?;
    let direct = d.segments.iter().any(|s| s.is_top() && s.sign == 1);
    let (matched, segments) = if direct {
        (Matched::Direct, d.segments)
    } else {
        let flipped = d
            .segments
            .into_iter()
            .map(|s| match s.subst {
                SubstitutionTuple::Vars => Segment { sign: -s.sign, ..s },
                _ => s,
            })
            .collect();
        (Matched::Reflected, flipped)
    };
    let adjusted = segments
        .into_iter()
        .map(|s| {
            let negt_sign = if s.shift % 2 == 0 { 1 } else { -1 };
            if s.subst == SubstitutionTuple::Vars && s.sign != negt_sign {
                Segment {
                    shift: s.shift + 1,
                    ..s
                }
            } else {
                s
            }
        })
        .collect();
    Ok((compose(seq, &Decomposition::new(adjusted))?, matched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::Distance;
    use crate::word::{dist_words, in_span_negt, Alphabet};

    fn w(k: u32, t: &str) -> Word {
        Word::parse(k, Mode::Signed, t).unwrap()
    }

    fn seq(k: u32, words: &[&str]) -> VarWordSequence {
        VarWordSequence::new(
            Alphabet::bitstrings(3, 1).unwrap(),
            words.iter().map(|t| w(k, t)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn halving_cases() {
        assert_eq!(halve(&w(4, "v_4 v_3 v_-3 1")).unwrap(), w(2, "v_2 v_1 v_-1 1"));
        let h = halve(&w(2, "v_2 v_1")).unwrap();
        assert_eq!(h, w(1, "v_1 0"));
        assert_eq!(
            dist_words(&w(2, "v_2 v_1"), &w(2, "v_1 v_-1")),
            Distance::Finite(2)
        );
        assert_eq!(dist_words(&h, &halve(&w(2, "v_1 v_-1")).unwrap()), Distance::Finite(1));
        assert_eq!(halve(&w(3, "v_3")), Err(Error::OddHalvingBound(3)));
    }

    #[test]
    fn halving_commutes_with_reflection() {
        let x = w(4, "v_4 v_-3 1 v_1 v_-2");
        assert_eq!(
            halve(&x.reflect().unwrap()).unwrap(),
            halve(&x).unwrap().reflect().unwrap()
        );
    }

    #[test]
    fn widening_matches_halving() {
        let a = Letter::from_mask(1);
        let z = Letter::ZERO;
        // k = 1: (λ_{-1}, λ_1) = (0, a)
        let wide = widen_tuple(&SubstitutionTuple::Letters(vec![z, a]), 1).unwrap();
        assert_eq!(wide, SubstitutionTuple::Letters(vec![z, z, z, a]));
        let x = w(2, "v_2 v_1 v_-2");
        let lifted = x.substitute(&wide).unwrap();
        let halved = halve(&x)
            .unwrap()
            .substitute(&SubstitutionTuple::Letters(vec![z, a]))
            .unwrap();
        assert_eq!(halve(&lifted).unwrap(), halved);
    }

    #[test]
    fn lift_single_segments() {
        let yt = seq(4, &["v_4 v_3 v_-1"]);
        let y = yt.halve().unwrap();
        let d = Decomposition::new(vec![Segment::generator(0)]);
        assert_eq!(lift_double(&yt, &d).unwrap(), yt.words()[0]);
        let d1 = Decomposition::new(vec![Segment {
            shift: 1,
            ..Segment::generator(0)
        }]);
        let lifted = lift_double(&yt, &d1).unwrap();
        assert_eq!(lifted, yt.words()[0].tetris_pow(2));
        assert_eq!(halve(&lifted).unwrap(), compose(&y, &d1).unwrap());
    }

    #[test]
    fn approximation_cases() {
        let y = seq(2, &["v_2 v_1", "v_1 v_2 1"]);
        let (z, m) = approx_negt(&y, &y.words()[0]).unwrap();
        assert_eq!((z.clone(), m), (y.words()[0].clone(), Matched::Direct));

        // T(y_0)⌢y_1
        let x = w(2, "v_1 0 v_1 v_2 1");
        let (z, m) = approx_negt(&y, &x).unwrap();
        assert_eq!(m, Matched::Direct);
        assert_eq!(z, w(2, "0 0 v_1 v_2 1"));
        assert!(in_span_negt(&y, &z));
        assert!(dist_words(&x, &z) <= Distance::Finite(1));

        let x = y.words()[0].reflect().unwrap();
        let (z, m) = approx_negt(&y, &x).unwrap();
        assert_eq!((z, m), (y.words()[0].clone(), Matched::Reflected));

        assert_eq!(approx_negt(&y, &w(2, "v_2")), Err(Error::NotInSpan));
    }
}
