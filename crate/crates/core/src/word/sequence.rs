use std::collections::HashMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{tuple_arity, tuple_slot, Alphabet, Class, Letter, SubstitutionTuple, Symbol, Word};
use crate::error::{Error, Result};
use crate::vector::Mode;

/// A finite rapidly increasing sequence of `v_k`-words (resp. `v_±k`-words)
/// over a graded alphabet. Word `n` is graded at level `L_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarWordSequence {
    alphabet: Alphabet,
    words: Vec<Word>,
}

impl VarWordSequence {
    pub fn new(alphabet: Alphabet, words: Vec<Word>) -> Result<VarWordSequence> {
        let first = words.first().ok_or(Error::EmptySequence)?;
        let (k, mode) = (first.k(), first.mode());
        let mut total = 0usize;
        for (index, w) in words.iter().enumerate() {
            if w.mode() != mode {
                return Err(Error::ModeMismatch(mode, w.mode()));
            }
            if w.k() != k {
                return Err(Error::KMismatch(k, w.k()));
            }
            if w.classify() != Class::Variable(k) {
                return Err(Error::NotVariableWord { index, k });
            }
            if let Some(l) = w.letters().find(|&l| !alphabet.contains(l)) {
                return Err(Error::LetterNotInAlphabet(l.to_string()));
            }
            if w.len() <= total {
                return Err(Error::NotRapidlyIncreasing(index));
            }
            total += w.len();
        }
        Ok(VarWordSequence { alphabet, words })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn k(&self) -> u32 {
        self.words[0].k()
    }

    pub fn mode(&self) -> Mode {
        self.words[0].mode()
    }

    /// The first `n` words (at least one).
    pub fn prefix(&self, n: usize) -> Result<VarWordSequence> {
        if n == 0 || n > self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.len(),
            });
        }
        Ok(VarWordSequence {
            alphabet: self.alphabet.clone(),
            words: self.words[..n].to_vec(),
        })
    }

    /// `x_0⌢x_1⌢…`, the ambient finite word.
    pub fn concatenation(&self) -> Word {
        let symbols = self.words.iter().flat_map(|w| w.symbols().iter().copied()).collect();
        Word::from_parts(self.k(), self.mode(), symbols)
    }

    /// `|x_0| + … + |x_{n−1}|` for each `n`.
    pub fn offsets(&self) -> Vec<usize> {
        self.words
            .iter()
            .scan(0, |acc, w| {
                let start = *acc;
                *acc += w.len();
                Some(start)
            })
            .collect()
    }

    fn check_index(&self, index: usize) -> Result<&Word> {
        self.words.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.len(),
        })
    }

    /// `ε T^j(x_n[λ⃗])`, with the tuple graded at `L_n`.
    pub fn evaluate(&self, seg: &Segment) -> Result<Word> {
        let x = self.check_index(seg.index)?;
        let (k, mode) = (self.k(), self.mode());
        if seg.shift > k {
            return Err(Error::ShiftOutOfRange { shift: seg.shift, k });
        }
        match seg.sign {
            1 => {}
            -1 if mode == Mode::Signed => {}
            -1 => return Err(Error::SignInUnsignedMode),
            other => return Err(Error::InvalidSign(other)),
        }
        if let SubstitutionTuple::Letters(letters) = &seg.subst {
            if let Some(l) = letters
                .iter()
                .find(|&&l| !self.alphabet.contains_at(l, seg.index))
            {
                return Err(Error::Grading {
                    letter: l.to_string(),
                    level: seg.index,
                });
            }
        }
        let w = x.substitute(&seg.subst)?.tetris_pow(seg.shift);
        if seg.sign < 0 {
            w.reflect()
        } else {
            Ok(w)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    alphabet: Alphabet,
    words: Vec<Word>,
}

impl Serialize for VarWordSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SequenceRepr {
            alphabet: self.alphabet.clone(),
            words: self.words.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VarWordSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SequenceRepr::deserialize(d)?;
        VarWordSequence::new(r.alphabet, r.words).map_err(serde::de::Error::custom)
    }
}

/// One piece `ε T^j(x_n[λ⃗])` of a span element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub index: usize,
    pub sign: i32,
    pub shift: u32,
    pub subst: SubstitutionTuple,
}

impl Segment {
    /// The unmodified generator `x_n`.
    pub fn generator(index: usize) -> Segment {
        Segment {
            index,
            sign: 1,
            shift: 0,
            subst: SubstitutionTuple::Vars,
        }
    }

    /// Whether this is a `j = 0, λ⃗ = v⃗` piece (any sign).
    pub fn is_top(&self) -> bool {
        self.shift == 0 && self.subst == SubstitutionTuple::Vars
    }
}

/// Segments in strictly increasing generator order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Decomposition {
    pub segments: Vec<Segment>,
}

impl Decomposition {
    pub fn new(segments: Vec<Segment>) -> Decomposition {
        Decomposition { segments }
    }

    /// `supp_X(x)`: the generator indices used.
    pub fn support(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.index).collect()
    }

    pub fn has_top(&self) -> bool {
        self.segments.iter().any(Segment::is_top)
    }
}

/// `ε_0 T^{j_0}(x_{n_0}[λ⃗_0])⌢ … ⌢ε_l T^{j_l}(x_{n_l}[λ⃗_l])`.
pub fn compose(seq: &VarWordSequence, d: &Decomposition) -> Result<Word> {
    if d.segments.is_empty() {
        return Err(Error::EmptyWord);
    }
    if d.segments.windows(2).any(|w| w[0].index >= w[1].index) {
        return Err(Error::UnorderedSegments);
    }
    let mut symbols = Vec::new();
    for seg in &d.segments {
        symbols.extend_from_slice(seq.evaluate(seg)?.symbols());
    }
    Ok(Word::from_parts(seq.k(), seq.mode(), symbols))
}

/// The canonical segment reading `piece` as an image of generator `index`.
fn match_segment(seq: &VarWordSequence, index: usize, piece: &[Symbol]) -> Option<Segment> {
    let y = &seq.words[index];
    if y.len() != piece.len() {
        return None;
    }
    let (k, mode) = (seq.k(), seq.mode());
    let top = piece
        .iter()
        .filter_map(|s| match s {
            Symbol::Var(i) => Some(i.unsigned_abs()),
            _ => None,
        })
        .max();
    if let Some(m) = top {
        let shift = k - m;
        let image = y.tetris_pow(shift);
        if image.symbols() == piece {
            return Some(Segment {
                index,
                sign: 1,
                shift,
                subst: SubstitutionTuple::Vars,
            });
        }
        if mode == Mode::Signed
            && image
                .symbols()
                .iter()
                .zip(piece)
                .all(|(a, b)| a.reflect() == *b)
        {
            return Some(Segment {
                index,
                sign: -1,
                shift,
                subst: SubstitutionTuple::Vars,
            });
        }
        return None;
    }
    let mut tuple: Vec<Option<Letter>> = vec![None; tuple_arity(mode, k)];
    for (&ys, &ps) in y.symbols().iter().zip(piece) {
        let Symbol::Letter(p) = ps else { unreachable!() };
        match ys {
            Symbol::Letter(l) if l != p => return None,
            Symbol::Letter(_) => {}
            Symbol::Var(i) => {
                if !seq.alphabet.contains_at(p, index) {
                    return None;
                }
                let slot = &mut tuple[tuple_slot(mode, k, i)];
                match slot {
                    Some(prev) if *prev != p => return None,
                    _ => *slot = Some(p),
                }
            }
        }
    }
    Some(Segment {
        index,
        sign: 1,
        shift: 0,
        subst: SubstitutionTuple::Letters(
            tuple.into_iter().map(|l| l.unwrap_or(Letter::ZERO)).collect(),
        ),
    })
}

/// Splits `x` into canonical segments over `seq` without requiring a
/// `j = 0, λ⃗ = v⃗` piece. Boundaries come from a memoized search over
/// prefix lengths; rapid increase makes the index set unique.
pub fn parse_segments(seq: &VarWordSequence, x: &Word) -> Option<Decomposition> {
    if x.mode() != seq.mode() || x.k() != seq.k() {
        return None;
    }
    let lengths: Vec<usize> = seq.words.iter().map(Word::len).collect();
    let symbols = x.symbols();
    let mut dead: HashMap<(usize, usize), ()> = HashMap::new();

    fn go(
        seq: &VarWordSequence,
        lengths: &[usize],
        symbols: &[Symbol],
        pos: usize,
        from: usize,
        dead: &mut HashMap<(usize, usize), ()>,
        out: &mut Vec<Segment>,
    ) -> bool {
        if pos == symbols.len() {
            return !out.is_empty();
        }
        if dead.contains_key(&(pos, from)) {
            return false;
        }
        for n in from..lengths.len() {
            let end = pos + lengths[n];
            if end > symbols.len() {
                break;
            }
            if let Some(seg) = match_segment(seq, n, &symbols[pos..end]) {
                out.push(seg);
                if go(seq, lengths, symbols, end, n + 1, dead, out) {
                    return true;
                }
                out.pop();
            }
        }
        dead.insert((pos, from), ());
        false
    }

    let mut out = Vec::new();
    go(seq, &lengths, symbols, 0, 0, &mut dead, &mut out).then(|| Decomposition::new(out))
}

/// Canonical decomposition of `x` if `x ∈ [seq]_{Lv_k}` (resp. `Lv_±k`).
pub fn parse_support(seq: &VarWordSequence, x: &Word) -> Option<Decomposition> {
    parse_segments(seq, x).filter(Decomposition::has_top)
}

/// Whether `x ∈ [seq]_{(−T)}`: every variable segment has the form
/// `(−T)^j(x_n)`, i.e. `ε = (−1)^j`, and some segment is `x_n` itself.
pub fn in_span_negt(seq: &VarWordSequence, x: &Word) -> bool {
    let Some(d) = parse_segments(seq, x) else {
        return false;
    };
    let forms_ok = d.segments.iter().all(|s| {
        s.subst != SubstitutionTuple::Vars || s.sign == if s.shift % 2 == 0 { 1 } else { -1 }
    });
    forms_ok && d.has_top()
}

/// Whether every word of `xs` lies in the span of `ys` and the supports are
/// strictly increasing blocks.
pub fn is_block_subseq(xs: &[Word], ys: &VarWordSequence) -> bool {
    let mut last: Option<usize> = None;
    for x in xs {
        let Some(d) = parse_support(ys, x) else {
            return false;
        };
        let support = d.support();
        if let Some(prev) = last {
            if support[0] <= prev {
                return false;
            }
        }
        last = support.last().copied();
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> Alphabet {
        // L_0 = {0, a} with a = "1"
        Alphabet::bitstrings(3, 1).unwrap()
    }

    fn a() -> Letter {
        Letter::from_mask(1)
    }

    fn seq(mode: Mode, k: u32, words: &[&str]) -> VarWordSequence {
        VarWordSequence::new(
            alpha(),
            words.iter().map(|w| Word::parse(k, mode, w).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let w = |t: &str| Word::parse(1, Mode::Unsigned, t).unwrap();
        assert_eq!(
            VarWordSequence::new(alpha(), vec![w("v_1"), w("1")]),
            Err(Error::NotVariableWord { index: 1, k: 1 })
        );
        assert_eq!(
            VarWordSequence::new(alpha(), vec![w("v_1 1"), w("v_1 1")]),
            Err(Error::NotRapidlyIncreasing(1))
        );
        assert_eq!(VarWordSequence::new(alpha(), vec![]), Err(Error::EmptySequence));
    }

    #[test]
    fn compose_identity_and_full_shift() {
        let y = seq(Mode::Unsigned, 2, &["1 v_2 v_1"]);
        let d = Decomposition::new(vec![Segment::generator(0)]);
        assert_eq!(compose(&y, &d).unwrap(), y.words()[0]);
        let d = Decomposition::new(vec![Segment {
            shift: 2,
            ..Segment::generator(0)
        }]);
        assert_eq!(compose(&y, &d).unwrap().to_string(), "1 0 0");
    }

    #[test]
    fn compose_checks() {
        let y = seq(Mode::Unsigned, 1, &["v_1", "1 v_1"]);
        let bad = Decomposition::new(vec![Segment::generator(1), Segment::generator(0)]);
        assert_eq!(compose(&y, &bad), Err(Error::UnorderedSegments));
        let neg = Decomposition::new(vec![Segment {
            sign: -1,
            ..Segment::generator(0)
        }]);
        assert_eq!(compose(&y, &neg), Err(Error::SignInUnsignedMode));
        let b = Letter::from_mask(2);
        let wide = Decomposition::new(vec![Segment {
            subst: SubstitutionTuple::Letters(vec![b]),
            ..Segment::generator(0)
        }]);
        assert!(matches!(compose(&y, &wide), Err(Error::Grading { .. })));
    }

    #[test]
    fn parse_examples() {
        let y = seq(Mode::Unsigned, 1, &["v_1", "1 v_1 v_1"]);
        let d = parse_support(&y, &y.words()[0]).unwrap();
        assert_eq!(d.segments, vec![Segment::generator(0)]);

        let x = Word::parse(1, Mode::Unsigned, "1 1 v_1 v_1").unwrap();
        let d = parse_support(&y, &x).unwrap();
        assert_eq!(d.support(), vec![0, 1]);
        assert_eq!(d.segments[0].subst, SubstitutionTuple::Letters(vec![a()]));
        assert_eq!(compose(&y, &d).unwrap(), x);

        let odd = Word::parse(1, Mode::Unsigned, "v_1 v_1").unwrap();
        assert_eq!(parse_support(&y, &odd), None);
        // right length but no v_1 kept
        let flat = Word::parse(1, Mode::Unsigned, "0 1 1 1").unwrap();
        assert!(parse_segments(&y, &flat).is_some());
        assert_eq!(parse_support(&y, &flat), None);
    }

    #[test]
    fn signed_canonical_sign() {
        let y = seq(Mode::Signed, 2, &["v_2 v_-1"]);
        let x = Word::parse(2, Mode::Signed, "v_-2 v_1").unwrap();
        let d = parse_support(&y, &x).unwrap();
        assert_eq!(d.segments[0].sign, -1);
        let x = Word::parse(2, Mode::Signed, "v_-1 0").unwrap();
        let d = parse_segments(&y, &x).unwrap();
        assert_eq!((d.segments[0].sign, d.segments[0].shift), (-1, 1));
        assert!(in_span_negt(&seq(Mode::Signed, 2, &["v_1 v_2"]), &Word::parse(2, Mode::Signed, "v_1 v_2").unwrap()));
    }

    #[test]
    fn negt_membership() {
        let y = seq(Mode::Signed, 2, &["v_2", "v_1 v_2"]);
        let w = |t: &str| Word::parse(2, Mode::Signed, t).unwrap();
        assert!(in_span_negt(&y, &w("v_-1 v_1 v_2")));
        assert!(!in_span_negt(&y, &w("v_1 v_1 v_2")));
        assert!(in_span_negt(&y, &w("0 v_1 v_2")));
        assert!(!in_span_negt(&y, &w("v_-2 v_1 v_2")));
    }

    #[test]
    fn block_subsequences() {
        let y = seq(Mode::Unsigned, 1, &["v_1", "1 v_1", "v_1 v_1 1 v_1"]);
        assert!(is_block_subseq(y.words(), &y));
        let c0 = y.words()[0].clone();
        let c12 = compose(
            &y,
            &Decomposition::new(vec![Segment::generator(1), Segment::generator(2)]),
        )
        .unwrap();
        assert!(is_block_subseq(&[c0.clone(), c12.clone()], &y));
        assert!(!is_block_subseq(&[c12, c0.clone()], &y));
        let c01 = compose(
            &y,
            &Decomposition::new(vec![Segment::generator(0), Segment::generator(1)]),
        )
        .unwrap();
        assert!(!is_block_subseq(&[c0, c01], &y));
    }
}
