//! Variable words over a graded alphabet.
//!
//! Unsigned words use variables `v_1, …, v_k`; signed words use
//! `v_{±1}, …, v_{±k}`. A [`Word`] is any element of the semigroup
//! `S = W_L ∪ ⋃_i W_{Lv_i}`; its `k` is the ambient variable bound, not its
//! class (see [`Word::classify`]).

mod halving;
mod letter;
mod metric;
mod sequence;
pub(crate) mod span;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::vector::Mode;

pub use halving::{approx_negt, halve, lift_double, widen_tuple, Matched};
pub use letter::{Alphabet, Letter};
pub use metric::{compatible, dist_seqs, dist_words};
pub use sequence::{
    compose, in_span_negt, is_block_subseq, parse_segments, parse_support, Decomposition,
    Segment, VarWordSequence,
};
pub use span::{span_by_filter, span_letters, span_negt, span_words, SpanKind};

/// A letter or a variable `v_i` (`i` nonzero; negative only in signed mode).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    Letter(Letter),
    Var(i32),
}

impl Symbol {
    /// Position on the line used by the word metric: `v_i ↦ i`, zero letter
    /// `↦ 0`. `None` for nonzero letters.
    pub fn metric_value(self) -> Option<i32> {
        match self {
            Symbol::Var(i) => Some(i),
            Symbol::Letter(l) if l.is_zero() => Some(0),
            Symbol::Letter(_) => None,
        }
    }

    pub fn is_var(self) -> bool {
        matches!(self, Symbol::Var(_))
    }

    /// One tetris step: `v_{±i} ↦ v_{±(i−1)}`, `v_{±1} ↦ 0`, letters fixed.
    pub fn tetris(self) -> Symbol {
        match self {
            Symbol::Var(i) if i.abs() == 1 => Symbol::Letter(Letter::ZERO),
            Symbol::Var(i) => Symbol::Var(i - i.signum()),
            letter => letter,
        }
    }

    pub fn reflect(self) -> Symbol {
        match self {
            Symbol::Var(i) => Symbol::Var(-i),
            letter => letter,
        }
    }
}

// Letters before variables; variables by |index|, positive first.
impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Symbol::Letter(a), Symbol::Letter(b)) => a.cmp(b),
            (Symbol::Letter(_), Symbol::Var(_)) => Ordering::Less,
            (Symbol::Var(_), Symbol::Letter(_)) => Ordering::Greater,
            (Symbol::Var(a), Symbol::Var(b)) => (a.abs(), *a < 0).cmp(&(b.abs(), *b < 0)),
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Letter(l) => write!(f, "{l}"),
            Symbol::Var(i) => write!(f, "v_{i}"),
        }
    }
}

/// `W_L` or `W_{Lv_i}` membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    VariableFree,
    Variable(u32),
}

/// Position in a substitution tuple of the letter replacing `v_index`.
///
/// Unsigned tuples are `(λ_1, …, λ_k)`; signed tuples are
/// `(λ_{−k}, …, λ_{−1}, λ_1, …, λ_k)`.
pub fn tuple_slot(mode: Mode, k: u32, index: i32) -> usize {
    let k = k as i32;
    let slot = match mode {
        Mode::Unsigned => index - 1,
        Mode::Signed if index < 0 => k + index,
        Mode::Signed => k + index - 1,
    };
    slot as usize
}

/// Length of a substitution tuple: `k` unsigned, `2k` signed.
pub fn tuple_arity(mode: Mode, k: u32) -> usize {
    match mode {
        Mode::Unsigned => k as usize,
        Mode::Signed => 2 * k as usize,
    }
}

/// `λ⃗`: either the variables themselves (`v⃗`) or one letter per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubstitutionTuple {
    Vars,
    Letters(Vec<Letter>),
}

impl Serialize for SubstitutionTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SubstitutionTuple::Vars => s.serialize_str("vars"),
            SubstitutionTuple::Letters(l) => l.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SubstitutionTuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Tag(String),
            Letters(Vec<Letter>),
        }
        match Repr::deserialize(d)? {
            Repr::Tag(t) if t == "vars" => Ok(SubstitutionTuple::Vars),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!(
                "expected \"vars\" or a letter list, got {t:?}"
            ))),
            Repr::Letters(l) => Ok(SubstitutionTuple::Letters(l)),
        }
    }
}

/// A word over the alphabet and the variables of bound `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    k: u32,
    mode: Mode,
    symbols: Vec<Symbol>,
}

impl Word {
    pub fn new(k: u32, mode: Mode, symbols: Vec<Symbol>) -> Result<Word> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        for &s in &symbols {
            if let Symbol::Var(i) = s {
                let ok = match mode {
                    Mode::Unsigned => i >= 1 && i <= k as i32,
                    Mode::Signed => i != 0 && i.abs() <= k as i32,
                };
                if !ok {
                    return Err(Error::VariableOutOfRange { index: i, k, mode });
                }
            }
        }
        Ok(Word { k, mode, symbols })
    }

    pub(crate) fn from_parts(k: u32, mode: Mode, symbols: Vec<Symbol>) -> Word {
        debug_assert!(Word::new(k, mode, symbols.clone()).is_ok());
        Word { k, mode, symbols }
    }

    /// Parses the whitespace-separated display form, e.g. `"v_1 0 101 v_-2"`.
    /// Letters are written as bit strings (`0` is the zero letter).
    pub fn parse(k: u32, mode: Mode, text: &str) -> Result<Word> {
        let symbols = text
            .split_whitespace()
            .map(|tok| {
                if let Some(idx) = tok.strip_prefix("v_") {
                    let i = idx
                        .trim_start_matches('{')
                        .trim_end_matches('}')
                        .replace('−', "-")
                        .parse::<i32>()
                        .map_err(|e| Error::Json(format!("bad variable {tok:?}: {e}")))?;
                    Ok(Symbol::Var(i))
                } else {
                    let bits = tok
                        .chars()
                        .map(|c| match c {
                            '0' => Ok(0),
                            '1' => Ok(1),
                            _ => Err(Error::Json(format!("bad letter {tok:?}"))),
                        })
                        .collect::<Result<Vec<u64>>>()?;
                    Ok(Symbol::Letter(Letter::from_bits(&bits)?))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(k, mode, symbols)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    fn check_same_shape(&self, other: &Word) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::ModeMismatch(self.mode, other.mode));
        }
        if self.k != other.k {
            return Err(Error::KMismatch(self.k, other.k));
        }
        Ok(())
    }

    /// `x⌢y`.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.check_same_shape(other)?;
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Ok(Word::from_parts(self.k, self.mode, symbols))
    }

    /// `x[λ⃗]`: replaces every `v_i` by `λ_i`; `v⃗` leaves `x` unchanged.
    pub fn substitute(&self, tuple: &SubstitutionTuple) -> Result<Word> {
        let letters = match tuple {
            SubstitutionTuple::Vars => return Ok(self.clone()),
            SubstitutionTuple::Letters(l) => l,
        };
        let arity = tuple_arity(self.mode, self.k);
        if letters.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                got: letters.len(),
            });
        }
        Ok(self.map(|s| match s {
            Symbol::Var(i) => Symbol::Letter(letters[tuple_slot(self.mode, self.k, i)]),
            letter => letter,
        }))
    }

    /// Replaces every variable by the single letter `letter`.
    pub fn substitute_all(&self, letter: Letter) -> Word {
        self.map(|s| if s.is_var() { Symbol::Letter(letter) } else { s })
    }

    pub(crate) fn map(&self, f: impl Fn(Symbol) -> Symbol) -> Word {
        Word {
            k: self.k,
            mode: self.mode,
            symbols: self.symbols.iter().map(|&s| f(s)).collect(),
        }
    }

    /// The tetris operation on words; fixes variable-free words.
    pub fn tetris(&self) -> Word {
        self.map(Symbol::tetris)
    }

    /// `T^shift(x)`.
    pub fn tetris_pow(&self, shift: u32) -> Word {
        let s = shift as i32;
        self.map(|sym| match sym {
            Symbol::Var(i) if i.abs() <= s => Symbol::Letter(Letter::ZERO),
            Symbol::Var(i) => Symbol::Var(i - s * i.signum()),
            letter => letter,
        })
    }

    /// `−x`: every `v_i` becomes `v_{−i}` (signed mode only).
    pub fn reflect(&self) -> Result<Word> {
        if self.mode != Mode::Signed {
            return Err(Error::RequiresSigned);
        }
        Ok(self.map(Symbol::reflect))
    }

    /// `−T(x)`.
    pub fn neg_tetris(&self) -> Result<Word> {
        self.tetris().reflect()
    }

    /// `W_L` or the largest `|i|` with `v_i` occurring.
    pub fn classify(&self) -> Class {
        match self
            .symbols
            .iter()
            .filter_map(|s| match s {
                Symbol::Var(i) => Some(i.unsigned_abs()),
                _ => None,
            })
            .max()
        {
            None => Class::VariableFree,
            Some(i) => Class::Variable(i),
        }
    }

    pub fn has_vars(&self) -> bool {
        self.symbols.iter().any(|s| s.is_var())
    }

    /// Letters occurring in the word.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.symbols.iter().filter_map(|s| match s {
            Symbol::Letter(l) => Some(*l),
            _ => None,
        })
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.symbols
            .cmp(&other.symbols)
            .then(self.k.cmp(&other.k))
            .then(self.mode.cmp(&other.mode))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WordRepr {
    k: u32,
    mode: Mode,
    symbols: Vec<Symbol>,
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WordRepr {
            k: self.k,
            mode: self.mode,
            symbols: self.symbols.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = WordRepr::deserialize(d)?;
        Word::new(r.k, r.mode, r.symbols).map_err(serde::de::Error::custom)
    }
}

/// `|x_n| > Σ_{i<n} |x_i|` for every `n`.
pub fn is_rapidly_increasing(words: &[Word]) -> bool {
    lengths_rapidly_increasing(words.iter().map(Word::len))
}

pub fn lengths_rapidly_increasing(lengths: impl IntoIterator<Item = usize>) -> bool {
    let mut total = 0usize;
    for len in lengths {
        if len <= total {
            return false;
        }
        total += len;
    }
    true
}
