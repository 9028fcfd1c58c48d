use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A letter of the bitstring alphabet: a finitely supported 0/1 sequence,
/// stored as a bit mask (bit `i` is `σ(i)`).
///
/// The all-zero sequence is the distinguished letter `0`. A letter's
/// level is the least `n` with support inside `[0, n]`, so it belongs to
/// `L_n` of the full bitstring grading.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Letter(u64);

impl Letter {
    pub const ZERO: Letter = Letter(0);
    pub const MAX_BITS: usize = 64;

    pub fn from_mask(mask: u64) -> Letter {
        Letter(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// Parses an explicit bit list; trailing zeros are insignificant.
    pub fn from_bits(bits: &[u64]) -> Result<Letter> {
        let mut mask = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 if i < Self::MAX_BITS => mask |= 1 << i,
                1 => return Err(Error::LetterTooWide(i)),
                other => return Err(Error::InvalidBit(other)),
            }
        }
        Ok(Letter(mask))
    }

    /// Bits up to the highest set bit (empty for the zero letter).
    pub fn bits(self) -> Vec<u8> {
        let width = Self::MAX_BITS - self.0.leading_zeros() as usize;
        (0..width).map(|i| self.bit(i) as u8).collect()
    }

    pub fn bit(self, i: usize) -> bool {
        i < Self::MAX_BITS && (self.0 >> i) & 1 == 1
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn level(self) -> usize {
        (Self::MAX_BITS - self.0.leading_zeros() as usize).saturating_sub(1)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Letter({self})")
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bits().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u64>::deserialize(d)?;
        Letter::from_bits(&bits).map_err(serde::de::Error::custom)
    }
}

/// A graded alphabet `L_0 ⊆ L_1 ⊆ … ⊆ L_max` of bitstring letters with the
/// zero letter in `L_0`. Levels past `max` repeat `L_max`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    levels: Vec<Vec<Letter>>,
}

impl Alphabet {
    pub fn new(levels: Vec<Vec<Letter>>) -> Result<Alphabet> {
        if levels.is_empty() {
            return Err(Error::InvalidAlphabet("no levels".into()));
        }
        let mut sorted: Vec<Vec<Letter>> = Vec::with_capacity(levels.len());
        for (n, mut level) in levels.into_iter().enumerate() {
            level.sort();
            level.dedup();
            if level.is_empty() {
                return Err(Error::InvalidAlphabet(format!("level {n} is empty")));
            }
            if let Some(prev) = sorted.last() {
                if let Some(missing) = prev.iter().find(|l| level.binary_search(l).is_err()) {
                    return Err(Error::InvalidAlphabet(format!(
                        "letter {missing} of L_{} missing from L_{n}",
                        n - 1
                    )));
                }
            }
            sorted.push(level);
        }
        if sorted[0].binary_search(&Letter::ZERO).is_err() {
            return Err(Error::InvalidAlphabet("zero letter missing from L_0".into()));
        }
        Ok(Alphabet { levels: sorted })
    }

    /// The bitstring alphabet truncated to `cols` bit columns:
    /// `L_n = {σ : σ(i) = 0 for i > min(n, cols − 1)}` for `n ≤ max_level`.
    pub fn bitstrings(max_level: usize, cols: usize) -> Result<Alphabet> {
        if cols == 0 || cols > 16 {
            return Err(Error::InvalidAlphabet(format!(
                "bitstring alphabets support 1..=16 columns, got {cols}"
            )));
        }
        let levels = (0..=max_level)
            .map(|n| {
                let width = (n + 1).min(cols);
                (0..(1u64 << width)).map(Letter::from_mask).collect()
            })
            .collect();
        Alphabet::new(levels)
    }

    /// `L_n` (saturating at the top level).
    pub fn level(&self, n: usize) -> &[Letter] {
        &self.levels[n.min(self.levels.len() - 1)]
    }

    pub fn levels(&self) -> &[Vec<Letter>] {
        &self.levels
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn contains(&self, letter: Letter) -> bool {
        self.levels[self.max_level()].binary_search(&letter).is_ok()
    }

    pub fn contains_at(&self, letter: Letter, n: usize) -> bool {
        self.level(n).binary_search(&letter).is_ok()
    }

    /// Number of bit columns needed to write every letter: `1 + max level`.
    pub fn bit_width(&self) -> usize {
        1 + self.levels[self.max_level()]
            .iter()
            .map(|l| l.level())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Serialize, Deserialize)]
struct AlphabetRepr {
    levels: Vec<Vec<Letter>>,
    #[serde(default)]
    zero: Option<Letter>,
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlphabetRepr {
            levels: self.levels.clone(),
            zero: Some(Letter::ZERO),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = AlphabetRepr::deserialize(d)?;
        if let Some(zero) = repr.zero {
            if !zero.is_zero() {
                return Err(serde::de::Error::custom(
                    "the distinguished letter must be the all-zero bitstring",
                ));
            }
        }
        Alphabet::new(repr.levels).map_err(serde::de::Error::custom)
    }
}
