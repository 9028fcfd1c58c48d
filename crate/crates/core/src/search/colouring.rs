use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::encoding::ParamMatrix;
use crate::error::{Error, Result};
use crate::json::to_canonical_string;
use crate::vector::{BlockSequence, BlockVector};
use crate::word::{Symbol, Word};

/// What a colouring is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arity {
    /// Block vectors.
    Vector,
    /// Single words.
    Word,
    /// Pairs (block sequence, parameter matrix).
    Pair,
}

/// The colouring rule. Every built-in family reduces into `[0, r)` with
/// `rem_euclid`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Rule {
    /// `p(min supp p)`.
    ValueAtMinSupport,
    /// `|supp p|`.
    SupportSizeMod,
    /// `min supp p`.
    MinPositionMod,
    /// `Σ (n+1)·p(n)`.
    WeightedSumMod,
    /// 0 if `p(min supp p) > 0`, else 1.
    SignAtMinSupport,
    Constant {
        #[serde(default)]
        colour: u32,
    },
    /// `|x|`.
    LengthMod,
    /// 0 if the first variable of `x` has positive index, else 1.
    FirstVariableSign,
    /// Bit `(row, col)` of the matrix (0 outside its bounds).
    MatrixBit { row: usize, col: usize },
    /// Number of blocks of `A`.
    BlockCountMod,
    /// A 64-bit hash of the canonical serialization mixed with `seed`.
    Random { seed: u64 },
    /// Explicit colours keyed by canonical serialization.
    Table { entries: BTreeMap<String, u32> },
}

impl Rule {
    fn supports(&self, arity: Arity) -> bool {
        use Rule::*;
        match self {
            Constant { .. } | Random { .. } | Table { .. } => true,
            ValueAtMinSupport | SupportSizeMod | MinPositionMod | WeightedSumMod
            | SignAtMinSupport => arity == Arity::Vector,
            LengthMod | FirstVariableSign => arity == Arity::Word,
            MatrixBit { .. } | BlockCountMod => arity == Arity::Pair,
        }
    }
}

#[derive(Deserialize)]
struct ColouringRepr {
    arity: Arity,
    colours: u32,
    #[serde(flatten)]
    rule: Rule,
}

/// A finite colouring `c : U → r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ColouringRepr")]
pub struct Colouring {
    arity: Arity,
    colours: u32,
    #[serde(flatten)]
    rule: Rule,
}

impl TryFrom<ColouringRepr> for Colouring {
    type Error = Error;

    fn try_from(r: ColouringRepr) -> Result<Colouring> {
        Colouring::new(r.arity, r.colours, r.rule)
    }
}

/// FNV-1a over the bytes, xored with the seed, then the splitmix64
/// finalizer.
pub fn mix64(bytes: &[u8], seed: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = h ^ seed;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Serialize)]
struct PairKey<'a> {
    blocks: &'a BlockSequence,
    matrix: &'a ParamMatrix,
}

impl Colouring {
    pub fn new(arity: Arity, colours: u32, rule: Rule) -> Result<Colouring> {
        if colours == 0 {
            return Err(Error::Colouring("at least one colour is required".into()));
        }
        if !rule.supports(arity) {
            return Err(Error::Colouring(format!(
                "family {} does not apply to {arity:?} colourings",
                family_name(&rule)
            )));
        }
        match &rule {
            Rule::Constant { colour } if *colour >= colours => {
                return Err(Error::Colouring(format!("colour {colour} is not below {colours}")));
            }
            Rule::Table { entries } => {
                if let Some((key, c)) = entries.iter().find(|(_, &c)| c >= colours) {
                    return Err(Error::Colouring(format!(
                        "table entry {key} has colour {c}, not below {colours}"
                    )));
                }
            }
            _ => {}
        }
        Ok(Colouring { arity, colours, rule })
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn colours(&self) -> u32 {
        self.colours
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    fn reduce(&self, value: i64) -> u32 {
        value.rem_euclid(self.colours as i64) as u32
    }

    fn keyed<T: Serialize + ?Sized>(&self, item: &T) -> Result<u32> {
        let key = to_canonical_string(item)?;
        match &self.rule {
            Rule::Random { seed } => Ok((mix64(key.as_bytes(), *seed) % self.colours as u64) as u32),
            Rule::Table { entries } => entries
                .get(&key)
                .copied()
                .ok_or_else(|| Error::Colouring(format!("no table entry for {key}"))),
            _ => unreachable!("only keyed families reach here"),
        }
    }

    fn check_arity(&self, arity: Arity) -> Result<()> {
        if self.arity != arity {
            return Err(Error::Colouring(format!(
                "a {:?} colouring cannot colour a {arity:?}",
                self.arity
            )));
        }
        Ok(())
    }

    pub fn colour_vector(&self, p: &BlockVector) -> Result<u32> {
        self.check_arity(Arity::Vector)?;
        let (first_pos, first_val) = p.entries()[0];
        Ok(match &self.rule {
            Rule::ValueAtMinSupport => self.reduce(first_val as i64),
            Rule::SupportSizeMod => self.reduce(p.entries().len() as i64),
            Rule::MinPositionMod => self.reduce(first_pos as i64),
            Rule::WeightedSumMod => self.reduce(
                p.entries()
                    .iter()
                    .map(|&(n, v)| (n as i64 + 1) * v as i64)
                    .sum(),
            ),
            Rule::SignAtMinSupport => self.reduce(if first_val > 0 { 0 } else { 1 }),
            Rule::Constant { colour } => *colour,
            Rule::Random { .. } | Rule::Table { .. } => return self.keyed(p),
            _ => unreachable!("checked in Colouring::new"),
        })
    }

    pub fn colour_word(&self, x: &Word) -> Result<u32> {
        self.check_arity(Arity::Word)?;
        Ok(match &self.rule {
            Rule::LengthMod => self.reduce(x.len() as i64),
            Rule::FirstVariableSign => {
                let negative = x
                    .symbols()
                    .iter()
                    .find_map(|s| match s {
                        Symbol::Var(i) => Some(*i < 0),
                        _ => None,
                    })
                    .unwrap_or(false);
                self.reduce(negative as i64)
            }
            Rule::Constant { colour } => *colour,
            Rule::Random { .. } | Rule::Table { .. } => return self.keyed(x),
            _ => unreachable!("checked in Colouring::new"),
        })
    }

    pub fn colour_pair(&self, blocks: &BlockSequence, matrix: &ParamMatrix) -> Result<u32> {
        self.check_arity(Arity::Pair)?;
        Ok(match &self.rule {
            Rule::MatrixBit { row, col } => matrix.get(*row, *col) as u32 % self.colours,
            Rule::BlockCountMod => self.reduce(blocks.len() as i64),
            Rule::Constant { colour } => *colour,
            Rule::Random { .. } | Rule::Table { .. } => {
                return self.keyed(&PairKey { blocks, matrix })
            }
            _ => unreachable!("checked in Colouring::new"),
        })
    }
}

pub(crate) fn family_name(rule: &Rule) -> String {
    match serde_json::to_value(rule) {
        Ok(serde_json::Value::Object(map)) => map
            .get("family")
            .and_then(|f| f.as_str())
            .unwrap_or("?")
            .to_string(),
        _ => "?".to_string(),
    }
}

/// The built-in vector families (parameter-free), in a fixed order.
pub fn vector_families() -> Vec<Rule> {
    vec![
        Rule::ValueAtMinSupport,
        Rule::SupportSizeMod,
        Rule::MinPositionMod,
        Rule::WeightedSumMod,
        Rule::SignAtMinSupport,
    ]
}
