//! Canonical JSON: object keys sorted, no insignificant whitespace.
//!
//! `serde_json::Value` keeps objects in a `BTreeMap` (the `preserve_order`
//! feature is not enabled), so a round trip through `Value` sorts keys.

use serde::Serialize;

use crate::error::Result;
use crate::vector::{BlockSequence, BlockVector, BlockVectorRepr, Mode};

pub fn to_canonical_value<T: Serialize + ?Sized>(value: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(value)?)
}

pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(&to_canonical_value(value)?)?)
}

/// Parses one block vector, taking `k` and `mode` from the defaults when
/// the object omits them.
pub fn parse_block_vector(text: &str, k: Option<u32>, mode: Option<Mode>) -> Result<BlockVector> {
    let repr: BlockVectorRepr = serde_json::from_str(text)?;
    repr.build(k, mode)
}

/// Parses an array of block vectors into a block sequence, with the same
/// defaulting as [`parse_block_vector`].
pub fn parse_block_sequence(text: &str, k: Option<u32>, mode: Option<Mode>) -> Result<BlockSequence> {
    let reprs: Vec<BlockVectorRepr> = serde_json::from_str(text)?;
    let elements = reprs
        .into_iter()
        .map(|r| r.build(k, mode))
        .collect::<Result<Vec<_>>>()?;
    BlockSequence::new(elements)
}
