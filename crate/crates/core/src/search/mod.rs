//! Bounded searches for Ramsey witnesses over finite truncations, and the
//! independent checks that verify what they return.

mod colouring;
mod ghj;
mod pipeline;
mod vector;

use serde::{Deserialize, Serialize};

pub use colouring::{mix64, vector_families, Arity, Colouring, Rule};
pub use ghj::{
    search_ghj, verify_ghj_witness, word_ball, GhjProblem, GhjWitness, WordEvidence,
};
pub use pipeline::{
    parametrized_pipeline, verify_pipeline, PipelineProblem, PipelineReport, PipelineResult,
    SampleCheck,
};
pub use vector::{
    enumerate_universe, search_approx, search_exact, search_vectors, verify_witness, Evidence,
    SearchProblem, VectorWitness,
};

/// What an exhausted search explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Exhaustion {
    /// Partial sequences visited.
    pub nodes: u64,
    /// Partial sequences that could not be extended (pruned or dead ends).
    pub leaves: u64,
}

/// Result of a bounded search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome<W> {
    Witness(W),
    Exhausted(Exhaustion),
}

impl<W> Outcome<W> {
    pub fn witness(&self) -> Option<&W> {
        match self {
            Outcome::Witness(w) => Some(w),
            Outcome::Exhausted(_) => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, Outcome::Exhausted(_))
    }
}

/// A failed check in a verification report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// Canonical JSON of the offending element.
    pub element: String,
    pub reason: String,
}

/// Outcome of an independent re-check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub colour: u32,
    pub checked: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    fn new(colour: u32) -> VerifyReport {
        VerifyReport {
            ok: true,
            colour,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn fail(&mut self, element: String, reason: impl Into<String>) {
        self.ok = false;
        self.failures.push(Failure {
            element,
            reason: reason.into(),
        });
    }
}

/// All colours below `r` as a bit mask.
pub(crate) fn full_mask(r: u32) -> u64 {
    if r >= 64 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}

pub(crate) fn check_colour_count(r: u32) -> crate::Result<()> {
    if r > 64 {
        return Err(crate::Error::Problem(format!(
            "searches support at most 64 colours, got {r}"
        )));
    }
    Ok(())
}
