use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_colour_count, full_mask, Colouring, Exhaustion, Outcome, VerifyReport};
use crate::error::{Error, Result};
use crate::json::to_canonical_string;
use crate::vector::{span_by_filter, BlockSequence, BlockVector, Mode};

/// A bounded block-sequence search: `m` blocks supported in `[0, N)`, `r`
/// colours, and approximation radius `ε` (0 = exact).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchProblem {
    pub mode: Mode,
    pub k: u32,
    pub colours: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub radius: u32,
}

impl SearchProblem {
    fn validate(&self, colouring: &Colouring) -> Result<()> {
        if self.k == 0 {
            return Err(Error::ZeroK);
        }
        if self.n == 0 || self.m == 0 {
            return Err(Error::Problem("N and m must be positive".into()));
        }
        if colouring.colours() != self.colours {
            return Err(Error::Problem(format!(
                "problem has {} colours but the colouring has {}",
                self.colours,
                colouring.colours()
            )));
        }
        check_colour_count(self.colours)?;
        let size = (2 * self.k as u128 + 1).checked_pow(self.n as u32);
        if size.is_none_or(|s| s > 50_000_000) {
            return Err(Error::Problem("universe too large to enumerate".into()));
        }
        Ok(())
    }
}

/// Every vector of `FIN_k` / `FIN_±k` supported in `[0, N)`, in canonical
/// order (by entries, so by minimum support first).
pub fn enumerate_universe(k: u32, n: usize, mode: Mode) -> Vec<BlockVector> {
    let k = k as i32;
    let values: Vec<i32> = match mode {
        Mode::Unsigned => (0..=k).collect(),
        Mode::Signed => (-k..=k).collect(),
    };
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    let zero = values.iter().position(|&v| v == 0).expect("0 is a value");
    loop {
        let entries: Vec<(usize, i32)> = digits
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d != zero)
            .map(|(pos, &d)| (pos, values[d]))
            .collect();
        if entries.iter().any(|&(_, v)| v.abs() == k) {
            out.push(BlockVector::new(k as u32, mode, entries).expect("valid by construction"));
        }
        let mut pos = 0;
        loop {
            if pos == n {
                out.sort();
                return out;
            }
            digits[pos] += 1;
            if digits[pos] < values.len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Each universe element with its colour and the colours met by its
/// `radius`-ball inside the universe.
struct Universe {
    elements: Vec<BlockVector>,
    index: HashMap<Vec<(usize, i32)>, usize>,
    colours: Vec<u32>,
    masks: Vec<u64>,
    /// `first_from[p]`: index of the first element with min support ≥ p.
    first_from: Vec<usize>,
}

/// All vectors in the universe within ℓ∞ distance `radius` of `p`.
fn ball(p: &BlockVector, n: usize, radius: u32) -> Vec<Vec<(usize, i32)>> {
    let k = p.k() as i32;
    let lo = if p.mode() == Mode::Signed { -k } else { 0 };
    let r = radius as i32;
    let ranges: Vec<(i32, i32)> = (0..n)
        .map(|pos| {
            let v = p.get(pos);
            ((v - r).max(lo), (v + r).min(k))
        })
        .collect();
    let mut current: Vec<i32> = ranges.iter().map(|&(a, _)| a).collect();
    let mut out = Vec::new();
    loop {
        if current.iter().any(|v| v.abs() == k) {
            out.push(
                current
                    .iter()
                    .enumerate()
                    .filter(|&(_, &v)| v != 0)
                    .map(|(pos, &v)| (pos, v))
                    .collect(),
            );
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return out;
            }
            current[pos] += 1;
            if current[pos] <= ranges[pos].1 {
                break;
            }
            current[pos] = ranges[pos].0;
            pos += 1;
        }
    }
}

impl Universe {
    fn build(problem: &SearchProblem, colouring: &Colouring) -> Result<Universe> {
        let elements = enumerate_universe(problem.k, problem.n, problem.mode);
        let index: HashMap<_, _> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.entries().to_vec(), i))
            .collect();
        let colours = elements
            .par_iter()
            .map(|p| colouring.colour_vector(p))
            .collect::<Result<Vec<_>>>()?;
        let masks = if problem.radius == 0 {
            colours.iter().map(|&c| 1u64 << c).collect()
        } else {
            elements
                .par_iter()
                .map(|p| {
                    ball(p, problem.n, problem.radius)
                        .into_iter()
                        .fold(0u64, |m, q| m | 1u64 << colours[index[&q]])
                })
                .collect()
        };
        let mut first_from = vec![elements.len(); problem.n + 1];
        for (i, p) in elements.iter().enumerate().rev() {
            first_from[p.min_support()] = i;
        }
        for pos in (0..problem.n).rev() {
            first_from[pos] = first_from[pos].min(first_from[pos + 1]);
        }
        Ok(Universe {
            elements,
            index,
            colours,
            masks,
            first_from,
        })
    }

    fn mask_of(&self, entries: &[(usize, i32)]) -> u64 {
        self.masks[self.index[entries]]
    }
}

/// Partial sums over the blocks chosen so far: `(entries, has_unshifted)`,
/// starting from the empty sum.
type Relaxed = Vec<(Vec<(usize, i32)>, bool)>;

struct Dfs<'a> {
    universe: &'a Universe,
    m: usize,
    nodes: &'a AtomicU64,
    leaves: &'a AtomicU64,
}

impl Dfs<'_> {
    /// Extends `relaxed` by block `p`, intersecting `mask` with the masks of
    /// the new span elements. `None` if the mask empties.
    fn push(&self, relaxed: &Relaxed, p: &BlockVector, mut mask: u64) -> Option<(Relaxed, u64)> {
        let mut next = relaxed.clone();
        for shift in 0..p.k() {
            for &sign in p.mode().signs() {
                let piece = p.shifted_entries(shift, sign);
                for (entries, top) in relaxed {
                    let mut sum = entries.clone();
                    sum.extend_from_slice(&piece);
                    let top = *top || shift == 0;
                    if top {
                        mask &= self.universe.mask_of(&sum);
                        if mask == 0 {
                            return None;
                        }
                    }
                    next.push((sum, top));
                }
            }
        }
        Some((next, mask))
    }

    fn go(&self, chosen: &mut Vec<usize>, relaxed: &Relaxed, mask: u64) -> Option<(Vec<usize>, u64)> {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        if chosen.len() == self.m {
            return Some((chosen.clone(), mask));
        }
        let last = *chosen.last().expect("roots are pushed by the caller");
        let start_pos = self.universe.elements[last].max_support() + 1;
        let start = self.universe.first_from[start_pos.min(self.universe.first_from.len() - 1)];
        let mut extended = false;
        for i in start..self.universe.elements.len() {
            if let Some((rel, msk)) = self.push(relaxed, &self.universe.elements[i], mask) {
                extended = true;
                chosen.push(i);
                if let Some(found) = self.go(chosen, &rel, msk) {
                    return Some(found);
                }
                chosen.pop();
            }
        }
        if !extended {
            self.leaves.fetch_add(1, Ordering::Relaxed);
        }
        None
    }

    fn root(&self, i: usize, r: u32) -> Option<(Vec<usize>, u64)> {
        let empty: Relaxed = vec![(Vec::new(), false)];
        match self.push(&empty, &self.universe.elements[i], full_mask(r)) {
            Some((rel, mask)) => self.go(&mut vec![i], &rel, mask),
            None => {
                self.nodes.fetch_add(1, Ordering::Relaxed);
                self.leaves.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }
}

/// One span element of a witness with its own colour and, for `ε > 0`, the
/// least universe element within distance `ε` carrying the witness colour.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub element: BlockVector,
    pub colour: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbour: Option<BlockVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorWitness {
    pub problem: SearchProblem,
    pub blocks: BlockSequence,
    pub colour: u32,
    pub span: Vec<Evidence>,
}

/// Least block sequence (in universe order) whose span lies in the
/// `ε`-fattening of one colour class; `ε = 0` asks for a monochromatic span.
pub fn search_vectors(
    problem: &SearchProblem,
    colouring: &Colouring,
    parallel: bool,
) -> Result<Outcome<VectorWitness>> {
    problem.validate(colouring)?;
    let universe = Universe::build(problem, colouring)?;
    let nodes = AtomicU64::new(0);
    let leaves = AtomicU64::new(0);
    let dfs = Dfs {
        universe: &universe,
        m: problem.m,
        nodes: &nodes,
        leaves: &leaves,
    };
    let roots = 0..universe.elements.len();
    let found = if parallel {
        roots
            .into_par_iter()
            .find_map_first(|i| dfs.root(i, problem.colours))
    } else {
        roots.into_iter().find_map(|i| dfs.root(i, problem.colours))
    };
    let Some((chosen, mask)) = found else {
        return Ok(Outcome::Exhausted(Exhaustion {
            nodes: nodes.into_inner(),
            leaves: leaves.into_inner(),
        }));
    };
    let colour = mask.trailing_zeros();
    let blocks = BlockSequence::new(chosen.iter().map(|&i| universe.elements[i].clone()).collect())?;
    let span = crate::vector::span(&blocks)?
        .into_iter()
        .map(|element| {
            let idx = universe.index[element.entries()];
            let neighbour = (problem.radius > 0).then(|| {
                let mut near: Vec<usize> = ball(&element, problem.n, problem.radius)
                    .into_iter()
                    .map(|q| universe.index[&q])
                    .filter(|&j| universe.colours[j] == colour)
                    .collect();
                near.sort();
                universe.elements[near[0]].clone()
            });
            Evidence {
                colour: universe.colours[idx],
                element,
                neighbour,
            }
        })
        .collect();
    Ok(Outcome::Witness(VectorWitness {
        problem: *problem,
        blocks,
        colour,
        span,
    }))
}

/// Exact search: `[P]_k` (or `[P]_±k`) monochromatic.
pub fn search_exact(
    problem: &SearchProblem,
    colouring: &Colouring,
    parallel: bool,
) -> Result<Outcome<VectorWitness>> {
    if problem.radius != 0 {
        return Err(Error::Problem("exact search needs radius 0".into()));
    }
    search_vectors(problem, colouring, parallel)
}

/// Approximate search in `FIN_±k`: `[P]_±k ⊆ (c^{-1}{i})_ε`.
pub fn search_approx(
    problem: &SearchProblem,
    colouring: &Colouring,
    parallel: bool,
) -> Result<Outcome<VectorWitness>> {
    if problem.mode != Mode::Signed {
        return Err(Error::RequiresSigned);
    }
    search_vectors(problem, colouring, parallel)
}

/// Re-checks a witness from scratch: the span is regenerated by
/// generate-then-filter, colours are re-evaluated, and for `ε > 0` each
/// element's neighbourhood is found by scanning the universe.
pub fn verify_witness(witness: &VectorWitness, colouring: &Colouring) -> Result<VerifyReport> {
    let problem = &witness.problem;
    let mut report = VerifyReport::new(witness.colour);
    let blocks = &witness.blocks;
    if blocks.len() != problem.m {
        report.fail(
            to_canonical_string(blocks)?,
            format!("expected {} blocks, found {}", problem.m, blocks.len()),
        );
    }
    if blocks.shape() != Some((problem.k, problem.mode)) {
        report.fail(to_canonical_string(blocks)?, "blocks do not match the problem's k and mode");
        return Ok(report);
    }
    if let Some(p) = blocks.elements().iter().find(|p| p.max_support() >= problem.n) {
        report.fail(to_canonical_string(p)?, "block leaves the position bound");
        return Ok(report);
    }
    let span: BTreeSet<BlockVector> = span_by_filter(blocks)?.into_iter().collect();
    let universe = if problem.radius > 0 {
        enumerate_universe(problem.k, problem.n, problem.mode)
    } else {
        Vec::new()
    };
    for element in &span {
        report.checked += 1;
        let own = colouring.colour_vector(element)?;
        if own == witness.colour {
            continue;
        }
        let near = problem.radius > 0
            && universe.iter().any(|q| {
                element.linf_dist(q) <= problem.radius
                    && colouring.colour_vector(q).is_ok_and(|c| c == witness.colour)
            });
        if !near {
            report.fail(
                to_canonical_string(element)?,
                format!(
                    "colour {own} and no element within distance {} has colour {}",
                    problem.radius, witness.colour
                ),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{Arity, Rule};

    fn vc(r: u32, rule: Rule) -> Colouring {
        Colouring::new(Arity::Vector, r, rule).unwrap()
    }

    fn problem(mode: Mode, k: u32, n: usize, m: usize, radius: u32) -> SearchProblem {
        SearchProblem {
            mode,
            k,
            colours: 2,
            n,
            m,
            radius,
        }
    }

    #[test]
    fn universe_sizes() {
        assert_eq!(enumerate_universe(1, 3, Mode::Unsigned).len(), 7);
        assert_eq!(enumerate_universe(2, 2, Mode::Unsigned).len(), 5);
        assert_eq!(enumerate_universe(1, 2, Mode::Signed).len(), 8);
        let u = enumerate_universe(2, 3, Mode::Signed);
        assert!(u.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn structured_outcomes() {
        let c = vc(2, Rule::SupportSizeMod);
        let out = search_exact(&problem(Mode::Unsigned, 1, 4, 2, 0), &c, false).unwrap();
        let w = out.witness().unwrap();
        assert!(w.span.iter().all(|e| e.colour == w.colour));

        let c = vc(2, Rule::MinPositionMod);
        let out = search_exact(&problem(Mode::Unsigned, 1, 4, 2, 0), &c, false).unwrap();
        assert!(out.witness().is_some());
        let out = search_exact(&problem(Mode::Unsigned, 1, 2, 2, 0), &c, false).unwrap();
        assert!(out.is_exhausted());

        let c = vc(2, Rule::SignAtMinSupport);
        let out = search_approx(&problem(Mode::Signed, 2, 6, 2, 1), &c, false).unwrap();
        let w = out.witness().unwrap();
        assert!(verify_witness(w, &c).unwrap().ok);
    }

    #[test]
    fn parallel_matches_sequential() {
        let c = vc(2, Rule::WeightedSumMod);
        for n in 2..=4 {
            let p = problem(Mode::Signed, 1, n, 2, 0);
            let a = search_exact(&p, &c, false).unwrap();
            let b = search_exact(&p, &c, true).unwrap();
            assert_eq!(a.witness(), b.witness());
        }
    }

    #[test]
    fn corrupted_witness_fails() {
        let c = vc(2, Rule::MinPositionMod);
        let out = search_exact(&problem(Mode::Unsigned, 1, 4, 2, 0), &c, false).unwrap();
        let mut w = out.witness().unwrap().clone();
        assert!(verify_witness(&w, &c).unwrap().ok);
        let bad = BlockVector::new(1, Mode::Unsigned, vec![(1, 1)]).unwrap();
        let mut blocks = w.blocks.clone().into_elements();
        blocks[0] = bad;
        w.blocks = BlockSequence::new(blocks).unwrap();
        let report = verify_witness(&w, &c).unwrap();
        assert!(!report.ok);
        assert!(!report.failures.is_empty());
    }

    #[test]
    fn radius_zero_approx_equals_exact() {
        let c = vc(2, Rule::ValueAtMinSupport);
        let p = problem(Mode::Signed, 2, 3, 2, 0);
        assert_eq!(
            search_exact(&p, &c, false).unwrap(),
            search_approx(&p, &c, false).unwrap()
        );
    }
}
