use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ghj::GhjProblem;
use super::{check_colour_count, full_mask, Arity, Colouring, Exhaustion, Outcome};
use crate::encoding::{
    assemble_matrix, decode_witness, phi_encode, product_to_sigmas, psi_encode, DerivedPair,
    ParamMatrix,
};
use crate::error::{Error, Result};
use crate::vector::{seq_dist, BlockSequence, BlockVector, Mode};
use crate::word::span::{segment_options, SpanKind};
use crate::word::{Alphabet, Class, Letter, Symbol, VarWordSequence, Word};

/// Cap on the number of neighbouring sequences tried per sequence when the
/// radius is 1.
const BALL_CAP: usize = 100_000;
/// Cap on the number of block subsequences of `B` enumerated for sampling.
const SUBSEQ_CAP: usize = 100_000;

fn default_samples() -> usize {
    64
}

/// Bounds for the pipeline: an even number of generator lengths, the
/// radius (1 only in signed mode) and the sampling used by verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineProblem {
    pub alphabet: Alphabet,
    pub mode: Mode,
    pub k: u32,
    pub lengths: Vec<usize>,
    #[serde(default)]
    pub radius: u32,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl PipelineProblem {
    fn word_problem(&self, colouring: &Colouring) -> Result<GhjProblem> {
        if self.lengths.len() % 2 == 1 {
            return Err(Error::OddLength(self.lengths.len()));
        }
        if colouring.arity() != Arity::Pair {
            return Err(Error::Colouring("the pipeline needs a (vector, matrix) colouring".into()));
        }
        check_colour_count(colouring.colours())?;
        let p = GhjProblem {
            alphabet: self.alphabet.clone(),
            mode: self.mode,
            k: self.k,
            colours: colouring.colours(),
            lengths: self.lengths.clone(),
            radius: self.radius,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub problem: PipelineProblem,
    pub y: VarWordSequence,
    pub derived: DerivedPair,
    pub colour: u32,
    /// Colour evaluations of block subsequences during the search.
    pub checked: u64,
}

/// `c*(Z) = c(φ(Z), ψ(Z))`.
fn lifted_colour(colouring: &Colouring, z: &VarWordSequence) -> Result<u32> {
    colouring.colour_pair(&phi_encode(z)?, &psi_encode(z))
}

/// `Z'` with `d(Z, Z') ≤ radius` whose words are still variable words of
/// the top class: `Z` itself first, then the rest in odometer order over the
/// metric places (last place fastest). Generated lazily; at most
/// [`BALL_CAP`] candidates are visited.
fn sequence_ball(z: &VarWordSequence, radius: u32) -> impl Iterator<Item = Vec<Word>> + '_ {
    let (k, mode) = (z.k(), z.mode());
    let top = k as i32;
    let lo = if mode == Mode::Signed { -top } else { 0 };
    let r = radius as i32;
    let slots: Vec<(usize, usize, i32, i32)> = z
        .words()
        .iter()
        .enumerate()
        .flat_map(|(w, word)| {
            word.symbols().iter().enumerate().filter_map(move |(pos, s)| {
                s.metric_value().map(|v| (w, pos, (v - r).max(lo), (v + r).min(top)))
            })
        })
        .collect();
    let own: Vec<i32> = slots
        .iter()
        .map(|&(w, pos, _, _)| z.words()[w].symbols()[pos].metric_value().expect("metric place"))
        .collect();
    let bounds: Vec<(i32, i32)> = slots.iter().map(|&(_, _, a, b)| (a, b)).collect();
    let build = move |values: &[i32]| -> Option<Vec<Word>> {
        let mut symbols: Vec<Vec<Symbol>> = z.words().iter().map(|w| w.symbols().to_vec()).collect();
        for (&(w, pos, _, _), &v) in slots.iter().zip(values) {
            symbols[w][pos] = if v == 0 { Symbol::Letter(Letter::ZERO) } else { Symbol::Var(v) };
        }
        let words: Vec<Word> = symbols.into_iter().map(|s| Word::from_parts(k, mode, s)).collect();
        words
            .iter()
            .all(|w| w.classify() == Class::Variable(k))
            .then_some(words)
    };
    let first = build(&own);
    let mut current: Vec<i32> = bounds.iter().map(|&(a, _)| a).collect();
    let mut started = false;
    let mut exhausted = false;
    let rest = std::iter::from_fn(move || {
        if exhausted {
            return None;
        }
        if started {
            // Odometer step; the last place moves fastest.
            exhausted = true;
            for pos in (0..current.len()).rev() {
                current[pos] += 1;
                if current[pos] <= bounds[pos].1 {
                    exhausted = false;
                    break;
                }
                current[pos] = bounds[pos].0;
            }
            if exhausted {
                return None;
            }
        }
        started = true;
        Some(current.clone())
    })
    .take(BALL_CAP);
    first
        .into_iter()
        .chain(rest.filter(move |values| *values != own).filter_map(move |v| build(&v)))
}

/// Colours of `want` met by `c*` on the radius-ball of `z`. The scan stops
/// once every colour of `want` has been met.
fn lifted_mask(colouring: &Colouring, z: &VarWordSequence, radius: u32, want: u64) -> Result<u64> {
    if radius == 0 {
        return Ok(want & 1u64 << lifted_colour(colouring, z)?);
    }
    let mut mask = 0u64;
    for words in sequence_ball(z, radius) {
        let near = VarWordSequence::new(z.alphabet().clone(), words)?;
        mask |= want & 1u64 << lifted_colour(colouring, &near)?;
        if mask == want {
            break;
        }
    }
    Ok(mask)
}

/// All block subsequences `(z_0, …, z_l)` of `seq` whose last word uses
/// generator `last`; each `z` is a concatenation of segment images with at
/// least one `x_n` or `−x_n` piece.
fn block_subsequences_ending_at(seq: &VarWordSequence, last: usize) -> Vec<Vec<Vec<Symbol>>> {
    let options: Vec<_> = (0..=last)
        .map(|n| segment_options(seq, n, SpanKind::Words))
        .collect();
    let mut out = Vec::new();

    fn go(
        options: &[crate::word::span::SegmentOptions],
        n: usize,
        done: &mut Vec<Vec<Symbol>>,
        open: Option<(Vec<Symbol>, bool)>,
        out: &mut Vec<Vec<Vec<Symbol>>>,
    ) {
        let last = options.len() - 1;
        let pieces = options[n]
            .top
            .iter()
            .map(|p| (p, true))
            .chain(options[n].rest.iter().map(|p| (p, false)));
        for (piece, is_top) in pieces {
            // Continue the open word (or start the first one).
            let (mut w, top) = open.clone().unwrap_or_default();
            w.extend_from_slice(piece);
            let cont = (w, top || is_top);
            if n == last {
                if cont.1 {
                    done.push(cont.0);
                    out.push(done.clone());
                    done.pop();
                }
            } else {
                go(options, n + 1, done, Some(cont), out);
            }
            // Close the open word and start a new one.
            if let Some((w, true)) = &open {
                done.push(w.clone());
                let fresh = (piece.clone(), is_top);
                if n == last {
                    if is_top {
                        done.push(fresh.0);
                        out.push(done.clone());
                        done.pop();
                    }
                } else {
                    go(options, n + 1, done, Some(fresh), out);
                }
                done.pop();
            }
        }
        if n < last {
            go(options, n + 1, done, open, out);
        }
    }

    go(&options, 0, &mut Vec::new(), None, &mut out);
    out
}

/// Per-root memo: block subsequence → (colours met, colours asked about).
type Cache = HashMap<Vec<Vec<Symbol>>, (u64, u64)>;

struct Pipeline<'a> {
    word: GhjProblem,
    colouring: &'a Colouring,
    candidates: Vec<Vec<Word>>,
    nodes: AtomicU64,
    leaves: AtomicU64,
    coloured: AtomicU64,
}

impl Pipeline<'_> {
    fn push(
        &self,
        words: &[Word],
        mut mask: u64,
        cache: &mut Cache,
    ) -> Result<Option<u64>> {
        let seq = VarWordSequence::new(self.word.alphabet.clone(), words.to_vec())?;
        for z in block_subsequences_ending_at(&seq, words.len() - 1) {
            // A cached answer is exact for any subset of the colours it
            // was computed for.
            let m = match cache.get(&z) {
                Some(&(m, asked)) if mask & !asked == 0 => m & mask,
                _ => {
                    self.coloured.fetch_add(1, Ordering::Relaxed);
                    let zs = z
                        .iter()
                        .map(|s| Word::from_parts(self.word.k, self.word.mode, s.clone()))
                        .collect();
                    let zseq = VarWordSequence::new(self.word.alphabet.clone(), zs)?;
                    let m = lifted_mask(self.colouring, &zseq, self.word.radius, mask)?;
                    cache.insert(z, (m, mask));
                    m
                }
            };
            mask &= m;
            if mask == 0 {
                return Ok(None);
            }
        }
        Ok(Some(mask))
    }

    fn go(
        &self,
        words: &mut Vec<Word>,
        mask: u64,
        cache: &mut Cache,
    ) -> Result<Option<(Vec<Word>, u64)>> {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let n = words.len();
        if n == self.word.lengths.len() {
            return Ok(Some((words.clone(), mask)));
        }
        let mut extended = false;
        for w in &self.candidates[n] {
            words.push(w.clone());
            if let Some(m) = self.push(words, mask, cache)? {
                extended = true;
                if let Some(found) = self.go(words, m, cache)? {
                    return Ok(Some(found));
                }
            }
            words.pop();
        }
        if !extended {
            self.leaves.fetch_add(1, Ordering::Relaxed);
        }
        Ok(None)
    }

    fn root(&self, y0: &Word) -> Result<Option<(Vec<Word>, u64)>> {
        let mut cache = HashMap::new();
        let mut words = vec![y0.clone()];
        match self.push(&words, full_mask(self.word.colours), &mut cache)? {
            Some(mask) => self.go(&mut words, mask, &mut cache),
            None => {
                self.nodes.fetch_add(1, Ordering::Relaxed);
                self.leaves.fetch_add(1, Ordering::Relaxed);
                Ok(None)
            }
        }
    }
}

/// Lifts `c` to `c*` on word sequences, searches for an even-length `Y`
/// all of whose finite block subsequences get one colour (radius 0) or lie
/// within distance 1 of that colour (radius 1), and returns `B` and the
/// perfect sets derived from `Y`.
pub fn parametrized_pipeline(
    problem: &PipelineProblem,
    colouring: &Colouring,
    parallel: bool,
) -> Result<Outcome<PipelineResult>> {
    let word = problem.word_problem(colouring)?;
    let candidates = (0..word.lengths.len()).map(|n| word.candidates(n)).collect();
    let pipeline = Pipeline {
        word,
        colouring,
        candidates,
        nodes: AtomicU64::new(0),
        leaves: AtomicU64::new(0),
        coloured: AtomicU64::new(0),
    };
    let roots = &pipeline.candidates[0];
    let keep = |r: Result<Option<(Vec<Word>, u64)>>| match r {
        Ok(None) => None,
        other => Some(other),
    };
    let found = if parallel {
        roots.par_iter().map(|y0| pipeline.root(y0)).find_map_first(keep)
    } else {
        roots.iter().map(|y0| pipeline.root(y0)).find_map(keep)
    };
    let Some((words, mask)) = found.transpose()?.flatten() else {
        return Ok(Outcome::Exhausted(Exhaustion {
            nodes: pipeline.nodes.into_inner(),
            leaves: pipeline.leaves.into_inner(),
        }));
    };
    let y = VarWordSequence::new(problem.alphabet.clone(), words)?;
    Ok(Outcome::Witness(PipelineResult {
        problem: problem.clone(),
        derived: DerivedPair::new(&y)?,
        y,
        colour: mask.trailing_zeros(),
        checked: pipeline.coloured.into_inner(),
    }))
}

/// One sampled point `(A, δ_0, …, δ_{c−1})` of the product and what its
/// re-decoding produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCheck {
    pub blocks: BlockSequence,
    pub sigmas: Vec<Letter>,
    pub matrix: ParamMatrix,
    pub colour: u32,
    /// For radius 1 when `colour` misses: `Ã = φ(Z')` with the target colour.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<BlockSequence>,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub ok: bool,
    pub colour: u32,
    /// Block subsequences of `B` available for sampling.
    pub population: usize,
    pub samples: Vec<SampleCheck>,
}

/// Entries of one shifted, signed block with whether it is unshifted.
type Piece = (Vec<(usize, i32)>, bool);

/// Every finite block subsequence of `b`, truncated at [`SUBSEQ_CAP`].
fn vector_block_subsequences(b: &BlockSequence) -> Result<Vec<BlockSequence>> {
    let Some((k, mode)) = b.shape() else {
        return Ok(Vec::new());
    };
    // Pieces per block: (entries, is_top).
    let pieces: Vec<Vec<Piece>> = b
        .elements()
        .iter()
        .map(|p| {
            (0..k)
                .flat_map(|shift| mode.signs().iter().map(move |&s| (shift, s)))
                .map(|(shift, sign)| (p.shifted_entries(shift, sign), shift == 0))
                .collect()
        })
        .collect();
    let mut out: Vec<Vec<Vec<(usize, i32)>>> = Vec::new();

    fn go(
        pieces: &[Vec<Piece>],
        n: usize,
        done: &mut Vec<Vec<(usize, i32)>>,
        open: Option<Piece>,
        out: &mut Vec<Vec<Vec<(usize, i32)>>>,
    ) {
        if out.len() >= SUBSEQ_CAP {
            return;
        }
        if n == pieces.len() {
            if let Some((w, true)) = open {
                done.push(w);
                out.push(done.clone());
                done.pop();
            }
            return;
        }
        go(pieces, n + 1, done, open.clone(), out);
        for (piece, is_top) in &pieces[n] {
            let (mut w, top) = open.clone().unwrap_or_default();
            w.extend_from_slice(piece);
            go(pieces, n + 1, done, Some((w, top || *is_top)), out);
            if let Some((w, true)) = &open {
                done.push(w.clone());
                go(pieces, n + 1, done, Some((piece.clone(), *is_top)), out);
                done.pop();
            }
        }
    }

    go(&pieces, 0, &mut Vec::new(), None, &mut out);
    out.into_iter()
        .map(|seq| {
            let blocks = seq
                .into_iter()
                .map(|entries| BlockVector::new(k, mode, entries))
                .collect::<Result<Vec<_>>>()?;
            BlockSequence::new(blocks)
        })
        .collect()
}

/// Samples the product `[B] × P_0 × … × P_{c−1}`: each sample is decoded
/// back to a block subsequence `Z` of the substituted sequence and checked
/// for `φ(Z) = A`, `ψ(Z) = M` on the rows `Z` covers, and `c(A, M) = colour`
/// (radius 0), or for radius 1 some `Z'` within distance 1 of `Z` with
/// `c(φ(Z'), M) = colour` and `‖A − φ(Z')‖ ≤ 1`.
pub fn verify_pipeline(result: &PipelineResult, colouring: &Colouring) -> Result<PipelineReport> {
    let problem = &result.problem;
    problem.word_problem(colouring)?;
    let y = &result.y;
    let derived = DerivedPair::new(y)?;
    let population = vector_block_subsequences(&derived.b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let chosen: Vec<&BlockSequence> = if population.len() <= problem.samples {
        population.iter().collect()
    } else {
        population.choose_multiple(&mut rng, problem.samples).collect()
    };
    let mut report = PipelineReport {
        ok: true,
        colour: result.colour,
        population: population.len(),
        samples: Vec::with_capacity(chosen.len()),
    };
    for a in chosen {
        let deltas: Vec<Vec<u8>> = derived
            .perfect_sets
            .iter()
            .map(|p| {
                let bits: Vec<u8> = (0..p.classes().len()).map(|_| rng.gen_range(0..=1)).collect();
                p.with_free_bits(&bits)
            })
            .collect();
        let sigmas = product_to_sigmas(y, &deltas)?;
        let full = assemble_matrix(&deltas)?;
        let check = check_sample(result, colouring, a, &sigmas, &full)?;
        report.ok &= check.ok;
        report.samples.push(check);
    }
    Ok(report)
}

fn check_sample(
    result: &PipelineResult,
    colouring: &Colouring,
    a: &BlockSequence,
    sigmas: &[Letter],
    full: &ParamMatrix,
) -> Result<SampleCheck> {
    let z = decode_witness(&result.y, a, sigmas)?;
    let rows = z.concatenation().len();
    let matrix = full.truncate(rows);
    let mut check = SampleCheck {
        blocks: a.clone(),
        sigmas: sigmas.to_vec(),
        matrix: matrix.clone(),
        colour: colouring.colour_pair(a, &matrix)?,
        approx: None,
        ok: true,
        reason: None,
    };
    let mut fail = |reason: &str| {
        check.ok = false;
        check.reason = Some(reason.to_string());
    };
    if &phi_encode(&z)? != a {
        fail("φ of the decoded sequence differs from A");
    } else if psi_encode(&z) != matrix {
        fail("ψ of the decoded sequence differs from the sampled matrix");
    } else if check.colour != result.colour {
        if result.problem.radius == 0 {
            fail("sample has a different colour");
        } else {
            let mut found = None;
            for words in sequence_ball(&z, result.problem.radius) {
                let near = VarWordSequence::new(z.alphabet().clone(), words)?;
                let approx = phi_encode(&near)?;
                let close = seq_dist(a, &approx).within(result.problem.radius);
                if close && colouring.colour_pair(&approx, &psi_encode(&near))? == result.colour {
                    found = Some(approx);
                    break;
                }
            }
            match found {
                Some(approx) => check.approx = Some(approx),
                None => fail("no sequence within distance 1 has the colour"),
            }
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Rule;

    fn problem(mode: Mode, k: u32, lengths: &[usize], radius: u32) -> PipelineProblem {
        PipelineProblem {
            alphabet: Alphabet::bitstrings(4, 1).unwrap(),
            mode,
            k,
            lengths: lengths.to_vec(),
            radius,
            samples: 16,
            seed: 7,
        }
    }

    fn pc(rule: Rule) -> Colouring {
        Colouring::new(Arity::Pair, 2, rule).unwrap()
    }

    #[test]
    fn subsequence_counts() {
        let y = VarWordSequence::new(
            Alphabet::bitstrings(2, 1).unwrap(),
            vec![
                Word::parse(1, Mode::Unsigned, "v_1").unwrap(),
                Word::parse(1, Mode::Unsigned, "v_1 v_1").unwrap(),
            ],
        )
        .unwrap();
        // Ending at 0: (x_0). Ending at 1: x_1, x_0⌢x_1, 0⌢x_1, 1⌢x_1,
        // x_0⌢(00|11) and (x_0, x_1).
        assert_eq!(block_subsequences_ending_at(&y, 0).len(), 1);
        assert_eq!(block_subsequences_ending_at(&y, 1).len(), 7);
        let b = BlockSequence::new(vec![
            BlockVector::new(1, Mode::Unsigned, vec![(0, 1)]).unwrap(),
            BlockVector::new(1, Mode::Unsigned, vec![(1, 1)]).unwrap(),
        ])
        .unwrap();
        // {b0}, {b1}, {b0+b1}, (b0, b1)
        assert_eq!(vector_block_subsequences(&b).unwrap().len(), 4);
    }

    #[test]
    fn constant_pipeline() {
        let c = pc(Rule::Constant { colour: 0 });
        let p = problem(Mode::Unsigned, 1, &[1, 2], 0);
        let out = parametrized_pipeline(&p, &c, false).unwrap();
        let r = out.witness().unwrap();
        assert_eq!(r.derived.b.len(), 1);
        let report = verify_pipeline(r, &c).unwrap();
        assert!(report.ok, "{report:?}");
    }

    #[test]
    fn block_count_and_matrix_bit() {
        let c = pc(Rule::BlockCountMod);
        let p = problem(Mode::Unsigned, 1, &[1, 2], 0);
        // Z = (z) and Z = (z_0, z_1) always both occur.
        assert!(parametrized_pipeline(&p, &c, false).unwrap().is_exhausted());

        // With |y_0| = 1, y_0 = v_1 and both x_0 and x_0[1]⌢x_1 start a
        // block subsequence, so row 0 takes both values.
        let c = pc(Rule::MatrixBit { row: 0, col: 0 });
        assert!(parametrized_pipeline(&p, &c, false).unwrap().is_exhausted());
        let p = problem(Mode::Unsigned, 1, &[2, 3], 0);
        let out = parametrized_pipeline(&p, &c, true).unwrap();
        let r = out.witness().unwrap();
        let report = verify_pipeline(r, &c).unwrap();
        assert!(report.ok, "{report:?}");
    }

    #[test]
    fn signed_radius_one() {
        let c = pc(Rule::MatrixBit { row: 1, col: 0 });
        let p = problem(Mode::Signed, 1, &[1, 2], 1);
        let out = parametrized_pipeline(&p, &c, false).unwrap();
        let r = out.witness().unwrap();
        assert!(verify_pipeline(r, &c).unwrap().ok);
    }
}
