use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_colour_count, full_mask, Arity, Colouring, Exhaustion, Outcome, VerifyReport};
use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::json::to_canonical_string;
use crate::vector::Mode;
use crate::word::span::{segment_options, SpanKind};
use crate::word::{
    dist_words, lengths_rapidly_increasing, span_by_filter, span_words, Alphabet, Class, Symbol,
    VarWordSequence, Word,
};

/// A word-level search: generators of the exact lengths `lengths[n]`,
/// letters of generator `n` from `L_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhjProblem {
    pub alphabet: Alphabet,
    pub mode: Mode,
    pub k: u32,
    pub colours: u32,
    pub lengths: Vec<usize>,
    #[serde(default)]
    pub radius: u32,
}

impl GhjProblem {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::ZeroK);
        }
        if self.lengths.is_empty() {
            return Err(Error::EmptySequence);
        }
        if !lengths_rapidly_increasing(self.lengths.iter().copied()) {
            return Err(Error::Problem("generator lengths must be rapidly increasing".into()));
        }
        if self.mode == Mode::Unsigned && self.radius != 0 {
            return Err(Error::Problem("unsigned word search is exact (radius 0)".into()));
        }
        check_colour_count(self.colours)
    }

    fn check_colouring(&self, colouring: &Colouring) -> Result<()> {
        if colouring.arity() != Arity::Word {
            return Err(Error::Colouring("word search needs a word colouring".into()));
        }
        if colouring.colours() != self.colours {
            return Err(Error::Problem(format!(
                "problem has {} colours but the colouring has {}",
                self.colours,
                colouring.colours()
            )));
        }
        Ok(())
    }

    fn variables(&self) -> Vec<i32> {
        let k = self.k as i32;
        match self.mode {
            Mode::Unsigned => (1..=k).collect(),
            Mode::Signed => (1..=k).flat_map(|i| [i, -i]).collect(),
        }
    }

    /// Every `v_k`-word (resp. `v_±k`-word) of length `lengths[n]` over
    /// `L_n`, sorted.
    pub(crate) fn candidates(&self, n: usize) -> Vec<Word> {
        let mut symbols: Vec<Symbol> = self
            .alphabet
            .level(n)
            .iter()
            .map(|&l| Symbol::Letter(l))
            .chain(self.variables().into_iter().map(Symbol::Var))
            .collect();
        symbols.sort();
        let len = self.lengths[n];
        let mut out = Vec::new();
        let mut digits = vec![0usize; len];
        loop {
            let w = Word::from_parts(self.k, self.mode, digits.iter().map(|&d| symbols[d]).collect());
            if w.classify() == Class::Variable(self.k) {
                out.push(w);
            }
            // Odometer with the last position fastest keeps the output sorted.
            let mut pos = len;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < symbols.len() {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }
}

/// Words compatible with `x` within word distance `radius` that are still
/// `v_k`-words (resp. `v_±k`-words), sorted. Includes `x` itself when `x`
/// is one.
pub fn word_ball(x: &Word, radius: u32) -> Vec<Word> {
    let k = x.k() as i32;
    let lo = if x.mode() == Mode::Signed { -k } else { 0 };
    let r = radius as i32;
    let slots: Vec<(usize, i32, i32)> = x
        .symbols()
        .iter()
        .enumerate()
        .filter_map(|(pos, s)| s.metric_value().map(|v| (pos, (v - r).max(lo), (v + r).min(k))))
        .collect();
    let mut current: Vec<i32> = slots.iter().map(|&(_, a, _)| a).collect();
    let mut symbols = x.symbols().to_vec();
    let mut out = Vec::new();
    loop {
        for (&(pos, _, _), &v) in slots.iter().zip(&current) {
            symbols[pos] = if v == 0 {
                Symbol::Letter(crate::word::Letter::ZERO)
            } else {
                Symbol::Var(v)
            };
        }
        let w = Word::from_parts(x.k(), x.mode(), symbols.clone());
        if w.classify() == Class::Variable(x.k()) {
            out.push(w);
        }
        let mut i = 0;
        loop {
            if i == slots.len() {
                out.sort();
                return out;
            }
            current[i] += 1;
            if current[i] <= slots[i].2 {
                break;
            }
            current[i] = slots[i].1;
            i += 1;
        }
    }
}

type Relaxed = Vec<(Vec<Symbol>, bool)>;

struct Search<'a> {
    problem: &'a GhjProblem,
    colouring: &'a Colouring,
    candidates: Vec<Vec<Word>>,
    nodes: AtomicU64,
    leaves: AtomicU64,
}

impl Search<'_> {
    fn mask(&self, symbols: &[Symbol], cache: &mut HashMap<Vec<Symbol>, u64>) -> Result<u64> {
        if let Some(&m) = cache.get(symbols) {
            return Ok(m);
        }
        let w = Word::from_parts(self.problem.k, self.problem.mode, symbols.to_vec());
        let mask = if self.problem.radius == 0 {
            1u64 << self.colouring.colour_word(&w)?
        } else {
            let mut m = 0u64;
            for q in word_ball(&w, self.problem.radius) {
                m |= 1u64 << self.colouring.colour_word(&q)?;
            }
            m
        };
        cache.insert(symbols.to_vec(), mask);
        Ok(mask)
    }

    /// Adds generator `words.last()` to the relaxed span; `None` once no
    /// colour survives.
    fn push(
        &self,
        words: &[Word],
        relaxed: &Relaxed,
        mut mask: u64,
        cache: &mut HashMap<Vec<Symbol>, u64>,
    ) -> Result<Option<(Relaxed, u64)>> {
        let seq = VarWordSequence::new(self.problem.alphabet.clone(), words.to_vec())?;
        let options = segment_options(&seq, words.len() - 1, SpanKind::Words);
        let mut next = relaxed.clone();
        for (piece, is_top) in options
            .top
            .iter()
            .map(|p| (p, true))
            .chain(options.rest.iter().map(|p| (p, false)))
        {
            for (prefix, top) in relaxed {
                let mut sum = prefix.clone();
                sum.extend_from_slice(piece);
                let top = *top || is_top;
                if top {
                    mask &= self.mask(&sum, cache)?;
                    if mask == 0 {
                        return Ok(None);
                    }
                }
                next.push((sum, top));
            }
        }
        Ok(Some((next, mask)))
    }

    fn go(
        &self,
        words: &mut Vec<Word>,
        relaxed: &Relaxed,
        mask: u64,
        cache: &mut HashMap<Vec<Symbol>, u64>,
    ) -> Result<Option<(Vec<Word>, u64)>> {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let n = words.len();
        if n == self.problem.lengths.len() {
            return Ok(Some((words.clone(), mask)));
        }
        let mut extended = false;
        for w in &self.candidates[n] {
            words.push(w.clone());
            if let Some((rel, msk)) = self.push(words, relaxed, mask, cache)? {
                extended = true;
                if let Some(found) = self.go(words, &rel, msk, cache)? {
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

    fn root(&self, x0: &Word) -> Result<Option<(Vec<Word>, u64)>> {
        let mut cache = HashMap::new();
        let mut words = vec![x0.clone()];
        let empty: Relaxed = vec![(Vec::new(), false)];
        match self.push(&words, &empty, full_mask(self.problem.colours), &mut cache)? {
            Some((rel, mask)) => self.go(&mut words, &rel, mask, &mut cache),
            None => {
                self.nodes.fetch_add(1, Ordering::Relaxed);
                self.leaves.fetch_add(1, Ordering::Relaxed);
                Ok(None)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordEvidence {
    pub element: Word,
    pub colour: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbour: Option<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhjWitness {
    pub problem: GhjProblem,
    pub words: VarWordSequence,
    pub colour: u32,
    pub span: Vec<WordEvidence>,
}

/// Least generator sequence (lexicographic in the generators) whose span
/// is monochromatic, or for radius 1 lies in the 1-fattening of one colour
/// class.
pub fn search_ghj(
    problem: &GhjProblem,
    colouring: &Colouring,
    parallel: bool,
) -> Result<Outcome<GhjWitness>> {
    problem.validate()?;
    problem.check_colouring(colouring)?;
    let search = Search {
        problem,
        colouring,
        candidates: (0..problem.lengths.len()).map(|n| problem.candidates(n)).collect(),
        nodes: AtomicU64::new(0),
        leaves: AtomicU64::new(0),
    };
    let roots = &search.candidates[0];
    let found = if parallel {
        roots
            .par_iter()
            .map(|x0| search.root(x0))
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            })
    } else {
        roots.iter().map(|x0| search.root(x0)).find_map(|r| match r {
            Ok(None) => None,
            other => Some(other),
        })
    };
    let Some((words, mask)) = found.transpose()?.flatten() else {
        return Ok(Outcome::Exhausted(Exhaustion {
            nodes: search.nodes.into_inner(),
            leaves: search.leaves.into_inner(),
        }));
    };
    let colour = mask.trailing_zeros();
    let seq = VarWordSequence::new(problem.alphabet.clone(), words)?;
    let span = span_words(&seq, None)
        .into_iter()
        .map(|element| {
            let own = colouring.colour_word(&element)?;
            let neighbour = if problem.radius == 0 {
                None
            } else {
                let mut found = None;
                for q in word_ball(&element, problem.radius) {
                    if colouring.colour_word(&q)? == colour {
                        found = Some(q);
                        break;
                    }
                }
                found
            };
            Ok(WordEvidence {
                element,
                colour: own,
                neighbour,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::Witness(GhjWitness {
        problem: problem.clone(),
        words: seq,
        colour,
        span,
    }))
}

/// Re-checks a word witness against the literal span definition.
pub fn verify_ghj_witness(witness: &GhjWitness, colouring: &Colouring) -> Result<VerifyReport> {
    let problem = &witness.problem;
    problem.validate()?;
    problem.check_colouring(colouring)?;
    let mut report = VerifyReport::new(witness.colour);
    let seq = &witness.words;
    let lengths: Vec<usize> = seq.words().iter().map(Word::len).collect();
    if lengths != problem.lengths {
        report.fail(
            to_canonical_string(seq.words())?,
            format!("generator lengths {lengths:?} differ from {:?}", problem.lengths),
        );
    }
    if seq.k() != problem.k || seq.mode() != problem.mode {
        report.fail(to_canonical_string(seq.words())?, "generators do not match k and mode");
        return Ok(report);
    }
    for (n, w) in seq.words().iter().enumerate() {
        if let Some(l) = w.letters().find(|&l| !problem.alphabet.contains_at(l, n)) {
            report.fail(to_canonical_string(w)?, format!("letter {l} is not in L_{n}"));
        }
    }
    for element in span_by_filter(seq, SpanKind::Words)? {
        report.checked += 1;
        let own = colouring.colour_word(&element)?;
        if own == witness.colour {
            continue;
        }
        let mut near = false;
        if problem.radius > 0 {
            for q in word_ball(&element, problem.radius) {
                let close = matches!(dist_words(&element, &q), Distance::Finite(d) if d <= problem.radius);
                if close && colouring.colour_word(&q)? == witness.colour {
                    near = true;
                    break;
                }
            }
        }
        if !near {
            report.fail(
                to_canonical_string(&element)?,
                format!(
                    "colour {own} and no word within distance {} has colour {}",
                    problem.radius, witness.colour
                ),
            );
        }
    }
    Ok(report)
}
