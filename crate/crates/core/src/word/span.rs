use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{Letter, Symbol, VarWordSequence, Word};
use crate::error::{Error, Result};
use crate::vector::Mode;

/// Which span a segment enumeration feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanKind {
    /// `[X]_{Lv_k}` / `[X]_{Lv_±k}`: `ε T^j(x_n[λ⃗])`.
    Words,
    /// `[X]_{(−T)}`: `(−T)^j(x_n[λ⃗])`.
    NegT,
    /// `[X]_L`: `x_n[λ⃗]` with letters only.
    Letters,
}

/// Distinct images of one generator. `top` holds the `j = 0, λ⃗ = v⃗`
/// pieces; at least one of them must appear in a span element (except for
/// [`SpanKind::Letters`]).
pub(crate) struct SegmentOptions {
    pub top: Vec<Vec<Symbol>>,
    pub rest: Vec<Vec<Symbol>>,
}

/// Every variable-free `x_n[λ⃗]` with `λ⃗` drawn from `L_n`. Only the
/// variables that occur matter, so assignments range over those.
fn letter_images(seq: &VarWordSequence, index: usize) -> Vec<Vec<Symbol>> {
    let y = &seq.words()[index];
    let vars: Vec<i32> = y
        .symbols()
        .iter()
        .filter_map(|s| match s {
            Symbol::Var(i) => Some(*i),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let letters = seq.alphabet().level(index);
    let mut out = Vec::new();
    let mut choice = vec![0usize; vars.len()];
    loop {
        out.push(
            y.symbols()
                .iter()
                .map(|&s| match s {
                    Symbol::Var(i) => {
                        let slot = vars.binary_search(&i).expect("collected above");
                        Symbol::Letter(letters[choice[slot]])
                    }
                    letter => letter,
                })
                .collect(),
        );
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return out;
            }
            choice[pos] += 1;
            if choice[pos] < letters.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

pub(crate) fn segment_options(seq: &VarWordSequence, index: usize, kind: SpanKind) -> SegmentOptions {
    let y = &seq.words()[index];
    let k = seq.k();
    let mut top = BTreeSet::new();
    let mut rest: BTreeSet<Vec<Symbol>> = letter_images(seq, index).into_iter().collect();
    match kind {
        SpanKind::Letters => {}
        SpanKind::Words => {
            for &sign in seq.mode().signs() {
                for shift in 0..k {
                    let w = y.tetris_pow(shift);
                    let w = if sign < 0 { w.map(Symbol::reflect) } else { w };
                    let target = if shift == 0 { &mut top } else { &mut rest };
                    target.insert(w.symbols().to_vec());
                }
            }
        }
        SpanKind::NegT => {
            top.insert(y.symbols().to_vec());
            for shift in 1..k {
                let w = y.tetris_pow(shift);
                let w = if shift % 2 == 1 { w.map(Symbol::reflect) } else { w };
                rest.insert(w.symbols().to_vec());
            }
        }
    }
    // T^k(x_n) is the all-zero substitution, already among the letter images.
    debug_assert!(rest.contains(y.substitute_all(Letter::ZERO).symbols()));
    SegmentOptions {
        top: top.into_iter().collect(),
        rest: rest.into_iter().collect(),
    }
}

fn enumerate(seq: &VarWordSequence, kind: SpanKind, subset_bound: Option<usize>) -> Vec<Word> {
    let options: Vec<SegmentOptions> =
        (0..seq.len()).map(|n| segment_options(seq, n, kind)).collect();
    let bound = subset_bound.unwrap_or(usize::MAX);
    let needs_top = kind != SpanKind::Letters;

    #[allow(clippy::too_many_arguments)]
    fn go(
        options: &[SegmentOptions],
        from: usize,
        depth: usize,
        bound: usize,
        needs_top: bool,
        prefix: &mut Vec<Symbol>,
        has_top: bool,
        out: &mut BTreeSet<Vec<Symbol>>,
    ) {
        if depth == bound {
            return;
        }
        for (n, opts) in options.iter().enumerate().skip(from) {
            for (piece, is_top) in opts
                .top
                .iter()
                .map(|p| (p, true))
                .chain(opts.rest.iter().map(|p| (p, false)))
            {
                let len = prefix.len();
                prefix.extend_from_slice(piece);
                let top_now = has_top || is_top;
                if top_now || !needs_top {
                    out.insert(prefix.clone());
                }
                go(options, n + 1, depth + 1, bound, needs_top, prefix, top_now, out);
                prefix.truncate(len);
            }
        }
    }

    let merged = (0..seq.len())
        .into_par_iter()
        .map(|first| {
            let mut out = BTreeSet::new();
            let mut prefix = Vec::new();
            if bound > 0 {
                let opts = &options[first];
                for (piece, is_top) in opts
                    .top
                    .iter()
                    .map(|p| (p, true))
                    .chain(opts.rest.iter().map(|p| (p, false)))
                {
                    prefix.clear();
                    prefix.extend_from_slice(piece);
                    if is_top || !needs_top {
                        out.insert(prefix.clone());
                    }
                    go(&options, first + 1, 1, bound, needs_top, &mut prefix, is_top, &mut out);
                }
            }
            out
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    merged
        .into_iter()
        .map(|symbols| Word::from_parts(seq.k(), seq.mode(), symbols))
        .collect()
}

/// `[X]_{Lv_k}` (resp. `[X]_{Lv_±k}`) restricted to index sets of size at
/// most `subset_bound`, sorted and deduplicated.
pub fn span_words(seq: &VarWordSequence, subset_bound: Option<usize>) -> Vec<Word> {
    enumerate(seq, SpanKind::Words, subset_bound)
}

/// `[X]_L`: the variable-free concatenations of graded substitutions.
pub fn span_letters(seq: &VarWordSequence) -> Vec<Word> {
    enumerate(seq, SpanKind::Letters, None)
}

/// `[X]_{(−T)}` with letter tuples of arity `2k`.
pub fn span_negt(seq: &VarWordSequence, subset_bound: Option<usize>) -> Result<Vec<Word>> {
    if seq.mode() != Mode::Signed {
        return Err(Error::RequiresSigned);
    }
    Ok(enumerate(seq, SpanKind::NegT, subset_bound))
}

/// Literal generate-then-filter span: every `ε T^j(x_n[λ⃗])` with
/// `j ∈ 0..=k` and `λ⃗` ranging over all `L_n`-tuples (and `v⃗`) is evaluated
/// per generator, then concatenations over all nonempty index sets are
/// kept when some piece is `x_n` or `−x_n` (for [`SpanKind::Letters`], when
/// no piece has a variable).
pub fn span_by_filter(seq: &VarWordSequence, kind: SpanKind) -> Result<Vec<Word>> {
    let (k, mode) = (seq.k(), seq.mode());
    if kind == SpanKind::NegT && mode != Mode::Signed {
        return Err(Error::RequiresSigned);
    }
    let arity = super::tuple_arity(mode, k);
    let mut images: Vec<BTreeSet<(Vec<Symbol>, bool)>> = Vec::with_capacity(seq.len());
    for n in 0..seq.len() {
        let letters = seq.alphabet().level(n);
        let mut tuples = vec![super::SubstitutionTuple::Vars];
        let mut choice = vec![0usize; arity];
        loop {
            tuples.push(super::SubstitutionTuple::Letters(
                choice.iter().map(|&c| letters[c]).collect(),
            ));
            let mut pos = 0;
            while pos < arity {
                choice[pos] += 1;
                if choice[pos] < letters.len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == arity {
                break;
            }
        }
        let mut set = BTreeSet::new();
        for subst in &tuples {
            for shift in 0..=k {
                for &sign in mode.signs() {
                    let keep = match kind {
                        SpanKind::Words => true,
                        SpanKind::NegT => sign == if shift % 2 == 0 { 1 } else { -1 },
                        SpanKind::Letters => {
                            sign == 1 && shift == 0 && *subst != super::SubstitutionTuple::Vars
                        }
                    };
                    if !keep {
                        continue;
                    }
                    let seg = super::Segment {
                        index: n,
                        sign,
                        shift,
                        subst: subst.clone(),
                    };
                    let w = seq.evaluate(&seg)?;
                    set.insert((w.symbols().to_vec(), seg.is_top()));
                }
            }
        }
        images.push(set);
    }
    let mut out = BTreeSet::new();
    for subset in 1u64..(1u64 << seq.len()) {
        let chosen: Vec<usize> = (0..seq.len()).filter(|n| subset >> n & 1 == 1).collect();
        let mut partial: Vec<(Vec<Symbol>, bool)> = vec![(Vec::new(), false)];
        for &n in &chosen {
            partial = partial
                .iter()
                .flat_map(|(prefix, top)| {
                    images[n].iter().map(move |(piece, t)| {
                        let mut w = prefix.clone();
                        w.extend_from_slice(piece);
                        (w, *top || *t)
                    })
                })
                .collect();
        }
        for (w, top) in partial {
            if top || kind == SpanKind::Letters {
                out.insert(w);
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|symbols| Word::from_parts(k, mode, symbols))
        .collect())
}
