//! A small embedded invariant suite, run by `gowers selftest`.
//!
//! Each check is cheap (well under a second) and deterministic.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::encoding::{decode_witness, derive_b, phi_encode, psi_encode, substituted_sequence};
use crate::net::net_defect;
use crate::search::{
    enumerate_universe, search_approx, search_exact, search_ghj, verify_ghj_witness,
    verify_witness, Arity, Colouring, GhjProblem, Rule, SearchProblem,
};
use crate::vector::{self, BlockSequence, BlockVector, Mode};
use crate::word::{
    approx_negt, compose, dist_words, halve, in_span_negt, parse_support, span_by_filter,
    span_words, Alphabet, Letter, SpanKind, Symbol, VarWordSequence, Word,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfCheck {
    pub name: &'static str,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

type Check = fn() -> std::result::Result<(), String>;

const CHECKS: &[(&str, Check)] = &[
    ("universe-sizes", universe_sizes),
    ("tetris-homomorphism", tetris_homomorphism),
    ("vector-span-oracle", vector_span_oracle),
    ("word-span-oracle", word_span_oracle),
    ("parse-compose", parse_compose),
    ("halving-concatenation", halving_concatenation),
    ("approx-negt", approx_negt_contract),
    ("encode-decode", encode_decode),
    ("structured-searches", structured_searches),
    ("word-search", word_search),
    ("delta-net", delta_net),
];

/// Runs every check in order.
pub fn run() -> Vec<SelfCheck> {
    CHECKS
        .iter()
        .map(|&(name, check)| match check() {
            Ok(()) => SelfCheck {
                name,
                ok: true,
                detail: None,
            },
            Err(detail) => SelfCheck {
                name,
                ok: false,
                detail: Some(detail),
            },
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn random_vector(rng: &mut impl Rng, k: u32, mode: Mode, from: usize, to: usize) -> BlockVector {
    loop {
        let k_i = k as i32;
        let entries: Vec<(usize, i32)> = (from..to)
            .filter_map(|n| {
                let v = match mode {
                    Mode::Unsigned => rng.gen_range(0..=k_i),
                    Mode::Signed => rng.gen_range(-k_i..=k_i),
                };
                (v != 0).then_some((n, v))
            })
            .collect();
        if let Ok(p) = BlockVector::new(k, mode, entries) {
            return p;
        }
    }
}

fn universe_sizes() -> std::result::Result<(), String> {
    let got = [
        enumerate_universe(1, 3, Mode::Unsigned).len(),
        enumerate_universe(2, 2, Mode::Unsigned).len(),
        enumerate_universe(1, 2, Mode::Signed).len(),
    ];
    ensure(got == [7, 5, 8], || format!("sizes {got:?}, expected [7, 5, 8]"))
}

fn tetris_homomorphism() -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let k = rng.gen_range(2..=3);
        let mode = if rng.gen() { Mode::Signed } else { Mode::Unsigned };
        let cut = rng.gen_range(1..11);
        let p = random_vector(&mut rng, k, mode, 0, cut);
        let q = random_vector(&mut rng, k, mode, cut, 12);
        let lhs = p.block_sum(&q).and_then(|s| s.tetris()).map_err(err)?;
        let rhs = p
            .tetris()
            .and_then(|tp| tp.block_sum(&q.tetris()?))
            .map_err(err)?;
        ensure(lhs == rhs, || format!("T(p+q) != T(p)+T(q) for p = {p}, q = {q}"))?;
    }
    Ok(())
}

fn vector_span_oracle() -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..40 {
        let k = rng.gen_range(1..=2);
        let mode = if rng.gen() { Mode::Signed } else { Mode::Unsigned };
        let blocks: Vec<BlockVector> = (0..3)
            .map(|i| random_vector(&mut rng, k, mode, 2 * i, 2 * i + 2))
            .collect();
        let seq = BlockSequence::new(blocks).map_err(err)?;
        let pruned: BTreeSet<_> = vector::span(&seq).map_err(err)?.into_iter().collect();
        let filtered: BTreeSet<_> = vector::span_by_filter(&seq).map_err(err)?.into_iter().collect();
        ensure(pruned == filtered, || format!("span mismatch on {seq:?}"))?;
    }
    Ok(())
}

fn fixed_words(mode: Mode, k: u32, words: &[&str]) -> std::result::Result<VarWordSequence, String> {
    let ws = words
        .iter()
        .map(|w| Word::parse(k, mode, w))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(err)?;
    VarWordSequence::new(Alphabet::bitstrings(4, 1).map_err(err)?, ws).map_err(err)
}

fn word_span_oracle() -> std::result::Result<(), String> {
    let y = fixed_words(Mode::Signed, 2, &["v_2", "1 v_-1 v_2"])?;
    for kind in [SpanKind::Words, SpanKind::NegT, SpanKind::Letters] {
        let pruned = match kind {
            SpanKind::Words => span_words(&y, None),
            SpanKind::NegT => crate::word::span_negt(&y, None).map_err(err)?,
            SpanKind::Letters => crate::word::span_letters(&y),
        };
        let oracle = span_by_filter(&y, kind).map_err(err)?;
        ensure(pruned == oracle, || format!("{kind:?} span differs from the oracle"))?;
    }
    Ok(())
}

fn parse_compose() -> std::result::Result<(), String> {
    let y = fixed_words(Mode::Signed, 2, &["v_2", "v_1 v_-2", "v_-1 1 v_2 0"])?;
    for x in span_words(&y, None) {
        let d = parse_support(&y, &x).ok_or_else(|| format!("{x} does not parse"))?;
        let back = compose(&y, &d).map_err(err)?;
        ensure(back == x, || format!("{x} recomposes to {back}"))?;
    }
    let stray = Word::parse(2, Mode::Signed, "v_1 v_1").map_err(err)?;
    ensure(parse_support(&y, &stray).is_none(), || "stray word parsed".into())
}

fn halving_concatenation() -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let symbol = |rng: &mut ChaCha8Rng, k: i32| {
        if rng.gen_bool(0.3) {
            Symbol::Letter(Letter::from_mask(rng.gen_range(0..2)))
        } else {
            let i = rng.gen_range(1..=k);
            Symbol::Var(if rng.gen() { i } else { -i })
        }
    };
    for _ in 0..200 {
        let a: Vec<Symbol> = (0..rng.gen_range(1..6)).map(|_| symbol(&mut rng, 4)).collect();
        let b: Vec<Symbol> = (0..rng.gen_range(1..6)).map(|_| symbol(&mut rng, 4)).collect();
        let x = Word::new(4, Mode::Signed, a).map_err(err)?;
        let y = Word::new(4, Mode::Signed, b).map_err(err)?;
        let lhs = halve(&x.concat(&y).map_err(err)?).map_err(err)?;
        let rhs = halve(&x).map_err(err)?.concat(&halve(&y).map_err(err)?).map_err(err)?;
        ensure(lhs == rhs, || format!("halving does not split over {x} ⌢ {y}"))?;
    }
    Ok(())
}

fn approx_negt_contract() -> std::result::Result<(), String> {
    let y = fixed_words(Mode::Signed, 2, &["v_2", "v_-1 v_2"])?;
    for x in span_words(&y, None) {
        let (z, _) = approx_negt(&y, &x).map_err(err)?;
        ensure(in_span_negt(&y, &z), || format!("{z} is not in the (−T)-span"))?;
        let neg = x.reflect().map_err(err)?;
        let d = dist_words(&x, &z).min(dist_words(&neg, &z));
        ensure(d.within(1), || format!("{z} is {d:?} from ±{x}"))?;
    }
    Ok(())
}

fn encode_decode() -> std::result::Result<(), String> {
    let y = fixed_words(
        Mode::Unsigned,
        1,
        &["v_1", "1 v_1", "v_1 v_1 1 0", "v_1 0 v_1 0 0 0 0 0 0"],
    )?;
    let b = derive_b(&y).map_err(err)?;
    let sigmas = [Letter::ZERO, Letter::from_mask(1)];
    let x = substituted_sequence(&y, &sigmas).map_err(err)?;
    for a in vector::span(&b).map_err(err)? {
        let a = BlockSequence::new(vec![a]).map_err(err)?;
        let z = decode_witness(&y, &a, &sigmas).map_err(err)?;
        ensure(phi_encode(&z).map_err(err)? == a, || format!("φ(Z) != A for {a:?}"))?;
        let pz = psi_encode(&z);
        ensure(pz == psi_encode(&x).truncate(pz.rows()), || format!("ψ mismatch for {a:?}"))?;
    }
    Ok(())
}

fn vector_colouring(rule: Rule) -> Colouring {
    Colouring::new(Arity::Vector, 2, rule).expect("built-in family")
}

fn structured_searches() -> std::result::Result<(), String> {
    let problem = |mode, k, n, radius| SearchProblem {
        mode,
        k,
        colours: 2,
        n,
        m: 2,
        radius,
    };
    let cases = [
        (problem(Mode::Unsigned, 1, 4, 0), Rule::SupportSizeMod, true),
        (problem(Mode::Unsigned, 1, 4, 0), Rule::MinPositionMod, true),
        (problem(Mode::Unsigned, 1, 2, 0), Rule::MinPositionMod, false),
        (problem(Mode::Signed, 2, 6, 1), Rule::SignAtMinSupport, true),
    ];
    for (p, rule, expect) in cases {
        let c = vector_colouring(rule.clone());
        let out = if p.radius == 0 {
            search_exact(&p, &c, false)
        } else {
            search_approx(&p, &c, false)
        }
        .map_err(err)?;
        ensure(out.witness().is_some() == expect, || {
            format!("{rule:?} on {p:?}: expected witness = {expect}")
        })?;
        if let Some(w) = out.witness() {
            let report = verify_witness(w, &c).map_err(err)?;
            ensure(report.ok, || format!("witness for {rule:?} fails verification"))?;
        }
    }
    Ok(())
}

fn word_search() -> std::result::Result<(), String> {
    let c = Colouring::new(Arity::Word, 2, Rule::LengthMod).expect("built-in family");
    let problem = |lengths: &[usize]| GhjProblem {
        alphabet: Alphabet::bitstrings(2, 1).expect("small alphabet"),
        mode: Mode::Unsigned,
        k: 1,
        colours: 2,
        lengths: lengths.to_vec(),
        radius: 0,
    };
    let odd = search_ghj(&problem(&[1, 2]), &c, false).map_err(err)?;
    ensure(odd.is_exhausted(), || "odd first length should exhaust".into())?;
    let even = search_ghj(&problem(&[2, 4]), &c, false).map_err(err)?;
    let w = even.witness().ok_or("even lengths should give a witness")?;
    ensure(verify_ghj_witness(w, &c).map_err(err)?.ok, || "word witness fails".into())
}

fn delta_net() -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let blocks: Vec<BlockVector> = (0..3)
        .map(|i| random_vector(&mut rng, 3, Mode::Signed, 2 * i, 2 * i + 2))
        .collect();
    let seq = BlockSequence::new(blocks).map_err(err)?;
    let defect = net_defect(&seq, 0.5, 500, 5).map_err(err)?;
    ensure(defect <= 0.5 + 1e-9, || format!("net defect {defect} exceeds 0.5"))
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for check in super::run() {
            assert!(check.ok, "{}: {:?}", check.name, check.detail);
        }
    }
}
