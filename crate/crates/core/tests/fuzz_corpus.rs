//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so the seeds stay meaningful as formats change.

use std::fs;
use std::path::PathBuf;

use gowers::encoding::{decode_witness, phi_encode};
use gowers::json::{parse_block_sequence, parse_block_vector, to_canonical_string};
use gowers::search::{Colouring, GhjWitness, PipelineResult, VectorWitness};
use gowers::vector::BlockSequence;
use gowers::word::{compose, parse_support, Letter, VarWordSequence, Word};
use gowers::Mode;
use serde::Deserialize;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn block_vector_seeds() {
    for (name, data) in seeds("block_vector") {
        let text = std::str::from_utf8(&data).unwrap();
        let single = parse_block_vector(text, None, None);
        let seq = parse_block_sequence(text, None, None);
        if let Ok(p) = &single {
            let again = to_canonical_string(p).unwrap();
            assert_eq!(&parse_block_vector(&again, None, None).unwrap(), p);
        }
        if let Ok(s) = &seq {
            let again = to_canonical_string(s).unwrap();
            assert_eq!(&parse_block_sequence(&again, None, None).unwrap(), s);
        }
        assert_eq!(single.is_ok() || seq.is_ok(), name != "bad_order", "{name}");
    }
}

#[test]
fn word_text_seeds() {
    for (name, data) in seeds("word_text") {
        let (&head, rest) = data.split_first().unwrap();
        let k = u32::from(head & 3) + 1;
        let mode = if head & 4 == 0 { Mode::Unsigned } else { Mode::Signed };
        let parsed = Word::parse(k, mode, std::str::from_utf8(rest).unwrap());
        if let Ok(w) = &parsed {
            assert_eq!(&Word::parse(k, mode, &w.to_string()).unwrap(), w);
        }
        assert_eq!(parsed.is_ok(), name != "out_of_range", "{name}");
    }
}

#[test]
fn json_document_seeds() {
    for (name, data) in seeds("json_documents") {
        let parsed = [
            serde_json::from_slice::<Word>(&data).is_ok(),
            serde_json::from_slice::<VarWordSequence>(&data).is_ok(),
            serde_json::from_slice::<Colouring>(&data).is_ok(),
            serde_json::from_slice::<VectorWitness>(&data).is_ok(),
            serde_json::from_slice::<GhjWitness>(&data).is_ok(),
            serde_json::from_slice::<PipelineResult>(&data).is_ok(),
        ];
        assert!(parsed.iter().any(|&ok| ok), "{name} parses as nothing");
    }
}

#[derive(Deserialize)]
struct SupportInput {
    seq: VarWordSequence,
    word: Word,
}

#[test]
fn parse_support_seeds() {
    for (name, data) in seeds("parse_support") {
        let input: SupportInput = serde_json::from_slice(&data).unwrap();
        let d = parse_support(&input.seq, &input.word).unwrap_or_else(|| panic!("{name}"));
        assert_eq!(compose(&input.seq, &d).unwrap(), input.word);
    }
}

#[derive(Deserialize)]
struct DecodeInput {
    y: VarWordSequence,
    a: BlockSequence,
    sigmas: Vec<Letter>,
}

#[test]
fn decode_witness_seeds() {
    for (name, data) in seeds("decode_witness") {
        let input: DecodeInput = serde_json::from_slice(&data).unwrap();
        let z = decode_witness(&input.y, &input.a, &input.sigmas).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(phi_encode(&z).unwrap(), input.a);
    }
}
