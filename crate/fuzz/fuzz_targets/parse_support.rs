#![no_main]

use gowers::word::{compose, parse_support, VarWordSequence, Word};
use libfuzzer_sys::fuzz_target;
use serde::Deserialize;

#[derive(Deserialize)]
struct Input {
    seq: VarWordSequence,
    word: Word,
}

fuzz_target!(|data: &[u8]| {
    let Ok(input) = serde_json::from_slice::<Input>(data) else {
        return;
    };
    if let Some(d) = parse_support(&input.seq, &input.word) {
        assert_eq!(compose(&input.seq, &d).unwrap(), input.word);
    }
});
