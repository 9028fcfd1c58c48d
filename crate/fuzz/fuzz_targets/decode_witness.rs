#![no_main]

use gowers::encoding::{decode_witness, phi_encode};
use gowers::vector::BlockSequence;
use gowers::word::{Letter, VarWordSequence};
use libfuzzer_sys::fuzz_target;
use serde::Deserialize;

#[derive(Deserialize)]
struct Input {
    y: VarWordSequence,
    a: BlockSequence,
    sigmas: Vec<Letter>,
}

fuzz_target!(|data: &[u8]| {
    let Ok(input) = serde_json::from_slice::<Input>(data) else {
        return;
    };
    if let Ok(z) = decode_witness(&input.y, &input.a, &input.sigmas) {
        assert_eq!(phi_encode(&z).unwrap(), input.a);
    }
});
