#![no_main]

use gowers::search::{Colouring, GhjWitness, PipelineResult, VectorWitness};
use gowers::word::{VarWordSequence, Word};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<Word>(data);
    let _ = serde_json::from_slice::<VarWordSequence>(data);
    let _ = serde_json::from_slice::<Colouring>(data);
    let _ = serde_json::from_slice::<VectorWitness>(data);
    let _ = serde_json::from_slice::<GhjWitness>(data);
    let _ = serde_json::from_slice::<PipelineResult>(data);
});
