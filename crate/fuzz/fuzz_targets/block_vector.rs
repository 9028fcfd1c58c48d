#![no_main]

use gowers::json::{parse_block_sequence, parse_block_vector, to_canonical_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = parse_block_vector(text, None, None) {
        let again = to_canonical_string(&p).unwrap();
        assert_eq!(parse_block_vector(&again, None, None).unwrap(), p);
    }
    if let Ok(seq) = parse_block_sequence(text, None, None) {
        let again = to_canonical_string(&seq).unwrap();
        assert_eq!(parse_block_sequence(&again, None, None).unwrap(), seq);
    }
});
