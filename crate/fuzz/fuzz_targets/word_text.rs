#![no_main]

use gowers::word::Word;
use gowers::Mode;
use libfuzzer_sys::fuzz_target;

// First byte: k in 1..=4 and the mode; the rest is the display form.
fuzz_target!(|data: &[u8]| {
    let Some((&head, rest)) = data.split_first() else {
        return;
    };
    let k = u32::from(head & 3) + 1;
    let mode = if head & 4 == 0 { Mode::Unsigned } else { Mode::Signed };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(w) = Word::parse(k, mode, text) {
        assert_eq!(Word::parse(k, mode, &w.to_string()).unwrap(), w);
    }
});
