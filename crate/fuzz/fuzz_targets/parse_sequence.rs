#![no_main]
use libfuzzer_sys::fuzz_target;
use noisysort::{weighted_inversion, Sequence};

fuzz_target!(|data: &[u8]| {
    if data.len() > 4096 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = text.parse::<Sequence>() {
        // Display must parse back to the same state
        let again: Sequence = s.to_string().parse().expect("display round-trips");
        assert_eq!(again, s);
        let w = weighted_inversion(&s);
        assert!(w >= 0.0 || w.is_nan());
    }
});
