#![no_main]
use libfuzzer_sys::fuzz_target;
use noisysort::experiment::ExactMethod;
use noisysort::ChainKind;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(kind) = text.parse::<ChainKind>() {
        assert_eq!(kind.to_string().parse::<ChainKind>().unwrap(), kind);
    }
    if let Ok(method) = text.parse::<ExactMethod>() {
        assert_eq!(method.to_string().parse::<ExactMethod>().unwrap(), method);
    }
});
