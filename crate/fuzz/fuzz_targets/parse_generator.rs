#![no_main]
use libfuzzer_sys::fuzz_target;
use noisysort::experiment::InputSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = InputSpec::parse_generator(text) {
        let shown = spec.to_string();
        assert_eq!(
            shown.parse::<InputSpec>().expect("display round-trips"),
            spec
        );
        // keep generated inputs small enough to build quickly
        let n = match spec {
            InputSpec::Descending(n) | InputSpec::Outlier(n) => n,
            InputSpec::Binary { n_a, n_b } => n_a + n_b,
            InputSpec::Explicit(ref s) => s.len(),
        };
        if n <= 10_000 {
            assert_eq!(spec.initial().len(), n);
        }
    }
});
