#![no_main]
use libfuzzer_sys::fuzz_target;
use noisysort::experiment::VerifyConfig;

fuzz_target!(|data: &[u8]| {
    if data.len() > 65_536 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = VerifyConfig::from_json(text) {
            assert!(config.lambdas.iter().all(|&l| l > 0.0 && l != 1.0));
        }
    }
});
