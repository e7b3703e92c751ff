#![no_main]
use libfuzzer_sys::fuzz_target;
use noisysort::closedform::{from_staircase, to_staircase, BinarySpec, Staircase};

fuzz_target!(|data: &[u8]| {
    if data.len() > 4096 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(v) = text.parse::<Staircase>() else {
        return;
    };
    let n_b = v.as_slice().len();
    let n_a = v.as_slice().first().copied().unwrap_or(0).max(1);
    if n_b == 0 || n_a > 4096 {
        return;
    }
    let spec = BinarySpec::new(0.0, 1.0, n_a, n_b).unwrap();
    let s = from_staircase(&v, &spec).expect("valid staircase decodes");
    assert_eq!(to_staircase(&s, &spec).unwrap(), v);
});
