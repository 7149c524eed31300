#![no_main]

use libfuzzer_sys::fuzz_target;
use secant_core::cascade::{check_secant_condition, CascadeSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = CascadeSpec::from_json(text) else { return };
    let back = CascadeSpec::from_json(&spec.to_json()).expect("printed form parses");
    assert_eq!(back.len(), spec.len());
    if spec.len() <= 16 {
        let _ = check_secant_condition(&spec);
    }
});
