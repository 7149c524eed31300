#![no_main]

use libfuzzer_sys::fuzz_target;
use secant_core::simulate::Scenario;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(scenario) = Scenario::from_json(text) else {
        return;
    };
    let back = Scenario::from_json(&scenario.to_json()).expect("printed form parses");
    assert_eq!(back.to_json(), scenario.to_json());
});
