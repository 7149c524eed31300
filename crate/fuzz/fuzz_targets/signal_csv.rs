#![no_main]

use libfuzzer_sys::fuzz_target;
use secant_core::simulate::{l2_norm_t, Signal};

fuzz_target!(|data: &[u8]| {
    let Ok(signal) = Signal::read_csv(data) else { return };
    let back = Signal::from_csv_str(&signal.to_csv()).expect("printed form parses");
    assert_eq!(back.len(), signal.len());
    let _ = l2_norm_t(&signal, signal.duration());
});
