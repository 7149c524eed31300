#![no_main]

use libfuzzer_sys::fuzz_target;
use secant_core::poly::{routh_hurwitz, Polynomial};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = text.parse::<Polynomial>() else { return };
    let back: Polynomial = p.to_string().parse().expect("printed form parses");
    assert_eq!(back, p);
    if !p.is_zero() && p.max_abs() < 1e100 {
        let _ = routh_hurwitz(&p);
    }
});
