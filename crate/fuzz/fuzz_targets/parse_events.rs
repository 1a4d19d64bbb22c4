//! The event loader must reject or accept any byte string without panicking, and lenient
//! mode must accept everything strict mode accepts.

#![no_main]

use hothand::{read_events, validate, LoadMode};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let strict = read_events(data, LoadMode::Strict);
    let lenient = read_events(data, LoadMode::Lenient);
    if let Ok(strict) = strict {
        let lenient = lenient.expect("lenient load failed where strict succeeded");
        assert!(lenient.skipped.is_empty());
        assert_eq!(strict.dataset.events, lenient.dataset.events);
        let _ = validate(&strict.dataset);
    }
});
