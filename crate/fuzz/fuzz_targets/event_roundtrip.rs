#![no_main]

use hothand::{read_events, write_events, LoadMode};
use libfuzzer_sys::fuzz_target;

// Anything the loader accepts must survive a write and re-read unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(first) = read_events(data, LoadMode::Lenient) else {
        return;
    };
    let mut buf = Vec::new();
    write_events(&first.dataset, &mut buf).expect("writing a loaded dataset");
    let second = read_events(buf.as_slice(), LoadMode::Strict).expect("re-reading written csv");
    assert_eq!(first.dataset.events, second.dataset.events);
});
