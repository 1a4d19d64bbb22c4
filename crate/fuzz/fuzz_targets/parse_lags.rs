#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let spec = String::from_utf8_lossy(data);
    if let Ok(lags) = hothand::parse_lags(&spec) {
        assert!(!lags.is_empty());
        assert!(lags.windows(2).all(|w| w[0] < w[1]));
        assert!(lags.iter().all(|&k| k <= hothand::correlogram::MAX_LAG));
    }
});
