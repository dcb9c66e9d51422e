#![no_main]

use binembed::harness::dataset::parse_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(matrix) = parse_csv(text) {
        // Anything accepted must survive a write and re-read.
        let again = parse_csv(&matrix.to_csv()).expect("re-parse of emitted csv");
        assert_eq!(again.n(), matrix.n());
        assert_eq!(again.count(), matrix.count());
    }
});
