#![no_main]

use binembed::harness::dataset::decode_packed_f32;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(matrix) = decode_packed_f32(data) {
        assert_eq!(matrix.to_packed_f32(), data);
    }
});
