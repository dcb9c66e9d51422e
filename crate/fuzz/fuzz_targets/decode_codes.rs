#![no_main]

use binembed::harness::codefile::{decode_codes, encode_codes};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((codes, manifest)) = decode_codes(data) {
        let bytes = encode_codes(&codes, &manifest).expect("decoded codes re-encode");
        assert_eq!(bytes, data);
    }
});
