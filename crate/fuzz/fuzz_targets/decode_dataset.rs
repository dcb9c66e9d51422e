#![no_main]

use binembed::harness::dataset::{decode_dataset, DatasetFormat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, body)) = data.split_first() else {
        return;
    };
    let format = if selector % 2 == 0 { DatasetFormat::Csv } else { DatasetFormat::PackedF32 };
    let _ = decode_dataset(body, format);
});
