#![no_main]

use libfuzzer_sys::fuzz_target;
use poqg_core::data::{parse_keel, KeelOptions};
use poqg_core::{MAJORITY, MINORITY};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for drop_nominal in [false, true] {
        if let Ok(d) = parse_keel(text, &KeelOptions { drop_nominal }) {
            // A parsed dataset is rectangular, finite and strictly binary.
            assert_eq!(d.as_flat().len(), d.len() * d.n_features());
            assert!(d.as_flat().iter().all(|v| v.is_finite()));
            assert_eq!(d.count(MAJORITY) + d.count(MINORITY), d.len());
            assert!(d.count(MINORITY) <= d.count(MAJORITY));
        }
    }
});
