#![no_main]

use libfuzzer_sys::fuzz_target;
use poqg_cli::parse_run_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = parse_run_json(text) {
        let _ = config.validate();
        let _ = config.to_json();
    }
});
