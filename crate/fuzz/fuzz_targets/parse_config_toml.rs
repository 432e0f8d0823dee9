#![no_main]

use libfuzzer_sys::fuzz_target;
use poqg_cli::{parse_config_toml, parse_run_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = parse_config_toml(text) else {
        return;
    };
    let _ = config.validate();
    // The run record written for a config must read back as the same config.
    let json = config.to_json();
    let back = parse_run_json(&json).expect("reparse run record");
    assert_eq!(back.to_json(), json);
});
