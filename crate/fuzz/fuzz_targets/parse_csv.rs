#![no_main]

use libfuzzer_sys::fuzz_target;
use poqg_core::data::{parse_csv, write_csv, CsvOptions, LabelColumn};
use poqg_core::{MAJORITY, MINORITY};

fuzz_target!(|data: &[u8]| {
    let opts = CsvOptions::new(LabelColumn::Name("label".into()), "1");
    let Ok(d) = parse_csv(data, &opts) else {
        return;
    };
    assert_eq!(d.as_flat().len(), d.len() * d.n_features());
    assert_eq!(d.count(MAJORITY) + d.count(MINORITY), d.len());

    // Whatever parses must survive a write/parse round trip unchanged.
    let mut buf = Vec::new();
    write_csv(&d, &mut buf, None).expect("write parsed dataset");
    let back = parse_csv(buf.as_slice(), &opts).expect("reparse written dataset");
    assert_eq!(back.labels(), d.labels());
    assert_eq!(back.as_flat(), d.as_flat());
});
