#![no_main]

use libfuzzer_sys::fuzz_target;
use volcur::volume_sampling::BoundReport;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = BoundReport::from_kv(text) {
        assert_eq!(
            BoundReport::from_kv(&report.to_kv()).expect("written kv must parse"),
            report
        );
    }
});
