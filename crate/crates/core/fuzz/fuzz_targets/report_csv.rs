#![no_main]

use libfuzzer_sys::fuzz_target;
use volcur::volume_sampling::BoundReport;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(reports) = BoundReport::read_csv(text) {
        let written = BoundReport::write_csv(&reports);
        assert_eq!(
            BoundReport::read_csv(&written).expect("written csv must parse"),
            reports
        );
    }
});
