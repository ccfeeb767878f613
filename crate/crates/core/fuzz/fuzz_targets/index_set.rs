#![no_main]

use libfuzzer_sys::fuzz_target;
use volcur::IndexSet;

// first byte picks the universe size, the rest is the set text
fuzz_target!(|data: &[u8]| {
    let Some((&universe, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(set) = IndexSet::parse(text, universe as usize) {
        assert!(set.indices().windows(2).all(|w| w[0] < w[1]));
        assert!(set.iter().all(|i| i < set.universe()));
        let again = IndexSet::parse(&set.to_string(), set.universe()).expect("displayed set must parse");
        assert_eq!(set, again);
        assert_eq!(set.complement().complement(), set);
    }
});
