#![no_main]

use libfuzzer_sys::fuzz_target;
use mlix_core::Dataset;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Anything that parses must serialise to a canonical form that parses
    // back to the same dataset.
    if let Ok(dataset) = Dataset::parse(text) {
        let canonical = dataset.to_text();
        let again = Dataset::parse(&canonical).expect("canonical text parses");
        assert_eq!(again, dataset);
        assert_eq!(again.to_text(), canonical);
    }
});
