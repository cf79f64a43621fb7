#![no_main]

use libfuzzer_sys::fuzz_target;
use mlix_core::StatsDump;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(dump) = StatsDump::parse(text) {
        assert_eq!(StatsDump::parse(&dump.to_text()), Ok(dump));
    }
});
