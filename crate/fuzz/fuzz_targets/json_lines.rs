#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_cosets::coset::CosetTuple;
use spectral_cosets::json::JsonLines;

fuzz_target!(|data: &[u8]| {
    let mut last = 0;
    for item in JsonLines::<_, CosetTuple>::new(data) {
        let line = match item {
            Ok((line, _)) => line,
            Err(e) => e.line(),
        };
        assert!(line > last);
        last = line;
    }
});
