#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_cosets::actions::GroupWord;

fuzz_target!(|text: &str| {
    if let Ok(word) = text.parse::<GroupWord>() {
        let again: GroupWord = word.to_string().parse().expect("displayed word must parse");
        assert_eq!(again, word);
        for n in 2..8 {
            if word.validate(n).is_ok() {
                let _ = word.underlying_permutation(n);
            }
        }
        let _ = word.inverse();
    }
});
