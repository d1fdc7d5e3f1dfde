#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_cosets::coset::{reconstruct, CosetTuple, SheetedForm};
use spectral_cosets::json;

fuzz_target!(|data: &[u8]| {
    let Ok(t) = serde_json::from_slice::<CosetTuple>(data) else {
        return;
    };
    let back: CosetTuple = json::from_str(&json::to_string(&t)).expect("encoded tuple must decode");
    assert_eq!(back, t);
    let sf = SheetedForm::of_tuple(&t);
    let _ = reconstruct(&sf);
});
