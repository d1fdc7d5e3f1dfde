#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_cosets::actions::{form_act, GroupWord, SignRule};
use spectral_cosets::coset::{reconstruct, validate_form, SheetedForm};

fuzz_target!(|data: &[u8]| {
    let Ok(sf) = serde_json::from_slice::<SheetedForm>(data) else {
        return;
    };
    let _ = validate_form(sf.form());
    if reconstruct(&sf).is_ok() && sf.form().n() >= 3 {
        let w: GroupWord = "s1 inv:2".parse().unwrap();
        let _ = form_act(&sf, &w, SignRule::Theta);
    }
});
