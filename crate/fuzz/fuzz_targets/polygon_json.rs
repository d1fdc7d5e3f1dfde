#![no_main]

use libfuzzer_sys::fuzz_target;
use spectral_cosets::polygon::SphericalPolygon;

fuzz_target!(|data: &[u8]| {
    if let Ok(p) = serde_json::from_slice::<SphericalPolygon>(data) {
        let _ = p.invariant_residuals();
        let _ = p.conjugacy_tuple();
    }
});
