// cargo +nightly fuzz run parse_density corpus/parse_density

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Parsing enforces Hermiticity, unit trace, and positivity; anything
    // that gets through must round-trip.
    if let Ok(rho) = spinfisher::io::density_from_json(data) {
        let again = spinfisher::io::density_to_json(&rho);
        let back = spinfisher::io::density_from_json(again.as_bytes()).expect("round trip");
        assert_eq!(back.spin(), rho.spin());
    }
});
