// cargo +nightly fuzz run parse_state corpus/parse_state

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Must never panic on arbitrary bytes; on success the value satisfies
    // the state invariants and survives a serialize/parse round trip.
    if let Ok(state) = spinfisher::io::state_from_json(data) {
        assert!((state.amplitudes().norm_squared() - 1.0).abs() < 1e-11);
        let again = spinfisher::io::state_to_json(&state);
        let back = spinfisher::io::state_from_json(again.as_bytes()).expect("round trip");
        assert_eq!(back.spin(), state.spin());
    }
});
