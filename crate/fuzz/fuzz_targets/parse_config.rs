// cargo +nightly fuzz run parse_config corpus/parse_config

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = spinfisher_cli::parse_config(data);
});
