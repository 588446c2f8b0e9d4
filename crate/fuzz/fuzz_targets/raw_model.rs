//! Raw model dumps are read back when resuming or inferring; parsing
//! untrusted bytes must never panic.

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = gvnr::read_raw_model(data);
});
