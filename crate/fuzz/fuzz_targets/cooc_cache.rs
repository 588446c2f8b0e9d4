//! The co-occurrence cache parser feeds training directly; accepted matrices
//! must be symmetric with positive entries.

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = gvnr::CoocMatrix::parse_text(data) {
        x.assert_symmetric();
    }
});
