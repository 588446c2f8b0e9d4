//! The content parser must reject malformed input with an error, never a
//! panic, and any accepted dataset must satisfy the structural invariants.

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((dataset, _report)) = gvnr::load_cora_format(data, &b""[..]) {
        dataset.validate().expect("accepted dataset must validate");
    }
});
