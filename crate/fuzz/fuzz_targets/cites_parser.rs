//! Cites lines over a fixed small node set: arbitrary bytes must either
//! parse into a valid symmetric graph or fail cleanly.

#![no_main]
use libfuzzer_sys::fuzz_target;

const CONTENT: &[u8] = b"a\t1\t0\tx\nb\t0\t1\tx\nc\t1\t1\ty\n";

fuzz_target!(|data: &[u8]| {
    if let Ok((dataset, report)) = gvnr::load_cora_format(CONTENT, data) {
        dataset.validate().expect("accepted dataset must validate");
        assert!(report.edges_kept <= 3);
    }
});
