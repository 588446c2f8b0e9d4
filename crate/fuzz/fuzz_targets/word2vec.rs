//! word2vec text files may come from other tools; the reader must fail
//! cleanly on anything malformed.

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((ids, vectors)) = gvnr::read_word2vec(data) {
        assert_eq!(ids.len(), vectors.len());
    }
});
