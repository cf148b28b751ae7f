use lapspec::corpus::{corpus_from_json, corpus_to_json, standard_corpus};

const PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/corpus.json");

/// Set LAPSPEC_WRITE_CORPUS=1 to regenerate the checked-in file.
#[test]
fn checked_in_corpus_matches_generator() {
    let fresh = corpus_to_json(&standard_corpus().unwrap());
    if std::env::var_os("LAPSPEC_WRITE_CORPUS").is_some() {
        std::fs::write(PATH, &fresh).unwrap();
    }
    let stored = std::fs::read_to_string(PATH).unwrap();
    assert!(stored == fresh, "data/corpus.json is stale; regenerate with LAPSPEC_WRITE_CORPUS=1");
}

#[test]
fn corpus_round_trips_bit_exactly() {
    let stored = std::fs::read_to_string(PATH).unwrap();
    let entries = corpus_from_json(&stored).unwrap();
    assert_eq!(entries, standard_corpus().unwrap());
    assert_eq!(corpus_to_json(&entries), stored);
}
