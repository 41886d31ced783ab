mod common;

use common::soundness::{check_corpus, diverges, uses_exceptions};

#[test]
fn observed_traces_stay_inside_inferred_effects() {
    let (corpus, stats) = check_corpus(8);
    assert!(corpus.len() >= 20);
    assert!(corpus.iter().filter(|c| uses_exceptions(c)).count() >= 5);
    assert!(corpus.iter().filter(|c| diverges(c, 30)).count() >= 5);
    assert!(stats.terminated > 0 && stats.thrown > 0 && stats.cut > 0, "{stats:?}");
    assert!(stats.violations.is_empty(), "{:#?}", stats.violations);
}
