use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use spellbench_core::corpus_stats::{
    count_delimited, count_doc_substring, merge_tables, segment_delimited, CountingMode, LangConfig, Provenance,
};
use spellbench_core::lexicon::{filter_entries, LexiconEntry};
use spellbench_core::ocr::{normalize_text, select_topmost, OcrBox, OcrResult, Vertex};
use spellbench_core::scoring::prefs::{aggregate_preferences, Choice, PreferenceRecord, Question};
use spellbench_core::scoring::report::summarize;
use spellbench_core::scoring::validation::adjusted_accuracy;
use spellbench_core::scoring::{edit_script, match_spelling, SampleScore, SampleState};
use spellbench_core::wikispell::{assign_buckets, FrequencyBucket};

type Docs = Vec<Result<String, ()>>;

fn en() -> LangConfig {
    let mut c = LangConfig::for_language("en");
    c.doc_limit = None;
    c
}

fn prov() -> Provenance {
    Provenance::new("t", None, "2024-01-01T00:00:00Z")
}

fn doc_strategy() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof!["[abc]{1,3}", Just(" ".to_string()), Just(",".to_string()), Just("\n".to_string())], 0..30)
        .prop_map(|parts| parts.concat())
}

fn naive_levenshtein(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut cur = vec![i + 1];
        for (j, cb) in b.iter().enumerate() {
            let v = (prev[j] + usize::from(ca != cb)).min(prev[j + 1] + 1).min(cur[j] + 1);
            cur.push(v);
        }
        prev = cur;
    }
    prev[b.len()]
}

fn boxed(text: &str, x: f64, y: f64) -> OcrBox {
    OcrBox {
        text: text.into(),
        polygon: vec![Vertex { x, y }, Vertex { x: x + 4.0, y }, Vertex { x: x + 4.0, y: y + 2.0 }],
    }
}

fn state_of(k: u8) -> SampleState {
    SampleState::ALL[usize::from(k % 4)]
}

fn scores_from(states: &[Vec<u8>]) -> Vec<SampleScore> {
    let mut out = Vec::new();
    for (w, samples) in states.iter().enumerate() {
        for (i, &k) in samples.iter().enumerate() {
            out.push(SampleScore {
                prompt_id: format!("p{w:04}"),
                sample_index: i,
                target: "w".into(),
                bucket: None,
                reading: None,
                state: state_of(k),
                error_class: None,
                tags: BTreeSet::new(),
                detail: None,
            });
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sharded_counts_merge_to_whole(docs in proptest::collection::vec(doc_strategy(), 0..40), cut in 0usize..40) {
        let config = en();
        let all: Docs = docs.iter().cloned().map(Ok).collect();
        let whole = count_delimited(all.clone(), &config, prov()).unwrap();
        let cut = cut.min(all.len());
        let a = count_delimited(all[..cut].to_vec(), &config, prov()).unwrap();
        let b = count_delimited(all[cut..].to_vec(), &config, prov()).unwrap();
        let merged = merge_tables([&a, &b]).unwrap();
        prop_assert_eq!(&merged.entries, &whole.entries);
        prop_assert_eq!(merged.docs_processed, whole.docs_processed);
    }

    #[test]
    fn delimited_counts_conserve_tokens(docs in proptest::collection::vec(doc_strategy(), 0..40)) {
        let config = en();
        let tokens: u64 = docs.iter().map(|d| segment_delimited(d, &config).count() as u64).sum();
        let table = count_delimited(docs.iter().cloned().map(Ok::<_, ()>), &config, prov()).unwrap();
        prop_assert_eq!(table.total(), tokens);
        prop_assert!(table.entries.values().all(|&n| n > 0));
    }

    #[test]
    fn substring_counts_bounded_by_docs(
        docs in proptest::collection::vec("[ab ]{0,20}", 0..30),
        words in proptest::collection::btree_set("[ab]{1,3}", 1..6),
    ) {
        let mut config = LangConfig::for_language("zh");
        config.doc_limit = None;
        prop_assert_eq!(config.counting_mode, CountingMode::DocSubstring);
        let table = count_doc_substring(docs.iter().cloned().map(Ok::<_, ()>), &words, &config, prov()).unwrap();
        for w in &words {
            let oracle = docs.iter().filter(|d| d.contains(w.as_str())).count() as u64;
            prop_assert_eq!(table.count(w), oracle);
            prop_assert!(table.count(w) <= table.docs_processed);
        }
    }

    #[test]
    fn filtering_is_idempotent(words in proptest::collection::vec("[a-c !?]{1,34}", 0..30), proverb in proptest::collection::vec(any::<bool>(), 30)) {
        let entries: Vec<LexiconEntry> = words
            .iter()
            .zip(&proverb)
            .map(|(w, &p)| LexiconEntry::new(w.clone(), "en", if p { &["Proverb"] } else { &["Noun"] }))
            .collect();
        let once = filter_entries(entries);
        prop_assert!(once.report.is_balanced());
        let again = filter_entries(once.kept.clone());
        prop_assert_eq!(again.kept.len(), once.kept.len());
        prop_assert_eq!(again.report.excluded(), 0);
    }

    #[test]
    fn buckets_match_band_oracle(freqs in proptest::collection::vec(0u64..20, 1..200)) {
        let words: Vec<String> = (0..freqs.len()).map(|i| format!("w{i:03}")).collect();
        let mut config = en();
        config.doc_limit = None;
        let mut table = spellbench_core::corpus_stats::FrequencyTable::empty(&config, prov());
        for (w, &f) in words.iter().zip(&freqs) {
            if f > 0 {
                table.entries.insert(w.clone(), f);
            }
        }
        let got = assign_buckets(&words, &table).unwrap();
        let mut order: Vec<(u64, &str)> = words.iter().zip(&freqs).map(|(w, &f)| (f, w.as_str())).collect();
        order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
        let n = order.len() as f64;
        for (i, (f, w)) in order.iter().enumerate() {
            let pct = 100.0 * i as f64 / n;
            let want = if *f == 0 {
                Some(FrequencyBucket::Bottom50)
            } else if pct < 1.0 {
                Some(FrequencyBucket::Top1)
            } else if pct < 10.0 {
                Some(FrequencyBucket::P1to10)
            } else if pct < 20.0 {
                Some(FrequencyBucket::P10to20)
            } else if pct < 30.0 {
                Some(FrequencyBucket::P20to30)
            } else if pct >= 50.0 {
                Some(FrequencyBucket::Bottom50)
            } else {
                None
            };
            let row = got.get(w).unwrap();
            prop_assert_eq!(row.rank, i + 1);
            prop_assert_eq!(row.bucket, want, "word {} rank {} of {}", w, i + 1, order.len());
        }
    }

    #[test]
    fn normalization_is_idempotent(text in "[a-z \n\r\t]{0,20}") {
        if let Some(once) = normalize_text(&text) {
            prop_assert_eq!(normalize_text(&once), Some(once.clone()));
            prop_assert!(!once.contains(['\n', '\r']));
        }
    }

    #[test]
    fn topmost_ignores_box_order(keys in proptest::collection::btree_set((0u8..20, 0u8..20), 1..8), seed in any::<u64>()) {
        let boxes: Vec<OcrBox> = keys.iter().map(|&(y, x)| boxed(&format!("{y}-{x}"), x.into(), y.into())).collect();
        let mut shuffled = boxes.clone();
        let mut rng = spellbench_core::rng::SeededRng::new(seed, 0);
        let order = rng.sample_indices(shuffled.len(), shuffled.len());
        shuffled = order.iter().map(|&i| boxes[i].clone()).collect();
        let pick = |bs: Vec<OcrBox>| {
            let r = OcrResult { image_id: "i".into(), backend: "t".into(), boxes: bs, raw_ref: None, error: None };
            select_topmost(&r).map(|(_, b)| b.text.clone())
        };
        let (y, x) = keys.iter().next().unwrap();
        prop_assert_eq!(pick(shuffled), Some(format!("{y}-{x}")));
    }

    #[test]
    fn matching_is_symmetric_under_folding(a in "[aAbB]{1,5}", b in "[aAbB]{1,5}") {
        let ab = match_spelling(&a, Some(&b)) == SampleState::Correct;
        let ba = match_spelling(&b, Some(&a)) == SampleState::Correct;
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(ab, a.to_lowercase() == b.to_lowercase());
    }

    #[test]
    fn edit_scripts_are_minimal_and_replay(a in "[abc]{0,10}", b in "[abc]{0,10}") {
        let s = edit_script(&a, &b);
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        prop_assert_eq!(s.cost(), naive_levenshtein(&ca, &cb));
        prop_assert_eq!(s.apply(), b);
    }

    #[test]
    fn bucket_report_accounts_for_every_sample(states in proptest::collection::vec(proptest::collection::vec(0u8..4, 4), 1..30)) {
        let scores = scores_from(&states);
        let refs: Vec<&SampleScore> = scores.iter().collect();
        let r = summarize(None, &refs, 4).unwrap();
        prop_assert_eq!(r.state_counts.values().sum::<usize>(), r.n_samples);
        prop_assert_eq!(r.n_samples, 4 * states.len());
        prop_assert!(r.all_right_rate + r.all_wrong_rate <= 1.0 + 1e-12);
        prop_assert!((0.0..=1.0).contains(&r.accuracy));
    }

    #[test]
    fn adjusted_accuracy_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0, fp in 0.0f64..0.5, fnr in 0.0f64..0.5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(adjusted_accuracy(lo, fp, fnr) <= adjusted_accuracy(hi, fp, fnr) + 1e-12);
        let adj = adjusted_accuracy(a, fp, fnr);
        prop_assert!((0.0..=1.0).contains(&adj));
    }

    #[test]
    fn swapping_labels_complements_rates(choices in proptest::collection::vec((0usize..10, 0u8..3), 1..60)) {
        let records: Vec<PreferenceRecord> = choices
            .iter()
            .enumerate()
            .map(|(i, &(p, c))| PreferenceRecord {
                prompt_id: format!("p{p}"),
                category: "all".into(),
                question: Question::Fidelity,
                rater_id: format!("r{i}"),
                choice: [Choice::A, Choice::B, Choice::Indifferent][usize::from(c)],
            })
            .collect();
        let swapped: Vec<PreferenceRecord> = records.iter().map(PreferenceRecord::swap).collect();
        let a = aggregate_preferences(&records).unwrap().by_question[&Question::Fidelity].rate;
        let b = aggregate_preferences(&swapped).unwrap().by_question[&Question::Fidelity].rate;
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }
}

#[test]
fn merged_table_has_no_zero_entries() {
    let config = en();
    let t = count_delimited(vec![Ok::<_, ()>("a b a".to_string())], &config, prov()).unwrap();
    let merged = merge_tables([&t, &t]).unwrap();
    assert_eq!(merged.entries, BTreeMap::from([("a".to_string(), 4), ("b".to_string(), 2)]));
}
