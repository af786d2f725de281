//! Frequency bucketing and seeded train/dev/test splits for the spelling task.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus_stats::FrequencyTable;
use crate::rng::{streams, SeededRng};
use crate::spelling::to_spelling;
use crate::{Error, Result, TOOLKIT_VERSION};

/// Rank-percentile band of a word among all lexicon words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FrequencyBucket {
    #[serde(rename = "top1")]
    Top1,
    #[serde(rename = "1-10")]
    P1to10,
    #[serde(rename = "10-20")]
    P10to20,
    #[serde(rename = "20-30")]
    P20to30,
    #[serde(rename = "bottom50")]
    Bottom50,
}

impl FrequencyBucket {
    pub const ALL: [FrequencyBucket; 5] = [
        FrequencyBucket::Top1,
        FrequencyBucket::P1to10,
        FrequencyBucket::P10to20,
        FrequencyBucket::P20to30,
        FrequencyBucket::Bottom50,
    ];

    /// Half-open band `[lo, hi)` in percent; the bottom band is closed at 100.
    pub fn band_percent(self) -> (u64, u64) {
        match self {
            FrequencyBucket::Top1 => (0, 1),
            FrequencyBucket::P1to10 => (1, 10),
            FrequencyBucket::P10to20 => (10, 20),
            FrequencyBucket::P20to30 => (20, 30),
            FrequencyBucket::Bottom50 => (50, 100),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FrequencyBucket::Top1 => "top1",
            FrequencyBucket::P1to10 => "1-10",
            FrequencyBucket::P10to20 => "10-20",
            FrequencyBucket::P20to30 => "20-30",
            FrequencyBucket::Bottom50 => "bottom50",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        FrequencyBucket::ALL.into_iter().find(|b| b.as_str() == s)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Bucket for 1-based `rank` out of `n` words: the band containing
    /// `(rank - 1) / n`. Ranks in the 30–50% gap get `None`.
    pub fn for_rank(rank: usize, n: usize) -> Option<Self> {
        debug_assert!(rank >= 1 && rank <= n);
        let pos = (rank as u128 - 1) * 100;
        let n = n as u128;
        FrequencyBucket::ALL.into_iter().find(|b| {
            let (lo, hi) = b.band_percent();
            let above_lo = pos >= lo as u128 * n;
            let below_hi = if hi == 100 { true } else { pos < hi as u128 * n };
            above_lo && below_hi
        })
    }
}

impl core::fmt::Display for FrequencyBucket {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketedWord {
    pub word: String,
    pub frequency: u64,
    pub rank: usize,
    pub bucket: Option<FrequencyBucket>,
}

/// Lexicon words in rank order (frequency descending, word ascending).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketedLexicon {
    pub rows: Vec<BucketedWord>,
}

impl BucketedLexicon {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows of one bucket in rank order.
    pub fn bucket_rows(&self, bucket: FrequencyBucket) -> impl Iterator<Item = &BucketedWord> {
        self.rows.iter().filter(move |r| r.bucket == Some(bucket))
    }

    pub fn bucket_sizes(&self) -> BTreeMap<FrequencyBucket, usize> {
        let mut sizes: BTreeMap<FrequencyBucket, usize> = FrequencyBucket::ALL.iter().map(|&b| (b, 0)).collect();
        for r in &self.rows {
            if let Some(b) = r.bucket {
                *sizes.get_mut(&b).unwrap() += 1;
            }
        }
        sizes
    }

    pub fn unbucketed(&self) -> usize {
        self.rows.iter().filter(|r| r.bucket.is_none()).count()
    }

    pub fn get(&self, word: &str) -> Option<&BucketedWord> {
        self.rows.iter().find(|r| r.word == word)
    }
}

/// Ranks the lexicon by corpus frequency and assigns rank-percentile buckets.
///
/// Words missing from the table have frequency 0. Zero-frequency words are
/// always placed in the bottom bucket, even when they make up more than half
/// of the lexicon and their rank would otherwise fall in a higher band.
/// Duplicate words are collapsed.
pub fn assign_buckets<S: AsRef<str>>(words: &[S], table: &FrequencyTable) -> Result<BucketedLexicon> {
    let unique: BTreeSet<&str> = words.iter().map(|w| w.as_ref()).collect();
    if unique.is_empty() {
        return Err(Error::Precondition("cannot bucket an empty lexicon".into()));
    }
    let mut ranked: Vec<(&str, u64)> = unique.into_iter().map(|w| (w, table.count(w))).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let n = ranked.len();
    let rows = ranked
        .into_iter()
        .enumerate()
        .map(|(i, (word, frequency))| {
            let bucket = if frequency == 0 {
                Some(FrequencyBucket::Bottom50)
            } else {
                FrequencyBucket::for_rank(i + 1, n)
            };
            BucketedWord {
                word: word.to_string(),
                frequency,
                rank: i + 1,
                bucket,
            }
        })
        .collect();
    Ok(BucketedLexicon { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub seed: u64,
    pub eval_per_bucket: usize,
    pub train_uniform: usize,
    pub train_weighted: usize,
}

impl SamplingSpec {
    pub fn with_seed(seed: u64) -> Self {
        SamplingSpec {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eval_per_bucket == 0 || self.train_uniform == 0 || self.train_weighted == 0 {
            return Err(Error::Config("sampling sizes must all be positive".into()));
        }
        Ok(())
    }
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            seed: 0,
            eval_per_bucket: 1000,
            train_uniform: 5000,
            train_weighted: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Split::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpellingExample {
    pub word: String,
    pub spelling: String,
    pub bucket: FrequencyBucket,
    pub split: Split,
}

/// Held-out words per bucket, in draw order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalSets {
    pub test: BTreeMap<FrequencyBucket, Vec<String>>,
    pub dev: BTreeMap<FrequencyBucket, Vec<String>>,
    pub warnings: Vec<String>,
}

impl EvalSets {
    pub fn all_words(&self) -> BTreeSet<&str> {
        self.test
            .values()
            .chain(self.dev.values())
            .flatten()
            .map(String::as_str)
            .collect()
    }
}

/// Draws `2 * eval_per_bucket` distinct words per bucket; the first half of
/// each draw is the test set and the second half the dev set.
///
/// A bucket with fewer than `2 * eval_per_bucket` words is shrunk to half its
/// size per split, with a warning; a bucket with fewer than 2 words is an error.
pub fn sample_eval_sets(bucketed: &BucketedLexicon, spec: &SamplingSpec) -> Result<EvalSets> {
    spec.validate()?;
    let mut out = EvalSets::default();
    for bucket in FrequencyBucket::ALL {
        let pool: Vec<&str> = bucketed.bucket_rows(bucket).map(|r| r.word.as_str()).collect();
        if pool.len() < 2 {
            return Err(Error::InsufficientPool {
                pool: format!("bucket {bucket}"),
                needed: 2,
                available: pool.len(),
            });
        }
        let mut per_split = spec.eval_per_bucket;
        if pool.len() < 2 * per_split {
            per_split = pool.len() / 2;
            out.warnings.push(format!(
                "bucket {bucket} has {} words, fewer than the {} needed; using {per_split} per split",
                pool.len(),
                2 * spec.eval_per_bucket
            ));
        }
        let mut rng = SeededRng::new(spec.seed, streams::EVAL_BASE + bucket.index() as u64);
        let drawn = rng.sample_indices(pool.len(), 2 * per_split);
        let (test, dev) = drawn.split_at(per_split);
        out.test.insert(bucket, test.iter().map(|&i| pool[i].to_string()).collect());
        out.dev.insert(bucket, dev.iter().map(|&i| pool[i].to_string()).collect());
    }
    Ok(out)
}

/// Training words: `train_uniform` drawn uniformly from the bottom bucket and
/// `train_weighted` drawn proportionally to frequency from all bucketed words,
/// never reusing held-out words or each other.
pub fn sample_train_set(bucketed: &BucketedLexicon, eval: &EvalSets, spec: &SamplingSpec) -> Result<Vec<String>> {
    spec.validate()?;
    let held_out = eval.all_words();

    let uniform_pool: Vec<&str> = bucketed
        .bucket_rows(FrequencyBucket::Bottom50)
        .map(|r| r.word.as_str())
        .filter(|w| !held_out.contains(w))
        .collect();
    if uniform_pool.len() < spec.train_uniform {
        return Err(Error::InsufficientPool {
            pool: "bottom50 bucket minus held-out words (uniform training draw)".into(),
            needed: spec.train_uniform,
            available: uniform_pool.len(),
        });
    }
    let mut rng = SeededRng::new(spec.seed, streams::TRAIN_UNIFORM);
    let uniform: Vec<&str> = rng
        .sample_indices(uniform_pool.len(), spec.train_uniform)
        .into_iter()
        .map(|i| uniform_pool[i])
        .collect();
    let taken: BTreeSet<&str> = uniform.iter().copied().collect();

    let weighted_pool: Vec<(&str, u64)> = bucketed
        .rows
        .iter()
        .filter(|r| r.bucket.is_some())
        .map(|r| (r.word.as_str(), r.frequency))
        .filter(|(w, _)| !held_out.contains(w) && !taken.contains(w))
        .collect();
    let weights: Vec<u64> = weighted_pool.iter().map(|&(_, f)| f).collect();
    let mut rng = SeededRng::new(spec.seed, streams::TRAIN_WEIGHTED);
    let weighted = rng
        .weighted_sample_indices(&weights, spec.train_weighted)
        .ok_or_else(|| Error::InsufficientPool {
            pool: "bucketed words with non-zero frequency minus held-out and uniform draws (weighted training draw)".into(),
            needed: spec.train_weighted,
            available: weights.iter().filter(|&&w| w > 0).count(),
        })?;

    Ok(uniform
        .into_iter()
        .chain(weighted.into_iter().map(|i| weighted_pool[i].0))
        .map(String::from)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub seed: u64,
    pub eval_per_bucket: usize,
    pub train_uniform: usize,
    pub train_weighted: usize,
    pub lexicon_size: usize,
    pub bucket_sizes: BTreeMap<FrequencyBucket, usize>,
    pub unbucketed: usize,
    pub split_sizes: BTreeMap<Split, usize>,
    pub split_bucket_counts: BTreeMap<Split, BTreeMap<FrequencyBucket, usize>>,
    pub warnings: Vec<String>,
    pub toolkit_version: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WikiSpellDataset {
    pub bucketed: BucketedLexicon,
    pub examples: Vec<SpellingExample>,
    pub metadata: DatasetMetadata,
}

impl WikiSpellDataset {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &SpellingExample> {
        self.examples.iter().filter(move |e| e.split == split)
    }
}

/// Buckets the lexicon, draws held-out and training words, and spells them.
pub fn build_wikispell<S: AsRef<str>>(
    kept_words: &[S],
    table: &FrequencyTable,
    spec: &SamplingSpec,
) -> Result<WikiSpellDataset> {
    spec.validate()?;
    let bucketed = assign_buckets(kept_words, table)?;
    let eval = sample_eval_sets(&bucketed, spec)?;
    let train = sample_train_set(&bucketed, &eval, spec)?;
    let bucket_of: BTreeMap<&str, FrequencyBucket> = bucketed
        .rows
        .iter()
        .filter_map(|r| r.bucket.map(|b| (r.word.as_str(), b)))
        .collect();

    let mut examples = Vec::new();
    let mut push = |word: &str, split: Split| -> Result<()> {
        let bucket = *bucket_of
            .get(word)
            .ok_or_else(|| Error::Precondition(format!("sampled word {word:?} has no bucket")))?;
        examples.push(SpellingExample {
            word: word.to_string(),
            spelling: to_spelling(word)?,
            bucket,
            split,
        });
        Ok(())
    };
    for w in &train {
        push(w, Split::Train)?;
    }
    for (split, sets) in [(Split::Dev, &eval.dev), (Split::Test, &eval.test)] {
        for words in sets.values() {
            for w in words {
                push(w, split)?;
            }
        }
    }
    examples.sort_by(|a, b| a.split.cmp(&b.split).then_with(|| a.word.cmp(&b.word)));

    let mut split_sizes = BTreeMap::new();
    let mut split_bucket_counts: BTreeMap<Split, BTreeMap<FrequencyBucket, usize>> = BTreeMap::new();
    for e in &examples {
        *split_sizes.entry(e.split).or_insert(0) += 1;
        *split_bucket_counts.entry(e.split).or_default().entry(e.bucket).or_insert(0) += 1;
    }
    let metadata = DatasetMetadata {
        seed: spec.seed,
        eval_per_bucket: spec.eval_per_bucket,
        train_uniform: spec.train_uniform,
        train_weighted: spec.train_weighted,
        lexicon_size: bucketed.len(),
        bucket_sizes: bucketed.bucket_sizes(),
        unbucketed: bucketed.unbucketed(),
        split_sizes,
        split_bucket_counts,
        warnings: eval.warnings.clone(),
        toolkit_version: TOOLKIT_VERSION.to_string(),
    };
    Ok(WikiSpellDataset {
        bucketed,
        examples,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_stats::{CountingMode, Provenance};
    use alloc::vec;

    fn table(entries: &[(&str, u64)]) -> FrequencyTable {
        FrequencyTable {
            language_code: "en".into(),
            counting_mode: CountingMode::Delimited,
            entries: entries.iter().map(|&(w, c)| (w.to_string(), c)).collect(),
            docs_processed: 0,
            provenance: Provenance::new("t", None, ""),
        }
    }

    fn numbered(n: usize) -> (Vec<String>, FrequencyTable) {
        let words: Vec<String> = (1..=n).map(|i| format!("w{i:05}")).collect();
        let entries: Vec<(&str, u64)> = words.iter().enumerate().map(|(i, w)| (w.as_str(), (n + 1 - (i + 1)) as u64)).collect();
        let t = table(&entries);
        (words, t)
    }

    // Independent oracle: percentile as a float compared against explicit band edges.
    fn oracle_bucket(rank: usize, n: usize, freq: u64) -> Option<FrequencyBucket> {
        if freq == 0 {
            return Some(FrequencyBucket::Bottom50);
        }
        let p = (rank - 1) as f64 / n as f64;
        if p < 0.01 {
            Some(FrequencyBucket::Top1)
        } else if p < 0.10 {
            Some(FrequencyBucket::P1to10)
        } else if p < 0.20 {
            Some(FrequencyBucket::P10to20)
        } else if p < 0.30 {
            Some(FrequencyBucket::P20to30)
        } else if p < 0.50 {
            None
        } else {
            Some(FrequencyBucket::Bottom50)
        }
    }

    #[test]
    fn thousand_word_band_layout() {
        let (words, t) = numbered(1000);
        let b = assign_buckets(&words, &t).unwrap();
        for r in &b.rows {
            let expect = match r.rank {
                1..=10 => Some(FrequencyBucket::Top1),
                11..=100 => Some(FrequencyBucket::P1to10),
                101..=200 => Some(FrequencyBucket::P10to20),
                201..=300 => Some(FrequencyBucket::P20to30),
                301..=500 => None,
                _ => Some(FrequencyBucket::Bottom50),
            };
            assert_eq!(r.bucket, expect, "rank {}", r.rank);
            assert_eq!(r.bucket, oracle_bucket(r.rank, 1000, r.frequency));
        }
        assert_eq!(b.unbucketed(), 200);
    }

    #[test]
    fn missing_word_is_bottom_and_ties_break_alphabetically() {
        let t = table(&[("apple", 5), ("banana", 5), ("cherry", 9)]);
        let b = assign_buckets(&["cherry", "banana", "apple", "zzz"], &t).unwrap();
        let ranks: Vec<(&str, usize)> = b.rows.iter().map(|r| (r.word.as_str(), r.rank)).collect();
        assert_eq!(ranks, [("cherry", 1), ("apple", 2), ("banana", 3), ("zzz", 4)]);
        assert_eq!(b.get("zzz").unwrap().bucket, Some(FrequencyBucket::Bottom50));
        assert!(assign_buckets::<&str>(&[], &t).is_err());
    }

    #[test]
    fn zero_frequency_majority_stays_bottom() {
        let t = table(&[("a", 3)]);
        let words = ["a", "b", "c", "d", "e"];
        let b = assign_buckets(&words, &t).unwrap();
        assert_eq!(b.rows[0].bucket, Some(FrequencyBucket::Top1));
        assert!(b.rows[1..].iter().all(|r| r.bucket == Some(FrequencyBucket::Bottom50)));
    }

    #[test]
    fn bucket_exhaustion_case() {
        let words: Vec<String> = (0..2000).map(|i| format!("x{i}")).collect();
        let mut lex = BucketedLexicon { rows: vec![] };
        for (i, w) in words.iter().enumerate() {
            for b in FrequencyBucket::ALL {
                lex.rows.push(BucketedWord {
                    word: format!("{b}-{w}"),
                    frequency: 1,
                    rank: i,
                    bucket: Some(b),
                });
            }
        }
        let spec = SamplingSpec::with_seed(4);
        let eval = sample_eval_sets(&lex, &spec).unwrap();
        let test: BTreeSet<&String> = eval.test[&FrequencyBucket::Top1].iter().collect();
        let dev: BTreeSet<&String> = eval.dev[&FrequencyBucket::Top1].iter().collect();
        assert_eq!(test.len(), 1000);
        assert_eq!(dev.len(), 1000);
        assert!(test.is_disjoint(&dev));
        assert!(eval.warnings.is_empty());
    }

    #[test]
    fn tiny_bucket_is_an_error_and_small_bucket_shrinks() {
        let (words, t) = numbered(100);
        let b = assign_buckets(&words, &t).unwrap();
        // Top1 of 100 words holds a single word.
        assert!(matches!(
            sample_eval_sets(&b, &SamplingSpec::with_seed(1)),
            Err(Error::InsufficientPool { .. })
        ));
        let (words, t) = numbered(400);
        let b = assign_buckets(&words, &t).unwrap();
        let eval = sample_eval_sets(&b, &SamplingSpec::with_seed(1)).unwrap();
        assert_eq!(eval.test[&FrequencyBucket::Top1].len(), 2);
        assert_eq!(eval.warnings.len(), 5);
    }

    #[test]
    fn insufficient_train_pool_names_pool() {
        let (words, t) = numbered(400);
        let spec = SamplingSpec {
            seed: 1,
            eval_per_bucket: 1,
            train_uniform: 500,
            train_weighted: 1,
        };
        match build_wikispell(&words, &t, &spec) {
            Err(Error::InsufficientPool { pool, .. }) => assert!(pool.contains("bottom50")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_build_is_disjoint_and_deterministic() {
        let (words, t) = numbered(2000);
        let spec = SamplingSpec {
            seed: 11,
            eval_per_bucket: 5,
            train_uniform: 50,
            train_weighted: 50,
        };
        let a = build_wikispell(&words, &t, &spec).unwrap();
        let b = build_wikispell(&words, &t, &spec).unwrap();
        assert_eq!(a, b);
        let train: BTreeSet<&str> = a.split(Split::Train).map(|e| e.word.as_str()).collect();
        let dev: BTreeSet<&str> = a.split(Split::Dev).map(|e| e.word.as_str()).collect();
        let test: BTreeSet<&str> = a.split(Split::Test).map(|e| e.word.as_str()).collect();
        assert_eq!(train.len(), 100);
        assert_eq!(dev.len(), 25);
        assert_eq!(test.len(), 25);
        assert!(train.is_disjoint(&dev) && train.is_disjoint(&test) && dev.is_disjoint(&test));
        let c = build_wikispell(&words, &t, &SamplingSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a.examples, c.examples);
    }
}
