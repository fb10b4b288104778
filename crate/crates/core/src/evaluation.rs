//! Execution-based scoring of predicted annotations against gold.
//!
//! A gold item scores 1 when a prediction with the same surface text exists
//! and both expressions execute to the same value. Misses score 0, so
//! accuracy and recall coincide.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotations::{AnnotationItem, AnnotationRecord, ItemError, ValueRecord};
use crate::dsl;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{side} record id {id:?} appears more than once")]
    Alignment { side: &'static str, id: String },
    #[error("cannot bootstrap over zero outcomes")]
    Degenerate,
    #[error("invalid bootstrap configuration: {0}")]
    Config(String),
}

/// Whitespace-insensitive span key used for matching.
pub fn span_key(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Greedy one-to-one matching on normalized `time_text`, in gold order.
pub fn match_items(gold: &[AnnotationItem], pred: &[AnnotationItem]) -> Vec<(usize, usize)> {
    let pred_keys: Vec<String> = pred.iter().map(|p| span_key(&p.time_text)).collect();
    let mut used = vec![false; pred.len()];
    let mut pairs = Vec::new();
    for (gi, g) in gold.iter().enumerate() {
        let key = span_key(&g.time_text);
        if let Some(pi) = (0..pred.len()).find(|&pi| !used[pi] && pred_keys[pi] == key) {
            used[pi] = true;
            pairs.push((gi, pi));
        }
    }
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub gold: usize,
    pub predicted: usize,
    pub matched: usize,
    pub correct: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Metrics {
    pub fn from_counts(c: &Counts) -> Self {
        let precision = ratio(c.correct, c.predicted);
        let recall = ratio(c.correct, c.gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            accuracy: recall,
            precision,
            recall,
            f1,
        }
    }
}

/// The unit of resampling: one scored gold item (possibly with its matched
/// prediction) or one prediction with no gold counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub gold: bool,
    pub predicted: bool,
    pub correct: bool,
}

impl Outcome {
    fn tally(outcomes: impl IntoIterator<Item = Outcome>) -> Counts {
        let mut c = Counts::default();
        for o in outcomes {
            c.gold += o.gold as usize;
            c.predicted += o.predicted as usize;
            c.matched += (o.gold && o.predicted) as usize;
            c.correct += o.correct as usize;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Value(ValueRecord),
    Error(ItemError),
}

impl Execution {
    pub fn run(scate: &str) -> Self {
        match dsl::execute(scate) {
            Ok(v) => Execution::Value(ValueRecord::from(&v)),
            Err(e) => Execution::Error(ItemError::from(&e)),
        }
    }

    fn value(&self) -> Option<&ValueRecord> {
        match self {
            Execution::Value(v) => Some(v),
            Execution::Error(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRef {
    pub index: usize,
    pub scate: String,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub record_id: String,
    pub gold_index: usize,
    pub time_text: String,
    pub gold_scate: String,
    pub gold_execution: Execution,
    pub prediction: Option<PredictionRef>,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldFailure {
    pub record_id: String,
    pub item_index: usize,
    pub time_text: String,
    pub scate: String,
    pub error: ItemError,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub iterations: usize,
    pub fraction: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            iterations: 100,
            fraction: 0.8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapStats {
    pub mean: f64,
    pub std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub iterations: usize,
    pub fraction: f64,
    pub seed: u64,
    pub sample_size: usize,
    pub accuracy: BootstrapStats,
    pub precision: BootstrapStats,
    pub recall: BootstrapStats,
    pub f1: BootstrapStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScoreOptions {
    pub per_item: bool,
    pub bootstrap: Option<BootstrapConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metrics: Metrics,
    pub counts: Counts,
    pub gold_execution_failures: Vec<GoldFailure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_item: Option<Vec<Verdict>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapReport>,
}

fn index_by_id<'a>(
    records: &'a [AnnotationRecord],
    side: &'static str,
) -> Result<HashMap<&'a str, &'a AnnotationRecord>, EvalError> {
    let mut map = HashMap::with_capacity(records.len());
    for r in records {
        if map.insert(r.id.as_str(), r).is_some() {
            return Err(EvalError::Alignment { side, id: r.id.clone() });
        }
    }
    Ok(map)
}

/// Per-item scoring: verdicts for gold items whose code executes, failures for
/// those that don't, and one outcome per resampling unit.
#[derive(Debug, Clone, Default)]
pub struct Scored {
    pub verdicts: Vec<Verdict>,
    pub failures: Vec<GoldFailure>,
    pub outcomes: Vec<Outcome>,
}

pub fn score_items(gold: &[AnnotationRecord], pred: &[AnnotationRecord]) -> Result<Scored, EvalError> {
    index_by_id(gold, "gold")?;
    let pred_by_id = index_by_id(pred, "prediction")?;
    let mut out = Scored::default();

    for record in gold {
        let preds: &[AnnotationItem] = pred_by_id.get(record.id.as_str()).map_or(&[], |r| &r.items);
        let pairs: HashMap<usize, usize> = match_items(&record.items, preds).into_iter().collect();
        let mut consumed = HashSet::new();

        for (gi, item) in record.items.iter().enumerate() {
            let gold_execution = Execution::run(&item.scate);
            let matched = pairs.get(&gi).copied();
            if let Execution::Error(error) = &gold_execution {
                // The matched prediction leaves the pool together with its gold item.
                consumed.extend(matched);
                out.failures.push(GoldFailure {
                    record_id: record.id.clone(),
                    item_index: gi,
                    time_text: item.time_text.clone(),
                    scate: item.scate.clone(),
                    error: error.clone(),
                });
                continue;
            }
            let prediction = matched.map(|pi| {
                consumed.insert(pi);
                PredictionRef {
                    index: pi,
                    scate: preds[pi].scate.clone(),
                    execution: Execution::run(&preds[pi].scate),
                }
            });
            let correct = prediction
                .as_ref()
                .and_then(|p| p.execution.value())
                .is_some_and(|v| Some(v) == gold_execution.value());
            out.outcomes.push(Outcome {
                gold: true,
                predicted: prediction.is_some(),
                correct,
            });
            out.verdicts.push(Verdict {
                record_id: record.id.clone(),
                gold_index: gi,
                time_text: item.time_text.clone(),
                gold_scate: item.scate.clone(),
                gold_execution,
                prediction,
                correct,
            });
        }

        let spurious = preds.len() - consumed.len();
        out.outcomes.extend((0..spurious).map(|_| Outcome {
            gold: false,
            predicted: true,
            correct: false,
        }));
    }

    let gold_ids: HashSet<&str> = gold.iter().map(|r| r.id.as_str()).collect();
    for record in pred.iter().filter(|r| !gold_ids.contains(r.id.as_str())) {
        out.outcomes.extend(record.items.iter().map(|_| Outcome {
            gold: false,
            predicted: true,
            correct: false,
        }));
    }
    Ok(out)
}

pub fn score(
    gold: &[AnnotationRecord],
    pred: &[AnnotationRecord],
    options: &ScoreOptions,
) -> Result<EvalReport, EvalError> {
    let scored = score_items(gold, pred)?;
    let counts = Outcome::tally(scored.outcomes.iter().copied());
    let bootstrap = options
        .bootstrap
        .map(|cfg| bootstrap(&scored.outcomes, &cfg))
        .transpose()?;
    Ok(EvalReport {
        metrics: Metrics::from_counts(&counts),
        counts,
        gold_execution_failures: scored.failures,
        per_item: options.per_item.then_some(scored.verdicts),
        bootstrap,
    })
}

/// Units drawn per iteration: ⌈fraction·n⌉, ignoring float noise in the
/// product (0.7 × 10 is 7, not 8).
pub fn sample_size(fraction: f64, n: usize) -> usize {
    let exact = fraction * n as f64;
    let k = (exact - 1e-9 * exact.max(1.0)).ceil();
    (k.max(1.0) as usize).min(n)
}

/// The first `k` positions of a seeded Fisher-Yates shuffle of `0..n`.
pub fn sample_without_replacement(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i as u64..n as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// Linear interpolation between closest ranks; `sorted` must be non-empty.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Mean, sample standard deviation and 95% percentile interval.
pub fn summarize(values: &[f64]) -> BootstrapStats {
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let std = if values.len() > 1 {
        (m2 / (values.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    BootstrapStats {
        mean,
        std,
        ci_low: percentile(&sorted, 2.5),
        ci_high: percentile(&sorted, 97.5),
    }
}

/// Resamples outcomes without replacement; iteration `i` uses a generator
/// seeded with `seed + i`.
pub fn bootstrap(outcomes: &[Outcome], cfg: &BootstrapConfig) -> Result<BootstrapReport, EvalError> {
    if cfg.iterations == 0 {
        return Err(EvalError::Config("iterations must be at least 1".into()));
    }
    if !(cfg.fraction > 0.0 && cfg.fraction <= 1.0) {
        return Err(EvalError::Config(format!("fraction {} is not in (0, 1]", cfg.fraction)));
    }
    if outcomes.is_empty() {
        return Err(EvalError::Degenerate);
    }
    let k = sample_size(cfg.fraction, outcomes.len());
    let mut series: [Vec<f64>; 4] = Default::default();
    for i in 0..cfg.iterations {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
        let sample = sample_without_replacement(&mut rng, outcomes.len(), k);
        let m = Metrics::from_counts(&Outcome::tally(sample.into_iter().map(|j| outcomes[j])));
        for (s, v) in series.iter_mut().zip([m.accuracy, m.precision, m.recall, m.f1]) {
            s.push(v);
        }
    }
    let [accuracy, precision, recall, f1] = series.map(|s| summarize(&s));
    Ok(BootstrapReport {
        iterations: cfg.iterations,
        fraction: cfg.fraction,
        seed: cfg.seed,
        sample_size: k,
        accuracy,
        precision,
        recall,
        f1,
    })
}
