//! Generate-then-filter annotation pipeline: prompt a completion provider for
//! each corpus sentence, parse the returned items and keep only those whose
//! expression executes.

#[cfg(feature = "http")]
mod http;
mod provider;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotations::{self, AnnotationItem, AnnotationRecord};
use crate::dsl::{self, ErrorCategory};

#[cfg(feature = "http")]
pub use http::HttpProvider;
pub use provider::{
    prompt_key, ConfigError, GenerationParams, GenerationProvider, MockProvider, ProviderConfig, ProviderError,
    ProviderKind, RetryPolicy,
};

pub const SENTENCE_PLACEHOLDER: &str = "{{sentence}}";
pub const DCT_PLACEHOLDER: &str = "{{dct}}";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugmentError {
    #[error("prompt template has no {0} placeholder")]
    MissingPlaceholder(&'static str),
    #[error("concurrency limit must be at least 1")]
    Concurrency,
}

/// Substitutes `{{sentence}}` and `{{dct}}` in one left-to-right pass, so
/// placeholder-like text inside the sentence is left alone. An absent `dct`
/// substitutes the empty string.
pub fn build_prompt(template: &str, sentence: &str, dct: Option<&str>) -> Result<String, AugmentError> {
    if !template.contains(SENTENCE_PLACEHOLDER) {
        return Err(AugmentError::MissingPlaceholder(SENTENCE_PLACEHOLDER));
    }
    let mut out = String::with_capacity(template.len() + sentence.len());
    let mut rest = template;
    while let Some(pos) = rest.find("{{") {
        out.push_str(&rest[..pos]);
        let tail = &rest[pos..];
        if let Some(after) = tail.strip_prefix(SENTENCE_PLACEHOLDER) {
            out.push_str(sentence);
            rest = after;
        } else if let Some(after) = tail.strip_prefix(DCT_PLACEHOLDER) {
            out.push_str(dct.unwrap_or(""));
            rest = after;
        } else {
            out.push_str("{{");
            rest = &tail[2..];
        }
    }
    out.push_str(rest);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedSentence {
    pub id: String,
    pub error: String,
}

/// Outcome counts of a filtering run. `total` counts candidate items, and
/// `total == executed_ok + dropped.values().sum()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub total: usize,
    pub parsed: usize,
    pub executed_ok: usize,
    pub dropped: BTreeMap<ErrorCategory, usize>,
    /// Model-output list entries missing `time_text` or `scate`.
    pub malformed_items: usize,
    /// Completions with no recoverable list.
    pub unparseable_outputs: usize,
    pub failed_sentences: Vec<FailedSentence>,
}

impl Default for FilterReport {
    fn default() -> Self {
        FilterReport {
            total: 0,
            parsed: 0,
            executed_ok: 0,
            dropped: ErrorCategory::ALL.into_iter().map(|c| (c, 0)).collect(),
            malformed_items: 0,
            unparseable_outputs: 0,
            failed_sentences: Vec::new(),
        }
    }
}

impl FilterReport {
    pub fn dropped_total(&self) -> usize {
        self.dropped.values().sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.total == self.executed_ok + self.dropped_total()
    }

    fn merge(&mut self, other: FilterReport) {
        self.total += other.total;
        self.parsed += other.parsed;
        self.executed_ok += other.executed_ok;
        for (c, n) in other.dropped {
            *self.dropped.entry(c).or_default() += n;
        }
        self.malformed_items += other.malformed_items;
        self.unparseable_outputs += other.unparseable_outputs;
        self.failed_sentences.extend(other.failed_sentences);
    }
}

/// Keeps the items whose expression parses and evaluates.
pub fn filter_items(items: &[AnnotationItem], report: &mut FilterReport) -> Vec<AnnotationItem> {
    let mut kept = Vec::new();
    for item in items {
        report.total += 1;
        let outcome = dsl::parse(&item.scate).and_then(|expr| {
            report.parsed += 1;
            dsl::evaluate(&expr)
        });
        match outcome {
            Ok(_) => {
                report.executed_ok += 1;
                kept.push(item.clone());
            }
            Err(e) => *report.dropped.entry(e.category).or_default() += 1,
        }
    }
    kept
}

/// Filters every record, omitting records left without items.
pub fn filter_records(records: &[AnnotationRecord]) -> (Vec<AnnotationRecord>, FilterReport) {
    let mut report = FilterReport::default();
    let kept = records
        .iter()
        .filter_map(|r| {
            let items = filter_items(&r.items, &mut report);
            (!items.is_empty()).then(|| AnnotationRecord {
                items,
                ..r.clone()
            })
        })
        .collect();
    (kept, report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentOptions<'a> {
    pub concurrency: usize,
    pub params: GenerationParams,
    /// Substituted for `{{dct}}` and stored on every output record.
    pub dct: Option<&'a str>,
}

impl Default for AugmentOptions<'_> {
    fn default() -> Self {
        AugmentOptions {
            concurrency: 1,
            params: GenerationParams::default(),
            dct: None,
        }
    }
}

fn process_sentence(
    id: String,
    sentence: &str,
    template: &str,
    provider: &dyn GenerationProvider,
    opts: &AugmentOptions<'_>,
) -> (Option<AnnotationRecord>, FilterReport) {
    let mut report = FilterReport::default();
    let prompt = match build_prompt(template, sentence, opts.dct) {
        Ok(p) => p,
        Err(e) => {
            report.failed_sentences.push(FailedSentence { id, error: e.to_string() });
            return (None, report);
        }
    };
    let completion = match provider.complete(&prompt, &opts.params) {
        Ok(c) => c,
        Err(e) => {
            log::warn!("{id}: {e}");
            report.failed_sentences.push(FailedSentence { id, error: e.to_string() });
            return (None, report);
        }
    };
    let parsed = match annotations::parse_model_output(&completion) {
        Ok(p) => p,
        Err(e) => {
            log::warn!("{id}: {e}");
            report.unparseable_outputs += 1;
            return (None, report);
        }
    };
    if parsed.dropped > 0 {
        log::warn!("{id}: dropped {} malformed item(s)", parsed.dropped);
    }
    report.malformed_items += parsed.dropped;
    let items = filter_items(&parsed.items, &mut report);
    let record = (!items.is_empty()).then(|| AnnotationRecord {
        id,
        sentence: sentence.to_string(),
        dct: opts.dct.map(str::to_string),
        items,
    });
    (record, report)
}

/// Runs the pipeline over `sentences` with at most `opts.concurrency`
/// provider calls in flight. Record ids are `aug-<n>` with `n` the 1-based
/// position in `sentences`; blank sentences are skipped. Output order follows
/// input order.
pub fn run_augmentation(
    sentences: &[String],
    template: &str,
    provider: &dyn GenerationProvider,
    opts: &AugmentOptions<'_>,
) -> Result<(Vec<AnnotationRecord>, FilterReport), AugmentError> {
    if opts.concurrency == 0 {
        return Err(AugmentError::Concurrency);
    }
    if !template.contains(SENTENCE_PLACEHOLDER) {
        return Err(AugmentError::MissingPlaceholder(SENTENCE_PLACEHOLDER));
    }
    let work: Vec<(usize, &str)> = sentences
        .iter()
        .enumerate()
        .map(|(i, s)| (i, s.trim()))
        .filter(|(_, s)| !s.is_empty())
        .collect();
    let mut slots: Vec<Option<(Option<AnnotationRecord>, FilterReport)>> = vec![None; work.len()];

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    thread::scope(|scope| {
        for _ in 0..opts.concurrency.min(work.len()) {
            let tx = tx.clone();
            let (next, work) = (&next, &work);
            scope.spawn(move || loop {
                let slot = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(line, sentence)) = work.get(slot) else {
                    break;
                };
                let result = process_sentence(format!("aug-{}", line + 1), sentence, template, provider, opts);
                if tx.send((slot, result)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (slot, result) in rx {
            slots[slot] = Some(result);
        }
    });

    let mut records = Vec::new();
    let mut report = FilterReport::default();
    for (record, part) in slots.into_iter().flatten() {
        records.extend(record);
        report.merge(part);
    }
    Ok((records, report))
}
