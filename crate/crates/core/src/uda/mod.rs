//! Self-training for unsupervised domain adaptation.
//!
//! 1. fit on labelled source frames;
//! 2. split each target sequence in time into a train part and a test part;
//! 3. predict pseudo-labels for the target train part;
//! 4. mix every target train frame (with its pseudo-label) with one source
//!    frame;
//! 5. fit again on source plus mixed frames.
//!
//! Target labels are only read when scoring the test part. The train part's
//! labels are never read at all.

mod knn;
mod metrics;

pub use knn::KnnPredictor;
pub use metrics::{accuracy, mean_mle, mle};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::frames::{Dataset, DatasetMeta, Frame, Label, LabelKind, Point};
use crate::mixer::{mix_frames, MixConfig, MixError};
use crate::seed::SeedKey;

#[derive(Debug, thiserror::Error)]
pub enum UdaError {
    #[error("source and target differ: {0:?} vs {1:?}")]
    MetaMismatch(Option<DatasetMeta>, Option<DatasetMeta>),
    #[error("empty {0} split")]
    EmptySplit(&'static str),
    #[error("predictor has no training data")]
    EmptyTraining,
    #[error(transparent)]
    Mix(#[from] MixError),
    #[error("metric: {0}")]
    Metric(String),
    #[error("invalid self-training configuration: {0}")]
    Config(String),
}

/// Anything that learns labels from point clouds.
///
/// `predict` only ever sees points, so evaluation data cannot leak labels
/// into a prediction.
pub trait Predictor {
    fn fit(&mut self, frames: &[Frame]) -> Result<(), UdaError>;
    fn predict(&self, clouds: &[&[Point]]) -> Result<Vec<Label>, UdaError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Seeded draw of source frames without replacement, reshuffled once all
    /// have been used.
    #[default]
    Random,
    /// Target train frame `i` pairs with source frame `i mod n`.
    Cyclic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UdaConfig {
    pub target_train_fraction: f64,
    pub pairing: Pairing,
    pub mix: MixConfig,
    pub seed: u64,
    /// Rounds of steps 3 to 5. Zero reports the source-only model.
    pub fine_tune_rounds: usize,
}

impl Default for UdaConfig {
    fn default() -> Self {
        Self { target_train_fraction: 0.5, pairing: Pairing::Random, mix: MixConfig::default(), seed: 0, fine_tune_rounds: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Mean localization error in centimeters; lower is better.
    MleCm,
    /// Fraction of correct argmax predictions; higher is better.
    Accuracy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UdaReport {
    pub metric: Metric,
    pub error_before: f64,
    pub error_after: f64,
    /// Relative gain, positive when adaptation helped.
    pub improvement: f64,
    pub n_source: usize,
    pub n_target_train: usize,
    pub n_target_test: usize,
    pub n_mixed: usize,
    pub rounds: usize,
}

/// Chronological split of every target sequence: the first
/// `floor(len * fraction)` frames train, the rest test.
pub fn split_target(target: &Dataset, fraction: f64) -> (Vec<&Frame>, Vec<&Frame>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (_, frames) in target.sequences() {
        let cut = (frames.len() as f64 * fraction).floor() as usize;
        train.extend(&frames[..cut]);
        test.extend(&frames[cut..]);
    }
    (train, test)
}

fn score(metric: Metric, preds: &[Label], truth: &[&Label]) -> Result<f64, UdaError> {
    let truth: Vec<Label> = truth.iter().map(|l| (*l).clone()).collect();
    match metric {
        Metric::MleCm => mean_mle(preds, &truth),
        Metric::Accuracy => accuracy(preds, &truth),
    }
}

/// Draws `count` indices from `0..n`: each full pass is a fresh permutation.
fn recycling_sample<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut pass: Vec<usize> = (0..n).collect();
        pass.shuffle(rng);
        out.extend(pass.into_iter().take(count - out.len()));
    }
    out
}

pub fn run_uda(source: &Dataset, target: &Dataset, predictor: &mut dyn Predictor, cfg: &UdaConfig) -> Result<UdaReport, UdaError> {
    if !(cfg.target_train_fraction > 0.0 && cfg.target_train_fraction < 1.0) {
        return Err(UdaError::Config("target_train_fraction must be in (0, 1)".into()));
    }
    cfg.mix.validate()?;
    if source.is_empty() {
        return Err(UdaError::EmptySplit("source"));
    }
    if source.meta() != target.meta() {
        return Err(UdaError::MetaMismatch(source.meta().copied(), target.meta().copied()));
    }
    let metric = match source.meta().map(|m| m.label) {
        Some(LabelKind::Classes { .. }) => Metric::Accuracy,
        _ => Metric::MleCm,
    };

    let (train, test) = split_target(target, cfg.target_train_fraction);
    // Empty frames have nothing to mix; they stay out of the train part but
    // are still scored when they fall in the test part.
    let train: Vec<&Frame> = train.into_iter().filter(|f| !f.is_empty()).collect();
    if train.is_empty() {
        return Err(UdaError::EmptySplit("target train"));
    }
    if test.is_empty() {
        return Err(UdaError::EmptySplit("target test"));
    }
    let partners: Vec<&Frame> = source.frames().iter().filter(|f| !f.is_empty()).collect();
    if partners.is_empty() {
        return Err(UdaError::EmptySplit("non-empty source"));
    }
    let test_clouds: Vec<&[Point]> = test.iter().map(|f| f.points.as_slice()).collect();
    let train_clouds: Vec<&[Point]> = train.iter().map(|f| f.points.as_slice()).collect();
    let test_truth: Vec<&Label> = test.iter().map(|f| &f.label).collect();

    predictor.fit(source.frames())?;
    let error_before = score(metric, &predictor.predict(&test_clouds)?, &test_truth)?;

    let mut n_mixed = 0;
    for round in 0..cfg.fine_tune_rounds {
        let pseudo = predictor.predict(&train_clouds)?;
        let picks = match cfg.pairing {
            Pairing::Cyclic => (0..train.len()).map(|i| i % partners.len()).collect(),
            Pairing::Random => {
                let mut rng = SeedKey::new("uda-pairing").u64(cfg.seed).u64(round as u64).rng();
                recycling_sample(partners.len(), train.len(), &mut rng)
            }
        };
        let mixed: Vec<Frame> = train
            .par_iter()
            .zip(pseudo)
            .zip(picks)
            .enumerate()
            .map(|(i, ((frame, label), pick))| {
                let unlabeled = Frame { seq_id: frame.seq_id.clone(), t: frame.t, points: frame.points.clone(), label };
                let mut rng = SeedKey::new("uda-mix").u64(cfg.seed).u64(round as u64).u64(i as u64).rng();
                mix_frames(partners[pick], &unlabeled, &cfg.mix, &mut rng)
            })
            .collect::<Result<_, _>>()?;
        n_mixed = mixed.len();
        let mut data = source.frames().to_vec();
        data.extend(mixed);
        predictor.fit(&data)?;
    }
    let error_after = if cfg.fine_tune_rounds == 0 {
        error_before
    } else {
        score(metric, &predictor.predict(&test_clouds)?, &test_truth)?
    };

    let improvement = match metric {
        _ if error_before == 0.0 => 0.0,
        Metric::MleCm => (error_before - error_after) / error_before,
        Metric::Accuracy => (error_after - error_before) / error_before,
    };
    Ok(UdaReport {
        metric,
        error_before,
        error_after,
        improvement,
        n_source: source.len(),
        n_target_train: train.len(),
        n_target_test: test.len(),
        n_mixed,
        rounds: cfg.fine_tune_rounds,
    })
}
