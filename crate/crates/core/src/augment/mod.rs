//! Dataset-level augmentation.
//!
//! WixUp pairs every frame with its neighbours `d = 1..=s` steps later in the
//! same sequence and mixes each pair, growing a sequence of length `L` by
//! `sum(L - d)` frames. Every pair, and every frame for the single-frame
//! baselines, gets its own rng seeded from `(seed, seq_id, index, distance)`,
//! so the output does not depend on how the work is scheduled.

mod baselines;

pub use baselines::{cga_factor, cga_frame, scale_frame, stack_frame};

use rayon::prelude::*;

use crate::frames::{Dataset, DatasetError, Frame};
use crate::mixer::{mix_frames, MixConfig, MixError};
use crate::seed::SeedKey;

#[derive(Debug, thiserror::Error)]
pub enum AugmentError {
    #[error("mixing {seq} frame {index} with distance {distance}: {source}")]
    Mix { seq: String, index: usize, distance: usize, source: MixError },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("invalid augment configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Wixup,
    Cga,
    Stack,
    /// WixUp followed (or preceded, see [`PlusOrder`]) by CGA.
    WixupPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlusOrder {
    /// Mix each pair, then scale the mixed frame.
    #[default]
    MixThenScale,
    /// Scale both members of a pair independently, then mix.
    ScaleThenMix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairScope {
    #[default]
    WithinSequence,
    /// Treat the whole dataset, in `(seq_id, t)` order, as one sequence.
    AcrossSequences,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentConfig {
    pub method: Method,
    /// Largest pair distance for WixUp; number of scaled copies for CGA.
    pub scale: usize,
    pub mix: MixConfig,
    pub cga_range: (f64, f64),
    pub stack_k: usize,
    pub stack_target: usize,
    pub seed: u64,
    pub pair_scope: PairScope,
    pub plus_order: PlusOrder,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            method: Method::Wixup,
            scale: 1,
            mix: MixConfig::default(),
            cga_range: (0.8, 1.2),
            stack_k: 5,
            stack_target: 8,
            seed: 0,
            pair_scope: PairScope::WithinSequence,
            plus_order: PlusOrder::MixThenScale,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<(), AugmentError> {
        if self.scale == 0 {
            return Err(AugmentError::Config("scale must be at least 1".into()));
        }
        let (low, high) = self.cga_range;
        if !(low > 0.0 && low <= high && high.is_finite()) {
            return Err(AugmentError::Config("cga range needs 0 < low <= high".into()));
        }
        if self.stack_target == 0 {
            return Err(AugmentError::Config("stack target count must be at least 1".into()));
        }
        self.mix.validate().map_err(|e| AugmentError::Config(e.to_string()))
    }
}

/// A pair of frames to mix, by index into `Dataset::frames()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedPair {
    pub first: usize,
    pub second: usize,
    /// Position of `first` within its pairing group (sequence, or the whole
    /// dataset when pairing across sequences).
    pub local: usize,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairPlan {
    pub pairs: Vec<PlannedPair>,
}

impl PairPlan {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// All `(i, i + d)` pairs for `d = 1..=scale`, ordered by sequence, then
/// distance, then index. Pairs touching an empty frame are left out.
pub fn enumerate_pairs(dataset: &Dataset, scale: usize, scope: PairScope) -> PairPlan {
    let groups: Vec<(usize, usize)> = match scope {
        PairScope::WithinSequence => {
            let mut start = 0;
            dataset
                .sequences()
                .iter()
                .map(|(_, frames)| {
                    let g = (start, frames.len());
                    start += frames.len();
                    g
                })
                .collect()
        }
        PairScope::AcrossSequences => vec![(0, dataset.len())],
    };
    let frames = dataset.frames();
    let mut pairs = Vec::new();
    for (start, len) in groups {
        for distance in 1..=scale {
            for local in 0..len.saturating_sub(distance) {
                let (first, second) = (start + local, start + local + distance);
                if frames[first].is_empty() || frames[second].is_empty() {
                    continue;
                }
                pairs.push(PlannedPair { first, second, local, distance });
            }
        }
    }
    PairPlan { pairs }
}

fn group_id(frames: &[Frame], pair: &PlannedPair) -> String {
    let (a, b) = (&frames[pair.first].seq_id, &frames[pair.second].seq_id);
    if a == b {
        a.clone()
    } else {
        format!("{a}+{b}")
    }
}

fn mix_pair(frames: &[Frame], pair: &PlannedPair, cfg: &AugmentConfig) -> Result<Frame, AugmentError> {
    let group = group_id(frames, pair);
    let mut rng = SeedKey::new("wixup-pair")
        .u64(cfg.seed)
        .str(&group)
        .u64(pair.local as u64)
        .u64(pair.distance as u64)
        .rng();
    let (mut f0, mut f1) = (frames[pair.first].clone(), frames[pair.second].clone());
    let scale_first = cfg.method == Method::WixupPlus && cfg.plus_order == PlusOrder::ScaleThenMix;
    if scale_first {
        f0 = cga_frame(&f0, &mut rng, cfg.cga_range);
        f1 = cga_frame(&f1, &mut rng, cfg.cga_range);
    }
    let mut mixed = mix_frames(&f0, &f1, &cfg.mix, &mut rng).map_err(|source| AugmentError::Mix {
        seq: group.clone(),
        index: pair.local,
        distance: pair.distance,
        source,
    })?;
    if cfg.method == Method::WixupPlus && !scale_first {
        mixed = cga_frame(&mixed, &mut rng, cfg.cga_range);
    }
    mixed.seq_id = format!("{group}#aug{}", pair.distance);
    Ok(mixed)
}

/// Original frames plus the augmented ones, as a new dataset.
pub fn augment(dataset: &Dataset, cfg: &AugmentConfig) -> Result<Dataset, AugmentError> {
    cfg.validate()?;
    let Some(meta) = dataset.meta().copied() else {
        return Ok(Dataset::empty());
    };
    let frames = dataset.frames();

    let extra: Vec<Frame> = match cfg.method {
        Method::Wixup | Method::WixupPlus => {
            let plan = enumerate_pairs(dataset, cfg.scale, cfg.pair_scope);
            plan.pairs.par_iter().map(|pair| mix_pair(frames, pair, cfg)).collect::<Result<_, _>>()?
        }
        Method::Cga => per_frame(dataset, |frame, local| {
            (1..=cfg.scale)
                .map(|copy| {
                    let mut rng = SeedKey::new("cga").u64(cfg.seed).str(&frame.seq_id).u64(local as u64).u64(copy as u64).rng();
                    let mut out = cga_frame(frame, &mut rng, cfg.cga_range);
                    out.seq_id = format!("{}#cga{copy}", frame.seq_id);
                    out
                })
                .collect()
        }),
        Method::Stack => per_frame(dataset, |frame, local| {
            let mut rng = SeedKey::new("stack").u64(cfg.seed).str(&frame.seq_id).u64(local as u64).rng();
            stack_frame(frame, cfg.stack_k, cfg.stack_target, &mut rng)
                .into_iter()
                .enumerate()
                .map(|(j, mut out)| {
                    out.seq_id = format!("{}#stack{}", frame.seq_id, j + 1);
                    out
                })
                .collect()
        }),
    };

    let mut all = frames.to_vec();
    all.extend(extra);
    Ok(Dataset::new(all, Some(meta))?)
}

fn per_frame<F>(dataset: &Dataset, f: F) -> Vec<Frame>
where
    F: Fn(&Frame, usize) -> Vec<Frame> + Sync,
{
    let items: Vec<(&Frame, usize)> = dataset
        .sequences()
        .into_iter()
        .flat_map(|(_, frames)| frames.iter().enumerate().map(|(i, f)| (f, i)))
        .collect();
    items.par_iter().flat_map_iter(|(frame, local)| f(frame, *local)).collect()
}
