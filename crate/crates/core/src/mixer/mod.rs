//! Mixing two frames at the range-profile level.
//!
//! ```text
//! frame 0 ─┐                                   ┌─ originals (weight 1)
//!          ├─ range profiles ─ sign changes ───┤                       ─ bootstrap ─ angles ─ points
//! frame 1 ─┘                                   └─ crossings (height+1)
//! ```
//!
//! Labels are averaged separately by [`mix_labels`].

mod angles;
mod bootstrap;
mod candidates;
mod intersect;
mod labels;

pub use angles::{assign_angles, blend_direction, kernel_weights, Direction};
pub use bootstrap::{bootstrap_sample, Draw, Resampling};
pub use candidates::{build_candidates, Candidate, CandidateKind};
pub use intersect::{find_intersections, Intersection};
pub use labels::mix_labels;

use rand::Rng;

use crate::frames::{Frame, LabelKind, Point};
use crate::profile::{bin_to_range, build_profile, spherical_to_cart, ProfileConfig, ProfileError, SphericalPoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MixError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("profile windows differ: {0} vs {1} bins")]
    WindowMismatch(usize, usize),
    #[error("cannot mix an empty frame")]
    EmptyFrame,
    #[error("no candidates to sample from")]
    NoCandidates,
    #[error("no original points to take angles from")]
    NoOriginals,
    #[error("label shapes differ: {0:?} vs {1:?}")]
    LabelMismatch(LabelKind, LabelKind),
    #[error("invalid mix configuration: {0}")]
    Config(&'static str),
}

/// Number of points in a mixed frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputCount {
    /// Mean of the two input counts, rounded half away from zero.
    #[default]
    MeanOfInputs,
    Fixed(usize),
}

impl OutputCount {
    pub fn resolve(self, n0: usize, n1: usize) -> usize {
        match self {
            OutputCount::MeanOfInputs => ((n0 + n1) as f64 / 2.0).round() as usize,
            OutputCount::Fixed(n) => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixConfig {
    pub profile: ProfileConfig,
    pub n_out: OutputCount,
    /// Std of the Gaussian perturbation of each drawn bin, in bins.
    pub jitter_sigma: f64,
    /// Crossings at or below this amplitude are ignored.
    pub epsilon_height: f64,
    pub resampling: Resampling,
}

impl Default for MixConfig {
    fn default() -> Self {
        Self {
            profile: ProfileConfig::default(),
            n_out: OutputCount::MeanOfInputs,
            jitter_sigma: 0.25,
            epsilon_height: 1e-6,
            resampling: Resampling::Residual,
        }
    }
}

impl MixConfig {
    pub fn validate(&self) -> Result<(), MixError> {
        self.profile.validate()?;
        if !(self.jitter_sigma >= 0.0 && self.jitter_sigma.is_finite()) {
            return Err(MixError::Config("jitter_sigma must be a non-negative number"));
        }
        if !(self.epsilon_height >= 0.0) {
            return Err(MixError::Config("epsilon_height must be non-negative"));
        }
        if self.n_out == OutputCount::Fixed(0) {
            return Err(MixError::Config("n_out must be at least 1"));
        }
        Ok(())
    }
}

/// Synthesizes one frame from two.
///
/// The pair is put in a canonical order first, so `mix_frames(a, b)` and
/// `mix_frames(b, a)` agree for the same rng state. The output carries the
/// averaged label, the mean timestamp and the first frame's sequence id with
/// an `#aug` suffix.
pub fn mix_frames<R: Rng + ?Sized>(f0: &Frame, f1: &Frame, cfg: &MixConfig, rng: &mut R) -> Result<Frame, MixError> {
    cfg.validate()?;
    if f0.is_empty() || f1.is_empty() {
        return Err(MixError::EmptyFrame);
    }
    let (first, second) = if f1.canonical_cmp(f0).is_lt() { (f1, f0) } else { (f0, f1) };
    let label = mix_labels(&first.label, &second.label)?;

    let a = build_profile(first, &cfg.profile, 0)?;
    let b = build_profile(second, &cfg.profile, 1)?;
    let candidates = build_candidates(&a, &b, cfg)?;
    let n_out = cfg.n_out.resolve(first.points.len(), second.points.len()).max(1);
    let draws = bootstrap_sample(&candidates, n_out, cfg, rng)?;

    let keep_echo = first.points.iter().chain(&second.points).all(|p| p.echo.is_some());
    let points = draws
        .iter()
        .map(|draw| {
            let dir = assign_angles(draw, &candidates, cfg.profile.sigma)?;
            let s = SphericalPoint { range: bin_to_range(draw.bin, &cfg.profile), azimuth: dir.azimuth, elevation: dir.elevation };
            Ok(Point { echo: if keep_echo { dir.echo } else { None }, ..spherical_to_cart(&s) })
        })
        .collect::<Result<Vec<_>, MixError>>()?;

    Ok(Frame { seq_id: format!("{}#aug", first.seq_id), t: 0.5 * (first.t + second.t), points, label })
}
