use crate::frames::Echo;

use super::bootstrap::Draw;
use super::candidates::{Candidate, CandidateKind};
use super::MixError;

/// Direction (and, for 5D data, echo values) given to a sampled range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub azimuth: f64,
    pub elevation: f64,
    pub echo: Option<Echo>,
}

/// Normalized Gaussian kernel weights of every original candidate around
/// `bin`, as `(candidate index, weight)`.
pub fn kernel_weights(bin: f64, candidates: &[Candidate], sigma: f64) -> Result<Vec<(usize, f64)>, MixError> {
    let exps: Vec<(usize, f64)> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_original())
        .map(|(i, c)| {
            let d = bin - c.bin;
            (i, -d * d / (2.0 * sigma * sigma))
        })
        .collect();
    if exps.is_empty() {
        return Err(MixError::NoOriginals);
    }
    // Shift by the largest exponent so far-away queries do not underflow to 0/0.
    let top = exps.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<(usize, f64)> = exps.into_iter().map(|(i, e)| (i, (e - top).exp())).collect();
    let total: f64 = raw.iter().map(|r| r.1).sum();
    Ok(raw.into_iter().map(|(i, w)| (i, w / total)).collect())
}

/// Convex combination of the originals' angles (and echo values, when every
/// original has them) under the kernel weights at `bin`. Angles are averaged
/// linearly, which assumes the field of view stays clear of the ±π seam.
pub fn blend_direction(bin: f64, candidates: &[Candidate], sigma: f64) -> Result<Direction, MixError> {
    let weights = kernel_weights(bin, candidates, sigma)?;
    let mut azimuth = 0.0;
    let mut elevation = 0.0;
    let mut echo = Some(Echo { doppler: 0.0, intensity: 0.0 });
    for (i, w) in weights {
        let Some(src) = candidates[i].source() else { continue };
        azimuth += w * src.azimuth;
        elevation += w * src.elevation;
        echo = match (echo, src.echo) {
            (Some(acc), Some(e)) => Some(Echo { doppler: acc.doppler + w * e.doppler, intensity: acc.intensity + w * e.intensity }),
            _ => None,
        };
    }
    Ok(Direction { azimuth, elevation, echo })
}

/// Draws from an original keep that point's own direction; draws from a
/// crossing get the kernel blend of all originals around the drawn bin.
pub fn assign_angles(draw: &Draw, candidates: &[Candidate], sigma: f64) -> Result<Direction, MixError> {
    match candidates.get(draw.candidate).map(|c| &c.kind) {
        Some(CandidateKind::Original(src)) => Ok(Direction { azimuth: src.azimuth, elevation: src.elevation, echo: src.echo }),
        Some(CandidateKind::Crossing { .. }) => blend_direction(draw.bin, candidates, sigma),
        None => Err(MixError::Config("draw refers to a missing candidate")),
    }
}
