use std::cmp::Ordering;

use crate::profile::{ProfileSource, RangeProfile};

use super::intersect::find_intersections;
use super::{MixConfig, MixError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CandidateKind {
    /// A real point of one input frame, carried with its own angles.
    Original(ProfileSource),
    /// A crossing of the two profiles.
    Crossing { height: f64 },
}

/// A range location the bootstrap may draw from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub bin: f64,
    pub weight: f64,
    pub kind: CandidateKind,
}

impl Candidate {
    pub fn is_original(&self) -> bool {
        matches!(self.kind, CandidateKind::Original(_))
    }

    pub fn source(&self) -> Option<&ProfileSource> {
        match &self.kind {
            CandidateKind::Original(s) => Some(s),
            CandidateKind::Crossing { .. } => None,
        }
    }

    fn order_key(&self) -> (u8, u8, usize) {
        match &self.kind {
            CandidateKind::Original(s) => (0, s.tag, s.index),
            CandidateKind::Crossing { .. } => (1, u8::MAX, usize::MAX),
        }
    }
}

/// Originals of both profiles (weight 1) plus every crossing (weight
/// `height + 1`), sorted by bin with originals before crossings on ties.
///
/// Originals are combined as a multiset union: a point present in both
/// frames with identical range, angles and echo is kept once per pairing, so
/// a frame mixed with itself yields exactly its own points.
pub fn build_candidates(a: &RangeProfile, b: &RangeProfile, cfg: &MixConfig) -> Result<Vec<Candidate>, MixError> {
    let crossings = find_intersections(a, b, cfg.epsilon_height)?;

    let mut originals: Vec<ProfileSource> = a.sources.iter().chain(b.sources.iter()).copied().collect();
    originals.sort_by(|x, y| same_point_cmp(x, y).then(x.tag.cmp(&y.tag)).then(x.index.cmp(&y.index)));

    let mut candidates = Vec::with_capacity(originals.len() + crossings.len());
    let mut start = 0;
    while start < originals.len() {
        let mut end = start + 1;
        while end < originals.len() && same_point_cmp(&originals[start], &originals[end]).is_eq() {
            end += 1;
        }
        let group = &originals[start..end];
        let first_tag = group[0].tag;
        let lead = group.iter().take_while(|s| s.tag == first_tag).count();
        let rest = group.len() - lead;
        // Keep max(lead, rest) entries: all of the first tag, plus any surplus of the second.
        let keep = group[..lead].iter().chain(group[lead..].iter().skip(lead.min(rest)));
        candidates.extend(keep.map(|s| Candidate { bin: s.bin, weight: 1.0, kind: CandidateKind::Original(*s) }));
        start = end;
    }

    candidates.extend(crossings.into_iter().map(|x| Candidate {
        bin: x.bin,
        weight: x.height + 1.0,
        kind: CandidateKind::Crossing { height: x.height },
    }));
    candidates.sort_by(|x, y| x.bin.total_cmp(&y.bin).then_with(|| x.order_key().cmp(&y.order_key())));
    Ok(candidates)
}

fn same_point_cmp(x: &ProfileSource, y: &ProfileSource) -> Ordering {
    let echo = |s: &ProfileSource| s.echo.map_or([f64::NEG_INFINITY; 2], |e| [e.doppler, e.intensity]);
    let kx = [x.bin, x.azimuth, x.elevation, echo(x)[0], echo(x)[1]];
    let ky = [y.bin, y.azimuth, y.elevation, echo(y)[0], echo(y)[1]];
    kx.iter().zip(ky.iter()).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}
