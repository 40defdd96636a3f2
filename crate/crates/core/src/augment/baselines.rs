//! Single-frame baselines: global random scaling and zero-pad-and-resample
//! stacking.

use rand::Rng;

use crate::frames::{Echo, Frame, Label, Point};

/// Multiplies every point coordinate and, for keypoint labels, every joint
/// coordinate by `factor`. Class labels and echo values are untouched.
pub fn scale_frame(frame: &Frame, factor: f64) -> Frame {
    let points = frame
        .points
        .iter()
        .map(|p| Point { x: p.x * factor, y: p.y * factor, z: p.z * factor, echo: p.echo })
        .collect();
    let label = match &frame.label {
        Label::Keypoints(k) => Label::Keypoints(k.iter().map(|j| [j[0] * factor, j[1] * factor, j[2] * factor]).collect()),
        other => other.clone(),
    };
    Frame { seq_id: frame.seq_id.clone(), t: frame.t, points, label }
}

pub fn cga_factor<R: Rng + ?Sized>(rng: &mut R, range: (f64, f64)) -> f64 {
    let (low, high) = range;
    if low == high {
        low
    } else {
        rng.random_range(low..=high)
    }
}

/// Conventional global augmentation: one uniform factor in `range` per frame.
pub fn cga_frame<R: Rng + ?Sized>(frame: &Frame, rng: &mut R, range: (f64, f64)) -> Frame {
    scale_frame(frame, cga_factor(rng, range))
}

/// Zero-pads the frame to `target_count` points, then returns `k` independent
/// resamples (with replacement) of `target_count` points each. Labels are
/// copied unchanged.
pub fn stack_frame<R: Rng + ?Sized>(frame: &Frame, k: usize, target_count: usize, rng: &mut R) -> Vec<Frame> {
    let zero = match frame.points.first().and_then(|p| p.echo) {
        Some(_) => Point { echo: Some(Echo { doppler: 0.0, intensity: 0.0 }), ..Point::ORIGIN },
        None => Point::ORIGIN,
    };
    let mut pool = frame.points.clone();
    if pool.len() < target_count {
        pool.resize(target_count, zero);
    }
    (0..k)
        .map(|_| Frame {
            seq_id: frame.seq_id.clone(),
            t: frame.t,
            points: (0..target_count).map(|_| pool[rng.random_range(0..pool.len())]).collect(),
            label: frame.label.clone(),
        })
        .collect()
}
