//! Synthetic stand-in for recorded human-tracking datasets.
//!
//! Each sequence is one subject standing near boresight, swaying slowly and
//! swinging both arms. Points are the keypoints plus isotropic Gaussian noise,
//! with per-point dropout to mimic the sparsity of CFAR output.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::model::{Dataset, DatasetMeta, Frame, Label, LabelKind, Point, PointDims};
use super::DatasetError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthLabel {
    Keypoints { joints: usize },
    Classes { classes: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub sequences: usize,
    pub frames_per_sequence: usize,
    /// Hz.
    pub frame_rate: f64,
    pub label: SynthLabel,
    /// Added to every x coordinate (points and keypoints) after sampling.
    pub shift_x: f64,
    /// Std of per-axis point noise, meters.
    pub noise_scale: f64,
    /// Per-point drop probability. At least one point per frame survives.
    pub dropout: f64,
    /// Mean subject distance along boresight, meters.
    pub distance: f64,
    /// Upper bound on the lateral and radial sway amplitude, meters.
    pub sway: f64,
    /// Emit 5D points (doppler, intensity).
    pub echo: bool,
    pub seq_prefix: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            sequences: 2,
            frames_per_sequence: 50,
            frame_rate: 30.0,
            label: SynthLabel::Keypoints { joints: 19 },
            shift_x: 0.0,
            noise_scale: 0.02,
            dropout: 0.3,
            distance: 2.5,
            sway: 0.08,
            echo: false,
            seq_prefix: "seq".into(),
        }
    }
}

// Standing pose, body frame: x lateral, y depth, z up; origin at the pelvis.
const TEMPLATE: [[f64; 3]; 19] = [
    [0.0, 0.0, 0.70],   // head
    [0.0, 0.0, 0.50],   // neck
    [0.0, 0.0, 0.25],   // spine
    [0.0, 0.0, 0.0],    // pelvis
    [-0.18, 0.0, 0.45], // left shoulder
    [-0.22, 0.0, 0.18], // left elbow
    [-0.24, 0.0, -0.05], // left wrist
    [-0.25, 0.0, -0.12], // left hand
    [0.18, 0.0, 0.45],  // right shoulder
    [0.22, 0.0, 0.18],  // right elbow
    [0.24, 0.0, -0.05], // right wrist
    [0.25, 0.0, -0.12], // right hand
    [-0.10, 0.0, -0.05], // left hip
    [-0.11, 0.0, -0.48], // left knee
    [-0.12, 0.0, -0.90], // left ankle
    [0.10, 0.0, -0.05], // right hip
    [0.11, 0.0, -0.48], // right knee
    [0.12, 0.0, -0.90], // right ankle
    [0.0, 0.05, 0.10],  // chest front
];
const LEFT_ARM: [usize; 3] = [5, 6, 7];
const RIGHT_ARM: [usize; 3] = [9, 10, 11];
const LEFT_SHOULDER: usize = 4;
const RIGHT_SHOULDER: usize = 8;
const PELVIS_HEIGHT: f64 = 1.0;

struct Motion {
    class: usize,
    sway_amp: [f64; 2],
    sway_freq: [f64; 2],
    sway_phase: [f64; 2],
    arm_amp: f64,
    arm_freq: f64,
    arm_phase: f64,
}

impl Motion {
    fn sample(rng: &mut ChaCha8Rng, class: usize, sway: f64) -> Self {
        Self {
            class,
            sway_amp: [rng.random::<f64>() * sway, rng.random::<f64>() * sway],
            sway_freq: [0.05 + 0.15 * rng.random::<f64>(), 0.05 + 0.15 * rng.random::<f64>()],
            sway_phase: [TAU * rng.random::<f64>(), TAU * rng.random::<f64>()],
            arm_amp: 0.4 + 0.3 * (class % 3) as f64 + 0.2 * rng.random::<f64>(),
            arm_freq: 0.3 + 0.25 * class as f64 + 0.1 * rng.random::<f64>(),
            arm_phase: TAU * rng.random::<f64>(),
        }
    }

    fn keypoints(&self, t: f64, joints: usize, cfg: &SynthConfig) -> Vec<[f64; 3]> {
        let cx = self.sway_amp[0] * (TAU * self.sway_freq[0] * t + self.sway_phase[0]).sin();
        let cy = cfg.distance + self.sway_amp[1] * (TAU * self.sway_freq[1] * t + self.sway_phase[1]).sin();
        let swing = self.arm_amp * (TAU * self.arm_freq * t + self.arm_phase).sin();
        // Odd classes swing the arms in opposition.
        let right_swing = if self.class % 2 == 1 { -swing } else { swing };

        let mut body = TEMPLATE;
        rotate_arm(&mut body, LEFT_SHOULDER, &LEFT_ARM, swing);
        rotate_arm(&mut body, RIGHT_SHOULDER, &RIGHT_ARM, right_swing);

        (0..joints)
            .map(|j| {
                let b = body[j % TEMPLATE.len()];
                let lift = 0.02 * (j / TEMPLATE.len()) as f64;
                [b[0] + cx, b[1] + cy, b[2] + PELVIS_HEIGHT - 1.0 + lift]
            })
            .collect()
    }
}

/// Swing in the sagittal (y-z) plane about the shoulder.
fn rotate_arm(body: &mut [[f64; 3]; 19], shoulder: usize, arm: &[usize], angle: f64) {
    let s = body[shoulder];
    let (sin, cos) = angle.sin_cos();
    for &j in arm {
        let dy = body[j][1] - s[1];
        let dz = body[j][2] - s[2];
        body[j][1] = s[1] + dy * cos - dz * sin;
        body[j][2] = s[2] + dy * sin + dz * cos;
    }
}

/// Pure function of `(config, seed)`.
pub fn generate_synthetic(cfg: &SynthConfig, seed: u64) -> Result<Dataset, DatasetError> {
    if cfg.sequences == 0 || cfg.frames_per_sequence == 0 {
        return Err(DatasetError::Config("synthetic dataset needs at least one frame".into()));
    }
    if !(cfg.frame_rate > 0.0) || !(cfg.noise_scale >= 0.0) || !(0.0..1.0).contains(&cfg.dropout) {
        return Err(DatasetError::Config(
            "frame_rate must be > 0, noise_scale >= 0 and dropout in [0, 1)".into(),
        ));
    }
    let (joints, label_kind) = match cfg.label {
        SynthLabel::Keypoints { joints } if joints > 0 => (joints, LabelKind::Keypoints { joints }),
        SynthLabel::Classes { classes } if classes > 0 => (TEMPLATE.len(), LabelKind::Classes { classes }),
        _ => return Err(DatasetError::Config("label size must be positive".into())),
    };
    let noise = Normal::new(0.0, cfg.noise_scale).map_err(|e| DatasetError::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames = Vec::with_capacity(cfg.sequences * cfg.frames_per_sequence);

    for s in 0..cfg.sequences {
        let class = match cfg.label {
            SynthLabel::Classes { classes } => rng.random_range(0..classes),
            SynthLabel::Keypoints { .. } => 0,
        };
        let motion = Motion::sample(&mut rng, class, cfg.sway);
        let seq_id = format!("{}{:03}", cfg.seq_prefix, s);
        for k in 0..cfg.frames_per_sequence {
            let t = k as f64 / cfg.frame_rate;
            let mut keypoints = motion.keypoints(t, joints, cfg);
            let before = cfg.echo.then(|| motion.keypoints(t - 1.0 / cfg.frame_rate, joints, cfg));

            let mut points = Vec::with_capacity(joints);
            for (j, kp) in keypoints.iter().enumerate() {
                let dropped = rng.random::<f64>() < cfg.dropout;
                let offset = [noise.sample(&mut rng), noise.sample(&mut rng), noise.sample(&mut rng)];
                let intensity = 5.0 + 10.0 * rng.random::<f64>();
                if dropped {
                    continue;
                }
                let (x, y, z) = (kp[0] + offset[0], kp[1] + offset[1], kp[2] + offset[2]);
                points.push(match &before {
                    Some(prev) => {
                        let doppler = (norm(kp) - norm(&prev[j])) * cfg.frame_rate;
                        Point::with_echo(x, y, z, doppler, intensity)
                    }
                    None => Point::new(x, y, z),
                });
            }
            if points.is_empty() {
                let j = rng.random_range(0..joints);
                let kp = keypoints[j];
                points.push(match &before {
                    Some(prev) => Point::with_echo(kp[0], kp[1], kp[2], (norm(&kp) - norm(&prev[j])) * cfg.frame_rate, 10.0),
                    None => Point::new(kp[0], kp[1], kp[2]),
                });
            }

            for p in &mut points {
                p.x += cfg.shift_x;
            }
            for kp in &mut keypoints {
                kp[0] += cfg.shift_x;
            }
            let label = match cfg.label {
                SynthLabel::Keypoints { .. } => Label::Keypoints(keypoints),
                SynthLabel::Classes { classes } => Label::one_hot(class, classes),
            };
            frames.push(Frame { seq_id: seq_id.clone(), t, points, label });
        }
    }

    let dims = if cfg.echo { PointDims::Five } else { PointDims::Three };
    Dataset::new(frames, Some(DatasetMeta { label: label_kind, dims }))
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
