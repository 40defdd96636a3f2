//! `stats --gen` arguments: a preset name, inline `key=value,...` pairs, or a file
//! of `key = value` lines. Inline pairs and files may start from a preset
//! with `preset=<name>`.

use std::collections::BTreeMap;
use std::path::Path;

use wixup::frames::{SynthConfig, SynthLabel};

use crate::settings::parse_file;
use crate::Failure;

pub const PRESETS: &[&str] = &["default", "uda-source", "uda-target", "uda-target-aligned"];

/// Source and target domains for the self-training check: 500 source frames,
/// 400 target frames (200 train + 200 test at the default split), target
/// shifted 0.2 m along x.
pub fn preset(name: &str) -> Option<SynthConfig> {
    let base = SynthConfig::default();
    Some(match name {
        "default" => base,
        "uda-source" => SynthConfig { frames_per_sequence: 250, seq_prefix: "src".into(), ..base },
        "uda-target" => SynthConfig { frames_per_sequence: 200, shift_x: 0.2, seq_prefix: "tgt".into(), ..base },
        "uda-target-aligned" => SynthConfig { frames_per_sequence: 200, seq_prefix: "tgt".into(), ..base },
        _ => return None,
    })
}

fn apply(mut cfg: SynthConfig, pairs: &BTreeMap<String, String>) -> Result<SynthConfig, String> {
    fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
        v.parse().map_err(|_| format!("bad value for `{key}`: {v:?}"))
    }
    for (key, v) in pairs {
        match key.as_str() {
            "preset" => {}
            "sequences" => cfg.sequences = num(key, v)?,
            "frames" => cfg.frames_per_sequence = num(key, v)?,
            "rate" => cfg.frame_rate = num(key, v)?,
            "joints" => cfg.label = SynthLabel::Keypoints { joints: num(key, v)? },
            "classes" => cfg.label = SynthLabel::Classes { classes: num(key, v)? },
            "shift_x" => cfg.shift_x = num(key, v)?,
            "noise" => cfg.noise_scale = num(key, v)?,
            "dropout" => cfg.dropout = num(key, v)?,
            "distance" => cfg.distance = num(key, v)?,
            "sway" => cfg.sway = num(key, v)?,
            "echo" => cfg.echo = num(key, v)?,
            "prefix" => cfg.seq_prefix = v.clone(),
            _ => return Err(format!("unknown generator key `{key}`")),
        }
    }
    Ok(cfg)
}

fn from_pairs(pairs: BTreeMap<String, String>) -> Result<SynthConfig, String> {
    let base = match pairs.get("preset") {
        Some(name) => preset(name).ok_or_else(|| format!("unknown preset {name:?}"))?,
        None => SynthConfig::default(),
    };
    apply(base, &pairs)
}

pub fn parse_generator(arg: &str) -> Result<SynthConfig, Failure> {
    if let Some(cfg) = preset(arg) {
        return Ok(cfg);
    }
    let pairs = if arg.contains('=') {
        parse_file(&arg.replace(',', "\n"))
    } else if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("cannot read {arg}: {e}")))?;
        parse_file(&text)
    } else {
        Err(format!("{arg:?} is not a preset ({}), inline key=value list or file", PRESETS.join(", ")))
    };
    pairs.and_then(from_pairs).map_err(Failure::Usage)
}

/// Echo of a generator config for provenance.
pub fn describe(cfg: &SynthConfig) -> serde_json::Value {
    let label = match cfg.label {
        SynthLabel::Keypoints { joints } => serde_json::json!({ "keypoints": joints }),
        SynthLabel::Classes { classes } => serde_json::json!({ "classes": classes }),
    };
    serde_json::json!({
        "sequences": cfg.sequences,
        "frames": cfg.frames_per_sequence,
        "rate": cfg.frame_rate,
        "label": label,
        "shift_x": cfg.shift_x,
        "noise": cfg.noise_scale,
        "dropout": cfg.dropout,
        "distance": cfg.distance,
        "sway": cfg.sway,
        "echo": cfg.echo,
        "prefix": cfg.seq_prefix,
    })
}
