//! Flat `key = value` configuration, merged with command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use wixup::augment::{AugmentConfig, Method, PairScope, PlusOrder};
use wixup::mixer::{MixConfig, OutputCount, Resampling};
use wixup::profile::ProfileConfig;
use wixup::uda::{Pairing, UdaConfig};

use crate::Failure;

const MIX_KEYS: &[(&str, &str)] = &[
    ("window", "512"),
    ("range_resolution", "0.0375"),
    ("sigma", "1"),
    ("n_out", "mean"),
    ("jitter_sigma", "0.25"),
    ("epsilon_height", "0.000001"),
    ("resampling", "residual"),
];

pub const AUGMENT_KEYS: &[(&str, &str)] = &[
    ("method", "wixup"),
    ("scale", "1"),
    ("seed", "0"),
    ("cga_low", "0.8"),
    ("cga_high", "1.2"),
    ("stack_k", "5"),
    ("stack_target", "8"),
    ("cross_sequence", "false"),
    ("plus_order", "mix_then_scale"),
];

pub const SELFTRAIN_KEYS: &[(&str, &str)] = &[
    ("seed", "0"),
    ("pairing", "random"),
    ("target_train_fraction", "0.5"),
    ("fine_tune_rounds", "1"),
    ("k", "3"),
];

/// Effective settings for one command: defaults, then the config file, then
/// flags.
#[derive(Debug, Clone)]
pub struct Settings(BTreeMap<String, String>);

pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected `key = value`", n + 1));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(format!("line {}: empty key", n + 1));
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", n + 1));
        }
    }
    Ok(out)
}

impl Settings {
    pub fn resolve(
        keys: &[(&str, &str)],
        with_mix: bool,
        file: Option<&Path>,
        flags: &[(&str, Option<String>)],
    ) -> Result<Self, Failure> {
        let mut values: BTreeMap<String, String> = BTreeMap::new();
        let known: Vec<&(&str, &str)> = keys.iter().chain(if with_mix { MIX_KEYS } else { &[] }).collect();
        for (k, v) in &known {
            values.insert(k.to_string(), v.to_string());
        }
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            let parsed = parse_file(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            for (k, v) in parsed {
                if !values.contains_key(&k) {
                    return Err(Failure::Usage(format!("{}: unknown key `{k}`", path.display())));
                }
                values.insert(k, v);
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v.clone());
            }
        }
        Ok(Self(values))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, Failure>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.0.get(key).ok_or_else(|| Failure::Usage(format!("missing setting `{key}`")))?;
        raw.parse().map_err(|e| Failure::Usage(format!("bad value for `{key}`: {raw:?} ({e})")))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.0).expect("string map serializes")
    }

    pub fn mix_config(&self) -> Result<MixConfig, Failure> {
        let n_out = match self.get::<String>("n_out")?.as_str() {
            "mean" => OutputCount::MeanOfInputs,
            other => OutputCount::Fixed(
                other.parse().map_err(|_| Failure::Usage(format!("n_out must be `mean` or a count, got {other:?}")))?,
            ),
        };
        let resampling = match self.get::<String>("resampling")?.as_str() {
            "residual" => Resampling::Residual,
            "multinomial" => Resampling::Multinomial,
            other => return Err(Failure::Usage(format!("unknown resampling {other:?}"))),
        };
        let cfg = MixConfig {
            profile: ProfileConfig {
                window: self.get("window")?,
                range_resolution: self.get("range_resolution")?,
                sigma: self.get("sigma")?,
            },
            n_out,
            jitter_sigma: self.get("jitter_sigma")?,
            epsilon_height: self.get("epsilon_height")?,
            resampling,
        };
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn augment_config(&self) -> Result<AugmentConfig, Failure> {
        let method = match self.get::<String>("method")?.as_str() {
            "wixup" => Method::Wixup,
            "cga" => Method::Cga,
            "stack" => Method::Stack,
            "wixup+" => Method::WixupPlus,
            other => return Err(Failure::Usage(format!("unknown method {other:?}"))),
        };
        let plus_order = match self.get::<String>("plus_order")?.as_str() {
            "mix_then_scale" => PlusOrder::MixThenScale,
            "scale_then_mix" => PlusOrder::ScaleThenMix,
            other => return Err(Failure::Usage(format!("unknown plus_order {other:?}"))),
        };
        let cfg = AugmentConfig {
            method,
            scale: self.get("scale")?,
            mix: self.mix_config()?,
            cga_range: (self.get("cga_low")?, self.get("cga_high")?),
            stack_k: self.get("stack_k")?,
            stack_target: self.get("stack_target")?,
            seed: self.get("seed")?,
            pair_scope: if self.get("cross_sequence")? { PairScope::AcrossSequences } else { PairScope::WithinSequence },
            plus_order,
        };
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn uda_config(&self) -> Result<UdaConfig, Failure> {
        let pairing = match self.get::<String>("pairing")?.as_str() {
            "random" => Pairing::Random,
            "cyclic" => Pairing::Cyclic,
            other => return Err(Failure::Usage(format!("unknown pairing {other:?}"))),
        };
        let fraction: f64 = self.get("target_train_fraction")?;
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Failure::Usage("target_train_fraction must be in (0, 1)".into()));
        }
        Ok(UdaConfig {
            target_train_fraction: fraction,
            pairing,
            mix: self.mix_config()?,
            seed: self.get("seed")?,
            fine_tune_rounds: self.get("fine_tune_rounds")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let m = parse_file("# comment\nscale = 6\n\n seed=7 # trailing\n").unwrap();
        assert_eq!(m.get("scale").unwrap(), "6");
        assert_eq!(m.get("seed").unwrap(), "7");
        assert!(parse_file("scale 6").is_err());
        assert!(parse_file("a = 1\na = 2").is_err());
    }

    #[test]
    fn flags_override_file_and_unknown_keys_fail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        std::fs::write(&path, "scale = 6\nseed = 3\n").unwrap();
        let s = Settings::resolve(AUGMENT_KEYS, true, Some(&path), &[("seed", Some("9".into())), ("scale", None)]).unwrap();
        assert_eq!(s.get::<usize>("scale").unwrap(), 6);
        assert_eq!(s.get::<u64>("seed").unwrap(), 9);
        assert_eq!(s.augment_config().unwrap().scale, 6);

        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(matches!(Settings::resolve(AUGMENT_KEYS, true, Some(&path), &[]), Err(Failure::Usage(_))));
        std::fs::write(&path, "pairing = cyclic\n").unwrap();
        assert!(Settings::resolve(AUGMENT_KEYS, true, Some(&path), &[]).is_err());
        assert!(Settings::resolve(SELFTRAIN_KEYS, true, Some(&path), &[]).is_ok());
    }

    #[test]
    fn bad_values_are_usage_errors() {
        let s = Settings::resolve(AUGMENT_KEYS, true, None, &[("method", Some("bogus".into()))]).unwrap();
        assert!(matches!(s.augment_config(), Err(Failure::Usage(_))));
        let s = Settings::resolve(AUGMENT_KEYS, true, None, &[("scale", Some("0".into()))]).unwrap();
        assert!(matches!(s.augment_config(), Err(Failure::Usage(_))));
    }
}
