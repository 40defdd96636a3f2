#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wixup::frames::{write_dataset, Dataset, Frame, Label, Point};

pub fn wixup() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wixup"));
    cmd.env_remove("WIXUP_THREADS");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    wixup().args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// One sequence of `n` frames, each a small cloud drifting along x.
pub fn walk_dataset(n: usize) -> Dataset {
    let frames = (0..n)
        .map(|i| {
            let x = 0.01 * i as f64;
            Frame {
                seq_id: "walk".into(),
                t: i as f64 / 30.0,
                points: (0..4).map(|k| Point::new(x + 0.05 * k as f64, 2.0 + 0.1 * k as f64, 0.2 * k as f64)).collect(),
                label: Label::Keypoints(vec![[x, 2.0, 0.0], [x, 2.1, 0.5]]),
            }
        })
        .collect();
    Dataset::new(frames, None).unwrap()
}

pub fn write_walk(dir: &Path, n: usize) -> PathBuf {
    let path = dir.join(format!("walk{n}.jsonl"));
    write_dataset(&walk_dataset(n), &path).unwrap();
    path
}
