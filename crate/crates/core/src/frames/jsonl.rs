//! JSON-lines interchange.
//!
//! One frame per line:
//!
//! ```text
//! {"seq":"a","t":0.0,"points":[[0.0,2.0,0.0]],"label":{"class":1,"num_classes":3}}
//! ```
//!
//! Points are `[x, y, z]` or `[x, y, z, doppler, intensity]`. Labels are one of
//! `{"keypoints":[[x,y,z],...]}`, `{"class":k,"num_classes":C}` or
//! `{"probs":[...]}` (mixed class labels). An optional first line
//! `{"meta":{"label":"keypoints","J":19,"dims":3}}` pins the dataset shape;
//! without it the shape is taken from the first frame.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use super::model::{Dataset, DatasetMeta, Frame, Label, LabelKind, Point, PointDims};
use super::DatasetError;

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let file = File::open(path.as_ref())?;
    read_from(BufReader::new(file))
}

pub fn read_from(reader: impl BufRead) -> Result<Dataset, DatasetError> {
    let mut header: Option<DatasetMeta> = None;
    let mut label_kind: Option<LabelKind> = None;
    let mut dims: Option<PointDims> = None;
    let mut last_t: HashMap<String, f64> = HashMap::new();
    let mut frames = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| DatasetError::Parse { line: line_no, msg };
        let value: Value = serde_json::from_str(&line).map_err(|e| err(format!("malformed JSON: {e}")))?;
        let obj = value.as_object().ok_or_else(|| err("expected a JSON object".into()))?;

        if let Some(meta) = obj.get("meta") {
            if !frames.is_empty() || header.is_some() {
                return Err(err("meta header must be the first line".into()));
            }
            let meta = parse_meta(meta).map_err(err)?;
            label_kind = Some(meta.label);
            dims = Some(meta.dims);
            header = Some(meta);
            continue;
        }

        let frame = parse_frame(obj).map_err(err)?;

        let kind = frame.label.kind();
        match label_kind {
            None => label_kind = Some(kind),
            Some(expected) if expected != kind => {
                return Err(err(format!("label {kind:?} does not match dataset label {expected:?}")));
            }
            _ => {}
        }
        for p in &frame.points {
            match dims {
                None => dims = Some(p.dims()),
                Some(d) if d != p.dims() => {
                    return Err(err(format!(
                        "dimensionality mismatch: expected {}-D points, got {}-D",
                        d.count(),
                        p.dims().count()
                    )));
                }
                _ => {}
            }
        }
        if let Some(prev) = last_t.get(&frame.seq_id) {
            if frame.t <= *prev {
                return Err(err(format!(
                    "non-monotone timestamps in sequence {:?}: {} after {}",
                    frame.seq_id, frame.t, prev
                )));
            }
        }
        last_t.insert(frame.seq_id.clone(), frame.t);
        frames.push(frame);
    }

    let meta = label_kind.map(|label| DatasetMeta { label, dims: dims.unwrap_or(PointDims::Three) });
    Dataset::new(frames, meta)
}

fn parse_meta(v: &Value) -> Result<DatasetMeta, String> {
    let obj = v.as_object().ok_or("meta must be an object")?;
    let dims = match obj.get("dims") {
        None => PointDims::Three,
        Some(d) => d
            .as_u64()
            .and_then(|n| PointDims::from_count(n as usize))
            .ok_or("meta.dims must be 3 or 5")?,
    };
    let size = |key: &str| -> Result<usize, String> {
        obj.get(key)
            .and_then(Value::as_u64)
            .filter(|&n| n > 0)
            .map(|n| n as usize)
            .ok_or_else(|| format!("meta.{key} must be a positive integer"))
    };
    let label = match obj.get("label").and_then(Value::as_str) {
        Some("keypoints") => LabelKind::Keypoints { joints: size("J")? },
        Some("class") | Some("classes") => LabelKind::Classes { classes: size("C")? },
        _ => return Err("meta.label must be \"keypoints\" or \"class\"".into()),
    };
    Ok(DatasetMeta { label, dims })
}

fn parse_frame(obj: &Map<String, Value>) -> Result<Frame, String> {
    for key in obj.keys() {
        if !matches!(key.as_str(), "seq" | "t" | "points" | "label") {
            return Err(format!("unknown key {key:?}"));
        }
    }
    let seq_id = obj.get("seq").and_then(Value::as_str).ok_or("missing string key \"seq\"")?.to_owned();
    let t = obj.get("t").and_then(Value::as_f64).ok_or("missing numeric key \"t\"")?;
    if !t.is_finite() {
        return Err("non-finite timestamp".into());
    }
    let points = obj
        .get("points")
        .and_then(Value::as_array)
        .ok_or("missing array key \"points\"")?
        .iter()
        .map(parse_point)
        .collect::<Result<Vec<_>, _>>()?;
    let label = parse_label(obj.get("label").ok_or("missing key \"label\"")?)?;
    Ok(Frame { seq_id, t, points, label })
}

fn parse_point(v: &Value) -> Result<Point, String> {
    let arr = v.as_array().ok_or("point must be an array")?;
    let nums = arr
        .iter()
        .map(|x| x.as_f64().ok_or("point coordinates must be numbers"))
        .collect::<Result<Vec<_>, _>>()?;
    if nums.iter().any(|x| !x.is_finite()) {
        return Err("non-finite coordinate".into());
    }
    match nums.as_slice() {
        [x, y, z] => Ok(Point::new(*x, *y, *z)),
        [x, y, z, d, i] => Ok(Point::with_echo(*x, *y, *z, *d, *i)),
        _ => Err(format!("point must have 3 or 5 components, got {}", nums.len())),
    }
}

fn parse_label(v: &Value) -> Result<Label, String> {
    let obj = v.as_object().ok_or("label must be an object")?;
    let label = if let Some(kp) = obj.get("keypoints") {
        let joints = kp
            .as_array()
            .ok_or("keypoints must be an array")?
            .iter()
            .map(|j| {
                let c = j.as_array().filter(|c| c.len() == 3).ok_or("each keypoint must be [x, y, z]")?;
                let mut out = [0.0; 3];
                for (slot, x) in out.iter_mut().zip(c) {
                    *slot = x.as_f64().ok_or("keypoint coordinates must be numbers")?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, &str>>()?;
        if joints.is_empty() {
            return Err("keypoints must not be empty".into());
        }
        Label::Keypoints(joints)
    } else if let Some(class) = obj.get("class") {
        let class = class.as_u64().ok_or("class must be a non-negative integer")? as usize;
        let n = obj
            .get("num_classes")
            .and_then(Value::as_u64)
            .ok_or("class labels need an integer num_classes")? as usize;
        if class >= n {
            return Err(format!("class {class} out of range for num_classes {n}"));
        }
        Label::one_hot(class, n)
    } else if let Some(probs) = obj.get("probs") {
        let probs = probs
            .as_array()
            .ok_or("probs must be an array")?
            .iter()
            .map(|x| x.as_f64().ok_or("probs must be numbers"))
            .collect::<Result<Vec<_>, _>>()?;
        Label::ClassProbs(probs)
    } else {
        return Err("label needs one of keypoints, class or probs".into());
    };
    label.validate()?;
    Ok(label)
}

#[derive(Serialize)]
struct FrameRecord<'a> {
    seq: &'a str,
    t: f64,
    points: Vec<Vec<f64>>,
    label: LabelRecord<'a>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum LabelRecord<'a> {
    Keypoints { keypoints: &'a [[f64; 3]] },
    Class { class: usize, num_classes: usize },
    Probs { probs: &'a [f64] },
}

fn record(frame: &Frame) -> FrameRecord<'_> {
    let points = frame
        .points
        .iter()
        .map(|p| match p.echo {
            Some(e) => vec![p.x, p.y, p.z, e.doppler, e.intensity],
            None => vec![p.x, p.y, p.z],
        })
        .collect();
    let label = match &frame.label {
        Label::Keypoints(k) => LabelRecord::Keypoints { keypoints: k },
        l @ Label::ClassProbs(p) => match l.as_one_hot() {
            Some(class) => LabelRecord::Class { class, num_classes: p.len() },
            None => LabelRecord::Probs { probs: p },
        },
    };
    FrameRecord { seq: &frame.seq_id, t: frame.t, points, label }
}

/// Serializes one frame as a single JSON line (no trailing newline).
pub fn frame_to_line(frame: &Frame) -> String {
    serde_json::to_string(&record(frame)).expect("frame records always serialize")
}

pub fn write_to(dataset: &Dataset, mut out: impl Write) -> std::io::Result<()> {
    for frame in dataset.frames() {
        out.write_all(frame_to_line(frame).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Writes frames only, no header line: an empty dataset is an empty file.
pub fn write_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let file = File::create(path.as_ref())?;
    write_to(dataset, BufWriter::new(file))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read_str(s: &str) -> Result<Dataset, DatasetError> {
        read_from(s.as_bytes())
    }

    #[test]
    fn class_label_is_expanded_to_one_hot() {
        let ds = read_str(r#"{"seq":"a","t":0.0,"points":[[0,2,0]],"label":{"class":1,"num_classes":3}}"#).unwrap();
        assert_eq!(ds.frames()[0].label, Label::ClassProbs(vec![0.0, 1.0, 0.0]));
        assert_eq!(ds.frames()[0].points, vec![Point::new(0.0, 2.0, 0.0)]);
    }

    #[test]
    fn repeated_timestamp_is_rejected() {
        let src = concat!(
            r#"{"seq":"a","t":0.0,"points":[],"label":{"class":0,"num_classes":2}}"#,
            "\n",
            r#"{"seq":"a","t":0.0,"points":[],"label":{"class":0,"num_classes":2}}"#,
        );
        match read_str(src).unwrap_err() {
            DatasetError::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("non-monotone"), "{msg}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn header_dims_are_enforced() {
        let src = concat!(
            r#"{"meta":{"label":"class","C":2,"dims":3}}"#,
            "\n",
            r#"{"seq":"a","t":0.0,"points":[[0,1,0,0.5,10]],"label":{"class":0,"num_classes":2}}"#,
        );
        let err = read_str(src).unwrap_err();
        assert!(err.to_string().contains("dimensionality mismatch"), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let src = concat!(
            r#"{"seq":"a","t":0.0,"points":[],"label":{"class":0,"num_classes":2}}"#,
            "\n",
            r#"{"seq":"a","t":1.0,"points":[[0,1]"#,
        );
        match read_str(src).unwrap_err() {
            DatasetError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn non_finite_and_mixed_labels_rejected() {
        let src = r#"{"seq":"a","t":0.0,"points":[[0,1e999,0]],"label":{"class":0,"num_classes":2}}"#;
        assert!(read_str(src).is_err());
        let src = concat!(
            r#"{"seq":"a","t":0.0,"points":[],"label":{"class":0,"num_classes":2}}"#,
            "\n",
            r#"{"seq":"a","t":1.0,"points":[],"label":{"keypoints":[[0,0,0]]}}"#,
        );
        assert!(read_str(src).unwrap_err().to_string().contains("label"));
    }

    #[test]
    fn empty_input_and_output() {
        let ds = read_str("").unwrap();
        assert!(ds.is_empty());
        let mut buf = Vec::new();
        write_to(&ds, &mut buf).unwrap();
        assert!(buf.is_empty());
    }

    #[test]
    fn mixed_probs_round_trip() {
        let frame = Frame {
            seq_id: "a#aug1".into(),
            t: 0.05,
            points: vec![Point::with_echo(0.1, 2.0, -0.3, 0.5, 12.0)],
            label: Label::ClassProbs(vec![0.5, 0.5]),
        };
        let line = frame_to_line(&frame);
        assert_eq!(line, r#"{"seq":"a#aug1","t":0.05,"points":[[0.1,2.0,-0.3,0.5,12.0]],"label":{"probs":[0.5,0.5]}}"#);
        let back = read_str(&line).unwrap();
        assert_eq!(back.frames()[0], frame);
    }
}
