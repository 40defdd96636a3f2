use std::cmp::Ordering;

use super::DatasetError;

/// Doppler velocity (m/s) and signal intensity carried by 5D points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Echo {
    pub doppler: f64,
    pub intensity: f64,
}

/// One detection in sensor coordinates. Boresight is +y, z is up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub echo: Option<Echo>,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0, echo: None };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z, echo: None }
    }

    pub fn with_echo(x: f64, y: f64, z: f64, doppler: f64, intensity: f64) -> Self {
        Self { x, y, z, echo: Some(Echo { doppler, intensity }) }
    }

    pub fn dims(&self) -> PointDims {
        if self.echo.is_some() {
            PointDims::Five
        } else {
            PointDims::Three
        }
    }

    pub fn is_finite(&self) -> bool {
        let echo_ok = self.echo.is_none_or(|e| e.doppler.is_finite() && e.intensity.is_finite());
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && echo_ok
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Total order over all fields (used for canonical ordering, not geometry).
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        let key = |p: &Point| {
            let (d, i) = p.echo.map_or((f64::NEG_INFINITY, f64::NEG_INFINITY), |e| (e.doppler, e.intensity));
            [p.x, p.y, p.z, d, i]
        };
        let (a, b) = (key(self), key(other));
        a.iter().zip(b.iter()).map(|(l, r)| l.total_cmp(r)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointDims {
    Three,
    Five,
}

impl PointDims {
    pub fn count(self) -> usize {
        match self {
            PointDims::Three => 3,
            PointDims::Five => 5,
        }
    }

    pub fn from_count(n: usize) -> Option<Self> {
        match n {
            3 => Some(PointDims::Three),
            5 => Some(PointDims::Five),
            _ => None,
        }
    }
}

/// Ground truth of a frame. Class labels are held as probability vectors so
/// that mixing two frames is a plain elementwise average for every task.
#[derive(Debug, Clone, PartialEq)]
pub enum Label {
    /// J joints, each `[x, y, z]` in meters.
    Keypoints(Vec<[f64; 3]>),
    /// Probability over C classes.
    ClassProbs(Vec<f64>),
}

impl Label {
    pub fn one_hot(class: usize, num_classes: usize) -> Self {
        let mut probs = vec![0.0; num_classes];
        probs[class] = 1.0;
        Label::ClassProbs(probs)
    }

    pub fn kind(&self) -> LabelKind {
        match self {
            Label::Keypoints(k) => LabelKind::Keypoints { joints: k.len() },
            Label::ClassProbs(p) => LabelKind::Classes { classes: p.len() },
        }
    }

    /// Index of the single entry equal to one, if this is a one-hot vector.
    pub fn as_one_hot(&self) -> Option<usize> {
        let Label::ClassProbs(p) = self else { return None };
        let mut hot = None;
        for (i, &v) in p.iter().enumerate() {
            if v == 1.0 && hot.is_none() {
                hot = Some(i);
            } else if v != 0.0 {
                return None;
            }
        }
        hot
    }

    /// Lowest index among the largest probabilities.
    pub fn argmax(&self) -> Option<usize> {
        let Label::ClassProbs(p) = self else { return None };
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in p.iter().enumerate() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, _)| i)
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        match self {
            Label::Keypoints(joints) => {
                if joints.iter().flatten().any(|v| !v.is_finite()) {
                    return Err("non-finite keypoint coordinate".into());
                }
            }
            Label::ClassProbs(p) => {
                if p.is_empty() {
                    return Err("empty class probability vector".into());
                }
                if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err("class probabilities must be finite and non-negative".into());
                }
                let sum: f64 = p.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(format!("class probabilities sum to {sum}, expected 1"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelKind {
    Keypoints { joints: usize },
    Classes { classes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DatasetMeta {
    pub label: LabelKind,
    pub dims: PointDims,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub seq_id: String,
    /// Seconds.
    pub t: f64,
    pub points: Vec<Point>,
    pub label: Label,
}

impl Frame {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total order over frame content, independent of argument position.
    pub(crate) fn canonical_cmp(&self, other: &Self) -> Ordering {
        let by_points = self
            .points
            .iter()
            .zip(other.points.iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| self.points.len().cmp(&other.points.len()));
        by_points
            .then_with(|| self.t.total_cmp(&other.t))
            .then_with(|| self.seq_id.cmp(&other.seq_id))
            .then_with(|| label_cmp(&self.label, &other.label))
    }
}

fn label_cmp(a: &Label, b: &Label) -> Ordering {
    let flat = |l: &Label| -> Vec<f64> {
        match l {
            Label::Keypoints(k) => k.iter().flatten().copied().collect(),
            Label::ClassProbs(p) => p.clone(),
        }
    };
    let (fa, fb) = (flat(a), flat(b));
    fa.iter()
        .zip(fb.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| fa.len().cmp(&fb.len()))
}

/// A validated collection of frames sorted by `(seq_id, t)`.
///
/// An empty dataset carries no meta; a non-empty one always does.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    meta: Option<DatasetMeta>,
    frames: Vec<Frame>,
}

impl Dataset {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates and sorts. `meta` is inferred from the first frame when not
    /// given; timestamps must already be strictly increasing per sequence in
    /// the given order.
    pub fn new(frames: Vec<Frame>, meta: Option<DatasetMeta>) -> Result<Self, DatasetError> {
        if frames.is_empty() {
            return Ok(Self::default());
        }
        let meta = match meta {
            Some(m) => m,
            None => infer_meta(&frames),
        };
        check_frames(&frames, &meta)?;
        let mut frames = frames;
        frames.sort_by(|a, b| a.seq_id.cmp(&b.seq_id).then_with(|| a.t.total_cmp(&b.t)));
        Ok(Self { meta: Some(meta), frames })
    }

    pub fn meta(&self) -> Option<&DatasetMeta> {
        self.meta.as_ref()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Contiguous per-sequence slices, in seq_id order.
    pub fn sequences(&self) -> Vec<(&str, &[Frame])> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.frames.len() {
            if i == self.frames.len() || self.frames[i].seq_id != self.frames[start].seq_id {
                out.push((self.frames[start].seq_id.as_str(), &self.frames[start..i]));
                start = i;
            }
        }
        out
    }
}

pub(crate) fn infer_meta(frames: &[Frame]) -> DatasetMeta {
    let dims = frames
        .iter()
        .flat_map(|f| f.points.first())
        .next()
        .map_or(PointDims::Three, |p| p.dims());
    DatasetMeta { label: frames[0].label.kind(), dims }
}

fn check_frames(frames: &[Frame], meta: &DatasetMeta) -> Result<(), DatasetError> {
    let mut last_t: std::collections::HashMap<&str, f64> = std::collections::HashMap::new();
    for (idx, frame) in frames.iter().enumerate() {
        let at = || format!("frame {idx} (seq {:?}, t {})", frame.seq_id, frame.t);
        if !frame.t.is_finite() {
            return Err(DatasetError::Invalid(format!("{}: non-finite timestamp", at())));
        }
        if frame.label.kind() != meta.label {
            return Err(DatasetError::Invalid(format!(
                "{}: label {:?} does not match dataset label {:?}",
                at(),
                frame.label.kind(),
                meta.label
            )));
        }
        frame.label.validate().map_err(|e| DatasetError::Invalid(format!("{}: {e}", at())))?;
        for p in &frame.points {
            if !p.is_finite() {
                return Err(DatasetError::Invalid(format!("{}: non-finite coordinate", at())));
            }
            if p.dims() != meta.dims {
                return Err(DatasetError::Invalid(format!(
                    "{}: dimensionality mismatch, expected {} got {}",
                    at(),
                    meta.dims.count(),
                    p.dims().count()
                )));
            }
        }
        if let Some(prev) = last_t.insert(frame.seq_id.as_str(), frame.t) {
            if frame.t <= prev {
                return Err(DatasetError::Invalid(format!(
                    "{}: non-monotone timestamps (previous {prev})",
                    at()
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(seq: &str, t: f64) -> Frame {
        Frame { seq_id: seq.into(), t, points: vec![Point::new(0.0, 2.0, 0.0)], label: Label::one_hot(0, 2) }
    }

    #[test]
    fn sorts_by_sequence_then_time() {
        let ds = Dataset::new(vec![frame("b", 0.0), frame("a", 1.0), frame("a", 2.0)], None).unwrap();
        let order: Vec<_> = ds.frames().iter().map(|f| (f.seq_id.as_str(), f.t)).collect();
        assert_eq!(order, vec![("a", 1.0), ("a", 2.0), ("b", 0.0)]);
        assert_eq!(ds.sequences().len(), 2);
    }

    #[test]
    fn rejects_reordered_timestamps() {
        let err = Dataset::new(vec![frame("a", 1.0), frame("a", 0.5)], None).unwrap_err();
        assert!(err.to_string().contains("non-monotone"), "{err}");
    }

    #[test]
    fn rejects_mixed_label_variants() {
        let mut f = frame("a", 1.0);
        f.label = Label::Keypoints(vec![[0.0; 3]]);
        let err = Dataset::new(vec![frame("a", 0.0), f], None).unwrap_err();
        assert!(err.to_string().contains("label"), "{err}");
    }

    #[test]
    fn empty_frames_are_legal() {
        let mut f = frame("a", 0.0);
        f.points.clear();
        assert!(Dataset::new(vec![f], None).is_ok());
    }

    #[test]
    fn argmax_ties_go_to_lowest_index() {
        assert_eq!(Label::ClassProbs(vec![0.5, 0.5]).argmax(), Some(0));
        assert_eq!(Label::ClassProbs(vec![0.2, 0.3, 0.5]).argmax(), Some(2));
        assert_eq!(Label::ClassProbs(vec![0.5, 0.5]).as_one_hot(), None);
        assert_eq!(Label::one_hot(1, 3).as_one_hot(), Some(1));
    }
}
