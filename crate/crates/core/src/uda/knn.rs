use rayon::prelude::*;

use crate::frames::{Frame, Label, Point};

use super::{Predictor, UdaError};

const DESCRIPTOR_LEN: usize = 7;

/// k-nearest-neighbour regressor over a 7-value summary of each cloud:
/// centroid, per-axis standard deviation and point count (divided by the
/// largest count seen in training).
#[derive(Debug, Clone)]
pub struct KnnPredictor {
    k: usize,
    max_count: f64,
    train: Vec<([f64; DESCRIPTOR_LEN], Label)>,
}

impl KnnPredictor {
    pub fn new(k: usize) -> Result<Self, UdaError> {
        if k == 0 {
            return Err(UdaError::Config("k must be at least 1".into()));
        }
        Ok(Self { k, max_count: 1.0, train: Vec::new() })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

fn describe(points: &[Point], max_count: f64) -> [f64; DESCRIPTOR_LEN] {
    let mut out = [0.0; DESCRIPTOR_LEN];
    if points.is_empty() {
        return out;
    }
    let n = points.len() as f64;
    let mut mean = [0.0; 3];
    for p in points {
        for (m, c) in mean.iter_mut().zip(p.coords()) {
            *m += c / n;
        }
    }
    let mut var = [0.0; 3];
    for p in points {
        for ((v, c), m) in var.iter_mut().zip(p.coords()).zip(mean) {
            *v += (c - m) * (c - m) / n;
        }
    }
    out[..3].copy_from_slice(&mean);
    for i in 0..3 {
        out[3 + i] = var[i].sqrt();
    }
    out[6] = n / max_count;
    out
}

fn squared_distance(a: &[f64; DESCRIPTOR_LEN], b: &[f64; DESCRIPTOR_LEN]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Predictor for KnnPredictor {
    fn fit(&mut self, frames: &[Frame]) -> Result<(), UdaError> {
        if frames.is_empty() {
            return Err(UdaError::EmptyTraining);
        }
        self.max_count = frames.iter().map(|f| f.points.len()).max().unwrap_or(0).max(1) as f64;
        self.train = frames.iter().map(|f| (describe(&f.points, self.max_count), f.label.clone())).collect();
        Ok(())
    }

    fn predict(&self, clouds: &[&[Point]]) -> Result<Vec<Label>, UdaError> {
        if self.train.is_empty() {
            return Err(UdaError::EmptyTraining);
        }
        let k = self.k.min(self.train.len());
        Ok(clouds
            .par_iter()
            .map(|cloud| {
                let q = describe(cloud, self.max_count);
                let mut dist: Vec<(f64, usize)> =
                    self.train.iter().enumerate().map(|(i, (d, _))| (squared_distance(&q, d), i)).collect();
                // Distance ties go to the earlier training frame.
                let by_key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if k < dist.len() {
                    dist.select_nth_unstable_by(k - 1, by_key);
                    dist.truncate(k);
                }
                dist.sort_by(by_key);
                average_labels(dist.iter().map(|&(_, i)| &self.train[i].1))
            })
            .collect())
    }
}

/// Mean of keypoint labels, or summed class probabilities renormalised.
fn average_labels<'a>(labels: impl Iterator<Item = &'a Label>) -> Label {
    let labels: Vec<&Label> = labels.collect();
    let n = labels.len() as f64;
    match labels[0] {
        Label::Keypoints(first) => {
            let mut acc = vec![[0.0; 3]; first.len()];
            for l in &labels {
                if let Label::Keypoints(k) = l {
                    for (a, j) in acc.iter_mut().zip(k) {
                        for c in 0..3 {
                            a[c] += j[c];
                        }
                    }
                }
            }
            for a in &mut acc {
                for c in a.iter_mut() {
                    *c /= n;
                }
            }
            Label::Keypoints(acc)
        }
        Label::ClassProbs(first) => {
            let mut acc = vec![0.0; first.len()];
            for l in &labels {
                if let Label::ClassProbs(p) = l {
                    for (a, v) in acc.iter_mut().zip(p) {
                        *a += v;
                    }
                }
            }
            let total: f64 = acc.iter().sum();
            if total > 0.0 {
                acc.iter_mut().for_each(|a| *a /= total);
            } else {
                let uniform = 1.0 / acc.len() as f64;
                acc.iter_mut().for_each(|a| *a = uniform);
            }
            Label::ClassProbs(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(points: Vec<Point>, label: Label) -> Frame {
        Frame { seq_id: "s".into(), t: 0.0, points, label }
    }

    fn clouds(frames: &[Frame]) -> Vec<&[Point]> {
        frames.iter().map(|f| f.points.as_slice()).collect()
    }

    #[test]
    fn nearest_self_returns_own_label() {
        let train = vec![
            frame(vec![Point::new(0.0, 2.0, 0.0), Point::new(0.2, 2.1, 0.5)], Label::Keypoints(vec![[0.0, 2.0, 0.3]])),
            frame(vec![Point::new(1.0, 3.0, 0.0)], Label::Keypoints(vec![[1.0, 3.0, 0.0]])),
        ];
        let mut knn = KnnPredictor::new(1).unwrap();
        knn.fit(&train).unwrap();
        let out = knn.predict(&clouds(&train)).unwrap();
        assert_eq!(out, vec![train[0].label.clone(), train[1].label.clone()]);
    }

    #[test]
    fn equidistant_pair_averages() {
        let train = vec![
            frame(vec![Point::new(-1.0, 2.0, 0.0)], Label::Keypoints(vec![[0.0, 0.0, 0.0]])),
            frame(vec![Point::new(1.0, 2.0, 0.0)], Label::Keypoints(vec![[2.0, 4.0, 6.0]])),
        ];
        let mut knn = KnnPredictor::new(2).unwrap();
        knn.fit(&train).unwrap();
        let out = knn.predict(&[&[Point::new(0.0, 2.0, 0.0)]]).unwrap();
        assert_eq!(out[0], Label::Keypoints(vec![[1.0, 2.0, 3.0]]));
    }

    #[test]
    fn ties_go_to_training_order() {
        let train = vec![
            frame(vec![Point::new(-1.0, 2.0, 0.0)], Label::one_hot(0, 2)),
            frame(vec![Point::new(1.0, 2.0, 0.0)], Label::one_hot(1, 2)),
        ];
        let mut knn = KnnPredictor::new(1).unwrap();
        knn.fit(&train).unwrap();
        assert_eq!(knn.predict(&[&[Point::new(0.0, 2.0, 0.0)]]).unwrap()[0], Label::one_hot(0, 2));
        let swapped = vec![train[1].clone(), train[0].clone()];
        knn.fit(&swapped).unwrap();
        assert_eq!(knn.predict(&[&[Point::new(0.0, 2.0, 0.0)]]).unwrap()[0], Label::one_hot(1, 2));
    }

    #[test]
    fn class_outputs_are_normalised() {
        let train: Vec<Frame> = (0..7)
            .map(|i| frame(vec![Point::new(0.1 * i as f64, 2.0, 0.0)], Label::ClassProbs(vec![0.3, 0.2 + 0.1 * i as f64, 0.5])))
            .collect();
        let mut knn = KnnPredictor::new(3).unwrap();
        knn.fit(&train).unwrap();
        for l in knn.predict(&[&[Point::new(0.25, 2.0, 0.0)], &[], &[Point::new(5.0, 1.0, 1.0)]]).unwrap() {
            let Label::ClassProbs(p) = l else { panic!() };
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn descriptor_layout() {
        let d = describe(&[Point::new(0.0, 2.0, 1.0), Point::new(2.0, 2.0, -1.0)], 4.0);
        assert_eq!(d, [1.0, 2.0, 0.0, 1.0, 0.0, 1.0, 0.5]);
        assert_eq!(describe(&[], 4.0), [0.0; 7]);
    }

    #[test]
    fn errors() {
        assert!(KnnPredictor::new(0).is_err());
        let mut knn = KnnPredictor::new(1).unwrap();
        assert!(matches!(knn.fit(&[]), Err(UdaError::EmptyTraining)));
        assert!(matches!(knn.predict(&[]), Err(UdaError::EmptyTraining)));
    }
}
