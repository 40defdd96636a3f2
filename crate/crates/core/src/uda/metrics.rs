use crate::frames::Label;

use super::UdaError;

/// Mean Euclidean joint error between two keypoint labels, in centimeters.
pub fn mle(pred: &Label, gt: &Label) -> Result<f64, UdaError> {
    match (pred, gt) {
        (Label::Keypoints(p), Label::Keypoints(g)) if p.len() == g.len() && !p.is_empty() => {
            let total: f64 = p
                .iter()
                .zip(g)
                .map(|(a, b)| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt())
                .sum();
            Ok(100.0 * total / p.len() as f64)
        }
        _ => Err(UdaError::Metric(format!("cannot compare {:?} with {:?}", pred.kind(), gt.kind()))),
    }
}

/// Mean of [`mle`] over paired labels.
pub fn mean_mle(preds: &[Label], gts: &[Label]) -> Result<f64, UdaError> {
    if preds.len() != gts.len() || preds.is_empty() {
        return Err(UdaError::Metric(format!("{} predictions for {} labels", preds.len(), gts.len())));
    }
    let mut total = 0.0;
    for (p, g) in preds.iter().zip(gts) {
        total += mle(p, g)?;
    }
    Ok(total / preds.len() as f64)
}

/// Fraction of predictions whose argmax matches the ground truth's. Ties pick
/// the lowest class index.
pub fn accuracy(preds: &[Label], gts: &[Label]) -> Result<f64, UdaError> {
    if preds.len() != gts.len() || preds.is_empty() {
        return Err(UdaError::Metric(format!("{} predictions for {} labels", preds.len(), gts.len())));
    }
    let mut correct = 0usize;
    for (p, g) in preds.iter().zip(gts) {
        if p.kind() != g.kind() {
            return Err(UdaError::Metric(format!("cannot compare {:?} with {:?}", p.kind(), g.kind())));
        }
        match (p.argmax(), g.argmax()) {
            (Some(a), Some(b)) => correct += usize::from(a == b),
            _ => return Err(UdaError::Metric("accuracy needs class labels".into())),
        }
    }
    Ok(correct as f64 / preds.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mle_cases() {
        let gt = Label::Keypoints(vec![[0.0, 0.0, 0.0]]);
        assert_eq!(mle(&gt, &gt).unwrap(), 0.0);
        assert_eq!(mle(&Label::Keypoints(vec![[0.03, 0.04, 0.0]]), &gt).unwrap(), 5.0);
        let two = Label::Keypoints(vec![[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]);
        let off = Label::Keypoints(vec![[0.03, 0.04, 0.0], [1.0, 1.0, 1.0]]);
        assert_eq!(mle(&off, &two).unwrap(), 2.5);
        assert!(mle(&two, &gt).is_err());
        assert!(mle(&Label::one_hot(0, 2), &gt).is_err());
    }

    #[test]
    fn accuracy_cases() {
        let gts = vec![Label::one_hot(0, 2), Label::one_hot(1, 2)];
        assert_eq!(accuracy(&gts, &gts).unwrap(), 1.0);
        let tie = vec![Label::ClassProbs(vec![0.5, 0.5]), Label::ClassProbs(vec![0.5, 0.5])];
        assert_eq!(accuracy(&tie, &gts).unwrap(), 0.5);
        assert!(accuracy(&tie[..1], &gts).is_err());
        assert!(accuracy(&[Label::one_hot(0, 3)], &gts[..1]).is_err());
    }
}
