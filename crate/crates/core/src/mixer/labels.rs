use crate::frames::Label;

use super::MixError;

/// Plain average of two labels of the same shape. For keypoints this is the
/// skeleton midway between the two; for one-hot classes it is a probability
/// vector (equal mass on distinct classes, unchanged when they agree).
pub fn mix_labels(a: &Label, b: &Label) -> Result<Label, MixError> {
    match (a, b) {
        (Label::Keypoints(x), Label::Keypoints(y)) if x.len() == y.len() => Ok(Label::Keypoints(
            x.iter()
                .zip(y)
                .map(|(p, q)| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])])
                .collect(),
        )),
        (Label::ClassProbs(x), Label::ClassProbs(y)) if x.len() == y.len() => {
            Ok(Label::ClassProbs(x.iter().zip(y).map(|(p, q)| 0.5 * (p + q)).collect()))
        }
        _ => Err(MixError::LabelMismatch(a.kind(), b.kind())),
    }
}
