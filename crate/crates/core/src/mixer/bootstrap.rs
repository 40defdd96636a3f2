use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Normal;

use super::candidates::Candidate;
use super::{MixConfig, MixError};

/// How the bootstrap turns candidate weights into draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resampling {
    /// Each candidate first receives `floor(n * p)` copies; the remaining
    /// draws are independent categorical draws on the fractional parts.
    /// Expected counts equal plain multinomial sampling.
    #[default]
    Residual,
    /// `n` independent categorical draws.
    Multinomial,
}

/// One bootstrap sample: a fractional bin and the candidate it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub bin: f64,
    pub candidate: usize,
}

/// Draws `n_out` bins with probability proportional to candidate weight, then
/// perturbs each by Gaussian jitter (`cfg.jitter_sigma` bins), clamped to the
/// profile window.
pub fn bootstrap_sample<R: Rng + ?Sized>(
    candidates: &[Candidate],
    n_out: usize,
    cfg: &MixConfig,
    rng: &mut R,
) -> Result<Vec<Draw>, MixError> {
    if candidates.is_empty() {
        return Err(MixError::NoCandidates);
    }
    if !(cfg.jitter_sigma >= 0.0) {
        return Err(MixError::Config("jitter_sigma must be non-negative"));
    }
    let weights: Vec<f64> = candidates.iter().map(|c| c.weight).collect();
    let picks = match cfg.resampling {
        Resampling::Multinomial => multinomial(&weights, n_out, rng)?,
        Resampling::Residual => residual(&weights, n_out, rng)?,
    };

    let upper = cfg.profile.window as f64 - 1e-9;
    let jitter = (cfg.jitter_sigma > 0.0)
        .then(|| Normal::new(0.0, cfg.jitter_sigma).map_err(|_| MixError::Config("invalid jitter_sigma")))
        .transpose()?;
    Ok(picks
        .into_iter()
        .map(|i| {
            let mut bin = candidates[i].bin;
            if let Some(j) = &jitter {
                bin = (bin + j.sample(rng)).clamp(0.0, upper);
            }
            Draw { bin, candidate: i }
        })
        .collect())
}

fn multinomial<R: Rng + ?Sized>(weights: &[f64], n: usize, rng: &mut R) -> Result<Vec<usize>, MixError> {
    let dist = WeightedIndex::new(weights).map_err(|_| MixError::Config("candidate weights must be positive"))?;
    Ok((0..n).map(|_| dist.sample(rng)).collect())
}

fn residual<R: Rng + ?Sized>(weights: &[f64], n: usize, rng: &mut R) -> Result<Vec<usize>, MixError> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) || weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(MixError::Config("candidate weights must be positive"));
    }
    let mut picks = Vec::with_capacity(n);
    let mut remainders = Vec::with_capacity(weights.len());
    for (i, w) in weights.iter().enumerate() {
        let expected = n as f64 * w / total;
        let whole = expected.floor();
        picks.extend(std::iter::repeat_n(i, whole as usize));
        remainders.push(expected - whole);
    }
    // Rounding can leave the deterministic part one draw over.
    picks.truncate(n);
    let left = n - picks.len();
    if left > 0 {
        picks.extend(multinomial(&remainders, left, rng)?);
    }
    picks.shuffle(rng);
    Ok(picks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixer::CandidateKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn crossing(bin: f64, weight: f64) -> Candidate {
        Candidate { bin, weight, kind: CandidateKind::Crossing { height: weight - 1.0 } }
    }

    fn frequencies(draws: &[Draw], k: usize) -> Vec<f64> {
        let mut counts = vec![0usize; k];
        draws.iter().for_each(|d| counts[d.candidate] += 1);
        counts.iter().map(|&c| c as f64 / draws.len() as f64).collect()
    }

    #[test]
    fn frequencies_follow_weights() {
        // 1/3.1353, 1/3.1353, 1.1353/3.1353
        let expected = [0.3190, 0.3190, 0.3621];
        let cands = [crossing(10.0, 1.0), crossing(14.0, 1.0), crossing(12.0, 1.1353)];
        for resampling in [Resampling::Residual, Resampling::Multinomial] {
            let cfg = MixConfig { resampling, ..Default::default() };
            let draws = bootstrap_sample(&cands, 30_000, &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
            assert_eq!(draws.len(), 30_000);
            for (f, e) in frequencies(&draws, 3).iter().zip(expected) {
                assert!((f - e).abs() < 0.01, "{resampling:?}: {f} vs {e}");
            }
        }
    }

    #[test]
    fn single_candidate_without_jitter() {
        let cfg = MixConfig { jitter_sigma: 0.0, ..Default::default() };
        let draws = bootstrap_sample(&[crossing(17.25, 1.0)], 5, &cfg, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(draws, vec![Draw { bin: 17.25, candidate: 0 }; 5]);
    }

    #[test]
    fn seeded_draws_repeat() {
        let cands = [crossing(10.0, 1.0), crossing(12.0, 1.3), crossing(500.0, 1.0)];
        let cfg = MixConfig::default();
        let a = bootstrap_sample(&cands, 50, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = bootstrap_sample(&cands, 50, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|d| d.bin >= 0.0 && d.bin < 512.0));
    }

    #[test]
    fn equal_weights_give_each_candidate_once() {
        let cands: Vec<_> = (0..7).map(|i| crossing(i as f64 * 3.0, 1.0)).collect();
        let cfg = MixConfig { jitter_sigma: 0.0, ..Default::default() };
        let mut got: Vec<usize> = bootstrap_sample(&cands, 7, &cfg, &mut ChaCha8Rng::seed_from_u64(4))
            .unwrap()
            .iter()
            .map(|d| d.candidate)
            .collect();
        got.sort();
        assert_eq!(got, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn empty_candidates_rejected() {
        let err = bootstrap_sample(&[], 3, &MixConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(err, Err(MixError::NoCandidates)));
    }
}
