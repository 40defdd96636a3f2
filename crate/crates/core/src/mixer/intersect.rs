use crate::profile::RangeProfile;

use super::MixError;

/// A crossing of two range profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intersection {
    /// Fractional bin of the crossing.
    pub bin: f64,
    /// Profile amplitude at the crossing.
    pub height: f64,
}

/// Single pass over the two profiles, reporting every strict sign change of
/// `a - b`.
///
/// Adjacent bins with `d[i-1] * d[i] < 0` bracket a crossing, which is then
/// refined on the continuous profiles (the same truncated Gaussians the
/// samples came from) by Newton steps on the log-ratio `ln a - ln b`. That
/// ratio is linear in range for two equal-width Gaussians, so refinement
/// usually converges in a step or two. Brackets reaching past the support
/// of either profile use the plain difference instead. Runs of exact zeros in
/// `d` are skipped over: a sign change across such a run is a crossing at the
/// run's centre (where two Gaussians meet when their midpoint falls on an
/// integer bin), while a run flanked by equal signs is a touch, not a
/// crossing. Crossings no higher than `eps` are dropped.
pub fn find_intersections(a: &RangeProfile, b: &RangeProfile, eps: f64) -> Result<Vec<Intersection>, MixError> {
    if a.values.len() != b.values.len() {
        return Err(MixError::WindowMismatch(a.values.len(), b.values.len()));
    }
    let (av, bv) = (&a.values, &b.values);
    let sigma = a.sigma.min(b.sigma);
    // Between bins a sum of Gaussians is at most this factor above the
    // larger neighbouring sample, which bounds a crossing's height.
    let gain = (1.0 / (8.0 * sigma * sigma)).exp();
    let mut out = Vec::new();
    // Last bin where `d` was nonzero, and `d` there. Updated without
    // branching so every bin costs the same.
    let (mut j, mut dj) = (0usize, 0.0f64);

    for (k, (&x, &y)) in av.iter().zip(bv.iter()).enumerate() {
        let dk = x - y;
        if dj * dk < 0.0 && 0.5 * gain * (av[j] + bv[j] + x + y) > eps {
            let (bin, height) = if k == j + 1 {
                refine(a, b, j)
            } else {
                let mid = (j + k) as f64 / 2.0;
                (mid, 0.5 * (a.value_at(mid) + b.value_at(mid)))
            };
            if height > eps {
                out.push(Intersection { bin, height });
            }
        }
        let nonzero = dk != 0.0;
        j = if nonzero { k } else { j };
        dj = if nonzero { dk } else { dj };
    }
    Ok(out)
}

/// Root of `a - b` inside `[j, j + 1]`, where the samples change sign, and
/// the profile height there.
fn refine(a: &RangeProfile, b: &RangeProfile, j: usize) -> (f64, f64) {
    let k = j + 1;
    let (av, bv) = (&a.values, &b.values);
    if let Some(hit) = single_pair(av, bv, j, a.sigma) {
        return hit;
    }
    let use_log = av[j] > 0.0 && av[k] > 0.0 && bv[j] > 0.0 && bv[k] > 0.0;
    let (glo, ghi) = if use_log {
        (av[j].ln() - bv[j].ln(), av[k].ln() - bv[k].ln())
    } else {
        (av[j] - bv[j], av[k] - bv[k])
    };
    let (mut lo, mut hi, mut glo) = (j as f64, k as f64, glo);
    let mut x = lo + glo / (glo - ghi);
    // Newton on the log-ratio (or the plain difference out in the tails),
    // bisecting whenever a step would leave the shrinking bracket.
    for _ in 0..40 {
        let ((p, dp), (q, dq)) = (a.value_and_slope(x), b.value_and_slope(x));
        let (g, dg) = if use_log && p > 0.0 && q > 0.0 { (p.ln() - q.ln(), dp / p - dq / q) } else { (p - q, dp - dq) };
        let height = 0.5 * (p + q);
        if g == 0.0 {
            return (x, height);
        }
        if (g < 0.0) == (glo < 0.0) {
            lo = x;
            glo = g;
        } else {
            hi = x;
        }
        let newton = x - g / dg;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = next - x;
        x = next;
        if step.abs() < 1e-4 {
            // Quadratic convergence leaves the root far closer than the step.
            return (x, height + 0.5 * (dp + dq) * step);
        }
    }
    (x, 0.5 * (a.value_at(x) + b.value_at(x)))
}

/// Closed-form crossing when, around the bracket, each profile is a single
/// Gaussian of the profile width (of any height). Checked on the samples: a
/// lone Gaussian has `v[i-1] * v[i+1] == exp(-1/sigma^2) * v[i]^2`. Then
/// both log-profiles are parabolas with the same curvature, their difference
/// is linear, and the crossing and its height follow exactly.
fn single_pair(av: &[f64], bv: &[f64], j: usize, sigma: f64) -> Option<(f64, f64)> {
    let k = j + 1;
    if j == 0 || k + 1 >= av.len() {
        return None;
    }
    let c = (-1.0 / (sigma * sigma)).exp();
    let lone = |v: &[f64]| {
        (j - 1..=k + 1).all(|i| v[i] > 1e-100)
            && (j..=k).all(|i| (v[i - 1] * v[i + 1] - c * v[i] * v[i]).abs() <= 1e-12 * c * v[i] * v[i])
    };
    if !(lone(av) && lone(bv)) {
        return None;
    }
    let (la0, la1, lb0, lb1) = (av[j].ln(), av[k].ln(), bv[j].ln(), bv[k].ln());
    let (r0, r1) = (la0 - lb0, la1 - lb1);
    let u = r0 / (r0 - r1);
    let bump = u * (1.0 - u) / (2.0 * sigma * sigma);
    let log_height = 0.5 * (((1.0 - u) * la0 + u * la1) + ((1.0 - u) * lb0 + u * lb1)) + bump;
    Some((j as f64 + u, log_height.exp()))
}
