use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wixup::augment::{augment, cga_frame, enumerate_pairs, AugmentConfig, Method, PairScope};
use wixup::frames::{generate_synthetic, read_from, write_to, Dataset, Frame, Label, Point, SynthConfig, SynthLabel};
use wixup::mixer::{build_candidates, find_intersections, mix_frames, CandidateKind, MixConfig};
use wixup::profile::{build_profile_from_points, cart_to_spherical, ProfileConfig, RangeProfile};
use wixup::uda::{KnnPredictor, Predictor};

fn point() -> impl Strategy<Value = Point> {
    (-2.0..2.0f64, 0.5..8.0f64, -1.0..2.0f64).prop_map(|(x, y, z)| Point::new(x, y, z))
}

fn points(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point(), 1..max)
}

fn keypoint_frame(seq: &str, t: f64, pts: Vec<Point>) -> Frame {
    let label = Label::Keypoints(pts.iter().take(3).map(|p| [p.x, p.y, p.z]).chain(std::iter::repeat([0.0; 3])).take(3).collect());
    Frame { seq_id: seq.into(), t, points: pts, label }
}

fn to_bytes(d: &Dataset) -> Vec<u8> {
    let mut out = Vec::new();
    write_to(d, &mut out).unwrap();
    out
}

fn single(bin: f64) -> RangeProfile {
    let mut p = RangeProfile::zeros(&ProfileConfig::default());
    p.add_component(bin);
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jsonl_round_trip(seqs in prop::collection::vec(prop::collection::vec(points(6), 1..5), 1..4), classes in prop::option::of(2usize..6)) {
        let mut frames = Vec::new();
        for (s, clouds) in seqs.into_iter().enumerate() {
            for (i, pts) in clouds.into_iter().enumerate() {
                let mut f = keypoint_frame(&format!("s{s}"), i as f64 * 0.1, pts);
                if let Some(c) = classes {
                    f.label = Label::one_hot(i % c, c);
                }
                frames.push(f);
            }
        }
        let d = Dataset::new(frames, None).unwrap();
        let back = read_from(to_bytes(&d).as_slice()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn synthetic_is_pure(seed in any::<u64>(), classes in prop::bool::ANY) {
        let cfg = SynthConfig {
            frames_per_sequence: 5,
            label: if classes { SynthLabel::Classes { classes: 4 } } else { SynthLabel::Keypoints { joints: 5 } },
            ..Default::default()
        };
        let a = generate_synthetic(&cfg, seed).unwrap();
        prop_assert_eq!(&a, &generate_synthetic(&cfg, seed).unwrap());
        for f in a.frames() {
            if let Label::ClassProbs(p) = &f.label {
                prop_assert_eq!(p.iter().filter(|&&v| v == 1.0).count(), 1);
            }
        }
    }

    #[test]
    fn profile_is_additive(a in points(10), b in points(10)) {
        let cfg = ProfileConfig::default();
        let both: Vec<Point> = a.iter().chain(&b).copied().collect();
        let (pa, pb, pab) = (
            build_profile_from_points(&a, &cfg, 0).unwrap(),
            build_profile_from_points(&b, &cfg, 0).unwrap(),
            build_profile_from_points(&both, &cfg, 0).unwrap(),
        );
        for k in 0..cfg.window {
            prop_assert!((pab.values[k] - pa.values[k] - pb.values[k]).abs() <= 1e-12);
            prop_assert!(pab.values[k] >= 0.0);
        }
    }

    #[test]
    fn profile_shifts_with_range(bins in prop::collection::vec(20.0..200.0f64, 1..6), shift in 1usize..100) {
        let cfg = ProfileConfig::default();
        let (mut p, mut q) = (RangeProfile::zeros(&cfg), RangeProfile::zeros(&cfg));
        for &b in &bins {
            p.add_component(b);
            q.add_component(b + shift as f64);
        }
        for k in 0..cfg.window - shift {
            prop_assert!((p.values[k] - q.values[k + shift]).abs() <= 1e-12);
        }
        for &b in &bins {
            prop_assert!(p.values[b.round() as usize] >= (-0.125f64).exp() - 1e-12);
        }
    }

    #[test]
    fn crossings_are_swap_symmetric(a in prop::collection::vec(5.0..500.0f64, 1..12), b in prop::collection::vec(5.0..500.0f64, 1..12)) {
        let cfg = ProfileConfig::default();
        let (mut pa, mut pb) = (RangeProfile::zeros(&cfg), RangeProfile::zeros(&cfg));
        a.iter().for_each(|&m| pa.add_component(m));
        b.iter().for_each(|&m| pb.add_component(m));
        prop_assert_eq!(find_intersections(&pa, &pb, 0.0).unwrap(), find_intersections(&pb, &pa, 0.0).unwrap());
    }

    #[test]
    fn crossing_height_falls_with_separation(mid in 50.0..400.0f64, d1 in 2.0..11.0f64, extra in 0.05..1.0f64) {
        let height = |d: f64| {
            let xs = find_intersections(&single(mid - d / 2.0), &single(mid + d / 2.0), 0.0).unwrap();
            assert_eq!(xs.len(), 1);
            xs[0].height
        };
        prop_assert!(height(d1 + extra) < height(d1));
    }

    #[test]
    fn mixed_points_stay_in_window(a in points(12), b in points(12), seed in any::<u64>()) {
        let cfg = MixConfig::default();
        let (f0, f1) = (keypoint_frame("s", 0.0, a), keypoint_frame("s", 0.1, b));
        let out = mix_frames(&f0, &f1, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let max = cfg.profile.max_range();
        for p in &out.points {
            let r = cart_to_spherical(p).range;
            prop_assert!(r >= 0.0 && r < max + 1e-9);
        }
        prop_assert_eq!(out.points.len(), (f0.points.len() + f1.points.len()).div_ceil(2));

        let pa = build_profile_from_points(&f0.points, &cfg.profile, 0).unwrap();
        let pb = build_profile_from_points(&f1.points, &cfg.profile, 1).unwrap();
        for c in build_candidates(&pa, &pb, &cfg).unwrap() {
            match c.kind {
                CandidateKind::Original(_) => prop_assert_eq!(c.weight, 1.0),
                CandidateKind::Crossing { .. } => prop_assert!(c.weight > 1.0),
            }
        }

        let again = mix_frames(&f0, &f1, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let swapped = mix_frames(&f1, &f0, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(&out, &again);
        prop_assert_eq!(&out, &swapped);
    }

    #[test]
    fn augment_count_and_thread_independence(lens in prop::collection::vec(1usize..12, 1..4), scale in 1usize..5, seed in any::<u64>()) {
        let frames: Vec<Frame> = lens
            .iter()
            .enumerate()
            .flat_map(|(s, &n)| (0..n).map(move |i| keypoint_frame(&format!("q{s}"), i as f64, vec![Point::new(0.1 * i as f64, 2.0 + 0.05 * s as f64, 0.3)])))
            .collect();
        let d = Dataset::new(frames, None).unwrap();
        let cfg = AugmentConfig { scale, seed, ..Default::default() };
        let out = augment(&d, &cfg).unwrap();
        let expected: usize = lens.iter().map(|&l| (1..=scale).map(|k| l.saturating_sub(k)).sum::<usize>()).sum();
        prop_assert_eq!(out.len(), d.len() + expected);
        prop_assert_eq!(enumerate_pairs(&d, scale, PairScope::WithinSequence).len(), expected);
        for f in d.frames() {
            prop_assert!(out.frames().contains(f));
        }

        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| augment(&d, &cfg).unwrap());
        prop_assert_eq!(to_bytes(&serial), to_bytes(&out));
    }

    #[test]
    fn cga_keeps_class_labels(seed in any::<u64>(), classes in prop::collection::vec(0usize..4, 1..20)) {
        let frames: Vec<Frame> = classes
            .iter()
            .enumerate()
            .map(|(i, &c)| Frame { seq_id: "c".into(), t: i as f64, points: vec![Point::new(0.0, 2.0, 0.0)], label: Label::one_hot(c, 4) })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut before: Vec<usize> = frames.iter().map(|f| f.label.argmax().unwrap()).collect();
        let mut after: Vec<usize> = frames.iter().map(|f| cga_frame(f, &mut rng, (0.8, 1.2)).label.argmax().unwrap()).collect();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);

        let d = Dataset::new(frames, None).unwrap();
        let out = augment(&d, &AugmentConfig { method: Method::Cga, seed, ..Default::default() }).unwrap();
        let count = |ds: &Dataset, c: usize| ds.frames().iter().filter(|f| f.label.argmax() == Some(c)).count();
        for c in 0..4 {
            prop_assert_eq!(count(&out, c), 2 * count(&d, c));
        }
    }

    #[test]
    fn knn_ignores_training_order(seed in any::<u64>()) {
        let cfg = SynthConfig { frames_per_sequence: 12, ..Default::default() };
        let train = generate_synthetic(&cfg, seed).unwrap().into_frames();
        let queries = generate_synthetic(&cfg, seed ^ 1).unwrap().into_frames();
        let clouds: Vec<&[Point]> = queries.iter().map(|f| f.points.as_slice()).collect();

        let mut shuffled = train.clone();
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut ChaCha8Rng::seed_from_u64(seed));
        let (mut a, mut b) = (KnnPredictor::new(3).unwrap(), KnnPredictor::new(3).unwrap());
        a.fit(&train).unwrap();
        b.fit(&shuffled).unwrap();
        let (pa, pb) = (a.predict(&clouds).unwrap(), b.predict(&clouds).unwrap());
        for (x, y) in pa.iter().zip(&pb) {
            match (x, y) {
                (Label::Keypoints(x), Label::Keypoints(y)) => {
                    for (u, v) in x.iter().zip(y) {
                        for k in 0..3 {
                            prop_assert!((u[k] - v[k]).abs() < 1e-12);
                        }
                    }
                }
                _ => prop_assert!(false, "unexpected label kind"),
            }
        }
    }
}
