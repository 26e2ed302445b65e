use std::path::Path;

use cellmend::dataio::{
    apply_scaler, fit_scaler, parse_csv, stratified_split, to_csv_string, Dataset, Features, Label, Sample, N_FEATURES,
};
use cellmend::par::Execution;
use cellmend::resample::{
    knn_minority_with, random_oversample, random_undersample, smote_with, ResampleConfig, SmoteMode,
};
use cellmend::simulate::{default_scenario, generate_dataset_with, SimConfig};
use proptest::prelude::*;

fn label() -> impl Strategy<Value = Label> {
    prop_oneof![Just(Label::Fault), Just(Label::FaultFree)]
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(f64::MAX),
    ]
}

fn sample() -> impl Strategy<Value = Sample> {
    (prop::array::uniform7(finite()), label()).prop_map(|(features, label)| Sample { features, label })
}

fn dataset(max: usize) -> impl Strategy<Value = Dataset> {
    prop::collection::vec(sample(), 1..max).prop_map(Dataset::new)
}

/// Each sample carries its position in feature 0, so membership can be
/// traced through shuffles.
fn tagged(labels: &[bool]) -> Dataset {
    Dataset::new(
        labels
            .iter()
            .enumerate()
            .map(|(i, &fault)| {
                let mut f = [0.0; N_FEATURES];
                f[0] = i as f64;
                f[1] = (i * 7 % 13) as f64;
                Sample { features: f, label: if fault { Label::Fault } else { Label::FaultFree } }
            })
            .collect(),
    )
}

fn bits(s: &Sample) -> ([u64; N_FEATURES], Label) {
    (s.features.map(f64::to_bits), s.label)
}

fn round_half_away(x: f64) -> usize {
    x.round() as usize
}

proptest! {
    #[test]
    fn csv_round_trip_is_lossless(d in dataset(40)) {
        let text = to_csv_string(&d);
        let back = parse_csv(&text, Path::new("mem.csv")).unwrap();
        prop_assert_eq!(back.len(), d.len());
        for (a, b) in d.samples.iter().zip(&back.samples) {
            prop_assert_eq!(bits(a), bits(b));
        }
        prop_assert_eq!(to_csv_string(&back), text);
    }

    #[test]
    fn split_partitions_and_stratifies(
        labels in prop::collection::vec(any::<bool>(), 4..300),
        fraction in 0.05..0.95f64,
        seed in any::<u64>(),
    ) {
        let d = tagged(&labels);
        let counts = [d.count(Label::Fault), d.count(Label::FaultFree)];
        prop_assume!(counts.iter().all(|&c| c >= 2));
        let (train, test) = stratified_split(&d, fraction, seed).unwrap();
        let mut seen: Vec<usize> = train.samples.iter().chain(&test.samples).map(|s| s.features[0] as usize).collect();
        seen.sort();
        prop_assert_eq!(seen, (0..d.len()).collect::<Vec<_>>());
        for (label, n) in [(Label::Fault, counts[0]), (Label::FaultFree, counts[1])] {
            prop_assert_eq!(test.count(label), round_half_away(fraction * n as f64));
        }
        prop_assert_eq!(stratified_split(&d, fraction, seed).unwrap(), (train, test));
    }

    #[test]
    fn scaled_train_is_standardized(rows in prop::collection::vec(prop::array::uniform7(-1e3..1e3f64), 2..60)) {
        let d = Dataset::new(rows.iter().map(|f| Sample { features: *f, label: Label::Fault }).collect());
        let scaler = fit_scaler(&d).unwrap();
        let z = apply_scaler(&scaler, &d);
        let n = d.len() as f64;
        for k in 0..N_FEATURES {
            let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            prop_assert!(scaler.std[k] > 0.0);
            let zc: Vec<f64> = z.samples.iter().map(|s| s.features[k]).collect();
            let zmean = zc.iter().sum::<f64>() / n;
            prop_assert!(zmean.abs() <= 1e-9, "mean {}", zmean);
            if var.sqrt() > 1e-6 * mean.abs().max(1.0) {
                let zdev = (zc.iter().map(|v| (v - zmean) * (v - zmean)).sum::<f64>() / n).sqrt();
                prop_assert!((zdev - 1.0).abs() <= 1e-9, "deviation {}", zdev);
            }
            for (x, s) in rows.iter().zip(&z.samples) {
                let back = scaler.inverse(&s.features)[k];
                prop_assert!((back - x[k]).abs() <= 1e-9 * x[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn knn_matches_full_sort(
        pts in prop::collection::vec((prop::array::uniform7(0..4i32), any::<bool>()), 3..50),
        k in 1usize..8,
    ) {
        let d = Dataset::new(pts.iter().map(|(f, fault)| Sample {
            features: f.map(f64::from),
            label: if *fault { Label::Fault } else { Label::FaultFree },
        }).collect());
        let minority = d.minority();
        prop_assume!(d.count(minority) >= 2);
        let idx = d.indices_of(minority);
        let table = knn_minority_with(&d, k, Execution::Sequential).unwrap();
        prop_assert_eq!(&table, &knn_minority_with(&d, k, Execution::Parallel).unwrap());
        prop_assert_eq!(&table.minority_indices, &idx);
        for (q, row) in table.rows.iter().enumerate() {
            let xq = &d.samples[idx[q]].features;
            let mut all: Vec<(f64, usize)> = (0..idx.len())
                .filter(|&p| p != q)
                .map(|p| {
                    let xp: &Features = &d.samples[idx[p]].features;
                    ((0..N_FEATURES).map(|c| (xq[c] - xp[c]).powi(2)).sum(), p)
                })
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let want: Vec<usize> = all.iter().take(k.min(idx.len() - 1)).map(|p| p.1).collect();
            prop_assert_eq!(row, &want);
        }
    }

    #[test]
    fn smote_points_lie_on_their_pair_line(
        labels in prop::collection::vec(prop::bool::weighted(0.2), 10..120),
        canonical in any::<bool>(),
        ratio in 0.3..1.0f64,
        seed in any::<u64>(),
    ) {
        let d = tagged(&labels);
        let minority = d.minority();
        prop_assume!(d.count(minority) >= 2 && d.count(minority) < d.count(minority.other()));
        let mode = if canonical { SmoteMode::Canonical } else { SmoteMode::Extrapolate };
        let cfg = ResampleConfig { target_ratio: ratio, k: 3, mode, seed };
        let out = smote_with(&d, &cfg, Execution::Sequential).unwrap();
        prop_assert_eq!(&out, &smote_with(&d, &cfg, Execution::Parallel).unwrap());
        let majority = d.count(minority.other());
        let want = ((ratio * majority as f64).floor() as usize).max(d.count(minority));
        prop_assert_eq!(out.dataset.count(minority), want);
        prop_assert_eq!(&out.dataset.samples[..d.len()], &d.samples[..]);
        for (syn, p) in out.synthesized.iter().zip(&out.dataset.samples[d.len()..]) {
            prop_assert!(syn.u > 0.0 && syn.u < 1.0);
            prop_assert_eq!(p.label, minority);
            let xi = d.samples[syn.base].features;
            let xj = d.samples[syn.neighbor].features;
            let sign = if canonical { -1.0 } else { 1.0 };
            for c in 0..N_FEATURES {
                let expect = xi[c] + sign * syn.u * (xi[c] - xj[c]);
                prop_assert!((p.features[c] - expect).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn resamplers_keep_originals(
        labels in prop::collection::vec(prop::bool::weighted(0.25), 6..150),
        ratio in 0.2..1.0f64,
        seed in any::<u64>(),
    ) {
        let d = tagged(&labels);
        let minority = d.minority();
        prop_assume!(d.count(minority) >= 1 && d.count(minority) < d.count(minority.other()));
        let cfg = ResampleConfig { target_ratio: ratio, seed, ..Default::default() };
        let other = minority.other();
        let pick = |ds: &Dataset, l: Label| -> Vec<Sample> { ds.samples.iter().filter(|s| s.label == l).copied().collect() };

        let over = random_oversample(&d, &cfg).unwrap();
        prop_assert_eq!(&over.samples[..d.len()], &d.samples[..]);
        prop_assert_eq!(pick(&over, other), pick(&d, other));
        let originals = pick(&d, minority);
        prop_assert!(pick(&over, minority).iter().all(|s| originals.contains(s)));
        let over2 = random_oversample(&d, &ResampleConfig { seed: seed.wrapping_add(1), ..cfg }).unwrap();
        prop_assert_eq!(over2.count(minority), over.count(minority));

        if let Ok(under) = random_undersample(&d, &cfg) {
            prop_assert_eq!(pick(&under, minority), pick(&d, minority));
            let kept = pick(&under, other);
            let mut all = pick(&d, other).into_iter();
            // kept majority is a subsequence of the input majority
            prop_assert!(kept.iter().all(|s| all.any(|t| t == *s)));
        }
    }
}

fn clamped_normal_mean(mu: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    // Abramowitz-Stegun 7.1.26, |error| < 1.5e-7
    fn erf(x: f64) -> f64 {
        let s = x.signum();
        let x = x.abs();
        let t = 1.0 / (1.0 + 0.327_591_1 * x);
        let y = 1.0
            - (((((1.061_405_429 * t - 1.453_152_027) * t) + 1.421_413_741) * t - 0.284_496_736) * t + 0.254_829_592)
                * t
                * (-x * x).exp();
        s * y
    }
    let cdf = |z: f64| 0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2));
    let pdf = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let (a, b) = ((lo - mu) / sigma, (hi - mu) / sigma);
    lo * cdf(a) + hi * (1.0 - cdf(b)) + mu * (cdf(b) - cdf(a)) + sigma * (pdf(a) - pdf(b))
}

#[test]
fn simulated_means_match_clamped_normals() {
    let cfg = SimConfig { n_fault: 2000, n_ok: 4000, seed: 11, ..default_scenario() };
    let d = generate_dataset_with(&cfg, Execution::default()).unwrap();
    for (label, dist, n) in [(Label::Fault, &cfg.fault, cfg.n_fault), (Label::FaultFree, &cfg.ok, cfg.n_ok)] {
        for k in 0..N_FEATURES {
            let got = d.samples.iter().filter(|s| s.label == label).map(|s| s.features[k]).sum::<f64>() / n as f64;
            let (lo, hi) = cfg.clamp[k];
            let want = clamped_normal_mean(dist.mean[k], dist.std[k], lo, hi);
            let bound = 3.0 * dist.std[k] / (n as f64).sqrt();
            assert!((got - want).abs() <= bound, "{label:?} feature {k}: {got} vs {want} (bound {bound})");
        }
    }
}

#[test]
fn simulation_is_mode_independent() {
    let cfg = SimConfig { seed: 5, ..default_scenario() };
    let a = generate_dataset_with(&cfg, Execution::Sequential).unwrap();
    let b = generate_dataset_with(&cfg, Execution::Parallel).unwrap();
    assert_eq!(to_csv_string(&a), to_csv_string(&b));
}
