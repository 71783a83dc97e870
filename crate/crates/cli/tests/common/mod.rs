//! Shared fixture builders for the CLI and acceptance tests.
//!
//! Everything here is seeded, so the bundled data files under `data/` can
//! be regenerated byte-for-byte (see the ignored `regen_fixtures` test).

// Each test target uses a different subset of these helpers.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Repo-level data directory with the bundled fixtures.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / total).collect()
}

/// Geometric class sizes `n_i ~ ratio^i`, padded so every class keeps at
/// least `min_per_class` samples and the total is exactly `n`.
pub fn geometric_counts(n: usize, k: usize, ratio: f64, min_per_class: usize) -> Vec<usize> {
    let raw: Vec<f64> = (0..k).map(|i| ratio.powi(i as i32)).collect();
    let total: f64 = raw.iter().sum();
    let mut counts: Vec<usize> = raw
        .iter()
        .map(|w| ((w / total * n as f64).round() as usize).max(min_per_class))
        .collect();
    let assigned: usize = counts.iter().sum();
    // Push any rounding surplus or deficit onto the majority class.
    if assigned > n {
        counts[0] -= assigned - n;
    } else {
        counts[0] += n - assigned;
    }
    counts
}

/// Synthetic scores for one model: per-class softmax probabilities whose
/// separability is controlled by `boosts[class]`.
pub fn synthetic_scores_csv(
    class_names: &[String],
    counts: &[usize],
    boosts: &[f64],
    seed: u64,
) -> String {
    let k = class_names.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("label");
    for name in class_names {
        let _ = write!(out, ",score_{name}");
    }
    out.push('\n');

    for (class, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let logits: Vec<f64> = (0..k)
                .map(|j| {
                    let noise = 3.0 * rng.random::<f64>();
                    if j == class {
                        noise + boosts[class]
                    } else {
                        noise
                    }
                })
                .collect();
            let probs = softmax(&logits);
            let _ = write!(out, "{}", class_names[class]);
            for p in probs {
                let _ = write!(out, ",{p}");
            }
            out.push('\n');
        }
    }
    out
}

/// The bundled 9-class imbalanced fixture: geometric class frequencies,
/// strong separability on the frequent classes, weak on the rare ones.
pub fn synthetic9_csv() -> String {
    let names: Vec<String> = (1..=9).map(|i| format!("c{i}")).collect();
    let counts = geometric_counts(2000, 9, 0.62, 4);
    let boosts: Vec<f64> = (0..9).map(|i| 2.0 - 0.22 * i as f64).collect();
    synthetic_scores_csv(&names, &counts, &boosts, 0x5eed_0009)
}

/// The bundled 3-class smoke fixture.
pub fn synthetic3_csv() -> String {
    let names: Vec<String> = (1..=3).map(|i| format!("c{i}")).collect();
    let counts = vec![30, 20, 10];
    let boosts = vec![2.6, 2.1, 1.6];
    synthetic_scores_csv(&names, &counts, &boosts, 0x5eed_0003)
}

/// A crisply separable fixture: the true class always scores 0.9, every
/// other class 0.05.
pub fn perfect_csv(class_names: &[String], per_class: usize) -> String {
    let mut out = String::from("label");
    for name in class_names {
        let _ = write!(out, ",score_{name}");
    }
    out.push('\n');
    for (class, name) in class_names.iter().enumerate() {
        for _ in 0..per_class {
            let _ = write!(out, "{name}");
            for j in 0..class_names.len() {
                let _ = write!(out, ",{}", if j == class { 0.9 } else { 0.05 });
            }
            out.push('\n');
        }
    }
    out
}

/// Labels uniform over classes, scores uniform noise: no signal anywhere.
pub fn random_csv(class_names: &[String], n: usize, seed: u64) -> String {
    let k = class_names.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("label");
    for name in class_names {
        let _ = write!(out, ",score_{name}");
    }
    out.push('\n');
    for i in 0..n {
        // Guarantee every class appears.
        let class = if i < k { i } else { rng.random_range(0..k) };
        let _ = write!(out, "{}", class_names[class]);
        for _ in 0..k {
            let _ = write!(out, ",{}", rng.random::<f64>());
        }
        out.push('\n');
    }
    out
}
