//! ROC curves and AUC variants: per-class one-vs-rest curves, the
//! weight-aggregated multiclass curve, pooled micro-averaging, the pairwise
//! M-measure, and the Mann-Whitney formulation of binary AUC.
//!
//! Classification rule throughout: a sample is predicted positive at
//! threshold `t` when its score is `>= t`. Curves therefore start at
//! (0, 0) for a threshold above every score and end at (1, 1).

use serde::{Deserialize, Serialize};

use crate::dataset::EvaluationDataset;
use crate::error::{Error, Result};
use crate::gini::GiniDecomposition;

/// What a curve describes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "class", rename_all = "snake_case")]
pub enum CurveKind {
    PerClass(String),
    Aggregated,
    Micro,
}

/// One operating point. `threshold` is `+inf` for the classify-nothing
/// anchor and `-inf` for an appended all-positive anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    #[serde(with = "crate::report::extended_float")]
    pub threshold: f64,
}

/// An ROC curve: operating points ordered by nonincreasing threshold, with
/// the trapezoidal area under them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub kind: CurveKind,
}

/// Per-class curve slot; `None` flags a class that was empty on one side
/// of its one-vs-rest split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCurve {
    pub class: String,
    pub curve: Option<RocCurve>,
}

/// All scalar AUC variants side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucTable {
    /// Trapezoidal area under the weight-aggregated multiclass curve.
    pub gini_auc: f64,
    pub macro_auc: f64,
    pub micro_auc: f64,
    pub m_measure: f64,
    /// One-vs-rest AUC per class; `None` for empty classes.
    pub per_class_auc: Vec<Option<f64>>,
}

/// Aggregated curve plus the bookkeeping the report records.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedRoc {
    pub curve: RocCurve,
    /// Weights actually used: dropped classes zeroed, the rest renormalized.
    pub weights_used: Vec<f64>,
    /// Classes dropped because they had no positives or no negatives.
    pub dropped_classes: Vec<usize>,
}

/// Pairwise one-vs-one AUC average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MMeasure {
    pub value: f64,
    /// Class pairs skipped because one side had no samples.
    pub skipped_pairs: usize,
}

fn trapezoid(points: &[RocPoint]) -> f64 {
    let mut auc = 0.0;
    for w in points.windows(2) {
        auc += (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0;
    }
    auc
}

fn validate_binary_input(scores: &[f64], positives: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != positives.len() {
        return Err(Error::Shape(format!(
            "scores ({}) and labels ({}) differ in length",
            scores.len(),
            positives.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Validation("scores contain non-finite values".into()));
    }
    let pos = positives.iter().filter(|&&p| p).count();
    let neg = scores.len() - pos;
    Ok((pos, neg))
}

fn roc_binary_named(scores: &[f64], positives: &[bool], class: &str) -> Result<RocCurve> {
    let (pos, neg) = validate_binary_input(scores, positives)?;
    if pos == 0 {
        return Err(Error::EmptyClass {
            class: class.to_string(),
            message: "no positive samples".into(),
        });
    }
    if neg == 0 {
        return Err(Error::EmptyClass {
            class: class.to_string(),
            message: "no negative samples".into(),
        });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = Vec::with_capacity(scores.len() + 1);
    points.push(RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    });

    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if positives[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold,
        });
    }

    let auc = trapezoid(&points);
    Ok(RocCurve {
        points,
        auc,
        kind: CurveKind::PerClass(class.to_string()),
    })
}

/// Binary ROC curve from a threshold sweep over the unique scores.
pub fn roc_binary(scores: &[f64], positives: &[bool]) -> Result<RocCurve> {
    roc_binary_named(scores, positives, "binary")
}

/// Tie-corrected Mann-Whitney AUC: the probability that a random positive
/// outranks a random negative, with half credit for ties. Computed from
/// average ranks, independently of any curve construction.
pub fn mann_whitney_auc(scores: &[f64], positives: &[bool]) -> Result<f64> {
    let (pos, neg) = validate_binary_input(scores, positives)?;
    if pos == 0 || neg == 0 {
        return Err(Error::EmptyClass {
            class: "binary".into(),
            message: "need positives and negatives".into(),
        });
    }
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let average = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = average;
        }
        i = j + 1;
    }

    let rank_sum: f64 = (0..n).filter(|&i| positives[i]).map(|i| ranks[i]).sum();
    let p = pos as f64;
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * neg as f64))
}

/// One-vs-rest curve for every class; classes empty on either side come
/// back flagged instead of failing the batch.
pub fn roc_per_class(dataset: &EvaluationDataset) -> Vec<ClassCurve> {
    let n = dataset.len();
    dataset
        .classes()
        .iter()
        .map(|class| {
            let members = dataset.class_count_of(class.index);
            if members == 0 || members == n {
                return ClassCurve {
                    class: class.name.clone(),
                    curve: None,
                };
            }
            let scores = dataset.scores().column(class.index);
            let mask = dataset.class_mask(class.index);
            let curve = roc_binary_named(&scores, &mask, &class.name)
                .expect("both sides verified non-empty");
            ClassCurve {
                class: class.name.clone(),
                curve: Some(curve),
            }
        })
        .collect()
}

/// Thresholds for the aggregated sweep: an evenly spaced quantile grid over
/// the pooled scores of the usable classes, deduplicated, descending.
fn quantile_thresholds(mut pooled: Vec<f64>, grid_size: usize) -> Vec<f64> {
    pooled.sort_by(|a, b| a.total_cmp(b));
    let m = pooled.len();
    let mut thresholds: Vec<f64> = (0..grid_size)
        .map(|j| {
            let q = j as f64 / (grid_size - 1) as f64;
            pooled[(q * (m - 1) as f64).round() as usize]
        })
        .collect();
    thresholds.dedup();
    thresholds.reverse();
    thresholds
}

fn count_at_or_above(sorted_ascending: &[f64], threshold: f64) -> usize {
    sorted_ascending.len() - sorted_ascending.partition_point(|&x| x < threshold)
}

/// Weighted aggregation of the per-class rates on a shared threshold grid:
/// at each threshold `t`, the aggregate TPR and FPR are the weighted means
/// of the per-class rates. Classes with no positives or no negatives are
/// dropped and the remaining weights renormalized.
pub fn roc_aggregated(
    dataset: &EvaluationDataset,
    weights: &[f64],
    grid_size: usize,
) -> Result<AggregatedRoc> {
    let k = dataset.class_count();
    let n = dataset.len();
    if grid_size < 2 {
        return Err(Error::Config(format!(
            "grid size must be at least 2, got {grid_size}"
        )));
    }
    if weights.len() != k {
        return Err(Error::Shape(format!(
            "got {} weights for {} classes",
            weights.len(),
            k
        )));
    }
    if weights.iter().any(|&w| !w.is_finite() || w < -1e-12) {
        return Err(Error::Validation("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "weights must sum to 1, got {total}"
        )));
    }

    let mut counts = vec![0usize; k];
    for &l in dataset.labels() {
        counts[l] += 1;
    }
    let usable: Vec<usize> = (0..k)
        .filter(|&c| counts[c] > 0 && counts[c] < n)
        .collect();
    let dropped_classes: Vec<usize> = (0..k).filter(|c| !usable.contains(c)).collect();
    if usable.is_empty() {
        return Err(Error::NoSignal(
            "every class is empty on one side of its one-vs-rest split".into(),
        ));
    }
    let usable_weight: f64 = usable.iter().map(|&c| weights[c]).sum();
    if usable_weight <= 0.0 {
        return Err(Error::NoSignal(
            "all weight sits on dropped classes".into(),
        ));
    }
    let mut weights_used = vec![0.0; k];
    for &c in &usable {
        weights_used[c] = weights[c] / usable_weight;
    }

    // Per usable class: sorted member and non-member scores of its column.
    let mut member_scores = Vec::with_capacity(usable.len());
    let mut rest_scores = Vec::with_capacity(usable.len());
    let mut pooled = Vec::new();
    for &c in &usable {
        let column = dataset.scores().column(c);
        let mask = dataset.class_mask(c);
        let mut members: Vec<f64> = Vec::with_capacity(counts[c]);
        let mut rest: Vec<f64> = Vec::with_capacity(n - counts[c]);
        for (value, &is_member) in column.iter().zip(&mask) {
            if is_member {
                members.push(*value);
            } else {
                rest.push(*value);
            }
        }
        members.sort_by(|a, b| a.total_cmp(b));
        rest.sort_by(|a, b| a.total_cmp(b));
        pooled.extend_from_slice(&column);
        member_scores.push(members);
        rest_scores.push(rest);
    }

    let thresholds = quantile_thresholds(pooled, grid_size);

    let mut points = Vec::with_capacity(thresholds.len() + 2);
    points.push(RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    });
    for &t in &thresholds {
        let mut tpr = 0.0;
        let mut fpr = 0.0;
        let mut tpr_saturated = true;
        let mut fpr_saturated = true;
        for (slot, &c) in usable.iter().enumerate() {
            let w = weights_used[c];
            let members = &member_scores[slot];
            let rest = &rest_scores[slot];
            let hits = count_at_or_above(members, t);
            let alarms = count_at_or_above(rest, t);
            tpr_saturated &= hits == members.len();
            fpr_saturated &= alarms == rest.len();
            tpr += w * hits as f64 / members.len() as f64;
            fpr += w * alarms as f64 / rest.len() as f64;
        }
        // When every class saturates, the weighted mean is exactly 1 by the
        // simplex contract; bypass the float rounding of the weight sum.
        points.push(RocPoint {
            fpr: if fpr_saturated { 1.0 } else { fpr.clamp(0.0, 1.0) },
            tpr: if tpr_saturated { 1.0 } else { tpr.clamp(0.0, 1.0) },
            threshold: t,
        });
    }
    let last = points.last().expect("at least the anchor");
    if last.fpr != 1.0 || last.tpr != 1.0 {
        points.push(RocPoint {
            fpr: 1.0,
            tpr: 1.0,
            threshold: f64::NEG_INFINITY,
        });
    }

    let auc = trapezoid(&points);
    Ok(AggregatedRoc {
        curve: RocCurve {
            points,
            auc,
            kind: CurveKind::Aggregated,
        },
        weights_used,
        dropped_classes,
    })
}

/// Area under the aggregated curve built with the decomposition's weights.
/// The affine transform of the aggregate Gini index is reported alongside
/// this value; the two need not coincide.
pub fn gini_auc(
    dataset: &EvaluationDataset,
    decomposition: &GiniDecomposition,
    grid_size: usize,
) -> Result<f64> {
    roc_aggregated(dataset, &decomposition.weights, grid_size).map(|agg| agg.curve.auc)
}

/// Unweighted mean of the per-class AUCs over non-empty classes.
pub fn macro_auc(curves: &[ClassCurve]) -> Result<f64> {
    let values: Vec<f64> = curves
        .iter()
        .filter_map(|c| c.curve.as_ref().map(|curve| curve.auc))
        .collect();
    if values.is_empty() {
        return Err(Error::NoSignal("every per-class curve is empty".into()));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Pooled one-vs-rest AUC: every (sample, class) cell becomes one binary
/// observation scored by the cell value and labeled by class membership.
pub fn micro_auc(dataset: &EvaluationDataset) -> Result<RocCurve> {
    let n = dataset.len();
    let k = dataset.class_count();
    let mut scores = Vec::with_capacity(n * k);
    let mut positives = Vec::with_capacity(n * k);
    for i in 0..n {
        let row = dataset.scores().row(i);
        let label = dataset.labels()[i];
        for (j, &value) in row.iter().enumerate() {
            scores.push(value);
            positives.push(label == j);
        }
    }
    let mut curve = roc_binary_named(&scores, &positives, "micro pool")?;
    curve.kind = CurveKind::Micro;
    Ok(curve)
}

/// Average of symmetrized pairwise AUCs over all class pairs. For a pair
/// (i, j), each direction restricts to samples of the two classes and
/// ranks by the respective class's score column.
pub fn m_measure(dataset: &EvaluationDataset) -> Result<MMeasure> {
    let k = dataset.class_count();
    let mut total = 0.0;
    let mut pairs = 0usize;
    let mut skipped_pairs = 0usize;

    for i in 0..k {
        for j in (i + 1)..k {
            let indices: Vec<usize> = dataset
                .labels()
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == i || l == j)
                .map(|(idx, _)| idx)
                .collect();
            let count_i = indices
                .iter()
                .filter(|&&idx| dataset.labels()[idx] == i)
                .count();
            if count_i == 0 || count_i == indices.len() {
                skipped_pairs += 1;
                continue;
            }

            let directed = |positive_class: usize| -> Result<f64> {
                let scores: Vec<f64> = indices
                    .iter()
                    .map(|&idx| dataset.scores().get(idx, positive_class))
                    .collect();
                let positives: Vec<bool> = indices
                    .iter()
                    .map(|&idx| dataset.labels()[idx] == positive_class)
                    .collect();
                mann_whitney_auc(&scores, &positives)
            };

            let a_ij = directed(i)?;
            let a_ji = directed(j)?;
            total += 0.5 * (a_ij + a_ji);
            pairs += 1;
        }
    }

    if pairs == 0 {
        return Err(Error::NoSignal("no class pair has samples on both sides".into()));
    }
    Ok(MMeasure {
        value: total / pairs as f64,
        skipped_pairs,
    })
}
