use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::RealMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Accuracy,
    MicroF1,
    MacroF1,
    BinaryF1,
    Auc,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Accuracy,
        Metric::MicroF1,
        Metric::MacroF1,
        Metric::BinaryF1,
        Metric::Auc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::MicroF1 => "micro_f1",
            Metric::MacroF1 => "macro_f1",
            Metric::BinaryF1 => "binary_f1",
            Metric::Auc => "auc",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Test metrics of one fold. Binary F1 and AUC exist for two-class tasks only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub accuracy: f64,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub binary_f1: Option<f64>,
    pub auc: Option<f64>,
}

impl FoldMetrics {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Accuracy => Some(self.accuracy),
            Metric::MicroF1 => Some(self.micro_f1),
            Metric::MacroF1 => Some(self.macro_f1),
            Metric::BinaryF1 => self.binary_f1,
            Metric::Auc => self.auc,
        }
    }
}

fn argmax(row: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (j, p) in row.enumerate() {
        if p > best.1 {
            best = (j, p);
        }
    }
    best.0
}

fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Area under the ROC curve via the Mann–Whitney statistic; tied scores get
/// average ranks. `positive` marks the positive class.
pub fn auc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores for {} labels",
            scores.len(),
            positive.len()
        )));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::AucUndefined);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks are 1-based
        let avg = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += avg * order[i..=j].iter().filter(|&&k| positive[k]).count() as f64;
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos * n_neg) as f64)
}

/// Scores class probabilities (one row per query) against true labels.
/// Predictions are the arg-max class. Macro F1 averages over classes that
/// occur in the labels or the predictions.
pub fn evaluate(probs: &RealMatrix, labels: &[usize]) -> Result<FoldMetrics> {
    if probs.nrows() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows for {} labels",
            probs.nrows(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::InvalidQuery("no queries to evaluate".into()));
    }
    let classes = probs.ncols();
    if let Some(&label) = labels.iter().find(|&&y| y >= classes) {
        return Err(Error::LabelOutOfRange { label, classes });
    }
    let pred: Vec<usize> = (0..probs.nrows())
        .map(|k| argmax(probs.row(k).iter().copied()))
        .collect();
    let mut tp = vec![0usize; classes];
    let mut fp = vec![0usize; classes];
    let mut fn_ = vec![0usize; classes];
    for (&p, &y) in pred.iter().zip(labels) {
        if p == y {
            tp[p] += 1;
        } else {
            fp[p] += 1;
            fn_[y] += 1;
        }
    }
    let correct: usize = tp.iter().sum();
    let accuracy = correct as f64 / labels.len() as f64;
    let (tp_all, fp_all, fn_all) = (correct, fp.iter().sum(), fn_.iter().sum());
    let micro_f1 = f1(tp_all, fp_all, fn_all);
    let present: Vec<usize> = (0..classes)
        .filter(|&c| tp[c] + fp[c] + fn_[c] > 0)
        .collect();
    let macro_f1 = present
        .iter()
        .map(|&c| f1(tp[c], fp[c], fn_[c]))
        .sum::<f64>()
        / present.len() as f64;
    let (binary_f1, auc_value) = if classes == 2 {
        let scores: Vec<f64> = probs.column(1).iter().copied().collect();
        let positive: Vec<bool> = labels.iter().map(|&y| y == 1).collect();
        (
            Some(f1(tp[1], fp[1], fn_[1])),
            Some(auc(&scores, &positive)?),
        )
    } else {
        (None, None)
    };
    Ok(FoldMetrics {
        accuracy,
        micro_f1,
        macro_f1,
        binary_f1,
        auc: auc_value,
    })
}

/// Per-fold metrics with their mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub folds: Vec<FoldMetrics>,
}

impl MetricsReport {
    pub fn new(folds: Vec<FoldMetrics>) -> Self {
        Self { folds }
    }

    fn values(&self, metric: Metric) -> Option<Vec<f64>> {
        self.folds.iter().map(|f| f.get(metric)).collect()
    }

    pub fn mean(&self, metric: Metric) -> Option<f64> {
        let v = self.values(metric)?;
        if v.is_empty() {
            return None;
        }
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn std(&self, metric: Metric) -> Option<f64> {
        let v = self.values(metric)?;
        let mean = self.mean(metric)?;
        Some((v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt())
    }

    /// Metrics defined for every fold.
    pub fn metrics(&self) -> Vec<Metric> {
        Metric::ALL
            .into_iter()
            .filter(|&m| self.mean(m).is_some())
            .collect()
    }

    /// `fold,metric,value` rows followed by `mean` and `std` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fold,metric,value\n");
        for (i, f) in self.folds.iter().enumerate() {
            for m in self.metrics() {
                out.push_str(&format!("{i},{m},{:?}\n", f.get(m).unwrap_or(f64::NAN)));
            }
        }
        for m in self.metrics() {
            out.push_str(&format!(
                "mean,{m},{:?}\n",
                self.mean(m).unwrap_or(f64::NAN)
            ));
        }
        for m in self.metrics() {
            out.push_str(&format!("std,{m},{:?}\n", self.std(m).unwrap_or(f64::NAN)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot(preds: &[usize], classes: usize) -> RealMatrix {
        RealMatrix::from_fn(preds.len(), classes, |i, j| {
            if preds[i] == j {
                0.9
            } else {
                0.1 / (classes - 1) as f64
            }
        })
    }

    #[test]
    fn binary_f1_example() {
        // TP, TP, FP, FN: 2·2 / (2·2 + 1 + 1)
        let probs = one_hot(&[1, 1, 1, 0], 2);
        let m = evaluate(&probs, &[1, 1, 0, 1]).unwrap();
        assert!((m.binary_f1.unwrap() - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(m.accuracy, 0.5);
        assert_eq!(m.micro_f1, 0.5);
    }

    #[test]
    fn flipped_probabilities_score_zero() {
        let labels = [0, 1, 1, 0, 1];
        let flipped: Vec<usize> = labels.iter().map(|y| 1 - y).collect();
        let m = evaluate(&one_hot(&flipped, 2), &labels).unwrap();
        assert_eq!(m.accuracy, 0.0);
        assert_eq!(m.auc, Some(0.0));
        let m = evaluate(&one_hot(&labels, 2), &labels).unwrap();
        assert_eq!((m.accuracy, m.macro_f1, m.auc), (1.0, 1.0, Some(1.0)));
    }

    #[test]
    fn auc_ties_and_brute_force() {
        assert_eq!(auc(&[0.5, 0.5], &[true, false]).unwrap(), 0.5);
        let scores = [0.1, 0.4, 0.35, 0.8, 0.4, 0.7, 0.2];
        let pos = [false, true, false, true, false, true, true];
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if pos[i] && !pos[j] {
                    pairs += 1.0;
                    wins += if scores[i] > scores[j] {
                        1.0
                    } else if scores[i] == scores[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        assert!((auc(&scores, &pos).unwrap() - wins / pairs).abs() < 1e-15);
        assert!(matches!(
            auc(&[0.1, 0.2], &[true, true]),
            Err(Error::AucUndefined)
        ));
    }

    #[test]
    fn macro_f1_multiclass() {
        // class 0: tp 1 fn 1; class 1: tp 1 fp 1; class 2: tp 1
        let m = evaluate(&one_hot(&[0, 1, 1, 2], 3), &[0, 0, 1, 2]).unwrap();
        let expected = (2.0 / 3.0 + 2.0 / 3.0 + 1.0) / 3.0;
        assert!((m.macro_f1 - expected).abs() < 1e-15);
        assert_eq!(m.accuracy, 0.75);
        assert!((m.micro_f1 - 0.75).abs() < 1e-15);
        assert_eq!(m.binary_f1, None);
    }

    #[test]
    fn report_mean_and_population_std() {
        let f = |a| FoldMetrics {
            accuracy: a,
            micro_f1: a,
            macro_f1: a,
            binary_f1: None,
            auc: None,
        };
        let r = MetricsReport::new(vec![f(0.5), f(0.7)]);
        assert!((r.mean(Metric::Accuracy).unwrap() - 0.6).abs() < 1e-15);
        assert!((r.std(Metric::Accuracy).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(r.mean(Metric::Auc), None);
        assert_eq!(
            r.metrics(),
            vec![Metric::Accuracy, Metric::MicroF1, Metric::MacroF1]
        );
        assert!(r.to_csv().contains("std,accuracy,"));
    }
}
