//! Accuracy, micro/macro F1 and cross-entropy on a node subset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::ProbMatrix;

const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub mean_loss: f64,
    pub n_evaluated: usize,
}

/// Scores row-argmax predictions of `p` against `truth` on `eval_set`.
///
/// Macro F1 averages over all `C` classes; a class with zero
/// precision + recall denominator contributes 0.
pub fn evaluate(p: &ProbMatrix, truth: &[usize], eval_set: &[usize]) -> Result<EvalReport> {
    if eval_set.is_empty() {
        return Err(Error::EmptyInput("evaluation set"));
    }
    let c = p.num_classes();
    let mut tp = vec![0usize; c];
    let mut predicted = vec![0usize; c];
    let mut actual = vec![0usize; c];
    let mut loss = 0.0;
    for &i in eval_set {
        let &y = truth.get(i).ok_or(Error::MissingLabel(i))?;
        if y >= c {
            return Err(Error::ClassOutOfRange { class: y, num_classes: c });
        }
        let yhat = p.argmax(i);
        predicted[yhat] += 1;
        actual[y] += 1;
        if yhat == y {
            tp[y] += 1;
        }
        loss -= p.row(i)[y].max(PROB_FLOOR).ln();
    }
    let n = eval_set.len();
    let correct: usize = tp.iter().sum();
    let accuracy = correct as f64 / n as f64;

    // Single-label: global FP = global FN = n − correct.
    let (tp_all, fp_all, fn_all) = (correct, n - correct, n - correct);
    let micro_f1 = f1(tp_all, fp_all, fn_all);

    let macro_f1 = (0..c)
        .map(|k| f1(tp[k], predicted[k] - tp[k], actual[k] - tp[k]))
        .sum::<f64>()
        / c as f64;

    Ok(EvalReport {
        accuracy,
        micro_f1,
        macro_f1,
        mean_loss: loss / n as f64,
        n_evaluated: n,
    })
}

fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}
