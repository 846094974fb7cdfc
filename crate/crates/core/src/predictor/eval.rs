use std::io::Write;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictor::features::{FeatureRow, BLIND_FEATURES};
use crate::predictor::forest::{train_forest, ForestParams};
use crate::predictor::labels::{nearest_rank_threshold, LabelMode};
use crate::rng::{self, derive_seed};
use crate::stats;

const FOLD_STREAM: u64 = 0xF01D;

/// Fold index per sample. Each class is shuffled, then dealt round-robin,
/// continuing the rotation from one class to the next so fold sizes differ
/// by at most one.
pub fn stratified_folds(labels: &[bool], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {folds}")));
    }
    let positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let negatives: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if positives.len() < folds || negatives.len() < folds {
        return Err(Error::StratificationTooSmall {
            folds,
            positives: positives.len(),
            negatives: negatives.len(),
        });
    }
    let mut rng = rng::stream(seed);
    let mut out = vec![0; labels.len()];
    let mut next = 0;
    for mut class in [positives, negatives] {
        class.shuffle(&mut rng);
        for i in class {
            out[i] = next % folds;
            next += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// `None` when nothing was predicted positive.
    pub precision: Option<f64>,
    /// `None` when there are no positives.
    pub recall: Option<f64>,
}

impl PrecisionRecall {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |a: usize, b: usize| (b > 0).then(|| a as f64 / b as f64);
        Self {
            tp,
            fp,
            fn_,
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
        }
    }

    pub fn score(predicted: &[bool], truth: &[bool]) -> Self {
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p, t) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        Self::from_counts(tp, fp, fn_)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_test: usize,
    pub n_positive: usize,
    pub scores: PrecisionRecall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    /// Counts pooled over all held-out folds.
    pub pooled: PrecisionRecall,
    /// Mean of the per-fold values that are defined.
    pub macro_precision: Option<f64>,
    pub macro_recall: Option<f64>,
    pub folds: Vec<FoldResult>,
}

/// Stratified k-fold cross-validation of the forest. `params.seed` drives
/// both the fold split and the per-fold forests.
pub fn cross_validate(rows: &[Vec<f64>], labels: &[bool], folds: usize, params: &ForestParams) -> Result<CvResult> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: labels.len(),
        });
    }
    let assignment = stratified_folds(labels, folds, derive_seed(params.seed, FOLD_STREAM))?;
    let mut results = Vec::with_capacity(folds);
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for f in 0..folds {
        let (mut train_x, mut train_y, mut test_x, mut test_y) = (vec![], vec![], vec![], vec![]);
        for i in 0..rows.len() {
            if assignment[i] == f {
                test_x.push(rows[i].clone());
                test_y.push(labels[i]);
            } else {
                train_x.push(rows[i].clone());
                train_y.push(labels[i]);
            }
        }
        let fold_params = ForestParams {
            seed: derive_seed(params.seed, f as u64 + 1),
            ..params.clone()
        };
        let model = train_forest(&train_x, &train_y, &fold_params)?;
        let predicted = model.predict_all(&test_x)?;
        let scores = PrecisionRecall::score(&predicted, &test_y);
        tp += scores.tp;
        fp += scores.fp;
        fn_ += scores.fn_;
        results.push(FoldResult {
            fold: f,
            n_test: test_y.len(),
            n_positive: test_y.iter().filter(|&&y| y).count(),
            scores,
        });
    }
    let macro_of = |get: fn(&PrecisionRecall) -> Option<f64>| {
        let vals: Vec<f64> = results.iter().filter_map(|r| get(&r.scores)).collect();
        stats::mean(&vals)
    };
    Ok(CvResult {
        pooled: PrecisionRecall::from_counts(tp, fp, fn_),
        macro_precision: macro_of(|s| s.precision),
        macro_recall: macro_of(|s| s.recall),
        folds: results,
    })
}

/// Same pipeline restricted to the two community-free columns.
pub fn baseline_community_blind(
    rows: &[Vec<f64>],
    labels: &[bool],
    folds: usize,
    params: &ForestParams,
) -> Result<CvResult> {
    let blind: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            BLIND_FEATURES
                .iter()
                .map(|&c| {
                    r.get(c).copied().ok_or(Error::DimensionMismatch {
                        expected: BLIND_FEATURES.len(),
                        got: r.len(),
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    cross_validate(&blind, labels, folds, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomGuessReport {
    pub n: usize,
    pub n_viral: usize,
    pub trials: usize,
    /// `n_viral / n`; precision and recall coincide for this guesser.
    pub expected: f64,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub std_dev: f64,
    /// Empirical 2.5% and 97.5% quantiles of per-trial precision.
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Picks `n_viral` memes uniformly without replacement per trial.
pub fn baseline_random_guess(labels: &[bool], seed: u64, trials: usize) -> Result<RandomGuessReport> {
    let n = labels.len();
    let n_viral = labels.iter().filter(|&&l| l).count();
    if n_viral == 0 {
        return Err(Error::SingleClass {
            positives: 0,
            negatives: n,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut rng = rng::stream(seed);
    let mut values: Vec<f64> = (0..trials)
        .map(|_| {
            let hits = index::sample(&mut rng, n, n_viral).iter().filter(|&i| labels[i]).count();
            hits as f64 / n_viral as f64
        })
        .collect();
    let mean = stats::mean(&values).unwrap_or(0.0);
    let std_dev = stats::std_dev(&values);
    values.sort_by(f64::total_cmp);
    let q = |p: f64| values[((p * trials as f64).ceil() as usize).clamp(1, trials) - 1];
    Ok(RandomGuessReport {
        n,
        n_viral,
        trials,
        expected: n_viral as f64 / n as f64,
        mean_precision: mean,
        mean_recall: mean,
        std_dev,
        ci_low: q(0.025),
        ci_high: q(0.975),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub thetas: Vec<f64>,
    pub modes: Vec<LabelMode>,
    pub folds: usize,
    pub random_trials: usize,
    /// Memes with fewer total tweets than this are labelled but not used
    /// for training or scoring. `0` keeps everything.
    pub min_tweets: usize,
    pub forest: ForestParams,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            thetas: vec![70.0, 80.0, 90.0],
            modes: vec![LabelMode::Tweets, LabelMode::Users],
            folds: 10,
            random_trials: 1000,
            min_tweets: 50,
            forest: ForestParams::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCell {
    pub theta: f64,
    pub mode: LabelMode,
    /// Popularity cut; viral means strictly above it.
    pub threshold: usize,
    pub n_memes: usize,
    pub n_viral: usize,
    pub model: CvResult,
    pub community_blind: CvResult,
    pub random_guess: RandomGuessReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_memes_total: usize,
    pub n_excluded_short: usize,
    pub cells: Vec<EvalCell>,
}

/// One line of the precision/recall grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodScore {
    pub theta: f64,
    pub mode: LabelMode,
    pub method: &'static str,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub macro_precision: Option<f64>,
    pub macro_recall: Option<f64>,
    pub n_memes: usize,
    pub n_viral: usize,
}

impl EvalCell {
    pub fn scores(&self) -> [MethodScore; 3] {
        let cv = |method, r: &CvResult| MethodScore {
            theta: self.theta,
            mode: self.mode,
            method,
            precision: r.pooled.precision,
            recall: r.pooled.recall,
            macro_precision: r.macro_precision,
            macro_recall: r.macro_recall,
            n_memes: self.n_memes,
            n_viral: self.n_viral,
        };
        [
            cv("model", &self.model),
            cv("community-blind", &self.community_blind),
            MethodScore {
                theta: self.theta,
                mode: self.mode,
                method: "random-guess",
                precision: Some(self.random_guess.mean_precision),
                recall: Some(self.random_guess.mean_recall),
                macro_precision: None,
                macro_recall: None,
                n_memes: self.n_memes,
                n_viral: self.n_viral,
            },
        ]
    }
}

impl EvalReport {
    pub fn cell(&self, theta: f64, mode: LabelMode) -> Option<&EvalCell> {
        self.cells.iter().find(|c| c.theta == theta && c.mode == mode)
    }
}

/// Full precision/recall grid over thresholds and label modes.
pub fn evaluate(rows: &[FeatureRow], config: &EvalConfig) -> Result<EvalReport> {
    let kept: Vec<&FeatureRow> = rows.iter().filter(|r| r.final_tweets >= config.min_tweets).collect();
    let x: Vec<Vec<f64>> = kept.iter().map(|r| r.features.to_row()).collect();
    let mut cells = Vec::new();
    for (mi, &mode) in config.modes.iter().enumerate() {
        let popularity = |r: &FeatureRow| match mode {
            LabelMode::Tweets => r.final_tweets,
            LabelMode::Users => r.final_users,
        };
        let all: Vec<usize> = rows.iter().map(popularity).collect();
        for (ti, &theta) in config.thetas.iter().enumerate() {
            let threshold = nearest_rank_threshold(&all, theta)?;
            // the cut comes from the whole table, short memes included
            let labels: Vec<bool> = kept.iter().map(|r| popularity(r) > threshold).collect();
            let seed = derive_seed(config.seed, (mi * 1000 + ti) as u64);
            let params = ForestParams {
                seed,
                ..config.forest.clone()
            };
            let model = cross_validate(&x, &labels, config.folds, &params)?;
            let community_blind = baseline_community_blind(&x, &labels, config.folds, &params)?;
            let random_guess = baseline_random_guess(&labels, derive_seed(seed, 0xBA5E), config.random_trials)?;
            cells.push(EvalCell {
                theta,
                mode,
                threshold,
                n_memes: labels.len(),
                n_viral: labels.iter().filter(|&&l| l).count(),
                model,
                community_blind,
                random_guess,
            });
        }
    }
    Ok(EvalReport {
        n_memes_total: rows.len(),
        n_excluded_short: rows.len() - kept.len(),
        cells,
    })
}

pub const EVAL_CSV_HEADER: &str =
    "theta,mode,method,precision,recall,macro_precision,macro_recall,n_memes,n_viral";

pub fn write_eval_csv<W: Write>(report: &EvalReport, mut out: W) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    writeln!(out, "{EVAL_CSV_HEADER}")?;
    for cell in &report.cells {
        for s in cell.scores() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                s.theta,
                s.mode.tag(),
                s.method,
                opt(s.precision),
                opt(s.recall),
                opt(s.macro_precision),
                opt(s.macro_recall),
                s.n_memes,
                s.n_viral
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n_trees: usize) -> ForestParams {
        ForestParams {
            n_trees,
            seed: 11,
            ..ForestParams::default()
        }
    }

    #[test]
    fn fold_sizes_balanced() {
        let labels: Vec<bool> = (0..103).map(|i| i % 7 == 0).collect();
        let folds = stratified_folds(&labels, 10, 5).unwrap();
        let mut sizes = [0usize; 10];
        let mut pos = [0usize; 10];
        for (i, &f) in folds.iter().enumerate() {
            sizes[f] += 1;
            pos[f] += usize::from(labels[i]);
        }
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert!(pos.iter().max().unwrap() - pos.iter().min().unwrap() <= 1);
    }

    #[test]
    fn too_small_to_stratify() {
        let labels: Vec<bool> = (0..50).map(|i| i < 3).collect();
        let err = stratified_folds(&labels, 10, 0).unwrap_err();
        assert!(matches!(
            err,
            Error::StratificationTooSmall {
                folds: 10,
                positives: 3,
                negatives: 47
            }
        ));
    }

    #[test]
    fn separable_data_scores_perfectly() {
        // margin between the classes keeps held-out points off the cut
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|i| vec![if i >= 70 { i as f64 + 100.0 } else { i as f64 }, (i % 3) as f64])
            .collect();
        let labels: Vec<bool> = (0..100).map(|i| i >= 70).collect();
        let cv = cross_validate(&rows, &labels, 10, &params(15)).unwrap();
        assert_eq!(cv.pooled.precision, Some(1.0));
        assert_eq!(cv.pooled.recall, Some(1.0));
        assert_eq!(cv.folds.len(), 10);
    }

    #[test]
    fn all_negative_predictions() {
        let s = PrecisionRecall::score(&[false; 4], &[true, false, true, false]);
        assert_eq!((s.precision, s.recall), (None, Some(0.0)));
    }

    #[test]
    fn all_positive_predictions() {
        let truth = [true, false, false, false];
        let s = PrecisionRecall::score(&[true; 4], &truth);
        assert_eq!((s.precision, s.recall), (Some(0.25), Some(1.0)));
    }

    #[test]
    fn random_guess_extremes() {
        let all = baseline_random_guess(&[true; 20], 1, 50).unwrap();
        assert_eq!(all.mean_precision, 1.0);
        let labels: Vec<bool> = (0..100).map(|i| i < 10).collect();
        let r = baseline_random_guess(&labels, 1, 1000).unwrap();
        assert_eq!(r.expected, 0.1);
        assert!(r.ci_low <= r.mean_precision && r.mean_precision <= r.ci_high);
    }

    #[test]
    fn blind_uses_two_columns() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 5) as f64, 0.0, if i >= 20 { 100.0 } else { 0.0 }])
            .collect();
        let labels: Vec<bool> = (0..40).map(|i| i >= 20).collect();
        // the informative column is dropped
        let blind = baseline_community_blind(&rows, &labels, 4, &params(15)).unwrap();
        let full = cross_validate(&rows, &labels, 4, &params(15)).unwrap();
        assert_eq!(full.pooled.recall, Some(1.0));
        assert!(blind.pooled.recall.unwrap_or(0.0) < 1.0);
    }
}
