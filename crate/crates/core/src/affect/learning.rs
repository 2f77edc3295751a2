//! SGD fitting of the factored link weights.
//!
//! Training uses the linear form `e_l = sum_k (sum_x f_lkx m_x) v_k`; the
//! non-linear per-emotion formulas are only used at inference.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{WeightModel, FACTOR_COUNT, FACTOR_NAMES};
use crate::appraisal::{AppraisalVariable, Range};
use crate::emotion::Emotion;
use crate::error::{read_file, write_file, Error, Result};

const DATASET_VERSION: &str = "#version 1";
const VARS: usize = AppraisalVariable::COUNT;
const EMOTIONS: usize = Emotion::COUNT;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    /// Appraisal values `v_k` in variable order.
    pub values: [f64; VARS],
    /// `(O, C, E, A, N, M)`.
    pub factors: [f64; FACTOR_COUNT],
    /// Target intensity potentials, one per emotion.
    pub targets: [f64; EMOTIONS],
}

impl TrainingSample {
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (var, &v) in AppraisalVariable::ALL.iter().zip(&self.values) {
            let ok = match var.range() {
                Range::Unit => (0.0..=1.0).contains(&v),
                Range::Signed => (-1.0..=1.0).contains(&v),
            };
            if !ok {
                return Err(format!("{var} = {v} out of range"));
            }
        }
        for (name, &m) in FACTOR_NAMES.iter().zip(&self.factors) {
            let ok = if *name == "M" {
                (-1.0..=1.0).contains(&m)
            } else {
                (0.0..=1.0).contains(&m)
            };
            if !ok {
                return Err(format!("factor {name} = {m} out of range"));
            }
        }
        for (e, &t) in Emotion::ALL.iter().zip(&self.targets) {
            if !(-1.0..=1.0).contains(&t) {
                return Err(format!("target {e} = {t} outside [-1, 1]"));
            }
        }
        Ok(())
    }
}

fn header() -> Vec<&'static str> {
    AppraisalVariable::ALL
        .iter()
        .map(|v| v.name())
        .chain(FACTOR_NAMES)
        .chain(Emotion::ALL.iter().map(|e| e.name()))
        .collect()
}

pub fn parse_dataset(text: &str, file: &str) -> Result<Vec<TrainingSample>> {
    let mut lines = text.splitn(2, '\n');
    let first = lines.next().unwrap_or("").trim();
    if first != DATASET_VERSION {
        return Err(Error::parse(
            file,
            1,
            format!("expected `{DATASET_VERSION}` as the first line"),
        ));
    }
    let body = lines.next().unwrap_or("");
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    // Line numbers below are offset by the version line.
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(file, 2, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != header() {
        return Err(Error::parse(file, 2, format!("expected header `{}`", header().join(","))));
    }

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize + 1);
            Error::parse(file, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize + 1);
        let nums = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(file, line, format!("`{s}` is not a finite number")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sample = TrainingSample {
            values: [0.0; VARS],
            factors: [0.0; FACTOR_COUNT],
            targets: [0.0; EMOTIONS],
        };
        sample.values.copy_from_slice(&nums[..VARS]);
        sample.factors.copy_from_slice(&nums[VARS..VARS + FACTOR_COUNT]);
        sample.targets.copy_from_slice(&nums[VARS + FACTOR_COUNT..]);
        sample.validate().map_err(|m| Error::parse(file, line, m))?;
        out.push(sample);
    }
    Ok(out)
}

pub fn dataset_to_csv(samples: &[TrainingSample]) -> String {
    let mut out = format!("{DATASET_VERSION}\n{}\n", header().join(","));
    for s in samples {
        let row: Vec<String> = s
            .values
            .iter()
            .chain(&s.factors)
            .chain(&s.targets)
            .map(|x| x.to_string())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn load_dataset(path: &Path) -> Result<Vec<TrainingSample>> {
    parse_dataset(&read_file(path)?, &path.display().to_string())
}

pub fn save_dataset(path: &Path, samples: &[TrainingSample]) -> Result<()> {
    write_file(path, dataset_to_csv(samples).as_bytes())
}

/// Linear prediction for one emotion.
pub fn predict_one(model: &WeightModel, sample: &TrainingSample, e: Emotion) -> f64 {
    let m = super::Factors(sample.factors);
    model
        .linked(e)
        .map(|v| model.raw_weight(e, v, &m).expect("linked") * sample.values[v.index()])
        .sum()
}

pub fn predict(model: &WeightModel, sample: &TrainingSample) -> [f64; EMOTIONS] {
    Emotion::ALL.map(|e| predict_one(model, sample, e))
}

/// `(e_l - prediction) m_x v_k`: the descent direction for `f_lkx`.
pub fn update_direction(
    model: &WeightModel,
    sample: &TrainingSample,
    e: Emotion,
    v: AppraisalVariable,
    x: usize,
) -> f64 {
    (sample.targets[e.index()] - predict_one(model, sample, e)) * sample.factors[x] * sample.values[v.index()]
}

/// `(e_l - prediction)^2` for one emotion.
pub fn squared_error(model: &WeightModel, sample: &TrainingSample, e: Emotion) -> f64 {
    (sample.targets[e.index()] - predict_one(model, sample, e)).powi(2)
}

/// Mean squared error over samples and emotions.
pub fn mean_squared_error(model: &WeightModel, samples: &[TrainingSample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let total: f64 = samples
        .iter()
        .map(|s| Emotion::ALL.iter().map(|&e| squared_error(model, s, e)).sum::<f64>())
        .sum();
    total / (samples.len() * EMOTIONS) as f64
}

pub fn rmse(model: &WeightModel, samples: &[TrainingSample]) -> f64 {
    mean_squared_error(model, samples).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SgdParams {
    pub eta0: f64,
    /// Learning rate is `eta0 / (1 + decay * step)`.
    pub decay: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SgdParams {
    fn default() -> Self {
        SgdParams {
            eta0: 0.05,
            decay: 1e-4,
            epochs: 20,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: WeightModel,
    /// Final mean squared error on the training set.
    pub loss: f64,
    pub steps: u64,
}

/// Fits the factors of every link present in `initial`.
///
/// Samples are visited in a fresh seeded permutation each epoch, and for
/// each sample every link is updated from the predictions made before the
/// update.
pub fn sgd_train(dataset: &[TrainingSample], initial: WeightModel, params: &SgdParams) -> Result<TrainOutcome> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(params.eta0 > 0.0 && params.eta0.is_finite()) || params.decay < 0.0 {
        return Err(Error::invalid("sgd params", format!("{params:?}")));
    }
    let mut model = initial;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut step = 0u64;

    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let s = &dataset[i];
            let eta = params.eta0 / (1.0 + params.decay * step as f64);
            let predicted = predict(&model, s);
            for e in Emotion::ALL {
                let residual = s.targets[e.index()] - predicted[e.index()];
                if !residual.is_finite() {
                    return Err(Error::NonFiniteLoss { step });
                }
                for v in AppraisalVariable::ALL {
                    let Some(f) = model.factors_mut(e, v) else {
                        continue;
                    };
                    let g = eta * residual * s.values[v.index()];
                    for (fx, mx) in f.iter_mut().zip(s.factors) {
                        *fx += g * mx;
                    }
                }
            }
            step += 1;
        }
    }

    let loss = mean_squared_error(&model, dataset);
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss { step });
    }
    Ok(TrainOutcome { model, loss, steps: step })
}

/// Splits off the trailing `fraction` of samples as a held-out set.
pub fn holdout_split(samples: &[TrainingSample], fraction: f64) -> (&[TrainingSample], &[TrainingSample]) {
    let test = ((samples.len() as f64) * fraction).round() as usize;
    let test = test.min(samples.len().saturating_sub(1));
    samples.split_at(samples.len() - test)
}

/// Samples from a model planted on the links of `topology`, for recovery checks.
///
/// Factors are drawn from `U[-0.25, 0.25]`; samples with any target outside
/// `[-1, 1]` are redrawn.
pub fn planted_dataset(seed: u64, n: usize, topology: &WeightModel) -> (WeightModel, Vec<TrainingSample>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut truth = topology.clone();
    for e in Emotion::ALL {
        for v in AppraisalVariable::ALL {
            if let Some(f) = truth.factors_mut(e, v) {
                for x in f.iter_mut() {
                    *x = rng.gen_range(-0.25..=0.25);
                }
            }
        }
    }
    let mut samples = Vec::with_capacity(n);
    while samples.len() < n {
        let values = AppraisalVariable::ALL.map(|v| match v.range() {
            Range::Unit => rng.gen_range(0.0..=1.0),
            Range::Signed => rng.gen_range(-1.0..=1.0),
        });
        let mut factors = [0.0; FACTOR_COUNT];
        for (i, f) in factors.iter_mut().enumerate() {
            *f = if i == FACTOR_COUNT - 1 {
                rng.gen_range(-1.0..=1.0)
            } else {
                rng.gen_range(0.0..=1.0)
            };
        }
        let mut sample = TrainingSample {
            values,
            factors,
            targets: [0.0; EMOTIONS],
        };
        sample.targets = predict(&truth, &sample);
        if sample.targets.iter().all(|t| t.abs() <= 1.0) {
            samples.push(sample);
        }
    }
    (truth, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let (_, data) = planted_dataset(1, 20, &WeightModel::zeros_dense());
        let text = dataset_to_csv(&data);
        assert_eq!(parse_dataset(&text, "d.csv").unwrap(), data);
    }

    #[test]
    fn rejects_missing_version_and_bad_rows() {
        assert!(parse_dataset("a,b\n", "d").is_err());
        let (_, data) = planted_dataset(1, 2, &WeightModel::zeros_dense());
        let text = dataset_to_csv(&data);
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut cells: Vec<String> = lines[3].split(',').map(String::from).collect();
        cells[5] = "1.5".into();
        lines[3] = cells.join(",");
        match parse_dataset(&lines.join("\n"), "d.csv") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let data = parse_dataset("#version 1\n", "d").unwrap();
        assert!(matches!(
            sgd_train(&data, WeightModel::zeros_occ(), &SgdParams::default()),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn zero_targets_keep_zero_model() {
        let (_, mut data) = planted_dataset(2, 50, &WeightModel::zeros_dense());
        for s in &mut data {
            s.targets = [0.0; EMOTIONS];
        }
        let out = sgd_train(&data, WeightModel::zeros_dense(), &SgdParams::default()).unwrap();
        assert_eq!(out.loss, 0.0);
    }

    #[test]
    fn repeated_sample_residual_shrinks() {
        let (_, data) = planted_dataset(3, 1, &WeightModel::zeros_dense());
        let mut model = WeightModel::zeros_occ();
        let mut prev = mean_squared_error(&model, &data);
        for _ in 0..20 {
            let p = SgdParams {
                epochs: 1,
                ..SgdParams::default()
            };
            model = sgd_train(&data, model, &p).unwrap().model;
            let now = mean_squared_error(&model, &data);
            assert!(now <= prev);
            prev = now;
        }
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let (_, data) = planted_dataset(4, 200, &WeightModel::zeros_dense());
        let p = SgdParams {
            epochs: 3,
            ..SgdParams::default()
        };
        let a = sgd_train(&data, WeightModel::zeros_dense(), &p).unwrap();
        let b = sgd_train(&data, WeightModel::zeros_dense(), &p).unwrap();
        assert_eq!(a.model.to_json(), b.model.to_json());
    }

    #[test]
    fn divergence_is_reported() {
        let (_, data) = planted_dataset(5, 50, &WeightModel::zeros_dense());
        let p = SgdParams {
            eta0: 1e150,
            decay: 0.0,
            epochs: 50,
            seed: 0,
        };
        assert!(matches!(
            sgd_train(&data, WeightModel::zeros_dense(), &p),
            Err(Error::NonFiniteLoss { .. })
        ));
    }
}
