//! Classifiers built from QUBO solutions, the SMO soft-margin baseline, and
//! confusion-matrix scoring.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annealer::{AnnealSchedule, Solver};
use crate::datagen::{Dataset, Label, Point};
use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, KernelSpec};
use crate::qubo::{build_svm_qubo, decode_alphas, EncodingSpec};

/// Anything with a kernel decision function `sum_n alpha_n t_n k(x_n, x) + b`.
pub trait Classifier {
    fn decision(&self, x: &Point) -> f64;

    /// Sign of the decision value; zero maps to `+1`.
    fn predict(&self, x: &Point) -> Label {
        Label::from_sign(self.decision(x))
    }
}

fn decision_value(points: &[Point], labels: &[Label], alphas: &[f64], bias: f64, kernel: KernelSpec, x: &Point) -> f64 {
    let mut f = bias;
    for ((p, t), &a) in points.iter().zip(labels).zip(alphas) {
        if a != 0.0 {
            f += a * t.sign() * kernel.eval(p, x);
        }
    }
    f
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboSvmModel {
    pub train_points: Vec<Point>,
    pub train_labels: Vec<Label>,
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub enc: EncodingSpec,
    pub xi: f64,
    /// Hamiltonian value of the assignment the solver returned.
    pub energy: f64,
}

impl QuboSvmModel {
    pub fn support_vectors(&self) -> usize {
        self.alphas.iter().filter(|&&a| a > 0.0).count()
    }
}

impl Classifier for QuboSvmModel {
    fn decision(&self, x: &Point) -> f64 {
        decision_value(&self.train_points, &self.train_labels, &self.alphas, self.bias, self.kernel, x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSvmModel {
    pub train_points: Vec<Point>,
    pub train_labels: Vec<Label>,
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub c: f64,
}

impl Classifier for ClassicalSvmModel {
    fn decision(&self, x: &Point) -> f64 {
        decision_value(&self.train_points, &self.train_labels, &self.alphas, self.bias, self.kernel, x)
    }
}

impl ClassicalSvmModel {
    /// `|sum_n alpha_n t_n|`.
    pub fn equality_residual(&self) -> f64 {
        self.alphas
            .iter()
            .zip(&self.train_labels)
            .map(|(a, t)| a * t.sign())
            .sum::<f64>()
            .abs()
    }

    /// Largest violation of the KKT conditions on the training set, measured
    /// on `t_n f(x_n) - 1`.
    pub fn kkt_violation(&self) -> f64 {
        let bound_eps = 1e-8 * self.c.max(1.0);
        self.train_points
            .iter()
            .zip(&self.train_labels)
            .zip(&self.alphas)
            .map(|((p, t), &a)| {
                let margin = t.sign() * self.decision(p) - 1.0;
                if a <= bound_eps {
                    (-margin).max(0.0)
                } else if a >= self.c - bound_eps {
                    margin.max(0.0)
                } else {
                    margin.abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Either kind of trained model, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SvmModel {
    Qubo(QuboSvmModel),
    Classical(ClassicalSvmModel),
}

impl Classifier for SvmModel {
    fn decision(&self, x: &Point) -> f64 {
        match self {
            SvmModel::Qubo(m) => m.decision(x),
            SvmModel::Classical(m) => m.decision(x),
        }
    }
}

pub fn save_model(model: &SvmModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, model).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SvmModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })
}

fn check_trainable(train: &Dataset) -> Result<()> {
    if train.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if !train.has_both_labels() {
        return Err(Error::invalid("training set contains a single class"));
    }
    Ok(())
}

/// Trains a QUBO-SVM, minimizing the Hamiltonian with simulated annealing.
pub fn fit_qubo_svm(
    train: &Dataset,
    kernel: KernelSpec,
    enc: EncodingSpec,
    xi: f64,
    sched: &AnnealSchedule,
) -> Result<QuboSvmModel> {
    fit_qubo_svm_with(train, kernel, enc, xi, &Solver::Anneal(*sched))
}

pub fn fit_qubo_svm_with(
    train: &Dataset,
    kernel: KernelSpec,
    enc: EncodingSpec,
    xi: f64,
    solver: &Solver,
) -> Result<QuboSvmModel> {
    check_trainable(train)?;
    let q = build_svm_qubo(train, kernel, enc, xi)?;
    let solution = solver.solve(&q)?;
    let alphas = decode_alphas(&solution.bits, enc, train.len())?;
    Ok(model_from_alphas(train, kernel, enc, xi, alphas, solution.energy))
}

/// Wraps decoded multipliers into a model, computing the bias.
pub fn model_from_alphas(
    train: &Dataset,
    kernel: KernelSpec,
    enc: EncodingSpec,
    xi: f64,
    alphas: Vec<f64>,
    energy: f64,
) -> QuboSvmModel {
    let points = train.features();
    let labels = train.labels();
    let bias = compute_bias(&points, &labels, &alphas, kernel, enc.alpha_max());
    QuboSvmModel {
        train_points: points,
        train_labels: labels,
        alphas,
        bias,
        kernel,
        enc,
        xi,
        energy,
    }
}

/// Mean of `t_n - sum_m alpha_m t_m k(x_m, x_n)` over the multipliers strictly
/// inside `(0, alpha_max)`; falls back to every positive multiplier, then to 0.
pub fn compute_bias(points: &[Point], labels: &[Label], alphas: &[f64], kernel: KernelSpec, alpha_max: f64) -> f64 {
    let residual = |n: usize| -> f64 {
        labels[n].sign() - decision_value(points, labels, alphas, 0.0, kernel, &points[n])
    };
    let mean_over = |idx: Vec<usize>| -> Option<f64> {
        if idx.is_empty() {
            None
        } else {
            let len = idx.len() as f64;
            Some(idx.into_iter().map(residual).sum::<f64>() / len)
        }
    };
    let interior = (0..alphas.len())
        .filter(|&n| alphas[n] > 0.0 && alphas[n] < alpha_max)
        .collect();
    let positive = (0..alphas.len()).filter(|&n| alphas[n] > 0.0).collect();
    mean_over(interior)
        .or_else(|| mean_over(positive))
        .unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionMatrix {
    pub fn record(&mut self, predicted: Label, actual: Label) {
        match (predicted, actual) {
            (Label::Positive, Label::Positive) => self.true_pos += 1,
            (Label::Positive, Label::Negative) => self.false_pos += 1,
            (Label::Negative, Label::Negative) => self.true_neg += 1,
            (Label::Negative, Label::Positive) => self.false_neg += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    pub fn correct(&self) -> usize {
        self.true_pos + self.true_neg
    }

    /// Fraction of correct predictions.
    pub fn accuracy(&self) -> Result<f64> {
        accuracy(self)
    }
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    match cm.total() {
        0 => Err(Error::invalid("confusion matrix is empty")),
        total => Ok(cm.correct() as f64 / total as f64),
    }
}

pub fn evaluate<M: Classifier + ?Sized>(model: &M, test: &Dataset) -> Result<ConfusionMatrix> {
    if test.is_empty() {
        return Err(Error::invalid("test set is empty"));
    }
    let mut cm = ConfusionMatrix::default();
    for p in &test.points {
        cm.record(model.predict(&p.point()), p.label);
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    /// Box constraint on every multiplier.
    pub c: f64,
    /// KKT violation tolerance.
    pub tol: f64,
    /// Consecutive sweeps without an update required to stop.
    pub max_passes: usize,
    /// Sweep cap; exceeding it is a convergence error.
    pub max_iterations: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        SmoParams {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10,
            max_iterations: 10_000,
        }
    }
}

/// Smallest multiplier change counted as progress.
const MIN_STEP: f64 = 1e-5;
const BOUND_EPS: f64 = 1e-10;

struct Smo<'a> {
    gram: crate::kernels::Gram,
    y: Vec<f64>,
    alpha: Vec<f64>,
    errors: Vec<f64>,
    bias: f64,
    params: &'a SmoParams,
}

impl Smo<'_> {
    fn violates_kkt(&self, i: usize) -> bool {
        let r = self.y[i] * self.errors[i];
        (r < -self.params.tol && self.alpha[i] < self.params.c) || (r > self.params.tol && self.alpha[i] > 0.0)
    }

    /// Second-choice order: largest `|E_i - E_j|` first, then the rest by index.
    fn partners(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let ei = self.errors[i];
        let best = (0..self.y.len())
            .filter(|&j| j != i)
            .fold(None, |acc: Option<(usize, f64)>, j| {
                let gap = (ei - self.errors[j]).abs();
                match acc {
                    Some((_, g)) if g >= gap => acc,
                    _ => Some((j, gap)),
                }
            })
            .map(|(j, _)| j);
        best.into_iter()
            .chain((0..self.y.len()).filter(move |&j| j != i && Some(j) != best))
    }

    fn take_step(&mut self, i: usize, j: usize) -> bool {
        let c = self.params.c;
        let (yi, yj) = (self.y[i], self.y[j]);
        let (ai_old, aj_old) = (self.alpha[i], self.alpha[j]);
        let (lo, hi) = if yi != yj {
            ((aj_old - ai_old).max(0.0), (c + aj_old - ai_old).min(c))
        } else {
            ((ai_old + aj_old - c).max(0.0), (ai_old + aj_old).min(c))
        };
        if lo >= hi {
            return false;
        }
        let (kii, kjj, kij) = (self.gram.get(i, i), self.gram.get(j, j), self.gram.get(i, j));
        let eta = 2.0 * kij - kii - kjj;
        if eta >= 0.0 {
            return false;
        }
        let (ei, ej) = (self.errors[i], self.errors[j]);
        let mut aj = (aj_old - yj * (ei - ej) / eta).clamp(lo, hi);
        // snap to the box so bound checks below stay exact
        let snap = BOUND_EPS * c;
        if aj < snap {
            aj = 0.0;
        } else if aj > c - snap {
            aj = c;
        }
        if (aj - aj_old).abs() < MIN_STEP {
            return false;
        }
        let mut ai = ai_old + yi * yj * (aj_old - aj);
        if ai < snap {
            ai = 0.0;
        } else if ai > c - snap {
            ai = c;
        }
        let (dai, daj) = (ai - ai_old, aj - aj_old);

        let b1 = self.bias - ei - yi * dai * kii - yj * daj * kij;
        let b2 = self.bias - ej - yi * dai * kij - yj * daj * kjj;
        let bias = if ai > 0.0 && ai < c {
            b1
        } else if aj > 0.0 && aj < c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = bias - self.bias;

        let (row_i, row_j) = (self.gram.row(i), self.gram.row(j));
        for (k, e) in self.errors.iter_mut().enumerate() {
            *e += yi * dai * row_i[k] + yj * daj * row_j[k] + db;
        }
        self.alpha[i] = ai;
        self.alpha[j] = aj;
        self.bias = bias;
        true
    }
}

/// Soft-margin SVM dual solved by sequential minimal optimization.
pub fn fit_classical_svm(train: &Dataset, kernel: KernelSpec, params: &SmoParams) -> Result<ClassicalSvmModel> {
    check_trainable(train)?;
    kernel.validate()?;
    if !(params.c.is_finite() && params.c > 0.0) {
        return Err(Error::invalid(format!("C must be > 0, got {}", params.c)));
    }
    if !(params.tol > 0.0) {
        return Err(Error::invalid(format!("tol must be > 0, got {}", params.tol)));
    }
    let points = train.features();
    let labels = train.labels();
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let mut smo = Smo {
        gram: gram_matrix(kernel, &points)?,
        errors: y.iter().map(|t| -t).collect(),
        alpha: vec![0.0; y.len()],
        y,
        bias: 0.0,
        params,
    };

    let mut quiet_passes = 0;
    let mut sweeps = 0;
    let mut converged = true;
    while quiet_passes < params.max_passes {
        if sweeps == params.max_iterations {
            converged = false;
            break;
        }
        sweeps += 1;
        let mut changed = 0;
        for i in 0..smo.y.len() {
            if !smo.violates_kkt(i) {
                continue;
            }
            let candidates: Vec<usize> = smo.partners(i).collect();
            if candidates.into_iter().any(|j| smo.take_step(i, j)) {
                changed += 1;
            }
        }
        quiet_passes = if changed == 0 { quiet_passes + 1 } else { 0 };
    }

    let model = ClassicalSvmModel {
        train_points: points,
        train_labels: labels,
        alphas: smo.alpha,
        bias: smo.bias,
        kernel,
        c: params.c,
    };
    if converged {
        Ok(model)
    } else {
        Err(Error::Convergence {
            iterations: sweeps,
            model: Box::new(model),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annealer::brute_force_solve;
    use crate::datagen::{generate_dataset, LabeledPoint, ProblemKind};
    use crate::qubo::qubo_energy;
    use proptest::prelude::*;

    fn mirrored_pair() -> Dataset {
        Dataset::from_points(vec![
            LabeledPoint::new(0.2, 0.8, Label::Positive),
            LabeledPoint::new(0.8, 0.2, Label::Negative),
        ])
    }

    fn enc22() -> EncodingSpec {
        EncodingSpec::new(2, 2).unwrap()
    }

    #[test]
    fn mirrored_pair_matches_oracle() {
        let train = mirrored_pair();
        let model = fit_qubo_svm_with(&train, KernelSpec::rbf(1.0), enc22(), 0.0, &Solver::Exact).unwrap();
        // enumerated by hand over the 16 patterns: alpha = (2, 2) is the unique minimum
        assert_eq!(model.alphas, vec![2.0, 2.0]);
        assert!(model.bias.abs() < 1e-12);
        assert_eq!(model.predict(&[0.2, 0.8]), Label::Positive);
        assert_eq!(model.predict(&[0.8, 0.2]), Label::Negative);

        let q = build_svm_qubo(&train, KernelSpec::rbf(1.0), enc22(), 0.0).unwrap();
        let exact = brute_force_solve(&q).unwrap();
        assert_eq!(model.energy, exact.energy);
        let sched = AnnealSchedule::with_seed(3);
        let annealed = fit_qubo_svm(&train, KernelSpec::rbf(1.0), enc22(), 0.0, &sched).unwrap();
        assert_eq!(annealed.alphas, model.alphas);
    }

    #[test]
    fn bias_examples() {
        let pts = [[0.4, 0.4]];
        let b = compute_bias(&pts, &[Label::Positive], &[1.0], KernelSpec::rbf(1.0), 3.0);
        assert_eq!(b, 0.0);
        let b = compute_bias(&pts, &[Label::Positive], &[0.0], KernelSpec::rbf(1.0), 3.0);
        assert_eq!(b, 0.0);
        // only a bound multiplier: falls back to the positive set, 1 - 3
        let b = compute_bias(&pts, &[Label::Positive], &[3.0], KernelSpec::rbf(1.0), 3.0);
        assert_eq!(b, -2.0);
    }

    fn zero_model(bias: f64) -> QuboSvmModel {
        let train = mirrored_pair();
        let mut m = model_from_alphas(&train, KernelSpec::rbf(1.0), enc22(), 0.0, vec![0.0, 0.0], 0.0);
        m.bias = bias;
        m
    }

    #[test]
    fn zero_multiplier_models_predict_bias_sign() {
        assert_eq!(model_from_alphas(&mirrored_pair(), KernelSpec::rbf(1.0), enc22(), 0.0, vec![0.0; 2], 0.0).bias, 0.0);
        let pos = zero_model(0.5);
        let neg = zero_model(-0.5);
        for x in [[0.0, 0.0], [0.5, 0.9], [1.0, 1.0]] {
            assert_eq!(pos.predict(&x), Label::Positive);
            assert_eq!(neg.predict(&x), Label::Negative);
        }
        // sign(0) = +1
        assert_eq!(zero_model(0.0).predict(&[0.3, 0.3]), Label::Positive);
    }

    #[test]
    fn single_class_training_rejected() {
        let d = Dataset::from_points(vec![LabeledPoint::new(0.1, 0.2, Label::Positive); 3]);
        let sched = AnnealSchedule::default();
        assert!(matches!(fit_qubo_svm(&d, KernelSpec::rbf(1.0), enc22(), 0.0, &sched), Err(Error::InvalidArgument(_))));
        assert!(matches!(fit_classical_svm(&d, KernelSpec::rbf(1.0), &SmoParams::default()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn confusion_counts() {
        let test = Dataset::from_points(vec![LabeledPoint::new(0.1, 0.1, Label::Positive); 7]);
        let cm = evaluate(&zero_model(1.0), &test).unwrap();
        assert_eq!(cm, ConfusionMatrix { true_pos: 7, ..Default::default() });
        assert_eq!(cm.accuracy().unwrap(), 1.0);
        assert!(evaluate(&zero_model(1.0), &Dataset::from_points(vec![])).is_err());

        let cm = ConfusionMatrix { true_pos: 500, true_neg: 437, false_pos: 40, false_neg: 23 };
        assert_eq!(accuracy(&cm).unwrap(), 0.937);
        let cm = ConfusionMatrix { false_pos: 3, false_neg: 4, ..Default::default() };
        assert_eq!(accuracy(&cm).unwrap(), 0.0);
        assert!(accuracy(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn perfect_model_has_no_errors() {
        let test = generate_dataset(ProblemKind::LinearSep, 50, 1).unwrap();
        struct Oracle;
        impl Classifier for Oracle {
            fn decision(&self, x: &Point) -> f64 {
                if x[1] > x[0] { 1.0 } else { -1.0 }
            }
        }
        let cm = evaluate(&Oracle, &test).unwrap();
        assert_eq!((cm.false_pos, cm.false_neg), (0, 0));
    }

    #[test]
    fn smo_separates_two_points() {
        let train = Dataset::from_points(vec![
            LabeledPoint::new(0.0, 1.0, Label::Positive),
            LabeledPoint::new(1.0, 0.0, Label::Negative),
        ]);
        let params = SmoParams { c: 1e6, ..Default::default() };
        let model = fit_classical_svm(&train, KernelSpec::Linear, &params).unwrap();
        assert_eq!(evaluate(&model, &train).unwrap().accuracy().unwrap(), 1.0);
        // hard margin: w = (-1, 1), alpha = 1 for both points
        assert!((model.alphas[0] - 1.0).abs() < 1e-9 && (model.alphas[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn smo_respects_dual_constraints() {
        for (kind, seed) in [(ProblemKind::LinearSep, 1), (ProblemKind::NonLinear1, 2), (ProblemKind::NonLinear2, 3)] {
            let train = generate_dataset(kind, 100, seed).unwrap();
            let params = SmoParams::default();
            let model = fit_classical_svm(&train, KernelSpec::rbf(1.0), &params).unwrap();
            assert!(model.alphas.iter().all(|&a| (0.0..=params.c).contains(&a)));
            assert!(model.equality_residual() < params.tol);
            assert!(model.kkt_violation() < 10.0 * params.tol, "kkt {}", model.kkt_violation());
        }
    }

    #[test]
    fn smo_iteration_cap_reports_best_model() {
        let train = generate_dataset(ProblemKind::NonLinear1, 60, 4).unwrap();
        let params = SmoParams { max_iterations: 1, ..Default::default() };
        match fit_classical_svm(&train, KernelSpec::rbf(10.0), &params) {
            Err(Error::Convergence { iterations, model }) => {
                assert_eq!(iterations, 1);
                assert_eq!(model.alphas.len(), 60);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn model_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let train = generate_dataset(ProblemKind::NonLinear2, 12, 8).unwrap();
        let q = fit_qubo_svm(&train, KernelSpec::rbf(10.0), enc22(), 10.0, &AnnealSchedule { sweeps: 50, ..Default::default() }).unwrap();
        let c = fit_classical_svm(&train, KernelSpec::rbf(0.3), &SmoParams::default()).unwrap();
        for model in [SvmModel::Qubo(q), SvmModel::Classical(c)] {
            let path = dir.path().join("model.json");
            save_model(&model, &path).unwrap();
            assert_eq!(load_model(&path).unwrap(), model);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn oracle_fit_is_global_minimum(seed in any::<u64>(), n in 2usize..=6, gamma in prop::sample::select(vec![0.1, 1.0, 10.0])) {
            let mut train = generate_dataset(ProblemKind::NonLinear2, n, seed).unwrap();
            train.points[0].label = Label::Positive;
            train.points[1].label = Label::Negative;
            let enc = EncodingSpec::new(2, 2).unwrap();
            let model = fit_qubo_svm_with(&train, KernelSpec::rbf(gamma), enc, 1.0, &Solver::Exact).unwrap();
            let q = build_svm_qubo(&train, KernelSpec::rbf(gamma), enc, 1.0).unwrap();
            prop_assert_eq!(model.energy, brute_force_solve(&q).unwrap().energy);
            // decoded multipliers lie on the encoding lattice
            prop_assert!(model.alphas.iter().all(|a| [0.0, 1.0, 2.0, 3.0].contains(a)));

            let sched = AnnealSchedule { sweeps: 300, restarts: 4, ..AnnealSchedule::with_seed(seed) };
            let annealed = fit_qubo_svm(&train, KernelSpec::rbf(gamma), enc, 1.0, &sched).unwrap();
            prop_assert!(annealed.energy >= model.energy);
            let bits_energy = {
                let bits: Vec<bool> = annealed.alphas.iter().flat_map(|&a| [a as u32 & 1 == 1, a as u32 & 2 == 2]).collect();
                qubo_energy(&q, &bits).unwrap()
            };
            prop_assert_eq!(bits_energy, annealed.energy);
        }

        #[test]
        fn flipped_model_complements_accuracy(seed in any::<u64>()) {
            let train = generate_dataset(ProblemKind::LinearSep, 20, seed).unwrap();
            prop_assume!(train.has_both_labels());
            let test = generate_dataset(ProblemKind::LinearSep, 200, seed ^ 1).unwrap();
            let model = fit_classical_svm(&train, KernelSpec::rbf(1.0), &SmoParams::default()).unwrap();
            let mut flipped = model.clone();
            flipped.train_labels.iter_mut().for_each(|l| *l = l.flipped());
            flipped.bias = -model.bias;
            // zero decisions would map to +1 on both sides
            prop_assume!(test.points.iter().all(|p| model.decision(&p.point()) != 0.0));
            let a = evaluate(&model, &test).unwrap().accuracy().unwrap();
            let b = evaluate(&flipped, &test).unwrap().accuracy().unwrap();
            prop_assert!((a + b - 1.0).abs() < 1e-12);
        }
    }
}
