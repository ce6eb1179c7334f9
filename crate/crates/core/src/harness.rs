//! Hyperparameter sweeps over the QUBO-SVM, the classical baseline, and the
//! report tables built from them.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annealer::AnnealSchedule;
use crate::datagen::{apply_label_noise, generate_dataset, Dataset, ProblemKind};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::qubo::EncodingSpec;
use crate::svm::{evaluate, fit_classical_svm, fit_qubo_svm, SmoParams};

pub const TRAIN_SIZE: usize = 100;
pub const TEST_SIZE: usize = 1000;
/// Label-noise levels of the full experiment.
pub const NOISE_LEVELS: [f64; 2] = [0.0, 0.05];
/// Kernel width of the untuned classical baseline.
pub const CLASSICAL_GAMMA: f64 = 1.0;

pub const RECORDS_HEADER: &str = "problem,noise,B,K,gamma,xi,seed,accuracy,energy,time_ms,error";
pub const SUMMARY_HEADER: &str =
    "problem,noise,best_accuracy,worst_accuracy,diff_points,best_B,best_K,best_gamma,best_xi";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub bases: Vec<u32>,
    pub bit_counts: Vec<u32>,
    pub gammas: Vec<f64>,
    pub xis: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            bases: vec![2, 10],
            bit_counts: vec![2, 3],
            gammas: vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0],
            xis: vec![0.0, 10.0, 100.0],
        }
    }
}

impl SweepGrid {
    pub fn single(config: Config) -> Self {
        SweepGrid {
            bases: vec![config.base],
            bit_counts: vec![config.bits],
            gammas: vec![config.gamma],
            xis: vec![config.xi],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bases.is_empty() || self.bit_counts.is_empty() || self.gammas.is_empty() || self.xis.is_empty() {
            return Err(Error::invalid("every sweep axis needs at least one value"));
        }
        Ok(())
    }

    /// Grid points with `B` outermost, then `K`, `gamma`, `xi`.
    pub fn configs(&self) -> Vec<Config> {
        let mut out = Vec::with_capacity(self.len());
        for &base in &self.bases {
            for &bits in &self.bit_counts {
                for &gamma in &self.gammas {
                    for &xi in &self.xis {
                        out.push(Config { base, bits, gamma, xi });
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.bases.len() * self.bit_counts.len() * self.gammas.len() * self.xis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One `(B, K, gamma, xi)` grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub base: u32,
    pub bits: u32,
    pub gamma: f64,
    pub xi: f64,
}

impl std::fmt::Display for Config {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}, {})", self.base, self.bits, self.gamma, self.xi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub problem: ProblemKind,
    pub noise_rate: f64,
    pub config: Config,
    pub seed: u64,
    /// `None` when the fit failed; see `error`.
    pub accuracy: Option<f64>,
    pub energy: Option<f64>,
    pub elapsed: Duration,
    pub error: Option<String>,
}

/// Train (with noise applied) and test sets shared by every grid point.
#[derive(Debug, Clone)]
pub struct SweepData {
    pub train: Dataset,
    pub test: Dataset,
}

fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SweepData {
    pub fn generate(problem: ProblemKind, noise: f64, seed: u64) -> Result<Self> {
        let clean = generate_dataset(problem, TRAIN_SIZE, derive_seed(seed, 1))?;
        let train = apply_label_noise(&clean, noise, derive_seed(seed, 2))?;
        let test = generate_dataset(problem, TEST_SIZE, derive_seed(seed, 3))?;
        Ok(SweepData { train, test })
    }
}

/// Trains and scores one QUBO-SVM per grid point on a shared train/test pair.
/// Failed fits become rows with an error code instead of aborting the sweep.
pub fn run_sweep(
    problem: ProblemKind,
    noise: f64,
    grid: &SweepGrid,
    seed: u64,
    sched: &AnnealSchedule,
) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    sched.validate()?;
    let data = SweepData::generate(problem, noise, seed)?;
    Ok(sweep_on(&data, problem, noise, grid, seed, sched))
}

pub fn sweep_on(
    data: &SweepData,
    problem: ProblemKind,
    noise: f64,
    grid: &SweepGrid,
    seed: u64,
    sched: &AnnealSchedule,
) -> Vec<SweepRecord> {
    grid.configs()
        .into_par_iter()
        .map(|config| {
            let started = Instant::now();
            let outcome = score_config(data, config, sched);
            let elapsed = started.elapsed();
            let (accuracy, energy, error) = match outcome {
                Ok((acc, energy)) => (Some(acc), Some(energy), None),
                Err(e) => (None, None, Some(e.code().to_string())),
            };
            SweepRecord {
                problem,
                noise_rate: noise,
                config,
                seed,
                accuracy,
                energy,
                elapsed,
                error,
            }
        })
        .collect()
}

fn score_config(data: &SweepData, config: Config, sched: &AnnealSchedule) -> Result<(f64, f64)> {
    let enc = EncodingSpec::new(config.base, config.bits)?;
    let model = fit_qubo_svm(&data.train, KernelSpec::rbf(config.gamma), enc, config.xi, sched)?;
    let acc = evaluate(&model, &data.test)?.accuracy()?;
    Ok((acc, model.energy))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub problem: ProblemKind,
    pub noise_rate: f64,
    pub best_accuracy: f64,
    pub worst_accuracy: f64,
    /// `100 * (best - worst)`.
    pub diff_points: f64,
    pub best_config: Config,
    pub worst_config: Config,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub rows: Vec<SummaryRow>,
}

/// Best/worst accuracy per `(problem, noise)` group, in order of first
/// appearance. Ties go to the earlier record. Failed rows are skipped.
pub fn summarize(records: &[SweepRecord]) -> Result<ReportSummary> {
    if records.is_empty() {
        return Err(Error::invalid("no sweep records to summarize"));
    }
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut seen: Vec<(ProblemKind, f64)> = Vec::new();
    for r in records {
        if !seen.contains(&(r.problem, r.noise_rate)) {
            seen.push((r.problem, r.noise_rate));
        }
    }
    for (problem, noise) in seen {
        let mut best: Option<(f64, Config)> = None;
        let mut worst: Option<(f64, Config)> = None;
        for r in records.iter().filter(|r| r.problem == problem && r.noise_rate == noise) {
            let Some(acc) = r.accuracy else { continue };
            if best.is_none_or(|(b, _)| acc > b) {
                best = Some((acc, r.config));
            }
            if worst.is_none_or(|(w, _)| acc < w) {
                worst = Some((acc, r.config));
            }
        }
        let (Some((best_accuracy, best_config)), Some((worst_accuracy, worst_config))) = (best, worst) else {
            return Err(Error::invalid(format!(
                "every record for {problem} at noise {noise} failed"
            )));
        };
        rows.push(SummaryRow {
            problem,
            noise_rate: noise,
            best_accuracy,
            worst_accuracy,
            diff_points: 100.0 * (best_accuracy - worst_accuracy),
            best_config,
            worst_config,
        });
    }
    Ok(ReportSummary { rows })
}

/// Records as CSV. `time_ms` is left empty unless `timing` is set, so that
/// repeated sweeps produce identical files.
pub fn write_records<W: Write>(records: &[SweepRecord], mut w: W, timing: bool) -> std::io::Result<()> {
    writeln!(w, "{RECORDS_HEADER}")?;
    for r in records {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let time = if timing {
            format!("{:.3}", r.elapsed.as_secs_f64() * 1e3)
        } else {
            String::new()
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            r.noise_rate,
            r.config.base,
            r.config.bits,
            r.config.gamma,
            r.config.xi,
            r.seed,
            opt(r.accuracy),
            opt(r.energy),
            time,
            r.error.as_deref().unwrap_or("")
        )?;
    }
    w.flush()
}

pub fn write_summary<W: Write>(summary: &ReportSummary, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for row in &summary.rows {
        writeln!(
            w,
            "{},{},{},{},{:.1},{},{},{},{}",
            row.problem,
            row.noise_rate,
            row.best_accuracy,
            row.worst_accuracy,
            row.diff_points,
            row.best_config.base,
            row.best_config.bits,
            row.best_config.gamma,
            row.best_config.xi
        )?;
    }
    w.flush()
}

pub fn save_records(records: &[SweepRecord], path: impl AsRef<Path>, timing: bool) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, BufWriter::new(file), timing).map_err(|e| Error::io(path, e))
}

pub fn save_summary(summary: &ReportSummary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_summary(summary, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Accuracy of the untuned classical baseline on one `(problem, noise)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalResult {
    pub problem: ProblemKind,
    pub noise_rate: f64,
    pub accuracy: f64,
}

pub fn run_classical(data: &SweepData, problem: ProblemKind, noise: f64, params: &SmoParams) -> Result<ClassicalResult> {
    let model = match fit_classical_svm(&data.train, KernelSpec::rbf(CLASSICAL_GAMMA), params) {
        Ok(m) => m,
        // the capped model is still a usable classifier
        Err(Error::Convergence { model, .. }) => *model,
        Err(e) => return Err(e),
    };
    let accuracy = evaluate(&model, &data.test)?.accuracy()?;
    Ok(ClassicalResult {
        problem,
        noise_rate: noise,
        accuracy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub records: Vec<SweepRecord>,
    pub summary: ReportSummary,
    pub classical: Vec<ClassicalResult>,
}

/// Every problem at every noise level: one sweep plus one classical fit each.
pub fn run_experiment(grid: &SweepGrid, seed: u64, sched: &AnnealSchedule) -> Result<Experiment> {
    grid.validate()?;
    sched.validate()?;
    let mut records = Vec::new();
    let mut classical = Vec::new();
    for problem in ProblemKind::ALL {
        for noise in NOISE_LEVELS {
            let data = SweepData::generate(problem, noise, seed)?;
            records.extend(sweep_on(&data, problem, noise, grid, seed, sched));
            classical.push(run_classical(&data, problem, noise, &SmoParams::default())?);
        }
    }
    let summary = summarize(&records)?;
    Ok(Experiment {
        records,
        summary,
        classical,
    })
}

fn pct(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

/// Fixed-width table with one row per `(problem, noise)`: best, worst, spread,
/// arg-best config, and the classical accuracy when known.
pub fn render_summary_table(summary: &ReportSummary, classical: &[ClassicalResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<11} {:>6} {:>9} {:>9} {:>9} {:>26} {:>13}",
        "problem", "noise", "best[%]", "worst[%]", "diff[pt]", "best (B, K, gamma, xi)", "classical[%]"
    );
    for row in &summary.rows {
        let baseline = classical
            .iter()
            .find(|c| c.problem == row.problem && c.noise_rate == row.noise_rate)
            .map(|c| pct(c.accuracy))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<11} {:>6} {:>9} {:>9} {:>9.1} {:>26} {:>13}",
            row.problem.name(),
            format!("{}%", pct(row.noise_rate)),
            pct(row.best_accuracy),
            pct(row.worst_accuracy),
            row.diff_points,
            row.best_config.to_string(),
            baseline
        );
    }
    out
}
