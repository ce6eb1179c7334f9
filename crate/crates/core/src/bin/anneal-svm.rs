use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use anneal_svm::annealer::{brute_force_solve, simulated_anneal, AnnealSchedule};
use anneal_svm::datagen::{apply_label_noise, generate_dataset, load_dataset, save_dataset, ProblemKind};
use anneal_svm::harness::{
    render_summary_table, run_experiment, run_sweep, save_records, save_summary, summarize, SweepGrid,
};
use anneal_svm::kernels::KernelSpec;
use anneal_svm::qubo::{load_qubo, EncodingSpec};
use anneal_svm::svm::{
    evaluate, fit_classical_svm, fit_qubo_svm, load_model, save_model, SmoParams, SvmModel,
};
use anneal_svm::Error;

#[derive(Parser)]
#[command(name = "anneal-svm", version, about = "QUBO-trained kernel SVMs and a classical SMO baseline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset
    Gen {
        #[arg(long, value_parser = parse_problem)]
        problem: ProblemKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a QUBO-SVM with the annealer
    TrainQubo {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        base: u32,
        #[arg(long)]
        bits: u32,
        #[arg(long)]
        xi: f64,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        model_out: PathBuf,
    },
    /// Train the classical soft-margin SVM (SMO)
    TrainClassical {
        #[arg(long)]
        train: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 10)]
        max_passes: usize,
        #[arg(long)]
        model_out: PathBuf,
    },
    /// Print the confusion matrix and accuracy of a model on a dataset
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
    /// Run the hyperparameter grid on one problem
    Sweep {
        #[arg(long, value_parser = parse_problem)]
        problem: ProblemKind,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary_out: Option<PathBuf>,
        /// Fill the time_ms column (output is then no longer reproducible)
        #[arg(long)]
        timing: bool,
    },
    /// Run all problems at 0% and 5% noise and print the report tables
    Experiment {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        timing: bool,
    },
    /// Minimize a QUBO file
    SolveQubo {
        #[arg(long = "in")]
        input: PathBuf,
        /// Exhaustive search instead of annealing (at most 24 variables)
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
}

impl ScheduleArgs {
    fn schedule(&self) -> AnnealSchedule {
        let d = AnnealSchedule::default();
        AnnealSchedule {
            t_start: self.t_start.or(d.t_start),
            t_end: self.t_end.unwrap_or(d.t_end),
            sweeps: self.sweeps.unwrap_or(d.sweeps),
            restarts: self.restarts.unwrap_or(d.restarts),
            seed: self.seed,
        }
    }
}

fn parse_problem(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn run(cmd: Command) -> anneal_svm::Result<()> {
    match cmd {
        Command::Gen { problem, n, noise, seed, out } => {
            let clean = generate_dataset(problem, n, seed)?;
            // independent stream for the noise draw
            let d = apply_label_noise(&clean, noise, seed.wrapping_add(0x6e6f_6973_65))?;
            save_dataset(&d, &out)?;
            println!("wrote {} points to {}", d.len(), out.display());
        }
        Command::TrainQubo { train, gamma, base, bits, xi, schedule, model_out } => {
            let train = load_dataset(&train)?;
            let enc = EncodingSpec::new(base, bits)?;
            let model = fit_qubo_svm(&train, KernelSpec::rbf(gamma), enc, xi, &schedule.schedule())?;
            println!(
                "energy {} with {} support vectors, bias {}",
                model.energy,
                model.support_vectors(),
                model.bias
            );
            save_model(&SvmModel::Qubo(model), &model_out)?;
        }
        Command::TrainClassical { train, gamma, c, tol, max_passes, model_out } => {
            let train = load_dataset(&train)?;
            let params = SmoParams { c, tol, max_passes, ..Default::default() };
            let model = fit_classical_svm(&train, KernelSpec::rbf(gamma), &params)?;
            println!("bias {}", model.bias);
            save_model(&SvmModel::Classical(model), &model_out)?;
        }
        Command::Eval { model, test } => {
            let model = load_model(&model)?;
            let test = load_dataset(&test)?;
            let cm = evaluate(&model, &test)?;
            println!("                predicted +1  predicted -1");
            println!("actual +1       {:>12}  {:>12}", cm.true_pos, cm.false_neg);
            println!("actual -1       {:>12}  {:>12}", cm.false_pos, cm.true_neg);
            println!("accuracy {:.4} ({}/{})", cm.accuracy()?, cm.correct(), cm.total());
        }
        Command::Sweep { problem, noise, schedule, out, summary_out, timing } => {
            let records = run_sweep(problem, noise, &SweepGrid::default(), schedule.seed, &schedule.schedule())?;
            save_records(&records, &out, timing)?;
            let summary = summarize(&records)?;
            if let Some(path) = summary_out {
                save_summary(&summary, &path)?;
            }
            print!("{}", render_summary_table(&summary, &[]));
        }
        Command::Experiment { schedule, out_dir, timing } => {
            fs::create_dir_all(&out_dir).map_err(|e| anneal_svm::Error::Io { path: out_dir.clone(), source: e })?;
            let exp = run_experiment(&SweepGrid::default(), schedule.seed, &schedule.schedule())?;
            save_records(&exp.records, out_dir.join("records.csv"), timing)?;
            save_summary(&exp.summary, out_dir.join("summary.csv"))?;
            print!("{}", render_summary_table(&exp.summary, &exp.classical));
        }
        Command::SolveQubo { input, exact, schedule } => {
            let q = load_qubo(&input)?;
            let res = if exact {
                brute_force_solve(&q)?
            } else {
                simulated_anneal(&q, &schedule.schedule())?
            };
            println!("energy {}", res.energy);
            println!("bits {}", bits_string(&res.bits));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
