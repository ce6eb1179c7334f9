//! Kernel support vector machines trained by minimizing a QUBO Hamiltonian.
//!
//! The Lagrange multipliers of the SVM dual are encoded as integers over
//! binary variables (`alpha_n = sum_k B^k a_{K n + k}`), the dual objective plus
//! a squared-equality penalty becomes a quadratic form over those bits, and a
//! simulated-annealing solver stands in for an annealing machine. A classical
//! SMO soft-margin SVM is included as a baseline, along with the synthetic
//! datasets and hyperparameter sweep harness used to compare the two.
//!
//! ```
//! use anneal_svm::datagen::{generate_dataset, ProblemKind};
//! use anneal_svm::kernels::KernelSpec;
//! use anneal_svm::qubo::EncodingSpec;
//! use anneal_svm::annealer::AnnealSchedule;
//! use anneal_svm::svm::{fit_qubo_svm, evaluate};
//!
//! let train = generate_dataset(ProblemKind::LinearSep, 20, 1).unwrap();
//! let test = generate_dataset(ProblemKind::LinearSep, 200, 2).unwrap();
//! let sched = AnnealSchedule { sweeps: 200, restarts: 2, ..AnnealSchedule::default() };
//! let model = fit_qubo_svm(&train, KernelSpec::rbf(1.0), EncodingSpec::new(2, 2).unwrap(), 0.0, &sched).unwrap();
//! let acc = evaluate(&model, &test).unwrap().accuracy().unwrap();
//! assert!(acc > 0.5);
//! ```

pub mod annealer;
pub mod datagen;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod qubo;
pub mod svm;

pub use error::{Error, Result};
