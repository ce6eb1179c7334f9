//! QUBO minimization: Metropolis simulated annealing with geometric cooling,
//! and an exhaustive oracle for small problems.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{qubo_energy, QuboProblem};

/// Largest problem [`brute_force_solve`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    /// Initial temperature. `None` picks `5 * max |coefficient|` of the problem.
    pub t_start: Option<f64>,
    pub t_end: f64,
    /// Full passes over all variables.
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            t_start: None,
            t_end: 1e-3,
            sweeps: 2000,
            restarts: 10,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn with_seed(seed: u64) -> Self {
        AnnealSchedule {
            seed,
            ..Default::default()
        }
    }

    /// Concrete `(t_start, t_end)` for a problem.
    pub fn temperatures(&self, q: &QuboProblem) -> Result<(f64, f64)> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid(format!("t_end must be > 0, got {}", self.t_end)));
        }
        match self.t_start {
            Some(t0) if !(t0.is_finite() && t0 > self.t_end) => Err(Error::invalid(format!(
                "t_start ({t0}) must be finite and greater than t_end ({})",
                self.t_end
            ))),
            Some(t0) => Ok((t0, self.t_end)),
            None => {
                let scale = q.max_abs_coeff();
                if scale == 0.0 {
                    Ok((1.0, self.t_end.min(0.5)))
                } else if 5.0 * scale > self.t_end {
                    Ok((5.0 * scale, self.t_end))
                } else {
                    // tiny coefficients: keep the same cooling depth below the scale
                    Ok((5.0 * scale, 5.0 * scale * 1e-6))
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::invalid("sweeps must be >= 1"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub bits: Vec<bool>,
    /// Always `qubo_energy(problem, bits)`.
    pub energy: f64,
    pub restarts_run: usize,
    pub best_restart: usize,
    pub elapsed: Duration,
}

/// Which minimizer to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    Anneal(AnnealSchedule),
    Exact,
}

impl Solver {
    pub fn solve(&self, q: &QuboProblem) -> Result<SolveResult> {
        match self {
            Solver::Anneal(sched) => simulated_anneal(q, sched),
            Solver::Exact => brute_force_solve(q),
        }
    }
}

struct DenseQubo {
    n: usize,
    linear: Vec<f64>,
    couplings: Vec<f64>,
}

impl DenseQubo {
    fn new(q: &QuboProblem) -> Self {
        let (linear, couplings) = q.to_dense();
        DenseQubo {
            n: q.num_vars(),
            linear,
            couplings,
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.couplings[i * self.n..(i + 1) * self.n]
    }
}

/// One Metropolis chain. `field[i]` is the energy change of setting bit `i`
/// with all other bits fixed, i.e. `linear[i] + sum_j Q_ij a_j`.
struct Chain<'a> {
    problem: &'a DenseQubo,
    bits: Vec<bool>,
    field: Vec<f64>,
    energy: f64,
}

impl<'a> Chain<'a> {
    fn new(problem: &'a DenseQubo, bits: Vec<bool>, offset: f64) -> Self {
        let mut chain = Chain {
            problem,
            field: problem.linear.clone(),
            bits: vec![false; problem.n],
            energy: offset,
        };
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                chain.flip(i);
            }
        }
        chain
    }

    fn delta(&self, i: usize) -> f64 {
        if self.bits[i] {
            -self.field[i]
        } else {
            self.field[i]
        }
    }

    fn flip(&mut self, i: usize) {
        let delta = self.delta(i);
        self.energy += delta;
        self.bits[i] = !self.bits[i];
        let sign = if self.bits[i] { 1.0 } else { -1.0 };
        for (f, &c) in self.field.iter_mut().zip(self.problem.row(i)) {
            *f += sign * c;
        }
    }

    /// Metropolis step on variable `i`; returns whether the flip was taken.
    fn try_flip<R: Rng>(&mut self, i: usize, temperature: f64, rng: &mut R) -> bool {
        let delta = self.delta(i);
        let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
        if accept {
            self.flip(i);
        }
        accept
    }
}

struct ChainOutcome {
    bits: Vec<bool>,
    energy: f64,
}

fn run_chain(q: &QuboProblem, dense: &DenseQubo, ladder: &[f64], seed: u64, restart: usize) -> Result<ChainOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let start: Vec<bool> = (0..dense.n).map(|_| rng.random()).collect();
    let mut chain = Chain::new(dense, start, q.offset);
    let mut best_bits = chain.bits.clone();
    let mut best_energy = chain.energy;
    let mut order: Vec<usize> = (0..dense.n).collect();
    for &temperature in ladder {
        order.shuffle(&mut rng);
        for &i in &order {
            if chain.try_flip(i, temperature, &mut rng) && chain.energy < best_energy {
                best_energy = chain.energy;
                best_bits.copy_from_slice(&chain.bits);
            }
        }
    }
    // incremental bookkeeping drifts; report the exact energy
    let energy = qubo_energy(q, &best_bits)?;
    Ok(ChainOutcome {
        bits: best_bits,
        energy,
    })
}

fn geometric_ladder(t_start: f64, t_end: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![t_end];
    }
    let ratio = (t_end / t_start).powf(1.0 / (steps - 1) as f64);
    let mut ladder = Vec::with_capacity(steps);
    let mut t = t_start;
    for _ in 0..steps {
        ladder.push(t);
        t *= ratio;
    }
    ladder
}

/// Runs `sched.restarts` independent chains and returns the lowest-energy
/// assignment seen. Chain `r` draws from stream `r` of a generator seeded with
/// `sched.seed`, so the result does not depend on how restarts are scheduled.
pub fn simulated_anneal(q: &QuboProblem, sched: &AnnealSchedule) -> Result<SolveResult> {
    if q.num_vars() == 0 {
        return Err(Error::invalid("cannot anneal a problem with no variables"));
    }
    sched.validate()?;
    let (t_start, t_end) = sched.temperatures(q)?;
    let started = Instant::now();
    let dense = DenseQubo::new(q);
    let ladder = geometric_ladder(t_start, t_end, sched.sweeps);

    let outcomes = (0..sched.restarts)
        .into_par_iter()
        .map(|r| run_chain(q, &dense, &ladder, sched.seed, r))
        .collect::<Result<Vec<_>>>()?;

    // strict comparison keeps the lowest restart index on ties
    let (best_restart, best) = outcomes
        .into_iter()
        .enumerate()
        .reduce(|acc, cur| if cur.1.energy < acc.1.energy { cur } else { acc })
        .expect("at least one restart");
    Ok(SolveResult {
        bits: best.bits,
        energy: best.energy,
        restarts_run: sched.restarts,
        best_restart,
        elapsed: started.elapsed(),
    })
}

/// Enumerates every assignment in Gray-code order. Ties go to the assignment
/// with the smallest integer value, variable 0 being the least significant bit.
pub fn brute_force_solve(q: &QuboProblem) -> Result<SolveResult> {
    let n = q.num_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            num_vars: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let started = Instant::now();
    let dense = DenseQubo::new(q);
    let to_bits = |mask: u32| -> Vec<bool> { (0..n).map(|i| mask >> i & 1 == 1).collect() };

    // running energies accumulate rounding error, so anything within `slack`
    // of the best is re-scored exactly
    let scale = q.offset.abs()
        + q.linear_terms().map(|(_, c)| c.abs()).sum::<f64>()
        + q.quadratic_terms().map(|(_, c)| c.abs()).sum::<f64>();
    let slack = 1e-9 * (1.0 + scale);

    let mut chain = Chain::new(&dense, vec![false; n], q.offset);
    let mut mask = 0u32;
    let mut best_mask = 0u32;
    let mut best_exact = qubo_energy(q, &to_bits(0))?;
    let mut best_running = chain.energy;
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        chain.flip(i);
        mask ^= 1 << i;
        if chain.energy <= best_running + slack {
            let exact = qubo_energy(q, &to_bits(mask))?;
            if exact < best_exact || (exact == best_exact && mask < best_mask) {
                best_exact = exact;
                best_mask = mask;
            }
            best_running = best_running.min(chain.energy);
        }
    }
    Ok(SolveResult {
        bits: to_bits(best_mask),
        energy: best_exact,
        restarts_run: 1,
        best_restart: 0,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{Dataset, Label, LabeledPoint};
    use crate::kernels::KernelSpec;
    use crate::qubo::{build_svm_qubo, EncodingSpec};
    use proptest::prelude::*;
    use rand::Rng;

    fn svm_example() -> QuboProblem {
        let train = Dataset::from_points(vec![LabeledPoint::new(0.3, 0.6, Label::Positive)]);
        build_svm_qubo(&train, KernelSpec::rbf(1.0), EncodingSpec::new(2, 2).unwrap(), 0.0).unwrap()
    }

    fn random_qubo(n: usize, seed: u64) -> QuboProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q = QuboProblem::new(n);
        for i in 0..n {
            for j in i..n {
                if rng.random::<f64>() < 0.7 {
                    q.add_term(i, j, rng.random_range(-5.0..5.0)).unwrap();
                }
            }
        }
        q
    }

    // plain enumeration, independent of the Gray-code walk
    fn enumerate_min(q: &QuboProblem) -> f64 {
        let n = q.num_vars();
        (0u32..1 << n)
            .map(|m| {
                let bits: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
                q.energy(&bits).unwrap()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn anneal_solves_svm_example() {
        let q = svm_example();
        let sched = AnnealSchedule {
            sweeps: 100,
            restarts: 4,
            ..AnnealSchedule::with_seed(7)
        };
        let res = simulated_anneal(&q, &sched).unwrap();
        assert_eq!(res.bits, vec![true, false]);
        assert_eq!(res.energy, -0.5);
        assert_eq!(res.restarts_run, 4);
    }

    #[test]
    fn anneal_flat_problem() {
        let q = QuboProblem::new(5);
        let res = simulated_anneal(&q, &AnnealSchedule::default()).unwrap();
        assert_eq!(res.energy, 0.0);
        assert_eq!(res.bits.len(), 5);
    }

    #[test]
    fn anneal_rejects_empty_and_bad_schedules() {
        assert!(simulated_anneal(&QuboProblem::new(0), &AnnealSchedule::default()).is_err());
        let q = svm_example();
        let bad = AnnealSchedule { sweeps: 0, ..Default::default() };
        assert!(simulated_anneal(&q, &bad).is_err());
        let bad = AnnealSchedule { t_start: Some(1e-4), ..Default::default() };
        assert!(simulated_anneal(&q, &bad).is_err());
        let bad = AnnealSchedule { restarts: 0, ..Default::default() };
        assert!(simulated_anneal(&q, &bad).is_err());
    }

    #[test]
    fn anneal_is_deterministic() {
        let q = random_qubo(30, 3);
        let sched = AnnealSchedule { sweeps: 50, restarts: 3, ..AnnealSchedule::with_seed(42) };
        let a = simulated_anneal(&q, &sched).unwrap();
        let b = simulated_anneal(&q, &sched).unwrap();
        assert_eq!((a.bits, a.energy, a.best_restart), (b.bits, b.energy, b.best_restart));
    }

    #[test]
    fn brute_force_examples() {
        let res = brute_force_solve(&svm_example()).unwrap();
        assert_eq!(res.bits, vec![true, false]);
        assert_eq!(res.energy, -0.5);

        let res = brute_force_solve(&QuboProblem::new(3)).unwrap();
        assert_eq!(res.bits, vec![false; 3]);
        assert_eq!(res.energy, 0.0);

        let mut q = QuboProblem::new(1);
        q.add_term(0, 0, 1.0).unwrap();
        let res = brute_force_solve(&q).unwrap();
        assert_eq!(res.bits, vec![false]);
        assert_eq!(res.energy, 0.0);

        assert!(matches!(
            brute_force_solve(&QuboProblem::new(25)),
            Err(Error::SizeLimit { num_vars: 25, limit: 24 })
        ));
    }

    #[test]
    fn brute_force_tie_break_prefers_low_integer() {
        // a0 + a1 = 1 is optimal for both (1,0) and (0,1): mask 1 wins
        let mut q = QuboProblem::new(2);
        q.add_term(0, 0, -1.0).unwrap();
        q.add_term(1, 1, -1.0).unwrap();
        q.add_term(0, 1, 2.0).unwrap();
        assert_eq!(brute_force_solve(&q).unwrap().bits, vec![true, false]);
    }

    #[test]
    fn incremental_energy_tracks_full_recomputation() {
        let q = random_qubo(12, 99);
        let dense = DenseQubo::new(&q);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let start: Vec<bool> = (0..12).map(|_| rng.random()).collect();
        let mut chain = Chain::new(&dense, start, q.offset);
        let mut accepted = 0;
        for step in 0..5000 {
            let i = rng.random_range(0..12);
            let t = 10.0 * 0.999f64.powi(step);
            if chain.try_flip(i, t, &mut rng) {
                accepted += 1;
                let exact = q.energy(&chain.bits).unwrap();
                assert!((chain.energy - exact).abs() <= 1e-9 * exact.abs().max(1.0));
            }
        }
        assert!(accepted > 100);
    }

    #[test]
    fn ladder_is_geometric() {
        let l = geometric_ladder(100.0, 1.0, 3);
        assert_eq!(l.len(), 3);
        assert!((l[1] - 10.0).abs() < 1e-12 && (l[2] - 1.0).abs() < 1e-12);
        assert_eq!(geometric_ladder(5.0, 0.1, 1), vec![0.1]);
    }

    #[test]
    fn anneal_matches_oracle_on_random_problems() {
        let mut hits = 0;
        for trial in 0..50u64 {
            let n = 2 + (trial as usize % 11);
            let q = random_qubo(n, 1000 + trial);
            let sched = AnnealSchedule {
                t_start: None,
                t_end: 1e-3,
                sweeps: 1000,
                restarts: 10,
                seed: trial,
            };
            let sa = simulated_anneal(&q, &sched).unwrap();
            let exact = brute_force_solve(&q).unwrap();
            assert!(sa.energy >= exact.energy);
            if sa.energy <= exact.energy + 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 45, "annealer matched the oracle {hits}/50 times");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn brute_force_matches_enumeration(n in 1usize..=10, seed in any::<u64>()) {
            let q = random_qubo(n, seed);
            let res = brute_force_solve(&q).unwrap();
            prop_assert_eq!(res.energy, q.energy(&res.bits).unwrap());
            prop_assert_eq!(res.energy, enumerate_min(&q));
        }

        #[test]
        fn anneal_energy_is_exact(n in 1usize..=20, seed in any::<u64>()) {
            let q = random_qubo(n, seed);
            let sched = AnnealSchedule { sweeps: 20, restarts: 2, ..AnnealSchedule::with_seed(seed) };
            let res = simulated_anneal(&q, &sched).unwrap();
            prop_assert_eq!(res.energy, q.energy(&res.bits).unwrap());
        }
    }
}
