//! QUBO and Ising models, and the SVM Hamiltonian over binary-encoded
//! multipliers.
//!
//! Each multiplier is an integer `alpha_n = sum_{k<K} B^k a_{K n + k}` over the
//! binary variables `a`. The Hamiltonian
//!
//! ```text
//! H = 1/2 sum_{n,m} alpha_n alpha_m t_n t_m k(x_n, x_m) - sum_n alpha_n
//!     + 1/2 xi (sum_n alpha_n t_n)^2
//! ```
//!
//! is expanded over the bits with `a^2 = a`, so diagonal terms land in the
//! linear table. The largest multiplier `sum_k B^k` acts as the box bound.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datagen::Dataset;
use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, KernelSpec};

/// Binary encoding of one non-negative integer multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub base: u32,
    pub bits: u32,
}

impl EncodingSpec {
    pub fn new(base: u32, bits: u32) -> Result<Self> {
        let enc = EncodingSpec { base, bits };
        enc.validate()?;
        Ok(enc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return Err(Error::invalid(format!("encoding base must be >= 2, got {}", self.base)));
        }
        if self.bits < 1 {
            return Err(Error::invalid("encoding needs at least one bit per multiplier"));
        }
        // every multiplier value must stay exactly representable in f64
        let max = (self.base as f64).powi(self.bits as i32);
        if max > 2f64.powi(53) {
            return Err(Error::invalid(format!(
                "encoding {}^{} exceeds exact f64 integer range",
                self.base, self.bits
            )));
        }
        Ok(())
    }

    /// `B^k` for `k` in `0..K`.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.bits).map(|k| (self.base as f64).powi(k as i32)).collect()
    }

    /// Largest decodable multiplier, `sum_k B^k`.
    pub fn alpha_max(&self) -> f64 {
        self.weights().iter().sum()
    }

    pub fn bits_per_alpha(&self) -> usize {
        self.bits as usize
    }
}

/// Minimize `offset + sum_i linear[i] a_i + sum_{i<j} quadratic[(i,j)] a_i a_j`
/// over `a in {0,1}^num_vars`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuboProblem {
    num_vars: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl QuboProblem {
    pub fn new(num_vars: usize) -> Self {
        QuboProblem {
            num_vars,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.linear.get(&i).copied().unwrap_or(0.0)
    }

    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    pub fn linear_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.linear.iter().map(|(&i, &c)| (i, c))
    }

    pub fn quadratic_terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.quadratic.iter().map(|(&k, &c)| (k, c))
    }

    /// Adds to a coefficient; `i == j` goes to the linear table.
    pub fn add_term(&mut self, i: usize, j: usize, coeff: f64) -> Result<()> {
        if i >= self.num_vars || j >= self.num_vars {
            return Err(Error::invalid(format!(
                "term ({i}, {j}) out of range for {} variables",
                self.num_vars
            )));
        }
        if i == j {
            accumulate(&mut self.linear, i, coeff);
        } else {
            accumulate(&mut self.quadratic, (i.min(j), i.max(j)), coeff);
        }
        Ok(())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.linear
            .values()
            .chain(self.quadratic.values())
            .fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn energy(&self, bits: &[bool]) -> Result<f64> {
        qubo_energy(self, bits)
    }

    /// Row-major `n x n` symmetric coupling matrix (zero diagonal) and the
    /// linear vector, for dense inner loops.
    pub fn to_dense(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.num_vars;
        let mut lin = vec![0.0; n];
        for (&i, &c) in &self.linear {
            lin[i] = c;
        }
        let mut mat = vec![0.0; n * n];
        for (&(i, j), &c) in &self.quadratic {
            mat[i * n + j] = c;
            mat[j * n + i] = c;
        }
        (lin, mat)
    }
}

fn accumulate<K: Ord>(table: &mut BTreeMap<K, f64>, key: K, coeff: f64) {
    if coeff == 0.0 {
        return;
    }
    match table.entry(key) {
        Entry::Vacant(slot) => {
            slot.insert(coeff);
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += coeff;
            if *slot.get() == 0.0 {
                slot.remove();
            }
        }
    }
}

pub fn qubo_energy(q: &QuboProblem, bits: &[bool]) -> Result<f64> {
    if bits.len() != q.num_vars {
        return Err(Error::invalid(format!(
            "assignment has {} bits, problem has {} variables",
            bits.len(),
            q.num_vars
        )));
    }
    let mut e = q.offset;
    for (&i, &c) in &q.linear {
        if bits[i] {
            e += c;
        }
    }
    for (&(i, j), &c) in &q.quadratic {
        if bits[i] && bits[j] {
            e += c;
        }
    }
    Ok(e)
}

/// Builds the SVM Hamiltonian for `train`. Variable `K n + k` carries weight
/// `B^k` of multiplier `alpha_n`.
pub fn build_svm_qubo(train: &Dataset, kernel: KernelSpec, enc: EncodingSpec, xi: f64) -> Result<QuboProblem> {
    if train.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::invalid(format!("xi must be finite and >= 0, got {xi}")));
    }
    kernel.validate()?;
    enc.validate()?;

    let gram = gram_matrix(kernel, &train.features())?;
    let labels: Vec<f64> = train.points.iter().map(|p| p.label.sign()).collect();
    let weights = enc.weights();
    let k = weights.len();
    let n_points = train.len();
    let num_vars = n_points * k;

    // per-variable scale w_p t_n
    let scale: Vec<f64> = (0..num_vars).map(|p| weights[p % k] * labels[p / k]).collect();

    let mut q = QuboProblem::new(num_vars);
    for p in 0..num_vars {
        let n = p / k;
        let w = weights[p % k];
        let c = 0.5 * w * w * (gram.get(n, n) + xi) - w;
        insert_nonzero(&mut q.linear, p, c);
        for r in (p + 1)..num_vars {
            let m = r / k;
            let c = scale[p] * scale[r] * (gram.get(n, m) + xi);
            insert_nonzero(&mut q.quadratic, (p, r), c);
        }
    }
    Ok(q)
}

// Insert for keys known to be fresh; zero coefficients are skipped.
fn insert_nonzero<K: Ord>(table: &mut BTreeMap<K, f64>, key: K, coeff: f64) {
    if coeff != 0.0 {
        table.insert(key, coeff);
    }
}

/// `alpha_n = sum_k B^k bits[K n + k]`.
pub fn decode_alphas(bits: &[bool], enc: EncodingSpec, n_points: usize) -> Result<Vec<f64>> {
    let k = enc.bits_per_alpha();
    if bits.len() != n_points * k {
        return Err(Error::invalid(format!(
            "expected {} bits for {n_points} multipliers of {k} bits, got {}",
            n_points * k,
            bits.len()
        )));
    }
    let weights = enc.weights();
    Ok(bits
        .chunks(k)
        .map(|chunk| {
            chunk
                .iter()
                .zip(&weights)
                .filter(|(b, _)| **b)
                .map(|(_, w)| w)
                .sum()
        })
        .collect())
}

/// Ising model over spins `s_i in {-1, +1}`:
/// `offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IsingProblem {
    num_spins: usize,
    fields: BTreeMap<usize, f64>,
    couplings: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingProblem {
    pub fn new(num_spins: usize) -> Self {
        IsingProblem {
            num_spins,
            ..Default::default()
        }
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn field(&self, i: usize) -> f64 {
        self.fields.get(&i).copied().unwrap_or(0.0)
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.couplings.get(&key).copied().unwrap_or(0.0)
    }

    pub fn fields(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.fields.iter().map(|(&i, &c)| (i, c))
    }

    pub fn couplings(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.couplings.iter().map(|(&k, &c)| (k, c))
    }

    pub fn add_field(&mut self, i: usize, h: f64) -> Result<()> {
        if i >= self.num_spins {
            return Err(Error::invalid(format!("spin {i} out of range")));
        }
        accumulate(&mut self.fields, i, h);
        Ok(())
    }

    pub fn add_coupling(&mut self, i: usize, j: usize, coupling: f64) -> Result<()> {
        if i >= self.num_spins || j >= self.num_spins || i == j {
            return Err(Error::invalid(format!("invalid coupling ({i}, {j})")));
        }
        accumulate(&mut self.couplings, (i.min(j), i.max(j)), coupling);
        Ok(())
    }

    /// Spins must be `+1` or `-1`.
    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.num_spins {
            return Err(Error::invalid(format!(
                "assignment has {} spins, problem has {}",
                spins.len(),
                self.num_spins
            )));
        }
        if let Some(bad) = spins.iter().find(|s| s.abs() != 1) {
            return Err(Error::invalid(format!("spin value {bad} is not +1 or -1")));
        }
        let mut e = self.offset;
        for (&i, &h) in &self.fields {
            e += h * f64::from(spins[i]);
        }
        for (&(i, j), &c) in &self.couplings {
            e += c * f64::from(spins[i] * spins[j]);
        }
        Ok(e)
    }
}

/// Bit `a` maps to spin `2a - 1`.
pub fn bits_to_spins(bits: &[bool]) -> Vec<i8> {
    bits.iter().map(|&b| if b { 1 } else { -1 }).collect()
}

pub fn spins_to_bits(spins: &[i8]) -> Vec<bool> {
    spins.iter().map(|&s| s > 0).collect()
}

/// Substitutes `a_i = (1 + s_i) / 2`; energies agree on every assignment.
pub fn qubo_to_ising(q: &QuboProblem) -> IsingProblem {
    let mut ising = IsingProblem::new(q.num_vars);
    let mut offset = q.offset;
    let mut fields = vec![0.0; q.num_vars];
    for (&i, &c) in &q.linear {
        fields[i] += 0.5 * c;
        offset += 0.5 * c;
    }
    for (&(i, j), &c) in &q.quadratic {
        let quarter = 0.25 * c;
        insert_nonzero(&mut ising.couplings, (i, j), quarter);
        fields[i] += quarter;
        fields[j] += quarter;
        offset += quarter;
    }
    for (i, h) in fields.into_iter().enumerate() {
        insert_nonzero(&mut ising.fields, i, h);
    }
    ising.offset = offset;
    ising
}

/// Substitutes `s_i = 2 a_i - 1`.
pub fn ising_to_qubo(ising: &IsingProblem) -> QuboProblem {
    let mut q = QuboProblem::new(ising.num_spins);
    let mut offset = ising.offset;
    let mut linear = vec![0.0; ising.num_spins];
    for (&i, &h) in &ising.fields {
        linear[i] += 2.0 * h;
        offset -= h;
    }
    for (&(i, j), &c) in &ising.couplings {
        insert_nonzero(&mut q.quadratic, (i, j), 4.0 * c);
        linear[i] -= 2.0 * c;
        linear[j] -= 2.0 * c;
        offset += c;
    }
    for (i, c) in linear.into_iter().enumerate() {
        insert_nonzero(&mut q.linear, i, c);
    }
    q.offset = offset;
    q
}

/// Text format: `# qubo <n>`, `# offset <v>`, then `i j coeff` lines where
/// `i == j` is a linear term.
pub fn write_qubo<W: Write>(q: &QuboProblem, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# qubo {}", q.num_vars)?;
    writeln!(w, "# offset {}", q.offset)?;
    let mut lin = q.linear.iter().peekable();
    let mut quad = q.quadratic.iter().peekable();
    // merge so rows come out sorted by (i, j)
    loop {
        let take_linear = match (lin.peek(), quad.peek()) {
            (Some((&i, _)), Some((&(qi, _), _))) => i <= qi,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        if take_linear {
            let (i, c) = lin.next().unwrap();
            writeln!(w, "{i} {i} {c}")?;
        } else {
            let ((i, j), c) = quad.next().unwrap();
            writeln!(w, "{i} {j} {c}")?;
        }
    }
    w.flush()
}

pub fn read_qubo<R: BufRead>(r: R) -> Result<QuboProblem> {
    let mut problem: Option<QuboProblem> = None;
    let mut offset = 0.0;
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(directive) = line.strip_prefix('#') {
            let mut parts = directive.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some("qubo"), Some(n), None) => {
                    if problem.is_some() {
                        return Err(Error::parse(lineno, "duplicate '# qubo' header"));
                    }
                    let n = n
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("bad variable count '{n}'")))?;
                    problem = Some(QuboProblem::new(n));
                }
                (Some("offset"), Some(v), None) => {
                    offset = parse_coeff(v, lineno)?;
                }
                // free-form comment
                _ => {}
            }
            continue;
        }
        let q = problem
            .as_mut()
            .ok_or_else(|| Error::parse(lineno, "term before '# qubo <n>' header"))?;
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(Error::parse(lineno, format!("expected 'i j coeff', found '{line}'")));
        }
        let index = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::parse(lineno, format!("bad index '{s}'")))
        };
        let (i, j) = (index(cols[0])?, index(cols[1])?);
        let c = parse_coeff(cols[2], lineno)?;
        q.add_term(i, j, c)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    let mut q = problem.ok_or_else(|| Error::parse(1, "missing '# qubo <n>' header"))?;
    q.offset = offset;
    Ok(q)
}

fn parse_coeff(s: &str, lineno: usize) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::parse(lineno, format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(lineno, format!("'{s}' is not finite")));
    }
    Ok(v)
}

pub fn save_qubo(q: &QuboProblem, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_qubo(q, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_qubo(path: impl AsRef<Path>) -> Result<QuboProblem> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_qubo(BufReader::new(file))
}
