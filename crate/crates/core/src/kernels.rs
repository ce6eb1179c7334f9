use serde::{Deserialize, Serialize};

use crate::datagen::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `exp(-gamma * |a - b|^2)`
    Rbf { gamma: f64 },
    Linear,
}

impl KernelSpec {
    pub fn rbf(gamma: f64) -> Self {
        KernelSpec::Rbf { gamma }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } if !(gamma.is_finite() && gamma >= 0.0) => Err(
                Error::invalid(format!("rbf gamma must be finite and >= 0, got {gamma}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, a: &Point, b: &Point) -> f64 {
        kernel_eval(*self, a, b)
    }
}

pub fn kernel_eval(spec: KernelSpec, a: &Point, b: &Point) -> f64 {
    match spec {
        KernelSpec::Rbf { gamma } => {
            let d0 = a[0] - b[0];
            let d1 = a[1] - b[1];
            (-gamma * (d0 * d0 + d1 * d1)).exp()
        }
        KernelSpec::Linear => a[0] * b[0] + a[1] * b[1],
    }
}

/// Dense symmetric Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Gram {
    n: usize,
    data: Vec<f64>,
}

impl Gram {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

pub fn gram_matrix(spec: KernelSpec, pts: &[Point]) -> Result<Gram> {
    if pts.is_empty() {
        return Err(Error::invalid("gram matrix needs at least one point"));
    }
    let n = pts.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel_eval(spec, &pts[i], &pts[j]);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    Ok(Gram { n, data })
}
