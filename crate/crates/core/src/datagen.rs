//! Synthetic two-class problems on the unit square, label noise, and the
//! `x1,x2,label` text format.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in feature space.
pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Positive,
    Negative,
}

impl From<Label> for i8 {
    fn from(label: Label) -> i8 {
        label.as_int()
    }
}

impl TryFrom<i8> for Label {
    type Error = String;

    fn try_from(value: i8) -> std::result::Result<Self, String> {
        Label::from_int(value.into()).ok_or_else(|| format!("label {value} is not 1 or -1"))
    }
}

impl Label {
    pub fn from_sign(value: f64) -> Label {
        // sign(0) maps to +1
        if value >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn from_int(value: i64) -> Option<Label> {
        match value {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn as_int(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x1: f64,
    pub x2: f64,
    pub label: Label,
}

impl LabeledPoint {
    pub fn new(x1: f64, x2: f64, label: Label) -> Self {
        LabeledPoint { x1, x2, label }
    }

    pub fn point(&self) -> Point {
        [self.x1, self.x2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemKind {
    /// Diagonal line `x2 = x1`.
    LinearSep,
    /// Sine wave `x2 = 0.5 + 0.3 sin(3 pi x1)`.
    NonLinear1,
    /// Disc of radius 0.35 centred at (0.5, 0.5); the inside is the positive class.
    NonLinear2,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::LinearSep,
        ProblemKind::NonLinear1,
        ProblemKind::NonLinear2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::LinearSep => "linear",
            ProblemKind::NonLinear1 => "nonlinear1",
            ProblemKind::NonLinear2 => "nonlinear2",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(ProblemKind::LinearSep),
            "nonlinear1" => Ok(ProblemKind::NonLinear1),
            "nonlinear2" => Ok(ProblemKind::NonLinear2),
            other => Err(Error::invalid(format!(
                "unknown problem '{other}' (expected linear, nonlinear1 or nonlinear2)"
            ))),
        }
    }
}

const DISC_CENTER: f64 = 0.5;
const DISC_RADIUS: f64 = 0.35;

/// The `x2` threshold of the class boundary at `x1`.
///
/// Returns `None` for [`ProblemKind::NonLinear2`], whose boundary is a closed
/// curve and is only available through [`boundary_margin`].
pub fn boundary(kind: ProblemKind, x1: f64) -> Option<f64> {
    match kind {
        ProblemKind::LinearSep => Some(x1),
        ProblemKind::NonLinear1 => Some(0.5 + 0.3 * (3.0 * std::f64::consts::PI * x1).sin()),
        ProblemKind::NonLinear2 => None,
    }
}

/// Signed boundary test: strictly positive on the `+1` side, zero on the
/// boundary, negative on the `-1` side.
pub fn boundary_margin(kind: ProblemKind, x1: f64, x2: f64) -> f64 {
    match boundary(kind, x1) {
        Some(threshold) => x2 - threshold,
        None => {
            let dx = x1 - DISC_CENTER;
            let dy = x2 - DISC_CENTER;
            DISC_RADIUS * DISC_RADIUS - (dx * dx + dy * dy)
        }
    }
}

/// Ground-truth label. Points exactly on the boundary are `-1`.
pub fn true_label(kind: ProblemKind, x1: f64, x2: f64) -> Label {
    if boundary_margin(kind, x1, x2) > 0.0 {
        Label::Positive
    } else {
        Label::Negative
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<LabeledPoint>,
    /// Generator provenance; `None` for datasets read from disk.
    pub kind: Option<ProblemKind>,
    pub noise_rate: f64,
    pub seed: Option<u64>,
}

impl Dataset {
    pub fn from_points(points: Vec<LabeledPoint>) -> Self {
        Dataset {
            points,
            kind: None,
            noise_rate: 0.0,
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn features(&self) -> Vec<Point> {
        self.points.iter().map(LabeledPoint::point).collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.points.iter().map(|p| p.label).collect()
    }

    pub fn has_both_labels(&self) -> bool {
        let pos = self.points.iter().any(|p| p.label == Label::Positive);
        let neg = self.points.iter().any(|p| p.label == Label::Negative);
        pos && neg
    }
}

/// Samples `n` points uniformly on `[0,1]^2` and labels them by the problem's
/// boundary.
pub fn generate_dataset(kind: ProblemKind, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("dataset size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let x1: f64 = rng.random();
            let x2: f64 = rng.random();
            LabeledPoint::new(x1, x2, true_label(kind, x1, x2))
        })
        .collect();
    Ok(Dataset {
        points,
        kind: Some(kind),
        noise_rate: 0.0,
        seed: Some(seed),
    })
}

/// Number of labels [`apply_label_noise`] flips for a dataset of `n` points.
pub fn noise_count(rate: f64, n: usize) -> usize {
    // the epsilon keeps products like 0.29 * 100 from flooring to 28
    ((rate * n as f64) + 1e-9).floor() as usize
}

/// Negates the labels of exactly `floor(rate * n)` distinct points chosen
/// uniformly without replacement.
pub fn apply_label_noise(d: &Dataset, rate: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid(format!(
            "noise rate {rate} is outside [0, 1]"
        )));
    }
    let mut out = d.clone();
    out.noise_rate = rate;
    let flips = noise_count(rate, d.len()).min(d.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in index::sample(&mut rng, d.len(), flips) {
        out.points[i].label = out.points[i].label.flipped();
    }
    Ok(out)
}

pub const DATASET_HEADER: &str = "x1,x2,label";

pub fn write_dataset<W: Write>(d: &Dataset, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{DATASET_HEADER}")?;
    for p in &d.points {
        // `{}` on f64 prints the shortest string that parses back exactly
        writeln!(w, "{},{},{}", p.x1, p.x2, p.label.as_int())?;
    }
    w.flush()
}

pub fn read_dataset<R: BufRead>(r: R) -> Result<Dataset> {
    let mut points = Vec::new();
    let mut saw_header = false;
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != DATASET_HEADER {
                return Err(Error::parse(
                    lineno,
                    format!("expected header '{DATASET_HEADER}', found '{line}'"),
                ));
            }
            saw_header = true;
            continue;
        }
        points.push(parse_row(line, lineno)?);
    }
    if !saw_header {
        return Err(Error::parse(1, "missing header"));
    }
    Ok(Dataset::from_points(points))
}

fn parse_row(line: &str, lineno: usize) -> Result<LabeledPoint> {
    let cols: Vec<&str> = line.split(',').map(str::trim).collect();
    if cols.len() != 3 {
        return Err(Error::parse(
            lineno,
            format!("expected 3 columns, found {}", cols.len()),
        ));
    }
    let coord = |s: &str| -> Result<f64> {
        let v: f64 = s
            .parse()
            .map_err(|_| Error::parse(lineno, format!("'{s}' is not a number")))?;
        if !v.is_finite() {
            return Err(Error::parse(lineno, format!("'{s}' is not finite")));
        }
        Ok(v)
    };
    let x1 = coord(cols[0])?;
    let x2 = coord(cols[1])?;
    let label = cols[2]
        .parse::<i64>()
        .ok()
        .and_then(Label::from_int)
        .ok_or_else(|| Error::parse(lineno, format!("label '{}' is not 1 or -1", cols[2])))?;
    Ok(LabeledPoint::new(x1, x2, label))
}

pub fn save_dataset(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(d, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(BufReader::new(file))
}
