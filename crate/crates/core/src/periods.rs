//! Gaussian periods and cyclic supercharacters.
//!
//! `η_{n,ω}(k) = Σ_{j<d} e(ω^j k / n)` where `d` is the order of `ω` mod `n`,
//! and its matrix analogue `θ_{n,m,A}(x) = Σ_{j<d} e((A^j 1)·x / n)` on
//! `(Z/nZ)^m`. Whole plots are computed by walking orbits: `η` is constant on
//! `⟨ω⟩`-orbits and `θ` on `⟨Aᵀ⟩`-orbits, so each value is a sum over one orbit.

use std::io::{self, Write};

use num_complex::Complex64;
use smallvec::SmallVec;
use thiserror::Error;

use crate::modring::{mat_order, mul_mod, mul_order, ModringError, MatrixModN, Residue};
use crate::numeric::{unit_root, ComplexSum};

/// Default cap on `n^m` for supercharacter plots.
pub const SUPERCHAR_BUDGET: u64 = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeriodsError {
    #[error(transparent)]
    Modring(#[from] ModringError),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("color modulus must be at least 1")]
    BadColorModulus,
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("plot needs {required} evaluations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
}

pub type Result<T> = std::result::Result<T, PeriodsError>;

/// One plotted value.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotPoint {
    /// `k` for Gaussian periods, `x` for supercharacters, `(a, b)` for torsion points.
    pub index: SmallVec<[u64; 2]>,
    pub value: Complex64,
    pub color: u64,
    pub size: f64,
}

impl PlotPoint {
    pub fn new(index: &[u64], value: Complex64, color: u64) -> Self {
        Self {
            index: SmallVec::from_slice(index),
            value,
            color,
            size: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodSpec {
    n: u64,
    omega: Residue,
    d: u64,
    color_modulus: u64,
}

impl PeriodSpec {
    pub fn new(n: u64, omega: u64, color_modulus: u64) -> Result<Self> {
        if n < 2 {
            return Err(PeriodsError::BadModulus(n));
        }
        if color_modulus == 0 {
            return Err(PeriodsError::BadColorModulus);
        }
        let omega = Residue::new(omega, n)?;
        let d = mul_order(omega)?;
        Ok(Self {
            n,
            omega,
            d,
            color_modulus,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn omega(&self) -> u64 {
        self.omega.value()
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn color_modulus(&self) -> u64 {
        self.color_modulus
    }
}

/// `η_{n,ω}(k)` by direct summation over `j < d`.
pub fn gaussian_period(spec: &PeriodSpec, k: u64) -> Complex64 {
    let n = spec.n;
    let w = spec.omega.value();
    let mut t = k % n;
    let mut acc = ComplexSum::new();
    for _ in 0..spec.d {
        acc.add(unit_root(t, n));
        t = mul_mod(t, w, n);
    }
    acc.value()
}

// Sum of e(label(y)/n) over the orbit of `start`, with the orbit's members.
fn orbit_sum(
    start: usize,
    step: impl Fn(usize) -> usize,
    label: impl Fn(usize) -> u64,
    n: u64,
    members: &mut Vec<usize>,
) -> Complex64 {
    members.clear();
    let mut acc = ComplexSum::new();
    let mut y = start;
    loop {
        members.push(y);
        acc.add(unit_root(label(y), n));
        y = step(y);
        if y == start {
            break;
        }
    }
    acc.value()
}

/// `η(k)` for every `k < n` in index order.
pub fn gaussian_values(spec: &PeriodSpec) -> Vec<Complex64> {
    let n = spec.n;
    let w = spec.omega.value();
    let mut values = vec![Complex64::new(0.0, 0.0); n as usize];
    let mut seen = vec![false; n as usize];
    let mut members = Vec::new();
    for k in 0..n as usize {
        if seen[k] {
            continue;
        }
        let s = orbit_sum(
            k,
            |y| mul_mod(y as u64, w, n) as usize,
            |y| y as u64,
            n,
            &mut members,
        );
        let v = s * (spec.d as f64 / members.len() as f64);
        for &y in &members {
            seen[y] = true;
            values[y] = v;
        }
    }
    values
}

/// The Gaussian period plot: `n` points, `k = 0..n`, colored by `k mod c`.
pub fn gaussian_plot(spec: &PeriodSpec) -> Vec<PlotPoint> {
    gaussian_values(spec)
        .into_iter()
        .enumerate()
        .map(|(k, v)| PlotPoint::new(&[k as u64], v, k as u64 % spec.color_modulus))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupercharSpec {
    a: MatrixModN,
    d: u64,
    /// `weights[j] = A^j·1`.
    weights: Vec<Vec<u64>>,
    color_modulus: u64,
}

impl SupercharSpec {
    pub fn new(a: MatrixModN, color_modulus: u64) -> Result<Self> {
        if color_modulus == 0 {
            return Err(PeriodsError::BadColorModulus);
        }
        let d = mat_order(&a)?;
        let mut weights = Vec::with_capacity(d as usize);
        let mut w = vec![1u64; a.dim()];
        for _ in 0..d {
            let next = a.mul_vec(&w);
            weights.push(std::mem::replace(&mut w, next));
        }
        Ok(Self {
            a,
            d,
            weights,
            color_modulus,
        })
    }

    pub fn n(&self) -> u64 {
        self.a.modulus()
    }

    pub fn m(&self) -> usize {
        self.a.dim()
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn matrix(&self) -> &MatrixModN {
        &self.a
    }

    pub fn weights(&self) -> &[Vec<u64>] {
        &self.weights
    }

    pub fn color_modulus(&self) -> u64 {
        self.color_modulus
    }
}

/// `θ(x) = Σ_j e((w^j·x mod n)/n)`.
pub fn supercharacter_value(spec: &SupercharSpec, x: &[u64]) -> Result<Complex64> {
    if x.len() != spec.m() {
        return Err(PeriodsError::DimensionMismatch {
            expected: spec.m(),
            got: x.len(),
        });
    }
    let n = spec.n();
    let mut acc = ComplexSum::new();
    for w in &spec.weights {
        let dot: u128 = w.iter().zip(x).map(|(&a, &b)| a as u128 * b as u128).sum();
        acc.add(unit_root((dot % n as u128) as u64, n));
    }
    Ok(acc.value())
}

fn unflatten(mut flat: u64, n: u64, m: usize, out: &mut [u64]) {
    for slot in out[..m].iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

fn flatten(x: &[u64], n: u64) -> u64 {
    x.iter().fold(0, |acc, &v| acc * n + v)
}

/// `θ(x)` for all `x ∈ (Z/nZ)^m` in row-major order.
pub fn supercharacter_values(spec: &SupercharSpec, budget: u64) -> Result<Vec<Complex64>> {
    let n = spec.n();
    let m = spec.m();
    let required = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(PeriodsError::BudgetExceeded { required, budget });
    }
    let total = required as usize;
    let at = spec.a.transpose();
    let mut values = vec![Complex64::new(0.0, 0.0); total];
    let mut seen = vec![false; total];
    let mut members = Vec::new();
    let step = |y: usize| {
        let mut x: SmallVec<[u64; 8]> = SmallVec::from_elem(0, m);
        unflatten(y as u64, n, m, &mut x);
        flatten(&at.mul_vec(&x), n) as usize
    };
    let label = |y: usize| {
        let mut x: SmallVec<[u64; 8]> = SmallVec::from_elem(0, m);
        unflatten(y as u64, n, m, &mut x);
        (x.iter().map(|&v| v as u128).sum::<u128>() % n as u128) as u64
    };
    for k in 0..total {
        if seen[k] {
            continue;
        }
        let s = orbit_sum(k, step, label, n, &mut members);
        let v = s * (spec.d as f64 / members.len() as f64);
        for &y in &members {
            seen[y] = true;
            values[y] = v;
        }
    }
    Ok(values)
}

/// The supercharacter plot: `n^m` points colored by `x₁ mod c`.
pub fn supercharacter_plot(spec: &SupercharSpec, budget: u64) -> Result<Vec<PlotPoint>> {
    let n = spec.n();
    let m = spec.m();
    let values = supercharacter_values(spec, budget)?;
    let mut x = vec![0u64; m];
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(flat, v)| {
            unflatten(flat as u64, n, m, &mut x);
            PlotPoint::new(&x, v, x[0] % spec.color_modulus)
        })
        .collect())
}

/// Half-open index ranges of size `chunk` covering `0..n_points`.
pub fn frame_batches(n_points: usize, chunk: usize) -> Vec<(usize, usize)> {
    assert!(chunk >= 1, "frame size must be positive");
    (0..n_points.div_ceil(chunk))
        .map(|e| (e * chunk, ((e + 1) * chunk).min(n_points)))
        .collect()
}

/// CSV header for points indexed by vectors of length `m`.
pub fn csv_header(m: usize) -> String {
    if m == 1 {
        "index,re,im,color".to_string()
    } else {
        let mut cols: Vec<String> = (0..m).map(|i| format!("i{i}")).collect();
        cols.extend(["re", "im", "color"].map(String::from));
        cols.join(",")
    }
}

/// Write points as CSV, values with 17 significant digits.
pub fn write_csv<W: Write>(out: W, points: &[PlotPoint], m: usize) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    writeln!(out, "{}", csv_header(m))?;
    for p in points {
        for i in &p.index {
            write!(out, "{i},")?;
        }
        writeln!(out, "{:.16e},{:.16e},{}", p.value.re, p.value.im, p.color)?;
    }
    out.flush()
}
