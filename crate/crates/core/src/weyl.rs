//! Weyl sums over the point sets `Λ_n` and a grid discrepancy estimator.
//!
//! For `A ∈ GL_m(Z/nZ)` and `v ∈ Z^s` put `f_v(x) = Σ_j v_j x^j` and
//! `α = f_v(A)·1`. Then `Σ_{x ∈ (Z/nZ)^m} e(Σ_j v_j (A^j 1)·x / n)` equals
//! `n^m` when `n` divides every `α_ℓ` and vanishes otherwise. The exact path
//! decides that divisibility in integers; the numeric path sums all `n^m` terms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::modring::{reduce_signed, ModringError, MatrixModN};
use crate::numeric::{unit_root, ComplexSum};

/// Default cap on `n^m` for brute-force sums and point sets.
pub const WEYL_BUDGET: u64 = 10_000_000;

/// Boxes sampled by [`discrepancy_estimate`] in dimension 3 and up.
pub const RANDOM_BOXES: usize = 100_000;

const CHUNK: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error(transparent)]
    Modring(#[from] ModringError),
    #[error("coefficient vector v must be nonzero")]
    ZeroVector,
    #[error("expected {expected} matrix entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integer overflow evaluating f_v(A) over Z")]
    Overflow,
    #[error("sum needs {required} terms, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("grid must be at least 2")]
    BadGrid,
}

pub type Result<T> = std::result::Result<T, WeylError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylInstance {
    lift: Vec<i64>,
    a: MatrixModN,
    v: Vec<i64>,
}

impl WeylInstance {
    /// `lift` is a row-major integer matrix whose reduction mod `n` is `A`.
    pub fn new(n: u64, m: usize, lift: &[i64], v: &[i64]) -> Result<Self> {
        if lift.len() != m * m {
            return Err(WeylError::DimensionMismatch {
                expected: m * m,
                got: lift.len(),
            });
        }
        if v.iter().all(|&c| c == 0) {
            return Err(WeylError::ZeroVector);
        }
        let a = MatrixModN::new(m, n, lift)?;
        if !a.det_unit() {
            return Err(ModringError::NotInvertible { modulus: n }.into());
        }
        Ok(Self {
            lift: lift.to_vec(),
            a,
            v: v.to_vec(),
        })
    }

    /// Uses the reduced entries in `[0, n)` as the integer lift.
    pub fn from_matrix(a: &MatrixModN, v: &[i64]) -> Result<Self> {
        let lift: Vec<i64> = a.entries().iter().map(|&x| x as i64).collect();
        Self::new(a.modulus(), a.dim(), &lift, v)
    }

    pub fn n(&self) -> u64 {
        self.a.modulus()
    }

    pub fn m(&self) -> usize {
        self.a.dim()
    }

    pub fn s(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &[i64] {
        &self.v
    }

    pub fn matrix(&self) -> &MatrixModN {
        &self.a
    }
}

/// `f_v(A)·1` over the integers, using the instance's integer lift of `A`.
pub fn alpha_vector(inst: &WeylInstance) -> Result<Vec<i128>> {
    let m = inst.m();
    let mut w = vec![1i128; m];
    let mut alpha = vec![0i128; m];
    for (j, &vj) in inst.v.iter().enumerate() {
        if j > 0 {
            let mut next = vec![0i128; m];
            for (r, slot) in next.iter_mut().enumerate() {
                for (c, &wc) in w.iter().enumerate() {
                    let t = (inst.lift[r * m + c] as i128)
                        .checked_mul(wc)
                        .ok_or(WeylError::Overflow)?;
                    *slot = slot.checked_add(t).ok_or(WeylError::Overflow)?;
                }
            }
            w = next;
        }
        for (a, &wl) in alpha.iter_mut().zip(&w) {
            let t = (vj as i128).checked_mul(wl).ok_or(WeylError::Overflow)?;
            *a = a.checked_add(t).ok_or(WeylError::Overflow)?;
        }
    }
    Ok(alpha)
}

/// `f_v(A)·1` reduced mod `n`.
fn alpha_mod(inst: &WeylInstance) -> Vec<u64> {
    let n = inst.n();
    let m = inst.m();
    let mut w = vec![1u64; m];
    let mut alpha = vec![0u64; m];
    for (j, &vj) in inst.v.iter().enumerate() {
        if j > 0 {
            w = inst.a.mul_vec(&w);
        }
        let c = reduce_signed(vj, n) as u128;
        for (a, &wl) in alpha.iter_mut().zip(&w) {
            *a = ((*a as u128 + c * wl as u128) % n as u128) as u64;
        }
    }
    alpha
}

/// `n^m` if `n | α_ℓ` for every `ℓ`, else `0`.
pub fn weyl_sum_exact(inst: &WeylInstance) -> u128 {
    if alpha_mod(inst).iter().all(|&a| a == 0) {
        (inst.n() as u128).pow(inst.m() as u32)
    } else {
        0
    }
}

fn domain_size(n: u64, m: usize, budget: u64) -> Result<usize> {
    let required = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(WeylError::BudgetExceeded { required, budget });
    }
    Ok(required as usize)
}

fn unflatten(mut flat: u64, n: u64, out: &mut [u64]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

/// `w^j = A^j·1 mod n` for `j < s`.
fn weights(a: &MatrixModN, s: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(s);
    let mut w = vec![1u64; a.dim()];
    for _ in 0..s {
        let next = a.mul_vec(&w);
        out.push(std::mem::replace(&mut w, next));
    }
    out
}

fn dot_mod(w: &[u64], x: &[u64], n: u64) -> u64 {
    (w.iter().zip(x).map(|(&a, &b)| a as u128 * b as u128).sum::<u128>() % n as u128) as u64
}

/// Brute-force `Σ_x e(Σ_j v_j (A^j 1)·x / n)` over all of `(Z/nZ)^m`.
///
/// Terms are summed in fixed chunks whose partial sums are combined in index
/// order, so the result does not depend on the number of worker threads.
pub fn weyl_sum_numeric(inst: &WeylInstance, budget: u64) -> Result<Complex64> {
    let n = inst.n();
    let m = inst.m();
    let total = domain_size(n, m, budget)?;
    let ws = weights(&inst.a, inst.s());
    let coeffs: Vec<u64> = inst.v.iter().map(|&c| reduce_signed(c, n)).collect();
    let partials: Vec<Complex64> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut x = vec![0u64; m];
            let mut acc = ComplexSum::new();
            for flat in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                unflatten(flat as u64, n, &mut x);
                let mut t = 0u128;
                for (w, &c) in ws.iter().zip(&coeffs) {
                    t += c as u128 * dot_mod(w, &x, n) as u128;
                }
                acc.add(unit_root((t % n as u128) as u64, n));
            }
            acc.value()
        })
        .collect();
    Ok(partials.into_iter().collect::<ComplexSum>().value())
}

/// Points of `[0,1)^s`, stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaSet {
    s: usize,
    n: u64,
    coords: Vec<f64>,
    // exact numerators t with coordinate t/n; empty for explicit point sets
    numerators: Vec<u64>,
}

impl LambdaSet {
    /// Build from explicit points; every coordinate must lie in `[0, 1)`.
    pub fn from_points(s: usize, points: &[Vec<f64>]) -> Self {
        let mut coords = Vec::with_capacity(s * points.len());
        for p in points {
            assert_eq!(p.len(), s, "point dimension mismatch");
            assert!(p.iter().all(|&c| (0.0..1.0).contains(&c)), "coordinate outside [0,1)");
            coords.extend_from_slice(p);
        }
        Self {
            s,
            n: 0,
            coords,
            numerators: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    /// Source modulus, `0` when built from explicit points.
    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        if self.s == 0 {
            0
        } else {
            self.coords.len() / self.s
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.s..(i + 1) * self.s]
    }

    /// Index of the grid cell `[c/g, (c+1)/g)` holding coordinate `k` of point `i`.
    fn cell(&self, i: usize, k: usize, g: usize) -> usize {
        let at = i * self.s + k;
        if self.numerators.is_empty() {
            ((self.coords[at] * g as f64) as usize).min(g - 1)
        } else {
            (self.numerators[at] as u128 * g as u128 / self.n as u128) as usize
        }
    }
}

/// `Λ_n = {((A^j 1)·x mod n)/n : j < s} for x ∈ (Z/nZ)^m`, row-major in `x`.
pub fn build_lambda(a: &MatrixModN, s: usize, budget: u64) -> Result<LambdaSet> {
    let n = a.modulus();
    let m = a.dim();
    let total = domain_size(n, m, budget)?;
    let ws = weights(a, s);
    let mut numerators = Vec::with_capacity(total * s);
    let mut x = vec![0u64; m];
    for flat in 0..total {
        unflatten(flat as u64, n, &mut x);
        for w in &ws {
            numerators.push(dot_mod(w, &x, n));
        }
    }
    let coords = numerators.iter().map(|&t| t as f64 / n as f64).collect();
    Ok(LambdaSet {
        s,
        n,
        coords,
        numerators,
    })
}

// Per-axis cell counts with an inclusive prefix-sum layout of (grid+1)^s.
struct PrefixCounts {
    g: usize,
    s: usize,
    sums: Vec<u32>,
}

impl PrefixCounts {
    fn new(set: &LambdaSet, g: usize) -> Self {
        let s = set.s;
        let side = g + 1;
        let mut sums = vec![0u32; side.pow(s as u32)];
        for i in 0..set.len() {
            let mut idx = 0;
            for k in 0..s {
                idx = idx * side + set.cell(i, k, g) + 1;
            }
            sums[idx] += 1;
        }
        let mut stride = 1;
        for _ in 0..s {
            for i in 0..sums.len() {
                if (i / stride) % side != 0 {
                    sums[i] += sums[i - stride];
                }
            }
            stride *= side;
        }
        Self { g, s, sums }
    }

    /// Points in the box `∏ [lo_i/g, hi_i/g)` by inclusion–exclusion.
    fn count(&self, lo: &[usize], hi: &[usize]) -> i64 {
        let side = self.g + 1;
        let mut total = 0i64;
        for mask in 0u32..(1 << self.s) {
            let mut idx = 0;
            for i in 0..self.s {
                let corner = if mask >> i & 1 == 1 { lo[i] } else { hi[i] };
                idx = idx * side + corner;
            }
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            total += sign * self.sums[idx] as i64;
        }
        total
    }
}

/// Largest `|#(P ∩ B)/N − vol(B)|` over boxes `B` with corners on the grid
/// `{0, 1/g, …, 1}^s`.
///
/// Every box is examined when `s ≤ 2`; in higher dimensions `RANDOM_BOXES`
/// boxes are drawn with a fixed seed. Either way the result is a lower bound
/// on the true discrepancy, and refining the grid from `g` to a multiple of
/// `g` can only raise it.
pub fn discrepancy_estimate(set: &LambdaSet, grid: usize) -> Result<f64> {
    if grid < 2 {
        return Err(WeylError::BadGrid);
    }
    if set.is_empty() {
        return Ok(0.0);
    }
    let s = set.s;
    let g = grid;
    let inv_n = 1.0 / set.len() as f64;
    let gf = g as f64;
    let cells = (g as u128 + 1).checked_pow(s as u32).unwrap_or(u128::MAX);
    let prefix = (cells <= 1 << 25).then(|| PrefixCounts::new(set, g));
    let count = |lo: &[usize], hi: &[usize]| -> i64 {
        match &prefix {
            Some(p) => p.count(lo, hi),
            None => (0..set.len())
                .filter(|&i| {
                    (0..s).all(|k| {
                        let cell = set.cell(i, k, g);
                        lo[k] <= cell && cell < hi[k]
                    })
                })
                .count() as i64,
        }
    };
    let gap = |lo: &[usize], hi: &[usize]| -> f64 {
        let vol: f64 = lo.iter().zip(hi).map(|(&a, &b)| (b - a) as f64 / gf).product();
        (count(lo, hi) as f64 * inv_n - vol).abs()
    };
    let mut best: f64 = 0.0;
    match s {
        1 => {
            for a in 0..g {
                for b in a + 1..=g {
                    best = best.max(gap(&[a], &[b]));
                }
            }
        }
        2 => {
            for a0 in 0..g {
                for b0 in a0 + 1..=g {
                    for a1 in 0..g {
                        for b1 in a1 + 1..=g {
                            best = best.max(gap(&[a0, a1], &[b0, b1]));
                        }
                    }
                }
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut lo = vec![0usize; s];
            let mut hi = vec![0usize; s];
            for _ in 0..RANDOM_BOXES {
                for k in 0..s {
                    let a = rng.gen_range(0..g);
                    lo[k] = a;
                    hi[k] = rng.gen_range(a + 1..=g);
                }
                best = best.max(gap(&lo, &hi));
            }
        }
    }
    Ok(best)
}
