//! Cyclotomic polynomials and the Laurent envelopes they define.
//!
//! Writing `x^k ≡ Σ_j c_{jk} x^j` modulo a monic divisor `μ` of `x^d − 1`
//! gives the Laurent polynomial `g(z) = Σ_k ∏_j z_{j+1}^{c_{jk}}` on the torus
//! `T^{deg μ}`. With `μ = Φ_d` its image contains every Gaussian period of
//! order `d`, and for prime `d` that image is the filled `d`-hypocycloid.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::modring::is_prime;
use crate::numeric::{cis_turns, ComplexSum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaurentError {
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("polynomial does not divide x^{0} - 1")]
    NotADivisor(u64),
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {index} has modulus {modulus}, not 1")]
    NotOnTorus { index: usize, modulus: f64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
}

pub type Result<T> = std::result::Result<T, LaurentError>;

/// Integer polynomial with coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `x^k − 1`.
    pub fn x_pow_minus_one(k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[0] -= 1;
        c[k] += 1;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn eval(&self, x: i64) -> i64 {
        self.coeffs.iter().rev().fold(0i64, |acc, &c| {
            acc.checked_mul(x)
                .and_then(|v| v.checked_add(c))
                .expect("polynomial evaluation overflow")
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = a
                    .checked_mul(b)
                    .and_then(|t| out[i + j].checked_add(t))
                    .expect("polynomial product overflow");
            }
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[i64], i: usize| v.get(i).copied().unwrap_or(0);
        Self::new(
            (0..len)
                .map(|i| get(&self.coeffs, i) - get(&other.coeffs, i))
                .collect(),
        )
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, divisor: &Self) -> Result<(Self, Self)> {
        if !divisor.is_monic() {
            return Err(LaurentError::NotMonic);
        }
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0i64; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let lead = rem[i + dd];
            if lead == 0 {
                continue;
            }
            quot[i] = lead;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = c
                    .checked_mul(lead)
                    .and_then(|t| rem[i + j].checked_sub(t))
                    .expect("polynomial division overflow");
            }
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }
}

fn divisors(d: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1;
    while k * k <= d {
        if d % k == 0 {
            small.push(k);
            if k * k != d {
                large.push(d / k);
            }
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The `d`-th cyclotomic polynomial, `Φ_d = (x^d − 1) / ∏_{k | d, k < d} Φ_k`.
pub fn cyclotomic(d: u64) -> IntPolynomial {
    assert!(d >= 1, "cyclotomic: d must be positive");
    let divs = divisors(d);
    let mut known: Vec<(u64, IntPolynomial)> = Vec::with_capacity(divs.len());
    for &k in &divs {
        let mut p = IntPolynomial::x_pow_minus_one(k as usize);
        for (j, phi) in &known {
            if k % j == 0 {
                let (q, r) = p.div_rem_monic(phi).expect("cyclotomic factors are monic");
                debug_assert!(r.is_zero());
                p = q;
            }
        }
        known.push((k, p));
    }
    known.pop().expect("d has at least one divisor").1
}

/// Exponent table of `x^k mod μ` for `k = 0..d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTable {
    d: u64,
    degree: usize,
    /// `columns[k][j] = c_{jk}`.
    columns: Vec<Vec<i64>>,
}

impl ReductionTable {
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn column(&self, k: usize) -> &[i64] {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    /// Table for `g_d` itself, reducing modulo `Φ_d`.
    pub fn for_cyclotomic(d: u64) -> Self {
        reduction_table(&cyclotomic(d), d).expect("Φ_d divides x^d - 1")
    }
}

/// Reduce `x^k` modulo `poly` for every `k < d`.
pub fn reduction_table(poly: &IntPolynomial, d: u64) -> Result<ReductionTable> {
    if !poly.is_monic() || poly.degree() == Some(0) {
        return Err(LaurentError::NotMonic);
    }
    let (_, rem) = IntPolynomial::x_pow_minus_one(d as usize).div_rem_monic(poly)?;
    if !rem.is_zero() {
        return Err(LaurentError::NotADivisor(d));
    }
    let s = poly.degree().expect("monic polynomial is nonzero");
    let p = poly.coeffs();
    let mut columns = Vec::with_capacity(d as usize);
    let mut cur = vec![0i64; s];
    cur[0] = 1;
    for _ in 0..d {
        columns.push(cur.clone());
        // multiply by x and fold the overflow term back with x^s = −Σ p_j x^j
        let top = cur[s - 1];
        for j in (1..s).rev() {
            cur[j] = cur[j - 1] - top * p[j];
        }
        cur[0] = -top * p[0];
    }
    Ok(ReductionTable {
        d,
        degree: s,
        columns,
    })
}

/// A point of the torus `T^s`, stored by its phases in turns.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    coordinates: Vec<Complex64>,
    turns: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coordinates: Vec<Complex64>) -> Result<Self> {
        for (index, z) in coordinates.iter().enumerate() {
            let modulus = z.norm();
            if (modulus - 1.0).abs() > 1e-12 {
                return Err(LaurentError::NotOnTorus { index, modulus });
            }
        }
        let turns = coordinates.iter().map(|z| z.arg() / TAU).collect();
        Ok(Self { coordinates, turns })
    }

    /// `z_j = e(t_j)`.
    pub fn from_turns(turns: Vec<f64>) -> Self {
        let coordinates = turns.iter().map(|&t| cis_turns(t)).collect();
        Self { coordinates, turns }
    }

    pub fn coordinates(&self) -> &[Complex64] {
        &self.coordinates
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }
}

fn eval_turns(table: &ReductionTable, turns: &[f64]) -> Complex64 {
    table
        .columns
        .iter()
        .map(|col| {
            let phase: f64 = col.iter().zip(turns).map(|(&c, &t)| c as f64 * t).sum();
            cis_turns(phase)
        })
        .collect::<ComplexSum>()
        .value()
}

/// `g(z) = Σ_k ∏_j z_{j+1}^{c_{jk}}`.
pub fn eval_g(table: &ReductionTable, z: &TorusPoint) -> Result<Complex64> {
    if z.len() != table.degree {
        return Err(LaurentError::DimensionMismatch {
            expected: table.degree,
            got: z.len(),
        });
    }
    Ok(eval_turns(table, &z.turns))
}

/// Evaluate `g` on a `samples_per_axis^s` torus grid, each grid phase jittered
/// uniformly within its cell. Points come out in row-major grid order.
pub fn sample_image(table: &ReductionTable, samples_per_axis: usize, seed: u64) -> Vec<Complex64> {
    let s = table.degree;
    let spa = samples_per_axis.max(1);
    let total = spa.checked_pow(s as u32).expect("sample grid too large");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = vec![0usize; s];
    let mut turns = vec![0.0; s];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        for j in 0..s {
            turns[j] = (idx[j] as f64 + rng.gen::<f64>()) / spa as f64;
        }
        out.push(eval_turns(table, &turns));
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < spa {
                break;
            }
            *slot = 0;
        }
    }
    out
}

/// `(q−1)e^{iθ} + e^{−i(q−1)θ}`, the boundary of the `q`-cusped hypocycloid.
pub fn hypocycloid_boundary(q: u64, theta: f64) -> Complex64 {
    let k = (q as f64) - 1.0;
    Complex64::from_polar(k, theta) + Complex64::from_polar(1.0, -k * theta)
}

const BOUNDARY_SEGMENTS: usize = 10_000;
const ANGLE_BINS: usize = 4096;

/// The closed region bounded by a `q`-cusped hypocycloid.
///
/// `q = 1` degenerates to the point `{1}` and `q = 2` to the segment
/// `[−2, 2]`. For `q ≥ 3` the boundary is approximated by a polygon and
/// membership is decided along the ray from the origin, which works because
/// the region is star-shaped about `0`.
#[derive(Clone, Debug)]
pub struct FilledHypocycloid {
    q: u64,
    vertices: Vec<Complex64>,
    bins: Vec<Vec<u32>>,
}

fn angle_bin(phi: f64) -> usize {
    let t = (phi + PI) / TAU;
    ((t * ANGLE_BINS as f64) as usize).min(ANGLE_BINS - 1)
}

impl FilledHypocycloid {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1, "hypocycloid needs at least one cusp");
        if q < 3 {
            return Self {
                q,
                vertices: Vec::new(),
                bins: Vec::new(),
            };
        }
        let vertices: Vec<Complex64> = (0..BOUNDARY_SEGMENTS)
            .map(|i| hypocycloid_boundary(q, TAU * i as f64 / BOUNDARY_SEGMENTS as f64))
            .collect();
        let mut bins = vec![Vec::new(); ANGLE_BINS];
        for i in 0..BOUNDARY_SEGMENTS {
            let a = vertices[i];
            let b = vertices[(i + 1) % BOUNDARY_SEGMENTS];
            let (mut lo, mut hi) = (angle_bin(a.arg()), angle_bin(b.arg()));
            if lo > hi {
                (lo, hi) = (hi, lo);
            }
            if hi - lo > ANGLE_BINS / 2 {
                // segment straddles the branch cut of arg
                for bin in (hi..ANGLE_BINS).chain(0..=lo) {
                    bins[bin].push(i as u32);
                }
            } else {
                for bin in lo..=hi {
                    bins[bin].push(i as u32);
                }
            }
        }
        Self { q, vertices, bins }
    }

    pub fn cusps(&self) -> u64 {
        self.q
    }

    /// Distance from the origin to the boundary in the direction of `h`.
    fn boundary_radius(&self, h: Complex64) -> f64 {
        let u = h / h.norm();
        let mut best: f64 = 0.0;
        for &i in &self.bins[angle_bin(h.arg())] {
            let i = i as usize;
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % BOUNDARY_SEGMENTS];
            let e = b - a;
            // t·u = a + s·e
            let den = e.re * u.im - e.im * u.re;
            if den.abs() < 1e-300 {
                continue;
            }
            let s = (a.im * u.re - a.re * u.im) / den;
            if (-1e-9..=1.0 + 1e-9).contains(&s) {
                let t = (a + e * s).re * u.re + (a + e * s).im * u.im;
                best = best.max(t);
            }
        }
        best
    }

    /// Membership with every boundary distance inflated by `tol`.
    pub fn contains(&self, h: Complex64, tol: f64) -> bool {
        match self.q {
            1 => (h - Complex64::new(1.0, 0.0)).norm() <= tol,
            2 => h.im.abs() <= tol && h.re.abs() <= 2.0 + tol,
            q => {
                let r = h.norm();
                if r <= (q - 2) as f64 + tol {
                    true
                } else if r > q as f64 + tol {
                    false
                } else {
                    r <= self.boundary_radius(h) + tol
                }
            }
        }
    }
}

/// Reusable form of [`hypocycloid_decompose`] for one prime `d`.
#[derive(Clone, Debug)]
pub struct HypocycloidDecomposer {
    d: u64,
    region: FilledHypocycloid,
    tol: f64,
}

impl HypocycloidDecomposer {
    pub fn new(d: u64, tol: f64) -> Result<Self> {
        if !is_prime(d) {
            return Err(LaurentError::NotPrime(d));
        }
        Ok(Self {
            d,
            region: FilledHypocycloid::new(d - 1),
            tol,
        })
    }

    /// `h = (η − e(k/n))·e(k/((d−1)n))` and whether `h ∈ H_{d−1}`.
    pub fn decompose(&self, eta: Complex64, n: u64, k: u64) -> (Complex64, bool) {
        let k = k % n;
        let base = crate::numeric::unit_root(k, n);
        let rot = cis_turns(k as f64 / ((self.d - 1) as f64 * n as f64));
        let h = (eta - base) * rot;
        (h, self.region.contains(h, self.tol))
    }
}

/// Split a Gaussian period of prime order `d` as `e(k/n) + h·e(−k/((d−1)n))`
/// and test `h` against the filled `(d−1)`-hypocycloid.
pub fn hypocycloid_decompose(eta: Complex64, n: u64, k: u64, d: u64, tol: f64) -> Result<(Complex64, bool)> {
    Ok(HypocycloidDecomposer::new(d, tol)?.decompose(eta, n, k))
}
