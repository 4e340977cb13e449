//! Exact arithmetic modulo `n`.
//!
//! Residues and small square matrices over `Z/nZ`, multiplicative orders
//! computed from a factored multiple of the group exponent, integer
//! factorization for 64-bit moduli, and the search heuristics used to find
//! matrices of a prescribed order (optionally annihilated by `Φ_d`).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::laurent::{cyclotomic, IntPolynomial};

/// Candidate budget for [`find_matrix`].
pub const SEARCH_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModringError {
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
    #[error("matrix is not invertible modulo {modulus}")]
    NotInvertible { modulus: u64 },
    #[error("no matrix of order {order} found after {candidates} candidates")]
    NotFound { order: u64, candidates: u64 },
    #[error("no element of order {order} exists in GL_{dim}(Z/{modulus}Z): {reason}")]
    ImpossibleOrder {
        order: u64,
        dim: usize,
        modulus: u64,
        reason: String,
    },
    #[error("exponent a = {a} must satisfy 1 <= a <= e = {e}")]
    BadExponent { a: u32, e: u32 },
    #[error("invalid modulus {0}")]
    BadModulus(u64),
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, ModringError>;

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % n;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, n);
        }
        b = mul_mod(b, b, n);
        exp >>= 1;
    }
    result
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reduce a signed integer into `[0, n)`.
#[inline]
pub fn reduce_signed(x: i64, n: u64) -> u64 {
    (x as i128).rem_euclid(n as i128) as u64
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's cycle-finding variant of Pollard rho; `n` odd composite.
fn pollard_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut power = 1u64;
        let mut lam = 1u64;
        while g == 1 {
            if power == lam {
                x = y;
                power *= 2;
                lam = 0;
            }
            y = f(y);
            lam += 1;
            g = gcd(x.abs_diff(y), n);
        }
        if g != n {
            return g;
        }
    }
    unreachable!("pollard rho exhausted constants")
}

fn factor_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let g = pollard_rho(n);
    factor_into(g, out);
    factor_into(n / g, out);
}

/// `n = ∏ p^e` with primes ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredModulus {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl FactoredModulus {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Euler's totient of `n`.
    pub fn totient(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

/// Trial division by small primes, then Pollard rho on what remains.
pub fn factor(n: u64) -> FactoredModulus {
    assert!(n >= 1, "factor: n must be positive");
    let mut map = BTreeMap::new();
    let mut m = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while m % p == 0 {
            *map.entry(p).or_insert(0) += 1;
            m /= p;
        }
    }
    let mut p = 53u64;
    while p * p <= m && p < 10_000 {
        while m % p == 0 {
            *map.entry(p).or_insert(0) += 1;
            m /= p;
        }
        p += 2;
    }
    factor_into(m, &mut map);
    FactoredModulus {
        n,
        factors: map.into_iter().collect(),
    }
}

/// An integer residue `value mod modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(ModringError::BadModulus(0));
        }
        Ok(Self {
            value: value % modulus,
            modulus,
        })
    }

    pub fn from_signed(value: i64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(ModringError::BadModulus(0));
        }
        Ok(Self {
            value: reduce_signed(value, modulus),
            modulus,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        gcd(self.value, self.modulus) == 1
    }

    pub fn pow(&self, exp: u64) -> Self {
        Self {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        Self {
            value: mul_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

type Exponent = Vec<(u64, u32)>;

fn merge_max(into: &mut BTreeMap<u64, u32>, p: u64, e: u32) {
    let slot = into.entry(p).or_insert(0);
    *slot = (*slot).max(e);
}

/// Factored multiple of the exponent of `(Z/nZ)^×`.
fn unit_group_bound(n: &FactoredModulus) -> Exponent {
    let mut map = BTreeMap::new();
    for &(p, e) in &n.factors {
        for (q, f) in factor(p - 1).factors {
            merge_max(&mut map, q, f);
        }
        if e > 1 {
            merge_max(&mut map, p, e - 1);
        }
    }
    map.into_iter().collect()
}

/// Factored multiple of the exponent of `GL_m(Z/nZ)`.
///
/// For `n = ∏ p^e` the order of any element divides
/// `lcm_{k ≤ m}(p^k − 1) · p^{t + e − 1}` with `p^t ≥ m`: the semisimple part
/// of the reduction mod `p` lives in some `F_{p^k}^×`, its unipotent part has
/// order at most the least `p`-power `≥ m`, and the kernel of reduction has
/// exponent `p^{e−1}`.
pub(crate) fn gl_exponent_bound(n: &FactoredModulus, m: usize) -> Result<Exponent> {
    let mut map = BTreeMap::new();
    for &(p, e) in &n.factors {
        let mut pk: u64 = 1;
        for _ in 0..m {
            pk = pk
                .checked_mul(p)
                .ok_or(ModringError::Overflow("p^k - 1 for the GL exponent"))?;
            for (q, f) in factor(pk - 1).factors {
                merge_max(&mut map, q, f);
            }
        }
        let mut t = 0u32;
        let mut pt = 1u64;
        while pt < m as u64 {
            pt = pt.saturating_mul(p);
            t += 1;
        }
        if t + e - 1 > 0 {
            merge_max(&mut map, p, t + e - 1);
        }
    }
    Ok(map.into_iter().collect())
}

fn bound_divisible_by(bound: &Exponent, d: u64) -> bool {
    factor(d).factors.iter().all(|&(q, f)| {
        bound
            .iter()
            .any(|&(p, e)| p == q && e >= f)
    })
}

/// Order of `x` given a factored multiple of it.
///
/// For each prime `q^f` of the multiple, strips all other primes by powering
/// and then counts how many `q`-th powers are needed to reach the identity.
fn order_from_bound<T: Clone>(
    x: &T,
    bound: &Exponent,
    pow: impl Fn(&T, u64) -> T,
    is_identity: impl Fn(&T) -> bool,
) -> Result<u64> {
    let mut order: u64 = 1;
    for (i, &(q, f)) in bound.iter().enumerate() {
        let mut y = x.clone();
        for (j, &(q2, f2)) in bound.iter().enumerate() {
            if i == j {
                continue;
            }
            match q2.checked_pow(f2) {
                Some(pp) => y = pow(&y, pp),
                None => {
                    for _ in 0..f2 {
                        y = pow(&y, q2);
                    }
                }
            }
        }
        let mut j = 0u32;
        while !is_identity(&y) {
            if j == f {
                // the bound was not a multiple of the order
                return Err(ModringError::Overflow("order bound"));
            }
            y = pow(&y, q);
            j += 1;
        }
        order = order
            .checked_mul(q.pow(j))
            .ok_or(ModringError::Overflow("element order"))?;
    }
    if !is_identity(&pow(x, order)) {
        return Err(ModringError::Overflow("order bound"));
    }
    Ok(order)
}

/// Least `d ≥ 1` with `a^d ≡ 1 (mod n)`.
pub fn mul_order(a: Residue) -> Result<u64> {
    let n = a.modulus();
    if n == 1 {
        return Ok(1);
    }
    if !a.is_unit() {
        return Err(ModringError::NotAUnit {
            value: a.value(),
            modulus: n,
        });
    }
    let bound = unit_group_bound(&factor(n));
    order_from_bound(
        &a.value(),
        &bound,
        |&x, e| pow_mod(x, e, n),
        |&x| x == 1,
    )
}

/// A square matrix with entries reduced into `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixModN {
    dim: usize,
    modulus: u64,
    entries: Vec<u64>,
    det_unit: bool,
}

impl MatrixModN {
    /// Build from row-major signed entries, reducing each mod `modulus`.
    pub fn new(dim: usize, modulus: u64, entries: &[i64]) -> Result<Self> {
        if modulus < 2 {
            return Err(ModringError::BadModulus(modulus));
        }
        if dim == 0 || entries.len() != dim * dim {
            return Err(ModringError::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let reduced = entries.iter().map(|&x| reduce_signed(x, modulus)).collect();
        Ok(Self::from_reduced(dim, modulus, reduced))
    }

    fn from_reduced(dim: usize, modulus: u64, entries: Vec<u64>) -> Self {
        let mut m = Self {
            dim,
            modulus,
            entries,
            det_unit: false,
        };
        m.det_unit = gcd(m.det(), modulus) == 1;
        m
    }

    pub fn identity(dim: usize, modulus: u64) -> Self {
        Self::scalar(dim, modulus, 1)
    }

    pub fn scalar(dim: usize, modulus: u64, c: u64) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = c % modulus;
        }
        Self::from_reduced(dim, modulus, entries)
    }

    /// Companion matrix of a monic polynomial: ones on the subdiagonal and the
    /// negated low-order coefficients in the last column, so that it acts as
    /// multiplication by `x` on the basis `1, x, …, x^{s−1}`.
    pub fn companion(poly: &IntPolynomial, modulus: u64) -> Result<Self> {
        if !poly.is_monic() {
            return Err(ModringError::NotMonic);
        }
        let s = poly.degree().unwrap_or(0);
        if s == 0 {
            return Err(ModringError::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let mut entries = vec![0i64; s * s];
        for i in 1..s {
            entries[i * s + (i - 1)] = 1;
        }
        for (i, &c) in poly.coeffs()[..s].iter().enumerate() {
            entries[i * s + (s - 1)] = -c;
        }
        Self::new(s, modulus, &entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Row-major entries in `[0, n)`.
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.entries[row * self.dim + col]
    }

    pub fn det_unit(&self) -> bool {
        self.det_unit
    }

    pub fn is_identity(&self) -> bool {
        let m = self.dim;
        self.entries
            .iter()
            .enumerate()
            .all(|(i, &x)| x == u64::from(i / m == i % m))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    /// Determinant mod `n` by Bird's division-free algorithm.
    pub fn det(&self) -> u64 {
        let (m, n) = (self.dim, self.modulus);
        if m == 1 {
            return self.entries[0];
        }
        let mut x = self.entries.clone();
        for _ in 1..m {
            let mut mu = vec![0u64; m * m];
            let mut tail = 0u64;
            for i in (0..m).rev() {
                mu[i * m + i] = (n - tail) % n;
                tail = add_mod(tail, x[i * m + i], n);
                for j in i + 1..m {
                    mu[i * m + j] = x[i * m + j];
                }
            }
            x = mat_mul_raw(&mu, &self.entries, m, n);
        }
        if m % 2 == 0 {
            (n - x[0]) % n
        } else {
            x[0]
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        assert_eq!(self.modulus, other.modulus, "matrix modulus mismatch");
        let entries = mat_mul_raw(&self.entries, &other.entries, self.dim, self.modulus);
        Self {
            dim: self.dim,
            modulus: self.modulus,
            entries,
            det_unit: self.det_unit && other.det_unit,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| add_mod(a, b, self.modulus))
            .collect();
        Self::from_reduced(self.dim, self.modulus, entries)
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut result = Self::identity(self.dim, self.modulus);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        result.det_unit = gcd(result.det(), self.modulus) == 1;
        result
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let (m, n) = (self.dim, self.modulus);
        (0..m)
            .map(|i| {
                let acc: u128 = (0..m)
                    .map(|j| self.entries[i * m + j] as u128 * v[j] as u128)
                    .sum();
                (acc % n as u128) as u64
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let m = self.dim;
        let mut entries = vec![0; m * m];
        for i in 0..m {
            for j in 0..m {
                entries[j * m + i] = self.entries[i * m + j];
            }
        }
        Self {
            dim: m,
            modulus: self.modulus,
            entries,
            det_unit: self.det_unit,
        }
    }

    /// Image under `Z/nZ → Z/qZ` for a divisor `q` of `n`.
    pub fn reduce(&self, q: u64) -> Self {
        assert!(q >= 2 && self.modulus % q == 0, "{q} must divide {}", self.modulus);
        Self::from_reduced(self.dim, q, self.entries.iter().map(|&x| x % q).collect())
    }

    /// `poly(A)` by Horner's rule over matrices.
    pub fn eval_poly(&self, poly: &IntPolynomial) -> Self {
        let n = self.modulus;
        let mut acc = Self::scalar(self.dim, n, 0);
        for &c in poly.coeffs().iter().rev() {
            acc = acc.mul(self);
            let c = reduce_signed(c, n);
            for i in 0..self.dim {
                let slot = &mut acc.entries[i * self.dim + i];
                *slot = add_mod(*slot, c, n);
            }
        }
        acc.det_unit = gcd(acc.det(), n) == 1;
        acc
    }
}

fn mat_mul_raw(a: &[u64], b: &[u64], m: usize, n: u64) -> Vec<u64> {
    let mut out = vec![0u64; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut acc: u128 = 0;
            for k in 0..m {
                acc += a[i * m + k] as u128 * b[k * m + j] as u128;
            }
            out[i * m + j] = (acc % n as u128) as u64;
        }
    }
    out
}

/// Least `d ≥ 1` with `A^d = I (mod n)`.
pub fn mat_order(a: &MatrixModN) -> Result<u64> {
    let bound = gl_exponent_bound(&factor(a.modulus()), a.dim())?;
    mat_order_with_bound(a, &bound)
}

fn mat_order_with_bound(a: &MatrixModN, bound: &Exponent) -> Result<u64> {
    if !a.det_unit() {
        return Err(ModringError::NotInvertible {
            modulus: a.modulus(),
        });
    }
    order_from_bound(a, bound, |x, e| x.pow(e), |x| x.is_identity())
}

/// Whether `Φ_d(A) ≡ 0 (mod n)`.
pub fn check_cyclotomic_vanishing(a: &MatrixModN, d: u64) -> bool {
    a.eval_poly(&cyclotomic(d)).is_zero()
}

/// `#GL_m(F_p) mod d`.
fn gl_field_order_mod(p: u64, m: usize, d: u64) -> u64 {
    let mut pm = 1u64;
    for _ in 0..m {
        pm = mul_mod(pm, p, d);
    }
    let mut acc = 1 % d;
    let mut pi = 1 % d;
    for _ in 0..m {
        acc = mul_mod(acc, (pm + d - pi) % d, d);
        pi = mul_mod(pi, p, d);
    }
    acc
}

/// Find `A ∈ GL_m(Z/nZ)` of exact order `d`, optionally with `Φ_d(A) ≡ 0`.
///
/// Tries the companion matrix of `Φ_d` first (when `m = φ(d)`), then walks
/// candidates `B`: all of `Mat_m(Z/nZ)` in lexicographic order when that space
/// fits in the budget, otherwise `SEARCH_BUDGET` seeded random draws. Each
/// invertible `B` whose order `c` is a multiple of `d` yields `B^{c/d}`.
/// A failed exhaustive walk is reported as `ImpossibleOrder`, a failed random
/// one as `NotFound`.
pub fn find_matrix(
    n: u64,
    m: usize,
    d: u64,
    require_vanishing: bool,
    seed: u64,
) -> Result<MatrixModN> {
    find_matrix_with_budget(n, m, d, require_vanishing, seed, SEARCH_BUDGET)
}

pub fn find_matrix_with_budget(
    n: u64,
    m: usize,
    d: u64,
    require_vanishing: bool,
    seed: u64,
    budget: u64,
) -> Result<MatrixModN> {
    if n < 2 {
        return Err(ModringError::BadModulus(n));
    }
    if m == 0 || d == 0 {
        return Err(ModringError::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    let fact = factor(n);
    let bound = gl_exponent_bound(&fact, m)?;
    if !bound_divisible_by(&bound, d) {
        return Err(ModringError::ImpossibleOrder {
            order: d,
            dim: m,
            modulus: n,
            reason: "order does not divide the group exponent".into(),
        });
    }
    if require_vanishing {
        // For p ∤ d, Φ_d is separable mod p, so A mod p has order exactly d.
        for p in fact.primes().filter(|&p| d % p != 0) {
            if gl_field_order_mod(p, m, d) != 0 {
                return Err(ModringError::ImpossibleOrder {
                    order: d,
                    dim: m,
                    modulus: n,
                    reason: format!("{d} does not divide #GL_{m}(F_{p})"),
                });
            }
        }
    }
    if d == 1 {
        return Ok(MatrixModN::identity(m, n));
    }

    let phi = cyclotomic(d);
    if phi.degree() == Some(m) {
        let c = MatrixModN::companion(&phi, n)?;
        if c.det_unit() && mat_order_with_bound(&c, &bound)? == d {
            return Ok(c);
        }
    }

    let accept = |b: &MatrixModN| -> Result<Option<MatrixModN>> {
        if !b.det_unit() {
            return Ok(None);
        }
        let c = mat_order_with_bound(b, &bound)?;
        if c % d != 0 {
            return Ok(None);
        }
        let a = b.pow(c / d);
        if require_vanishing && !a.eval_poly(&phi).is_zero() {
            return Ok(None);
        }
        Ok(Some(a))
    };

    let cells = (m * m) as u32;
    let space = n.checked_pow(cells).filter(|&s| s <= budget);
    if let Some(space) = space {
        let mut digits = vec![0u64; m * m];
        for _ in 0..space {
            let b = MatrixModN::from_reduced(m, n, digits.clone());
            if let Some(a) = accept(&b)? {
                return Ok(a);
            }
            for slot in digits.iter_mut().rev() {
                *slot += 1;
                if *slot < n {
                    break;
                }
                *slot = 0;
            }
        }
        // any solution would have been accepted as its own B
        return Err(ModringError::ImpossibleOrder {
            order: d,
            dim: m,
            modulus: n,
            reason: format!("exhaustive search of all {space} matrices"),
        });
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget {
            let entries = (0..m * m).map(|_| rng.gen_range(0..n)).collect();
            let b = MatrixModN::from_reduced(m, n, entries);
            if let Some(a) = accept(&b)? {
                return Ok(a);
            }
        }
    }
    Err(ModringError::NotFound {
        order: d,
        candidates: budget,
    })
}

/// `ω = 1 + p^{e−a}·β (mod p^e)`.
///
/// For `a < e` the order of `ω` divides `p^a`, and equals it when `p` is odd.
/// At `a = e` the formula degenerates to `1 + β` and carries no such guarantee.
pub fn order_p_power_element(p: u64, e: u32, a: u32, beta: Residue) -> Result<Residue> {
    if a == 0 || a > e {
        return Err(ModringError::BadExponent { a, e });
    }
    if beta.value() % p == 0 {
        return Err(ModringError::NotAUnit {
            value: beta.value(),
            modulus: p,
        });
    }
    let modulus = p
        .checked_pow(e)
        .ok_or(ModringError::Overflow("p^e"))?;
    let step = p.pow(e - a);
    let value = add_mod(1, mul_mod(step, beta.value() % modulus, modulus), modulus);
    Residue::new(value, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_order(a: u64, n: u64) -> u64 {
        let mut x = a % n;
        let mut k = 1;
        while x != 1 % n {
            x = mul_mod(x, a, n);
            k += 1;
        }
        k
    }

    fn brute_mat_order(a: &MatrixModN) -> u64 {
        let mut x = a.clone();
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul(a);
            k += 1;
        }
        k
    }

    fn lcm(a: u64, b: u64) -> u64 {
        a / gcd(a, b) * b
    }

    #[test]
    fn factor_examples() {
        assert!(factor(1).factors.is_empty());
        assert_eq!(
            factor(255255).factors,
            vec![(3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1)]
        );
        assert_eq!(factor(11u64.pow(5)).factors, vec![(11, 5)]);
        // two primes beyond the trial-division range
        let big = 1_000_000_007u64 * 998_244_353;
        assert_eq!(
            factor(big).factors,
            vec![(998_244_353, 1), (1_000_000_007, 1)]
        );
    }

    #[test]
    fn factor_reconstructs_and_primes_ascend() {
        for n in 1..5000u64 {
            let f = factor(n);
            let product: u64 = f.factors.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(product, n);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.factors.iter().all(|&(p, e)| is_prime(p) && e >= 1));
        }
    }

    #[test]
    fn mul_order_examples() {
        assert_eq!(mul_order(Residue::new(1, 7).unwrap()).unwrap(), 1);
        assert_eq!(mul_order(Residue::new(2, 7).unwrap()).unwrap(), 3);
        // CRT brute force over the prime factors of 255255
        let crt: u64 = [3u64, 5, 7, 11, 13, 17]
            .iter()
            .map(|&p| brute_order(254 % p, p))
            .fold(1, lcm);
        assert_eq!(crt, 12);
        assert_eq!(mul_order(Residue::new(254, 255255).unwrap()).unwrap(), crt);
    }

    #[test]
    fn mul_order_rejects_non_units() {
        assert_eq!(
            mul_order(Residue::new(6, 9).unwrap()),
            Err(ModringError::NotAUnit {
                value: 6,
                modulus: 9
            })
        );
    }

    #[test]
    fn mul_order_matches_brute_force_exhaustively() {
        for n in 2..1500u64 {
            for a in 1..n {
                if gcd(a, n) != 1 {
                    continue;
                }
                let r = Residue::new(a, n).unwrap();
                assert_eq!(mul_order(r).unwrap(), brute_order(a, n), "a={a} n={n}");
            }
        }
    }

    #[test]
    fn mul_order_large_modulus() {
        let n = 11u64.pow(5);
        let d = mul_order(Residue::new(37107, n).unwrap()).unwrap();
        assert_eq!(d, 5);
        assert_eq!(pow_mod(37107, 5, n), 1);
    }

    #[test]
    fn determinant_small_cases() {
        let a = MatrixModN::new(2, 455, &[0, 1, 454, 454]).unwrap();
        assert_eq!(a.det(), 1);
        let b = MatrixModN::new(3, 1000, &[2, 0, 1, 1, 3, 2, 1, 1, 1]).unwrap();
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(b.det(), 0);
        assert!(!b.det_unit());
        let c = MatrixModN::new(3, 97, &[4, 7, 2, 3, 6, 1, 2, 5, 3]).unwrap();
        // 4(18-5) - 7(9-2) + 2(15-12) = 52 - 49 + 6 = 9
        assert_eq!(c.det(), 9);
    }

    #[test]
    fn mat_order_examples() {
        assert_eq!(mat_order(&MatrixModN::identity(3, 10)).unwrap(), 1);
        let c = MatrixModN::companion(&cyclotomic(3), 11).unwrap();
        assert_eq!(brute_mat_order(&c), 3);
        assert_eq!(mat_order(&c).unwrap(), 3);
        let a = MatrixModN::new(2, 455, &[0, 1, 454, 454]).unwrap();
        assert_eq!(mat_order(&a).unwrap(), 3);
        let sing = MatrixModN::new(2, 6, &[2, 0, 0, 1]).unwrap();
        assert_eq!(
            mat_order(&sing),
            Err(ModringError::NotInvertible { modulus: 6 })
        );
    }

    #[test]
    fn mat_order_is_lcm_over_prime_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 200 {
            let n = rng.gen_range(2..400u64);
            let m = rng.gen_range(1..=3usize);
            let entries: Vec<i64> = (0..m * m).map(|_| rng.gen_range(0..n as i64)).collect();
            let a = MatrixModN::new(m, n, &entries).unwrap();
            if !a.det_unit() {
                continue;
            }
            let by_crt = factor(n)
                .factors
                .iter()
                .map(|&(p, e)| mat_order(&a.reduce(p.pow(e))).unwrap())
                .fold(1, lcm);
            let order = mat_order(&a).unwrap();
            assert_eq!(order, by_crt);
            if order < 5000 {
                assert_eq!(order, brute_mat_order(&a));
            }
            checked += 1;
        }
    }

    #[test]
    fn cyclotomic_vanishing_examples() {
        let a = MatrixModN::new(2, 455, &[0, 1, 454, 454]).unwrap();
        assert!(check_cyclotomic_vanishing(&a, 3));
        assert!(check_cyclotomic_vanishing(&MatrixModN::identity(2, 9), 1));
        let two = MatrixModN::new(1, 7, &[2]).unwrap();
        assert!(check_cyclotomic_vanishing(&two, 3));
        assert!(!check_cyclotomic_vanishing(&two, 6));
    }

    #[test]
    fn vanishing_implies_order_divides_d() {
        for n in 2..=60u64 {
            for a in 1..n {
                if gcd(a, n) != 1 {
                    continue;
                }
                let m = MatrixModN::new(1, n, &[a as i64]).unwrap();
                let ord = mat_order(&m).unwrap();
                for d in 1..=12u64 {
                    if check_cyclotomic_vanishing(&m, d) {
                        assert_eq!(d % ord, 0, "a={a} n={n} d={d}");
                        if factor(n).primes().all(|p| d % p != 0) {
                            // Φ_d is separable mod every p | n
                            assert_eq!(ord, d, "a={a} n={n} d={d}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn vanishing_two_by_two_exhaustive_small() {
        for n in [2u64, 3, 4, 5, 6] {
            let mut digits = [0i64; 4];
            loop {
                let a = MatrixModN::new(2, n, &digits).unwrap();
                if a.det_unit() {
                    let ord = mat_order(&a).unwrap();
                    for d in 1..=8u64 {
                        if check_cyclotomic_vanishing(&a, d) {
                            assert_eq!(d % ord, 0);
                        }
                    }
                }
                let mut k = 3;
                loop {
                    digits[k] += 1;
                    if digits[k] < n as i64 {
                        break;
                    }
                    digits[k] = 0;
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                }
                if digits == [0; 4] {
                    break;
                }
            }
        }
    }

    #[test]
    fn find_matrix_examples() {
        let one = find_matrix(11, 1, 1, false, 0).unwrap();
        assert_eq!(one.entries(), &[1]);
        let a = find_matrix(7, 1, 3, true, 0).unwrap();
        assert!(a.entries() == [2] || a.entries() == [4]);
        match find_matrix(25, 1, 5, true, 0) {
            Err(ModringError::NotFound { .. }) | Err(ModringError::ImpossibleOrder { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        // the only order-5 units mod 25 are 6, 11, 16, 21 and none is a root of Φ_5
        for w in [6u64, 11, 16, 21] {
            let m = MatrixModN::new(1, 25, &[w as i64]).unwrap();
            assert_eq!(mat_order(&m).unwrap(), 5);
            assert!(!check_cyclotomic_vanishing(&m, 5));
        }
    }

    #[test]
    fn find_matrix_impossible_orders() {
        // 3 ∤ #GL_1(F_5) = 4 and 5 ∤ 3
        assert!(matches!(
            find_matrix(5, 1, 3, true, 0),
            Err(ModringError::ImpossibleOrder { .. })
        ));
        // no element of order 7 in (Z/10Z)^×
        assert!(matches!(
            find_matrix(10, 1, 7, false, 0),
            Err(ModringError::ImpossibleOrder { .. })
        ));
    }

    #[test]
    fn find_matrix_outputs_are_certified() {
        let cases = [
            (455u64, 2usize, 3u64),
            (209, 2, 5),
            (91, 2, 3),
            (1155, 2, 4),
            (13, 3, 3),
            (31, 2, 15),
        ];
        for (i, &(n, m, d)) in cases.iter().enumerate() {
            for vanish in [false, true] {
                match find_matrix(n, m, d, vanish, i as u64) {
                    Ok(a) => {
                        assert_eq!(mat_order(&a).unwrap(), d, "n={n} m={m} d={d}");
                        if vanish {
                            assert!(check_cyclotomic_vanishing(&a, d));
                        }
                    }
                    Err(e) => panic!("n={n} m={m} d={d} vanish={vanish}: {e}"),
                }
            }
        }
    }

    #[test]
    fn impossible_order_guard_never_rejects_a_real_solution() {
        // exhaustive over m = 1: whenever some unit of order d has Φ_d(a) = 0,
        // the search must not report ImpossibleOrder
        for n in 2..=40u64 {
            for d in 1..=12u64 {
                let exists = (1..n).any(|a| {
                    gcd(a, n) == 1 && {
                        let m = MatrixModN::new(1, n, &[a as i64]).unwrap();
                        mat_order(&m).unwrap() == d && check_cyclotomic_vanishing(&m, d)
                    }
                });
                let found = find_matrix(n, 1, d, true, 0);
                assert_eq!(exists, found.is_ok(), "n={n} d={d}: {found:?}");
            }
        }
    }

    #[test]
    fn p_power_elements() {
        let w = order_p_power_element(5, 4, 1, Residue::new(1, 5).unwrap()).unwrap();
        assert_eq!((w.value(), w.modulus()), (126, 625));
        assert_eq!(mul_order(w).unwrap(), 5);

        // a = e degenerates to 1 + β
        let w = order_p_power_element(3, 2, 2, Residue::new(1, 9).unwrap()).unwrap();
        assert_eq!(w.value(), 2);
        let w = order_p_power_element(3, 3, 2, Residue::new(1, 9).unwrap()).unwrap();
        assert_eq!(w.value(), 4);
        assert_eq!(9 % mul_order(w).unwrap(), 0);

        assert_eq!(
            order_p_power_element(7, 1, 2, Residue::new(1, 7).unwrap()),
            Err(ModringError::BadExponent { a: 2, e: 1 })
        );
        assert!(order_p_power_element(7, 2, 1, Residue::new(14, 49).unwrap()).is_err());
    }

    #[test]
    fn p_power_element_exact_order_for_odd_p() {
        for (p, e) in [(3u64, 4u32), (5, 3), (7, 3), (11, 2)] {
            for a in 1..e {
                for beta in 1..p.pow(a) {
                    if beta % p == 0 {
                        continue;
                    }
                    let w = order_p_power_element(p, e, a, Residue::new(beta, p.pow(a)).unwrap())
                        .unwrap();
                    assert_eq!(mul_order(w).unwrap(), p.pow(a));
                }
            }
        }
    }
}
