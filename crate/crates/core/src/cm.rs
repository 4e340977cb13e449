//! Imaginary quadratic fields of class number one and their elliptic curves.
//!
//! `O_K = Z[α]` is handled through `O_K/mO_K`, whose elements `a + bα` act on
//! `(Z/mZ)^2` by the matrix `aI + bC_α`. The lattice `Λ = Z + Zα` carries the
//! Weierstrass function, evaluated from its Laurent series near lattice points
//! and from the `q`-product expansion elsewhere. Ray class field periods sum ℘
//! over the orbit of a torsion point under a unit `A` of `O_K/mO_K`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::laurent::IntPolynomial;
use crate::modring::{gcd, is_prime, mat_order, reduce_signed, ModringError, MatrixModN};
use crate::numeric::ComplexSum;
use crate::periods::PlotPoint;

/// Squarefree `d > 0` for which `Q(√−d)` has class number one.
pub const CLASS_NUMBER_ONE: [u64; 9] = [1, 2, 3, 7, 11, 19, 43, 67, 163];

/// Default cap on `m²` for torsion plots.
pub const TORSION_BUDGET: u64 = 1_000_000;

/// Lattice points closer than this to `z` count as a pole.
pub const POLE_GUARD: f64 = 1e-8;

// ℘ uses its Laurent series when the reduced argument is this short.
const LAURENT_RADIUS: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmError {
    #[error("{0} is not a squarefree positive integer")]
    NotSquarefree(u64),
    #[error("Q(sqrt(-{0})) does not have class number one")]
    ClassNumberNotOne(u64),
    #[error("operands live modulo different integers or fields")]
    ModulusMismatch,
    #[error("element is not a unit modulo {0}")]
    NotAUnit(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("tolerance {0} outside [1e-14, 1e-6]")]
    ToleranceOutOfRange(f64),
    #[error("z = {0} lies on the lattice")]
    PoleAtLattice(Complex64),
    #[error("the identity torsion point has no ℘ value")]
    IdentityTorsionPoint,
    #[error("modulus must be at least {min}, got {got}")]
    BadModulus { min: u64, got: u64 },
    #[error("plot needs {required} torsion points, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error(transparent)]
    Modring(#[from] ModringError),
}

pub type Result<T> = std::result::Result<T, CmError>;

fn is_squarefree(d: u64) -> bool {
    d >= 1 && crate::modring::factor(d).factors.iter().all(|&(_, e)| e == 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldData {
    d: u64,
    alpha: Complex64,
    min_poly: IntPolynomial,
    c_alpha: [[i64; 2]; 2],
    w: u64,
    class_number_one: bool,
}

impl FieldData {
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// `x² + p₁x + p₀`.
    pub fn min_poly(&self) -> &IntPolynomial {
        &self.min_poly
    }

    fn p0(&self) -> i64 {
        self.min_poly.coeffs()[0]
    }

    fn p1(&self) -> i64 {
        self.min_poly.coeffs()[1]
    }

    /// Matrix of multiplication by `α` in the basis `(1, α)`.
    pub fn c_alpha(&self) -> [[i64; 2]; 2] {
        self.c_alpha
    }

    /// Number of roots of unity in `O_K`.
    pub fn unit_count(&self) -> u64 {
        self.w
    }

    pub fn class_number_one(&self) -> bool {
        self.class_number_one
    }

    /// Roots of unity of `O_K` as coordinates `(a, b)` of `a + bα`.
    pub fn units(&self) -> Vec<(i64, i64)> {
        match self.d {
            1 => vec![(1, 0), (-1, 0), (0, 1), (0, -1)],
            3 => vec![(1, 0), (-1, 0), (0, 1), (0, -1), (-1, -1), (1, 1)],
            _ => vec![(1, 0), (-1, 0)],
        }
    }
}

/// `α = √−d` for `d ≡ 1, 2 (mod 4)` and `(−1 + √−d)/2` for `d ≡ 3 (mod 4)`.
pub fn field_data(d: u64, allow_any_class_number: bool) -> Result<FieldData> {
    if !is_squarefree(d) {
        return Err(CmError::NotSquarefree(d));
    }
    let class_number_one = CLASS_NUMBER_ONE.contains(&d);
    if !class_number_one && !allow_any_class_number {
        return Err(CmError::ClassNumberNotOne(d));
    }
    let sd = (d as f64).sqrt();
    let di = d as i64;
    let (alpha, p0, p1) = if d % 4 == 3 {
        (Complex64::new(-0.5, sd / 2.0), (di + 1) / 4, 1)
    } else {
        (Complex64::new(0.0, sd), di, 0)
    };
    let w = match d {
        1 => 4,
        3 => 6,
        _ => 2,
    };
    Ok(FieldData {
        d,
        alpha,
        min_poly: IntPolynomial::new(vec![p0, p1, 1]),
        c_alpha: [[0, -p0], [1, -p1]],
        w,
        class_number_one,
    })
}

/// `x^{w/2}` with `w` the number of roots of unity: the coordinate of
/// `E → E/Aut(E)`.
pub fn weber(x: Complex64, field: &FieldData) -> Complex64 {
    match field.d {
        1 => x * x,
        3 => x * x * x,
        _ => x,
    }
}

/// `a + bα` in `O_K/mO_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OkElement {
    d: u64,
    matrix: MatrixModN,
}

impl OkElement {
    pub fn new(field: &FieldData, a: i64, b: i64, m: u64) -> Result<Self> {
        if m < 2 {
            return Err(CmError::BadModulus { min: 2, got: m });
        }
        let c = field.c_alpha;
        let entries = [
            a as i128 + b as i128 * c[0][0] as i128,
            b as i128 * c[0][1] as i128,
            b as i128 * c[1][0] as i128,
            a as i128 + b as i128 * c[1][1] as i128,
        ]
        .map(|x| (x.rem_euclid(m as i128)) as i64);
        Ok(Self {
            d: field.d,
            matrix: MatrixModN::new(2, m, &entries)?,
        })
    }

    fn from_matrix(d: u64, matrix: MatrixModN) -> Self {
        Self { d, matrix }
    }

    pub fn a(&self) -> u64 {
        self.matrix.get(0, 0)
    }

    pub fn b(&self) -> u64 {
        self.matrix.get(1, 0)
    }

    pub fn modulus(&self) -> u64 {
        self.matrix.modulus()
    }

    /// `aI + bC_α mod m`.
    pub fn matrix(&self) -> &MatrixModN {
        &self.matrix
    }

    pub fn is_unit(&self) -> bool {
        self.matrix.det_unit()
    }
}

pub fn ok_mul(x: &OkElement, y: &OkElement) -> Result<OkElement> {
    if x.d != y.d || x.modulus() != y.modulus() {
        return Err(CmError::ModulusMismatch);
    }
    Ok(OkElement::from_matrix(x.d, x.matrix.mul(&y.matrix)))
}

/// Order of `A` in `(O_K/mO_K)^× / O_K^×`.
///
/// `⟨A⟩ ∩ O_K^×` is the subgroup of `⟨A⟩` of some order `t | gcd(r₀, w)`, and
/// it is generated by `A^{r₀/t}`, so the largest valid `t` is found by testing
/// those powers against the image of the roots of unity.
pub fn quotient_order(field: &FieldData, a: &OkElement) -> Result<u64> {
    quotient_order_parts(field, a).map(|(r0, t)| r0 / t)
}

/// `(r₀, #(⟨A⟩ ∩ O_K^×))` with `r₀` the order of `A` in `(O_K/mO_K)^×`.
pub fn quotient_order_parts(field: &FieldData, a: &OkElement) -> Result<(u64, u64)> {
    if !a.is_unit() {
        return Err(CmError::NotAUnit(a.modulus()));
    }
    let m = a.modulus();
    let r0 = mat_order(&a.matrix)?;
    let images: Vec<MatrixModN> = field
        .units()
        .into_iter()
        .map(|(ua, ub)| OkElement::new(field, ua, ub, m).map(|e| e.matrix))
        .collect::<Result<_>>()?;
    let g = gcd(r0, field.w);
    let mut best = 1;
    for t in 1..=g {
        if g % t == 0 && images.contains(&a.matrix.pow(r0 / t)) {
            best = t;
        }
    }
    Ok((r0, best))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// How `p` decomposes in `O_K`, read off from the roots of the minimal
/// polynomial of `α` mod `p`.
pub fn prime_splitting(p: u64, field: &FieldData) -> Result<Splitting> {
    if !is_prime(p) {
        return Err(CmError::NotPrime(p));
    }
    let (p0, p1) = (field.p0(), field.p1());
    if p == 2 {
        let roots: Vec<i64> = (0..2).filter(|&x| (x * x + p1 * x + p0) % 2 == 0).collect();
        return Ok(match roots.len() {
            0 => Splitting::Inert,
            2 => Splitting::Split,
            _ => Splitting::Ramified,
        });
    }
    let disc = reduce_signed(p1 * p1 - 4 * p0, p);
    if disc == 0 {
        return Ok(Splitting::Ramified);
    }
    Ok(if crate::modring::pow_mod(disc, (p - 1) / 2, p) == 1 {
        Splitting::Split
    } else {
        Splitting::Inert
    })
}

/// `#(O_K/p^e O_K)^×`.
pub fn unit_group_order(p: u64, e: u32, field: &FieldData) -> Result<u64> {
    let pe1 = p.pow(e - 1);
    Ok(match prime_splitting(p, field)? {
        Splitting::Inert => (p * p - 1) * pe1 * pe1,
        Splitting::Split => ((p - 1) * pe1).pow(2),
        Splitting::Ramified => (p - 1) * p.pow(2 * e - 1),
    })
}

/// `Λ = Z + Zα` with its invariants and the series data for ℘.
#[derive(Clone, Debug)]
pub struct LatticeContext {
    alpha: Complex64,
    q: Complex64,
    g2: Complex64,
    g3: Complex64,
    /// `laurent_coeffs[k]` is `c_k`; entries 0 and 1 are unused zeros.
    laurent_coeffs: Vec<Complex64>,
    tol: f64,
}

fn divisor_power_sum(n: u64, power: i32) -> f64 {
    let mut s = 0.0;
    let mut k = 1;
    while k * k <= n {
        if n % k == 0 {
            s += (k as f64).powi(power);
            if k * k != n {
                s += ((n / k) as f64).powi(power);
            }
        }
        k += 1;
    }
    s
}

/// `1 + coeff·Σ σ_{power}(n) qⁿ`.
fn eisenstein(q: Complex64, coeff: f64, power: i32) -> Complex64 {
    let mut acc = ComplexSum::new();
    acc.add(Complex64::new(1.0, 0.0));
    let mut qn = q;
    let mut n = 1;
    while qn.norm() * divisor_power_sum(n, power) > 1e-22 {
        acc.add(qn * (coeff * divisor_power_sum(n, power)));
        qn *= q;
        n += 1;
    }
    acc.value()
}

impl LatticeContext {
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn g2(&self) -> Complex64 {
        self.g2
    }

    pub fn g3(&self) -> Complex64 {
        self.g3
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn coeff_count(&self) -> usize {
        self.laurent_coeffs.len() - 2
    }

    /// `c_k` for `k ≥ 2`.
    pub fn laurent_coeff(&self, k: usize) -> Complex64 {
        self.laurent_coeffs[k]
    }

    /// `7·G₈` from the Eisenstein series `E₈`, an independent value of `c₄`.
    pub fn c4_from_eisenstein(&self) -> Complex64 {
        let g8 = eisenstein(self.q, 480.0, 7) * (PI.powi(8) / 4725.0);
        g8 * 7.0
    }

    /// Nearest lattice point to `z`.
    pub fn nearest_lattice_point(&self, z: Complex64) -> Complex64 {
        let y = z.im / self.alpha.im;
        let x = z.re - y * self.alpha.re;
        let (x0, y0) = (x.round(), y.round());
        let mut best = Complex64::new(x0, 0.0) + self.alpha * y0;
        let mut best_d = (z - best).norm();
        for dy in -1..=1 {
            for dx in -1..=1 {
                let l = Complex64::new(x0 + dx as f64, 0.0) + self.alpha * (y0 + dy as f64);
                let dist = (z - l).norm();
                if dist < best_d {
                    best = l;
                    best_d = dist;
                }
            }
        }
        best
    }

    fn reduce(&self, z: Complex64) -> Result<Complex64> {
        let u = z - self.nearest_lattice_point(z);
        if u.norm() <= POLE_GUARD {
            return Err(CmError::PoleAtLattice(z));
        }
        Ok(u)
    }

    fn wp_laurent(&self, u: Complex64) -> Complex64 {
        let u2 = u * u;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.laurent_coeffs[2..].iter().rev() {
            acc = acc * u2 + c;
        }
        acc * u2 + 1.0 / u2
    }

    fn wp_prime_laurent(&self, u: Complex64) -> Complex64 {
        let u2 = u * u;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.laurent_coeffs.iter().enumerate().skip(2).rev() {
            acc = acc * u2 + c * (2 * k - 2) as f64;
        }
        // Σ (2k−2) c_k u^{2k−3} = u·Σ (2k−2) c_k u^{2k−4}
        acc * u - 2.0 / (u2 * u)
    }

    // Terms of the q-expansions beyond which |qⁿ|·|x|^{±1} is negligible.
    fn q_terms(&self, x: Complex64) -> usize {
        let big = x.norm().max(1.0 / x.norm());
        let lq = self.q.norm().ln();
        let needed = ((-40.0 - big.ln()) / lq).ceil();
        needed.max(1.0) as usize + 1
    }

    fn wp_q(&self, u: Complex64) -> Complex64 {
        let g = |w: Complex64| w / ((1.0 - w) * (1.0 - w));
        let x = (Complex64::i() * 2.0 * PI * u).exp();
        let mut acc = ComplexSum::new();
        acc.add(Complex64::new(1.0 / 12.0, 0.0));
        acc.add(g(x));
        let mut qn = self.q;
        for _ in 0..self.q_terms(x) {
            acc.add(g(qn * x));
            acc.add(g(qn / x));
            acc.add(g(qn) * -2.0);
            qn *= self.q;
        }
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        acc.value() * two_pi_i * two_pi_i
    }

    fn wp_prime_q(&self, u: Complex64) -> Complex64 {
        let f = |w: Complex64| w * (1.0 + w) / ((1.0 - w) * (1.0 - w) * (1.0 - w));
        let x = (Complex64::i() * 2.0 * PI * u).exp();
        let mut acc = ComplexSum::new();
        acc.add(f(x));
        let mut qn = self.q;
        for _ in 0..self.q_terms(x) {
            acc.add(f(qn * x));
            acc.add(-f(qn / x));
            qn *= self.q;
        }
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        acc.value() * two_pi_i * two_pi_i * two_pi_i
    }
}

/// `g₂`, `g₃` from `E₄`, `E₆` at `q = e(α)` and the Laurent coefficients of ℘.
pub fn lattice_context(field: &FieldData, tol: f64) -> Result<LatticeContext> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(CmError::ToleranceOutOfRange(tol));
    }
    let alpha = field.alpha;
    let q = (Complex64::i() * 2.0 * PI * alpha).exp();
    let g2 = eisenstein(q, 240.0, 3) * (4.0 * PI.powi(4) / 3.0);
    let g3 = eisenstein(q, -504.0, 5) * (8.0 * PI.powi(6) / 27.0);
    let mut c = vec![Complex64::new(0.0, 0.0); 2];
    c.push(g2 / 20.0);
    c.push(g3 / 28.0);
    // the shortest nonzero lattice vector has length 1, so c_k r^{2k} decays
    // geometrically for r < 1
    let r2 = LAURENT_RADIUS * LAURENT_RADIUS;
    let mut k = 4;
    loop {
        let s: Complex64 = (2..=k - 2).map(|j| c[j] * c[k - j]).sum();
        let ck = s * (3.0 / ((2 * k + 1) as f64 * (k - 3) as f64));
        c.push(ck);
        // symmetric lattices zero out whole residue classes of k, so look at
        // the last three terms together
        let tail = (k - 2..=k)
            .map(|j| c[j].norm() * r2.powi(j as i32 - 1))
            .fold(0.0, f64::max);
        if (tail < tol * 1e-4 && k >= 8) || k >= 400 {
            break;
        }
        k += 1;
    }
    Ok(LatticeContext {
        alpha,
        q,
        g2,
        g3,
        laurent_coeffs: c,
        tol,
    })
}

/// `℘(z; Z + Zα)`.
pub fn wp(z: Complex64, ctx: &LatticeContext) -> Result<Complex64> {
    let u = ctx.reduce(z)?;
    Ok(if u.norm() <= LAURENT_RADIUS {
        ctx.wp_laurent(u)
    } else {
        ctx.wp_q(u)
    })
}

/// `℘′(z; Z + Zα)`.
pub fn wp_prime(z: Complex64, ctx: &LatticeContext) -> Result<Complex64> {
    let u = ctx.reduce(z)?;
    Ok(if u.norm() <= LAURENT_RADIUS {
        ctx.wp_prime_laurent(u)
    } else {
        ctx.wp_prime_q(u)
    })
}

/// `z = (a + bα)/m` in `E[m]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionPoint {
    pub a: u64,
    pub b: u64,
    pub m: u64,
    pub order: u64,
    pub lift: Complex64,
}

impl TorsionPoint {
    pub fn new(a: u64, b: u64, m: u64, alpha: Complex64) -> Self {
        let (a, b) = (a % m, b % m);
        let order = m / gcd(gcd(a, b), m);
        Self {
            a,
            b,
            m,
            order,
            lift: centered_lift(a, b, m, alpha),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

fn centered(x: u64, m: u64) -> f64 {
    if 2 * x > m {
        x as f64 - m as f64
    } else {
        x as f64
    }
}

// Representative of (a + bα)/m with both coordinates in (−1/2, 1/2].
fn centered_lift(a: u64, b: u64, m: u64, alpha: Complex64) -> Complex64 {
    (Complex64::new(centered(a, m), 0.0) + alpha * centered(b, m)) / m as f64
}

/// All of `E[m]`, row-major in `(a, b)`, starting with the identity.
pub fn torsion_points(m: u64, field: &FieldData) -> Result<Vec<TorsionPoint>> {
    if m < 2 {
        return Err(CmError::BadModulus { min: 2, got: m });
    }
    Ok((0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .map(|(a, b)| TorsionPoint::new(a, b, m, field.alpha))
        .collect())
}

fn apply(a: &MatrixModN, x: (u64, u64)) -> (u64, u64) {
    let v = a.mul_vec(&[x.0, x.1]);
    (v[0], v[1])
}

fn orbit_value(
    field: &FieldData,
    a: &OkElement,
    r: u64,
    z: (u64, u64),
    ctx: &LatticeContext,
    use_weber: bool,
) -> Result<Complex64> {
    let m = a.modulus();
    let mut acc = ComplexSum::new();
    let mut cur = z;
    for _ in 0..r {
        let v = wp(centered_lift(cur.0, cur.1, m, field.alpha), ctx)?;
        acc.add(if use_weber { weber(v, field) } else { v });
        cur = apply(a.matrix(), cur);
    }
    Ok(acc.value())
}

/// `η_{K,m,A}(z) = Σ_{j<r} ℘(A^j z)` with `r` the order of `A` modulo units,
/// or the same sum of Weber coordinates when `use_weber` is set.
pub fn rcfp(
    field: &FieldData,
    a: &OkElement,
    z: &TorsionPoint,
    ctx: &LatticeContext,
    use_weber: bool,
) -> Result<Complex64> {
    if z.is_identity() {
        return Err(CmError::IdentityTorsionPoint);
    }
    if z.m != a.modulus() {
        return Err(CmError::ModulusMismatch);
    }
    let r = quotient_order(field, a)?;
    orbit_value(field, a, r, (z.a, z.b), ctx, use_weber)
}

fn check_budget(m: u64, budget: u64) -> Result<()> {
    let required = m as u128 * m as u128;
    if required > budget as u128 {
        return Err(CmError::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// ℘ (or its Weber power) at every point of `E[m]`, row-major, identity
/// slot left at zero. `℘(−z) = ℘(z)` halves the evaluations.
fn torsion_values(
    field: &FieldData,
    m: u64,
    ctx: &LatticeContext,
    use_weber: bool,
) -> Result<Vec<Complex64>> {
    let mu = m as usize;
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|a| {
            (0..m)
                .map(|b| {
                    let na = (m - a) % m;
                    let nb = (m - b) % m;
                    if (a, b) == (0, 0) || (na, nb) < (a, b) {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    let v = wp(centered_lift(a, b, m, field.alpha), ctx)?;
                    Ok(if use_weber { weber(v, field) } else { v })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    for a in 0..mu {
        for b in 0..mu {
            let (na, nb) = ((mu - a) % mu, (mu - b) % mu);
            if (na, nb) < (a, b) {
                flat[a * mu + b] = flat[na * mu + nb];
            }
        }
    }
    Ok(flat)
}

/// One point per nonzero `z = (a + bα)/m`, row-major, colored by `a mod c`.
///
/// When `A^r` acts trivially on the summed values (`A^r = ±1`, or any root of
/// unity once the Weber power is applied) the orbit sum is shared by the whole
/// `⟨A⟩`-orbit and computed once; otherwise each point gets its own `r`-term sum.
#[allow(clippy::too_many_arguments)]
pub fn rcfp_plot(
    field: &FieldData,
    a: &OkElement,
    color_modulus: u64,
    ctx: &LatticeContext,
    use_weber: bool,
    budget: u64,
) -> Result<Vec<PlotPoint>> {
    let m = a.modulus();
    check_budget(m, budget)?;
    if color_modulus == 0 {
        return Err(CmError::BadModulus {
            min: 1,
            got: color_modulus,
        });
    }
    let r = quotient_order(field, a)?;
    let cache = torsion_values(field, m, ctx, use_weber)?;
    let mu = m as usize;
    let at = |x: (u64, u64)| cache[x.0 as usize * mu + x.1 as usize];

    let ar = a.matrix().pow(r);
    let shared = ar.is_identity()
        || ar == MatrixModN::scalar(2, m, m - 1)
        || (use_weber && a.matrix().pow(r).det_unit() && {
            let units: Vec<MatrixModN> = field
                .units()
                .into_iter()
                .map(|(ua, ub)| OkElement::new(field, ua, ub, m).map(|e| e.matrix))
                .collect::<Result<_>>()?;
            units.contains(&ar)
        });

    let mut values = vec![Complex64::new(0.0, 0.0); mu * mu];
    let mut done = vec![false; mu * mu];
    done[0] = true;
    let mut orbit = Vec::new();
    for start in 1..mu * mu {
        if done[start] {
            continue;
        }
        let z0 = ((start / mu) as u64, (start % mu) as u64);
        orbit.clear();
        let mut cur = z0;
        loop {
            orbit.push(cur);
            cur = apply(a.matrix(), cur);
            if cur == z0 {
                break;
            }
        }
        let len = orbit.len();
        let sum_from = |i: usize| -> Complex64 {
            let mut acc = ComplexSum::new();
            for j in 0..r as usize {
                acc.add(at(orbit[(i + j) % len]));
            }
            acc.value()
        };
        if shared {
            let v = sum_from(0);
            for &(x, y) in &orbit {
                values[x as usize * mu + y as usize] = v;
                done[x as usize * mu + y as usize] = true;
            }
        } else {
            for (i, &(x, y)) in orbit.iter().enumerate() {
                values[x as usize * mu + y as usize] = sum_from(i);
                done[x as usize * mu + y as usize] = true;
            }
        }
    }

    Ok((1..mu * mu)
        .map(|flat| {
            let (x, y) = ((flat / mu) as u64, (flat % mu) as u64);
            PlotPoint::new(&[x, y], values[flat], x % color_modulus)
        })
        .collect())
}

/// `w / (|w| + Nm(m)^{1/4})`, i.e. `w / (|w| + √m)`.
pub fn rescale_to_disc(w: Complex64, m: u64) -> Complex64 {
    rescale_to_disc_with(w, m, 0.25)
}

/// `w / (|w| + (m²)^{exponent})`.
pub fn rescale_to_disc_with(w: Complex64, m: u64, exponent: f64) -> Complex64 {
    let offset = (m as f64 * m as f64).powf(exponent);
    w / (w.norm() + offset)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinate {
    X,
    Y,
}

/// Point size `s_max · order^{−γ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionSizing {
    pub s_max: f64,
    pub gamma: f64,
}

impl Default for TorsionSizing {
    fn default() -> Self {
        Self {
            s_max: 8.0,
            gamma: 0.5,
        }
    }
}

/// ℘ (`X`) or ℘′ (`Y`) at every nonzero point of `E[m]`, sized by order and
/// colored by `a mod c`.
pub fn torsion_coordinate_plot(
    field: &FieldData,
    m: u64,
    coordinate: Coordinate,
    ctx: &LatticeContext,
    sizing: TorsionSizing,
    color_modulus: u64,
    budget: u64,
) -> Result<Vec<PlotPoint>> {
    if m < 2 {
        return Err(CmError::BadModulus { min: 2, got: m });
    }
    if color_modulus == 0 {
        return Err(CmError::BadModulus {
            min: 1,
            got: color_modulus,
        });
    }
    check_budget(m, budget)?;
    let points = torsion_points(m, field)?;
    points[1..]
        .par_iter()
        .map(|z| {
            let value = match coordinate {
                Coordinate::X => wp(z.lift, ctx)?,
                Coordinate::Y => wp_prime(z.lift, ctx)?,
            };
            let mut p = PlotPoint::new(&[z.a, z.b], value, z.a % color_modulus);
            p.size = sizing.s_max * (1.0 / z.order as f64).powf(sizing.gamma);
            Ok(p)
        })
        .collect()
}
