//! Exact rational evaluation of simplex integrals and the binomial
//! inequalities behind the upper-bound estimate.
//!
//! Integrals over Δ_k are reported normalized by vol(Δ_k) = √(k+1)/k!, which
//! cancels every irrational factor. The one transcendental ingredient,
//! 1 + ln(k+1), is bracketed by rationals from a truncated atanh series, so
//! inequality checks are decided exactly.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on the total degree k + ℓ for exact evaluation.
pub const DEFAULT_GUARD: usize = 60;

fn factorials(upto: usize) -> Vec<BigUint> {
    let mut f = Vec::with_capacity(upto + 1);
    f.push(BigUint::one());
    for i in 1..=upto {
        let next = &f[i - 1] * i;
        f.push(next);
    }
    f
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn uint_ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `num/den` rendering used on the command line.
pub fn format_ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// ∫_{Δ_k} ∏ x_i^{α_i} dx = √(k+1) · `rational`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexIntegral {
    pub rational: BigRational,
    /// The integral carries a factor √`sqrt_of`.
    pub sqrt_of: usize,
    dim: usize,
}

impl SimplexIntegral {
    /// The integral divided by vol(Δ_k): the mean of the monomial.
    pub fn normalized(&self) -> BigRational {
        let kfact: BigUint = (1..=self.dim).map(BigUint::from).product();
        &self.rational * BigRational::from_integer(kfact.into())
    }
}

/// Dirichlet integral of a monomial over Δ_k, with k + 1 = `exponents.len()`:
/// α₁!⋯α_{k+1}! / (k + Σα)! times √(k+1).
pub fn simplex_monomial_integral(exponents: &[u32]) -> Result<SimplexIntegral> {
    if exponents.len() < 2 {
        return Err(Error::InvalidArgument("need at least two exponents (k >= 1)".into()));
    }
    let k = exponents.len() - 1;
    let total: usize = exponents.iter().map(|&a| a as usize).sum();
    let f = factorials(k + total);
    let num: BigUint = exponents.iter().map(|&a| f[a as usize].clone()).product();
    Ok(SimplexIntegral { rational: uint_ratio(num, f[k + total].clone()), sqrt_of: k + 1, dim: k })
}

fn check_guard(k: usize, l: usize, guard: usize) -> Result<()> {
    if k + l > guard {
        Err(Error::GuardExceeded { what: "k + l", value: k + l, guard })
    } else {
        Ok(())
    }
}

/// Σ_{a,b} C(β₂,a) C(β₃,b) · b! (a+β₃−b)! (β₁+β₂−a)!: the numerator of the
/// expanded integral of y₃^β₁ (y₂+y₃)^β₂ (y₁+y₂)^β₃ over Δ₂ with common
/// denominator (β₁+β₂+β₃+2)!/2.
fn mixed_numerator(f: &[BigUint], beta: [usize; 3]) -> BigUint {
    let [b1, b2, b3] = beta;
    let mut sum = BigUint::zero();
    for a in 0..=b2 {
        let ca = binomial(b2, a);
        for b in 0..=b3 {
            sum += &ca * binomial(b3, b) * &f[b] * &f[a + b3 - b] * &f[b1 + b2 - a];
        }
    }
    sum
}

/// Mean over Δ₂ of y₃^β₁ (y₂+y₃)^β₂ (y₁+y₂)^β₃, by binomial expansion into
/// monomials.
pub fn mixed_simplex_mean(beta: [u32; 3]) -> BigRational {
    let beta = beta.map(|b| b as usize);
    let s: usize = beta.iter().sum();
    let f = factorials(s + 2);
    uint_ratio(mixed_numerator(&f, beta) * 2u32, f[s + 2].clone())
}

/// I(k,ℓ): mean over Δ₂ × Δ₂ of (x₁y₃ + x₂(y₂+y₃) + x₃(y₁+y₂))^k (x₃y₃)^ℓ.
///
/// The k-th power is expanded over compositions α of k; each term factors
/// into an x-monomial mean and a mixed y-mean, giving
/// I = 4 k! / ((k+ℓ+2)!)² · Σ_α (α₃+ℓ)!/α₃! · S_y(α₁+ℓ, α₂, α₃).
pub fn integral_i_exact(k: usize, l: usize) -> Result<BigRational> {
    integral_i_exact_with_guard(k, l, DEFAULT_GUARD)
}

pub fn integral_i_exact_with_guard(k: usize, l: usize, guard: usize) -> Result<BigRational> {
    check_guard(k, l, guard)?;
    let f = factorials(k + l + 2);
    let mut sum = BigUint::zero();
    for a1 in 0..=k {
        for a2 in 0..=k - a1 {
            let a3 = k - a1 - a2;
            let rising = &f[a3 + l] / &f[a3];
            sum += rising * mixed_numerator(&f, [a1 + l, a2, a3]);
        }
    }
    let den = &f[k + l + 2] * &f[k + l + 2];
    Ok(uint_ratio(sum * 4u32 * &f[k], den))
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    /// Whether `exact` lies within `sigmas` standard errors.
    pub fn agrees_with(&self, exact: f64, sigmas: f64) -> bool {
        (self.estimate - exact).abs() <= sigmas * self.stderr
    }
}

/// Uniform point of Δ₂ from the spacings of two sorted uniforms.
pub fn sample_simplex2<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let (u, v): (f64, f64) = (rng.gen(), rng.gen());
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    [lo, hi - lo, 1.0 - hi]
}

/// Running mean and variance (Welford).
#[derive(Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn finish(self) -> McEstimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        McEstimate { estimate: self.mean, stderr: (var / self.n as f64).sqrt(), samples: self.n }
    }
}

/// Monte Carlo estimate of I(k,ℓ) from uniform samples of Δ₂ × Δ₂.
pub fn integral_i_mc<R: Rng + ?Sized>(k: u32, l: u32, samples: u64, rng: &mut R) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut m = Moments::default();
    for _ in 0..samples {
        let [x1, x2, x3] = sample_simplex2(rng);
        let [y1, y2, y3] = sample_simplex2(rng);
        let e = x1 * y3 + x2 * (y2 + y3) + x3 * (y1 + y2);
        m.push(e.powi(k as i32) * (x3 * y3).powi(l as i32));
    }
    Ok(m.finish())
}

/// Monte Carlo estimate of the mean of y₃^β₁ (y₂+y₃)^β₂ (y₁+y₂)^β₃ over Δ₂.
pub fn mixed_simplex_mean_mc<R: Rng + ?Sized>(beta: [u32; 3], samples: u64, rng: &mut R) -> McEstimate {
    let mut m = Moments::default();
    for _ in 0..samples.max(1) {
        let [y1, y2, y3] = sample_simplex2(rng);
        m.push(
            y3.powi(beta[0] as i32) * (y2 + y3).powi(beta[1] as i32) * (y1 + y2).powi(beta[2] as i32),
        );
    }
    m.finish()
}

/// Number of atanh series terms; the truncation error is below 9⁻⁴⁰.
const ATANH_TERMS: u32 = 40;

/// Lower and upper rational bounds on 2·atanh(z) for 0 ≤ z ≤ 1/3.
fn two_atanh_bounds(z: &BigRational) -> (BigRational, BigRational) {
    let z2 = z * z;
    let mut power = z.clone();
    let mut sum = BigRational::zero();
    for m in 0..ATANH_TERMS {
        sum += &power / BigRational::from_integer(BigInt::from(2 * m + 1));
        power = &power * &z2;
    }
    // remaining terms are dominated by a geometric series
    let tail = &power
        / (BigRational::from_integer(BigInt::from(2 * ATANH_TERMS + 1)) * (BigRational::one() - &z2));
    let two = BigRational::from_integer(2.into());
    (&sum * &two, (sum + tail) * two)
}

/// Rational bounds lo ≤ ln(x) ≤ hi, for x ≥ 1.
pub fn ln_bounds(x: u64) -> (BigRational, BigRational) {
    assert!(x >= 1, "ln_bounds needs x >= 1");
    let m = 63 - x.leading_zeros();
    // x = 2^m · y with 1 ≤ y < 2; ln y = 2 atanh((y-1)/(y+1))
    let y = ratio(x, 1u64 << m);
    let z = (&y - BigRational::one()) / (&y + BigRational::one());
    let (ly_lo, ly_hi) = two_atanh_bounds(&z);
    let (l2_lo, l2_hi) = two_atanh_bounds(&ratio(1, 3));
    let m = BigRational::from_integer(m.into());
    (&m * l2_lo + ly_lo, m * l2_hi + ly_hi)
}

/// The upper bound on I(k,ℓ):
/// 40/(k+2) · C(k+ℓ+2,2)⁻¹ · C(k+ℓ,k)⁻¹ · (1 + ln(k+1)).
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralBound {
    pub k: usize,
    pub l: usize,
    pub exact: BigRational,
    /// The bound without its (1 + ln(k+1)) factor.
    pub factor: BigRational,
    pub log_term: f64,
    pub bound: f64,
    /// A rational no larger than the true bound.
    pub bound_lower: BigRational,
    pub holds: bool,
}

pub fn integral_bound(k: usize, l: usize) -> Result<IntegralBound> {
    let exact = integral_i_exact(k, l)?;
    let den = binomial(k + l + 2, 2) * binomial(k + l, k) * (k + 2);
    let factor = uint_ratio(BigUint::from(40u32), den);
    let (ln_lo, _) = ln_bounds(k as u64 + 1);
    let bound_lower = &factor * (BigRational::one() + ln_lo);
    let log_term = 1.0 + ((k + 1) as f64).ln();
    Ok(IntegralBound {
        k,
        l,
        holds: exact <= bound_lower,
        bound: to_f64(&factor) * log_term,
        exact,
        factor,
        log_term,
        bound_lower,
    })
}

/// An inequality lhs ≤ rhs decided in exact arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityCheck {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(lhs: BigRational, rhs: BigRational) -> Self {
        Self { holds: lhs <= rhs, lhs, rhs }
    }
}

/// F(N,t) = C(N, ⌈N/2⌉+t) Σ_{i=0}^t C(N, ⌈N/2⌉+i)⁻¹, for N ≥ 2t.
pub fn f_exact(n: usize, t: usize) -> Result<BigRational> {
    if n < 2 * t {
        return Err(Error::InvalidArgument(format!("F(N,t) needs N >= 2t, got N={n}, t={t}")));
    }
    let c = n.div_ceil(2);
    let sum: BigRational = (0..=t).map(|i| uint_ratio(BigUint::one(), binomial(n, c + i))).sum();
    Ok(sum * BigRational::from_integer(binomial(n, c + t).into()))
}

/// 1 + min{t, N/t}, reading the minimum as 0 when t = 0.
pub fn f_bound(n: usize, t: usize) -> BigRational {
    let one = BigRational::one();
    if t == 0 {
        return one;
    }
    let t_q = ratio(t as u64, 1u64);
    let n_over_t = ratio(n as u64, t as u64);
    one + if t_q < n_over_t { t_q } else { n_over_t }
}

pub fn f_check(n: usize, t: usize) -> Result<InequalityCheck> {
    Ok(InequalityCheck::new(f_exact(n, t)?, f_bound(n, t)))
}

/// C(2ℓ+j, ℓ+j) Σ_{i=0}^j C(2ℓ+j, ℓ+i)⁻¹ ≤ 10(ℓ+j+1)/(j+1).
pub fn binomial_ratio_check(l: usize, j: usize) -> InequalityCheck {
    let n = 2 * l + j;
    let sum: BigRational = (0..=j).map(|i| uint_ratio(BigUint::one(), binomial(n, l + i))).sum();
    let lhs = sum * BigRational::from_integer(binomial(n, l + j).into());
    InequalityCheck::new(lhs, ratio(10 * (l + j + 1) as u64, (j + 1) as u64))
}

/// Mean over Δ₂ of y₃^β₁ (y₂+y₃)^β₂ (y₁+y₂)^β₃ against
/// 2 β₁! β₃! / ((β₂+1)(β₁+β₃+1)!).
pub fn mixed_mean_check(beta: [u32; 3]) -> Result<InequalityCheck> {
    let s: usize = beta.iter().map(|&b| b as usize).sum();
    if s > DEFAULT_GUARD {
        return Err(Error::GuardExceeded { what: "beta sum", value: s, guard: DEFAULT_GUARD });
    }
    let [b1, b2, b3] = beta.map(|b| b as usize);
    let f = factorials(b1 + b3 + 1);
    let rhs = uint_ratio(&f[b1] * &f[b3] * 2u32, &f[b1 + b3 + 1] * (b2 + 1));
    Ok(InequalityCheck::new(mixed_simplex_mean(beta), rhs))
}

/// Outcome of an exhaustive inequality sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, holds: bool, label: impl FnOnce() -> String) {
        self.checked += 1;
        if !holds {
            self.violations.push(label());
        }
    }
}

/// The I(k,ℓ) bound for all 0 ≤ k, ℓ ≤ `max`.
pub fn sweep_integral_bound(max: usize) -> Result<SweepReport> {
    let mut report = SweepReport::default();
    for k in 0..=max {
        for l in 0..=max {
            let b = integral_bound(k, l)?;
            report.record(b.holds, || format!("I({k},{l})"));
        }
    }
    Ok(report)
}

/// F(N,t) ≤ 1 + min{t, N/t} for all N ≤ `max_n`, 2t ≤ N. Partial sums are
/// shared across t.
pub fn sweep_f(max_n: usize) -> SweepReport {
    let mut report = SweepReport::default();
    for n in 0..=max_n {
        let c = n.div_ceil(2);
        let mut partial = BigRational::zero();
        for t in 0..=n / 2 {
            partial += uint_ratio(BigUint::one(), binomial(n, c + t));
            let value = &partial * BigRational::from_integer(binomial(n, c + t).into());
            report.record(value <= f_bound(n, t), || format!("F({n},{t})"));
        }
    }
    report
}

pub fn sweep_binomial_ratio(max: usize) -> SweepReport {
    let mut report = SweepReport::default();
    for l in 0..=max {
        for j in 0..=max {
            report.record(binomial_ratio_check(l, j).holds, || format!("(l={l}, j={j})"));
        }
    }
    report
}

pub fn sweep_mixed_mean(max: u32) -> Result<SweepReport> {
    let mut report = SweepReport::default();
    for b1 in 0..=max {
        for b2 in 0..=max {
            for b3 in 0..=max {
                let c = mixed_mean_check([b1, b2, b3])?;
                report.record(c.holds, || format!("beta=({b1},{b2},{b3})"));
            }
        }
    }
    Ok(report)
}

/// Whether `q` is in lowest terms with a positive denominator.
pub fn is_reduced(q: &BigRational) -> bool {
    q.numer().gcd(q.denom()).is_one() && q.denom() > &BigInt::zero()
}
