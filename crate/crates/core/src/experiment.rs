//! Exact and Monte Carlo estimation of p_r(n), the probability that the
//! complex of a uniform permutation of [n] is not r-connected, together with
//! the closed-form bounds and recursions it is compared against.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homotopy::{homotopy_type, is_r_connected_permutation, HomotopyType};
use crate::numerics::to_f64;
use crate::permutation::{all_permutations, Permutation};
use crate::point_model::{Point, Region, RegionSpec};

/// Largest n for which exact_p enumerates S_n.
pub const ENUMERATION_GUARD: usize = 10;

/// Samples per independently seeded generator stream.
pub const CHUNK_SIZE: u64 = 8192;

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Accepted window for n·p̂₀(n) at large n.
pub const CUT_CONSTANT_WINDOW: (f64, f64) = (1.90, 2.15);

fn check_level(r: i64) -> Result<()> {
    if r < -1 {
        Err(Error::InvalidLevel(r))
    } else {
        Ok(())
    }
}

/// Whether X_π fails to be r-connected. Level 0 uses the linear cut scan.
pub fn fails_connectivity(pi: &Permutation, r: i64) -> Result<bool> {
    check_level(r)?;
    match (pi.len(), r) {
        (0, _) => Ok(true),
        (_, -1) => Ok(false),
        (_, 0) => pi.is_disconnected(),
        _ => Ok(!is_r_connected_permutation(pi, r)?),
    }
}

/// Smallest r at which the type fails to be r-connected; `None` when it is
/// contractible.
pub fn failure_level(h: &HomotopyType) -> Option<i64> {
    match h {
        HomotopyType::Empty => Some(-1),
        HomotopyType::Contractible => None,
        HomotopyType::Wedge(_) => h.min_dimension().map(|d| d as i64),
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// p_r(n) by enumeration of S_n, with p_r(0) = 1.
pub fn exact_p(n: usize, r: i64) -> Result<BigRational> {
    check_level(r)?;
    if n > ENUMERATION_GUARD {
        return Err(Error::GuardExceeded { what: "n", value: n, guard: ENUMERATION_GUARD });
    }
    let mut failures = 0u64;
    for pi in all_permutations(n) {
        if fails_connectivity(&pi, r)? {
            failures += 1;
        }
    }
    Ok(BigRational::new(failures.into(), factorial(n)))
}

/// p_r(n) for every r in −1..=max_r from a single enumeration.
pub fn exact_p_table(n: usize, max_r: i64) -> Result<Vec<BigRational>> {
    check_level(max_r)?;
    if n > ENUMERATION_GUARD {
        return Err(Error::GuardExceeded { what: "n", value: n, guard: ENUMERATION_GUARD });
    }
    let mut at_level = vec![0u64; (max_r + 2) as usize];
    for pi in all_permutations(n) {
        if let Some(level) = failure_level(&homotopy_type(&pi)) {
            if level <= max_r {
                at_level[(level + 1) as usize] += 1;
            }
        }
    }
    let total = factorial(n);
    let mut cumulative = 0u64;
    Ok(at_level
        .into_iter()
        .map(|c| {
            cumulative += c;
            BigRational::new(cumulative.into(), total.clone())
        })
        .collect())
}

/// c₀ = 0 and c_r = Σ_{i<r} 1/i!.
pub fn c_constant(r: u32) -> BigRational {
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for i in 0..r {
        if i > 0 {
            term /= BigRational::from_integer(i.into());
        }
        sum += &term;
    }
    sum
}

/// 40^{r+1} (ln 3n)^{2r} / n.
pub fn thm_upper(n: usize, r: u32) -> f64 {
    let n = n as f64;
    40f64.powi(r as i32 + 1) * (3.0 * n).ln().powi(2 * r as i32) / n
}

/// (ln n)^r / (r! n) − c_r (ln n)^{r−1} / n, unclamped. The second term is
/// absent when c_r = 0.
pub fn thm_lower(n: usize, r: u32) -> f64 {
    let nf = n as f64;
    let ln = nf.ln();
    let r_fact: f64 = (1..=r).map(f64::from).product();
    let lead = ln.powi(r as i32) / (r_fact * nf);
    let c = to_f64(&c_constant(r));
    if c == 0.0 {
        lead
    } else {
        lead - c * ln.powi(r as i32 - 1) / nf
    }
}

/// 20(1 + ln n)(1/n + Σ_{k=0}^{n−3} p_{r−1}(n−2−k)/(k+2)), where
/// `p_prev[m]` = p_{r−1}(m).
pub fn recursion_upper_rhs(n: usize, r: i64, p_prev: &[f64]) -> Result<f64> {
    if n < 3 || r < 1 {
        return Err(Error::InvalidArgument(format!("upper recursion needs n >= 3, r >= 1, got n={n}, r={r}")));
    }
    if p_prev.len() < n - 1 {
        return Err(Error::InvalidArgument(format!("need p_(r-1)(m) for m <= {}", n - 2)));
    }
    let nf = n as f64;
    let sum: f64 = (0..=n - 3).map(|k| p_prev[n - 2 - k] / (k + 2) as f64).sum();
    Ok(20.0 * (1.0 + nf.ln()) * (1.0 / nf + sum))
}

/// (1/n)(1 + (1/(n−1)) Σ_{i=1}^{last} (i−1) p_{r−1}(n−i)), with
/// `p_prev[m]` = p_{r−1}(m) and p_{r−1}(0) = 1.
fn lower_rhs(n: usize, r: i64, p_prev: &[BigRational], last: usize) -> Result<BigRational> {
    if n < 2 || r < 1 {
        return Err(Error::InvalidArgument(format!("lower recursion needs n >= 2, r >= 1, got n={n}, r={r}")));
    }
    if p_prev.len() < n {
        return Err(Error::InvalidArgument(format!("need p_(r-1)(m) for m <= {}", n - 1)));
    }
    if !p_prev[0].is_one() {
        return Err(Error::InvalidArgument("p_(r-1)(0) must be 1".into()));
    }
    let sum: BigRational =
        (1..=last).map(|i| &p_prev[n - i] * BigRational::from_integer(BigInt::from(i - 1))).sum();
    let inner = BigRational::one() + sum / BigRational::from_integer(BigInt::from(n - 1));
    Ok(inner / BigRational::from_integer(BigInt::from(n)))
}

/// Lower recursion with the sum running to i = n − 1.
pub fn recursion_lower_rhs(n: usize, r: i64, p_prev: &[BigRational]) -> Result<BigRational> {
    lower_rhs(n, r, p_prev, n - 1)
}

/// Lower recursion with the sum running to i = n. Exceeds
/// [`recursion_lower_rhs`] by exactly 1/n.
pub fn recursion_lower_rhs_to_n(n: usize, r: i64, p_prev: &[BigRational]) -> Result<BigRational> {
    lower_rhs(n, r, p_prev, n)
}

/// 1/n ≤ p₀(n) ≤ 4/n, decided exactly by enumeration.
pub fn claim42_bounds_check(n: usize) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidArgument("needs n >= 2".into()));
    }
    let p = exact_p(n, 0)?;
    let nq = BigRational::from_integer(BigInt::from(n));
    Ok(p >= nq.recip() && p <= BigRational::from_integer(4.into()) / nq)
}

/// Monte Carlo form: the Wilson interval lies inside [1/n − slack, 4/n + slack].
pub fn claim42_bounds_check_mc(n: usize, samples: u64, seed: u64, workers: usize, slack: f64) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidArgument("needs n >= 2".into()));
    }
    let e = estimate_p(n, 0, samples, seed, workers)?;
    let nf = n as f64;
    Ok(e.ci_low >= 1.0 / nf - slack && e.ci_high <= 4.0 / nf + slack)
}

/// 95% Wilson score interval for `failures` out of `samples`.
pub fn wilson_interval(failures: u64, samples: u64) -> (f64, f64) {
    let n = samples as f64;
    let p = failures as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// One Monte Carlo estimate of p_r(n). Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateResult {
    pub n: usize,
    pub r: i64,
    pub samples: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub thm_lower: f64,
    pub thm_upper: f64,
    pub seed: u64,
}

fn chunk_failures(n: usize, r: i64, seed: u64, chunk: u64, len: u64) -> Result<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut failures = 0;
    for _ in 0..len {
        if fails_connectivity(&Permutation::sample_uniform(n, &mut rng), r)? {
            failures += 1;
        }
    }
    Ok(failures)
}

/// Estimates p_r(n) from `samples` uniform permutations.
///
/// Chunk c of [`CHUNK_SIZE`] samples draws from stream c of the generator
/// seeded by `seed`, so the result does not depend on `workers`.
pub fn estimate_p(n: usize, r: i64, samples: u64, seed: u64, workers: usize) -> Result<EstimateResult> {
    check_level(r)?;
    if n == 0 || samples == 0 || workers == 0 {
        return Err(Error::InvalidArgument("n, samples and workers must be positive".into()));
    }
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let failures: u64 = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| chunk_failures(n, r, seed, c, CHUNK_SIZE.min(samples - c * CHUNK_SIZE)))
            .collect::<Result<Vec<u64>>>()
    })?
    .into_iter()
    .sum();
    let (ci_low, ci_high) = wilson_interval(failures, samples);
    let (thm_lower, thm_upper) = match u32::try_from(r) {
        Ok(r) => (thm_lower(n, r).max(0.0), thm_upper(n, r)),
        Err(_) => (f64::NAN, f64::NAN),
    };
    Ok(EstimateResult {
        n,
        r,
        samples,
        failures,
        p_hat: failures as f64 / samples as f64,
        ci_low,
        ci_high,
        thm_lower,
        thm_upper,
        seed,
    })
}

/// Writes results as CSV with a header row.
pub fn write_csv<W: Write>(results: &[EstimateResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in results {
        w.serialize(row).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(())
}

/// Empirical frequency with its standard error under the predicted rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyCheck {
    pub expected: f64,
    pub observed: f64,
    pub sigma: f64,
    pub passed: bool,
}

impl FrequencyCheck {
    fn new(expected: f64, hits: u64, trials: u64, sigmas: f64) -> Self {
        let observed = hits as f64 / trials as f64;
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        Self { expected, observed, sigma, passed: (observed - expected).abs() <= sigmas * sigma }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionCheck {
    pub corners: [f64; 4],
    pub placement: FrequencyCheck,
    pub incomparable: FrequencyCheck,
}

impl RegionCheck {
    pub fn passed(&self) -> bool {
        self.placement.passed && self.incomparable.passed
    }
}

fn uniform_point<R: Rng + ?Sized>(rng: &mut R) -> Point {
    Point::new(rng.gen(), rng.gen())
}

/// Checks, within 4σ, that `n_d` uniform points all land in E(c) and `n_plus`
/// more in E₊(c) with probability vol(E)^{n_d} vol(E₊)^{n_plus}, and that two
/// uniform points are incomparable half the time.
pub fn region_probability_check_with<R: Rng + ?Sized>(
    spec: &RegionSpec,
    n_d: u32,
    n_plus: u32,
    trials: u64,
    rng: &mut R,
) -> Result<RegionCheck> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let vols = spec.volumes();
    let expected = to_f64(&vols.middle).powi(n_d as i32) * to_f64(&vols.upper).powi(n_plus as i32);
    let in_region = |p: Point, want: Region| spec.classify(&p).is_ok_and(|got| got == want);
    let mut hits = 0;
    for _ in 0..trials {
        let mut ok = true;
        for _ in 0..n_d {
            ok &= in_region(uniform_point(rng), Region::Middle);
        }
        for _ in 0..n_plus {
            ok &= in_region(uniform_point(rng), Region::Upper);
        }
        hits += u64::from(ok);
    }
    let mut incomparable = 0;
    for _ in 0..trials {
        let (p, q) = (uniform_point(rng), uniform_point(rng));
        incomparable += u64::from(!p.leq(&q) && !q.leq(&p));
    }
    let [a1, a2, b1, b2] = spec.corners_f64();
    Ok(RegionCheck {
        corners: [a1, a2, b1, b2],
        placement: FrequencyCheck::new(expected, hits, trials, 4.0),
        incomparable: FrequencyCheck::new(0.5, incomparable, trials, 4.0),
    })
}

/// [`region_probability_check_with`] on randomly drawn corners.
pub fn region_probability_check<R: Rng + ?Sized>(n_d: u32, n_plus: u32, trials: u64, rng: &mut R) -> Result<RegionCheck> {
    let spec = RegionSpec::sample(rng);
    region_probability_check_with(&spec, n_d, n_plus, trials, rng)
}

/// Convenience decimal view of an exact probability.
pub fn approx(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
