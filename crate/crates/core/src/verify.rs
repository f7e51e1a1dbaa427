//! Self-verification suites: each check recomputes a known identity or
//! inequality and reports pass or fail.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{BettiVector, SimplicialComplex};
use crate::error::{Error, Result};
use crate::experiment::{
    approx, claim42_bounds_check, exact_p_table, recursion_lower_rhs, recursion_lower_rhs_to_n,
    recursion_upper_rhs, region_probability_check, region_probability_check_with, thm_lower,
    thm_upper,
};
use crate::homotopy::{homotopy_type, homotopy_type_by_patterns, HomotopyType};
use crate::nerve::sufficient_condition_holds;
use crate::numerics::{
    self, f_exact, format_ratio, integral_i_exact, integral_i_mc, ratio, sweep_binomial_ratio,
    sweep_f, sweep_integral_bound, sweep_mixed_mean, SweepReport,
};
use crate::permutation::all_permutations;
use crate::point_model::{PointConfig, RegionSpec};

/// Master seed for every randomized check.
pub const VERIFY_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Oracle,
    Integrals,
    Bounds,
    Nerve,
    Regions,
    All,
}

impl Suite {
    const EACH: [Suite; 5] = [Suite::Oracle, Suite::Integrals, Suite::Bounds, Suite::Nerve, Suite::Regions];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Integrals => "integrals",
            Suite::Bounds => "bounds",
            Suite::Nerve => "nerve",
            Suite::Regions => "regions",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported for reference; never fails the run.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: &'static str,
    pub check: String,
    pub status: Status,
    pub detail: String,
}

/// Whether a homotopy type and GF(2) reduced Betti numbers agree dimension
/// by dimension, with contractible exactly when all vanish.
pub fn agrees_with_betti(h: &HomotopyType, b: &BettiVector) -> bool {
    match h {
        HomotopyType::Empty => b.is_empty,
        HomotopyType::Contractible => !b.is_empty && b.is_acyclic(),
        HomotopyType::Wedge(m) => {
            !b.is_empty
                && m.keys().all(|&d| d < b.betti.len())
                && (0..b.betti.len()).all(|d| h.count(d) == BigUint::from(b.get(d)))
        }
    }
}

struct Rows {
    suite: &'static str,
    rows: Vec<CheckRow>,
}

impl Rows {
    fn new(suite: Suite) -> Self {
        Self { suite: suite.name(), rows: Vec::new() }
    }

    fn push(&mut self, check: impl Into<String>, passed: bool, detail: impl Into<String>) {
        let status = if passed { Status::Pass } else { Status::Fail };
        self.push_status(check, status, detail);
    }

    fn info(&mut self, check: impl Into<String>, detail: impl Into<String>) {
        self.push_status(check, Status::Info, detail);
    }

    fn push_status(&mut self, check: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.rows.push(CheckRow { suite: self.suite, check: check.into(), status, detail: detail.into() });
    }

    fn sweep(&mut self, check: &str, report: SweepReport) {
        let detail = if report.passed() {
            format!("{} cases", report.checked)
        } else {
            format!("{} of {} violated, first {}", report.violations.len(), report.checked, report.violations[0])
        };
        self.push(check, report.passed(), detail);
    }
}

/// Runs one suite (or all) with enumerations up to `max_n`.
pub fn run_suite(suite: Suite, max_n: usize) -> Result<Vec<CheckRow>> {
    if max_n < 1 {
        return Err(Error::InvalidArgument("max-n must be at least 1".into()));
    }
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut out = Vec::new();
    for s in suites {
        let mut rows = Rows::new(s);
        match s {
            Suite::Oracle => oracle(&mut rows, max_n)?,
            Suite::Integrals => integrals(&mut rows)?,
            Suite::Bounds => bounds(&mut rows, max_n)?,
            Suite::Nerve => nerve(&mut rows)?,
            Suite::Regions => regions(&mut rows)?,
            Suite::All => unreachable!(),
        }
        out.extend(rows.rows);
    }
    Ok(out)
}

pub fn all_passed(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.status != Status::Fail)
}

fn oracle(rows: &mut Rows, max_n: usize) -> Result<()> {
    for n in 1..=max_n {
        let (mut total, mut betti_mismatch, mut pattern_mismatch) = (0u64, 0u64, 0u64);
        for pi in all_permutations(n) {
            let h = homotopy_type(&pi);
            let b = SimplicialComplex::order_complex(&pi)?.betti_gf2();
            betti_mismatch += u64::from(!agrees_with_betti(&h, &b));
            pattern_mismatch += u64::from(h != homotopy_type_by_patterns(&pi));
            total += 1;
        }
        rows.push(
            format!("types vs GF(2) Betti, n={n}"),
            betti_mismatch == 0 && pattern_mismatch == 0,
            format!("{total} permutations, {betti_mismatch} Betti and {pattern_mismatch} recursion mismatches"),
        );
    }
    Ok(())
}

fn integrals(rows: &mut Rows) -> Result<()> {
    let spots = [
        ("I(0,0)", integral_i_exact(0, 0)?, ratio(1, 1)),
        ("I(0,1)", integral_i_exact(0, 1)?, ratio(1, 9)),
        ("I(1,0)", integral_i_exact(1, 0)?, ratio(5, 9)),
        ("F(4,1)", f_exact(4, 1)?, ratio(5, 3)),
    ];
    for (name, got, want) in spots {
        rows.push(format!("{name} = {}", format_ratio(&want)), got == want, format_ratio(&got));
    }
    rows.sweep("I(k,l) bound, k,l <= 20", sweep_integral_bound(20)?);
    rows.sweep("F(N,t) bound, N <= 200", sweep_f(200));
    rows.sweep("binomial ratio bound, l,j <= 60", sweep_binomial_ratio(60));
    rows.sweep("mixed simplex mean bound, beta_i <= 15", sweep_mixed_mean(15)?);
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
    for (k, l) in [(1, 0), (2, 1), (3, 5)] {
        let exact = numerics::to_f64(&integral_i_exact(k, l)?);
        let mc = integral_i_mc(k as u32, l as u32, 200_000, &mut rng)?;
        rows.push(
            format!("I({k},{l}) Monte Carlo within 4 sigma"),
            mc.agrees_with(exact, 4.0),
            format!("{:.6} +- {:.6} vs {exact:.6}", mc.estimate, mc.stderr),
        );
    }
    Ok(())
}

fn bounds(rows: &mut Rows, max_n: usize) -> Result<()> {
    let tables: Vec<Vec<BigRational>> = (0..=max_n).map(|n| exact_p_table(n, 2)).collect::<Result<_>>()?;
    let p = |n: usize, r: i64| &tables[n][(r + 1) as usize];
    for n in 2..=max_n {
        rows.push(format!("1/n <= p_0(n) <= 4/n, n={n}"), claim42_bounds_check(n)?, format_ratio(p(n, 0)));
    }
    let mut violations = Vec::new();
    for n in 2..=max_n {
        for r in 0..=2u32 {
            let v = approx(p(n, r as i64));
            if v < thm_lower(n, r).max(0.0) || v > thm_upper(n, r).min(1.0) {
                violations.push(format!("(n={n}, r={r})"));
            }
        }
    }
    rows.push(
        format!("theorem bounds, 2 <= n <= {max_n}, r <= 2"),
        violations.is_empty(),
        if violations.is_empty() { "all within".into() } else { violations.join(" ") },
    );
    rows.info(
        "theorem lower bound at n=1, r=0",
        format!("p_0(1) = {} but the bound is {}", format_ratio(p(1, 0)), thm_lower(1, 0)),
    );
    for r in 1..=2i64 {
        let prev: Vec<BigRational> = (0..=max_n).map(|n| p(n, r - 1).clone()).collect();
        let prev_f: Vec<f64> = prev.iter().map(approx).collect();
        let mut failures = Vec::new();
        let mut displayed_above = Vec::new();
        for n in 3..=max_n {
            let lower = recursion_lower_rhs(n, r, &prev)?;
            let upper = recursion_upper_rhs(n, r, &prev_f)?;
            if &lower > p(n, r) || approx(p(n, r)) > upper {
                failures.push(format!("n={n}"));
            }
            if &recursion_lower_rhs_to_n(n, r, &prev)? > p(n, r) {
                displayed_above.push(format!("n={n}"));
            }
        }
        rows.push(
            format!("recursions bracket p_{r}(n), 3 <= n <= {max_n}"),
            failures.is_empty(),
            if failures.is_empty() { "all bracketed".into() } else { failures.join(" ") },
        );
        if max_n >= 3 {
            rows.info(
                format!("lower recursion summed to i=n, r={r}"),
                format!(
                    "n=3 gives {} vs p = {}; exceeds p at [{}]",
                    format_ratio(&recursion_lower_rhs_to_n(3, r, &prev)?),
                    format_ratio(p(3, r)),
                    displayed_above.join(" ")
                ),
            );
        }
    }
    Ok(())
}

fn nerve(rows: &mut Rows) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED ^ 1);
    let (mut confirmed, mut violations) = (0u64, 0u64);
    for _ in 0..1_000 {
        let q = PointConfig::sample(rng.gen_range(1..=12), &mut rng);
        let complex = q.order_complex()?;
        for r in 1..=2 {
            if sufficient_condition_holds(&q, r)? {
                if complex.is_r_connected_oracle(r)? {
                    confirmed += 1;
                } else {
                    violations += 1;
                }
            }
        }
    }
    rows.push(
        "nerve condition sound, 1000 configs",
        violations == 0,
        format!("{confirmed} confirmed, {violations} violations"),
    );
    let mut mismatches = 0u64;
    for _ in 0..1_000 {
        let q = PointConfig::sample(rng.gen_range(0..=10), &mut rng);
        mismatches += u64::from(!q.matches_permutation_complex()?);
    }
    rows.push("point complex equals permutation complex, 1000 configs", mismatches == 0, format!("{mismatches} mismatches"));
    Ok(())
}

fn regions(rows: &mut Rows) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED ^ 2);
    let mismatches = (0..1_000)
        .filter(|_| {
            let spec = RegionSpec::sample(&mut rng);
            spec.volumes().middle != spec.middle_volume_barycentric()
        })
        .count();
    rows.push("area of E equals barycentric form, 1000 corners", mismatches == 0, format!("{mismatches} mismatches"));
    let quarter = RegionSpec::from_ratios((1, 4), (1, 2), (3, 4), (1, 4))?;
    let mut checks = vec![("1 in E, 1 in E+, fixed corners", region_probability_check_with(&quarter, 1, 1, 200_000, &mut rng)?)];
    checks.push(("2 in E, 1 in E+, random corners", region_probability_check(2, 1, 200_000, &mut rng)?));
    for (name, c) in checks {
        rows.push(
            format!("{name} within 4 sigma"),
            c.placement.passed,
            format!("{:.5} vs {:.5}", c.placement.observed, c.placement.expected),
        );
        rows.push(
            format!("incomparable pairs, {name}"),
            c.incomparable.passed,
            format!("{:.5} vs 0.5", c.incomparable.observed),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn betti_agreement() {
        let h = HomotopyType::from_counts([(1usize, 1u32), (2, 1)]);
        let b = BettiVector { betti: vec![0, 1, 1], is_empty: false };
        assert!(agrees_with_betti(&h, &b));
        assert!(!agrees_with_betti(&HomotopyType::Contractible, &b));
        assert!(agrees_with_betti(&HomotopyType::Empty, &BettiVector { betti: vec![], is_empty: true }));
    }

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Oracle, Suite::Bounds] {
            let rows = run_suite(suite, 5).unwrap();
            assert!(all_passed(&rows), "{rows:#?}");
        }
    }

    #[test]
    fn bounds_report_informational_rows() {
        let rows = run_suite(Suite::Bounds, 4).unwrap();
        let info: Vec<&CheckRow> = rows.iter().filter(|r| r.status == Status::Info).collect();
        assert_eq!(info.len(), 3);
        assert!(info[1].detail.starts_with("n=3 gives 2/3 vs p = 1/2"));
    }
}
