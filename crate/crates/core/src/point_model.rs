//! Random points in the unit square and their order complexes.
//!
//! A configuration of n points in general position determines a permutation
//! φ(q) = β⁻¹α, where α sorts indices by first coordinate and β by second;
//! the order complex of the points is isomorphic to X_{φ(q)}. Point indices
//! are 1-based.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{SimplicialComplex, DEFAULT_GUARD};
use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// A point of [0,1]².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub a: f64,
    pub b: f64,
}

impl Point {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Componentwise ≤.
    pub fn leq(&self, other: &Point) -> bool {
        self.a <= other.a && self.b <= other.b
    }

    /// Componentwise maximum q ∨ q′.
    pub fn join(&self, other: &Point) -> Point {
        Point { a: self.a.max(other.a), b: self.b.max(other.b) }
    }
}

impl From<[f64; 2]> for Point {
    fn from([a, b]: [f64; 2]) -> Self {
        Self { a, b }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.a, p.b]
    }
}

/// n points of [0,1]² with pairwise distinct first coordinates and pairwise
/// distinct second coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct PointConfig {
    points: Vec<Point>,
}

impl TryFrom<Vec<Point>> for PointConfig {
    type Error = Error;

    fn try_from(points: Vec<Point>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<PointConfig> for Vec<Point> {
    fn from(q: PointConfig) -> Self {
        q.points
    }
}

fn has_duplicates(mut xs: Vec<f64>) -> bool {
    xs.sort_by(f64::total_cmp);
    xs.windows(2).any(|w| w[0] == w[1])
}

impl PointConfig {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let in_square = |x: f64| (0.0..=1.0).contains(&x);
        if points.iter().any(|p| !in_square(p.a) || !in_square(p.b)) {
            return Err(Error::InvalidArgument("points must lie in [0,1]^2".into()));
        }
        if has_duplicates(points.iter().map(|p| p.a).collect())
            || has_duplicates(points.iter().map(|p| p.b).collect())
        {
            return Err(Error::GeneralPosition);
        }
        Ok(Self { points })
    }

    /// n i.i.d. uniform points. A coordinate that collides with an earlier
    /// one is redrawn.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut points: Vec<Point> = Vec::with_capacity(n);
        let mut seen_a = std::collections::HashSet::with_capacity(n);
        let mut seen_b = std::collections::HashSet::with_capacity(n);
        for _ in 0..n {
            let a = loop {
                let a: f64 = rng.gen();
                if seen_a.insert(a.to_bits()) {
                    break a;
                }
            };
            let b = loop {
                let b: f64 = rng.gen();
                if seen_b.insert(b.to_bits()) {
                    break b;
                }
            };
            points.push(Point { a, b });
        }
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// q_i for a 1-based index.
    pub fn point(&self, i: usize) -> Result<Point> {
        if i == 0 || i > self.len() {
            return Err(Error::IndexOutOfRange { index: i, n: self.len() });
        }
        Ok(self.points[i - 1])
    }

    /// Whether q_i < q_j or q_j < q_i componentwise.
    pub fn comparable(&self, i: usize, j: usize) -> bool {
        let (p, q) = (&self.points[i - 1], &self.points[j - 1]);
        (p.a < q.a && p.b < q.b) || (q.a < p.a && q.b < p.b)
    }

    fn order_by<F: Fn(&Point) -> f64>(&self, key: F) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&i, &j| key(&self.points[i]).total_cmp(&key(&self.points[j])));
        idx
    }

    /// rank_a[i - 1] is the rank (1-based) of a_i among the first
    /// coordinates.
    pub fn a_ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.len()];
        for (r, i) in self.order_by(|p| p.a).into_iter().enumerate() {
            ranks[i] = r + 1;
        }
        ranks
    }

    /// φ(q) = β⁻¹α.
    pub fn to_permutation(&self) -> Permutation {
        let alpha = self.order_by(|p| p.a);
        let mut beta_inv = vec![0; self.len()];
        for (r, i) in self.order_by(|p| p.b).into_iter().enumerate() {
            beta_inv[i] = r + 1;
        }
        Permutation::from_vec_unchecked(alpha.into_iter().map(|i| beta_inv[i]).collect())
    }

    /// M(q): indices of minimal points, ascending.
    pub fn minimal_elements(&self) -> Vec<usize> {
        let mut low_b = f64::INFINITY;
        let mut out = Vec::new();
        for i in self.order_by(|p| p.a) {
            if self.points[i].b < low_b {
                low_b = self.points[i].b;
                out.push(i + 1);
            }
        }
        out.sort_unstable();
        out
    }

    /// Indices ℓ with q_ℓ ≥ p componentwise, ascending.
    pub fn upper_set(&self, p: &Point) -> Vec<usize> {
        (1..=self.len()).filter(|&i| p.leq(&self.points[i - 1])).collect()
    }

    /// The configuration restricted to `indices` (1-based), in the given order.
    pub fn subconfig(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.point(i)).collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    /// Y_q: faces are the index sets forming chains in the componentwise
    /// order.
    pub fn order_complex(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::from_comparability(self.len(), DEFAULT_GUARD, |i, j| {
            self.comparable(i, j)
        })
    }

    /// Whether Y_q, relabelled by first-coordinate rank, has exactly the
    /// faces of X_{φ(q)}.
    pub fn matches_permutation_complex(&self) -> Result<bool> {
        let ranks = self.a_ranks();
        let mut relabelled: Vec<Vec<usize>> = self
            .order_complex()?
            .faces()
            .into_iter()
            .map(|f| {
                let mut g: Vec<usize> = f.iter().map(|&i| ranks[i - 1]).collect();
                g.sort_unstable();
                g
            })
            .collect();
        relabelled.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(relabelled == SimplicialComplex::order_complex(&self.to_permutation())?.faces())
    }
}

/// The three regions cut out of the square by two incomparable points
/// (a1, b1), (a2, b2) with a1 < a2 and b2 < b1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    /// E₋: below one of the two points.
    #[serde(rename = "E-")]
    Lower,
    /// E: neither below either point nor above their join.
    #[serde(rename = "E")]
    Middle,
    /// E₊: above the join.
    #[serde(rename = "E+")]
    Upper,
}

/// Corners c = (a1, a2, b1, b2) with exact rational coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSpec {
    a1: BigRational,
    a2: BigRational,
    b1: BigRational,
    b2: BigRational,
    float: [f64; 4],
}

/// Exact areas of E₋, E and E₊.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionVolumes {
    pub lower: BigRational,
    pub middle: BigRational,
    pub upper: BigRational,
}

impl RegionSpec {
    pub fn new(a1: BigRational, a2: BigRational, b1: BigRational, b2: BigRational) -> Result<Self> {
        let unit = |x: &BigRational| *x >= BigRational::zero() && *x <= BigRational::one();
        if !(a1 < a2 && b2 < b1 && [&a1, &a2, &b1, &b2].into_iter().all(unit)) {
            return Err(Error::InvalidRegion);
        }
        let f = |x: &BigRational| x.to_f64().expect("finite");
        let float = [f(&a1), f(&a2), f(&b1), f(&b2)];
        Ok(Self { a1, a2, b1, b2, float })
    }

    /// Convenience constructor from (numerator, denominator) pairs.
    pub fn from_ratios(a1: (i64, i64), a2: (i64, i64), b1: (i64, i64), b2: (i64, i64)) -> Result<Self> {
        let q = |(n, d): (i64, i64)| {
            if d == 0 {
                Err(Error::InvalidRegion)
            } else {
                Ok(BigRational::new(BigInt::from(n), BigInt::from(d)))
            }
        };
        Self::new(q(a1)?, q(a2)?, q(b1)?, q(b2)?)
    }

    /// Uniformly random corners on the grid of multiples of 2⁻³².
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let denom = BigInt::from(1u64 << 32);
        let grid = |rng: &mut R| -> u64 { rng.gen_range(0..=(1u64 << 32)) };
        loop {
            let (mut a1, mut a2) = (grid(rng), grid(rng));
            let (mut b2, mut b1) = (grid(rng), grid(rng));
            if a1 == a2 || b1 == b2 {
                continue;
            }
            if a1 > a2 {
                std::mem::swap(&mut a1, &mut a2);
            }
            if b2 > b1 {
                std::mem::swap(&mut b1, &mut b2);
            }
            let q = |x: u64| BigRational::new(BigInt::from(x), denom.clone());
            return Self::new(q(a1), q(a2), q(b1), q(b2)).expect("ordered grid corners");
        }
    }

    /// (a1, a2, b1, b2) as floats.
    pub fn corners_f64(&self) -> [f64; 4] {
        self.float
    }

    /// Barycentric triples x = (a1, a2 − a1, 1 − a2), y = (b2, b1 − b2, 1 − b1).
    pub fn barycentric(&self) -> ([BigRational; 3], [BigRational; 3]) {
        let one = BigRational::one();
        (
            [self.a1.clone(), &self.a2 - &self.a1, &one - &self.a2],
            [self.b2.clone(), &self.b1 - &self.b2, &one - &self.b1],
        )
    }

    pub fn volumes(&self) -> RegionVolumes {
        let lower = &self.a1 * &self.b1 + &self.a2 * &self.b2 - &self.a1 * &self.b2;
        let upper = (BigRational::one() - &self.a2) * (BigRational::one() - &self.b1);
        let middle = BigRational::one() - &lower - &upper;
        RegionVolumes { lower, middle, upper }
    }

    /// x₁y₃ + x₂(y₂+y₃) + x₃(y₁+y₂), which equals the area of E.
    pub fn middle_volume_barycentric(&self) -> BigRational {
        let ([x1, x2, x3], [y1, y2, y3]) = self.barycentric();
        &x1 * &y3 + &x2 * (&y2 + &y3) + &x3 * (&y1 + &y2)
    }

    /// Region containing `p`. The two defining corners belong to E; any
    /// other point on a region boundary is rejected.
    pub fn classify(&self, p: &Point) -> Result<Region> {
        let [a1, a2, b1, b2] = self.float;
        let (a, b) = (p.a, p.b);
        if (a == a1 && b == b1) || (a == a2 && b == b2) {
            return Ok(Region::Middle);
        }
        let on_upper_edge = (a == a2 && b >= b1) || (b == b1 && a >= a2);
        let on_lower_edge = (a == a1 && b2 <= b && b <= b1)
            || (b == b1 && a <= a1)
            || (a == a2 && b <= b2)
            || (b == b2 && a1 <= a && a <= a2);
        if on_upper_edge || on_lower_edge {
            return Err(Error::RegionBoundary);
        }
        if a > a2 && b > b1 {
            Ok(Region::Upper)
        } else if (a < a1 && b < b1) || (a < a2 && b < b2) {
            Ok(Region::Lower)
        } else {
            Ok(Region::Middle)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(pts: &[(f64, f64)]) -> PointConfig {
        PointConfig::new(pts.iter().map(|&(a, b)| Point::new(a, b)).collect()).unwrap()
    }

    fn example() -> PointConfig {
        cfg(&[(0.2, 0.7), (0.5, 0.1), (0.9, 0.4)])
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn quarter_spec() -> RegionSpec {
        RegionSpec::from_ratios((1, 4), (1, 2), (3, 4), (1, 4)).unwrap()
    }

    #[test]
    fn general_position_is_enforced() {
        assert_eq!(
            PointConfig::new(vec![Point::new(0.1, 0.2), Point::new(0.1, 0.3)]),
            Err(Error::GeneralPosition)
        );
        assert_eq!(
            PointConfig::new(vec![Point::new(0.1, 0.2), Point::new(0.3, 0.2)]),
            Err(Error::GeneralPosition)
        );
        assert!(PointConfig::new(vec![Point::new(1.5, 0.2)]).is_err());
    }

    #[test]
    fn sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(PointConfig::sample(0, &mut rng).is_empty());
        let a = PointConfig::sample(20, &mut ChaCha8Rng::seed_from_u64(2));
        let b = PointConfig::sample(20, &mut ChaCha8Rng::seed_from_u64(2));
        assert_eq!(a, b);
        assert!(PointConfig::new(a.points().to_vec()).is_ok());
    }

    #[test]
    fn permutation_of_points() {
        assert_eq!(example().to_permutation(), "312".parse().unwrap());
        let diagonal = cfg(&[(0.1, 0.1), (0.4, 0.4), (0.3, 0.3), (0.8, 0.8)]);
        assert_eq!(diagonal.to_permutation(), Permutation::identity(4));
        let anti = cfg(&[(0.1, 0.9), (0.4, 0.6), (0.3, 0.7), (0.8, 0.2)]);
        assert_eq!(anti.to_permutation(), Permutation::reversal(4));
        assert!(cfg(&[]).to_permutation().is_empty());
    }

    #[test]
    fn minimal_elements_examples() {
        let diagonal = cfg(&[(0.4, 0.4), (0.1, 0.1), (0.8, 0.8)]);
        assert_eq!(diagonal.minimal_elements(), vec![2]);
        assert_eq!(example().minimal_elements(), vec![1, 2]);
        let anti = cfg(&[(0.1, 0.9), (0.4, 0.6), (0.3, 0.7), (0.8, 0.2)]);
        assert_eq!(anti.minimal_elements(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn joins_and_upper_sets() {
        let (p, r) = (Point::new(0.2, 0.7), Point::new(0.5, 0.1));
        assert_eq!(p.join(&r), Point::new(0.5, 0.7));
        assert_eq!(p.join(&p), p);
        assert_eq!(Point::new(0.0, 0.0).join(&p), p);
        let q = example();
        assert_eq!(q.upper_set(&Point::new(0.0, 0.0)), vec![1, 2, 3]);
        assert!(q.upper_set(&Point::new(1.0, 1.0)).is_empty());
        assert!(q.upper_set(&p.join(&r)).is_empty());
    }

    #[test]
    fn json_roundtrip_keeps_full_precision() {
        let q = PointConfig::sample(5, &mut ChaCha8Rng::seed_from_u64(3));
        let text = serde_json::to_string(&q).unwrap();
        assert!(text.starts_with("[["));
        assert_eq!(serde_json::from_str::<PointConfig>(&text).unwrap(), q);
        assert!(serde_json::from_str::<PointConfig>("[[0.1,0.2],[0.1,0.3]]").is_err());
    }

    #[test]
    fn region_volume_examples() {
        let v = quarter_spec().volumes();
        assert_eq!((v.lower, v.middle.clone(), v.upper), (q(1, 4), q(5, 8), q(1, 8)));
        let (x, y) = quarter_spec().barycentric();
        assert_eq!(x, [q(1, 4), q(1, 4), q(1, 2)]);
        assert_eq!(y, [q(1, 4), q(1, 2), q(1, 4)]);
        assert_eq!(quarter_spec().middle_volume_barycentric(), v.middle);
        let strip = RegionSpec::from_ratios((0, 1), (1, 1), (1, 2), (1, 3)).unwrap();
        assert_eq!(strip.volumes().upper, q(0, 1));
    }

    #[test]
    fn invalid_regions() {
        assert_eq!(
            RegionSpec::from_ratios((1, 2), (1, 4), (3, 4), (1, 4)),
            Err(Error::InvalidRegion)
        );
        assert_eq!(
            RegionSpec::from_ratios((1, 4), (1, 2), (1, 4), (3, 4)),
            Err(Error::InvalidRegion)
        );
        assert!(RegionSpec::from_ratios((1, 4), (3, 2), (3, 4), (1, 4)).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = quarter_spec();
        assert_eq!(c.classify(&Point::new(0.9, 0.9)), Ok(Region::Upper));
        assert_eq!(c.classify(&Point::new(0.1, 0.1)), Ok(Region::Lower));
        assert_eq!(c.classify(&Point::new(0.4, 0.2)), Ok(Region::Lower));
        assert_eq!(c.classify(&Point::new(0.4, 0.5)), Ok(Region::Middle));
        assert_eq!(c.classify(&Point::new(0.9, 0.1)), Ok(Region::Middle));
        assert_eq!(c.classify(&Point::new(0.25, 0.75)), Ok(Region::Middle));
        assert_eq!(c.classify(&Point::new(0.5, 0.25)), Ok(Region::Middle));
        assert_eq!(c.classify(&Point::new(0.5, 0.9)), Err(Error::RegionBoundary));
        assert_eq!(c.classify(&Point::new(0.1, 0.75)), Err(Error::RegionBoundary));
        assert_eq!(c.classify(&Point::new(0.4, 0.25)), Err(Error::RegionBoundary));
        // interior of E₋ along a coordinate line of a corner
        assert_eq!(c.classify(&Point::new(0.25, 0.1)), Ok(Region::Lower));
    }

    #[test]
    fn region_frequencies_match_areas() {
        let c = quarter_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let trials = 1_000_000;
        let mut counts = [0usize; 3];
        let mut drawn = 0;
        while drawn < trials {
            let p = Point::new(rng.gen(), rng.gen());
            match c.classify(&p) {
                Ok(Region::Lower) => counts[0] += 1,
                Ok(Region::Middle) => counts[1] += 1,
                Ok(Region::Upper) => counts[2] += 1,
                Err(_) => continue,
            }
            drawn += 1;
        }
        for (count, expect) in counts.iter().zip([0.25, 0.625, 0.125]) {
            let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
            assert!((*count as f64 / trials as f64 - expect).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn incomparable_pairs_half_the_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let trials = 1_000_000;
        let hits = (0..trials)
            .filter(|_| !PointConfig::sample(2, &mut rng).comparable(1, 2))
            .count();
        let sigma = (0.25 / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - 0.5).abs() < 3.0 * sigma);
    }

    /// Y_q and X_φ(q) agree as face sets once vertex i is relabelled by the
    /// rank of a_i.
    #[test]
    fn point_complex_matches_permutation_complex() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 0..=10 {
            for _ in 0..50 {
                let q = PointConfig::sample(n, &mut rng);
                let ranks = q.a_ranks();
                let relabelled: Vec<Vec<usize>> = q
                    .order_complex()
                    .unwrap()
                    .faces()
                    .into_iter()
                    .map(|f| {
                        let mut g: Vec<usize> = f.iter().map(|&i| ranks[i - 1]).collect();
                        g.sort_unstable();
                        g
                    })
                    .collect();
                let x = SimplicialComplex::order_complex(&q.to_permutation()).unwrap();
                assert_eq!(relabelled.len(), x.face_count());
                assert!(relabelled.iter().all(|f| x.contains_face(f)));
                assert!(q.matches_permutation_complex().unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn join_laws(p in (0.0..1.0f64, 0.0..1.0f64), r in (0.0..1.0f64, 0.0..1.0f64), s in (0.0..1.0f64, 0.0..1.0f64)) {
            let (p, r, s) = (Point::new(p.0, p.1), Point::new(r.0, r.1), Point::new(s.0, s.1));
            prop_assert_eq!(p.join(&r), r.join(&p));
            prop_assert_eq!(p.join(&r).join(&s), p.join(&r.join(&s)));
            prop_assert_eq!(p.join(&p), p);
        }

        #[test]
        fn minimal_elements_form_a_dominating_antichain(seed in any::<u64>(), n in 1usize..30) {
            let q = PointConfig::sample(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let m = q.minimal_elements();
            for &i in &m {
                for &j in &m {
                    prop_assert!(i == j || !q.comparable(i, j));
                }
            }
            for i in 1..=n {
                let p = q.point(i).unwrap();
                prop_assert!(m.iter().any(|&k| q.point(k).unwrap().leq(&p)));
            }
        }

        #[test]
        fn region_volumes_partition_and_identity(seed in any::<u64>()) {
            let c = RegionSpec::sample(&mut ChaCha8Rng::seed_from_u64(seed));
            let v = c.volumes();
            prop_assert_eq!(&v.lower + &v.middle + &v.upper, BigRational::one());
            prop_assert_eq!(c.middle_volume_barycentric(), v.middle);
        }
    }
}
