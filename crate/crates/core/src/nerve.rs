//! A sufficient condition for r-connectivity of a point order complex.
//!
//! Y_q is covered by the cones K_i = Y_q[{ℓ : q_ℓ ≥ q_i}] over its minimal
//! elements. Every intersection of two or more cones is the induced complex
//! above the join of two minimal points, so if each Y_q[{ℓ : q_ℓ ≥ q_i ∨ q_j}]
//! is (r−1)-connected the nerve lemma makes Y_q r-connected. A `false` answer
//! is inconclusive.

use crate::error::{Error, Result};
use crate::homotopy::{homotopy_type, HomotopyType};
use crate::point_model::PointConfig;

/// Homotopy type of the induced complex above q_i ∨ q_j.
pub fn pair_upper_type(q: &PointConfig, i: usize, j: usize) -> Result<HomotopyType> {
    let join = q.point(i)?.join(&q.point(j)?);
    let upper = q.upper_set(&join);
    Ok(homotopy_type(&q.subconfig(&upper)?.to_permutation()))
}

/// Whether every pair of distinct minimal elements has an (r−1)-connected
/// upper complex. `true` guarantees Y_q is r-connected.
pub fn sufficient_condition_holds(q: &PointConfig, r: i64) -> Result<bool> {
    if r < 1 {
        return Err(Error::InvalidArgument(format!("nerve condition needs r >= 1, got {r}")));
    }
    if q.is_empty() {
        return Err(Error::InvalidArgument("nerve condition needs at least one point".into()));
    }
    let minima = q.minimal_elements();
    for (k, &i) in minima.iter().enumerate() {
        for &j in &minima[k + 1..] {
            if !pair_upper_type(q, i, j)?.is_r_connected(r - 1)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use crate::point_model::Point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(pts: &[(f64, f64)]) -> PointConfig {
        PointConfig::new(pts.iter().map(|&(a, b)| Point::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn examples() {
        let chain = cfg(&[(0.1, 0.1), (0.5, 0.5), (0.9, 0.9)]);
        for r in 1..5 {
            assert!(sufficient_condition_holds(&chain, r).unwrap());
        }
        let antichain = cfg(&[(0.2, 0.7), (0.5, 0.1)]);
        assert!(!sufficient_condition_holds(&antichain, 1).unwrap());
        assert_eq!(pair_upper_type(&antichain, 1, 2).unwrap(), HomotopyType::Empty);
    }

    #[test]
    fn argument_checks() {
        let chain = cfg(&[(0.1, 0.1)]);
        assert!(sufficient_condition_holds(&chain, 0).is_err());
        assert!(sufficient_condition_holds(&cfg(&[]), 1).is_err());
    }

    #[test]
    fn sound_against_homology_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut confirmed = 0;
        for _ in 0..2_000 {
            let n = rng.gen_range(1..=12);
            let q = PointConfig::sample(n, &mut rng);
            for r in 1..=2 {
                if sufficient_condition_holds(&q, r).unwrap() {
                    assert!(q.order_complex().unwrap().is_r_connected_oracle(r).unwrap());
                    confirmed += 1;
                }
            }
        }
        assert!(confirmed > 100);
    }

    /// The intersection of the cones over a set J of minimal points is the
    /// upper complex of the pair maximizing each coordinate within J.
    #[test]
    fn cone_intersections_reduce_to_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut checked = 0;
        while checked < 500 {
            let q = PointConfig::sample(rng.gen_range(2..=10), &mut rng);
            let m = q.minimal_elements();
            let j_set: Vec<usize> = m.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
            if j_set.len() < 2 {
                continue;
            }
            let y = q.order_complex().unwrap();
            let mut faces: Option<Vec<Vec<usize>>> = None;
            for &t in &j_set {
                let cone = y.induced(&q.upper_set(&q.point(t).unwrap())).unwrap().faces();
                faces = Some(match faces {
                    None => cone,
                    Some(prev) => prev.into_iter().filter(|f| cone.contains(f)).collect(),
                });
            }
            let by_a = *j_set.iter().max_by(|&&x, &&z| q.point(x).unwrap().a.total_cmp(&q.point(z).unwrap().a)).unwrap();
            let by_b = *j_set.iter().max_by(|&&x, &&z| q.point(x).unwrap().b.total_cmp(&q.point(z).unwrap().b)).unwrap();
            let join = q.point(by_a).unwrap().join(&q.point(by_b).unwrap());
            let pair: SimplicialComplex = y.induced(&q.upper_set(&join)).unwrap();
            assert_eq!(faces.unwrap(), pair.faces());
            checked += 1;
        }
    }
}
