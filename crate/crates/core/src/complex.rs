//! Explicit simplicial complexes with brute-force homology over GF(2).
//!
//! This is the ground truth the recursive classifier is checked against, so
//! it deliberately shares no logic with [`crate::homotopy`]. Faces are
//! bitmasks over vertex labels 1..=32 (bit `v - 1` for label `v`); the
//! enumeration guard keeps face counts tractable.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// Default cap on the number of vertices enumerated by brute force.
pub const DEFAULT_GUARD: usize = 16;
const MAX_LABEL: usize = 32;

/// A finite simplicial complex stored as its set of nonempty faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<usize>,
    faces: BTreeSet<u32>,
}

/// Reduced Betti numbers over GF(2), indexed by dimension from 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    pub betti: Vec<u64>,
    pub is_empty: bool,
}

impl BettiVector {
    /// True when every reduced Betti number vanishes on a nonempty complex.
    pub fn is_acyclic(&self) -> bool {
        !self.is_empty && self.betti.iter().all(|&b| b == 0)
    }

    pub fn get(&self, dim: usize) -> u64 {
        self.betti.get(dim).copied().unwrap_or(0)
    }
}

fn bit(label: usize) -> u32 {
    1u32 << (label - 1)
}

/// Mask of all labels strictly greater than `label`.
fn above(label: usize) -> u32 {
    u32::MAX.checked_shl(label as u32).unwrap_or(0)
}

fn labels_of(mask: u32) -> impl Iterator<Item = usize> {
    (0..MAX_LABEL).filter(move |b| mask >> b & 1 == 1).map(|b| b + 1)
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self { vertices: Vec::new(), faces: BTreeSet::new() }
    }

    /// The complex generated by `maximal` faces (given as label lists) plus
    /// the listed isolated `vertices`.
    pub fn from_faces(vertices: &[usize], maximal: &[Vec<usize>]) -> Result<Self> {
        let mut verts: BTreeSet<usize> = vertices.iter().copied().collect();
        let mut faces = BTreeSet::new();
        for face in maximal {
            verts.extend(face.iter().copied());
        }
        if verts.iter().any(|&v| v == 0 || v > MAX_LABEL) {
            return Err(Error::InvalidArgument(format!("labels must lie in 1..={MAX_LABEL}")));
        }
        for face in maximal {
            let mask = face.iter().fold(0u32, |m, &v| m | bit(v));
            // every nonempty submask
            let mut sub = mask;
            while sub != 0 {
                faces.insert(sub);
                sub = (sub - 1) & mask;
            }
        }
        for &v in &verts {
            faces.insert(bit(v));
        }
        Ok(Self { vertices: verts.into_iter().collect(), faces })
    }

    /// The order complex of a poset on 1..=n given by a symmetric
    /// comparability test: its faces are the pairwise comparable sets.
    pub fn from_comparability<F>(n: usize, guard: usize, comparable: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> bool,
    {
        if n > guard.min(MAX_LABEL) {
            return Err(Error::GuardExceeded { what: "n", value: n, guard: guard.min(MAX_LABEL) });
        }
        let mut adjacent = vec![0u32; n + 1];
        for i in 1..=n {
            for j in i + 1..=n {
                if comparable(i, j) {
                    adjacent[i] |= bit(j);
                    adjacent[j] |= bit(i);
                }
            }
        }
        let mut faces = BTreeSet::new();
        // extend each chain only by larger labels adjacent to all its members
        let mut stack: Vec<(u32, u32)> = (1..=n)
            .map(|v| (bit(v), adjacent[v] & above(v)))
            .collect();
        while let Some((face, candidates)) = stack.pop() {
            faces.insert(face);
            for v in labels_of(candidates) {
                let higher = candidates & adjacent[v] & above(v);
                stack.push((face | bit(v), higher));
            }
        }
        Ok(Self { vertices: (1..=n).collect(), faces })
    }

    /// X_π: faces are the position sets of increasing subsequences of π.
    pub fn order_complex(pi: &Permutation) -> Result<Self> {
        Self::order_complex_with_guard(pi, DEFAULT_GUARD)
    }

    pub fn order_complex_with_guard(pi: &Permutation, guard: usize) -> Result<Self> {
        let v = pi.values();
        Self::from_comparability(pi.len(), guard, |i, j| v[i - 1] < v[j - 1])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Faces as sorted label lists, in a canonical order.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.faces.iter().map(|&m| labels_of(m).collect()).collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    pub fn contains_face(&self, face: &[usize]) -> bool {
        if face.iter().any(|&v| v == 0 || v > MAX_LABEL) {
            return false;
        }
        self.faces.contains(&face.iter().fold(0u32, |m, &v| m | bit(v)))
    }

    pub fn dimension(&self) -> Option<usize> {
        self.faces.iter().map(|m| m.count_ones() as usize - 1).max()
    }

    /// Face counts f_0, f_1, … by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dimension().map_or(0, |d| d + 1)];
        for m in &self.faces {
            f[m.count_ones() as usize - 1] += 1;
        }
        f
    }

    /// Euler characteristic Σ (−1)^d f_d.
    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &f)| if d % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// The induced subcomplex on `subset`: all faces contained in it.
    pub fn induced(&self, subset: &[usize]) -> Result<Self> {
        let mut verts: Vec<usize> = subset.to_vec();
        verts.sort_unstable();
        verts.dedup();
        if verts.iter().any(|v| self.vertices.binary_search(v).is_err()) {
            return Err(Error::NotSubset);
        }
        let mask = verts.iter().fold(0u32, |m, &v| m | bit(v));
        let faces = self.faces.iter().copied().filter(|f| f & !mask == 0).collect();
        Ok(Self { vertices: verts, faces })
    }

    /// Reduced Betti numbers over GF(2) via boundary-matrix ranks of the
    /// augmented chain complex.
    pub fn betti_gf2(&self) -> BettiVector {
        let Some(dim) = self.dimension() else {
            return BettiVector { betti: Vec::new(), is_empty: true };
        };
        let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); dim + 1];
        for &m in &self.faces {
            by_dim[m.count_ones() as usize - 1].push(m);
        }
        // rank[d] = rank of ∂_d : C_d → C_{d-1}; ∂_0 is the augmentation.
        let mut rank = vec![0usize; dim + 2];
        rank[0] = 1;
        for d in 1..=dim {
            rank[d] = boundary_rank(&by_dim[d - 1], &by_dim[d]);
        }
        let betti = (0..=dim)
            .map(|d| (by_dim[d].len() - rank[d] - rank[d + 1]) as u64)
            .collect();
        BettiVector { betti, is_empty: false }
    }

    /// r-connectivity read off the Betti numbers. Only valid for complexes
    /// known to be contractible or homotopy equivalent to a wedge of spheres
    /// (permutation and planar point order complexes), where vanishing GF(2)
    /// homology through dimension r is equivalent to r-connectivity.
    pub fn is_r_connected_oracle(&self, r: i64) -> Result<bool> {
        if r < -1 {
            return Err(Error::InvalidLevel(r));
        }
        let b = self.betti_gf2();
        if b.is_empty {
            return Ok(false);
        }
        Ok((0..=r).all(|i| b.get(i as usize) == 0))
    }
}

/// GF(2) rank of the boundary map from `upper` (d-faces) to `lower`
/// ((d−1)-faces), by elimination on bit-packed columns.
fn boundary_rank(lower: &[u32], upper: &[u32]) -> usize {
    let index: HashMap<u32, usize> = lower.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let words = lower.len().div_ceil(64);
    let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut rank = 0;
    for &face in upper {
        let mut col = vec![0u64; words];
        for b in 0..MAX_LABEL {
            if face >> b & 1 == 1 {
                let row = index[&(face & !(1u32 << b))];
                col[row / 64] ^= 1u64 << (row % 64);
            }
        }
        while let Some(lead) = leading_bit(&col) {
            match pivots.get(&lead) {
                Some(p) => {
                    for (c, w) in col.iter_mut().zip(p) {
                        *c ^= w;
                    }
                }
                None => {
                    pivots.insert(lead, col);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn leading_bit(col: &[u64]) -> Option<usize> {
    col.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::all_permutations;
    use proptest::prelude::*;

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn order_complex_examples() {
        let k = SimplicialComplex::order_complex(&Permutation::identity(3)).unwrap();
        assert_eq!(k.face_count(), 7);
        assert!(k.contains_face(&[1, 2, 3]));

        let k = SimplicialComplex::order_complex(&perm("21")).unwrap();
        assert_eq!(k.faces(), vec![vec![1], vec![2]]);

        let k = SimplicialComplex::order_complex(&perm("312")).unwrap();
        assert_eq!(k.faces(), vec![vec![1], vec![2], vec![3], vec![2, 3]]);
    }

    #[test]
    fn order_complex_guard() {
        let pi = Permutation::identity(17);
        assert!(matches!(
            SimplicialComplex::order_complex(&pi),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(SimplicialComplex::order_complex_with_guard(&Permutation::identity(5), 4).is_err());
    }

    #[test]
    fn order_complex_faces_are_increasing_subsequences() {
        for pi in all_permutations(5) {
            let k = SimplicialComplex::order_complex(&pi).unwrap();
            let mut count = 0;
            for mask in 1u32..32 {
                let pos: Vec<usize> = labels_of(mask).collect();
                let increasing = pos.windows(2).all(|w| pi.values()[w[0] - 1] < pi.values()[w[1] - 1]);
                assert_eq!(k.contains_face(&pos), increasing);
                count += increasing as usize;
            }
            assert_eq!(k.face_count(), count);
        }
    }

    #[test]
    fn induced_examples() {
        let k = SimplicialComplex::order_complex(&perm("312")).unwrap();
        assert_eq!(k.induced(k.vertices()).unwrap(), k);
        assert_eq!(k.induced(&[1, 2]).unwrap().faces(), vec![vec![1], vec![2]]);
        let simplex = SimplicialComplex::order_complex(&Permutation::identity(3)).unwrap();
        assert_eq!(
            simplex.induced(&[1, 2]).unwrap().faces(),
            vec![vec![1], vec![2], vec![1, 2]]
        );
        assert_eq!(k.induced(&[4]), Err(Error::NotSubset));
        assert!(k.induced(&[]).unwrap().is_empty());
    }

    #[test]
    fn betti_examples() {
        let simplex = SimplicialComplex::order_complex(&Permutation::identity(3)).unwrap();
        assert_eq!(simplex.betti_gf2().betti, vec![0, 0, 0]);
        let two_points = SimplicialComplex::order_complex(&perm("21")).unwrap();
        assert_eq!(two_points.betti_gf2().betti, vec![1]);
        let x = SimplicialComplex::order_complex(&perm("3254176")).unwrap();
        assert_eq!(x.betti_gf2().betti, vec![0, 1, 1]);
        let empty = SimplicialComplex::empty().betti_gf2();
        assert!(empty.is_empty && empty.betti.is_empty());
    }

    #[test]
    fn betti_of_known_spaces() {
        // boundary of a triangle: S¹
        let circle =
            SimplicialComplex::from_faces(&[], &[vec![1, 2], vec![2, 3], vec![1, 3]]).unwrap();
        assert_eq!(circle.betti_gf2().betti, vec![0, 1]);
        // boundary of a tetrahedron: S²
        let sphere = SimplicialComplex::from_faces(
            &[],
            &[vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]],
        )
        .unwrap();
        assert_eq!(sphere.betti_gf2().betti, vec![0, 0, 1]);
        // RP² has torsion-free GF(2) homology in degrees 1 and 2
        let rp2 = SimplicialComplex::from_faces(
            &[],
            &[
                vec![1, 2, 4], vec![2, 3, 4], vec![3, 4, 5], vec![1, 3, 5], vec![1, 2, 5],
                vec![2, 5, 6], vec![2, 3, 6], vec![1, 3, 6], vec![1, 4, 6], vec![4, 5, 6],
            ],
        )
        .unwrap();
        assert_eq!(rp2.betti_gf2().betti, vec![0, 1, 1]);
    }

    #[test]
    fn connectivity_oracle() {
        let empty = SimplicialComplex::empty();
        assert!(!empty.is_r_connected_oracle(-1).unwrap());
        assert!(!empty.is_r_connected_oracle(3).unwrap());
        let x = SimplicialComplex::order_complex(&perm("3254176")).unwrap();
        assert!(x.is_r_connected_oracle(-1).unwrap());
        assert!(x.is_r_connected_oracle(0).unwrap());
        assert!(!x.is_r_connected_oracle(1).unwrap());
        assert_eq!(x.is_r_connected_oracle(-2), Err(Error::InvalidLevel(-2)));
    }

    #[test]
    fn euler_characteristic_matches_betti_exhaustively() {
        for n in 1..=7 {
            for pi in all_permutations(n) {
                let k = SimplicialComplex::order_complex(&pi).unwrap();
                let b = k.betti_gf2();
                let reduced: i64 = b
                    .betti
                    .iter()
                    .enumerate()
                    .map(|(d, &x)| if d % 2 == 0 { x as i64 } else { -(x as i64) })
                    .sum();
                assert_eq!(k.euler_characteristic() - 1, reduced, "{pi}");
            }
        }
    }

    proptest! {
        #[test]
        fn induced_is_idempotent_and_monotone(
            v in Just((1usize..=8).collect::<Vec<_>>()).prop_shuffle(),
            s in any::<u8>(),
            t in any::<u8>(),
        ) {
            let pi = Permutation::new(v).unwrap();
            let k = SimplicialComplex::order_complex(&pi).unwrap();
            let small: Vec<usize> = (1..=8).filter(|i| (s & t) >> (i - 1) & 1 == 1).collect();
            let big: Vec<usize> = (1..=8).filter(|i| s >> (i - 1) & 1 == 1).collect();
            let ks = k.induced(&small).unwrap();
            let kb = k.induced(&big).unwrap();
            prop_assert_eq!(ks.induced(&small).unwrap(), ks.clone());
            prop_assert!(ks.faces.is_subset(&kb.faces));
        }
    }
}
