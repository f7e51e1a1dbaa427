//! Homotopy-type classification of permutation complexes.
//!
//! Every X_π is empty, contractible, or a wedge of spheres. The type is
//! computed by the minimum-deletion recursion: with i = π⁻¹(1) and
//! j = π⁻¹(2),
//!
//! * i < j: X_π ≃ X_{π′_j}
//! * i > j: X_π ≃ X_{π′_i} ∨ Σ X_{π″_i}
//!
//! [`homotopy_type_by_patterns`] runs this recursion literally on pattern
//! permutations. [`homotopy_type`] runs the same recursion without
//! relabelling: unrolling the first branch shows that the suspended
//! subproblems are always quadrants `{p > P, π(p) > V}` of the original
//! diagram, one per pair of consecutive minimal elements, with corner at
//! their join. Quadrants are memoized by corner.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// Homotopy type of a permutation or point order complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HomotopyType {
    Empty,
    Contractible,
    /// Sphere dimension → multiplicity; nonempty, all counts positive.
    Wedge(BTreeMap<usize, BigUint>),
}

impl HomotopyType {
    /// A single sphere S^k.
    pub fn sphere(k: usize) -> Self {
        Self::Wedge(BTreeMap::from([(k, BigUint::one())]))
    }

    /// Wedge of the given spheres; zero counts are dropped and an empty
    /// collection is a point.
    pub fn from_counts<I, C>(counts: I) -> Self
    where
        I: IntoIterator<Item = (usize, C)>,
        C: Into<BigUint>,
    {
        let mut map: BTreeMap<usize, BigUint> = BTreeMap::new();
        for (k, c) in counts {
            *map.entry(k).or_default() += c.into();
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            Self::Contractible
        } else {
            Self::Wedge(map)
        }
    }

    /// Number of S^k summands.
    pub fn count(&self, k: usize) -> BigUint {
        match self {
            Self::Wedge(m) => m.get(&k).cloned().unwrap_or_default(),
            _ => BigUint::zero(),
        }
    }

    /// Smallest sphere dimension, if this is a wedge.
    pub fn min_dimension(&self) -> Option<usize> {
        match self {
            Self::Wedge(m) => m.keys().next().copied(),
            _ => None,
        }
    }

    /// X ∨ Y. Contractible is the unit; wedging with the empty space is
    /// undefined.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Empty, _) | (_, Self::Empty) => Err(Error::WedgeWithEmpty),
            (Self::Contractible, h) | (h, Self::Contractible) => Ok(h.clone()),
            (Self::Wedge(a), Self::Wedge(b)) => {
                let mut m = a.clone();
                for (k, c) in b {
                    *m.entry(*k).or_default() += c;
                }
                Ok(Self::Wedge(m))
            }
        }
    }

    /// ΣX = S⁰ ∗ X. In particular Σ∅ = S⁰.
    pub fn suspend(&self) -> Self {
        match self {
            Self::Empty => Self::sphere(0),
            Self::Contractible => Self::Contractible,
            Self::Wedge(m) => Self::Wedge(m.iter().map(|(k, c)| (k + 1, c.clone())).collect()),
        }
    }

    /// r-connectivity for r ≥ −1. The empty space is not even
    /// (−1)-connected; a wedge is r-connected iff r is below every sphere
    /// dimension.
    pub fn is_r_connected(&self, r: i64) -> Result<bool> {
        if r < -1 {
            return Err(Error::InvalidLevel(r));
        }
        Ok(match self {
            Self::Empty => false,
            Self::Contractible => true,
            Self::Wedge(m) => m.keys().all(|&k| (k as i64) > r),
        })
    }
}

impl fmt::Display for HomotopyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => f.write_str("empty"),
            Self::Contractible => f.write_str("contractible"),
            Self::Wedge(m) => {
                let parts: Vec<String> = m
                    .iter()
                    .map(|(k, c)| if c.is_one() { format!("S^{k}") } else { format!("{c}·S^{k}") })
                    .collect();
                f.write_str(&parts.join(" ∨ "))
            }
        }
    }
}

struct Spheres<'a>(&'a BTreeMap<usize, BigUint>);

struct SphereEntry<'a>(usize, &'a BigUint);

impl Serialize for SphereEntry<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("dim", &self.0)?;
        // counts beyond u64 are emitted as decimal strings
        match self.1.to_u64() {
            Some(c) => map.serialize_entry("count", &c)?,
            None => map.serialize_entry("count", &self.1.to_string())?,
        }
        map.end()
    }
}

impl Serialize for Spheres<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (k, c) in self.0 {
            seq.serialize_element(&SphereEntry(*k, c))?;
        }
        seq.end()
    }
}

impl Serialize for HomotopyType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Empty => {
                let mut map = s.serialize_map(Some(1))?;
                map.serialize_entry("type", "empty")?;
                map.end()
            }
            Self::Contractible => {
                let mut map = s.serialize_map(Some(1))?;
                map.serialize_entry("type", "contractible")?;
                map.end()
            }
            Self::Wedge(m) => {
                let mut map = s.serialize_map(Some(2))?;
                map.serialize_entry("type", "wedge")?;
                map.serialize_entry("spheres", &Spheres(m))?;
                map.end()
            }
        }
    }
}

/// The decomposition recursion applied literally to pattern permutations.
///
/// Uses an explicit work stack of `(subpermutation, suspensions)`. Since Σ
/// distributes over ∨ and the unsuspended branch never reaches n = 0, the
/// result is the wedge over all leaves of Σ^s(leaf).
pub fn homotopy_type_by_patterns(pi: &Permutation) -> HomotopyType {
    if pi.is_empty() {
        return HomotopyType::Empty;
    }
    let mut acc = HomotopyType::Contractible;
    let mut stack = vec![(pi.clone(), 0usize)];
    while let Some((sigma, suspensions)) = stack.pop() {
        match sigma.len() {
            0 | 1 => {
                let mut leaf =
                    if sigma.is_empty() { HomotopyType::Empty } else { HomotopyType::Contractible };
                for _ in 0..suspensions {
                    leaf = leaf.suspend();
                }
                acc = acc.wedge(&leaf).expect("suspended leaves are nonempty");
            }
            _ => {
                let inv = sigma.inverse();
                let (i, j) = (inv.values()[0], inv.values()[1]);
                if i < j {
                    stack.push((sigma.delete_pattern(j).expect("j in range"), suspensions));
                } else {
                    stack.push((sigma.delete_pattern(i).expect("i in range"), suspensions));
                    stack.push((sigma.suffix_pattern(i).expect("i in range"), suspensions + 1));
                }
            }
        }
    }
    acc
}

/// Sub-diagram `{p > pos, π(p) > val}` identified by its corner.
type Corner = (usize, usize);

/// Minimal elements of a quadrant, scanned left to right (positions
/// increasing, values decreasing), and the corners of the suspended
/// subproblems between consecutive ones.
struct Quadrants<'a> {
    values: &'a [usize],
    minima: Vec<Corner>,
}

impl<'a> Quadrants<'a> {
    fn new(values: &'a [usize]) -> Self {
        Self { values, minima: Vec::new() }
    }

    /// Fills `self.minima` for the quadrant at `corner`; returns whether it
    /// is nonempty.
    fn scan(&mut self, (pos, val): Corner) -> bool {
        self.minima.clear();
        let mut low = usize::MAX;
        for (offset, &v) in self.values[pos..].iter().enumerate() {
            if v > val && v < low {
                low = v;
                self.minima.push((pos + offset + 1, v));
            }
        }
        !self.minima.is_empty()
    }

    fn children(&self) -> impl Iterator<Item = Corner> + '_ {
        self.minima.windows(2).map(|w| (w[1].0, w[0].1))
    }
}

/// Wedge summands of a nonempty quadrant, or `None` for an empty one.
type Summands = Option<BTreeMap<usize, BigUint>>;

/// Exact homotopy type of X_π.
pub fn homotopy_type(pi: &Permutation) -> HomotopyType {
    let mut quadrants = Quadrants::new(pi.values());
    let mut memo: HashMap<Corner, Summands> = HashMap::new();
    // corner → (nonempty, children)
    let mut pending: HashMap<Corner, (bool, Vec<Corner>)> = HashMap::new();
    let mut stack = vec![(0usize, 0usize)];
    while let Some(&corner) = stack.last() {
        if memo.contains_key(&corner) {
            stack.pop();
            continue;
        }
        let (_, children) = pending.entry(corner).or_insert_with(|| {
            let nonempty = quadrants.scan(corner);
            (nonempty, quadrants.children().collect())
        });
        let missing: Vec<Corner> =
            children.iter().copied().filter(|c| !memo.contains_key(c)).collect();
        if !missing.is_empty() {
            stack.extend(missing);
            continue;
        }
        let (nonempty, children) = pending.remove(&corner).expect("inserted above");
        let summands = if !nonempty {
            None
        } else {
            let mut acc: BTreeMap<usize, BigUint> = BTreeMap::new();
            for child in &children {
                match &memo[child] {
                    None => *acc.entry(0).or_default() += 1u32,
                    Some(m) => {
                        for (k, c) in m {
                            *acc.entry(k + 1).or_default() += c;
                        }
                    }
                }
            }
            Some(acc)
        };
        memo.insert(corner, summands);
        stack.pop();
    }
    match memo.remove(&(0, 0)).expect("root classified") {
        None => HomotopyType::Empty,
        Some(m) if m.is_empty() => HomotopyType::Contractible,
        Some(m) => HomotopyType::Wedge(m),
    }
}

/// Whether X_π is r-connected, without computing sphere multiplicities.
///
/// X_π fails to be r-connected iff it is empty or a suspended subproblem
/// fails to be (r−1)-connected, so the search is depth-bounded by r + 1.
pub fn is_r_connected_permutation(pi: &Permutation, r: i64) -> Result<bool> {
    if r < -1 {
        return Err(Error::InvalidLevel(r));
    }
    let mut quadrants = Quadrants::new(pi.values());
    // (corner, r) pairs still to refute
    let mut stack = vec![((0usize, 0usize), r)];
    while let Some((corner, level)) = stack.pop() {
        if !quadrants.scan(corner) {
            return Ok(false);
        }
        if level >= 0 {
            stack.extend(quadrants.children().map(|c| (c, level - 1)));
        }
    }
    Ok(true)
}
