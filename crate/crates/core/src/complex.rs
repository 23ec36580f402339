//! Simplices as bit words and Vietoris-Rips complexes.
//!
//! Bit `i` of a [`SimplexBits`] word is vertex `i` (least-significant bit is
//! vertex 0). Vertices of a simplex are ordered by ascending bit position,
//! `i_0 < i_1 < … < i_k`; that ordering fixes every orientation sign used by
//! the boundary maps in [`crate::homology`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

/// Largest vertex count handled anywhere in the crate. The state-vector
/// simulation needs `2^n` amplitudes, so this is the practical ceiling.
pub const MAX_VERTICES: usize = 20;

/// A simplex encoded as an `n`-bit word with one set bit per vertex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexBits(u32);

impl fmt::Debug for SimplexBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimplexBits({:#b})", self.0)
    }
}

impl SimplexBits {
    pub const fn new(word: u32) -> Self {
        SimplexBits(word)
    }

    pub const fn vertex(i: usize) -> Self {
        SimplexBits(1 << i)
    }

    pub fn from_vertices(vertices: &[usize]) -> Result<Self> {
        let mut word = 0u32;
        for &v in vertices {
            if v >= MAX_VERTICES {
                return Err(Error::Index {
                    index: v,
                    limit: MAX_VERTICES,
                });
            }
            word |= 1 << v;
        }
        let s = SimplexBits(word);
        s.check(MAX_VERTICES)?;
        Ok(s)
    }

    pub const fn word(self) -> u32 {
        self.0
    }

    /// Number of vertices, `k + 1`.
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Simplex dimension `k`. Panics on the empty word.
    pub fn dim(self) -> usize {
        assert!(!self.is_empty(), "empty simplex has no dimension");
        self.len() - 1
    }

    pub fn contains(self, other: SimplexBits) -> bool {
        self.0 & other.0 == other.0
    }

    /// Vertex indices in ascending order.
    pub fn vertices(self) -> impl Iterator<Item = usize> {
        let mut w = self.0;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let i = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i)
            }
        })
    }

    /// Valid for a complex on `n` vertices: non-empty and all bits below `n`.
    pub fn check(self, n: usize) -> Result<()> {
        let in_range = n >= 32 || (self.0 >> n) == 0;
        if self.is_empty() || !in_range {
            return Err(Error::InvalidSimplex {
                word: u64::from(self.0),
                n,
            });
        }
        Ok(())
    }

    /// Face obtained by dropping the `l`-th smallest vertex `i_l`.
    pub fn remove_vertex(self, l: usize) -> Result<SimplexBits> {
        let k1 = self.len();
        if k1 <= 1 {
            return Err(Error::WouldEmpty);
        }
        if l >= k1 {
            return Err(Error::Index {
                index: l,
                limit: k1,
            });
        }
        let bit = self.vertices().nth(l).expect("l < popcount");
        Ok(SimplexBits(self.0 & !(1 << bit)))
    }

    /// All codimension-one faces with their rank `l`, in order `l = 0..=k`.
    pub fn faces(self) -> impl Iterator<Item = (usize, SimplexBits)> {
        let word = self.0;
        self.vertices()
            .enumerate()
            .filter(move |_| word.count_ones() > 1)
            .map(move |(l, bit)| (l, SimplexBits(word & !(1 << bit))))
    }
}

/// One point of the classical scale grid, `ε = x / 2^(m-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiltrationScale {
    pub m: u32,
    pub x: u64,
    pub epsilon: f64,
}

/// Widest scale register accepted; keeps `x / 2^(m-1)` exact in `f64`.
pub const MAX_SCALE_BITS: u32 = 32;

pub fn scale_from_index(x: u64, m: u32) -> Result<FiltrationScale> {
    if m == 0 || m > MAX_SCALE_BITS {
        return Err(Error::Index {
            index: m as usize,
            limit: MAX_SCALE_BITS as usize + 1,
        });
    }
    if x >= 1u64 << m {
        return Err(Error::Index {
            index: x as usize,
            limit: 1usize << m,
        });
    }
    let epsilon = x as f64 / (1u64 << (m - 1)) as f64;
    Ok(FiltrationScale { m, x, epsilon })
}

/// Scales `x = 1 … 2^m − 1` (zero skipped).
pub fn scale_grid(m: u32) -> Result<Vec<FiltrationScale>> {
    let top = scale_from_index(0, m).map(|_| 1u64 << m)?;
    (1..top).map(|x| scale_from_index(x, m)).collect()
}

/// The sets `S_k^ε` for `k = 0 ..= top_level`, each sorted by word value.
#[derive(Debug, Clone, PartialEq)]
pub struct VietorisRipsComplex {
    epsilon: f64,
    n: usize,
    sets: Vec<Vec<SimplexBits>>,
}

impl VietorisRipsComplex {
    /// Assemble a complex from explicit simplex lists (used for fixtures and
    /// deserialization). Lists are sorted and deduplicated; each simplex in
    /// `sets[k]` must have exactly `k + 1` vertices below `n`.
    pub fn from_sets(n: usize, epsilon: f64, sets: Vec<Vec<SimplexBits>>) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::Size {
                n,
                max: MAX_VERTICES,
            });
        }
        if sets.is_empty() || sets.len() > n {
            return Err(Error::Dimension {
                k: sets.len(),
                max: n,
            });
        }
        let mut sets = sets;
        for (k, level) in sets.iter_mut().enumerate() {
            for s in level.iter() {
                s.check(n)?;
                if s.len() != k + 1 {
                    return Err(Error::Inconsistent(format!(
                        "{s:?} listed at level {k} has {} vertices",
                        s.len()
                    )));
                }
            }
            level.sort_unstable();
            level.dedup();
        }
        Ok(VietorisRipsComplex { epsilon, n, sets })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Highest enumerated dimension.
    pub fn top_level(&self) -> usize {
        self.sets.len() - 1
    }

    /// `S_k^ε`. Levels at or above `n` are empty by definition; levels between
    /// `top_level` and `n` were never enumerated and are an error.
    pub fn level(&self, k: usize) -> Result<&[SimplexBits]> {
        if k >= self.n {
            Ok(&[])
        } else if k > self.top_level() {
            Err(Error::MissingLevel(k))
        } else {
            Ok(&self.sets[k])
        }
    }

    pub fn levels(&self) -> &[Vec<SimplexBits>] {
        &self.sets
    }

    /// `|S_k^ε|`, zero for any level not stored.
    pub fn count(&self, k: usize) -> usize {
        self.sets.get(k).map_or(0, Vec::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    pub fn total_simplices(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    /// Position of `s` inside its level, if present.
    pub fn index_of(&self, s: SimplexBits) -> Option<usize> {
        if s.is_empty() {
            return None;
        }
        self.sets.get(s.dim())?.binary_search(&s).ok()
    }

    pub fn contains(&self, s: SimplexBits) -> bool {
        self.index_of(s).is_some()
    }

    /// Every face of every stored simplex is itself stored.
    pub fn is_face_closed(&self) -> bool {
        self.sets
            .iter()
            .skip(1)
            .flatten()
            .all(|s| s.faces().all(|(_, f)| self.contains(f)))
    }

    /// Copy keeping only levels `0 ..= top`.
    pub fn truncated(&self, top: usize) -> VietorisRipsComplex {
        let mut sets = self.sets.clone();
        sets.truncate(top + 1);
        VietorisRipsComplex {
            epsilon: self.epsilon,
            n: self.n,
            sets,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ComplexJson::from(self)).expect("complex serializes")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let raw: ComplexJson = serde_json::from_value(value)
            .map_err(|e| Error::Argument(format!("complex json: {e}")))?;
        let top = raw.sets.keys().copied().max().unwrap_or(0);
        let mut sets = vec![Vec::new(); top + 1];
        for (k, words) in raw.sets {
            sets[k] = words.into_iter().map(SimplexBits::new).collect();
        }
        VietorisRipsComplex::from_sets(raw.n, raw.epsilon, sets)
    }
}

/// Wire form: `{epsilon, n, sets: {"k": [words]}}`.
#[derive(Serialize, Deserialize)]
struct ComplexJson {
    epsilon: f64,
    n: usize,
    sets: BTreeMap<usize, Vec<u32>>,
}

impl From<&VietorisRipsComplex> for ComplexJson {
    fn from(vr: &VietorisRipsComplex) -> Self {
        ComplexJson {
            epsilon: vr.epsilon,
            n: vr.n,
            sets: vr
                .sets
                .iter()
                .enumerate()
                .map(|(k, level)| (k, level.iter().map(|s| s.word()).collect()))
                .collect(),
        }
    }
}

/// Whether `s` belongs to the closed Vietoris-Rips complex at scale `eps`.
///
/// Each pair is compared as `sqrt(D_ij) ≤ eps`, the same rounding path as
/// [`crate::geometry::simplex_diameter`], so the two never disagree at the
/// boundary.
pub fn membership(s: SimplexBits, eps: f64, dm: &DistanceMatrix) -> bool {
    debug_assert!(s.check(dm.n()).is_ok());
    let vertices: Vec<usize> = s.vertices().collect();
    vertices.iter().enumerate().all(|(a, &i)| {
        vertices[a + 1..]
            .iter()
            .all(|&j| dm.sq(i, j).sqrt() <= eps)
    })
}

fn check_enumeration_args(dm: &DistanceMatrix, eps: f64, kmax: usize) -> Result<()> {
    let n = dm.n();
    if n == 0 || n > MAX_VERTICES {
        return Err(Error::Size {
            n,
            max: MAX_VERTICES,
        });
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    if kmax >= n {
        return Err(Error::Dimension {
            k: kmax,
            max: n - 1,
        });
    }
    Ok(())
}

/// Enumerate `S_0^ε … S_kmax^ε` by growing cliques of the ε-neighbourhood graph.
pub fn enumerate_vr(dm: &DistanceMatrix, eps: f64, kmax: usize) -> Result<VietorisRipsComplex> {
    check_enumeration_args(dm, eps, kmax)?;
    let n = dm.n();

    let adjacency: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && dm.sq(i, j).sqrt() <= eps)
                .fold(0u32, |acc, j| acc | (1 << j))
        })
        .collect();

    let mut sets: Vec<Vec<SimplexBits>> = Vec::with_capacity(kmax + 1);
    sets.push((0..n).map(SimplexBits::vertex).collect());
    for _ in 0..kmax {
        let prev = sets.last().expect("level 0 present");
        let mut next = Vec::new();
        for &s in prev {
            let highest = 31 - s.word().leading_zeros() as usize;
            for v in (highest + 1)..n {
                if adjacency[v] & s.word() == s.word() {
                    next.push(SimplexBits::new(s.word() | (1 << v)));
                }
            }
        }
        next.sort_unstable();
        sets.push(next);
    }
    Ok(VietorisRipsComplex {
        epsilon: eps,
        n,
        sets,
    })
}

/// Reference enumeration: test every non-empty word below `2^n`.
pub fn enumerate_vr_scan(
    dm: &DistanceMatrix,
    eps: f64,
    kmax: usize,
) -> Result<VietorisRipsComplex> {
    check_enumeration_args(dm, eps, kmax)?;
    let n = dm.n();
    let mut sets = vec![Vec::new(); kmax + 1];
    for word in 1u32..(1u32 << n) {
        let s = SimplexBits::new(word);
        if s.dim() <= kmax && membership(s, eps, dm) {
            sets[s.dim()].push(s);
        }
    }
    Ok(VietorisRipsComplex {
        epsilon: eps,
        n,
        sets,
    })
}
