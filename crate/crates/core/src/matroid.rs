//! Matroids as integer polymatroids with singleton ranks in {0, 1}.

use crate::error::{Error, Result};
use crate::ground::{subsets_of_size, GroundSet, SubsetMask};
use crate::polymatroid::Polymatroid;
use crate::rank::{Mode, Rank, RankVector, SetFunction};

/// Full circuit enumeration is refused above this many elements.
pub const MAX_CIRCUIT_ENUMERATION: usize = 15;

/// Integer-mode check plus the singleton bound. Float input is rejected.
pub fn is_matroid<T: Rank>(m: &Polymatroid<T>) -> Result<bool> {
    if T::MODE == Mode::Float {
        return Err(Error::FloatModeRejected);
    }
    let (zero, one) = (T::from_i64(0), T::from_i64(1));
    Ok((0..m.n()).all(|i| {
        let v = m.singleton(i);
        v == zero || v == one
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matroid {
    inner: Polymatroid<i64>,
}

impl Matroid {
    pub fn new(p: Polymatroid<i64>) -> Result<Self> {
        if let Some(i) = (0..p.n()).find(|&i| !(0..=1).contains(&p.singleton(i))) {
            return Err(Error::NotAMatroid(format!("element {:?} has rank {}", p.ground().label(i), p.singleton(i))));
        }
        Ok(Matroid { inner: p })
    }

    /// `U_{k,n}`: every set of size at most `k` is independent.
    pub fn uniform(ground: GroundSet, k: usize) -> Matroid {
        let rank = RankVector::from_fn(ground, |s| s.len().min(k) as i64);
        Matroid { inner: Polymatroid::trusted(rank) }
    }

    pub fn polymatroid(&self) -> &Polymatroid<i64> {
        &self.inner
    }

    pub fn into_polymatroid(self) -> Polymatroid<i64> {
        self.inner
    }

    pub fn ground(&self) -> &GroundSet {
        self.inner.ground()
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    pub fn rank(&self, s: SubsetMask) -> i64 {
        self.inner.rank(s)
    }

    pub fn is_independent(&self, s: SubsetMask) -> bool {
        self.rank(s) == s.len() as i64
    }

    /// Minimal dependent: `h(C) = |C| - 1` and every `C - i` is independent.
    pub fn is_circuit(&self, c: SubsetMask) -> bool {
        let size = c.len() as i64;
        !c.is_empty() && self.rank(c) == size - 1 && c.elements().all(|i| self.rank(c.without(i)) == size - 1)
    }

    /// All circuits, smallest first. Sets are visited by increasing
    /// cardinality, skipping supersets of circuits already found, so every
    /// dependent set reached is minimal.
    pub fn circuits(&self) -> Result<Vec<SubsetMask>> {
        let n = self.n();
        if n > MAX_CIRCUIT_ENUMERATION {
            return Err(Error::TooLargeForEnumeration { got: n, limit: MAX_CIRCUIT_ENUMERATION });
        }
        let mut found: Vec<SubsetMask> = Vec::new();
        for k in 1..=n {
            // A circuit of size k has rank k - 1 <= h(M).
            if k as i64 - 1 > self.inner.full_rank() {
                break;
            }
            for s in subsets_of_size(n, k) {
                if found.iter().any(|c| c.is_subset_of(s)) {
                    continue;
                }
                if !self.is_independent(s) {
                    debug_assert!(self.is_circuit(s));
                    found.push(s);
                }
            }
        }
        Ok(found)
    }

    /// A circuit containing both `x` and `y`, if one exists. Supersets of
    /// `{x, y}` are tried by increasing size; the first one that is minimal
    /// dependent is returned.
    pub fn circuit_through(&self, x: usize, y: usize) -> Result<Option<SubsetMask>> {
        let n = self.n();
        self.ground().check_element(x)?;
        self.ground().check_element(y)?;
        if x == y {
            return Err(Error::Usage("circuit connectivity needs two distinct elements".into()));
        }
        let pair = SubsetMask::singleton(x).with(y);
        let others: Vec<usize> = (0..n).filter(|&i| i != x && i != y).collect();
        let max_extra = (self.inner.full_rank() + 1 - 2).max(0) as usize;
        for k in 0..=others.len().min(max_extra) {
            for pick in subsets_of_size(others.len(), k) {
                let c = pick.elements().fold(pair, |acc, j| acc.with(others[j]));
                if self.is_circuit(c) {
                    return Ok(Some(c));
                }
            }
        }
        Ok(None)
    }

    pub fn circuit_connected(&self, x: usize, y: usize) -> Result<bool> {
        Ok(self.circuit_through(x, y)?.is_some())
    }

    /// Classes of the relation "equal, or on a common circuit". Loops and
    /// coloops form singleton classes. Returned in order of smallest element.
    pub fn circuit_classes(&self) -> Result<Vec<SubsetMask>> {
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for c in self.circuits()? {
            let mut it = c.elements();
            if let Some(first) = it.next() {
                for j in it {
                    let (ra, rb) = (root(&mut parent, first), root(&mut parent, j));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut classes: Vec<SubsetMask> = Vec::new();
        let mut class_of_root = vec![usize::MAX; n];
        for i in 0..n {
            let r = root(&mut parent, i);
            if class_of_root[r] == usize::MAX {
                class_of_root[r] = classes.len();
                classes.push(SubsetMask::EMPTY);
            }
            let k = class_of_root[r];
            classes[k] = classes[k].with(i);
        }
        Ok(classes)
    }

    pub fn dual(&self) -> Matroid {
        Matroid { inner: self.inner.dual() }
    }

    pub fn is_connected(&self) -> bool {
        self.inner.is_connected(0.0)
    }
}

impl SetFunction<i64> for Matroid {
    fn ground(&self) -> &GroundSet {
        self.inner.ground()
    }

    fn value(&self, s: SubsetMask) -> i64 {
        self.inner.rank(s)
    }
}

impl TryFrom<Polymatroid<i64>> for Matroid {
    type Error = Error;

    fn try_from(p: Polymatroid<i64>) -> Result<Self> {
        Matroid::new(p)
    }
}
