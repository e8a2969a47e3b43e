//! Helgason expansion of an integer polymatroid into a matroid.
//!
//! Every element `i` of the base `(h, M)` is replaced by a block `X_i` of
//! `h(i)` unit-rank elements. The expanded rank of a set `S` is
//!
//! ```text
//! g(S) = min over A ⊆ M of  h(A) + |S - X(A)|
//! ```
//!
//! which only depends on the counts `|S ∩ X_i|`. Queries therefore take a
//! [`BlockCounts`] vector and never touch the (possibly astronomically large)
//! expanded ground set. `g` restricted to block unions is `h` again.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::ground::{GroundSet, SubsetMask, MAX_DENSE};
use crate::inequalities::{mmrv_with_roles, Roles};
use crate::polymatroid::Polymatroid;
use crate::rank::{RankVector, SetFunction};

/// Number of chosen elements in each block, indexed like the base ground set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockCounts(pub Vec<u32>);

impl BlockCounts {
    pub fn zeros(blocks: usize) -> Self {
        BlockCounts(vec![0; blocks])
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn get(&self, block: usize) -> u32 {
        self.0[block]
    }

    pub fn with(mut self, block: usize, count: u32) -> Self {
        self.0[block] = count;
        self
    }

    pub fn incremented(mut self, block: usize) -> Self {
        self.0[block] += 1;
        self
    }
}

pub struct ExpandedMatroid {
    base: Polymatroid<i64>,
    sizes: Vec<u32>,
    dualized: bool,
    cache: RwLock<HashMap<Vec<u32>, i64>>,
}

impl Clone for ExpandedMatroid {
    fn clone(&self) -> Self {
        ExpandedMatroid {
            base: self.base.clone(),
            sizes: self.sizes.clone(),
            dualized: self.dualized,
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for ExpandedMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExpandedMatroid")
            .field("blocks", &self.base.ground().labels())
            .field("sizes", &self.sizes)
            .field("dualized", &self.dualized)
            .finish()
    }
}

/// Expands `base` into a matroid whose block `i` has `h(i)` elements.
pub fn helgason_expand(base: &Polymatroid<i64>) -> Result<ExpandedMatroid> {
    let sizes = (0..base.n())
        .map(|i| {
            let r = base.singleton(i);
            u32::try_from(r).map_err(|_| Error::BadRankValue {
                subset: base.ground().label(i).to_string(),
                mode: "block size",
                value: r.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpandedMatroid { base: base.clone(), sizes, dualized: false, cache: RwLock::new(HashMap::new()) })
}

impl ExpandedMatroid {
    pub fn base(&self) -> &Polymatroid<i64> {
        &self.base
    }

    pub fn blocks(&self) -> &GroundSet {
        self.base.ground()
    }

    pub fn block_sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn is_dualized(&self) -> bool {
        self.dualized
    }

    /// Total number of expanded elements, `Σ h(i)`.
    pub fn element_count(&self) -> u64 {
        self.sizes.iter().map(|&s| u64::from(s)).sum()
    }

    /// The same expansion with the dual rank function.
    pub fn dual(&self) -> ExpandedMatroid {
        ExpandedMatroid {
            base: self.base.clone(),
            sizes: self.sizes.clone(),
            dualized: !self.dualized,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn full_counts(&self) -> BlockCounts {
        BlockCounts(self.sizes.clone())
    }

    /// Counts selecting every element of the blocks in `blocks`.
    pub fn block_union(&self, blocks: SubsetMask) -> BlockCounts {
        BlockCounts(self.sizes.iter().enumerate().map(|(i, &s)| if blocks.contains(i) { s } else { 0 }).collect())
    }

    pub fn check_counts(&self, counts: &BlockCounts) -> Result<()> {
        if counts.0.len() != self.sizes.len() {
            return Err(Error::WrongArity { expected: self.sizes.len(), got: counts.0.len() });
        }
        if let Some(i) = (0..self.sizes.len()).find(|&i| counts.0[i] > self.sizes[i]) {
            return Err(Error::InvalidSelection(format!(
                "block {} has {} elements, {} requested",
                self.blocks().label(i),
                self.sizes[i],
                counts.0[i]
            )));
        }
        Ok(())
    }

    /// Rank of the selection (dual rank when dualized). Memoized.
    pub fn rank(&self, counts: &BlockCounts) -> Result<i64> {
        self.check_counts(counts)?;
        if let Some(&v) = self.cache.read().expect("rank cache poisoned").get(&counts.0) {
            return Ok(v);
        }
        let v = if self.dualized {
            let complement = BlockCounts(self.sizes.iter().zip(&counts.0).map(|(s, c)| s - c).collect());
            let total = self.primal_rank(&self.full_counts());
            self.primal_rank(&complement) + counts.total() as i64 - total
        } else {
            self.primal_rank(counts)
        };
        // Concurrent writers insert identical values.
        self.cache.write().expect("rank cache poisoned").insert(counts.0.clone(), v);
        Ok(v)
    }

    fn primal_rank(&self, counts: &BlockCounts) -> i64 {
        let n = self.base.n();
        self.blocks()
            .subsets()
            .map(|a| {
                let outside: i64 = (0..n).filter(|&i| !a.contains(i)).map(|i| i64::from(counts.0[i])).sum();
                self.base.rank(a) + outside
            })
            .min()
            .expect("at least the empty set")
    }

    pub fn cached_states(&self) -> usize {
        self.cache.read().expect("rank cache poisoned").len()
    }

    /// Label of the `k`-th element (1-based) of `block`: `"<block>_<k>"`.
    pub fn element_label(&self, block: usize, k: u32) -> String {
        format!("{}_{}", self.blocks().label(block), k)
    }

    /// Parses `"a:12,b:3"` (per-block counts) or `"a_1,a_2,b_5"` (named elements).
    /// The empty string selects nothing.
    pub fn parse_selection(&self, text: &str) -> Result<BlockCounts> {
        let mut counts = BlockCounts::zeros(self.sizes.len());
        let mut named: Vec<Vec<bool>> = self.sizes.iter().map(|&s| vec![false; s as usize]).collect();
        let mut seen_count_form = vec![false; self.sizes.len()];
        let bad = |msg: String| Error::InvalidSelection(msg);
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((block, count)) = part.split_once(':') {
                let b = self.blocks().index(block.trim())?;
                let c: u32 = count.trim().parse().map_err(|_| bad(part.to_string()))?;
                if seen_count_form[b] || counts.0[b] > 0 {
                    return Err(bad(format!("block {block} given twice")));
                }
                seen_count_form[b] = true;
                counts.0[b] = c;
            } else if let Some((block, k)) = part.rsplit_once('_') {
                let b = self.blocks().index(block)?;
                let k: u32 = k.parse().map_err(|_| bad(part.to_string()))?;
                if k == 0 || k > self.sizes[b] {
                    return Err(bad(format!("{part}: block {block} has elements 1..={}", self.sizes[b])));
                }
                if seen_count_form[b] || std::mem::replace(&mut named[b][k as usize - 1], true) {
                    return Err(bad(format!("{part} selected twice")));
                }
                counts.0[b] += 1;
            } else {
                return Err(bad(part.to_string()));
            }
        }
        self.check_counts(&counts)?;
        Ok(counts)
    }

    /// View of the expansion on block unions, as a set function on the base ground set.
    pub fn block_view(&self) -> BlockView<'_> {
        BlockView { expansion: self }
    }

    /// MMRV evaluated on block unions, with roles naming base elements.
    pub fn mmrv(&self, roles: &Roles) -> Result<i64> {
        if self.blocks().len() < 5 {
            return Err(Error::WrongArity { expected: 5, got: self.blocks().len() });
        }
        mmrv_with_roles(&self.block_view(), roles)
    }

    /// Dense rank vector over the expanded elements, labelled `a_1, a_2, …`
    /// block by block. Only for expansions with at most 20 elements.
    pub fn to_dense(&self) -> Result<Polymatroid<i64>> {
        let total = self.element_count() as usize;
        if total == 0 || total > MAX_DENSE {
            return Err(Error::GroundSize { got: total, max: MAX_DENSE });
        }
        let mut labels = Vec::with_capacity(total);
        let mut owner = Vec::with_capacity(total);
        for (b, &s) in self.sizes.iter().enumerate() {
            for k in 1..=s {
                labels.push(self.element_label(b, k));
                owner.push(b);
            }
        }
        let ground = GroundSet::new(labels)?;
        let mut values = Vec::with_capacity(ground.subset_count());
        for s in ground.subsets() {
            let mut counts = BlockCounts::zeros(self.sizes.len());
            for e in s.elements() {
                counts.0[owner[e]] += 1;
            }
            values.push(self.rank(&counts)?);
        }
        Ok(Polymatroid::trusted(RankVector::from_values(ground, values)?))
    }
}

/// Block-level set function of an [`ExpandedMatroid`].
pub struct BlockView<'a> {
    expansion: &'a ExpandedMatroid,
}

impl SetFunction<i64> for BlockView<'_> {
    fn ground(&self) -> &GroundSet {
        self.expansion.blocks()
    }

    fn value(&self, s: SubsetMask) -> i64 {
        self.expansion.rank(&self.expansion.block_union(s)).expect("block unions are valid selections")
    }
}
