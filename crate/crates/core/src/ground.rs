//! Ground sets and subsets encoded as bitmasks.
//!
//! Element `i` of a [`GroundSet`] is bit `i` of a [`SubsetMask`]. Subsets are
//! serialized as their labels joined by `,` in ground-set order.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set stored densely (2^20 rank values).
pub const MAX_DENSE: usize = 20;

/// An ordered list of distinct element labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_DENSE {
            return Err(Error::GroundSize { got: labels.len(), max: MAX_DENSE });
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.contains(',') || label.contains(':') || label.chars().any(char::is_whitespace)
            {
                return Err(Error::InvalidLabel(label.clone()));
            }
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(GroundSet { labels })
    }

    /// `a, b, c, ...` for the first `n` letters.
    pub fn letters(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DENSE {
            return Err(Error::GroundSize { got: n, max: MAX_DENSE });
        }
        GroundSet::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.len())
    }

    /// Number of subsets, including the empty set.
    pub fn subset_count(&self) -> usize {
        1 << self.len()
    }

    pub fn subsets(&self) -> impl Iterator<Item = SubsetMask> {
        (0..self.subset_count() as u32).map(SubsetMask)
    }

    pub fn contains_mask(&self, s: SubsetMask) -> bool {
        s.is_subset_of(self.full())
    }

    pub fn check_mask(&self, s: SubsetMask) -> Result<SubsetMask> {
        if self.contains_mask(s) {
            Ok(s)
        } else {
            Err(Error::SubsetOutOfRange(s.0))
        }
    }

    pub fn check_element(&self, i: usize) -> Result<usize> {
        if i < self.len() {
            Ok(i)
        } else {
            Err(Error::ElementOutOfRange(i))
        }
    }

    /// Parses a comma-separated label list. The empty string is the empty set.
    pub fn parse_subset(&self, key: &str) -> Result<SubsetMask> {
        let mut mask = SubsetMask::EMPTY;
        let key = key.trim();
        if key.is_empty() {
            return Ok(mask);
        }
        for part in key.split(',') {
            let label = part.trim();
            let i = self.index(label)?;
            if mask.contains(i) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            mask = mask.with(i);
        }
        Ok(mask)
    }

    pub fn format_subset(&self, s: SubsetMask) -> String {
        s.elements().map(|i| self.labels[i].as_str()).collect::<Vec<_>>().join(",")
    }

    pub fn subset_labels(&self, s: SubsetMask) -> Vec<String> {
        s.elements().map(|i| self.labels[i].clone()).collect()
    }

    /// Ground set with element `i` removed; later elements shift down by one.
    pub fn without(&self, i: usize) -> Result<GroundSet> {
        self.check_element(i)?;
        let mut labels = self.labels.clone();
        labels.remove(i);
        GroundSet::new(labels)
    }

    /// Ground set with `label` appended as the last element.
    pub fn with_label(&self, label: &str) -> Result<GroundSet> {
        let mut labels = self.labels.clone();
        labels.push(label.to_string());
        GroundSet::new(labels)
    }
}

impl TryFrom<Vec<String>> for GroundSet {
    type Error = Error;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        GroundSet::new(labels)
    }
}

impl From<GroundSet> for Vec<String> {
    fn from(g: GroundSet) -> Self {
        g.labels
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(","))
    }
}

/// A subset of a ground set of at most 32 elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(n: usize) -> SubsetMask {
        debug_assert!(n <= 32);
        if n == 32 {
            SubsetMask(u32::MAX)
        } else {
            SubsetMask((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> SubsetMask {
        SubsetMask(1 << i)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(items: I) -> SubsetMask {
        items.into_iter().fold(SubsetMask::EMPTY, SubsetMask::with)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> SubsetMask {
        SubsetMask(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> SubsetMask {
        SubsetMask(self.0 & !(1 << i))
    }

    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & other.0)
    }

    pub fn difference(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & !other.0)
    }

    /// Complement relative to a ground set of `n` elements.
    pub fn complement(self, n: usize) -> SubsetMask {
        SubsetMask::full(n).difference(self)
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: SubsetMask) -> bool {
        self.0 & other.0 == 0
    }

    /// Element indices in increasing order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, from `self` down to the empty set.
    pub fn submasks(self) -> impl Iterator<Item = SubsetMask> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(SubsetMask(cur))
        })
    }

    /// Inserts a zero bit at position `i`, shifting higher bits up.
    /// Maps a subset of `ground.without(i)` back into `ground`.
    pub fn insert_gap(self, i: usize) -> SubsetMask {
        let low = self.0 & ((1u32 << i) - 1);
        let high = (self.0 >> i) << (i + 1);
        SubsetMask(low | high)
    }

    /// Removes bit `i`, shifting higher bits down. Inverse of [`insert_gap`](Self::insert_gap).
    pub fn remove_gap(self, i: usize) -> SubsetMask {
        let low = self.0 & ((1u32 << i) - 1);
        let high = (self.0 >> (i + 1)) << i;
        SubsetMask(low | high)
    }
}

/// All `k`-element subsets of an `n`-element ground set, in increasing numeric order.
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = SubsetMask> {
    let limit: u64 = 1 << n;
    let mut cur: Option<u64> = if k > n {
        None
    } else if k == 0 {
        Some(0)
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let c = cur?;
        cur = if c == 0 {
            None
        } else {
            // Gosper's hack
            let low = c & c.wrapping_neg();
            let ripple = c + low;
            let next = (((ripple ^ c) >> 2) / low) | ripple;
            (next < limit).then_some(next)
        };
        Some(SubsetMask(c as u32))
    })
}

impl BitOr for SubsetMask {
    type Output = SubsetMask;
    fn bitor(self, rhs: SubsetMask) -> SubsetMask {
        self.union(rhs)
    }
}

impl BitAnd for SubsetMask {
    type Output = SubsetMask;
    fn bitand(self, rhs: SubsetMask) -> SubsetMask {
        self.intersection(rhs)
    }
}

impl Sub for SubsetMask {
    type Output = SubsetMask;
    fn sub(self, rhs: SubsetMask) -> SubsetMask {
        self.difference(rhs)
    }
}

impl Not for SubsetMask {
    type Output = SubsetMask;
    fn not(self) -> SubsetMask {
        SubsetMask(!self.0)
    }
}
