//! Dense set functions over a ground set, in exact-integer or binary64 mode.

use std::fmt::{Debug, Display};
use std::ops::{Add, Neg, Sub};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::ground::{GroundSet, SubsetMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Int,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Int => "int",
            Mode::Float => "float",
        }
    }
}

/// Scalar type of a rank function. `i64` comparisons are exact and ignore
/// tolerances; `f64` comparisons use the tolerance passed by the caller.
pub trait Rank:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    const ZERO: Self;
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;
    fn to_f64(self) -> f64;
    fn times(self, k: i64) -> Self;

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `|self - other| <= tol` (exact equality in integer mode).
    fn approx_eq(self, other: Self, tol: f64) -> bool;

    /// `self >= -tol` (exact in integer mode).
    fn nonneg_within(self, tol: f64) -> bool;

    fn to_json(self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
}

impl Rank for i64 {
    const ZERO: Self = 0;
    const MODE: Mode = Mode::Int;

    fn from_i64(v: i64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn times(self, k: i64) -> Self {
        self * k
    }

    fn approx_eq(self, other: Self, _tol: f64) -> bool {
        self == other
    }

    fn nonneg_within(self, _tol: f64) -> bool {
        self >= 0
    }

    fn to_json(self) -> Value {
        Value::from(self)
    }

    fn from_json(v: &Value) -> Option<Self> {
        v.as_i64()
    }
}

impl Rank for f64 {
    const ZERO: Self = 0.0;
    const MODE: Mode = Mode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn times(self, k: i64) -> Self {
        self * k as f64
    }

    fn approx_eq(self, other: Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn nonneg_within(self, tol: f64) -> bool {
        self >= -tol
    }

    fn to_json(self) -> Value {
        Value::from(self)
    }

    fn from_json(v: &Value) -> Option<Self> {
        v.as_f64().filter(|x| x.is_finite())
    }
}

/// Anything that assigns a value to every subset of a ground set.
pub trait SetFunction<T> {
    fn ground(&self) -> &GroundSet;
    fn value(&self, s: SubsetMask) -> T;
}

/// Values of a set function on all `2^n` subsets, indexed by mask.
/// The empty-set entry is always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RankVector<T> {
    ground: GroundSet,
    values: Vec<T>,
}

impl<T: Rank> RankVector<T> {
    pub fn from_fn(ground: GroundSet, mut f: impl FnMut(SubsetMask) -> T) -> Self {
        let values = ground.subsets().map(|s| if s.is_empty() { T::ZERO } else { f(s) }).collect();
        RankVector { ground, values }
    }

    /// `values[mask]` for every mask in `0..2^n`; `values[0]` must be zero.
    pub fn from_values(ground: GroundSet, values: Vec<T>) -> Result<Self> {
        if values.len() != ground.subset_count() {
            return Err(Error::RankLength { expected: ground.subset_count(), got: values.len() });
        }
        if values[0] != T::ZERO {
            return Err(Error::NonZeroEmptyRank(values[0].to_string()));
        }
        Ok(RankVector { ground, values })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.len()
    }

    pub fn mode(&self) -> Mode {
        T::MODE
    }

    pub fn get(&self, s: SubsetMask) -> T {
        self.values[s.index()]
    }

    /// Values indexed by mask, including the empty set at index 0.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Number of stored non-empty subsets, `2^n - 1`.
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn full_rank(&self) -> T {
        *self.values.last().expect("ground set is non-empty")
    }

    /// Sum of singleton values over `s`.
    pub fn mu(&self, s: SubsetMask) -> T {
        s.elements().fold(T::ZERO, |acc, i| acc + self.values[1 << i])
    }

    pub fn map<U: Rank>(&self, f: impl Fn(T) -> U) -> RankVector<U> {
        RankVector { ground: self.ground.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn to_float(&self) -> RankVector<f64> {
        self.map(Rank::to_f64)
    }

    /// Largest coordinate-wise difference to `other`.
    pub fn max_abs_diff(&self, other: &RankVector<T>) -> Result<f64> {
        ensure_same_ground(&self.ground, &other.ground)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a.to_f64() - b.to_f64()).abs()).fold(0.0, f64::max))
    }

    /// Non-empty subsets in serialization order: by cardinality, then lexicographically
    /// by element index.
    pub fn ordered_subsets(&self) -> Vec<SubsetMask> {
        ordered_subsets(self.n())
    }

    pub fn to_json_value(&self) -> Value {
        let mut ranks = Map::new();
        for s in self.ordered_subsets() {
            ranks.insert(self.ground.format_subset(s), self.get(s).to_json());
        }
        let mut root = Map::new();
        root.insert("ground".into(), Value::from(self.ground.labels().to_vec()));
        root.insert("mode".into(), Value::from(T::MODE.name()));
        root.insert("ranks".into(), Value::Object(ranks));
        Value::Object(root)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("json values serialize");
        s.push('\n');
        s
    }

    fn from_file_parts(ground: GroundSet, ranks: &Map<String, Value>) -> Result<Self> {
        let mut values: Vec<Option<T>> = vec![None; ground.subset_count()];
        values[0] = Some(T::ZERO);
        for (key, raw) in ranks {
            let s = ground.parse_subset(key)?;
            let v = T::from_json(raw).ok_or_else(|| Error::BadRankValue {
                subset: key.clone(),
                mode: T::MODE.name(),
                value: raw.to_string(),
            })?;
            if s.is_empty() {
                if v != T::ZERO {
                    return Err(Error::NonZeroEmptyRank(v.to_string()));
                }
                continue;
            }
            if values[s.index()].replace(v).is_some() {
                return Err(Error::RepeatedSubset(key.clone()));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(m, v)| v.ok_or_else(|| Error::MissingSubset(ground.format_subset(SubsetMask(m as u32)))))
            .collect::<Result<Vec<T>>>()?;
        Ok(RankVector { ground, values })
    }
}

impl RankVector<f64> {
    pub fn scale(&self, k: f64) -> RankVector<f64> {
        self.map(|v| v * k)
    }
}

impl<T: Rank> SetFunction<T> for RankVector<T> {
    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn value(&self, s: SubsetMask) -> T {
        self.get(s)
    }
}

pub(crate) fn ensure_same_ground(a: &GroundSet, b: &GroundSet) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GroundMismatch { left: a.labels().to_vec(), right: b.labels().to_vec() })
    }
}

pub fn ordered_subsets(n: usize) -> Vec<SubsetMask> {
    let mut all: Vec<SubsetMask> = (1..1u32 << n).map(SubsetMask).collect();
    all.sort_by_cached_key(|s| (s.len(), s.elements().collect::<Vec<_>>()));
    all
}

#[derive(Deserialize)]
struct RankFile {
    ground: GroundSet,
    mode: Mode,
    ranks: Map<String, Value>,
}

/// A rank vector of either mode, as read from a file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyRankVector {
    Int(RankVector<i64>),
    Float(RankVector<f64>),
}

impl AnyRankVector {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: RankFile = serde_json::from_str(text)?;
        Ok(match file.mode {
            Mode::Int => AnyRankVector::Int(RankVector::from_file_parts(file.ground, &file.ranks)?),
            Mode::Float => AnyRankVector::Float(RankVector::from_file_parts(file.ground, &file.ranks)?),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        AnyRankVector::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn mode(&self) -> Mode {
        match self {
            AnyRankVector::Int(_) => Mode::Int,
            AnyRankVector::Float(_) => Mode::Float,
        }
    }

    pub fn ground(&self) -> &GroundSet {
        match self {
            AnyRankVector::Int(r) => r.ground(),
            AnyRankVector::Float(r) => r.ground(),
        }
    }

    pub fn to_json_string(&self) -> String {
        match self {
            AnyRankVector::Int(r) => r.to_json_string(),
            AnyRankVector::Float(r) => r.to_json_string(),
        }
    }

    pub fn into_int(self) -> Result<RankVector<i64>> {
        match self {
            AnyRankVector::Int(r) => Ok(r),
            AnyRankVector::Float(_) => Err(Error::FloatModeRejected),
        }
    }

    /// Float view; integer vectors are converted exactly.
    pub fn to_float(&self) -> RankVector<f64> {
        match self {
            AnyRankVector::Int(r) => r.to_float(),
            AnyRankVector::Float(r) => r.clone(),
        }
    }
}

impl From<RankVector<i64>> for AnyRankVector {
    fn from(r: RankVector<i64>) -> Self {
        AnyRankVector::Int(r)
    }
}

impl From<RankVector<f64>> for AnyRankVector {
    fn from(r: RankVector<f64>) -> Self {
        AnyRankVector::Float(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u23() -> RankVector<i64> {
        RankVector::from_fn(GroundSet::letters(3).unwrap(), |s| s.len().min(2) as i64)
    }

    #[test]
    fn mu_is_singleton_sum() {
        let r = u23();
        let g = r.ground().clone();
        assert_eq!(r.mu(g.parse_subset("a,b").unwrap()), 2);
        assert_eq!(r.mu(SubsetMask::EMPTY), 0);
    }

    #[test]
    fn json_round_trip_and_order() {
        let r = u23();
        let text = r.to_json_string();
        assert!(text.find("\"a\"").unwrap() < text.find("\"a,b\"").unwrap());
        assert!(text.find("\"c\"").unwrap() < text.find("\"a,b\"").unwrap());
        let back = AnyRankVector::from_json_str(&text).unwrap();
        assert_eq!(back, AnyRankVector::Int(r));
    }

    #[test]
    fn missing_key_is_error() {
        let text = r#"{"ground":["a","b"],"mode":"int","ranks":{"a":1,"b":1}}"#;
        assert!(matches!(AnyRankVector::from_json_str(text), Err(Error::MissingSubset(k)) if k == "a,b"));
    }

    #[test]
    fn keys_in_any_order_and_repeats() {
        let ok = r#"{"ground":["a","b"],"mode":"int","ranks":{"a":1,"b":1,"b,a":2}}"#;
        assert!(AnyRankVector::from_json_str(ok).is_ok());
        let dup = r#"{"ground":["a","b"],"mode":"int","ranks":{"a":1,"b":1,"b,a":2,"a,b":2}}"#;
        assert!(matches!(AnyRankVector::from_json_str(dup), Err(Error::RepeatedSubset(_))));
    }

    #[test]
    fn int_mode_rejects_fractions() {
        let text = r#"{"ground":["a"],"mode":"int","ranks":{"a":1.5}}"#;
        assert!(matches!(AnyRankVector::from_json_str(text), Err(Error::BadRankValue { .. })));
        let unknown = r#"{"ground":["a"],"mode":"int","ranks":{"a":1,"z":1}}"#;
        assert!(matches!(AnyRankVector::from_json_str(unknown), Err(Error::UnknownLabel(_))));
    }

    proptest! {
        #[test]
        fn mu_is_modular(a in 0u32..32, b in 0u32..32, vals in proptest::collection::vec(0i64..10, 5)) {
            let g = GroundSet::letters(5).unwrap();
            let r = RankVector::from_fn(g, |s| s.elements().map(|i| vals[i]).sum::<i64>());
            let (a, b) = (SubsetMask(a), SubsetMask(b));
            prop_assert_eq!(r.mu(a | b) + r.mu(a & b), r.mu(a) + r.mu(b));
        }
    }
}
