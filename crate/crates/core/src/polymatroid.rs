//! Polymatroid algebra over dense rank vectors.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::{GroundSet, SubsetMask, MAX_DENSE};
use crate::par::Strategy;
use crate::rank::{ensure_same_ground, Rank, RankVector, SetFunction};

/// Default tolerance for accepting float-mode rank vectors.
pub const VALIDATION_TOL: f64 = 1e-9;
/// Default tolerance for independence and connectivity decisions in float mode.
pub const DECISION_TOL: f64 = 1e-6;
/// Default residual allowed when rounding a combination to integers.
pub const ROUNDING_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    /// `f(M) - f(M - i) < 0`
    Monotonicity,
    /// `f(iA) + f(jA) - f(ijA) - f(A) < 0`
    Submodularity,
    /// A float rank that is NaN or infinite.
    NonFinite,
}

/// One failed elemental inequality. `lhs >= rhs` should have held.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub elements: Vec<String>,
    pub subset: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated elemental inequalities", self.violations.len())?;
        if let Some(v) = self.violations.first() {
            write!(
                f,
                " (first: {:?} at elements [{}] over {{{}}}: {} < {})",
                v.kind,
                v.elements.join(","),
                v.subset.join(","),
                v.lhs,
                v.rhs
            )?;
        }
        Ok(())
    }
}

/// Lists every violated elemental inequality of `rank`.
pub fn elemental_violations<T: Rank>(rank: &RankVector<T>, tol: f64, strategy: Strategy) -> ViolationReport {
    let g = rank.ground();
    let n = g.len();
    let full = g.full();
    let mut violations = Vec::new();

    for s in g.subsets().skip(1) {
        if !rank.get(s).to_f64().is_finite() {
            violations.push(Violation {
                kind: ViolationKind::NonFinite,
                elements: vec![],
                subset: g.subset_labels(s),
                lhs: rank.get(s).to_f64(),
                rhs: 0.0,
            });
        }
    }
    if !violations.is_empty() {
        return ViolationReport { violations };
    }

    for i in 0..n {
        let rest = full.without(i);
        let gain = rank.get(full) - rank.get(rest);
        if !gain.nonneg_within(tol) {
            violations.push(Violation {
                kind: ViolationKind::Monotonicity,
                elements: vec![g.label(i).to_string()],
                subset: g.subset_labels(rest),
                lhs: rank.get(full).to_f64(),
                rhs: rank.get(rest).to_f64(),
            });
        }
    }

    let submodular = strategy.flat_map(g.subset_count(), |m| {
        let a = SubsetMask(m as u32);
        let fa = rank.get(a);
        let mut found = Vec::new();
        for i in 0..n {
            if a.contains(i) {
                continue;
            }
            let ia = a.with(i);
            for j in (i + 1)..n {
                if a.contains(j) {
                    continue;
                }
                let ja = a.with(j);
                let lhs = rank.get(ia) + rank.get(ja);
                let rhs = rank.get(ia.with(j)) + fa;
                if !(lhs - rhs).nonneg_within(tol) {
                    found.push(Violation {
                        kind: ViolationKind::Submodularity,
                        elements: vec![g.label(i).to_string(), g.label(j).to_string()],
                        subset: g.subset_labels(a),
                        lhs: lhs.to_f64(),
                        rhs: rhs.to_f64(),
                    });
                }
            }
        }
        found
    });
    violations.extend(submodular);
    ViolationReport { violations }
}

/// Outcome of a connectivity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Connected,
    /// `f(left) + f(right) = f(M)` for this proper bipartition.
    Disconnected {
        left: SubsetMask,
        right: SubsetMask,
    },
}

impl Connectivity {
    pub fn is_connected(&self) -> bool {
        matches!(self, Connectivity::Connected)
    }
}

/// A rank vector known to be non-negative, monotone and submodular.
#[derive(Clone, Debug, PartialEq)]
pub struct Polymatroid<T> {
    rank: RankVector<T>,
}

impl<T: Rank> Polymatroid<T> {
    /// Accepts `rank` iff every elemental inequality holds within `tol`
    /// (`tol` is ignored in integer mode).
    pub fn validate(rank: RankVector<T>, tol: f64) -> Result<Self> {
        Polymatroid::validate_with(rank, tol, Strategy::default())
    }

    pub fn validate_with(rank: RankVector<T>, tol: f64, strategy: Strategy) -> Result<Self> {
        let report = elemental_violations(&rank, tol, strategy);
        if report.is_empty() {
            Ok(Polymatroid { rank })
        } else {
            Err(Error::NotPolymatroid(report))
        }
    }

    /// Wraps a rank vector that is a polymatroid by construction.
    pub(crate) fn trusted(rank: RankVector<T>) -> Self {
        Polymatroid { rank }
    }

    pub fn rank_vector(&self) -> &RankVector<T> {
        &self.rank
    }

    pub fn into_rank_vector(self) -> RankVector<T> {
        self.rank
    }

    pub fn ground(&self) -> &GroundSet {
        self.rank.ground()
    }

    pub fn n(&self) -> usize {
        self.rank.n()
    }

    pub fn rank(&self, s: SubsetMask) -> T {
        self.rank.get(s)
    }

    pub fn full_rank(&self) -> T {
        self.rank.full_rank()
    }

    pub fn singleton(&self, i: usize) -> T {
        self.rank.get(SubsetMask::singleton(i))
    }

    pub fn mu(&self, s: SubsetMask) -> T {
        self.rank.mu(s)
    }

    /// `f(M) - f(M - i)`, the information only `i` has.
    pub fn private_info(&self, i: usize) -> T {
        let full = self.ground().full();
        self.rank(full) - self.rank(full.without(i))
    }

    pub fn is_tight(&self, tol: f64) -> bool {
        (0..self.n()).all(|i| self.private_info(i).approx_eq(T::ZERO, tol))
    }

    pub fn loops(&self, tol: f64) -> SubsetMask {
        SubsetMask::from_elements((0..self.n()).filter(|&i| self.singleton(i).approx_eq(T::ZERO, tol)))
    }

    /// `f⊥(A) = f(M - A) + μ(A) - f(M)`. Always tight.
    pub fn dual(&self) -> Polymatroid<T> {
        let n = self.n();
        let total = self.full_rank();
        Polymatroid::trusted(RankVector::from_fn(self.ground().clone(), |a| {
            self.rank(a.complement(n)) + self.mu(a) - total
        }))
    }

    /// Removes the private information of element `i` from every set containing it.
    pub fn tighten_at(&self, i: usize) -> Result<Polymatroid<T>> {
        self.ground().check_element(i)?;
        let p = self.private_info(i);
        Ok(Polymatroid::trusted(RankVector::from_fn(self.ground().clone(), |a| {
            if a.contains(i) {
                self.rank(a) - p
            } else {
                self.rank(a)
            }
        })))
    }

    /// Tightening at every element. Private information does not change when
    /// another element is tightened, so all of them are removed at once.
    pub fn tighten(&self) -> Polymatroid<T> {
        let private: Vec<T> = (0..self.n()).map(|i| self.private_info(i)).collect();
        Polymatroid::trusted(RankVector::from_fn(self.ground().clone(), |a| {
            a.elements().fold(self.rank(a), |acc, i| acc - private[i])
        }))
    }

    /// Searches for a proper bipartition `A ∪ B = M` with `f(A) + f(B) = f(M)`.
    pub fn connectivity(&self, tol: f64) -> Connectivity {
        self.connectivity_with(tol, Strategy::default())
    }

    pub fn connectivity_with(&self, tol: f64, strategy: Strategy) -> Connectivity {
        let n = self.n();
        if n < 2 {
            return Connectivity::Connected;
        }
        let total = self.full_rank();
        // Fix element 0 on the left side; the left side must miss at least one element.
        let halves = 1usize << (n - 1);
        let found = strategy.find_first(halves - 1, |k| {
            let left = SubsetMask(((k as u32) << 1) | 1);
            let right = left.complement(n);
            (self.rank(left) + self.rank(right)).approx_eq(total, tol)
        });
        match found {
            Some(k) => {
                let left = SubsetMask(((k as u32) << 1) | 1);
                Connectivity::Disconnected { left, right: left.complement(n) }
            }
            None => Connectivity::Connected,
        }
    }

    pub fn is_connected(&self, tol: f64) -> bool {
        self.connectivity(tol).is_connected()
    }

    /// `f(A) = Σ f(i)` over `i ∈ A`.
    pub fn is_independent_set(&self, a: SubsetMask, tol: f64) -> Result<bool> {
        self.ground().check_mask(a)?;
        Ok(self.rank(a).approx_eq(self.mu(a), tol))
    }

    /// Rank of each target subset is the rank of the union of its blocks.
    pub fn factor(&self, map: &FactorMap) -> Result<Polymatroid<T>> {
        ensure_same_ground(self.ground(), &map.source)?;
        Ok(Polymatroid::trusted(RankVector::from_fn(map.target.clone(), |a| self.rank(map.preimage(a)))))
    }

    /// One-point extension by `new_label`: `h(a′A) = min{h(A) + α, h(aA)}`.
    /// The new element is appended as the last element of the ground set.
    pub fn principal_extension(&self, a: usize, alpha: T, new_label: &str) -> Result<Polymatroid<T>> {
        self.ground().check_element(a)?;
        if !alpha.nonneg_within(0.0) {
            return Err(Error::NegativeAlpha(alpha.to_f64()));
        }
        let n = self.n();
        if n >= MAX_DENSE {
            return Err(Error::GroundSize { got: n + 1, max: MAX_DENSE });
        }
        let ground = self.ground().with_label(new_label)?;
        let fresh = n;
        Ok(Polymatroid::trusted(RankVector::from_fn(ground, |s| {
            if s.contains(fresh) {
                let base = s.without(fresh);
                (self.rank(base) + alpha).min_of(self.rank(base.with(a)))
            } else {
                self.rank(s)
            }
        })))
    }

    /// Splits element `a` into two elements of ranks `alpha1` and `alpha2`
    /// with `alpha1 + alpha2 = h(a)`. The first new element takes `a`'s
    /// position; the second is appended at the end.
    pub fn split_atom(&self, a: usize, alpha1: T, alpha2: T, labels: [&str; 2], tol: f64) -> Result<Polymatroid<T>> {
        self.ground().check_element(a)?;
        for alpha in [alpha1, alpha2] {
            if !alpha.nonneg_within(0.0) {
                return Err(Error::NegativeAlpha(alpha.to_f64()));
            }
        }
        let ha = self.singleton(a);
        if !(alpha1 + alpha2).approx_eq(ha, tol) {
            return Err(Error::SplitSumMismatch { sum: (alpha1 + alpha2).to_f64(), rank: ha.to_f64() });
        }
        let n = self.n();
        if n >= MAX_DENSE {
            return Err(Error::GroundSize { got: n + 1, max: MAX_DENSE });
        }
        let mut labels_out = self.ground().labels().to_vec();
        labels_out[a] = labels[0].to_string();
        labels_out.push(labels[1].to_string());
        let ground = GroundSet::new(labels_out)?;
        let second = n;
        Ok(Polymatroid::trusted(RankVector::from_fn(ground, |s| {
            let has1 = s.contains(a);
            let has2 = s.contains(second);
            let rest = s.without(a).without(second);
            let with_a = rest.with(a);
            match (has1, has2) {
                (false, false) => self.rank(rest),
                (true, false) => (self.rank(rest) + alpha1).min_of(self.rank(with_a)),
                (false, true) => (self.rank(rest) + alpha2).min_of(self.rank(with_a)),
                (true, true) => self.rank(with_a),
            }
        })))
    }
}

impl Polymatroid<f64> {
    pub fn scale(&self, k: f64) -> Result<Polymatroid<f64>> {
        if k < 0.0 {
            return Err(Error::NegativeCoefficient(k));
        }
        Ok(Polymatroid { rank: self.rank.scale(k) })
    }
}

impl Polymatroid<i64> {
    pub fn to_float(&self) -> Polymatroid<f64> {
        Polymatroid { rank: self.rank.to_float() }
    }

    pub fn times(&self, k: i64) -> Result<Polymatroid<i64>> {
        if k < 0 {
            return Err(Error::NegativeCoefficient(k as f64));
        }
        Ok(Polymatroid { rank: self.rank.map(|v| v * k) })
    }
}

impl<T: Rank> SetFunction<T> for Polymatroid<T> {
    fn ground(&self) -> &GroundSet {
        self.rank.ground()
    }

    fn value(&self, s: SubsetMask) -> T {
        self.rank.get(s)
    }
}

/// Surjective map from one ground set onto another; each target element's
/// preimage is its block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorMap {
    source: GroundSet,
    target: GroundSet,
    block_of: Vec<usize>,
    blocks: Vec<SubsetMask>,
}

impl FactorMap {
    /// `block_of[i]` is the target element that source element `i` maps to.
    pub fn new(source: GroundSet, target: GroundSet, block_of: Vec<usize>) -> Result<Self> {
        if block_of.len() != source.len() {
            return Err(Error::WrongArity { expected: source.len(), got: block_of.len() });
        }
        let mut blocks = vec![SubsetMask::EMPTY; target.len()];
        for (i, &t) in block_of.iter().enumerate() {
            target.check_element(t)?;
            blocks[t] = blocks[t].with(i);
        }
        if let Some(t) = blocks.iter().position(|b| b.is_empty()) {
            return Err(Error::NotSurjective(target.label(t).to_string()));
        }
        Ok(FactorMap { source, target, block_of, blocks })
    }

    pub fn identity(ground: GroundSet) -> Self {
        let n = ground.len();
        FactorMap::new(ground.clone(), ground, (0..n).collect()).expect("identity is surjective")
    }

    /// Merges the elements `members` into one element called `new_label`,
    /// placed where the first member was. All other elements keep their order.
    pub fn collapse(source: &GroundSet, members: &[&str], new_label: &str) -> Result<Self> {
        let idx: Vec<usize> = members.iter().map(|l| source.index(l)).collect::<Result<_>>()?;
        let first = *idx.iter().min().ok_or(Error::EmptySubset)?;
        let mut labels = Vec::new();
        let mut block_of = Vec::with_capacity(source.len());
        for i in 0..source.len() {
            if idx.contains(&i) {
                if i == first {
                    labels.push(new_label.to_string());
                }
                block_of.push(usize::MAX);
            } else {
                labels.push(source.label(i).to_string());
                block_of.push(labels.len() - 1);
            }
        }
        let merged = labels.iter().position(|l| l == new_label).expect("label was pushed");
        for b in block_of.iter_mut().filter(|b| **b == usize::MAX) {
            *b = merged;
        }
        FactorMap::new(source.clone(), GroundSet::new(labels)?, block_of)
    }

    pub fn source(&self) -> &GroundSet {
        &self.source
    }

    pub fn target(&self) -> &GroundSet {
        &self.target
    }

    pub fn image(&self, i: usize) -> usize {
        self.block_of[i]
    }

    pub fn block(&self, t: usize) -> SubsetMask {
        self.blocks[t]
    }

    pub fn preimage(&self, a: SubsetMask) -> SubsetMask {
        a.elements().fold(SubsetMask::EMPTY, |acc, t| acc | self.blocks[t])
    }
}

/// `r_A(I) = 1` if `I` meets `A`, else 0.
pub fn basis_r(ground: &GroundSet, a: SubsetMask) -> Result<Polymatroid<i64>> {
    if a.is_empty() {
        return Err(Error::EmptySubset);
    }
    ground.check_mask(a)?;
    Ok(Polymatroid::trusted(RankVector::from_fn(ground.clone(), |s| i64::from(!s.is_disjoint(a)))))
}

/// Pointwise non-negative combination of polymatroids on a common ground set.
/// Terms are summed in input order.
pub fn linear_combine(terms: &[(f64, &Polymatroid<f64>)]) -> Result<RankVector<f64>> {
    let (_, first) = terms.first().ok_or(Error::EmptySubset)?;
    let ground = first.ground().clone();
    for (c, p) in terms {
        if c.is_nan() || *c < 0.0 {
            return Err(Error::NegativeCoefficient(*c));
        }
        ensure_same_ground(&ground, p.ground())?;
    }
    let values = Strategy::default()
        .map(ground.subset_count(), |m| terms.iter().fold(0.0, |acc, (c, p)| acc + c * p.rank(SubsetMask(m as u32))));
    RankVector::from_values(ground, values)
}

/// Rounds every coordinate to the nearest integer and validates the result in
/// exact mode. Fails if some coordinate is more than `tol` from an integer.
pub fn round_to_integer(rank: &RankVector<f64>, tol: f64) -> Result<Polymatroid<i64>> {
    let g = rank.ground();
    let mut worst: Option<(SubsetMask, f64)> = None;
    for s in g.subsets().skip(1) {
        let v = rank.get(s);
        let residual = (v - v.round()).abs();
        if (residual.is_nan() || residual > tol) && worst.is_none_or(|(_, w)| residual > (w - w.round()).abs()) {
            worst = Some((s, v));
        }
    }
    if let Some((s, value)) = worst {
        return Err(Error::ResidualTooLarge { subset: g.format_subset(s), value, tol });
    }
    Polymatroid::validate(rank.map(|v| v.round() as i64), 0.0)
}
