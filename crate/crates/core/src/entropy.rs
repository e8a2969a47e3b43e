//! Finite joint distributions and their entropy vectors (in bits).

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{GroundSet, SubsetMask};
use crate::par::Strategy;
use crate::polymatroid::Polymatroid;
use crate::rank::RankVector;

/// Tolerance on the total probability mass and on overlap marginals.
pub const PROB_TOL: f64 = 1e-9;

/// Entropy vectors are polymatroids (Fujishige), stored in float mode.
pub type EntropyVector = Polymatroid<f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub values: Vec<i64>,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    variables: GroundSet,
    rows: Vec<Row>,
}

impl JointDistribution {
    /// Checks arity, non-negativity, uniqueness of assignments and that the
    /// probabilities sum to 1 within [`PROB_TOL`].
    pub fn new(variables: GroundSet, rows: Vec<Row>) -> Result<Self> {
        let mut seen = HashMap::with_capacity(rows.len());
        let mut total = 0.0;
        for row in &rows {
            if row.values.len() != variables.len() {
                return Err(Error::AssignmentArity { expected: variables.len(), got: row.values.len() });
            }
            if !(row.prob.is_finite() && row.prob >= 0.0) {
                return Err(Error::BadProbability(row.prob));
            }
            if seen.insert(row.values.as_slice(), ()).is_some() {
                return Err(Error::DuplicateAssignment(row.values.clone()));
            }
            total += row.prob;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::ProbabilitySum(total));
        }
        Ok(JointDistribution { variables, rows })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            variables: GroundSet,
            rows: Vec<Row>,
        }
        let file: File = serde_json::from_str(text)?;
        JointDistribution::new(file.variables, file.rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        JointDistribution::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("distribution serializes");
        s.push('\n');
        s
    }

    pub fn variables(&self) -> &GroundSet {
        &self.variables
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Probability of a full assignment; 0 if it is not listed.
    pub fn prob(&self, values: &[i64]) -> f64 {
        self.rows.iter().find(|r| r.values == values).map_or(0.0, |r| r.prob)
    }

    /// Marginal over the variables in `a`, with rows in first-seen order.
    pub fn marginal(&self, a: SubsetMask) -> Result<JointDistribution> {
        if a.is_empty() {
            return Err(Error::EmptySubset);
        }
        self.variables.check_mask(a)?;
        let idx: Vec<usize> = a.elements().collect();
        let variables = GroundSet::new(idx.iter().map(|&i| self.variables.label(i).to_string()))?;
        let rows = marginal_rows(&self.rows, &idx).into_iter().map(|(values, prob)| Row { values, prob }).collect();
        Ok(JointDistribution { variables, rows })
    }

    /// Shannon entropy of the marginal on `a`, in bits. `H(∅) = 0`.
    pub fn entropy_of(&self, a: SubsetMask) -> f64 {
        PackedRows::new(self).entropy(a)
    }

    pub fn entropy_vector(&self) -> EntropyVector {
        self.entropy_vector_with(Strategy::default())
    }

    pub fn entropy_vector_with(&self, strategy: Strategy) -> EntropyVector {
        let packed = PackedRows::new(self);
        let values = strategy.map(self.variables.subset_count(), |m| packed.entropy(SubsetMask(m as u32)));
        let rank = RankVector::from_values(self.variables.clone(), values).expect("one value per subset");
        Polymatroid::trusted(rank)
    }

    /// Entropy vector of `n` independent copies: `n` times the single-copy vector.
    pub fn product_power(&self, n: u32) -> Result<EntropyVector> {
        if n == 0 {
            return Err(Error::Usage("number of copies must be at least 1".into()));
        }
        self.entropy_vector().scale(f64::from(n))
    }

    /// The maximum-entropy coupling of two distributions that agree on their
    /// shared variables: `p(x) = p1(x1) p2(x2) / p12(x12)`, with `0/0 = 0`.
    ///
    /// Output variables are `first`'s variables followed by the variables of
    /// `second` that `first` lacks. The two parts are conditionally
    /// independent given the shared variables.
    pub fn conditional_product(first: &JointDistribution, second: &JointDistribution) -> Result<JointDistribution> {
        let shared: Vec<(usize, usize)> = first
            .variables
            .labels()
            .iter()
            .enumerate()
            .filter_map(|(i, l)| second.variables.index_of(l).map(|j| (i, j)))
            .collect();
        let first_shared: Vec<usize> = shared.iter().map(|&(i, _)| i).collect();
        let second_shared: Vec<usize> = shared.iter().map(|&(_, j)| j).collect();
        let second_own: Vec<usize> = (0..second.variables.len()).filter(|j| !second_shared.contains(j)).collect();

        let overlap1: HashMap<Vec<i64>, f64> = marginal_rows(&first.rows, &first_shared).into_iter().collect();
        let overlap2: HashMap<Vec<i64>, f64> = marginal_rows(&second.rows, &second_shared).into_iter().collect();
        let mut worst = 0.0f64;
        for (k, p) in &overlap1 {
            worst = worst.max((p - overlap2.get(k).copied().unwrap_or(0.0)).abs());
        }
        for (k, p) in &overlap2 {
            worst = worst.max((p - overlap1.get(k).copied().unwrap_or(0.0)).abs());
        }
        if worst > PROB_TOL {
            return Err(Error::InconsistentMarginals(worst));
        }

        let mut labels: Vec<String> = first.variables.labels().to_vec();
        labels.extend(second_own.iter().map(|&j| second.variables.label(j).to_string()));
        let variables = GroundSet::new(labels)?;

        let mut rows = Vec::new();
        for r1 in first.rows.iter().filter(|r| r.prob > 0.0) {
            let key: Vec<i64> = first_shared.iter().map(|&i| r1.values[i]).collect();
            let denom = overlap1[&key];
            for r2 in second.rows.iter().filter(|r| r.prob > 0.0) {
                if second_shared.iter().zip(&key).any(|(&j, v)| r2.values[j] != *v) {
                    continue;
                }
                let mut values = r1.values.clone();
                values.extend(second_own.iter().map(|&j| r2.values[j]));
                rows.push(Row { values, prob: r1.prob * r2.prob / denom });
            }
        }
        JointDistribution::new(variables, rows)
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Rows with every column re-coded to `0..k`, so that the projection of a row
/// onto any subset of columns packs into a single mixed-radix `u64`.
struct PackedRows<'a> {
    dist: &'a JointDistribution,
    codes: Vec<u64>,
    radix: Vec<u64>,
    packable: bool,
}

impl<'a> PackedRows<'a> {
    fn new(dist: &'a JointDistribution) -> Self {
        let n = dist.variables.len();
        let mut seen: Vec<HashMap<i64, u64>> = vec![HashMap::new(); n];
        let mut codes = Vec::with_capacity(dist.rows.len() * n);
        for row in &dist.rows {
            for (column, &v) in seen.iter_mut().zip(&row.values) {
                let next = column.len() as u64;
                codes.push(*column.entry(v).or_insert(next));
            }
        }
        let radix: Vec<u64> = seen.iter().map(|c| c.len().max(1) as u64).collect();
        let packable = radix.iter().try_fold(1u64, |acc, &r| acc.checked_mul(r)).is_some();
        PackedRows { dist, codes, radix, packable }
    }

    /// Entropy of the marginal on `a`; atoms are summed in first-seen order.
    fn entropy(&self, a: SubsetMask) -> f64 {
        if a.is_empty() {
            return 0.0;
        }
        let idx: Vec<usize> = a.elements().collect();
        if !self.packable {
            return marginal_rows(&self.dist.rows, &idx).iter().map(|(_, p)| plogp(*p)).sum();
        }
        let n = self.radix.len();
        let mut position: HashMap<u64, usize> = HashMap::new();
        let mut probs: Vec<f64> = Vec::new();
        for (r, row) in self.dist.rows.iter().enumerate() {
            let key = idx.iter().fold(0u64, |k, &i| k * self.radix[i] + self.codes[r * n + i]);
            match position.get(&key) {
                Some(&k) => probs[k] += row.prob,
                None => {
                    position.insert(key, probs.len());
                    probs.push(row.prob);
                }
            }
        }
        probs.iter().map(|&p| plogp(p)).sum()
    }
}

/// Sums row probabilities over the coordinates in `idx`, keeping first-seen order
/// so that downstream floating-point sums are reproducible.
fn marginal_rows(rows: &[Row], idx: &[usize]) -> Vec<(Vec<i64>, f64)> {
    let mut position: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut out: Vec<(Vec<i64>, f64)> = Vec::new();
    for row in rows {
        let key: Vec<i64> = idx.iter().map(|&i| row.values[i]).collect();
        match position.get(&key) {
            Some(&k) => out[k].1 += row.prob,
            None => {
                position.insert(key.clone(), out.len());
                out.push((key, row.prob));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(labels: &[&str], rows: &[(&[i64], f64)]) -> Result<JointDistribution> {
        JointDistribution::new(
            GroundSet::new(labels.iter().copied()).unwrap(),
            rows.iter().map(|(v, p)| Row { values: v.to_vec(), prob: *p }).collect(),
        )
    }

    #[test]
    fn independent_fair_bits() {
        let d = dist(&["a", "b"], &[(&[0, 0], 0.25), (&[0, 1], 0.25), (&[1, 0], 0.25), (&[1, 1], 0.25)]).unwrap();
        let h = d.entropy_vector();
        assert_abs_diff_eq!(h.rank_vector().values()[1..], [1.0, 1.0, 2.0][..], epsilon = 1e-12);
    }

    #[test]
    fn deterministic_variable_is_a_loop() {
        let d = dist(&["a", "e"], &[(&[0, 7], 0.5), (&[1, 7], 0.5)]).unwrap();
        let h = d.entropy_vector();
        assert_eq!(h.singleton(1), 0.0);
        assert_eq!(h.loops(1e-12), SubsetMask(0b10));
        let single = dist(&["x"], &[(&[3], 1.0)]).unwrap();
        assert_eq!(single.entropy_vector().full_rank(), 0.0);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(dist(&["a"], &[(&[0], 0.5), (&[1], 0.4)]), Err(Error::ProbabilitySum(_))));
        assert!(matches!(dist(&["a"], &[(&[0], 0.5), (&[0], 0.5)]), Err(Error::DuplicateAssignment(_))));
        assert!(matches!(dist(&["a"], &[(&[0, 1], 1.0)]), Err(Error::AssignmentArity { .. })));
        assert!(matches!(dist(&["a"], &[(&[0], 1.5), (&[1], -0.5)]), Err(Error::BadProbability(_))));
    }

    #[test]
    fn marginal_of_product_is_factor() {
        let d = dist(&["a", "b"], &[(&[0, 0], 0.12), (&[0, 1], 0.28), (&[1, 0], 0.18), (&[1, 1], 0.42)]).unwrap();
        let m = d.marginal(SubsetMask(0b10)).unwrap();
        assert_eq!(m.variables().labels(), ["b"]);
        assert_abs_diff_eq!(m.prob(&[0]), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(m.prob(&[1]), 0.7, epsilon = 1e-12);
        assert_eq!(d.marginal(SubsetMask(0b11)).unwrap(), d);
        assert!(matches!(d.marginal(SubsetMask::EMPTY), Err(Error::EmptySubset)));
    }

    #[test]
    fn product_power_scales() {
        let d = dist(&["a"], &[(&[0], 0.5), (&[1], 0.5)]).unwrap();
        assert_abs_diff_eq!(d.product_power(2).unwrap().full_rank(), 2.0, epsilon = 1e-12);
        assert_eq!(d.product_power(1).unwrap(), d.entropy_vector());
        assert!(d.product_power(0).is_err());
    }

    #[test]
    fn conditional_product_rejects_inconsistent_overlap() {
        let ab = dist(&["a", "b"], &[(&[0, 0], 0.5), (&[1, 1], 0.5)]).unwrap();
        let bc = dist(&["b", "c"], &[(&[0, 0], 0.3), (&[1, 0], 0.7)]).unwrap();
        assert!(matches!(JointDistribution::conditional_product(&ab, &bc), Err(Error::InconsistentMarginals(_))));
    }

    #[test]
    fn conditional_product_fixed_point() {
        // a - b - c Markov chain: already conditionally independent given b.
        let mut rows = Vec::new();
        for a in 0..2i64 {
            for b in 0..2i64 {
                for c in 0..2i64 {
                    let pa = if a == 0 { 0.3 } else { 0.7 };
                    let pb = if a == b { 0.8 } else { 0.2 };
                    let pc = if b == c { 0.6 } else { 0.4 };
                    rows.push(Row { values: vec![a, b, c], prob: pa * pb * pc });
                }
            }
        }
        let d = JointDistribution::new(GroundSet::letters(3).unwrap(), rows).unwrap();
        let joined = JointDistribution::conditional_product(
            &d.marginal(SubsetMask(0b011)).unwrap(),
            &d.marginal(SubsetMask(0b110)).unwrap(),
        )
        .unwrap();
        assert_eq!(joined.variables(), d.variables());
        for r in d.rows() {
            assert_abs_diff_eq!(joined.prob(&r.values), r.prob, epsilon = 1e-12);
        }
    }
}
