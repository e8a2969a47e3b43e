//! Access structures, their duals, matroid ports and realization checks.
//!
//! A polymatroid `f` on `{s} ∪ P` realizes an access structure when every
//! qualified set `A` has `f(sA) = f(A)` and every unqualified set has
//! `f(sA) = f(A) + f(s)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{helgason_expand, BlockCounts, ExpandedMatroid};
use crate::ground::{GroundSet, SubsetMask};
use crate::par::Strategy;
use crate::polymatroid::Polymatroid;
use crate::rank::{AnyRankVector, Rank};

/// Qualified sets listed explicitly as a bitset over all `2^|P|` subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitStructure {
    participants: GroundSet,
    qualified: Vec<bool>,
}

impl ExplicitStructure {
    /// Checks upward closure, `∅ ∉ A` and `P ∈ A`.
    pub fn new(participants: GroundSet, qualified: Vec<bool>) -> Result<Self> {
        if qualified.len() != participants.subset_count() {
            return Err(Error::RankLength { expected: participants.subset_count(), got: qualified.len() });
        }
        let bad = |msg: String| Err(Error::InvalidAccessStructure(msg));
        if qualified[0] {
            return bad("the empty set is qualified".into());
        }
        if !qualified[participants.full().index()] {
            return bad("the set of all participants is not qualified".into());
        }
        for s in participants.subsets().filter(|s| qualified[s.index()]) {
            for i in (0..participants.len()).filter(|&i| !s.contains(i)) {
                if !qualified[s.with(i).index()] {
                    return bad(format!(
                        "not upward closed: {{{}}} is qualified but {{{}}} is not",
                        participants.format_subset(s),
                        participants.format_subset(s.with(i))
                    ));
                }
            }
        }
        Ok(ExplicitStructure { participants, qualified })
    }

    /// Upward closure of `minimal`.
    pub fn from_minimal(participants: GroundSet, minimal: &[SubsetMask]) -> Result<Self> {
        for &m in minimal {
            participants.check_mask(m)?;
        }
        let qualified = participants.subsets().map(|s| minimal.iter().any(|m| m.is_subset_of(s))).collect();
        ExplicitStructure::new(participants, qualified)
    }

    /// `(k, n)`-threshold: a set is qualified iff it has at least `k` members.
    pub fn threshold(participants: GroundSet, k: usize) -> Result<Self> {
        if k == 0 || k > participants.len() {
            return Err(Error::InvalidAccessStructure(format!(
                "threshold {k} out of range 1..={}",
                participants.len()
            )));
        }
        let qualified = participants.subsets().map(|s| s.len() >= k).collect();
        ExplicitStructure::new(participants, qualified)
    }

    pub fn participants(&self) -> &GroundSet {
        &self.participants
    }

    pub fn is_qualified(&self, s: SubsetMask) -> bool {
        self.qualified[s.index()]
    }

    /// Inclusion-minimal qualified sets, in increasing mask order.
    pub fn minimal_qualified(&self) -> Vec<SubsetMask> {
        self.participants
            .subsets()
            .filter(|&s| self.is_qualified(s) && s.elements().all(|i| !self.is_qualified(s.without(i))))
            .collect()
    }

    /// `S` is qualified in the dual iff `P - S` is unqualified here.
    pub fn dual(&self) -> ExplicitStructure {
        let n = self.participants.len();
        let qualified = self.participants.subsets().map(|s| !self.is_qualified(s.complement(n))).collect();
        ExplicitStructure { participants: self.participants.clone(), qualified }
    }

    /// Participants that turn some unqualified set into a qualified one.
    pub fn important_participants(&self) -> SubsetMask {
        let n = self.participants.len();
        SubsetMask::from_elements((0..n).filter(|&i| {
            self.participants.subsets().any(|s| !s.contains(i) && !self.is_qualified(s) && self.is_qualified(s.with(i)))
        }))
    }

    pub fn is_connected(&self) -> bool {
        self.important_participants() == self.participants.full()
    }

    pub fn to_json_string(&self) -> String {
        let file = AccessFile::Explicit {
            participants: self.participants.labels().to_vec(),
            minimal_qualified: self
                .minimal_qualified()
                .into_iter()
                .map(|m| self.participants.subset_labels(m))
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("access structure serializes");
        s.push('\n');
        s
    }
}

/// Port of a dense integer polymatroid at a secret element:
/// `A` is qualified iff `f(sA) = f(A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensePort {
    polymatroid: Polymatroid<i64>,
    secret: usize,
    participants: GroundSet,
    complemented: bool,
}

impl DensePort {
    pub fn new(polymatroid: Polymatroid<i64>, secret: usize) -> Result<Self> {
        let participants = polymatroid.ground().without(secret)?;
        if polymatroid.singleton(secret) == 0 {
            return Err(Error::DegenerateSecret(polymatroid.ground().label(secret).to_string()));
        }
        Ok(DensePort { polymatroid, secret, participants, complemented: false })
    }

    pub fn polymatroid(&self) -> &Polymatroid<i64> {
        &self.polymatroid
    }

    pub fn secret(&self) -> usize {
        self.secret
    }

    pub fn participants(&self) -> &GroundSet {
        &self.participants
    }

    fn port_member(&self, s: SubsetMask) -> bool {
        let a = s.insert_gap(self.secret);
        self.polymatroid.rank(a.with(self.secret)) == self.polymatroid.rank(a)
    }

    pub fn is_qualified(&self, s: SubsetMask) -> bool {
        if self.complemented {
            !self.port_member(s.complement(self.participants.len()))
        } else {
            self.port_member(s)
        }
    }
}

/// Port of an expanded matroid at one element of a block. Participant sets
/// are given as per-block counts; the secret's block offers one element less.
#[derive(Clone, Debug)]
pub struct ExpandedPort {
    expansion: ExpandedMatroid,
    secret_block: usize,
    complemented: bool,
}

impl ExpandedPort {
    pub fn new(expansion: ExpandedMatroid, secret_block: usize) -> Result<Self> {
        expansion.blocks().check_element(secret_block)?;
        if expansion.block_sizes()[secret_block] == 0 {
            return Err(Error::DegenerateSecret(expansion.blocks().label(secret_block).to_string()));
        }
        Ok(ExpandedPort { expansion, secret_block, complemented: false })
    }

    pub fn expansion(&self) -> &ExpandedMatroid {
        &self.expansion
    }

    pub fn secret_block(&self) -> usize {
        self.secret_block
    }

    pub fn participant_count(&self) -> u64 {
        self.expansion.element_count() - 1
    }

    /// Largest participant selection: every block full, minus the secret.
    pub fn all_participants(&self) -> BlockCounts {
        let full = self.expansion.full_counts();
        let k = full.get(self.secret_block);
        full.with(self.secret_block, k - 1)
    }

    fn check(&self, s: &BlockCounts) -> Result<()> {
        let all = self.all_participants();
        if s.0.len() != all.0.len() || s.0.iter().zip(&all.0).any(|(c, m)| c > m) {
            return Err(Error::InvalidSelection(format!("{:?} exceeds the participant counts {:?}", s.0, all.0)));
        }
        Ok(())
    }

    fn port_member(&self, s: &BlockCounts) -> Result<bool> {
        let with_secret = s.clone().incremented(self.secret_block);
        Ok(self.expansion.rank(&with_secret)? == self.expansion.rank(s)?)
    }

    pub fn is_qualified(&self, s: &BlockCounts) -> Result<bool> {
        self.check(s)?;
        if self.complemented {
            let all = self.all_participants();
            let rest = BlockCounts(all.0.iter().zip(&s.0).map(|(m, c)| m - c).collect());
            Ok(!self.port_member(&rest)?)
        } else {
            self.port_member(s)
        }
    }
}

/// A subset of participants, in the form the structure's representation expects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParticipantSet {
    Mask(SubsetMask),
    Counts(BlockCounts),
}

#[derive(Clone, Debug)]
pub enum AccessStructure {
    Explicit(ExplicitStructure),
    Port(DensePort),
    ExpandedPort(ExpandedPort),
}

impl AccessStructure {
    pub fn is_qualified(&self, s: &ParticipantSet) -> Result<bool> {
        match (self, s) {
            (AccessStructure::Explicit(e), ParticipantSet::Mask(m)) => {
                e.participants.check_mask(*m)?;
                Ok(e.is_qualified(*m))
            }
            (AccessStructure::Port(p), ParticipantSet::Mask(m)) => {
                p.participants.check_mask(*m)?;
                Ok(p.is_qualified(*m))
            }
            (AccessStructure::ExpandedPort(p), ParticipantSet::Counts(c)) => p.is_qualified(c),
            _ => Err(Error::Usage("participant set does not match the access structure representation".into())),
        }
    }

    /// Dual structure. Explicit structures are dualized eagerly; oracle-backed
    /// ones wrap their oracle.
    pub fn dual(&self) -> AccessStructure {
        match self {
            AccessStructure::Explicit(e) => AccessStructure::Explicit(e.dual()),
            AccessStructure::Port(p) => AccessStructure::Port(DensePort { complemented: !p.complemented, ..p.clone() }),
            AccessStructure::ExpandedPort(p) => {
                AccessStructure::ExpandedPort(ExpandedPort { complemented: !p.complemented, ..p.clone() })
            }
        }
    }

    /// Materializes the structure; available when participants fit in a ground set.
    pub fn to_explicit(&self) -> Result<ExplicitStructure> {
        match self {
            AccessStructure::Explicit(e) => Ok(e.clone()),
            AccessStructure::Port(p) => {
                let qualified =
                    Strategy::default().map(p.participants.subset_count(), |m| p.is_qualified(SubsetMask(m as u32)));
                ExplicitStructure::new(p.participants.clone(), qualified)
            }
            AccessStructure::ExpandedPort(_) => Err(Error::OracleUnsupported("enumeration of qualified sets")),
        }
    }

    pub fn participants(&self) -> Result<&GroundSet> {
        match self {
            AccessStructure::Explicit(e) => Ok(&e.participants),
            AccessStructure::Port(p) => Ok(&p.participants),
            AccessStructure::ExpandedPort(_) => Err(Error::OracleUnsupported("a dense participant list")),
        }
    }

    /// Important participants and whether all of them are important.
    pub fn important_participants(&self) -> Result<(SubsetMask, bool)> {
        let e = self.to_explicit()?;
        let important = e.important_participants();
        Ok((important, important == e.participants.full()))
    }

    /// Reads `{"participants": [...], "minimal_qualified": [[...], ...]}` or
    /// `{"port": {"matroid_file": path, "secret": label}}` or
    /// `{"port": {"expanded": {"base_file": path, "dualized": bool}, "secret": "a_1"}}`.
    /// Relative paths are resolved against `base_dir`.
    pub fn from_json_str(text: &str, base_dir: &Path) -> Result<AccessStructure> {
        match serde_json::from_str::<AccessFile>(text)? {
            AccessFile::Explicit { participants, minimal_qualified } => {
                let participants = GroundSet::new(participants)?;
                let minimal = minimal_qualified
                    .iter()
                    .map(|set| {
                        let mut m = SubsetMask::EMPTY;
                        for label in set {
                            let i = participants.index(label)?;
                            if m.contains(i) {
                                return Err(Error::DuplicateLabel(label.clone()));
                            }
                            m = m.with(i);
                        }
                        Ok(m)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AccessStructure::Explicit(ExplicitStructure::from_minimal(participants, &minimal)?))
            }
            AccessFile::Port { port } => match port.source {
                PortSource::MatroidFile(path) => {
                    let rank = AnyRankVector::load(base_dir.join(path))?.into_int()?;
                    let p = Polymatroid::validate(rank, 0.0)?;
                    let secret = p.ground().index(&port.secret)?;
                    Ok(AccessStructure::Port(DensePort::new(p, secret)?))
                }
                PortSource::Expanded(spec) => {
                    let rank = AnyRankVector::load(base_dir.join(&spec.base_file))?.into_int()?;
                    let base = Polymatroid::validate(rank, 0.0)?;
                    let mut e = helgason_expand(&base)?;
                    if spec.dualized {
                        e = e.dual();
                    }
                    let secret = e.parse_selection(&port.secret)?;
                    if secret.total() != 1 {
                        return Err(Error::InvalidSelection(format!(
                            "secret {:?} must name exactly one element",
                            port.secret
                        )));
                    }
                    let block = secret.0.iter().position(|&c| c == 1).expect("one element selected");
                    Ok(AccessStructure::ExpandedPort(ExpandedPort::new(e, block)?))
                }
            },
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<AccessStructure> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        AccessStructure::from_json_str(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AccessFile {
    Explicit { participants: Vec<String>, minimal_qualified: Vec<Vec<String>> },
    Port { port: PortFile },
}

#[derive(Serialize, Deserialize)]
struct PortFile {
    #[serde(flatten)]
    source: PortSource,
    secret: String,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PortSource {
    MatroidFile(String),
    Expanded(ExpandedSpec),
}

#[derive(Serialize, Deserialize)]
struct ExpandedSpec {
    base_file: String,
    #[serde(default)]
    dualized: bool,
}

/// Result of checking whether a polymatroid realizes an access structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    /// First participant set (in mask order) where the realization condition fails.
    pub counterexample: Option<SubsetMask>,
}

impl Realization {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks both realization clauses on every participant subset. The
/// polymatroid's ground set minus `secret` must list the structure's
/// participants in the same order.
pub fn realizes<T: Rank>(m: &Polymatroid<T>, secret: usize, a: &AccessStructure, tol: f64) -> Result<Realization> {
    m.ground().check_element(secret)?;
    let fs = m.singleton(secret);
    if fs.approx_eq(T::ZERO, tol) {
        return Err(Error::DegenerateSecret(m.ground().label(secret).to_string()));
    }
    let participants = m.ground().without(secret)?;
    let theirs = a.participants()?;
    if &participants != theirs {
        return Err(Error::GroundMismatch { left: participants.labels().to_vec(), right: theirs.labels().to_vec() });
    }
    let explicit = a.to_explicit()?;
    let found = Strategy::default().find_first(participants.subset_count(), |k| {
        let s = SubsetMask(k as u32);
        let inside = s.insert_gap(secret);
        let gain = m.rank(inside.with(secret)) - m.rank(inside);
        let ok = if explicit.is_qualified(s) { gain.approx_eq(T::ZERO, tol) } else { gain.approx_eq(fs, tol) };
        !ok
    });
    Ok(Realization { counterexample: found.map(|k| SubsetMask(k as u32)) })
}

/// Worst-case relative share size `max f(i)/f(s)` over participants.
pub fn sigma<T: Rank>(m: &Polymatroid<T>, secret: usize) -> Result<f64> {
    m.ground().check_element(secret)?;
    let fs = m.singleton(secret).to_f64();
    if fs <= 0.0 {
        return Err(Error::DegenerateSecret(m.ground().label(secret).to_string()));
    }
    Ok((0..m.n()).filter(|&i| i != secret).map(|i| m.singleton(i).to_f64() / fs).fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShareMargin {
    pub participant: String,
    /// `f(i) - f(s)`; negative values contradict realization.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub margins: Vec<ShareMargin>,
    pub violations: Vec<String>,
}

/// Checks `f(i) >= f(s)` for every important participant `i`.
pub fn important_bound_check<T: Rank>(
    m: &Polymatroid<T>,
    secret: usize,
    a: &AccessStructure,
    tol: f64,
) -> Result<BoundReport> {
    let (important, _) = a.important_participants()?;
    let participants = a.participants()?.clone();
    let fs = m.singleton(secret).to_f64();
    let mut margins = Vec::new();
    let mut violations = Vec::new();
    for p in important.elements() {
        let i = SubsetMask::singleton(p).insert_gap(secret).elements().next().expect("one element");
        let margin = m.singleton(i).to_f64() - fs;
        let label = participants.label(p).to_string();
        if margin < -tol {
            violations.push(label.clone());
        }
        margins.push(ShareMargin { participant: label, margin });
    }
    Ok(BoundReport { margins, violations })
}
