//! Linear information expressions and the five-variable MMRV inequality.
//!
//! For disjoint sets the abbreviations are
//!
//! * `H(A|B) = h(AB) - h(B)`
//! * `I(A;B|C) = h(AC) + h(BC) - h(ABC) - h(C)`
//!
//! with `I(A;B) = I(A;B|∅)`. The MMRV expression on roles `a..e` is
//!
//! ```text
//! I(a;b|c) + I(b;c|a) + I(c;a|b) + I(b;c|d) + I(b;c|e) + I(d;e) - I(b;c)
//! ```
//!
//! It is non-negative on every almost-entropic polymatroid, so a negative
//! value certifies that a polymatroid is not almost entropic.

use crate::error::{Error, Result};
use crate::ground::{GroundSet, SubsetMask};
use crate::rank::{Rank, SetFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfoTerm {
    /// `coefficient · H(target | given)`
    Entropy { target: SubsetMask, given: SubsetMask, coefficient: i64 },
    /// `coefficient · I(left ; right | given)`
    Mutual { left: SubsetMask, right: SubsetMask, given: SubsetMask, coefficient: i64 },
}

impl InfoTerm {
    pub fn entropy(target: SubsetMask, given: SubsetMask) -> Result<InfoTerm> {
        if !target.is_disjoint(given) {
            return Err(Error::OverlappingArguments);
        }
        Ok(InfoTerm::Entropy { target, given, coefficient: 1 })
    }

    pub fn mutual(left: SubsetMask, right: SubsetMask, given: SubsetMask) -> Result<InfoTerm> {
        if !(left.is_disjoint(right) && left.is_disjoint(given) && right.is_disjoint(given)) {
            return Err(Error::OverlappingArguments);
        }
        Ok(InfoTerm::Mutual { left, right, given, coefficient: 1 })
    }

    pub fn times(self, k: i64) -> InfoTerm {
        match self {
            InfoTerm::Entropy { target, given, coefficient } => {
                InfoTerm::Entropy { target, given, coefficient: coefficient * k }
            }
            InfoTerm::Mutual { left, right, given, coefficient } => {
                InfoTerm::Mutual { left, right, given, coefficient: coefficient * k }
            }
        }
    }

    pub fn coefficient(&self) -> i64 {
        match *self {
            InfoTerm::Entropy { coefficient, .. } | InfoTerm::Mutual { coefficient, .. } => coefficient,
        }
    }

    fn support(&self) -> SubsetMask {
        match *self {
            InfoTerm::Entropy { target, given, .. } => target | given,
            InfoTerm::Mutual { left, right, given, .. } => left | right | given,
        }
    }

    /// Value of the term without its coefficient.
    pub fn eval_unit<T: Rank, F: SetFunction<T> + ?Sized>(&self, f: &F) -> T {
        match *self {
            InfoTerm::Entropy { target, given, .. } => f.value(target | given) - f.value(given),
            InfoTerm::Mutual { left, right, given, .. } => {
                f.value(left | given) + f.value(right | given) - f.value(left | right | given) - f.value(given)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InfoExpression {
    terms: Vec<InfoTerm>,
}

impl InfoExpression {
    pub fn new() -> Self {
        InfoExpression::default()
    }

    pub fn with(mut self, term: InfoTerm) -> Self {
        self.terms.push(term);
        self
    }

    pub fn push(&mut self, term: InfoTerm) {
        self.terms.push(term);
    }

    pub fn extend(&mut self, other: &InfoExpression) {
        self.terms.extend_from_slice(&other.terms);
    }

    pub fn terms(&self) -> &[InfoTerm] {
        &self.terms
    }

    pub fn eval<T: Rank, F: SetFunction<T> + ?Sized>(&self, f: &F) -> Result<T> {
        let ground = f.ground();
        for t in &self.terms {
            ground.check_mask(t.support())?;
        }
        Ok(self.terms.iter().fold(T::ZERO, |acc, t| acc + t.eval_unit(f).times(t.coefficient())))
    }
}

/// Which (disjoint, non-empty) subsets play the roles `a, b, c, d, e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Roles {
    pub a: SubsetMask,
    pub b: SubsetMask,
    pub c: SubsetMask,
    pub d: SubsetMask,
    pub e: SubsetMask,
}

impl Roles {
    pub fn new(parts: [SubsetMask; 5]) -> Result<Roles> {
        for (i, p) in parts.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::EmptySubset);
            }
            if parts[..i].iter().any(|q| !q.is_disjoint(*p)) {
                return Err(Error::OverlappingArguments);
            }
        }
        let [a, b, c, d, e] = parts;
        Ok(Roles { a, b, c, d, e })
    }

    /// Elements 0..5 of a five-element ground set, in order.
    pub fn positional(ground: &GroundSet) -> Result<Roles> {
        if ground.len() != 5 {
            return Err(Error::WrongArity { expected: 5, got: ground.len() });
        }
        Roles::new(std::array::from_fn(SubsetMask::singleton))
    }

    /// Five labels, comma separated, naming the elements for `a, b, c, d, e`.
    pub fn from_labels(ground: &GroundSet, spec: &str) -> Result<Roles> {
        let labels: Vec<&str> = spec.split(',').map(str::trim).collect();
        if labels.len() != 5 {
            return Err(Error::WrongArity { expected: 5, got: labels.len() });
        }
        let mut parts = [SubsetMask::EMPTY; 5];
        for (slot, label) in parts.iter_mut().zip(&labels) {
            *slot = SubsetMask::singleton(ground.index(label)?);
        }
        Roles::new(parts)
    }

    fn all(&self) -> SubsetMask {
        self.a | self.b | self.c | self.d | self.e
    }
}

fn mi(l: SubsetMask, r: SubsetMask, g: SubsetMask) -> InfoTerm {
    InfoTerm::mutual(l, r, g).expect("role sets are disjoint")
}

/// The MMRV left-hand side as an expression over the role sets.
pub fn mmrv_expression(roles: &Roles) -> InfoExpression {
    let Roles { a, b, c, d, e } = *roles;
    let none = SubsetMask::EMPTY;
    InfoExpression::new()
        .with(mi(a, b, c))
        .with(mi(b, c, a))
        .with(mi(c, a, b))
        .with(mi(b, c, d))
        .with(mi(b, c, e))
        .with(mi(d, e, none))
        .with(mi(b, c, none).times(-1))
}

/// Ten conditional mutual informations whose sum equals `MMRV + 3·I(a;de|bc)`
/// identically on every set function.
pub fn mmrv_certificate_terms(roles: &Roles) -> InfoExpression {
    let Roles { a, b, c, d, e } = *roles;
    InfoExpression::new()
        .with(mi(a, d, b))
        .with(mi(a, d, c))
        .with(mi(a, e, b))
        .with(mi(a, e, c))
        .with(mi(b, c, a | d))
        .with(mi(b, c, a | e))
        .with(mi(a, b | c, d | e))
        .with(mi(d, e, a))
        .with(mi(a, e, b | c | d))
        .with(mi(a, d, b | c | e))
}

/// `I(a; de | bc)`, the conditional dependence removed by the max-entropy coupling.
pub fn mmrv_gap_term(roles: &Roles) -> InfoTerm {
    mi(roles.a, roles.d | roles.e, roles.b | roles.c)
}

/// MMRV on a five-element ground set with roles taken positionally.
pub fn mmrv<T: Rank, F: SetFunction<T> + ?Sized>(f: &F) -> Result<T> {
    mmrv_with_roles(f, &Roles::positional(f.ground())?)
}

pub fn mmrv_with_roles<T: Rank, F: SetFunction<T> + ?Sized>(f: &F, roles: &Roles) -> Result<T> {
    f.ground().check_mask(roles.all())?;
    mmrv_expression(roles).eval(f)
}

/// `MMRV + 3·I(a;de|bc) - Σ(certificate terms)`. Zero (up to rounding) for
/// every set function; a non-zero value indicates an evaluation bug.
pub fn mmrv_identity_residual<T: Rank, F: SetFunction<T> + ?Sized>(f: &F, roles: &Roles) -> Result<T> {
    f.ground().check_mask(roles.all())?;
    let lhs = mmrv_expression(roles).eval(f)? + mmrv_gap_term(roles).eval_unit(f).times(3);
    Ok(lhs - mmrv_certificate_terms(roles).eval(f)?)
}
