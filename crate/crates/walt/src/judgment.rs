//! Judgments: three assumption zones around a subject term and its type.
//!
//! The third zone is a set of pairs (theta; phi) where every phi holds at
//! most one assignment, at most one pair has an empty phi, and all variable
//! names across the whole judgment are distinct.

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::Formula;
use crate::term::{Name, Term};

/// A set of type assignments, keyed by variable name.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Ctx(pub BTreeMap<Name, Formula>);

impl Ctx {
    pub fn new() -> Ctx {
        Ctx(BTreeMap::new())
    }

    pub fn single(x: impl Into<Name>, ty: Formula) -> Ctx {
        let mut m = BTreeMap::new();
        m.insert(x.into(), ty);
        Ctx(m)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Formula)>) -> Ctx {
        Ctx(pairs.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, x: &Name) -> Option<&Formula> {
        self.0.get(x)
    }

    pub fn contains(&self, x: &Name) -> bool {
        self.0.contains_key(x)
    }

    pub fn insert(&mut self, x: Name, ty: Formula) {
        self.0.insert(x, ty);
    }

    pub fn remove(&mut self, x: &Name) -> Option<Formula> {
        self.0.remove(x)
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Formula)> {
        self.0.iter()
    }

    /// Disjoint union; reports the clashing name on overlap.
    pub fn union(&self, other: &Ctx) -> Result<Ctx, Name> {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            if out.insert(k.clone(), v.clone()).is_some() {
                return Err(k.clone());
            }
        }
        Ok(Ctx(out))
    }

    /// Every type prefixed with `$`.
    pub fn par_all(&self) -> Ctx {
        Ctx(self.0.iter().map(|(k, v)| (k.clone(), Formula::par(v.clone()))).collect())
    }

    /// True iff `other` contains every assignment of `self` (same types).
    pub fn subset_of(&self, other: &Ctx) -> bool {
        self.0.iter().all(|(k, v)| other.0.get(k) == Some(v))
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}:{v}")?;
        }
        Ok(())
    }
}

/// One pair of the partially discharged zone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub theta: Ctx,
    pub phi: Option<(Name, Formula)>,
}

impl Pair {
    pub fn empty() -> Pair {
        Pair { theta: Ctx::new(), phi: None }
    }

    pub fn with_theta(theta: Ctx) -> Pair {
        Pair { theta, phi: None }
    }

    pub fn with_phi(x: impl Into<Name>, ty: Formula) -> Pair {
        Pair { theta: Ctx::new(), phi: Some((x.into(), ty)) }
    }

    pub fn is_trivial(&self) -> bool {
        self.theta.is_empty() && self.phi.is_none()
    }

    pub fn names(&self) -> Vec<Name> {
        let mut v: Vec<Name> = self.theta.names().cloned().collect();
        if let Some((n, _)) = &self.phi {
            v.push(n.clone());
        }
        v
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ContextError {
    #[error("merge violation: {0}")]
    Merge(String),
    #[error("variable {0} assigned more than once in a judgment")]
    DuplicateName(Name),
    #[error("first zone must hold linear types, found {0}:{1}")]
    NonLinearGamma(Name, Formula),
    #[error("more than one pair with empty phi")]
    TwoEmptyPhis,
}

/// The partially discharged zone: pairs normalized into a canonical order
/// (the empty-phi pair first, then by phi variable name).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PDContext {
    pairs: Vec<Pair>,
}

impl PDContext {
    pub fn empty() -> PDContext {
        PDContext { pairs: Vec::new() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = Pair>) -> Result<PDContext, ContextError> {
        let mut out = PDContext::empty();
        for p in pairs {
            out = out.merge_disjoint(&p)?;
        }
        Ok(out)
    }

    fn normalize(&mut self) {
        self.pairs.retain(|p| !p.is_trivial());
        self.pairs.sort_by(|a, b| match (&a.phi, &b.phi) {
            (None, None) => std::cmp::Ordering::Equal,
            (None, Some(_)) => std::cmp::Ordering::Less,
            (Some(_), None) => std::cmp::Ordering::Greater,
            (Some((x, _)), Some((y, _))) => x.cmp(y),
        });
    }

    /// Add one pair, requiring it disjoint from the existing ones (no phi
    /// sharing). Used when building a zone from scratch.
    fn merge_disjoint(&self, p: &Pair) -> Result<PDContext, ContextError> {
        if p.is_trivial() {
            return Ok(self.clone());
        }
        if p.phi.is_none() && self.empty_phi_pair().is_some() {
            return Err(ContextError::TwoEmptyPhis);
        }
        let mut out = self.clone();
        out.pairs.push(p.clone());
        out.normalize();
        out.check_invariants()?;
        Ok(out)
    }

    fn check_invariants(&self) -> Result<(), ContextError> {
        let mut seen = std::collections::BTreeSet::new();
        let mut empties = 0;
        for p in &self.pairs {
            if p.phi.is_none() {
                empties += 1;
            }
            for n in p.names() {
                if !seen.insert(n.clone()) {
                    return Err(ContextError::DuplicateName(n));
                }
            }
        }
        if empties > 1 {
            return Err(ContextError::TwoEmptyPhis);
        }
        Ok(())
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn empty_phi_pair(&self) -> Option<&Pair> {
        self.pairs.iter().find(|p| p.phi.is_none())
    }

    pub fn phi_pairs(&self) -> impl Iterator<Item = &Pair> {
        self.pairs.iter().filter(|p| p.phi.is_some())
    }

    pub fn find_phi(&self, x: &Name) -> Option<&Pair> {
        self.pairs.iter().find(|p| matches!(&p.phi, Some((n, _)) if n == x))
    }

    pub fn names(&self) -> Vec<Name> {
        self.pairs.iter().flat_map(|p| p.names()).collect()
    }

    pub fn without_pair(&self, target: &Pair) -> Option<PDContext> {
        let idx = self.pairs.iter().position(|p| p == target)?;
        let mut pairs = self.pairs.clone();
        pairs.remove(idx);
        Some(PDContext { pairs })
    }

    /// The structure preserving merge: pairs with the same phi (same variable
    /// and same type) have their thetas joined, everything else passes
    /// through. Fails if two phis share a variable at different types, or if
    /// any variable would end up assigned twice.
    pub fn merge(&self, other: &PDContext) -> Result<PDContext, ContextError> {
        let mut pairs: Vec<Pair> = Vec::new();
        for p in &self.pairs {
            pairs.push(p.clone());
        }
        'outer: for q in &other.pairs {
            for p in pairs.iter_mut() {
                let same_phi = match (&p.phi, &q.phi) {
                    (None, None) => true,
                    (Some((x, a)), Some((y, b))) if x == y => {
                        if a != b {
                            return Err(ContextError::Merge(format!(
                                "phi variable {x} carried at two types: {a} vs {b}"
                            )));
                        }
                        true
                    }
                    _ => false,
                };
                if same_phi {
                    p.theta = p.theta.union(&q.theta).map_err(|n| {
                        ContextError::Merge(format!("theta variable {n} on both sides of a merged pair"))
                    })?;
                    continue 'outer;
                }
            }
            pairs.push(q.clone());
        }
        let mut out = PDContext { pairs };
        out.normalize();
        out.check_invariants().map_err(|e| ContextError::Merge(e.to_string()))?;
        Ok(out)
    }
}

impl fmt::Display for PDContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "(Th{{{}}};Ph{{", p.theta)?;
            if let Some((x, t)) = &p.phi {
                write!(f, "{x}:{t}")?;
            }
            f.write_str("})")?;
        }
        Ok(())
    }
}

/// A full judgment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub gamma: Ctx,
    pub delta: Ctx,
    pub e: PDContext,
    pub subject: Term,
    pub ty: Formula,
}

impl Judgment {
    pub fn new(
        gamma: Ctx,
        delta: Ctx,
        e: PDContext,
        subject: Term,
        ty: Formula,
    ) -> Result<Judgment, ContextError> {
        for (x, t) in gamma.iter() {
            if !t.is_linear() {
                return Err(ContextError::NonLinearGamma(x.clone(), t.clone()));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for n in gamma.names().chain(delta.names()) {
            if !seen.insert(n.clone()) {
                return Err(ContextError::DuplicateName(n.clone()));
            }
        }
        for n in e.names() {
            if !seen.insert(n.clone()) {
                return Err(ContextError::DuplicateName(n));
            }
        }
        e.check_invariants()?;
        Ok(Judgment { gamma, delta, e, subject, ty })
    }

    /// Variables assigned anywhere in the judgment.
    pub fn all_names(&self) -> Vec<Name> {
        let mut v: Vec<Name> = self.gamma.names().cloned().collect();
        v.extend(self.delta.names().cloned());
        v.extend(self.e.names());
        v
    }

    /// Assumptions with no free occurrence in the subject.
    pub fn fake_assumptions(&self) -> Vec<Name> {
        self.all_names().into_iter().filter(|n| !self.subject.has_free(n)).collect()
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "G{{{}}} ; D{{{}}} ; E{{{}}} |- {} : {}",
            self.gamma, self.delta, self.e, self.subject, self.ty
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn ty(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn merge_same_phi_joins_thetas() {
        let a = PDContext::from_pairs([Pair {
            theta: Ctx::single("t1", ty("a")),
            phi: Some((Name::new("x"), ty("b"))),
        }])
        .unwrap();
        let b = PDContext::from_pairs([Pair {
            theta: Ctx::single("t2", ty("a")),
            phi: Some((Name::new("x"), ty("b"))),
        }])
        .unwrap();
        let m = a.merge(&b).unwrap();
        assert_eq!(m.pairs().len(), 1);
        assert_eq!(m.pairs()[0].theta.len(), 2);
    }

    #[test]
    fn merge_with_trivial_is_identity() {
        let a = PDContext::from_pairs([Pair::with_phi("x", ty("b"))]).unwrap();
        assert_eq!(a.merge(&PDContext::empty()).unwrap(), a);
        let b = PDContext::from_pairs([Pair::empty()]).unwrap();
        assert_eq!(a.merge(&b).unwrap(), a);
    }

    #[test]
    fn merge_disjoint_passes_through() {
        let a = PDContext::from_pairs([Pair {
            theta: Ctx::single("t1", ty("a")),
            phi: Some((Name::new("x"), ty("b"))),
        }])
        .unwrap();
        let b = PDContext::from_pairs([Pair {
            theta: Ctx::single("t2", ty("a")),
            phi: Some((Name::new("y"), ty("c"))),
        }])
        .unwrap();
        assert_eq!(a.merge(&b).unwrap().pairs().len(), 2);
    }

    #[test]
    fn merge_rejects_phi_at_two_types() {
        let a = PDContext::from_pairs([Pair::with_phi("x", ty("b"))]).unwrap();
        let b = PDContext::from_pairs([Pair::with_phi("x", ty("c"))]).unwrap();
        assert!(a.merge(&b).is_err());
    }

    #[test]
    fn judgment_rejects_modal_gamma() {
        let r = Judgment::new(
            Ctx::single("x", ty("!a")),
            Ctx::new(),
            PDContext::empty(),
            crate::term::parse_term("x").unwrap(),
            ty("!a"),
        );
        assert!(matches!(r, Err(ContextError::NonLinearGamma(..))));
    }

    #[test]
    fn judgment_rejects_duplicate_names() {
        let r = Judgment::new(
            Ctx::single("x", ty("a")),
            Ctx::single("x", ty("b")),
            PDContext::empty(),
            crate::term::parse_term("x").unwrap(),
            ty("a"),
        );
        assert!(matches!(r, Err(ContextError::DuplicateName(_))));
    }
}
