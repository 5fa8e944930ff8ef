//! Rule-labelled derivation trees and the validating checker.
//!
//! A derivation stores its conclusion at every node; the checker re-validates
//! each node against the rule schemas and side conditions, so trees loaded
//! from files or built by hand get exactly the same scrutiny as trees made by
//! the library builders.

use std::fmt;

use crate::formula::Formula;
use crate::judgment::{Ctx, Judgment, PDContext, Pair};
use crate::term::Name;

/// The thirteen rules. Contraction and the quantifier elimination carry the
/// witnesses that the conclusion alone does not determine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Axiom,
    Contract { x: Name, y: Name, z: Name },
    LolliI,
    LolliIDollar,
    LolliE,
    LolliIBang,
    LolliEBang,
    EagerI,
    EagerE,
    Dollar,
    Bang,
    ForallI { var: Name },
    ForallE { arg: Formula },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Axiom => "A",
            Rule::Contract { .. } => "C",
            Rule::LolliI => "-oI",
            Rule::LolliIDollar => "-oI$",
            Rule::LolliE => "-oE",
            Rule::LolliIBang => "-oI!",
            Rule::LolliEBang => "-oE!",
            Rule::EagerI => "=oI",
            Rule::EagerE => "=oE",
            Rule::Dollar => "$",
            Rule::Bang => "!",
            Rule::ForallI { .. } => "forallI",
            Rule::ForallE { .. } => "forallE",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Rule::Axiom => 0,
            Rule::LolliE | Rule::LolliEBang | Rule::EagerE => 2,
            _ => 1,
        }
    }

    /// Modal rules open a box: premises live one level deeper.
    pub fn is_modal(&self) -> bool {
        matches!(self, Rule::Dollar | Rule::Bang)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    pub conclusion: Judgment,
}

/// One violation kind per side condition of the rule schemas, plus the
/// judgment shape conditions the checker re-validates at every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Premise count does not match the rule.
    Arity,
    /// Conclusion subject has the wrong shape for the rule.
    SubjectShape,
    /// Conclusion subject disagrees with the premises.
    SubjectMismatch,
    /// A type does not match the rule schema.
    TypeMismatch,
    /// Axiom subject not assigned in the first zone.
    AxiomNotInGamma,
    /// First zone holds a modal type.
    NonLinearGamma,
    /// A variable is assigned twice in one judgment.
    DuplicateName,
    /// More than one pair with empty phi.
    TwoEmptyPhis,
    /// A context of the conclusion disagrees with the premises.
    ContextMismatch,
    /// Two premises assign the same non-shared variable.
    DomainClash,
    /// The linear application forbids a `!`-modal argument type.
    ArgumentBang,
    /// The `!`-elimination needs every theta of the function side empty.
    BangContextRestriction,
    /// The eager elimination needs an empty first zone in the argument.
    EagerArgGamma,
    /// The eager elimination needs an empty second zone in the argument.
    EagerArgDelta,
    /// The eager elimination allows at most one all-theta pair in the argument.
    EagerArgContext,
    /// Binder type of the plain introduction must be linear.
    NotLinearBinder,
    /// Expected pair missing from the third zone.
    PairNotFound,
    /// `$` premise may carry at most one all-theta pair.
    DollarPremiseContext,
    /// Every new pair of a `$` conclusion is theta-only or phi-only.
    DollarPairShape,
    /// Premise first zone not covered by the discharged assumptions.
    DollarCoverage,
    /// `!` premise must have an empty second zone.
    BangPremiseDelta,
    /// `!` conclusion carries at most one phi pair besides the boxed thetas.
    BangPairShape,
    /// Premise first zone not covered by the new pair of a `!`.
    BangCoverage,
    /// Nonempty theta in a `!` needs the phi variable free in the subject.
    BangPhiFreeVar,
    /// Quantified variable free in an assumption.
    ForallFreshness,
    /// Instantiating a quantifier with a modal formula.
    NonLinearSubstituend,
    /// Contracted variables carried at different types.
    ContractTypeMismatch,
    /// Contraction target variable already in use.
    ContractFreshness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub kind: ViolationKind,
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub msg: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} at ", self.rule)?;
        if self.path.is_empty() {
            f.write_str("root")?;
        } else {
            for (i, p) in self.path.iter().enumerate() {
                if i > 0 {
                    f.write_str(".")?;
                }
                write!(f, "{p}")?;
            }
        }
        write!(f, ": {:?}: {}", self.kind, self.msg)
    }
}

impl std::error::Error for Violation {}

fn fail(rule: &Rule, kind: ViolationKind, msg: impl Into<String>) -> Violation {
    Violation { rule: rule.name(), kind, path: Vec::new(), msg: msg.into() }
}

/// Validate the judgment shape conditions at one node.
fn check_judgment_shape(rule: &Rule, j: &Judgment) -> Result<(), Violation> {
    for (x, t) in j.gamma.iter() {
        if !t.is_linear() {
            return Err(fail(rule, ViolationKind::NonLinearGamma, format!("{x}:{t} in first zone")));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for n in j.all_names() {
        if !seen.insert(n.clone()) {
            return Err(fail(rule, ViolationKind::DuplicateName, format!("{n} assigned twice")));
        }
    }
    let mut empties = 0;
    for p in j.e.pairs() {
        if p.phi.is_none() {
            empties += 1;
        }
    }
    if empties > 1 {
        return Err(fail(rule, ViolationKind::TwoEmptyPhis, "two pairs with empty phi"));
    }
    Ok(())
}

/// Cross premise disjointness: a variable may appear in both premises only as
/// a shared phi at one type.
fn check_cross_disjoint(rule: &Rule, p1: &Judgment, p2: &Judgment) -> Result<(), Violation> {
    let names1 = p1.all_names();
    for n in p2.all_names() {
        if names1.contains(&n) {
            let f1 = p1.e.find_phi(&n);
            let f2 = p2.e.find_phi(&n);
            match (f1, f2) {
                (Some(a), Some(b)) if a.phi == b.phi => {}
                _ => {
                    return Err(fail(
                        rule,
                        ViolationKind::DomainClash,
                        format!("{n} assigned in both premises"),
                    ))
                }
            }
        }
    }
    Ok(())
}

fn expect_eq<T: PartialEq + fmt::Display>(
    rule: &Rule,
    kind: ViolationKind,
    what: &str,
    got: &T,
    want: &T,
) -> Result<(), Violation> {
    if got == want {
        Ok(())
    } else {
        Err(fail(rule, kind, format!("{what}: got {got}, want {want}")))
    }
}

fn expect_ctx_eq(rule: &Rule, what: &str, got: &Ctx, want: &Ctx) -> Result<(), Violation> {
    if got == want {
        Ok(())
    } else {
        Err(fail(
            rule,
            ViolationKind::ContextMismatch,
            format!("{what}: got {{{got}}}, want {{{want}}}"),
        ))
    }
}

fn expect_e_eq(rule: &Rule, what: &str, got: &PDContext, want: &PDContext) -> Result<(), Violation> {
    if got == want {
        Ok(())
    } else {
        Err(fail(
            rule,
            ViolationKind::ContextMismatch,
            format!("{what}: got {{{got}}}, want {{{want}}}"),
        ))
    }
}

/// Validate one node against its rule schema; the premises are taken as
/// already individually checked.
pub fn check_rule(d: &Derivation) -> Result<(), Violation> {
    let rule = &d.rule;
    let c = &d.conclusion;
    check_judgment_shape(rule, c)?;
    if d.premises.len() != rule.arity() {
        return Err(fail(
            rule,
            ViolationKind::Arity,
            format!("{} premises, rule takes {}", d.premises.len(), rule.arity()),
        ));
    }
    match rule {
        Rule::Axiom => {
            let Some(x) = c.subject.as_var() else {
                return Err(fail(rule, ViolationKind::SubjectShape, "axiom subject must be a variable"));
            };
            match c.gamma.get(x) {
                None => Err(fail(
                    rule,
                    ViolationKind::AxiomNotInGamma,
                    format!("{x} not assigned in the first zone"),
                )),
                Some(t) if *t == c.ty => Ok(()),
                Some(t) => Err(fail(
                    rule,
                    ViolationKind::TypeMismatch,
                    format!("axiom gives {x}:{t}, conclusion claims {}", c.ty),
                )),
            }
        }
        Rule::Contract { x, y, z } => {
            let p = &d.premises[0].conclusion;
            if x == y {
                return Err(fail(rule, ViolationKind::ContractFreshness, "x and y must differ"));
            }
            let px = p.e.find_phi(x).ok_or_else(|| {
                fail(rule, ViolationKind::PairNotFound, format!("no pair with phi {x}"))
            })?;
            let py = p.e.find_phi(y).ok_or_else(|| {
                fail(rule, ViolationKind::PairNotFound, format!("no pair with phi {y}"))
            })?;
            let (_, tx) = px.phi.clone().unwrap();
            let (_, ty_) = py.phi.clone().unwrap();
            if tx != ty_ {
                return Err(fail(
                    rule,
                    ViolationKind::ContractTypeMismatch,
                    format!("{x}:{tx} vs {y}:{ty_}"),
                ));
            }
            let clash = p.all_names().iter().any(|n| n == z && n != x && n != y)
                || (p.subject.has_free(z) && z != x && z != y);
            if clash {
                return Err(fail(
                    rule,
                    ViolationKind::ContractFreshness,
                    format!("{z} already in use"),
                ));
            }
            let rest = p.e.without_pair(px).unwrap().without_pair(py).unwrap();
            let theta = px.theta.union(&py.theta).map_err(|n| {
                fail(rule, ViolationKind::DuplicateName, format!("{n} in both thetas"))
            })?;
            let merged = rest
                .merge(&PDContext::from_pairs([Pair { theta, phi: Some((z.clone(), tx)) }]).unwrap())
                .map_err(|e| fail(rule, ViolationKind::ContextMismatch, e.to_string()))?;
            expect_ctx_eq(rule, "first zone", &c.gamma, &p.gamma)?;
            expect_ctx_eq(rule, "second zone", &c.delta, &p.delta)?;
            expect_e_eq(rule, "third zone", &c.e, &merged)?;
            let want = p.subject.rename_all(&[x.clone(), y.clone()], z);
            expect_eq(rule, ViolationKind::SubjectMismatch, "subject", &c.subject, &want)?;
            expect_eq(rule, ViolationKind::TypeMismatch, "type", &c.ty, &p.ty)
        }
        Rule::LolliI => {
            let p = &d.premises[0].conclusion;
            let Some((binder, body)) = c.subject.as_abs() else {
                return Err(fail(rule, ViolationKind::SubjectShape, "subject must be an abstraction"));
            };
            let Some((left, right)) = c.ty.as_lolli() else {
                return Err(fail(rule, ViolationKind::TypeMismatch, "conclusion type must be an arrow"));
            };
            if !left.is_linear() {
                return Err(fail(
                    rule,
                    ViolationKind::NotLinearBinder,
                    format!("binder type {left} is modal"),
                ));
            }
            expect_eq(rule, ViolationKind::TypeMismatch, "result type", right, &p.ty)?;
            if c.gamma.contains(binder) {
                return Err(fail(rule, ViolationKind::DuplicateName, format!("{binder} still assigned")));
            }
            let mut want_gamma = c.gamma.clone();
            want_gamma.insert(binder.clone(), left.clone());
            expect_ctx_eq(rule, "first zone", &p.gamma, &want_gamma)?;
            expect_ctx_eq(rule, "second zone", &p.delta, &c.delta)?;
            expect_e_eq(rule, "third zone", &p.e, &c.e)?;
            expect_eq(rule, ViolationKind::SubjectMismatch, "body", body, &p.subject)
        }
        Rule::LolliIDollar => {
            let p = &d.premises[0].conclusion;
            let Some((binder, body)) = c.subject.as_abs() else {
                return Err(fail(rule, ViolationKind::SubjectShape, "subject must be an abstraction"));
            };
            let Some((left, right)) = c.ty.as_lolli() else {
                return Err(fail(rule, ViolationKind::TypeMismatch, "conclusion type must be an arrow"));
            };
            let Some(inner) = left.as_par() else {
                return Err(fail(rule, ViolationKind::TypeMismatch, "binder type must be $-modal"));
            };
            expect_eq(rule, ViolationKind::TypeMismatch, "result type", right, &p.ty)?;
            if c.delta.contains(binder) {
                return Err(fail(rule, ViolationKind::DuplicateName, format!("{binder} still assigned")));
            }
            let mut want_delta = c.delta.clone();
            want_delta.insert(binder.clone(), inner.clone());
            expect_ctx_eq(rule, "first zone", &p.gamma, &c.gamma)?;
            expect_ctx_eq(rule, "second zone", &p.delta, &want_delta)?;
            expect_e_eq(rule, "third zone", &p.e, &c.e)?;
            expect_eq(rule, ViolationKind::SubjectMismatch, "body", body, &p.subject)
        }
        Rule::LolliIBang => {
            let p = &d.premises[0].conclusion;
            let Some((binder, body)) = c.subject.as_abs() else {
                return Err(fail(rule, ViolationKind::SubjectShape, "subject must be an abstraction"));
            };
            let Some((left, right)) = c.ty.as_lolli() else {
                return Err(fail(rule, ViolationKind::TypeMismatch, "conclusion type must be an arrow"));
            };
            let Some(inner) = left.as_bang() else {
                return Err(fail(rule, ViolationKind::TypeMismatch, "binder type must be !-modal"));
            };
            expect_eq(rule, ViolationKind::TypeMismatch, "result type", right, &p.ty)?;
            let pair = p.e.find_phi(binder).ok_or_else(|| {
                fail(rule, ViolationKind::PairNotFound, format!("no pair with phi {binder}"))
            })?;
            let (_, phi_ty) = pair.phi.clone().unwrap();
            expect_eq(rule, ViolationKind::TypeMismatch, "discharged type", &phi_ty, inner)?;
            let rest = p.e.without_pair(pair).unwrap();
            let want = rest
                .merge(&PDContext::from_pairs([Pair::with_theta(pair.theta.clone())]).map_err(
                    |e| fail(rule, ViolationKind::ContextMismatch, e.to_string()),
                )?)
                .map_err(|e| fail(rule, ViolationKind::ContextMismatch, e.to_string()))?;
            expect_ctx_eq(rule, "first zone", &p.gamma, &c.gamma)?;
            expect_ctx_eq(rule, "second zone", &p.delta, &c.delta)?;
            expect_e_eq(rule, "third zone", &c.e, &want)?;
            expect_eq(rule, ViolationKind::SubjectMismatch, "body", body, &p.subject)
        }
        Rule::EagerI => {
            let p = &d.premises[0].conclusion;
            let Some((binder, body)) = c.subject.as_abs() else {
                return Err(fail(rule, ViolationKind::SubjectShape, "subject must be an abstraction"));
            };
            let Some((left, right)) = c.ty.as_eager() else {
                return Err(fail(rule, ViolationKind::TypeMismatch, "conclusion type must be eager"));
            };
            let inner = left.as_par().expect("eager left is $-modal by construction");
            expect_eq(rule, ViolationKind::TypeMismatch, "result type", right, &p.ty)?;
            let pair = p.e.empty_phi_pair().ok_or_else(|| {
                fail(rule, ViolationKind::PairNotFound, "premise has no all-theta pair")
            })?;
            let got = pair.theta.get(binder).ok_or_else(|| {
                fail(rule, ViolationKind::PairNotFound, format!("{binder} not in the all-theta pair"))
            })?;
            expect_eq(rule, ViolationKind::TypeMismatch, "discharged type", got, inner)?;
            let mut theta = pair.theta.clone();
            theta.remove(binder);
            let rest = p.e.without_pair(pair).unwrap();
            let want = rest
                .merge(&PDContext::from_pairs([Pair::with_theta(theta)]).unwrap())
                .map_err(|e| fail(rule, ViolationKind::ContextMismatch, e.to_string()))?;
            expect_ctx_eq(rule, "first zone", &p.gamma, &c.gamma)?;
            expect_ctx_eq(rule, "second zone", &p.delta, &c.delta)?;
            expect_e_eq(rule, "third zone", &c.e, &want)?;
            expect_eq(rule, ViolationKind::SubjectMismatch, "body", body, &p.subject)
        }
        Rule::LolliE | Rule::LolliEBang | Rule::EagerE => {
            let p1 = &d.premises[0].conclusion;
            let p2 = &d.premises[1].conclusion;
            let Some((fun, arg)) = c.subject.as_app() else {
                return Err(fail(rule, ViolationKind::SubjectShape, "subject must be an application"));
            };
            expect_eq(rule, ViolationKind::SubjectMismatch, "function part", fun, &p1.subject)?;
            expect_eq(rule, ViolationKind::SubjectMismatch, "argument part", arg, &p2.subject)?;
            check_cross_disjoint(rule, p1, p2)?;
            let result = match rule {
                Rule::LolliE => {
                    let Some((a, b)) = p1.ty.as_lolli() else {
                        return Err(fail(rule, ViolationKind::TypeMismatch, "function type must be an arrow"));
                    };
                    if a.as_bang().is_some() {
                        return Err(fail(
                            rule,
                            ViolationKind::ArgumentBang,
                            format!("argument type {a} is !-modal"),
                        ));
                    }
                    expect_eq(rule, ViolationKind::TypeMismatch, "argument type", &p2.ty, a)?;
                    b.clone()
                }
                Rule::LolliEBang => {
                    let Some((a, b)) = p1.ty.as_lolli() else {
                        return Err(fail(rule, ViolationKind::TypeMismatch, "function type must be an arrow"));
                    };
                    if a.as_bang().is_none() {
                        return Err(fail(
                            rule,
                            ViolationKind::TypeMismatch,
                            format!("argument type {a} must be !-modal"),
                        ));
                    }
                    expect_eq(rule, ViolationKind::TypeMismatch, "argument type", &p2.ty, a)?;
                    if let Some(p) = p1.e.pairs().iter().find(|p| !p.theta.is_empty()) {
                        return Err(fail(
                            rule,
                            ViolationKind::BangContextRestriction,
                            format!("function side carries nonempty theta {{{}}}", p.theta),
                        ));
                    }
                    b.clone()
                }
                Rule::EagerE => {
                    let Some((a, b)) = p1.ty.as_eager() else {
                        return Err(fail(rule, ViolationKind::TypeMismatch, "function type must be eager"));
                    };
                    expect_eq(rule, ViolationKind::TypeMismatch, "argument type", &p2.ty, a)?;
                    if !p2.gamma.is_empty() {
                        return Err(fail(
                            rule,
                            ViolationKind::EagerArgGamma,
                            format!("argument first zone {{{}}} must be empty", p2.gamma),
                        ));
                    }
                    if !p2.delta.is_empty() {
                        return Err(fail(
                            rule,
                            ViolationKind::EagerArgDelta,
                            format!("argument second zone {{{}}} must be empty", p2.delta),
                        ));
                    }
                    if p2.e.pairs().iter().any(|p| p.phi.is_some()) || p2.e.pairs().len() > 1 {
                        return Err(fail(
                            rule,
                            ViolationKind::EagerArgContext,
                            "argument zone must be at most one all-theta pair",
                        ));
                    }
                    b.clone()
                }
                _ => unreachable!(),
            };
            expect_eq(rule, ViolationKind::TypeMismatch, "conclusion type", &c.ty, &result)?;
            let want_gamma = p1.gamma.union(&p2.gamma).map_err(|n| {
                fail(rule, ViolationKind::DomainClash, format!("{n} in both first zones"))
            })?;
            let want_delta = p1.delta.union(&p2.delta).map_err(|n| {
                fail(rule, ViolationKind::DomainClash, format!("{n} in both second zones"))
            })?;
            let want_e = p1
                .e
                .merge(&p2.e)
                .map_err(|e| fail(rule, ViolationKind::ContextMismatch, e.to_string()))?;
            expect_ctx_eq(rule, "first zone", &c.gamma, &want_gamma)?;
            expect_ctx_eq(rule, "second zone", &c.delta, &want_delta)?;
            expect_e_eq(rule, "third zone", &c.e, &want_e)
        }
        Rule::Dollar => {
            let p = &d.premises[0].conclusion;
            let Some(inner) = c.ty.as_par() else {
                return Err(fail(rule, ViolationKind::TypeMismatch, "conclusion type must be $-modal"));
            };
            expect_eq(rule, ViolationKind::TypeMismatch, "boxed type", inner, &p.ty)?;
            expect_eq(rule, ViolationKind::SubjectMismatch, "subject", &c.subject, &p.subject)?;
            if p.e.pairs().len() > 1 || p.e.pairs().iter().any(|q| q.phi.is_some()) {
                return Err(fail(
                    rule,
                    ViolationKind::DollarPremiseContext,
                    "premise zone must be at most one all-theta pair",
                ));
            }
            let theta_boxed = p.e.empty_phi_pair().map(|q| q.theta.par_all()).unwrap_or_default();
            // Conclusion second zone: premise entries reappear $-prefixed,
            // the remainder is available for coverage and weakening.
            let mut delta_rest = c.delta.clone();
            for (x, a) in p.delta.iter() {
                match delta_rest.remove(x) {
                    Some(t) if t == Formula::par(a.clone()) => {}
                    Some(t) => {
                        return Err(fail(
                            rule,
                            ViolationKind::ContextMismatch,
                            format!("{x} must reappear at ${a}, got {t}"),
                        ))
                    }
                    None => {
                        return Err(fail(
                            rule,
                            ViolationKind::ContextMismatch,
                            format!("{x} from the premise second zone is missing"),
                        ))
                    }
                }
            }
            for q in c.e.phi_pairs() {
                if !q.theta.is_empty() {
                    return Err(fail(
                        rule,
                        ViolationKind::DollarPairShape,
                        format!("pair with phi {:?} also carries a theta", q.phi.as_ref().map(|x| &x.0)),
                    ));
                }
            }
            let mut theta_extra = match c.e.empty_phi_pair() {
                Some(q) => q.theta.clone(),
                None => Ctx::new(),
            };
            for (x, t) in theta_boxed.iter() {
                match theta_extra.remove(x) {
                    Some(got) if got == *t => {}
                    _ => {
                        return Err(fail(
                            rule,
                            ViolationKind::ContextMismatch,
                            format!("boxed theta entry {x}:{t} missing from the conclusion"),
                        ))
                    }
                }
            }
            for (x, a) in p.gamma.iter() {
                let in_delta = delta_rest.get(x) == Some(a);
                let in_theta = theta_extra.get(x) == Some(a);
                let in_phi = c
                    .e
                    .find_phi(x)
                    .map(|q| matches!(&q.phi, Some((_, t)) if t == a))
                    .unwrap_or(false);
                if !(in_delta || in_theta || in_phi) {
                    return Err(fail(
                        rule,
                        ViolationKind::DollarCoverage,
                        format!("premise assumption {x}:{a} not discharged"),
                    ));
                }
            }
            Ok(())
        }
        Rule::Bang => {
            let p = &d.premises[0].conclusion;
            let Some(inner) = c.ty.as_bang() else {
                return Err(fail(rule, ViolationKind::TypeMismatch, "conclusion type must be !-modal"));
            };
            expect_eq(rule, ViolationKind::TypeMismatch, "boxed type", inner, &p.ty)?;
            expect_eq(rule, ViolationKind::SubjectMismatch, "subject", &c.subject, &p.subject)?;
            if !p.delta.is_empty() {
                return Err(fail(
                    rule,
                    ViolationKind::BangPremiseDelta,
                    format!("premise second zone {{{}}} must be empty", p.delta),
                ));
            }
            if p.e.pairs().len() > 1 || p.e.pairs().iter().any(|q| q.phi.is_some()) {
                return Err(fail(
                    rule,
                    ViolationKind::DollarPremiseContext,
                    "premise zone must be at most one all-theta pair",
                ));
            }
            let theta_boxed = p.e.empty_phi_pair().map(|q| q.theta.par_all()).unwrap_or_default();
            let conc_empty = c.e.empty_phi_pair().map(|q| q.theta.clone()).unwrap_or_default();
            if conc_empty != theta_boxed {
                return Err(fail(
                    rule,
                    ViolationKind::ContextMismatch,
                    format!("boxed thetas: got {{{conc_empty}}}, want {{{theta_boxed}}}"),
                ));
            }
            let phis: Vec<&Pair> = c.e.phi_pairs().collect();
            if phis.len() > 1 {
                return Err(fail(
                    rule,
                    ViolationKind::BangPairShape,
                    "more than one pair with a phi",
                ));
            }
            let (theta, phi) = match phis.first() {
                Some(q) => (q.theta.clone(), q.phi.clone()),
                None => (Ctx::new(), None),
            };
            for (x, a) in p.gamma.iter() {
                let in_theta = theta.get(x) == Some(a);
                let in_phi = matches!(&phi, Some((n, t)) if n == x && t == a);
                if !(in_theta || in_phi) {
                    return Err(fail(
                        rule,
                        ViolationKind::BangCoverage,
                        format!("premise assumption {x}:{a} not in the new pair"),
                    ));
                }
            }
            if !theta.is_empty() {
                let ok = matches!(&phi, Some((n, _)) if c.subject.has_free(n));
                if !ok {
                    return Err(fail(
                        rule,
                        ViolationKind::BangPhiFreeVar,
                        "nonempty theta needs the phi variable free in the subject",
                    ));
                }
            }
            Ok(())
        }
        Rule::ForallI { var } => {
            let p = &d.premises[0].conclusion;
            let want = Formula::forall(var.clone(), p.ty.clone()).map_err(|e| {
                fail(rule, ViolationKind::TypeMismatch, e.to_string())
            })?;
            expect_eq(rule, ViolationKind::TypeMismatch, "conclusion type", &c.ty, &want)?;
            let free_somewhere = p
                .gamma
                .iter()
                .map(|(_, t)| t)
                .chain(p.delta.iter().map(|(_, t)| t))
                .chain(p.e.pairs().iter().flat_map(|q| {
                    q.theta
                        .iter()
                        .map(|(_, t)| t)
                        .chain(q.phi.as_ref().map(|(_, t)| t))
                        .collect::<Vec<_>>()
                }))
                .any(|t| t.has_free_tyvar(var));
            if free_somewhere {
                return Err(fail(
                    rule,
                    ViolationKind::ForallFreshness,
                    format!("{var} free in an assumption"),
                ));
            }
            expect_ctx_eq(rule, "first zone", &c.gamma, &p.gamma)?;
            expect_ctx_eq(rule, "second zone", &c.delta, &p.delta)?;
            expect_e_eq(rule, "third zone", &c.e, &p.e)?;
            expect_eq(rule, ViolationKind::SubjectMismatch, "subject", &c.subject, &p.subject)
        }
        Rule::ForallE { arg } => {
            let p = &d.premises[0].conclusion;
            if !arg.is_linear() {
                return Err(fail(
                    rule,
                    ViolationKind::NonLinearSubstituend,
                    format!("substituend {arg} is modal"),
                ));
            }
            let Some((var, body)) = p.ty.as_forall() else {
                return Err(fail(rule, ViolationKind::TypeMismatch, "premise type must be quantified"));
            };
            let want = body.subst_type(var, arg).expect("substituend checked linear");
            expect_eq(rule, ViolationKind::TypeMismatch, "conclusion type", &c.ty, &want)?;
            expect_ctx_eq(rule, "first zone", &c.gamma, &p.gamma)?;
            expect_ctx_eq(rule, "second zone", &c.delta, &p.delta)?;
            expect_e_eq(rule, "third zone", &c.e, &p.e)?;
            expect_eq(rule, ViolationKind::SubjectMismatch, "subject", &c.subject, &p.subject)
        }
    }
}

/// Fold the rule check over the whole tree, reporting the first violation
/// with its path. Returns the root judgment on success.
pub fn check_derivation(d: &Derivation) -> Result<&Judgment, Violation> {
    fn go<'a>(d: &'a Derivation, path: &mut Vec<usize>) -> Result<(), Violation> {
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            go(p, path)?;
            path.pop();
        }
        check_rule(d).map_err(|mut v| {
            v.path = path.clone();
            v
        })
    }
    go(d, &mut Vec::new())?;
    Ok(&d.conclusion)
}

impl Derivation {
    pub fn check(&self) -> Result<&Judgment, Violation> {
        check_derivation(self)
    }

    pub fn subject(&self) -> &crate::term::Term {
        &self.conclusion.subject
    }

    pub fn ty(&self) -> &Formula {
        &self.conclusion.ty
    }

    pub fn judgment(&self) -> &Judgment {
        &self.conclusion
    }

    /// Number of nodes.
    pub fn node_count(&self) -> u64 {
        1 + self.premises.iter().map(Derivation::node_count).sum::<u64>()
    }
}
