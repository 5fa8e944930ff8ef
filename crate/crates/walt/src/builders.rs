//! Checked constructors for derivations.
//!
//! Every function derives the conclusion from its premises and validates the
//! freshly built node, so a builder can only ever hand out trees the checker
//! accepts. Weakening is pushed to the nearest absorbing node (axioms and the
//! two box rules admit arbitrary extra assumptions in their conclusions).

use crate::derivation::{check_rule, Derivation, Rule, Violation};
use crate::formula::Formula;
use crate::judgment::{Ctx, Judgment, PDContext, Pair};
use crate::term::{Name, Term};

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("{0}")]
    Rule(#[from] Violation),
    #[error("{0}")]
    Context(#[from] crate::judgment::ContextError),
    #[error("{0}")]
    Formula(#[from] crate::formula::FormulaError),
    #[error("build error: {0}")]
    Other(String),
}

pub type Build = Result<Derivation, BuildError>;

fn other(msg: impl Into<String>) -> BuildError {
    BuildError::Other(msg.into())
}

fn node(rule: Rule, premises: Vec<Derivation>, conclusion: Judgment) -> Build {
    let d = Derivation { rule, premises, conclusion };
    check_rule(&d)?;
    Ok(d)
}

/// `Γ, x:L ; Δ ; E |- x : L`
pub fn axiom_in(gamma: Ctx, delta: Ctx, e: PDContext, x: impl Into<Name>) -> Build {
    let x = x.into();
    let ty = gamma.get(&x).cloned().ok_or_else(|| other(format!("axiom: {x} not in gamma")))?;
    let j = Judgment::new(gamma, delta, e, Term::var(x), ty)?;
    node(Rule::Axiom, vec![], j)
}

/// `x:L |- x : L`
pub fn axiom(x: impl Into<Name>, ty: Formula) -> Build {
    let x = x.into();
    axiom_in(Ctx::single(x.clone(), ty), Ctx::new(), PDContext::empty(), x)
}

/// Plain arrow introduction; `x` must be a linear assumption of the premise.
pub fn lolli_i(prem: Derivation, x: &Name) -> Build {
    let p = &prem.conclusion;
    let ty = p.gamma.get(x).cloned().ok_or_else(|| other(format!("-oI: {x} not in gamma")))?;
    let mut gamma = p.gamma.clone();
    gamma.remove(x);
    let j = Judgment::new(
        gamma,
        p.delta.clone(),
        p.e.clone(),
        Term::abs(x.clone(), p.subject.clone()),
        Formula::lolli(ty, p.ty.clone()),
    )?;
    node(Rule::LolliI, vec![prem], j)
}

/// Arrow introduction over an absent binder: weakens first.
pub fn lolli_i_fake(prem: Derivation, x: &Name, ty: Formula) -> Build {
    lolli_i(weaken_gamma(prem, x, ty)?, x)
}

/// `$`-arrow introduction; `x` must be a partially discharged assumption.
pub fn lolli_i_dollar(prem: Derivation, x: &Name) -> Build {
    let p = &prem.conclusion;
    let ty = p.delta.get(x).cloned().ok_or_else(|| other(format!("-oI$: {x} not in delta")))?;
    let mut delta = p.delta.clone();
    delta.remove(x);
    let j = Judgment::new(
        p.gamma.clone(),
        delta,
        p.e.clone(),
        Term::abs(x.clone(), p.subject.clone()),
        Formula::lolli(Formula::par(ty), p.ty.clone()),
    )?;
    node(Rule::LolliIDollar, vec![prem], j)
}

pub fn lolli_i_dollar_fake(prem: Derivation, x: &Name, boxed_ty: Formula) -> Build {
    lolli_i_dollar(weaken_delta(prem, x, boxed_ty)?, x)
}

/// `!`-arrow introduction; `x` must be the phi of one pair.
pub fn lolli_i_bang(prem: Derivation, x: &Name) -> Build {
    let p = &prem.conclusion;
    let pair = p
        .e
        .find_phi(x)
        .cloned()
        .ok_or_else(|| other(format!("-oI!: no pair with phi {x}")))?;
    let (_, ty) = pair.phi.clone().unwrap();
    let rest = p.e.without_pair(&pair).unwrap();
    let e = rest.merge(&PDContext::from_pairs([Pair::with_theta(pair.theta.clone())])?)?;
    let j = Judgment::new(
        p.gamma.clone(),
        p.delta.clone(),
        e,
        Term::abs(x.clone(), p.subject.clone()),
        Formula::lolli(Formula::bang(ty), p.ty.clone()),
    )?;
    node(Rule::LolliIBang, vec![prem], j)
}

pub fn lolli_i_bang_fake(prem: Derivation, x: &Name, boxed_ty: Formula) -> Build {
    lolli_i_bang(weaken_phi(prem, x, boxed_ty)?, x)
}

/// Eager arrow introduction; `x` must sit in the all-theta pair.
pub fn eager_i(prem: Derivation, x: &Name) -> Build {
    let p = &prem.conclusion;
    let pair = p
        .e
        .empty_phi_pair()
        .cloned()
        .ok_or_else(|| other(format!("=oI: no all-theta pair holding {x}")))?;
    let ty =
        pair.theta.get(x).cloned().ok_or_else(|| other(format!("=oI: {x} not elementary")))?;
    let mut theta = pair.theta.clone();
    theta.remove(x);
    let rest = p.e.without_pair(&pair).unwrap();
    let e = rest.merge(&PDContext::from_pairs([Pair::with_theta(theta)])?)?;
    let j = Judgment::new(
        p.gamma.clone(),
        p.delta.clone(),
        e,
        Term::abs(x.clone(), p.subject.clone()),
        Formula::eager(Formula::par(ty), p.ty.clone())?,
    )?;
    node(Rule::EagerI, vec![prem], j)
}

pub fn eager_i_fake(prem: Derivation, x: &Name, theta_ty: Formula) -> Build {
    eager_i(weaken_theta(prem, x, theta_ty)?, x)
}

/// Application; the rule is picked from the function type.
pub fn app(fun: Derivation, arg: Derivation) -> Build {
    let p1 = &fun.conclusion;
    let p2 = &arg.conclusion;
    let (rule, result) = if let Some((a, b)) = p1.ty.as_lolli() {
        if a.as_bang().is_some() {
            (Rule::LolliEBang, b.clone())
        } else {
            (Rule::LolliE, b.clone())
        }
    } else if let Some((_, b)) = p1.ty.as_eager() {
        (Rule::EagerE, b.clone())
    } else {
        return Err(other(format!("cannot apply a term of type {}", p1.ty)));
    };
    let gamma = p1.gamma.union(&p2.gamma).map_err(|n| other(format!("gamma clash on {n}")))?;
    let delta = p1.delta.union(&p2.delta).map_err(|n| other(format!("delta clash on {n}")))?;
    let e = p1.e.merge(&p2.e)?;
    let j = Judgment::new(
        gamma,
        delta,
        e,
        Term::app(p1.subject.clone(), p2.subject.clone()),
        result,
    )?;
    node(rule, vec![fun, arg], j)
}

pub fn apps(head: Derivation, args: impl IntoIterator<Item = Derivation>) -> Build {
    let mut d = head;
    for a in args {
        d = app(d, a)?;
    }
    Ok(d)
}

/// How the `$` rule distributes the premise's linear assumptions.
#[derive(Clone, Debug, Default)]
pub struct DollarSplit {
    pub to_delta: Vec<Name>,
    pub to_theta: Vec<Name>,
    // every other linear assumption becomes its own phi pair
}

/// The `$` box. Premise linear assumptions move to the second zone, the
/// all-theta pair, or fresh phi pairs as directed by the split.
pub fn dollar(prem: Derivation, split: &DollarSplit) -> Build {
    let p = &prem.conclusion;
    let mut delta = p.delta.par_all();
    let mut theta = p.e.empty_phi_pair().map(|q| q.theta.par_all()).unwrap_or_default();
    let mut phis: Vec<Pair> = Vec::new();
    for (x, a) in p.gamma.iter() {
        if split.to_delta.contains(x) {
            delta.insert(x.clone(), a.clone());
        } else if split.to_theta.contains(x) {
            theta.insert(x.clone(), a.clone());
        } else {
            phis.push(Pair::with_phi(x.clone(), a.clone()));
        }
    }
    let mut pairs = vec![Pair::with_theta(theta)];
    pairs.extend(phis);
    let e = PDContext::from_pairs(pairs)?;
    let j = Judgment::new(Ctx::new(), delta, e, p.subject.clone(), Formula::par(p.ty.clone()))?;
    node(Rule::Dollar, vec![prem], j)
}

/// `$` box sending every linear assumption to the all-theta pair.
pub fn dollar_all_theta(prem: Derivation) -> Build {
    let names: Vec<Name> = prem.conclusion.gamma.names().cloned().collect();
    dollar(prem, &DollarSplit { to_delta: vec![], to_theta: names })
}

/// `$` box sending every linear assumption to its own phi pair.
pub fn dollar_all_phi(prem: Derivation) -> Build {
    dollar(prem, &DollarSplit::default())
}

/// The `!` box; `phi` names the linear assumption that becomes polynomial,
/// the rest of the first zone lands in the new pair's theta.
pub fn bang(prem: Derivation, phi: Option<&Name>) -> Build {
    let p = &prem.conclusion;
    let boxed = p.e.empty_phi_pair().map(|q| q.theta.par_all()).unwrap_or_default();
    let mut theta = Ctx::new();
    let mut phi_entry = None;
    for (x, a) in p.gamma.iter() {
        if Some(x) == phi {
            phi_entry = Some((x.clone(), a.clone()));
        } else {
            theta.insert(x.clone(), a.clone());
        }
    }
    if phi.is_some() && phi_entry.is_none() {
        return Err(other(format!("!: phi {} not in gamma", phi.unwrap())));
    }
    let mut pairs = vec![Pair::with_theta(boxed)];
    if phi_entry.is_some() || !theta.is_empty() {
        pairs.push(Pair { theta, phi: phi_entry });
    }
    let e = PDContext::from_pairs(pairs)?;
    let j = Judgment::new(Ctx::new(), Ctx::new(), e, p.subject.clone(), Formula::bang(p.ty.clone()))?;
    node(Rule::Bang, vec![prem], j)
}

pub fn forall_i(prem: Derivation, var: impl Into<Name>) -> Build {
    let var = var.into();
    let p = &prem.conclusion;
    let j = Judgment::new(
        p.gamma.clone(),
        p.delta.clone(),
        p.e.clone(),
        p.subject.clone(),
        Formula::forall(var.clone(), p.ty.clone())?,
    )?;
    node(Rule::ForallI { var }, vec![prem], j)
}

pub fn forall_i_many(prem: Derivation, vars: &[Name]) -> Build {
    let mut d = prem;
    for v in vars.iter().rev() {
        d = forall_i(d, v.clone())?;
    }
    Ok(d)
}

pub fn forall_e(prem: Derivation, arg: Formula) -> Build {
    let p = &prem.conclusion;
    let (var, body) =
        p.ty.as_forall().ok_or_else(|| other(format!("forallE on non-quantified {}", p.ty)))?;
    let ty = body.subst_type(var, &arg)?;
    let j = Judgment::new(p.gamma.clone(), p.delta.clone(), p.e.clone(), p.subject.clone(), ty)?;
    node(Rule::ForallE { arg }, vec![prem], j)
}

pub fn forall_e_many(prem: Derivation, args: &[Formula]) -> Build {
    let mut d = prem;
    for a in args {
        d = forall_e(d, a.clone())?;
    }
    Ok(d)
}

/// Contract the polynomial variables `x` and `y` into `z`.
pub fn contract(prem: Derivation, x: &Name, y: &Name, z: &Name) -> Build {
    let p = &prem.conclusion;
    let px = p.e.find_phi(x).cloned().ok_or_else(|| other(format!("C: no phi {x}")))?;
    let py = p.e.find_phi(y).cloned().ok_or_else(|| other(format!("C: no phi {y}")))?;
    let (_, ty) = px.phi.clone().unwrap();
    let rest = p.e.without_pair(&px).unwrap().without_pair(&py).unwrap();
    let theta = px.theta.union(&py.theta).map_err(|n| other(format!("theta clash on {n}")))?;
    let e = rest.merge(&PDContext::from_pairs([Pair { theta, phi: Some((z.clone(), ty)) }])?)?;
    let j = Judgment::new(
        p.gamma.clone(),
        p.delta.clone(),
        e,
        p.subject.rename_all(&[x.clone(), y.clone()], z),
        p.ty.clone(),
    )?;
    node(Rule::Contract { x: x.clone(), y: y.clone(), z: z.clone() }, vec![prem], j)
}

/// Contract a whole group of polynomial variables into `z`.
pub fn contract_group(prem: Derivation, xs: &[Name], z: &Name) -> Build {
    match xs.len() {
        0 => Err(other("contract_group needs at least one variable")),
        1 => {
            if &xs[0] == z {
                return Ok(prem);
            }
            // single copy: still route through C? No pair partner exists, so
            // rename by contracting with a fresh fake polynomial assumption
            // is not faithful; instead require the caller to have named the
            // copy z already.
            Err(other(format!("contract_group: single copy must already be named {z}")))
        }
        _ => {
            let mut d = prem;
            let mut cur = xs[0].clone();
            for (i, y) in xs[1..].iter().enumerate() {
                let target = if i + 2 == xs.len() {
                    z.clone()
                } else {
                    crate::term::fresh(z.as_str())
                };
                d = contract(d, &cur, y, &target)?;
                cur = target;
            }
            Ok(d)
        }
    }
}

// ---------------------------------------------------------------------------
// Weakening: push a fake assumption to the nearest absorbing node.
// ---------------------------------------------------------------------------

fn absent_everywhere(d: &Derivation, x: &Name) -> bool {
    let c = &d.conclusion;
    !c.all_names().contains(x)
        && !c.subject.has_free(x)
        && c.subject.as_abs().map(|(b, _)| b != x).unwrap_or(true)
        && d.premises.iter().all(|p| absent_everywhere(p, x))
}

enum Slot {
    Gamma,
    Delta,
    Theta,
    Phi,
}

fn weaken(d: Derivation, x: &Name, ty: Formula, slot: &Slot) -> Build {
    if !absent_everywhere(&d, x) {
        return Err(other(format!("weaken: {x} already used in the tree")));
    }
    weaken_inner(d, x, ty, slot)
}

fn add_to_judgment(j: &Judgment, x: &Name, ty: &Formula, slot: &Slot) -> Result<Judgment, BuildError> {
    let mut gamma = j.gamma.clone();
    let mut delta = j.delta.clone();
    let mut e = j.e.clone();
    match slot {
        Slot::Gamma => gamma.insert(x.clone(), ty.clone()),
        Slot::Delta => delta.insert(x.clone(), ty.clone()),
        Slot::Theta => {
            e = e.merge(&PDContext::from_pairs([Pair::with_theta(Ctx::single(
                x.clone(),
                ty.clone(),
            ))])?)?;
        }
        Slot::Phi => {
            e = e.merge(&PDContext::from_pairs([Pair::with_phi(x.clone(), ty.clone())])?)?;
        }
    }
    Ok(Judgment::new(gamma, delta, e, j.subject.clone(), j.ty.clone())?)
}

fn weaken_inner(d: Derivation, x: &Name, ty: Formula, slot: &Slot) -> Build {
    match &d.rule {
        Rule::Axiom => {
            let j = add_to_judgment(&d.conclusion, x, &ty, slot)?;
            node(Rule::Axiom, vec![], j)
        }
        Rule::Dollar => {
            let j = add_to_judgment(&d.conclusion, x, &ty, slot)?;
            node(Rule::Dollar, d.premises, j)
        }
        Rule::Bang => {
            // the box conclusion absorbs gamma and delta directly; a theta
            // fake rides in the new pair when a phi is present, a phi fake
            // needs the pair slot free
            match slot {
                Slot::Gamma | Slot::Delta => {
                    let j = add_to_judgment(&d.conclusion, x, &ty, slot)?;
                    node(Rule::Bang, d.premises, j)
                }
                Slot::Theta => {
                    let c = &d.conclusion;
                    let pair = c
                        .e
                        .phi_pairs()
                        .next()
                        .cloned()
                        .ok_or_else(|| other("weaken theta at a closed ! box"))?;
                    let mut theta = pair.theta.clone();
                    theta.insert(x.clone(), ty);
                    let e = c
                        .e
                        .without_pair(&pair)
                        .unwrap()
                        .merge(&PDContext::from_pairs([Pair { theta, phi: pair.phi.clone() }])?)?;
                    let j = Judgment::new(
                        c.gamma.clone(),
                        c.delta.clone(),
                        e,
                        c.subject.clone(),
                        c.ty.clone(),
                    )?;
                    node(Rule::Bang, d.premises, j)
                }
                Slot::Phi => {
                    if d.conclusion.e.phi_pairs().next().is_some() {
                        return Err(other("weaken phi at a ! box that already has one"));
                    }
                    let j = add_to_judgment(&d.conclusion, x, &ty, slot)?;
                    node(Rule::Bang, d.premises, j)
                }
            }
        }
        _ => {
            let mut premises = d.premises;
            let first = premises.remove(0);
            let first = weaken_inner(first, x, ty.clone(), slot)?;
            premises.insert(0, first);
            let j = add_to_judgment(&d.conclusion, x, &ty, slot)?;
            node(d.rule, premises, j)
        }
    }
}

pub fn weaken_gamma(d: Derivation, x: &Name, ty: Formula) -> Build {
    weaken(d, x, ty, &Slot::Gamma)
}

pub fn weaken_delta(d: Derivation, x: &Name, ty: Formula) -> Build {
    weaken(d, x, ty, &Slot::Delta)
}

pub fn weaken_theta(d: Derivation, x: &Name, ty: Formula) -> Build {
    weaken(d, x, ty, &Slot::Theta)
}

pub fn weaken_phi(d: Derivation, x: &Name, ty: Formula) -> Build {
    weaken(d, x, ty, &Slot::Phi)
}

// ---------------------------------------------------------------------------
// Leaf access patterns
// ---------------------------------------------------------------------------

/// `;;{({x:L};)} |- x : $L` — an elementary variable used one box deep.
pub fn theta_var(x: impl Into<Name>, ty: Formula) -> Build {
    let x = x.into();
    dollar_all_theta(axiom(x, ty)?)
}

/// `;;{({x:$^{n-1}L};)} |- x : $^n L` — crossing `n` boxes.
pub fn theta_var_n(x: impl Into<Name>, ty: Formula, n: usize) -> Build {
    let x = x.into();
    let mut d = theta_var(x, ty)?;
    for _ in 1..n.max(1) {
        d = dollar_all_theta(d)?;
    }
    Ok(d)
}

/// `;{x:A}; |- x : $A` — a partially discharged variable.
pub fn delta_var(x: impl Into<Name>, ty: Formula) -> Build {
    let x = x.into();
    dollar(axiom(x.clone(), ty)?, &DollarSplit { to_delta: vec![x], to_theta: vec![] })
}

/// `;;{(;x:A)} |- x : !A` — a polynomial variable.
pub fn phi_var(x: impl Into<Name>, ty: Formula) -> Build {
    let x = x.into();
    bang(axiom(x.clone(), ty)?, Some(&x))
}

/// Identity at a linear type.
pub fn identity(ty: Formula) -> Build {
    let x = crate::term::fresh("x");
    lolli_i(axiom(x.clone(), ty)?, &x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::measures;

    fn ty(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn identity_derivation() {
        let d = identity(ty("a")).unwrap();
        let j = d.check().unwrap();
        assert_eq!(j.ty, ty("a -o a"));
        assert!(j.gamma.is_empty());
        assert_eq!(measures::depth(&d), 0);
    }

    #[test]
    fn leaf_patterns() {
        let d = theta_var("x", ty("a")).unwrap();
        assert_eq!(d.check().unwrap().ty, ty("$a"));
        let d = theta_var_n("x", ty("a"), 3).unwrap();
        assert_eq!(d.check().unwrap().ty, ty("$$$a"));
        let d = delta_var("x", ty("a")).unwrap();
        assert_eq!(d.check().unwrap().ty, ty("$a"));
        let d = phi_var("x", ty("a")).unwrap();
        assert_eq!(d.check().unwrap().ty, ty("!a"));
    }

    #[test]
    fn weakening_reaches_leaves() {
        let d = identity(ty("a")).unwrap();
        let d = weaken_gamma(d, &Name::new("w"), ty("b")).unwrap();
        let j = d.check().unwrap();
        assert_eq!(j.gamma.get(&Name::new("w")), Some(&ty("b")));
        assert_eq!(j.fake_assumptions(), vec![Name::new("w")]);
    }

    #[test]
    fn fake_binders() {
        // \x y. x at a -o b -o a
        let ax = axiom("x", ty("a")).unwrap();
        let d = lolli_i_fake(ax, &Name::new("y"), ty("b")).unwrap();
        let d = lolli_i(d, &Name::new("x")).unwrap();
        assert_eq!(d.check().unwrap().ty, ty("a -o b -o a"));
    }
}
