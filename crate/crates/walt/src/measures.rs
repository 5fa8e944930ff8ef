//! Quantitative measures over derivations: depth, partial size and width per
//! level, the position-to-depth map, and the simply shaped erasure.

use std::collections::BTreeMap;
use std::fmt;

use crate::derivation::{Derivation, Rule};
use crate::formula::Formula;
use crate::judgment::Judgment;
use crate::term::{Name, Position, Selector, Term};

/// Number of modal rules on the deepest branch.
pub fn depth(d: &Derivation) -> u32 {
    let inner = d.premises.iter().map(depth).max().unwrap_or(0);
    if d.rule.is_modal() {
        inner + 1
    } else {
        inner
    }
}

/// Partial size of the derivation at the given level; 0 outside 0..=depth.
pub fn partial_size(d: &Derivation, lvl: u32) -> u64 {
    match &d.rule {
        Rule::Axiom => {
            if lvl == 0 {
                1
            } else {
                0
            }
        }
        Rule::Contract { .. } => {
            let p = partial_size(&d.premises[0], lvl);
            if lvl == 0 {
                p
            } else {
                p + 1
            }
        }
        Rule::ForallI { .. } | Rule::ForallE { .. } => partial_size(&d.premises[0], lvl),
        Rule::LolliI | Rule::LolliIBang | Rule::LolliIDollar | Rule::EagerI => {
            let p = partial_size(&d.premises[0], lvl);
            if lvl == 0 {
                p + 1
            } else {
                p
            }
        }
        Rule::LolliE | Rule::LolliEBang | Rule::EagerE => {
            partial_size(&d.premises[0], lvl) + partial_size(&d.premises[1], lvl) + 1
        }
        Rule::Dollar | Rule::Bang => {
            if lvl == 0 {
                0
            } else {
                partial_size(&d.premises[0], lvl - 1)
            }
        }
    }
}

/// Width of the derivation at the given level; level 0 is always 0.
pub fn width(d: &Derivation, lvl: u32) -> u64 {
    if lvl == 0 {
        return 0;
    }
    match &d.rule {
        Rule::Axiom => 0,
        Rule::Contract { .. } => {
            let p = width(&d.premises[0], lvl);
            if lvl == 1 {
                p + 1
            } else {
                p
            }
        }
        Rule::ForallI { .. }
        | Rule::ForallE { .. }
        | Rule::LolliI
        | Rule::LolliIDollar
        | Rule::LolliIBang
        | Rule::EagerI => width(&d.premises[0], lvl),
        Rule::LolliE | Rule::LolliEBang | Rule::EagerE => {
            let s = width(&d.premises[0], lvl) + width(&d.premises[1], lvl);
            if lvl == 1 {
                s + 1
            } else {
                s
            }
        }
        Rule::Dollar | Rule::Bang => width(&d.premises[0], lvl - 1),
    }
}

/// Partial sizes for every level 0..=depth.
pub fn partial_sizes(d: &Derivation) -> Vec<u64> {
    (0..=depth(d)).map(|l| partial_size(d, l)).collect()
}

/// Widths for every level 0..=depth.
pub fn widths(d: &Derivation) -> Vec<u64> {
    (0..=depth(d)).map(|l| width(d, l)).collect()
}

/// Assigns to every subject position the number of modal rules crossed from
/// the root to the derivation node introducing that position's head
/// constructor. Contractions are transparent to positions.
pub fn depth_map(d: &Derivation) -> BTreeMap<Position, u32> {
    let mut out = BTreeMap::new();
    fn go(
        d: &Derivation,
        lvl: u32,
        prefix: &mut Vec<Selector>,
        out: &mut BTreeMap<Position, u32>,
    ) {
        match &d.rule {
            Rule::Axiom => {
                out.insert(Position::from_selectors(prefix.clone()), lvl);
            }
            Rule::Contract { .. } | Rule::ForallI { .. } | Rule::ForallE { .. } => {
                go(&d.premises[0], lvl, prefix, out);
            }
            Rule::Dollar | Rule::Bang => {
                go(&d.premises[0], lvl + 1, prefix, out);
            }
            Rule::LolliI | Rule::LolliIDollar | Rule::LolliIBang | Rule::EagerI => {
                out.insert(Position::from_selectors(prefix.clone()), lvl);
                prefix.push(Selector::Body);
                go(&d.premises[0], lvl, prefix, out);
                prefix.pop();
            }
            Rule::LolliE | Rule::LolliEBang | Rule::EagerE => {
                out.insert(Position::from_selectors(prefix.clone()), lvl);
                prefix.push(Selector::Fun);
                go(&d.premises[0], lvl, prefix, out);
                prefix.pop();
                prefix.push(Selector::Arg);
                go(&d.premises[1], lvl, prefix, out);
                prefix.pop();
            }
        }
    }
    go(d, 0, &mut Vec::new(), &mut out);
    out
}

/// The subject with every node labelled by its derivation depth.
pub fn annotate_subject(d: &Derivation) -> Term {
    let map = depth_map(d);
    fn go(t: &Term, cur: &mut Vec<Selector>, map: &BTreeMap<Position, u32>) -> Term {
        let dep = map.get(&Position::from_selectors(cur.clone())).copied().unwrap_or(0);
        if let Some((n, b)) = t.as_abs() {
            cur.push(Selector::Body);
            let b2 = go(b, cur, map);
            cur.pop();
            Term::abs(n.clone(), b2).with_dep(dep)
        } else if let Some((f, a)) = t.as_app() {
            cur.push(Selector::Fun);
            let f2 = go(f, cur, map);
            cur.pop();
            cur.push(Selector::Arg);
            let a2 = go(a, cur, map);
            cur.pop();
            Term::app(f2, a2).with_dep(dep)
        } else {
            t.with_dep(dep)
        }
    }
    go(&d.conclusion.subject, &mut Vec::new(), &map)
}

// ---------------------------------------------------------------------------
// Erasure to a simply shaped judgment
// ---------------------------------------------------------------------------

/// Types after erasure: one intuitionistic arrow, no modalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FType {
    Var(Name),
    Arrow(Box<FType>, Box<FType>),
    Forall(Name, Box<FType>),
}

impl fmt::Display for FType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FType::Var(n) => write!(f, "{n}"),
            FType::Arrow(a, b) => {
                match **a {
                    FType::Var(_) => write!(f, "{a}")?,
                    _ => write!(f, "({a})")?,
                }
                write!(f, " -> {b}")
            }
            FType::Forall(n, b) => write!(f, "forall {n}. {b}"),
        }
    }
}

/// Replace both arrows by one intuitionistic arrow and drop every modality.
pub fn erase_type(f: &Formula) -> FType {
    if let Some(n) = f.as_tyvar() {
        FType::Var(n.clone())
    } else if let Some((a, b)) = f.as_lolli() {
        FType::Arrow(Box::new(erase_type(a)), Box::new(erase_type(b)))
    } else if let Some((a, b)) = f.as_eager() {
        FType::Arrow(Box::new(erase_type(a)), Box::new(erase_type(b)))
    } else if let Some((n, b)) = f.as_forall() {
        FType::Forall(n.clone(), Box::new(erase_type(b)))
    } else if let Some(a) = f.as_bang() {
        erase_type(a)
    } else {
        erase_type(f.as_par().unwrap())
    }
}

/// A judgment with all three zones flattened into one context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasedJudgment {
    pub ctx: BTreeMap<Name, FType>,
    pub subject: Term,
    pub ty: FType,
}

pub fn erase_to_f(j: &Judgment) -> ErasedJudgment {
    let mut ctx = BTreeMap::new();
    for (x, t) in j.gamma.iter().chain(j.delta.iter()) {
        ctx.insert(x.clone(), erase_type(t));
    }
    for p in j.e.pairs() {
        for (x, t) in p.theta.iter() {
            ctx.insert(x.clone(), erase_type(t));
        }
        if let Some((x, t)) = &p.phi {
            ctx.insert(x.clone(), erase_type(t));
        }
    }
    ErasedJudgment { ctx, subject: j.subject.clone(), ty: erase_type(&j.ty) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn erasure_examples() {
        let f = parse_formula("!a -o $b").unwrap();
        assert_eq!(
            erase_type(&f),
            FType::Arrow(Box::new(FType::Var(Name::new("a"))), Box::new(FType::Var(Name::new("b"))))
        );
        let g = parse_formula("$a =o b").unwrap();
        assert_eq!(
            erase_type(&g),
            FType::Arrow(Box::new(FType::Var(Name::new("a"))), Box::new(FType::Var(Name::new("b"))))
        );
        // the string type erases to forall a. (a -> a) -> a -> a
        let n = parse_formula("forall a. !(a -o a) -o $(a -o a)").unwrap();
        assert_eq!(erase_type(&n).to_string(), "forall a. (a -> a) -> a -> a");
    }
}
