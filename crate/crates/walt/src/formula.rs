//! Formulae of the type system: linear connectives, the two modalities, and
//! second order quantification over linear bodies.
//!
//! Well-formedness is enforced by the constructors: the eager arrow only
//! accepts a `$`-modal left component and `forall` only accepts a linear
//! body. Equality is alpha-equivalence on quantifiers.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::term::{fresh, Name};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("eager arrow needs a $-modal left component, got {0}")]
    EagerLeftNotPar(String),
    #[error("forall body must be linear, got {0}")]
    ForallBodyModal(String),
    #[error("substituend must be linear, got {0}")]
    NonLinearSubstituend(String),
}

#[derive(Clone, Debug)]
enum Node {
    TyVar(Name),
    Lolli(Formula, Formula),
    Eager(Formula, Formula),
    Forall(Name, Formula),
    Bang(Formula),
    Par(Formula),
}

/// A type formula. Immutable and cheap to clone.
#[derive(Clone, Debug)]
pub struct Formula(Arc<Node>);

impl Formula {
    pub fn tyvar(n: impl Into<Name>) -> Formula {
        Formula(Arc::new(Node::TyVar(n.into())))
    }

    pub fn lolli(left: Formula, right: Formula) -> Formula {
        Formula(Arc::new(Node::Lolli(left, right)))
    }

    /// Right-associated chain `a1 -o a2 -o ... -o last`.
    pub fn lolli_chain(args: impl IntoIterator<Item = Formula>, last: Formula) -> Formula {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter().rev().fold(last, |acc, a| Formula::lolli(a, acc))
    }

    pub fn eager(left: Formula, right: Formula) -> Result<Formula, FormulaError> {
        if !matches!(&*left.0, Node::Par(_)) {
            return Err(FormulaError::EagerLeftNotPar(left.to_string()));
        }
        Ok(Formula(Arc::new(Node::Eager(left, right))))
    }

    /// Right-associated chain of eager arrows; every argument must be $-modal.
    pub fn eager_chain(args: impl IntoIterator<Item = Formula>, last: Formula) -> Formula {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(last, |acc, a| Formula::eager(a, acc).expect("eager argument must be $-modal"))
    }

    pub fn forall(var: impl Into<Name>, body: Formula) -> Result<Formula, FormulaError> {
        if !body.is_linear() {
            return Err(FormulaError::ForallBodyModal(body.to_string()));
        }
        Ok(Formula(Arc::new(Node::Forall(var.into(), body))))
    }

    pub fn forall_many(vars: &[Name], body: Formula) -> Result<Formula, FormulaError> {
        let mut f = body;
        for v in vars.iter().rev() {
            f = Formula::forall(v.clone(), f)?;
        }
        Ok(f)
    }

    pub fn bang(inner: Formula) -> Formula {
        Formula(Arc::new(Node::Bang(inner)))
    }

    pub fn par(inner: Formula) -> Formula {
        Formula(Arc::new(Node::Par(inner)))
    }

    /// `$^n A`.
    pub fn par_n(n: usize, inner: Formula) -> Formula {
        (0..n).fold(inner, |f, _| Formula::par(f))
    }

    /// True iff the root is not a modality.
    pub fn is_linear(&self) -> bool {
        !matches!(&*self.0, Node::Bang(_) | Node::Par(_))
    }

    pub fn as_lolli(&self) -> Option<(&Formula, &Formula)> {
        match &*self.0 {
            Node::Lolli(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_eager(&self) -> Option<(&Formula, &Formula)> {
        match &*self.0 {
            Node::Eager(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_forall(&self) -> Option<(&Name, &Formula)> {
        match &*self.0 {
            Node::Forall(n, b) => Some((n, b)),
            _ => None,
        }
    }

    pub fn as_bang(&self) -> Option<&Formula> {
        match &*self.0 {
            Node::Bang(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_par(&self) -> Option<&Formula> {
        match &*self.0 {
            Node::Par(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_tyvar(&self) -> Option<&Name> {
        match &*self.0 {
            Node::TyVar(n) => Some(n),
            _ => None,
        }
    }

    /// Strip `$` prefixes, returning their count and the first non-`$` part.
    pub fn strip_pars(&self) -> (usize, &Formula) {
        let mut n = 0;
        let mut cur = self;
        while let Node::Par(inner) = &*cur.0 {
            n += 1;
            cur = inner;
        }
        (n, cur)
    }

    pub fn free_tyvars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            match &*f.0 {
                Node::TyVar(n) => {
                    if !bound.contains(n) {
                        out.insert(n.clone());
                    }
                }
                Node::Lolli(a, b) | Node::Eager(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Node::Forall(n, b) => {
                    bound.push(n.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Node::Bang(a) | Node::Par(a) => go(a, bound, out),
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn has_free_tyvar(&self, v: &Name) -> bool {
        fn go(f: &Formula, v: &Name) -> bool {
            match &*f.0 {
                Node::TyVar(n) => n == v,
                Node::Lolli(a, b) | Node::Eager(a, b) => go(a, v) || go(b, v),
                Node::Forall(n, b) => n != v && go(b, v),
                Node::Bang(a) | Node::Par(a) => go(a, v),
            }
        }
        go(self, v)
    }

    /// Capture avoiding substitution of a linear formula for a type variable.
    pub fn subst_type(&self, var: &Name, sub: &Formula) -> Result<Formula, FormulaError> {
        if !sub.is_linear() {
            return Err(FormulaError::NonLinearSubstituend(sub.to_string()));
        }
        fn go(f: &Formula, var: &Name, sub: &Formula) -> Formula {
            if !f.has_free_tyvar(var) {
                return f.clone();
            }
            match &*f.0 {
                Node::TyVar(_) => sub.clone(),
                Node::Lolli(a, b) => Formula::lolli(go(a, var, sub), go(b, var, sub)),
                Node::Eager(a, b) => {
                    Formula::eager(go(a, var, sub), go(b, var, sub)).expect("left stays $-modal")
                }
                Node::Forall(n, b) => {
                    let (binder, body) = if sub.has_free_tyvar(n) {
                        let n2 = fresh(n.as_str());
                        let renamed = go(b, n, &Formula::tyvar(n2.clone()));
                        (n2, renamed)
                    } else {
                        (n.clone(), b.clone())
                    };
                    Formula::forall(binder, go(&body, var, sub)).expect("body stays linear")
                }
                Node::Bang(a) => Formula::bang(go(a, var, sub)),
                Node::Par(a) => Formula::par(go(a, var, sub)),
            }
        }
        Ok(go(self, var, sub))
    }

    fn alpha_eq_in(&self, other: &Formula, la: &mut Vec<Name>, lb: &mut Vec<Name>) -> bool {
        match (&*self.0, &*other.0) {
            (Node::TyVar(a), Node::TyVar(b)) => {
                let ia = la.iter().rposition(|n| n == a);
                let ib = lb.iter().rposition(|n| n == b);
                match (ia, ib) {
                    (Some(x), Some(y)) => x == y,
                    (None, None) => a == b,
                    _ => false,
                }
            }
            (Node::Lolli(a1, b1), Node::Lolli(a2, b2))
            | (Node::Eager(a1, b1), Node::Eager(a2, b2)) => {
                a1.alpha_eq_in(a2, la, lb) && b1.alpha_eq_in(b2, la, lb)
            }
            (Node::Forall(n1, b1), Node::Forall(n2, b2)) => {
                la.push(n1.clone());
                lb.push(n2.clone());
                let r = b1.alpha_eq_in(b2, la, lb);
                la.pop();
                lb.pop();
                r
            }
            (Node::Bang(a), Node::Bang(b)) | (Node::Par(a), Node::Par(b)) => {
                a.alpha_eq_in(b, la, lb)
            }
            _ => false,
        }
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || self.alpha_eq_in(other, &mut Vec::new(), &mut Vec::new())
    }
}

impl Eq for Formula {}

// ---------------------------------------------------------------------------
// Printing:  -o for the linear arrow, =o for the eager one, right associated;
// modalities bind tightest, forall extends to the right.
// ---------------------------------------------------------------------------

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, f, 0)
    }
}

// prec 0: top (forall allowed), 1: arrow operand (left), 2: modal operand
fn fmt_formula(t: &Formula, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    match &*t.0 {
        Node::TyVar(n) => write!(f, "{n}"),
        Node::Forall(..) => {
            if prec > 0 {
                f.write_str("(")?;
            }
            f.write_str("forall")?;
            let mut cur = t;
            while let Node::Forall(n, b) = &*cur.0 {
                write!(f, " {n}")?;
                cur = b;
            }
            f.write_str(". ")?;
            fmt_formula(cur, f, 0)?;
            if prec > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Node::Lolli(a, b) | Node::Eager(a, b) => {
            if prec > 0 {
                f.write_str("(")?;
            }
            fmt_formula(a, f, 1)?;
            f.write_str(if matches!(&*t.0, Node::Lolli(..)) { " -o " } else { " =o " })?;
            fmt_formula(b, f, 0)?;
            if prec > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Node::Bang(a) => {
            f.write_str("!")?;
            fmt_formula(a, f, 2)
        }
        Node::Par(a) => {
            f.write_str("$")?;
            fmt_formula(a, f, 2)
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("type parse error at byte {at}: {msg}")]
pub struct TypeParseError {
    pub at: usize,
    pub msg: String,
}

struct P<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> P<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TypeParseError> {
        Err(TypeParseError { at: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<Name, TypeParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if (*c as char).is_ascii_alphabetic() => self.pos += 1,
            _ => return self.err("expected identifier"),
        }
        while let Some(c) = self.src.get(self.pos) {
            let c = *c as char;
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(Name::new(std::str::from_utf8(&self.src[start..self.pos]).unwrap()))
    }

    fn formula(&mut self) -> Result<Formula, TypeParseError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(b"forall")
            && !matches!(self.src.get(self.pos + 6), Some(c) if (*c as char).is_ascii_alphanumeric() || *c == b'_' || *c == b'\'')
        {
            self.pos += 6;
            let mut vars = vec![self.ident()?];
            loop {
                match self.peek() {
                    Some(b'.') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) if (c as char).is_ascii_alphabetic() => vars.push(self.ident()?),
                    _ => return self.err("expected quantified variable or '.'"),
                }
            }
            let body = self.formula()?;
            return Formula::forall_many(&vars, body)
                .map_err(|e| TypeParseError { at: self.pos, msg: e.to_string() });
        }
        let left = self.modal()?;
        if self.eat("-o") {
            let right = self.formula()?;
            Ok(Formula::lolli(left, right))
        } else if self.eat("=o") {
            let right = self.formula()?;
            Formula::eager(left, right).map_err(|e| TypeParseError { at: self.pos, msg: e.to_string() })
        } else {
            Ok(left)
        }
    }

    fn modal(&mut self) -> Result<Formula, TypeParseError> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::bang(self.modal()?))
            }
            Some(b'$') => {
                self.pos += 1;
                Ok(Formula::par(self.modal()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let t = self.formula()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(t)
            }
            Some(c) if (c as char).is_ascii_alphabetic() => Ok(Formula::tyvar(self.ident()?)),
            _ => self.err("expected formula"),
        }
    }
}

/// Parse the textual type syntax.
pub fn parse_formula(src: &str) -> Result<Formula, TypeParseError> {
    let mut p = P { src: src.as_bytes(), pos: 0 };
    let t = p.formula()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn linearity() {
        assert!(ty("a -o a").is_linear());
        assert!(!ty("$a").is_linear());
        // the string type
        assert!(ty("forall a. !(a -o a) -o $(a -o a)").is_linear());
    }

    #[test]
    fn constructor_shapes() {
        assert!(Formula::eager(ty("a"), ty("b")).is_err());
        assert!(Formula::eager(ty("$a"), ty("b")).is_ok());
        assert!(Formula::forall("a", ty("$a")).is_err());
        assert!(Formula::forall("a", ty("a -o a")).is_ok());
    }

    #[test]
    fn substitution() {
        let a = Name::new("a");
        let b = Name::new("b");
        assert_eq!(ty("forall b. b -o b").subst_type(&b, &ty("a")).unwrap(), ty("forall b. b -o b"));
        assert_eq!(ty("b -o b").subst_type(&b, &ty("a -o a")).unwrap(), ty("(a -o a) -o a -o a"));
        assert_eq!(
            ty("b -o b").subst_type(&b, &ty("$a")),
            Err(FormulaError::NonLinearSubstituend("$a".into()))
        );
        // idempotence in the substituted variable
        let once = ty("b -o b").subst_type(&b, &ty("a")).unwrap();
        assert_eq!(once.subst_type(&b, &ty("a")).unwrap(), once);
        let _ = a;
    }

    #[test]
    fn free_tyvars() {
        let vars = ty("a -o b").free_tyvars();
        assert_eq!(vars.len(), 2);
        assert_eq!(ty("forall a. a -o b").free_tyvars().len(), 1);
        // the word type is closed
        assert!(ty("forall a. !(a -o a) -o !(a -o a) -o $(a -o a)").free_tyvars().is_empty());
    }

    #[test]
    fn linearity_preserved_by_substitution() {
        let b = Name::new("b");
        for s in ["b -o b", "$b", "!(b -o b)", "forall c. c -o b"] {
            let f = ty(s);
            let g = f.subst_type(&b, &ty("a -o a")).unwrap();
            assert_eq!(f.is_linear(), g.is_linear());
        }
    }

    #[test]
    fn print_parse_round_trip() {
        for s in [
            "forall a. !(a -o a) -o $(a -o a)",
            "$a =o b -o $$c",
            "!(a -o a) -o !(a -o a) -o $(a -o a)",
            "forall a b. (a -o b) -o a -o b",
        ] {
            let f = ty(s);
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn alpha_equality() {
        assert_eq!(ty("forall a. a -o a"), ty("forall b. b -o b"));
        assert_ne!(ty("forall a. a -o b"), ty("forall b. b -o b"));
    }
}
