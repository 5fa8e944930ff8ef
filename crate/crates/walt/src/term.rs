//! Untyped lambda terms with named variables.
//!
//! Terms are immutable, reference counted trees. Every node caches its free
//! variables and size, and carries a depth label used by the level-indexed
//! reduction; the label is 0 for terms that were never annotated. Equality is
//! alpha-equivalence and ignores depth labels.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Variable name. Cheap to clone, ordered by the underlying string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Name {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::new(s)
    }
}

static FRESH: AtomicU64 = AtomicU64::new(0);

/// A name guaranteed distinct from every other one handed out so far.
/// The base keeps printed terms readable; any `_N` suffix is stripped first.
pub fn fresh(base: &str) -> Name {
    let stem = match base.rfind('_') {
        Some(i) if base[i + 1..].chars().all(|c| c.is_ascii_digit()) && i > 0 => &base[..i],
        _ => base,
    };
    let n = FRESH.fetch_add(1, Ordering::Relaxed);
    Name(Arc::from(format!("{stem}_{n}").as_str()))
}

#[derive(Debug)]
enum Kind {
    Var(Name),
    Abs(Name, Term),
    App(Term, Term),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    fv: Box<[Name]>, // sorted, deduplicated
    size: u64,
    dep: u32,
}

/// An untyped lambda term.
#[derive(Clone, Debug)]
pub struct Term(Arc<Node>);

fn merge_names(a: &[Name], b: &[Name]) -> Box<[Name]> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out.into_boxed_slice()
}

impl Term {
    pub fn var(n: impl Into<Name>) -> Term {
        let n = n.into();
        Term(Arc::new(Node {
            fv: vec![n.clone()].into_boxed_slice(),
            kind: Kind::Var(n),
            size: 1,
            dep: 0,
        }))
    }

    pub fn abs(n: impl Into<Name>, body: Term) -> Term {
        let n = n.into();
        let fv: Vec<Name> = body.free_vars().iter().filter(|v| **v != n).cloned().collect();
        Term(Arc::new(Node {
            size: body.size() + 1,
            fv: fv.into_boxed_slice(),
            kind: Kind::Abs(n, body),
            dep: 0,
        }))
    }

    /// Nested abstraction over several binders.
    pub fn abs_many<I: IntoIterator<Item = Name>>(names: I, body: Term) -> Term
    where
        I::IntoIter: DoubleEndedIterator,
    {
        names.into_iter().rev().fold(body, |b, n| Term::abs(n, b))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term(Arc::new(Node {
            fv: merge_names(fun.free_vars(), arg.free_vars()),
            size: fun.size() + arg.size() + 1,
            kind: Kind::App(fun, arg),
            dep: 0,
        }))
    }

    /// Left-associated application spine.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// Same term with the given depth label on the root node.
    pub fn with_dep(&self, dep: u32) -> Term {
        if self.0.dep == dep {
            return self.clone();
        }
        let kind = match &self.0.kind {
            Kind::Var(n) => Kind::Var(n.clone()),
            Kind::Abs(n, b) => Kind::Abs(n.clone(), b.clone()),
            Kind::App(f, a) => Kind::App(f.clone(), a.clone()),
        };
        Term(Arc::new(Node { kind, fv: self.0.fv.clone(), size: self.0.size, dep }))
    }

    pub fn dep(&self) -> u32 {
        self.0.dep
    }

    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn free_vars(&self) -> &[Name] {
        &self.0.fv
    }

    pub fn has_free(&self, n: &Name) -> bool {
        self.0.fv.binary_search(n).is_ok()
    }

    pub fn is_closed(&self) -> bool {
        self.0.fv.is_empty()
    }

    /// True iff the term is a variable or an abstraction.
    pub fn is_value(&self) -> bool {
        !matches!(self.0.kind, Kind::App(..))
    }

    pub fn as_var(&self) -> Option<&Name> {
        match &self.0.kind {
            Kind::Var(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_abs(&self) -> Option<(&Name, &Term)> {
        match &self.0.kind {
            Kind::Abs(n, b) => Some((n, b)),
            _ => None,
        }
    }

    pub fn as_app(&self) -> Option<(&Term, &Term)> {
        match &self.0.kind {
            Kind::App(f, a) => Some((f, a)),
            _ => None,
        }
    }

    /// Pointer identity, used by the reduction engine to cache normality.
    pub(crate) fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Number of free occurrences of `x`.
    pub fn nocc(&self, x: &Name) -> u64 {
        if !self.has_free(x) {
            return 0;
        }
        match &self.0.kind {
            Kind::Var(_) => 1,
            Kind::Abs(_, b) => b.nocc(x),
            Kind::App(f, a) => f.nocc(x) + a.nocc(x),
        }
    }

    /// Capture free simultaneous substitution. Depth labels in the context
    /// and in the substituted terms are preserved unchanged.
    pub fn substitute(&self, map: &BTreeMap<Name, Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        if !self.free_vars().iter().any(|v| map.contains_key(v)) {
            return self.clone();
        }
        match &self.0.kind {
            Kind::Var(n) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            Kind::App(f, a) => {
                let t = Term::app(f.substitute(map), a.substitute(map));
                t.with_dep(self.0.dep)
            }
            Kind::Abs(n, b) => {
                // Restrict to bindings that actually hit the body.
                let mut live: BTreeMap<Name, Term> = BTreeMap::new();
                for (k, v) in map {
                    if k != n && b.has_free(k) {
                        live.insert(k.clone(), v.clone());
                    }
                }
                if live.is_empty() {
                    return self.clone();
                }
                let captured = live.values().any(|v| v.has_free(n));
                let (binder, body) = if captured {
                    let n2 = fresh(n.as_str());
                    let mut rn = BTreeMap::new();
                    rn.insert(n.clone(), Term::var(n2.clone()));
                    (n2, b.substitute(&rn))
                } else {
                    (n.clone(), b.clone())
                };
                Term::abs(binder, body.substitute(&live)).with_dep(self.0.dep)
            }
        }
    }

    pub fn substitute1(&self, x: &Name, v: &Term) -> Term {
        let mut m = BTreeMap::new();
        m.insert(x.clone(), v.clone());
        self.substitute(&m)
    }

    /// Rename `xs` to `z` (plain variable renaming, for the contraction rule).
    pub fn rename_all(&self, xs: &[Name], z: &Name) -> Term {
        let mut m = BTreeMap::new();
        for x in xs {
            m.insert(x.clone(), Term::var(z.clone()));
        }
        self.substitute(&m)
    }

    pub fn subterm_at(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for sel in &pos.0 {
            cur = match (&cur.0.kind, sel) {
                (Kind::Abs(_, b), Selector::Body) => b,
                (Kind::App(f, _), Selector::Fun) => f,
                (Kind::App(_, a), Selector::Arg) => a,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Replace the subterm at `pos`, keeping every label along the spine.
    pub fn replace_at(&self, pos: &Position, new: Term) -> Option<Term> {
        fn go(t: &Term, path: &[Selector], new: Term) -> Option<Term> {
            let Some((sel, rest)) = path.split_first() else {
                return Some(new);
            };
            let out = match (&t.0.kind, sel) {
                (Kind::Abs(n, b), Selector::Body) => Term::abs(n.clone(), go(b, rest, new)?),
                (Kind::App(f, a), Selector::Fun) => Term::app(go(f, rest, new)?, a.clone()),
                (Kind::App(f, a), Selector::Arg) => Term::app(f.clone(), go(a, rest, new)?),
                _ => return None,
            };
            Some(out.with_dep(t.0.dep))
        }
        go(self, &pos.0, new)
    }

    /// All positions of the term in preorder (root first, fun before arg).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        fn go(t: &Term, cur: &mut Vec<Selector>, out: &mut Vec<Position>) {
            out.push(Position(cur.clone()));
            match &t.0.kind {
                Kind::Var(_) => {}
                Kind::Abs(_, b) => {
                    cur.push(Selector::Body);
                    go(b, cur, out);
                    cur.pop();
                }
                Kind::App(f, a) => {
                    cur.push(Selector::Fun);
                    go(f, cur, out);
                    cur.pop();
                    cur.push(Selector::Arg);
                    go(a, cur, out);
                    cur.pop();
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    fn alpha_eq_in(&self, other: &Term, la: &mut Vec<Name>, lb: &mut Vec<Name>) -> bool {
        match (&self.0.kind, &other.0.kind) {
            (Kind::Var(a), Kind::Var(b)) => {
                let ia = la.iter().rposition(|n| n == a);
                let ib = lb.iter().rposition(|n| n == b);
                match (ia, ib) {
                    (Some(x), Some(y)) => x == y,
                    (None, None) => a == b,
                    _ => false,
                }
            }
            (Kind::Abs(a, ba), Kind::Abs(b, bb)) => {
                la.push(a.clone());
                lb.push(b.clone());
                let r = ba.alpha_eq_in(bb, la, lb);
                la.pop();
                lb.pop();
                r
            }
            (Kind::App(fa, aa), Kind::App(fb, ab)) => {
                fa.alpha_eq_in(fb, la, lb) && aa.alpha_eq_in(ab, la, lb)
            }
            _ => false,
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.size() != other.size() || self.free_vars() != other.free_vars() {
            return false;
        }
        self.alpha_eq_in(other, &mut Vec::new(), &mut Vec::new())
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.alpha_eq(other)
    }
}

impl Eq for Term {}

/// Child selector of a term node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selector {
    Body,
    Fun,
    Arg,
}

/// Path from the root of a term to one of its subterms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(Vec<Selector>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn from_selectors(sels: Vec<Selector>) -> Position {
        Position(sels)
    }

    pub fn child(&self, sel: Selector) -> Position {
        let mut v = self.0.clone();
        v.push(sel);
        Position(v)
    }

    pub fn selectors(&self) -> &[Selector] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parse(s: &str) -> Option<Position> {
        let s = s.strip_prefix('.')?;
        if s.is_empty() {
            return Some(Position::root());
        }
        let mut v = Vec::new();
        for part in s.split('.') {
            v.push(match part {
                "body" => Selector::Body,
                "fun" => Selector::Fun,
                "arg" => Selector::Arg,
                _ => return None,
            });
        }
        Some(Position(v))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(".")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(match s {
                Selector::Body => "body",
                Selector::Fun => "fun",
                Selector::Arg => "arg",
            })?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f, Ctx::Top)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Top,
    FunPos,
    ArgPos,
}

fn fmt_term(t: &Term, f: &mut fmt::Formatter<'_>, ctx: Ctx) -> fmt::Result {
    match &t.0.kind {
        Kind::Var(n) => write!(f, "{n}"),
        Kind::Abs(..) => {
            let need_parens = ctx != Ctx::Top;
            if need_parens {
                f.write_str("(")?;
            }
            f.write_str("\\")?;
            let mut cur = t;
            let mut first = true;
            while let Kind::Abs(n, b) = &cur.0.kind {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{n}")?;
                first = false;
                cur = b;
            }
            f.write_str(". ")?;
            fmt_term(cur, f, Ctx::Top)?;
            if need_parens {
                f.write_str(")")?;
            }
            Ok(())
        }
        Kind::App(fun, arg) => {
            let need_parens = ctx == Ctx::ArgPos;
            if need_parens {
                f.write_str("(")?;
            }
            fmt_term(fun, f, Ctx::FunPos)?;
            f.write_str(" ")?;
            fmt_term(arg, f, Ctx::ArgPos)?;
            if need_parens {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("parse error at byte {at}: {msg}")]
pub struct ParseError {
    pub at: usize,
    pub msg: String,
}

struct P<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> P<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { at: self.pos, msg: msg.into() })
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

    fn ident(&mut self) -> Result<Name, ParseError> {
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

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'\\') => {
                self.pos += 1;
                let mut binders = vec![self.ident()?];
                loop {
                    match self.peek() {
                        Some(b'.') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) if (c as char).is_ascii_alphabetic() => {
                            binders.push(self.ident()?);
                        }
                        _ => return self.err("expected binder or '.'"),
                    }
                }
                let body = self.term()?;
                Ok(Term::abs_many(binders, body))
            }
            _ => self.app_chain(),
        }
    }

    fn app_chain(&mut self) -> Result<Term, ParseError> {
        let mut head = match self.atom()? {
            Some(t) => t,
            None => return self.err("expected term"),
        };
        while let Some(next) = self.atom()? {
            head = Term::app(head, next);
        }
        Ok(head)
    }

    fn atom(&mut self) -> Result<Option<Term>, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.term()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(Some(t))
            }
            Some(b'\\') => Ok(Some(self.term()?)),
            Some(c) if (c as char).is_ascii_alphabetic() => Ok(Some(Term::var(self.ident()?))),
            _ => Ok(None),
        }
    }
}

/// Parse the textual syntax: `\x y. M`, juxtaposition for application,
/// parentheses, identifiers `[a-zA-Z][a-zA-Z0-9_']*`.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = P { src: src.as_bytes(), pos: 0 };
    let t = p.term()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn free_vars_examples() {
        assert!(t("\\x. x").free_vars().is_empty());
        assert_eq!(t("\\x. y x").free_vars(), &[Name::new("y")]);
        let fv = t("(\\x. y x x)(w z)");
        let mut names: Vec<_> = fv.free_vars().iter().map(|n| n.as_str().to_string()).collect();
        names.sort();
        assert_eq!(names, ["w", "y", "z"]);
    }

    #[test]
    fn nocc_examples() {
        assert_eq!(t("x").nocc(&Name::new("x")), 1);
        assert_eq!(t("\\x. x").nocc(&Name::new("x")), 0);
        assert_eq!(t("y x x").nocc(&Name::new("x")), 2);
    }

    #[test]
    fn size_examples() {
        assert_eq!(t("x").size(), 1);
        assert_eq!(t("\\x. x").size(), 2);
        assert_eq!(t("(\\x. x) y").size(), 4);
    }

    #[test]
    fn value_examples() {
        assert!(t("x").is_value());
        assert!(t("\\x. x y").is_value());
        assert!(!t("(\\x. x) y").is_value());
    }

    #[test]
    fn alpha_equivalence() {
        assert_eq!(t("\\x. x"), t("\\y. y"));
        assert_eq!(t("\\x y. x y z"), t("\\a b. a b z"));
        assert_ne!(t("\\x y. x"), t("\\x y. y"));
        assert_ne!(t("\\x. x"), t("\\x. y"));
    }

    #[test]
    fn substitution_examples() {
        let id = t("\\y. y");
        assert_eq!(t("x").substitute1(&Name::new("x"), &id), id);
        // capture avoidance: (\y.x){x := y} binds nothing
        let r = t("\\y. x").substitute1(&Name::new("x"), &Term::var("y"));
        let (b, body) = r.as_abs().unwrap();
        assert_ne!(b.as_str(), "y");
        assert_eq!(body.as_var().unwrap().as_str(), "y");
        assert_eq!(
            t("y x x").substitute1(&Name::new("x"), &t("w z")),
            t("y (w z) (w z)")
        );
    }

    #[test]
    fn substitution_identity_and_occurrence_laws() {
        for s in ["\\x. x x", "(\\x. y x x)(w z)", "\\f y. f (f y)"] {
            let m = t(s);
            let x = Name::new("x");
            assert_eq!(m.substitute1(&x, &Term::var("x")), m);
            let n = t("\\q. q q");
            let sub = m.substitute1(&x, &n);
            assert_eq!(sub.nocc(&x), 0);
            assert_eq!(sub.size(), m.size() + m.nocc(&x) * (n.size() - 1));
        }
    }

    #[test]
    fn positions_round_trip() {
        let m = t("(\\x. y x x)(w z)");
        for pos in m.positions() {
            let sub = m.subterm_at(&pos).unwrap().clone();
            let back = m.replace_at(&pos, sub).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn print_parse_round_trip() {
        for s in ["\\x y. x y (\\z. z x) y", "w y (\\x. x)", "(\\x. y x x)(w z)"] {
            let m = t(s);
            assert_eq!(parse_term(&m.to_string()).unwrap(), m);
        }
    }
}
