//! Basic data types over the calculus: unary strings, binary words, boolean
//! projectors, the two tensor flavours, and lists, each with term builders,
//! checked typing derivations, and decoders.

use crate::builders::{self, Build, BuildError};
use crate::derivation::Derivation;
use crate::formula::Formula;
use crate::term::{fresh, Name, Term};

/// `forall a. !(a -o a) -o $(a -o a)` — the type of unary strings.
pub fn ty_string() -> Formula {
    let a = Formula::tyvar("a");
    let aa = Formula::lolli(a.clone(), a);
    Formula::forall("a", Formula::lolli(Formula::bang(aa.clone()), Formula::par(aa))).unwrap()
}

/// `forall a. !(a -o a) -o !(a -o a) -o $(a -o a)` — the type of binary words.
pub fn ty_word() -> Formula {
    let a = Formula::tyvar("a");
    let aa = Formula::lolli(a.clone(), a);
    Formula::forall(
        "a",
        Formula::lolli(
            Formula::bang(aa.clone()),
            Formula::lolli(Formula::bang(aa.clone()), Formula::par(aa)),
        ),
    )
    .unwrap()
}

/// Tensor of the given components.
pub fn ty_tensor(components: &[Formula]) -> Formula {
    let g = Name::new("g");
    let arm = Formula::lolli_chain(components.iter().cloned(), Formula::tyvar(g.clone()));
    Formula::forall(g.clone(), Formula::lolli(arm, Formula::tyvar(g))).unwrap()
}

/// Elementary tensor; every component must be `$`-modal.
pub fn ty_etensor(components: &[Formula]) -> Formula {
    let g = Name::new("g");
    let arm = Formula::eager_chain(components.iter().cloned(), Formula::tyvar(g.clone()));
    Formula::forall(g.clone(), Formula::lolli(arm, Formula::tyvar(g))).unwrap()
}

/// Boolean space with `m` points.
pub fn ty_bool(m: usize) -> Formula {
    let a = Formula::tyvar("a");
    let tuple = ty_tensor(&vec![a.clone(); m]);
    Formula::forall("a", Formula::lolli(tuple, a)).unwrap()
}

/// List of `$`-modal elements: `forall a. !($A =o a -o a) -o $(a -o a)`.
pub fn ty_list(elem: &Formula) -> Formula {
    assert!(elem.as_par().is_some(), "list elements must be $-modal");
    let a = Formula::tyvar("a");
    let step = Formula::eager(
        elem.clone(),
        Formula::lolli(a.clone(), a.clone()),
    )
    .unwrap();
    Formula::forall("a", Formula::lolli(Formula::bang(step), Formula::par(Formula::lolli(a.clone(), a))))
        .unwrap()
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("term is not a canonical string numeral")]
    NotACanonicalString,
    #[error("term is not a canonical word numeral")]
    NotACanonicalWord,
}

// ---------------------------------------------------------------------------
// Strings
// ---------------------------------------------------------------------------

/// The Church string for `n`, with its typing derivation at the string type.
pub fn string_deriv(n: u64) -> Derivation {
    let alpha = Formula::tyvar("a");
    let aa = Formula::lolli(alpha.clone(), alpha.clone());
    let y = fresh("y");
    if n == 0 {
        let d = builders::lolli_i(builders::axiom(y.clone(), alpha).unwrap(), &y).unwrap();
        let d = builders::dollar_all_phi(d).unwrap();
        let f = fresh("f");
        let d = builders::lolli_i_bang_fake(d, &f, aa).unwrap();
        return builders::forall_i(d, "a").unwrap();
    }
    let copies: Vec<Name> = (0..n).map(|_| fresh("f")).collect();
    let mut body = builders::axiom(y.clone(), alpha.clone()).unwrap();
    for c in copies.iter().rev() {
        body = builders::app(builders::axiom(c.clone(), aa.clone()).unwrap(), body).unwrap();
    }
    let d = builders::lolli_i(body, &y).unwrap();
    let d = builders::dollar_all_phi(d).unwrap();
    let f = fresh("f");
    let d = if copies.len() == 1 {
        // single occurrence: the phi pair already carries it; rebind by name
        builders::lolli_i_bang(d, &copies[0]).unwrap()
    } else {
        let d = builders::contract_group(d, &copies, &f).unwrap();
        builders::lolli_i_bang(d, &f).unwrap()
    };
    builders::forall_i(d, "a").unwrap()
}

pub fn encode_string(n: u64) -> Term {
    string_deriv(n).subject().clone()
}

pub fn decode_string(t: &Term) -> Result<u64, CodecError> {
    let (f, body) = t.as_abs().ok_or(CodecError::NotACanonicalString)?;
    let (y, mut cur) = body.as_abs().ok_or(CodecError::NotACanonicalString)?;
    if f == y {
        return Err(CodecError::NotACanonicalString);
    }
    let mut n = 0u64;
    loop {
        if let Some(v) = cur.as_var() {
            if v == y {
                return Ok(n);
            }
            return Err(CodecError::NotACanonicalString);
        }
        let (fun, arg) = cur.as_app().ok_or(CodecError::NotACanonicalString)?;
        match fun.as_var() {
            Some(v) if v == f => {}
            _ => return Err(CodecError::NotACanonicalString),
        }
        n += 1;
        cur = arg;
    }
}

// ---------------------------------------------------------------------------
// Words
// ---------------------------------------------------------------------------

/// Least significant bit first, without the leading most significant 1.
fn low_bits(n: u64) -> Vec<u8> {
    assert!(n >= 1);
    let mut bits = Vec::new();
    let mut v = n;
    while v > 1 {
        bits.push((v & 1) as u8);
        v >>= 1;
    }
    bits
}

/// The word numeral for `n`, with its typing derivation at the word type.
pub fn word_deriv(n: u64) -> Derivation {
    let alpha = Formula::tyvar("a");
    let aa = Formula::lolli(alpha.clone(), alpha.clone());
    let y = fresh("y");
    let c0 = fresh("c0");
    let c1 = fresh("c1");
    if n == 0 {
        let d = builders::lolli_i(builders::axiom(y.clone(), alpha).unwrap(), &y).unwrap();
        let d = builders::dollar_all_phi(d).unwrap();
        let d = builders::lolli_i_bang_fake(d, &c1, aa.clone()).unwrap();
        let d = builders::lolli_i_bang_fake(d, &c0, aa).unwrap();
        return builders::forall_i(d, "a").unwrap();
    }
    // \c0 c1 y. v_{b0}( ... v_{b_{m-1}}( c1_top y ) ... ), least significant
    // digit outermost, a fresh copy per occurrence, contracted afterwards.
    let bits = low_bits(n);
    let top = fresh("c1");
    let mut zero_copies: Vec<Name> = Vec::new();
    let mut one_copies: Vec<Name> = vec![top.clone()];
    let mut body = builders::app(
        builders::axiom(top, aa.clone()).unwrap(),
        builders::axiom(y.clone(), alpha.clone()).unwrap(),
    )
    .unwrap();
    for b in bits.iter().rev() {
        let c = if *b == 0 { fresh("c0") } else { fresh("c1") };
        if *b == 0 {
            zero_copies.push(c.clone());
        } else {
            one_copies.push(c.clone());
        }
        body = builders::app(builders::axiom(c, aa.clone()).unwrap(), body).unwrap();
    }
    let d = builders::lolli_i(body, &y).unwrap();
    let mut d = builders::dollar_all_phi(d).unwrap();
    // gather the one-copies under c1
    d = if one_copies.len() == 1 {
        builders::lolli_i_bang(d, &one_copies[0]).unwrap()
    } else {
        let d = builders::contract_group(d, &one_copies, &c1).unwrap();
        builders::lolli_i_bang(d, &c1).unwrap()
    };
    d = match zero_copies.len() {
        0 => builders::lolli_i_bang_fake(d, &c0, aa).unwrap(),
        1 => builders::lolli_i_bang(d, &zero_copies[0]).unwrap(),
        _ => {
            let d = builders::contract_group(d, &zero_copies, &c0).unwrap();
            builders::lolli_i_bang(d, &c0).unwrap()
        }
    };
    builders::forall_i(d, "a").unwrap()
}

pub fn encode_word(n: u64) -> Term {
    word_deriv(n).subject().clone()
}

pub fn decode_word(t: &Term) -> Result<u64, CodecError> {
    let (z, rest) = t.as_abs().ok_or(CodecError::NotACanonicalWord)?;
    let (o, rest) = rest.as_abs().ok_or(CodecError::NotACanonicalWord)?;
    let (y, mut cur) = rest.as_abs().ok_or(CodecError::NotACanonicalWord)?;
    if z == o || z == y || o == y {
        return Err(CodecError::NotACanonicalWord);
    }
    let mut digits: Vec<u8> = Vec::new();
    loop {
        if let Some(v) = cur.as_var() {
            if v != y {
                return Err(CodecError::NotACanonicalWord);
            }
            break;
        }
        let (fun, arg) = cur.as_app().ok_or(CodecError::NotACanonicalWord)?;
        match fun.as_var() {
            Some(v) if v == z => digits.push(0),
            Some(v) if v == o => digits.push(1),
            _ => return Err(CodecError::NotACanonicalWord),
        }
        cur = arg;
    }
    if digits.is_empty() {
        return Ok(0);
    }
    // the innermost digit is the most significant one and must be 1
    if *digits.last().unwrap() != 1 {
        return Err(CodecError::NotACanonicalWord);
    }
    let mut n = 0u64;
    for (i, d) in digits.iter().enumerate() {
        n += (*d as u64) << i;
    }
    Ok(n)
}

// ---------------------------------------------------------------------------
// Tensors
// ---------------------------------------------------------------------------

/// `<M1, ..., Mm>` as `\z. z M1 ... Mm`, typed at the tensor of the items.
pub fn tensor_intro(items: Vec<Derivation>) -> Build {
    assert!(!items.is_empty());
    let g = Name::new("g");
    let tys: Vec<Formula> = items.iter().map(|d| d.ty().clone()).collect();
    let arm = Formula::lolli_chain(tys.iter().cloned(), Formula::tyvar(g.clone()));
    let z = fresh("z");
    let mut d = builders::axiom(z.clone(), arm)?;
    for item in items {
        d = builders::app(d, item)?;
    }
    let d = builders::lolli_i(d, &z)?;
    builders::forall_i(d, g)
}

/// `\<x1 ... xm>. M` as `\w. w (\x1 ... xm. M)`.
pub fn lam_tensor(body: Derivation, binders: &[(Name, Formula)]) -> Build {
    let result_ty = body.ty().clone();
    let mut inner = body;
    for (x, t) in binders.iter().rev() {
        inner = if inner.conclusion.gamma.contains(x) {
            builders::lolli_i(inner, x)?
        } else {
            builders::lolli_i_fake(inner, x, t.clone())?
        };
    }
    let tensor = ty_tensor(&binders.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>());
    let w = fresh("w");
    let wd = builders::forall_e(builders::axiom(w.clone(), tensor)?, result_ty)?;
    builders::lolli_i(builders::app(wd, inner)?, &w)
}

/// `<{M1, ..., Mm}>` as `\z. z M1 ... Mm`, typed at the elementary tensor.
pub fn etensor_intro(items: Vec<Derivation>) -> Build {
    assert!(!items.is_empty());
    let g = Name::new("g");
    let tys: Vec<Formula> = items.iter().map(|d| d.ty().clone()).collect();
    let arm = Formula::eager_chain(tys.iter().cloned(), Formula::tyvar(g.clone()));
    let z = fresh("z");
    let mut d = builders::axiom(z.clone(), arm)?;
    for item in items {
        d = builders::app(d, item)?;
    }
    let d = builders::lolli_i(d, &z)?;
    builders::forall_i(d, g)
}

/// `\<{x1 ... xm}>. M` as `\w. w (\x1 ... xm. M)`; the binder types are the
/// in-pair (unboxed) types, so the tensor components are their `$` forms.
pub fn lam_etensor(body: Derivation, binders: &[(Name, Formula)]) -> Build {
    let result_ty = body.ty().clone();
    let mut inner = body;
    for (x, t) in binders.iter().rev() {
        let have = inner
            .conclusion
            .e
            .empty_phi_pair()
            .map(|p| p.theta.contains(x))
            .unwrap_or(false);
        inner = if have {
            builders::eager_i(inner, x)?
        } else {
            builders::eager_i_fake(inner, x, t.clone())?
        };
    }
    let comps: Vec<Formula> =
        binders.iter().map(|(_, t)| Formula::par(t.clone())).collect();
    let tensor = ty_etensor(&comps);
    let w = fresh("w");
    let wd = builders::forall_e(builders::axiom(w.clone(), tensor)?, result_ty)?;
    builders::lolli_i(builders::app(wd, inner)?, &w)
}

/// `pi^m_i : B_m` — the boolean that projects component `i` of an `m`-tuple.
pub fn projection(m: usize, i: usize) -> Build {
    assert!(i < m, "projection index out of range");
    let a = Formula::tyvar("a");
    let xs: Vec<(Name, Formula)> = (0..m).map(|k| (fresh(&format!("x{k}")), a.clone())).collect();
    let body = builders::axiom(xs[i].0.clone(), a)?;
    let d = lam_tensor(body, &xs)?;
    builders::forall_i(d, "a")
}

// ---------------------------------------------------------------------------
// Lists of $-modal elements
// ---------------------------------------------------------------------------

/// `[M1, ..., Mm]` as `\c x. c M1 ( ... (c Mm x) ... )`; every element must
/// be a judgment with empty first and second zones and at most one all-theta
/// pair (eager argument shape).
pub fn list_intro(items: Vec<Derivation>, elem: &Formula) -> Result<Derivation, BuildError> {
    let alpha = Formula::tyvar("a");
    let step = Formula::eager(elem.clone(), Formula::lolli(alpha.clone(), alpha.clone())).unwrap();
    let x = fresh("x");
    let c = fresh("c");
    if items.is_empty() {
        let d = builders::lolli_i(builders::axiom(x.clone(), alpha)?, &x)?;
        let d = builders::dollar_all_phi(d)?;
        let d = builders::lolli_i_bang_fake(d, &c, step)?;
        return builders::forall_i(d, "a");
    }
    let copies: Vec<Name> = (0..items.len()).map(|_| fresh("c")).collect();
    let mut acc = builders::axiom(x.clone(), alpha.clone())?;
    for (ci, item) in copies.iter().zip(items).rev() {
        let head = builders::app(builders::axiom(ci.clone(), step.clone())?, item)?;
        acc = builders::app(head, acc)?;
    }
    let d = builders::lolli_i(acc, &x)?;
    let d = builders::dollar_all_phi(d)?;
    let d = if copies.len() == 1 {
        builders::lolli_i_bang(d, &copies[0])?
    } else {
        let d = builders::contract_group(d, &copies, &c)?;
        builders::lolli_i_bang(d, &c)?
    };
    builders::forall_i(d, "a")
}

/// Read back a list built by `list_intro`.
pub fn decode_list(t: &Term) -> Option<Vec<Term>> {
    let (c, rest) = t.as_abs()?;
    let (x, mut cur) = rest.as_abs()?;
    let mut items = Vec::new();
    loop {
        if let Some(v) = cur.as_var() {
            if v == x {
                return Some(items);
            }
            return None;
        }
        let (fun, tail) = cur.as_app()?;
        let (cf, item) = fun.as_app()?;
        if cf.as_var()? != c {
            return None;
        }
        items.push(item.clone());
        cur = tail;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    #[test]
    fn string_numerals() {
        assert_eq!(encode_string(0), parse_term("\\f y. y").unwrap());
        assert_eq!(encode_string(2), parse_term("\\f y. f (f y)").unwrap());
        for n in [0, 1, 2, 3, 7] {
            let d = string_deriv(n);
            let j = d.check().unwrap();
            assert_eq!(j.ty, ty_string());
            assert!(j.gamma.is_empty() && j.delta.is_empty() && j.e.is_empty());
            assert_eq!(decode_string(d.subject()).unwrap(), n);
        }
        assert_eq!(decode_string(&parse_term("\\f y. y f").unwrap()), Err(CodecError::NotACanonicalString));
    }

    #[test]
    fn word_numerals() {
        assert_eq!(encode_word(0), parse_term("\\a b y. y").unwrap());
        assert_eq!(encode_word(1), parse_term("\\a b y. b y").unwrap());
        assert_eq!(encode_word(5), parse_term("\\a b y. b (a (b y))").unwrap());
        for n in [0, 1, 2, 3, 5, 12, 64] {
            let d = word_deriv(n);
            let j = d.check().unwrap();
            assert_eq!(j.ty, ty_word());
            assert!(j.gamma.is_empty() && j.delta.is_empty() && j.e.is_empty());
            assert_eq!(decode_word(d.subject()).unwrap(), n);
        }
        // leading zero before the top one is not canonical
        assert_eq!(
            decode_word(&parse_term("\\a b y. b (a y)").unwrap()),
            Err(CodecError::NotACanonicalWord)
        );
    }

    #[test]
    fn projections_check() {
        for (m, i) in [(2, 0), (2, 1), (3, 2)] {
            let d = projection(m, i).unwrap();
            let j = d.check().unwrap();
            assert_eq!(j.ty, ty_bool(m));
        }
    }

    #[test]
    fn tensors_check() {
        let items = vec![string_deriv(1), string_deriv(2)];
        let d = tensor_intro(items).unwrap();
        let j = d.check().unwrap();
        assert_eq!(j.ty, ty_tensor(&[ty_string(), ty_string()]));
    }

    #[test]
    fn lists_check() {
        let elem = Formula::par(ty_word());
        let items: Vec<Derivation> = [3u64, 1, 4]
            .iter()
            .map(|n| builders::dollar_all_phi(word_deriv(*n)).unwrap())
            .collect();
        let d = list_intro(items, &elem).unwrap();
        let j = d.check().unwrap();
        assert_eq!(j.ty, ty_list(&elem));
        let got = decode_list(d.subject()).unwrap();
        assert_eq!(got.len(), 3);
        assert_eq!(decode_word(&got[0]).unwrap(), 3);
        let empty = list_intro(vec![], &elem).unwrap();
        empty.check().unwrap();
        assert_eq!(decode_list(empty.subject()).unwrap().len(), 0);
    }
}
