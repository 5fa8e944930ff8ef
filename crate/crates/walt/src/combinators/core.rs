//! Combinators over strings and words, the three embeddings, coercions,
//! diagonals, and the recasting combinators.

use crate::builders::{self, Build, DollarSplit};
use crate::data::{self, ty_bool, ty_etensor, ty_string, ty_tensor, ty_word};
use crate::derivation::Derivation;
use crate::formula::Formula;
use crate::term::Name;

use super::{eager_use, fr};

fn tv(s: &str) -> Formula {
    Formula::tyvar(s)
}

fn arrow_self(a: &Formula) -> Formula {
    Formula::lolli(a.clone(), a.clone())
}

/// `Ss = \n f. (\z x. f (z x)) (n f) : N -o N` — successor on strings.
pub fn ss() -> Build {
    let a = tv("a");
    let aa = arrow_self(&a);
    let n = fr("n");
    let f = fr("f");
    let f1 = fr("f");
    let f2 = fr("f");
    let n_inst = builders::forall_e(builders::axiom(n.clone(), ty_string())?, a.clone())?;
    let fold = builders::app(n_inst, builders::phi_var(f2.clone(), aa.clone())?)?;
    let x = fr("x");
    let z = fr("z");
    let body = builders::app(
        builders::axiom(f1.clone(), aa.clone())?,
        builders::app(builders::axiom(z.clone(), aa.clone())?, builders::axiom(x.clone(), a)?)?,
    )?;
    let inner = builders::lolli_i(body, &x)?;
    let inner = builders::dollar(inner, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, fold)?;
    let d = builders::contract(d, &f1, &f2, &f)?;
    let d = builders::lolli_i_bang(d, &f)?;
    let d = builders::forall_i(d, "a")?;
    builders::lolli_i(d, &n)
}

/// `Ws1 = \n c0 c1. (\z y. c1 (z y)) (n c0 c1) : W -o W`.
pub fn ws1() -> Build {
    let a = tv("a");
    let aa = arrow_self(&a);
    let n = fr("n");
    let c0 = fr("c0");
    let c1 = fr("c1");
    let u1 = fr("c1");
    let u2 = fr("c1");
    let n_inst = builders::forall_e(builders::axiom(n.clone(), ty_word())?, a.clone())?;
    let fold = builders::app(
        builders::app(n_inst, builders::phi_var(c0.clone(), aa.clone())?)?,
        builders::phi_var(u2.clone(), aa.clone())?,
    )?;
    let y = fr("y");
    let z = fr("z");
    let body = builders::app(
        builders::axiom(u1.clone(), aa.clone())?,
        builders::app(builders::axiom(z.clone(), aa.clone())?, builders::axiom(y.clone(), a)?)?,
    )?;
    let inner = builders::lolli_i(body, &y)?;
    let inner = builders::dollar(inner, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, fold)?;
    let d = builders::contract(d, &u1, &u2, &c1)?;
    let d = builders::lolli_i_bang(d, &c1)?;
    let d = builders::lolli_i_bang(d, &c0)?;
    let d = builders::forall_i(d, "a")?;
    builders::lolli_i(d, &n)
}

/// Type of a suspended tape piece: `(b -o b) -o a`. The rebuild combinators
/// store open application chains behind these thunks so every substituted
/// argument is a value; forcing applies the identity.
fn thunk_ty() -> Formula {
    Formula::lolli(arrow_self(&tv("b")), tv("a"))
}

/// Suspend a derivation of an `a`-typed body under a fake thunk binder.
fn suspend(body: Derivation) -> Build {
    let f = fr("f");
    builders::lolli_i_fake(body, &f, arrow_self(&tv("b")))
}

/// Force a thunk variable.
fn force(x: &Name) -> Build {
    builders::app(builders::axiom(x.clone(), thunk_ty())?, builders::identity(tv("b"))?)
}

/// `BMkC = \y. <pi20, \f. y> : a -o (B2 @ ((b -o b) -o a))`.
pub fn bmkc() -> Build {
    let a = tv("a");
    let y = fr("y");
    let pair = data::tensor_intro(vec![
        data::projection(2, 0)?,
        suspend(builders::axiom(y.clone(), a)?)?,
    ])?;
    builders::lolli_i(pair, &y)
}

/// `SMkC0 : !(a -o a) -o !((B2 @ a) -o (B2 @ a))` — step for the zero digit
/// of the canonical-form rebuilder.
pub fn smkc0() -> Build {
    let a = tv("a");
    let aa = arrow_self(&a);
    let b2 = ty_bool(2);
    let x = fr("x");
    let p = fr("p");
    let r = fr("r");
    let p1 = fr("p1");
    let p2 = fr("p2");
    // \f. p2 <I, x> (r I) : (b -o b) -o a
    let sel = builders::app(
        builders::app(
            builders::forall_e(builders::axiom(p2.clone(), b2.clone())?, aa.clone())?,
            data::tensor_intro(vec![
                builders::identity(a.clone())?,
                builders::axiom(x.clone(), aa.clone())?,
            ])?,
        )?,
        force(&r)?,
    )?;
    let body = data::tensor_intro(vec![builders::axiom(p1.clone(), b2.clone())?, suspend(sel)?])?;
    let inner_lam = data::lam_tensor(body, &[(p1, b2.clone()), (p2, b2.clone())])?;
    // p <<pi0,pi0>, <pi1,pi1>> : B2 @ B2
    let b2b2 = ty_tensor(&[b2.clone(), b2.clone()]);
    let table = data::tensor_intro(vec![
        data::tensor_intro(vec![data::projection(2, 0)?, data::projection(2, 0)?])?,
        data::tensor_intro(vec![data::projection(2, 1)?, data::projection(2, 1)?])?,
    ])?;
    let pt = builders::app(
        builders::forall_e(builders::axiom(p.clone(), b2.clone())?, b2b2)?,
        table,
    )?;
    let applied = builders::app(inner_lam, pt)?;
    let inner = data::lam_tensor(applied, &[(p, b2), (r, thunk_ty())])?;
    let inner = builders::bang(inner, Some(&x))?;
    builders::lolli_i_bang(inner, &x)
}

/// `SMkC1 = \x. \<p r>. <pi21, \f. x (r I)>`.
pub fn smkc1() -> Build {
    let aa = arrow_self(&tv("a"));
    let b2 = ty_bool(2);
    let x = fr("x");
    let p = fr("p");
    let r = fr("r");
    let body = data::tensor_intro(vec![
        data::projection(2, 1)?,
        suspend(builders::app(builders::axiom(x.clone(), aa)?, force(&r)?)?)?,
    ])?;
    let inner = data::lam_tensor(body, &[(p, b2), (r, thunk_ty())])?;
    let inner = builders::bang(inner, Some(&x))?;
    builders::lolli_i_bang(inner, &x)
}

/// `MkC : W -o W` — erases the zeros above the most significant one.
pub fn mkc() -> Build {
    let a = tv("a");
    let aa = arrow_self(&a);
    let b2 = ty_bool(2);
    let pair_ty = ty_tensor(&[b2.clone(), thunk_ty()]);
    let n = fr("n");
    let c0 = fr("c0");
    let c1 = fr("c1");
    let n_inst = builders::forall_e(builders::axiom(n.clone(), ty_word())?, pair_ty.clone())?;
    let arg0 = builders::app(smkc0()?, builders::phi_var(c0.clone(), aa.clone())?)?;
    let arg1 = builders::app(smkc1()?, builders::phi_var(c1.clone(), aa.clone())?)?;
    let fold = builders::app(builders::app(n_inst, arg0)?, arg1)?;
    // \z y. (\<x y'>. y' I)(z (BMkC y))
    let z = fr("z");
    let y = fr("y");
    let x = fr("x");
    let y2 = fr("y'");
    let snd = data::lam_tensor(force(&y2)?, &[(x, b2), (y2.clone(), thunk_ty())])?;
    let zy = builders::app(
        builders::axiom(z.clone(), Formula::lolli(pair_ty.clone(), pair_ty.clone()))?,
        builders::app(bmkc()?, builders::axiom(y.clone(), a.clone())?)?,
    )?;
    let body = builders::app(snd, zy)?;
    let inner = builders::lolli_i(body, &y)?;
    let inner = builders::dollar(inner, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, fold)?;
    let d = builders::lolli_i_bang(d, &c1)?;
    let d = builders::lolli_i_bang(d, &c0)?;
    let d = builders::forall_i(d, "a")?;
    builders::lolli_i(d, &n)
}

/// `Ws0 = \n. MkC (\c0 c1. (\z y. c0 (z y)) (n c0 c1)) : W -o W`.
pub fn ws0() -> Build {
    let a = tv("a");
    let aa = arrow_self(&a);
    let n = fr("n");
    let c0 = fr("c0");
    let c1 = fr("c1");
    let u1 = fr("c0");
    let u2 = fr("c0");
    let n_inst = builders::forall_e(builders::axiom(n.clone(), ty_word())?, a.clone())?;
    let fold = builders::app(
        builders::app(n_inst, builders::phi_var(u2.clone(), aa.clone())?)?,
        builders::phi_var(c1.clone(), aa.clone())?,
    )?;
    let y = fr("y");
    let z = fr("z");
    let body = builders::app(
        builders::axiom(u1.clone(), aa.clone())?,
        builders::app(builders::axiom(z.clone(), aa.clone())?, builders::axiom(y.clone(), a)?)?,
    )?;
    let inner = builders::lolli_i(body, &y)?;
    let inner = builders::dollar(inner, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, fold)?;
    let d = builders::contract(d, &u1, &u2, &c0)?;
    let d = builders::lolli_i_bang(d, &c1)?;
    let d = builders::lolli_i_bang(d, &c0)?;
    let d = builders::forall_i(d, "a")?;
    let d = builders::app(mkc()?, d)?;
    builders::lolli_i(d, &n)
}

/// `StepP = \x. \<u v>. <x, \f. u (v I)>` — the pair carries the rebuilt
/// tail behind a thunk so the components stay values.
pub fn step_p() -> Build {
    let a = tv("a");
    let aa = arrow_self(&a);
    let x = fr("x");
    let u = fr("u");
    let v = fr("v");
    let tail = builders::app(builders::axiom(u.clone(), aa.clone())?, force(&v)?)?;
    let body = data::tensor_intro(vec![builders::axiom(x.clone(), aa.clone())?, suspend(tail)?])?;
    let d = data::lam_tensor(body, &[(u, aa.clone()), (v, thunk_ty())])?;
    builders::lolli_i(d, &x)
}

/// `BaseP = \x. <\x'. x', \f. x> : a -o ((a -o a) @ ((b -o b) -o a))`.
pub fn base_p() -> Build {
    let a = tv("a");
    let x = fr("x");
    let d = data::tensor_intro(vec![
        builders::identity(a.clone())?,
        suspend(builders::axiom(x.clone(), a)?)?,
    ])?;
    builders::lolli_i(d, &x)
}

/// `P : W -o W` — the predecessor on words (drops the least significant bit).
pub fn pred_w() -> Build {
    let a = tv("a");
    let aa = arrow_self(&a);
    let pair_ty = ty_tensor(&[aa.clone(), thunk_ty()]);
    let n = fr("n");
    let v0 = fr("c0");
    let v1 = fr("c1");
    let n_inst = builders::forall_e(builders::axiom(n.clone(), ty_word())?, pair_ty.clone())?;
    let arg0 = builders::bang(
        builders::app(step_p()?, builders::axiom(v0.clone(), aa.clone())?)?,
        Some(&v0),
    )?;
    let arg1 = builders::bang(
        builders::app(step_p()?, builders::axiom(v1.clone(), aa.clone())?)?,
        Some(&v1),
    )?;
    let fold = builders::app(builders::app(n_inst, arg0)?, arg1)?;
    // \z y. (\<x0 x1>. x1 I) (z (BaseP y))
    let z = fr("z");
    let y = fr("y");
    let x0 = fr("x0");
    let x1 = fr("x1");
    let snd = data::lam_tensor(force(&x1)?, &[(x0, aa.clone()), (x1.clone(), thunk_ty())])?;
    let zy = builders::app(
        builders::axiom(z.clone(), Formula::lolli(pair_ty.clone(), pair_ty))?,
        builders::app(base_p()?, builders::axiom(y.clone(), a.clone())?)?,
    )?;
    let body = builders::app(snd, zy)?;
    let inner = builders::lolli_i(body, &y)?;
    let inner = builders::dollar(inner, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, fold)?;
    let d = builders::lolli_i_bang(d, &v1)?;
    let d = builders::lolli_i_bang(d, &v0)?;
    let d = builders::forall_i(d, "a")?;
    builders::lolli_i(d, &n)
}

/// `B : W -o W -o W -o W` — zero test choosing between two words.
pub fn branch_w() -> Build {
    let a = tv("a");
    let aa = arrow_self(&a);
    let b2 = ty_bool(2);
    let b2b2 = Formula::lolli(b2.clone(), b2.clone());
    let n = fr("n");
    let av = fr("p");
    let bv = fr("q");
    let c0 = fr("c0");
    let c1 = fr("c1");
    let a0 = fr("c0");
    let a1 = fr("c1");
    let b0 = fr("c0");
    let b1 = fr("c1");
    // n (\x. pi21) (\x. pi21) : $(B2 -o B2)
    let discard = |x: Name| -> Build {
        let d = builders::lolli_i_fake(data::projection(2, 1)?, &x, b2.clone())?;
        builders::bang(d, None)
    };
    let n_inst = builders::forall_e(builders::axiom(n.clone(), ty_word())?, b2.clone())?;
    let w_fold = builders::app(builders::app(n_inst, discard(fr("x"))?)?, discard(fr("x"))?)?;
    // a c0 c1 and b c0 c1
    let a_inst = builders::forall_e(builders::axiom(av.clone(), ty_word())?, a.clone())?;
    let a_fold = builders::app(
        builders::app(a_inst, builders::phi_var(a0.clone(), aa.clone())?)?,
        builders::phi_var(a1.clone(), aa.clone())?,
    )?;
    let b_inst = builders::forall_e(builders::axiom(bv.clone(), ty_word())?, a.clone())?;
    let b_fold = builders::app(
        builders::app(b_inst, builders::phi_var(b0.clone(), aa.clone())?)?,
        builders::phi_var(b1.clone(), aa.clone())?,
    )?;
    // \w z1 z2. w pi20 <z1, z2>
    let w = fr("w");
    let z1 = fr("z1");
    let z2 = fr("z2");
    let sel = builders::app(
        builders::forall_e(
            builders::app(builders::axiom(w.clone(), b2b2)?, data::projection(2, 0)?)?,
            aa.clone(),
        )?,
        data::tensor_intro(vec![
            builders::axiom(z1.clone(), aa.clone())?,
            builders::axiom(z2.clone(), aa.clone())?,
        ])?,
    )?;
    let inner = builders::dollar(
        sel,
        &DollarSplit { to_delta: vec![w.clone(), z1.clone(), z2.clone()], to_theta: vec![] },
    )?;
    let inner = builders::lolli_i_dollar(inner, &z2)?;
    let inner = builders::lolli_i_dollar(inner, &z1)?;
    let inner = builders::lolli_i_dollar(inner, &w)?;
    let d = builders::app(builders::app(builders::app(inner, w_fold)?, a_fold)?, b_fold)?;
    let d = builders::contract(d, &a0, &b0, &c0)?;
    let d = builders::contract(d, &a1, &b1, &c1)?;
    let d = builders::lolli_i_bang(d, &c1)?;
    let d = builders::lolli_i_bang(d, &c0)?;
    let d = builders::forall_i(d, "a")?;
    let d = builders::lolli_i(d, &bv)?;
    let d = builders::lolli_i(d, &av)?;
    builders::lolli_i(d, &n)
}

// ---------------------------------------------------------------------------
// Embeddings, coercion, diagonals, recasting
// ---------------------------------------------------------------------------

/// `[M]^n_B = \x. M x : $^n L =o $^{m+n} A` from a closed `M : L -o $^m A`.
pub fn basic_embed(m: Derivation, n: usize) -> Build {
    assert!(n >= 1);
    let (left, _) = m
        .ty()
        .as_lolli()
        .map(|(l, r)| (l.clone(), r.clone()))
        .expect("basic_embed needs an arrow");
    let x = fr("x");
    let mut d = builders::app(m, builders::axiom(x.clone(), left)?)?;
    d = builders::dollar(d, &DollarSplit { to_delta: vec![], to_theta: vec![x.clone()] })?;
    for _ in 1..n {
        d = builders::dollar_all_theta(d)?;
    }
    builders::eager_i(d, &x)
}

/// `[M]^n_{p;L} = \x1 ... xp. M x1 ... xp : (-o $^n Li) -o $^{m+n} A` from a
/// closed `M : (-o Li) -o $^m A`.
pub fn linear_embed(m: Derivation, n: usize, p: usize) -> Build {
    let mut arg_tys = Vec::new();
    let mut cur = m.ty().clone();
    for _ in 0..p {
        let (l, r) = cur.as_lolli().map(|(l, r)| (l.clone(), r.clone())).expect("arity too big");
        arg_tys.push(l);
        cur = r;
    }
    let xs: Vec<Name> = (0..p).map(|_| fr("x")).collect();
    let mut d = m;
    for (x, t) in xs.iter().zip(&arg_tys) {
        d = builders::app(d, builders::axiom(x.clone(), t.clone())?)?;
    }
    if n >= 1 {
        d = builders::dollar(d, &DollarSplit { to_delta: xs.clone(), to_theta: vec![] })?;
        for _ in 1..n {
            d = builders::dollar(d, &DollarSplit::default())?;
        }
    }
    for x in xs.iter().rev() {
        d = if n >= 1 { builders::lolli_i_dollar(d, x)? } else { builders::lolli_i(d, x)? };
    }
    Ok(d)
}

/// `[M]^n_{0,q;E} = \z1 ... zq. M z1 ... zq` with the body under `n` boxes:
/// lifts a closed all-eager interface by `n` modalities on every argument
/// and on the result.
pub fn eager_embed0(m: Derivation, n: usize, q: usize) -> Build {
    let mut arg_tys = Vec::new();
    let mut cur = m.ty().clone();
    for _ in 0..q {
        let (l, r) = cur.as_eager().map(|(l, r)| (l.clone(), r.clone())).expect("arity too big");
        arg_tys.push(l);
        cur = r;
    }
    let zs: Vec<Name> = (0..q).map(|_| fr("z")).collect();
    let mut d = m;
    for (z, t) in zs.iter().zip(&arg_tys) {
        d = builders::app(d, eager_use(z.clone(), t)?)?;
    }
    for _ in 0..n {
        d = builders::dollar_all_theta(d)?;
    }
    for z in zs.iter().rev() {
        d = builders::eager_i(d, z)?;
    }
    Ok(d)
}

/// `Coerce : W -o $W` — rebuilds a word inside one box.
pub fn coerce1() -> Build {
    let w = ty_word();
    let ww = arrow_self(&w);
    let n = fr("n");
    let n_inst = builders::forall_e(builders::axiom(n.clone(), w.clone())?, w.clone())?;
    let fold = builders::app(
        builders::app(n_inst, builders::bang(ws0()?, None)?)?,
        builders::bang(ws1()?, None)?,
    )?;
    let z = fr("z");
    let body = builders::app(builders::axiom(z.clone(), ww)?, data::word_deriv(0))?;
    let inner = builders::dollar(body, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, fold)?;
    builders::lolli_i(d, &n)
}

/// `Coerce^m : W -o $^m W` for any `m >= 0`.
pub fn coerce(m: usize) -> Build {
    match m {
        0 => builders::identity(ty_word()),
        1 => coerce1(),
        _ => {
            let x = fr("x");
            let cx = builders::app(coerce1()?, builders::axiom(x.clone(), ty_word())?)?;
            let lifted = linear_embed(coerce(m - 1)?, 1, 1)?;
            let d = builders::app(lifted, cx)?;
            builders::lolli_i(d, &x)
        }
    }
}

/// `Diag_n : W -o $(W @ ... @ W)` — n copies inside one box.
pub fn diag(n: usize) -> Build {
    assert!(n >= 1);
    let w = ty_word();
    let tuple = ty_tensor(&vec![w.clone(); n]);
    let wv = fr("w");
    let w_inst = builders::forall_e(builders::axiom(wv.clone(), w.clone())?, tuple.clone())?;
    let step = |s: Derivation| -> Build {
        let xs: Vec<(Name, Formula)> = (0..n).map(|_| (fr("x"), w.clone())).collect();
        let mut items = Vec::new();
        for (x, t) in &xs {
            items.push(builders::app(s.clone(), builders::axiom(x.clone(), t.clone())?)?);
        }
        data::lam_tensor(data::tensor_intro(items)?, &xs)
    };
    let fold = builders::app(
        builders::app(w_inst, builders::bang(step(ws0()?)?, None)?)?,
        builders::bang(step(ws1()?)?, None)?,
    )?;
    let z = fr("z");
    let base = data::tensor_intro((0..n).map(|_| data::word_deriv(0)).collect())?;
    let body = builders::app(builders::axiom(z.clone(), arrow_self(&tuple))?, base)?;
    let inner = builders::dollar(body, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, fold)?;
    builders::lolli_i(d, &wv)
}

/// `Diag^m_n : W -o $(o ... o)` with `n` elementary components `$^m W`.
pub fn diag_e(m: usize, n: usize) -> Build {
    assert!(m >= 1 && n >= 1);
    let w = ty_word();
    let comp = Formula::par_n(m, w.clone());
    let tuple = ty_etensor(&vec![comp.clone(); n]);
    let wv = fr("w");
    let w_inst = builders::forall_e(builders::axiom(wv.clone(), w.clone())?, tuple.clone())?;
    let inner_comp = Formula::par_n(m - 1, w.clone());
    let step = |s: Derivation| -> Build {
        let xs: Vec<(Name, Formula)> = (0..n).map(|_| (fr("x"), inner_comp.clone())).collect();
        let mut items = Vec::new();
        for (x, _) in &xs {
            items.push(builders::app(basic_embed(s.clone(), m)?, eager_use(x.clone(), &comp)?)?);
        }
        data::lam_etensor(data::etensor_intro(items)?, &xs)
    };
    let fold = builders::app(
        builders::app(w_inst, builders::bang(step(ws0()?)?, None)?)?,
        builders::bang(step(ws1()?)?, None)?,
    )?;
    let z = fr("z");
    let base = data::etensor_intro(
        (0..n)
            .map(|_| {
                let mut d = data::word_deriv(0);
                for _ in 0..m {
                    d = builders::dollar_all_theta(d).unwrap();
                }
                d
            })
            .collect(),
    )?;
    let body = builders::app(builders::axiom(z.clone(), arrow_self(&tuple))?, base)?;
    let inner = builders::dollar(body, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, fold)?;
    builders::lolli_i(d, &wv)
}

/// `W2S = \n f. (\z y. z y) (n f f) : W -o N` — word length as a string.
pub fn w2s() -> Build {
    let a = tv("a");
    let aa = arrow_self(&a);
    let n = fr("n");
    let f = fr("f");
    let n_inst = builders::forall_e(builders::axiom(n.clone(), ty_word())?, a.clone())?;
    let fold = builders::app(
        builders::app(n_inst, builders::phi_var(f.clone(), aa.clone())?)?,
        builders::phi_var(f.clone(), aa.clone())?,
    )?;
    let z = fr("z");
    let y = fr("y");
    let body = builders::app(builders::axiom(z.clone(), aa.clone())?, builders::axiom(y.clone(), a)?)?;
    let inner = builders::lolli_i(body, &y)?;
    let inner = builders::dollar(inner, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, fold)?;
    let d = builders::lolli_i_bang(d, &f)?;
    let d = builders::forall_i(d, "a")?;
    builders::lolli_i(d, &n)
}

/// `S2L : $$A =o N -o L $A` — a list of copies of a closed eager value,
/// as long as the given string.
pub fn s2l(elem: &Formula) -> Build {
    let inner = elem.as_par().expect("list elements are $-modal").clone();
    let a = tv("a");
    let aa = arrow_self(&a);
    let step_ty = Formula::eager(elem.clone(), aa.clone()).unwrap();
    let b = tv("b");
    let bb = arrow_self(&b);
    let thunk = Formula::lolli(bb.clone(), a.clone());
    let k = fr("k");
    let n = fr("n");
    let c = fr("c");
    // F = \l f'. c k (l I) : ((b -o b) -o a) -o ((b -o b) -o a)  [needs a := thunk target]
    let l = fr("l");
    let f2 = fr("f'");
    let ck = builders::app(builders::axiom(c.clone(), step_ty.clone())?, eager_use(k.clone(), elem)?)?;
    let li = builders::app(builders::axiom(l.clone(), thunk.clone())?, builders::identity(b.clone())?)?;
    let body = builders::app(ck, li)?;
    let f_lam = builders::lolli_i_fake(body, &f2, bb.clone())?;
    let f_lam = builders::lolli_i(f_lam, &l)?;
    let f_boxed = builders::bang(f_lam, Some(&c))?;
    // n F : $(thunk -o thunk)
    let n_inst = builders::forall_e(builders::axiom(n.clone(), ty_string())?, thunk.clone())?;
    let fold = builders::app(n_inst, f_boxed)?;
    // \z x. z (\f. x) I
    let z = fr("z");
    let x = fr("x");
    let f3 = fr("f");
    let thunk_val = builders::lolli_i_fake(builders::axiom(x.clone(), a.clone())?, &f3, bb.clone())?;
    let zappl = builders::app(
        builders::app(builders::axiom(z.clone(), arrow_self(&thunk))?, thunk_val)?,
        builders::identity(b)?,
    )?;
    let inner_lam = builders::lolli_i(zappl, &x)?;
    let inner_lam =
        builders::dollar(inner_lam, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner_lam = builders::lolli_i_dollar(inner_lam, &z)?;
    let d = builders::app(inner_lam, fold)?;
    let d = builders::lolli_i_bang(d, &c)?;
    let d = builders::forall_i(d, "a")?;
    let d = builders::lolli_i(d, &n)?;
    let _ = inner;
    builders::eager_i(d, &k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{decode_word, encode_word, ty_list};
    use crate::formula::parse_formula;
    use crate::reduction::nf;
    use crate::term::Term;

    fn check_ty(d: &Derivation, expect: &str) {
        let j = d.check().unwrap();
        assert!(j.gamma.is_empty() && j.delta.is_empty() && j.e.is_empty(), "not closed: {j}");
        assert_eq!(j.ty, parse_formula(expect).unwrap(), "got {}", j.ty);
    }

    const W: &str = "forall a. !(a -o a) -o !(a -o a) -o $(a -o a)";
    const N: &str = "forall a. !(a -o a) -o $(a -o a)";

    #[test]
    fn string_successor() {
        let d = ss().unwrap();
        check_ty(&d, &format!("({N}) -o {N}"));
        for n in [0u64, 1, 4] {
            let out = nf(&Term::app(d.subject().clone(), data::encode_string(n)));
            assert_eq!(crate::data::decode_string(&out).unwrap(), n + 1);
        }
    }

    #[test]
    fn word_successors_type_and_run() {
        let d1 = ws1().unwrap();
        check_ty(&d1, &format!("({W}) -o {W}"));
        let d0 = ws0().unwrap();
        check_ty(&d0, &format!("({W}) -o {W}"));
        for n in [0u64, 1, 3, 6] {
            let s1 = nf(&Term::app(d1.subject().clone(), encode_word(n)));
            assert_eq!(decode_word(&s1).unwrap(), 2 * n + 1);
            let s0 = nf(&Term::app(d0.subject().clone(), encode_word(n)));
            assert_eq!(decode_word(&s0).unwrap(), 2 * n);
        }
    }

    #[test]
    fn mkc_and_helpers_type() {
        bmkc().unwrap().check().unwrap();
        smkc0().unwrap().check().unwrap();
        smkc1().unwrap().check().unwrap();
        let d = mkc().unwrap();
        check_ty(&d, &format!("({W}) -o {W}"));
        // canonicalization: erase zeros above the most significant bit
        let raw = crate::term::parse_term("\\a b y. b (a y)").unwrap(); // 2 with junk zero
        let out = nf(&Term::app(d.subject().clone(), raw));
        assert_eq!(decode_word(&out).unwrap(), 1);
    }

    #[test]
    fn word_predecessor() {
        let d = pred_w().unwrap();
        check_ty(&d, &format!("({W}) -o {W}"));
        for n in [0u64, 1, 2, 3, 6, 7, 12] {
            let out = nf(&Term::app(d.subject().clone(), encode_word(n)));
            assert_eq!(decode_word(&out).unwrap(), n / 2, "pred of {n}");
        }
    }

    #[test]
    fn word_branch() {
        let d = branch_w().unwrap();
        check_ty(&d, &format!("({W}) -o ({W}) -o ({W}) -o {W}"));
        let run = |n: u64| {
            let t = Term::apps(
                d.subject().clone(),
                [encode_word(n), encode_word(4), encode_word(7)],
            );
            decode_word(&nf(&t)).unwrap()
        };
        assert_eq!(run(0), 4);
        assert_eq!(run(1), 7);
        assert_eq!(run(6), 7);
    }

    #[test]
    fn embeddings_and_coercion() {
        let c2 = coerce(2).unwrap();
        check_ty(&c2, &format!("({W}) -o $$({W})"));
        let c3 = coerce(3).unwrap();
        for n in [0u64, 5, 9] {
            let out = nf(&Term::app(c3.subject().clone(), encode_word(n)));
            assert_eq!(decode_word(&out).unwrap(), n);
        }
        let be = basic_embed(ws1().unwrap(), 1).unwrap();
        check_ty(&be, &format!("$({W}) =o $({W})"));
        let out = nf(&Term::app(be.subject().clone(), encode_word(3)));
        assert_eq!(decode_word(&out).unwrap(), 7);
        let le = linear_embed(coerce1().unwrap(), 1, 1).unwrap();
        check_ty(&le, &format!("$({W}) -o $$({W})"));
    }

    #[test]
    fn diagonals() {
        let d = diag(2).unwrap();
        d.check().unwrap();
        let out = nf(&Term::app(d.subject().clone(), encode_word(5)));
        // expect <B5, B5> = \z. z B5 B5
        let (z, body) = out.as_abs().unwrap();
        let (f, a2) = body.as_app().unwrap();
        let (zv, a1) = f.as_app().unwrap();
        assert_eq!(zv.as_var().unwrap(), z);
        assert_eq!(decode_word(a1).unwrap(), 5);
        assert_eq!(decode_word(a2).unwrap(), 5);

        let de = diag_e(1, 2).unwrap();
        de.check().unwrap();
        let out = nf(&Term::app(de.subject().clone(), encode_word(3)));
        let (_, body) = out.as_abs().unwrap();
        let (f, a2) = body.as_app().unwrap();
        let (_, a1) = f.as_app().unwrap();
        assert_eq!(decode_word(a1).unwrap(), 3);
        assert_eq!(decode_word(a2).unwrap(), 3);
    }

    #[test]
    fn recasting() {
        let d = w2s().unwrap();
        check_ty(&d, &format!("({W}) -o {N}"));
        let out = nf(&Term::app(d.subject().clone(), encode_word(0)));
        assert_eq!(crate::data::decode_string(&out).unwrap(), 0);
        let out = nf(&Term::app(d.subject().clone(), encode_word(5)));
        assert_eq!(crate::data::decode_string(&out).unwrap(), 3);

        let elem = Formula::par(ty_word());
        let d = s2l(&elem).unwrap();
        let j = d.check().unwrap();
        assert_eq!(
            j.ty,
            Formula::eager(
                Formula::par(elem.clone()),
                Formula::lolli(ty_string(), ty_list(&elem))
            )
            .unwrap()
        );
        let t = Term::apps(d.subject().clone(), [encode_word(9), data::encode_string(3)]);
        let out = nf(&t);
        let items = data::decode_list(&out).unwrap();
        assert_eq!(items.len(), 3);
        for it in items {
            assert_eq!(decode_word(&nf(&it)).unwrap(), 9);
        }
    }
}
