//! Tape encoding and the machine term: border-marked symbol lists, the
//! look-up table over (left symbol, state, head symbol), the transition map,
//! and the full machine combining clock and transition.
//!
//! The tape sides are folds of the configuration's cons variable over
//! symbols, with thunked tails. A transition pops one symbol from each side,
//! selects a triple of (left rebuild, next state, right rebuild) moves from
//! the table, and applies the moves to the remaining sides.

use crate::builders::{self, Build, DollarSplit};
use crate::combinators::fr;
use crate::data::{self, projection, ty_bool, ty_tensor};
use crate::derivation::Derivation;
use crate::formula::Formula;
use crate::term::{Name, Term};

use super::types::{Move, TMSpec};

fn tv(s: &str) -> Formula {
    Formula::tyvar(s)
}

fn arrow_self(a: &Formula) -> Formula {
    Formula::lolli(a.clone(), a.clone())
}

/// Width of the symbol space: the alphabet plus both borders.
fn symwidth(spec: &TMSpec) -> usize {
    spec.alphabet.len() + 2
}

fn bot(_spec: &TMSpec) -> usize {
    0
}

fn top(spec: &TMSpec) -> usize {
    symwidth(spec) - 1
}

/// `Sigma` — the boolean space over symbols and borders.
pub fn ty_sym(spec: &TMSpec) -> Formula {
    ty_bool(symwidth(spec))
}

/// `S` — the boolean space over states.
pub fn ty_state(spec: &TMSpec) -> Formula {
    ty_bool(spec.states.len())
}

/// Symbol term: projection at the encoded index (0 = left border,
/// `1..=|alphabet|` = symbols, last = right border).
pub fn sym_deriv(spec: &TMSpec, i: usize) -> Derivation {
    projection(symwidth(spec), i).unwrap()
}

pub fn state_deriv(spec: &TMSpec, s: usize) -> Derivation {
    projection(spec.states.len(), s).unwrap()
}

/// Tape thunk `(b -o b) -o a`.
fn th(_spec: &TMSpec) -> Formula {
    Formula::lolli(arrow_self(&tv("b")), tv("a"))
}

/// Cons type `Sigma -o TH -o a`.
fn cons_ty(spec: &TMSpec) -> Formula {
    Formula::lolli(ty_sym(spec), Formula::lolli(th(spec), tv("a")))
}

/// The list type over tape symbols:
/// `forall a b. !(Sigma -o ((b -o b) -o a) -o a) -o $(a -o (b -o b) -o a)`.
pub fn ty_tape_list(spec: &TMSpec) -> Formula {
    let a = tv("a");
    let b = tv("b");
    let step = Formula::lolli(
        ty_sym(spec),
        Formula::lolli(Formula::lolli(b.clone(), a.clone()), a.clone()),
    );
    let names = [Name::new("a"), Name::new("b")];
    Formula::forall_many(
        &names,
        Formula::lolli(
            Formula::bang(step),
            Formula::par(Formula::lolli(a.clone(), Formula::lolli(b, a))),
        ),
    )
    .unwrap()
}

/// `[s1, ..., sn]` as `\c x y. c S1 (\y. c S2 (... (\y. x)))`.
pub fn tape_list(spec: &TMSpec, syms: &[usize]) -> Build {
    let a = tv("a");
    let b = tv("b");
    let x = fr("x");
    let y = fr("y");
    let c = fr("c");
    let cty = Formula::lolli(
        ty_sym(spec),
        Formula::lolli(Formula::lolli(b.clone(), a.clone()), a.clone()),
    );
    let mut copies: Vec<Name> = Vec::new();
    let mut acc = builders::axiom(x.clone(), a.clone())?;
    for s in syms.iter().rev() {
        let yk = fr("y");
        let thunk = builders::lolli_i_fake(acc, &yk, b.clone())?;
        let ck = fr("c");
        copies.push(ck.clone());
        acc = builders::app(
            builders::app(builders::axiom(ck, cty.clone())?, sym_deriv(spec, *s))?,
            thunk,
        )?;
    }
    copies.reverse();
    let d = builders::lolli_i_fake(acc, &y, b.clone())?;
    let d = builders::lolli_i(d, &x)?;
    let d = builders::dollar_all_phi(d)?;
    let d = match copies.len() {
        0 => builders::lolli_i_bang_fake(d, &c, cty)?,
        1 => builders::lolli_i_bang(d, &copies[0])?,
        _ => {
            let d2 = builders::contract_group(d, &copies, &c)?;
            builders::lolli_i_bang(d2, &c)?
        }
    };
    let names = [Name::new("a"), Name::new("b")];
    builders::forall_i_many(d, &names)
}

/// Read back a tape list.
pub fn decode_tape_list(spec: &TMSpec, t: &Term) -> Option<Vec<usize>> {
    let (c, rest) = t.as_abs()?;
    let (x, rest) = rest.as_abs()?;
    let (_y, mut cur) = rest.as_abs()?;
    let mut out = Vec::new();
    loop {
        if let Some(v) = cur.as_var() {
            return if v == x { Some(out) } else { None };
        }
        let (fun, thunk) = cur.as_app()?;
        let (cv, sym) = fun.as_app()?;
        if cv.as_var()? != c {
            return None;
        }
        out.push(decode_sym(spec, sym)?);
        let (_, body) = thunk.as_abs()?;
        cur = body;
    }
}

fn decode_sym(spec: &TMSpec, t: &Term) -> Option<usize> {
    decode_projection(t, symwidth(spec))
}

fn decode_projection(t: &Term, width: usize) -> Option<usize> {
    // \w. w (\x0 ... x_{m-1}. xi)
    let (w, body) = t.as_abs()?;
    let (wv, inner) = body.as_app()?;
    if wv.as_var()? != w {
        return None;
    }
    let mut names = Vec::new();
    let mut cur = inner;
    while let Some((n, b)) = cur.as_abs() {
        names.push(n.clone());
        cur = b;
    }
    if names.len() != width {
        return None;
    }
    let v = cur.as_var()?;
    names.iter().position(|n| n == v)
}

// ---------------------------------------------------------------------------
// Configurations
// ---------------------------------------------------------------------------

/// Configuration type:
/// `forall a b. !(Sigma -o TH -o a) -o $(a -o a -o (TH @ S @ TH))`.
pub fn ty_conf(spec: &TMSpec) -> Formula {
    let a = tv("a");
    let triple = ty_tensor(&[th(spec), ty_state(spec), th(spec)]);
    let names = [Name::new("a"), Name::new("b")];
    Formula::forall_many(
        &names,
        Formula::lolli(
            Formula::bang(cons_ty(spec)),
            Formula::par(Formula::lolli(a.clone(), Formula::lolli(a, triple))),
        ),
    )
    .unwrap()
}

/// Build a configuration value from the left context (nearest cell first,
/// border excluded), state, and right context (head first, border excluded).
pub fn make_conf(spec: &TMSpec, left: &[usize], state: usize, right: &[usize]) -> Build {
    let a = tv("a");
    let cty = cons_ty(spec);
    let l = fr("l");
    let r = fr("r");
    let c = fr("c");
    let mut copies = Vec::new();
    let mut tape = |syms: &[usize], border: usize, base: &Name| -> Build {
        let mut all: Vec<usize> = syms.to_vec();
        all.push(border);
        let mut acc = builders::axiom(base.clone(), a.clone())?;
        for s in all.iter().rev() {
            let y = fr("y");
            let thunk = builders::lolli_i_fake(acc, &y, arrow_self(&tv("b")))?;
            let ck = fr("c");
            copies.push(ck.clone());
            acc = builders::app(
                builders::app(builders::axiom(ck, cty.clone())?, sym_deriv(spec, *s))?,
                thunk,
            )?;
        }
        let y = fr("y");
        builders::lolli_i_fake(acc, &y, arrow_self(&tv("b")))
    };
    let tl = tape(left, bot(spec), &l)?;
    let tr = tape(right, top(spec), &r)?;
    let triple = data::tensor_intro(vec![tl, state_deriv(spec, state), tr])?;
    let d = builders::lolli_i(triple, &r)?;
    let d = builders::lolli_i(d, &l)?;
    let d = builders::dollar_all_phi(d)?;
    let d = match copies.len() {
        0 => builders::lolli_i_bang_fake(d, &c, cty)?,
        1 => builders::lolli_i_bang(d, &copies[0])?,
        _ => {
            let d2 = builders::contract_group(d, &copies, &c)?;
            builders::lolli_i_bang(d2, &c)?
        }
    };
    let names = [Name::new("a"), Name::new("b")];
    builders::forall_i_many(d, &names)
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("term is not a configuration value")]
pub struct NotAConfiguration;

/// Read a configuration value back into (left, state, right); the borders
/// are stripped and must be present.
pub fn decode_config(
    spec: &TMSpec,
    t: &Term,
) -> Result<(Vec<usize>, usize, Vec<usize>), NotAConfiguration> {
    let (c, rest) = t.as_abs().ok_or(NotAConfiguration)?;
    let (l, rest) = rest.as_abs().ok_or(NotAConfiguration)?;
    let (r, rest) = rest.as_abs().ok_or(NotAConfiguration)?;
    let (z, body) = rest.as_abs().ok_or(NotAConfiguration)?;
    let (zab, thr) = body.as_app().ok_or(NotAConfiguration)?;
    let (za, st) = zab.as_app().ok_or(NotAConfiguration)?;
    let (zv, thl) = za.as_app().ok_or(NotAConfiguration)?;
    if zv.as_var().ok_or(NotAConfiguration)? != z {
        return Err(NotAConfiguration);
    }
    let state = decode_projection(st, spec.states.len()).ok_or(NotAConfiguration)?;
    let side = |thunk: &Term, base: &Name| -> Result<Vec<usize>, NotAConfiguration> {
        let (_y, mut cur) = thunk.as_abs().ok_or(NotAConfiguration)?;
        let mut out = Vec::new();
        loop {
            if let Some(v) = cur.as_var() {
                return if v == base { Ok(out) } else { Err(NotAConfiguration) };
            }
            let (fun, tail) = cur.as_app().ok_or(NotAConfiguration)?;
            let (cv, sym) = fun.as_app().ok_or(NotAConfiguration)?;
            if cv.as_var().ok_or(NotAConfiguration)? != c {
                return Err(NotAConfiguration);
            }
            out.push(decode_sym(spec, sym).ok_or(NotAConfiguration)?);
            let (_, b2) = tail.as_abs().ok_or(NotAConfiguration)?;
            cur = b2;
        }
    };
    let mut left = side(thl, l)?;
    let mut right = side(thr, r)?;
    if left.pop() != Some(bot(spec)) || right.pop() != Some(top(spec)) {
        return Err(NotAConfiguration);
    }
    Ok((left, state, right))
}

// ---------------------------------------------------------------------------
// The transition map
// ---------------------------------------------------------------------------

/// Flag rebuilding a tape thunk from cons, symbol, and the older thunk.
fn flag_ty(spec: &TMSpec) -> Formula {
    Formula::lolli(
        cons_ty(spec),
        Formula::lolli(ty_sym(spec), Formula::lolli(th(spec), th(spec))),
    )
}

/// Popped-side payload `Sigma @ FLAG @ TH`.
fn u_ty(spec: &TMSpec) -> Formula {
    ty_tensor(&[ty_sym(spec), flag_ty(spec), th(spec)])
}

fn thu(spec: &TMSpec) -> Formula {
    Formula::lolli(arrow_self(&tv("b")), u_ty(spec))
}

/// Pre-configuration type: the sides are thunked popped payloads.
pub fn ty_preconf(spec: &TMSpec) -> Formula {
    let a = tv("a");
    let triple = ty_tensor(&[thu(spec), ty_state(spec), thu(spec)]);
    let names = [Name::new("a"), Name::new("b")];
    Formula::forall_many(
        &names,
        Formula::lolli(
            Formula::bang(cons_ty(spec)),
            Formula::par(Formula::lolli(a.clone(), Formula::lolli(a, triple))),
        ),
    )
    .unwrap()
}

/// `dropflag = \c h t. t`.
fn drop_flag(spec: &TMSpec) -> Build {
    let c = fr("c");
    let h = fr("h");
    let t = fr("t");
    let d = builders::lolli_i(builders::axiom(t.clone(), th(spec))?, &t)?;
    let d = builders::lolli_i_fake(d, &h, ty_sym(spec))?;
    builders::lolli_i_fake(d, &c, cons_ty(spec))
}

/// `consflag = \c h t q. c h (\y. t I)`.
fn cons_flag(spec: &TMSpec) -> Build {
    let c = fr("c");
    let h = fr("h");
    let t = fr("t");
    let q = fr("q");
    let y = fr("y");
    let forced =
        builders::app(builders::axiom(t.clone(), th(spec))?, builders::identity(tv("b"))?)?;
    let rethunk = builders::lolli_i_fake(forced, &y, arrow_self(&tv("b")))?;
    let body = builders::app(
        builders::app(
            builders::axiom(c.clone(), cons_ty(spec))?,
            builders::axiom(h.clone(), ty_sym(spec))?,
        )?,
        rethunk,
    )?;
    let d = builders::lolli_i_fake(body, &q, arrow_self(&tv("b")))?;
    let d = builders::lolli_i(d, &t)?;
    let d = builders::lolli_i(d, &h)?;
    builders::lolli_i(d, &c)
}

/// A rebuild move `\t q. c w1 (\y. c w2 (... wk t))` with one cons copy per
/// written symbol; no writes is the identity on thunks.
fn move_fn(spec: &TMSpec, writes: &[usize], copies: &mut Vec<Name>) -> Build {
    if writes.is_empty() {
        return builders::identity(th(spec));
    }
    let t = fr("t");
    let q = fr("q");
    let mut acc = builders::axiom(t.clone(), th(spec))?;
    let mut first = true;
    for w in writes.iter().rev() {
        let inner = if first {
            first = false;
            acc
        } else {
            let y = fr("y");
            builders::lolli_i_fake(acc, &y, arrow_self(&tv("b")))?
        };
        let ck = fr("c");
        copies.push(ck.clone());
        acc = builders::app(
            builders::app(builders::axiom(ck, cons_ty(spec))?, sym_deriv(spec, *w))?,
            inner,
        )?;
    }
    let d = builders::lolli_i_fake(acc, &q, arrow_self(&tv("b")))?;
    builders::lolli_i(d, &t)
}

/// Writes for the (left rebuild, next state, right rebuild) of a popped
/// pair; `sl`/`sh` are encoded indices.
fn lookup_entry(spec: &TMSpec, sl: usize, st: usize, sh: usize) -> (Vec<usize>, usize, Vec<usize>) {
    let w = symwidth(spec);
    if sl == w - 1 || sh == 0 {
        // nonsense combination, never reached from a coherent tape
        return (Vec::new(), spec.accept, Vec::new());
    }
    let scanned = if sh == w - 1 { spec.blank() } else { sh };
    let act = spec.action(st, scanned);
    let reextend = sh == w - 1; // the popped right border must come back
    match act.mv {
        Move::Stay => {
            let mut right = vec![act.write];
            if reextend {
                right.push(w - 1);
            }
            (vec![sl], act.next, right)
        }
        Move::Right => {
            let mut right = Vec::new();
            if reextend {
                right.push(w - 1);
            }
            (vec![act.write, sl], act.next, right)
        }
        Move::Left => {
            let mut right = vec![sl, act.write];
            let mut left = Vec::new();
            if sl == 0 {
                // at the left border: blank head cell, border comes back
                right = vec![spec.blank(), act.write];
                left = vec![0];
            }
            if reextend {
                right.push(w - 1);
            }
            (left, act.next, right)
        }
    }
}

/// The look-up table: a tuple over head symbols of tuples over states of
/// tuples over left symbols of (move, state, move) triples. Every cons copy
/// consumed by a move is recorded in `copies`.
pub fn build_lookup(spec: &TMSpec, copies: &mut Vec<Name>) -> Build {
    let w = symwidth(spec);
    let mut rows = Vec::new();
    for sh in 0..w {
        let mut cols = Vec::new();
        for st in 0..spec.states.len() {
            let mut trips = Vec::new();
            for sl in 0..w {
                let (lm, ns, rm) = lookup_entry(spec, sl, st, sh);
                trips.push(data::tensor_intro(vec![
                    move_fn(spec, &lm, copies)?,
                    state_deriv(spec, ns),
                    move_fn(spec, &rm, copies)?,
                ])?);
            }
            cols.push(data::tensor_intro(trips)?);
        }
        rows.push(data::tensor_intro(cols)?);
    }
    data::tensor_intro(rows)
}

fn trip_ty(spec: &TMSpec) -> Formula {
    let mv = Formula::lolli(th(spec), th(spec));
    ty_tensor(&[mv.clone(), ty_state(spec), mv])
}

/// `C2P : C -o P` — pops one symbol from each side.
pub fn c2p(spec: &TMSpec) -> Build {
    let n = fr("n");
    let c = fr("c");
    let mut copies: Vec<Name> = Vec::new();
    // step: \e g. (\<h f t>. <e, consflag, f c h t>)(g I)
    let ck = fr("c");
    copies.push(ck.clone());
    let step = {
        let e = fr("e");
        let g = fr("g");
        let h = fr("h");
        let f = fr("f");
        let t = fr("t");
        let rebuilt = builders::app(
            builders::app(
                builders::app(
                    builders::axiom(f.clone(), flag_ty(spec))?,
                    builders::axiom(ck.clone(), cons_ty(spec))?,
                )?,
                builders::axiom(h.clone(), ty_sym(spec))?,
            )?,
            builders::axiom(t.clone(), th(spec))?,
        )?;
        let triple = data::tensor_intro(vec![
            builders::axiom(e.clone(), ty_sym(spec))?,
            cons_flag(spec)?,
            rebuilt,
        ])?;
        let elim =
            data::lam_tensor(triple, &[(h, ty_sym(spec)), (f, flag_ty(spec)), (t, th(spec))])?;
        let forced =
            builders::app(builders::axiom(g.clone(), thu(spec))?, builders::identity(tv("b"))?)?;
        let body = builders::app(elim, forced)?;
        let d = builders::lolli_i(body, &g)?;
        builders::lolli_i(d, &e)
    };
    let step_boxed = builders::bang(step?, Some(&ck))?;
    let n_inst = builders::forall_e_many(
        builders::axiom(n.clone(), ty_conf(spec))?,
        &[u_ty(spec), tv("b")],
    )?;
    let fold = builders::app(n_inst, step_boxed)?;
    // (\z l r. z <bot, dropflag, \q.l> <top, dropflag, \q.r>)
    let z = fr("z");
    let l = fr("l");
    let r = fr("r");
    let base = |symidx: usize, v: &Name| -> Build {
        let q = fr("q");
        let stub = builders::lolli_i_fake(
            builders::axiom(v.clone(), tv("a"))?,
            &q,
            arrow_self(&tv("b")),
        )?;
        data::tensor_intro(vec![sym_deriv(spec, symidx), drop_flag(spec)?, stub])
    };
    let triple_u = ty_tensor(&[thu(spec), ty_state(spec), thu(spec)]);
    let body = builders::app(
        builders::app(
            builders::axiom(
                z.clone(),
                Formula::lolli(u_ty(spec), Formula::lolli(u_ty(spec), triple_u)),
            )?,
            base(bot(spec), &l)?,
        )?,
        base(top(spec), &r)?,
    )?;
    let d = builders::lolli_i(body, &r)?;
    let d = builders::lolli_i(d, &l)?;
    let d = builders::dollar(d, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let d = builders::lolli_i_dollar(d, &z)?;
    let mut d = builders::app(d, fold)?;
    d = match copies.len() {
        1 => builders::lolli_i_bang(d, &copies[0])?,
        _ => {
            let d2 = builders::contract_group(d, &copies, &c)?;
            builders::lolli_i_bang(d2, &c)?
        }
    };
    let names = [Name::new("a"), Name::new("b")];
    let d = builders::forall_i_many(d, &names)?;
    builders::lolli_i(d, &n)
}

/// `P2C : P -o C` — consults the table and rebuilds both sides.
pub fn p2c(spec: &TMSpec) -> Build {
    let n = fr("n");
    let c = fr("c");
    let mut copies: Vec<Name> = Vec::new();
    let lookup = build_lookup(spec, &mut copies)?;
    let z = fr("z");
    let l = fr("l");
    let r = fr("r");
    let x = fr("x");
    let s = fr("s");
    let y = fr("y");
    let el = fr("el");
    let fl = fr("fl");
    let tl = fr("tl");
    let eh = fr("eh");
    let fh = fr("fh");
    let thv = fr("th");
    let ml = fr("ml");
    let s2 = fr("s'");
    let mr = fr("mr");
    // selection: el (s (eh LOOKUP))
    let row_t = ty_tensor(&vec![trip_ty(spec); symwidth(spec)]);
    let col_t = ty_tensor(&vec![row_t.clone(); spec.states.len()]);
    let sel = builders::app(
        builders::forall_e(builders::axiom(eh.clone(), ty_sym(spec))?, col_t)?,
        lookup,
    )?;
    let sel = builders::app(
        builders::forall_e(builders::axiom(s.clone(), ty_state(spec))?, row_t)?,
        sel,
    )?;
    let sel = builders::app(
        builders::forall_e(builders::axiom(el.clone(), ty_sym(spec))?, trip_ty(spec))?,
        sel,
    )?;
    let mv = Formula::lolli(th(spec), th(spec));
    let newtriple = data::tensor_intro(vec![
        builders::app(
            builders::axiom(ml.clone(), mv.clone())?,
            builders::axiom(tl.clone(), th(spec))?,
        )?,
        builders::axiom(s2.clone(), ty_state(spec))?,
        builders::app(
            builders::axiom(mr.clone(), mv.clone())?,
            builders::axiom(thv.clone(), th(spec))?,
        )?,
    ])?;
    let body = builders::app(
        data::lam_tensor(newtriple, &[(ml, mv.clone()), (s2, ty_state(spec)), (mr, mv)])?,
        sel,
    )?;
    // pop the right side, then the left side
    let body = builders::app(
        data::lam_tensor(body, &[(eh, ty_sym(spec)), (fh, flag_ty(spec)), (thv, th(spec))])?,
        builders::app(builders::axiom(y.clone(), thu(spec))?, builders::identity(tv("b"))?)?,
    )?;
    let body = builders::app(
        data::lam_tensor(body, &[(el, ty_sym(spec)), (fl, flag_ty(spec)), (tl, th(spec))])?,
        builders::app(builders::axiom(x.clone(), thu(spec))?, builders::identity(tv("b"))?)?,
    )?;
    // eliminate the popped triple <x s y> from z l r
    let triple_u = ty_tensor(&[thu(spec), ty_state(spec), thu(spec)]);
    let body = builders::app(
        data::lam_tensor(body, &[(x, thu(spec)), (s, ty_state(spec)), (y, thu(spec))])?,
        builders::app(
            builders::app(
                builders::axiom(
                    z.clone(),
                    Formula::lolli(tv("a"), Formula::lolli(tv("a"), triple_u)),
                )?,
                builders::axiom(l.clone(), tv("a"))?,
            )?,
            builders::axiom(r.clone(), tv("a"))?,
        )?,
    )?;
    let d = builders::lolli_i(body, &r)?;
    let d = builders::lolli_i(d, &l)?;
    let d = builders::dollar(d, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let d = builders::lolli_i_dollar(d, &z)?;
    let n_inst = builders::forall_e_many(
        builders::axiom(n.clone(), ty_preconf(spec))?,
        &[tv("a"), tv("b")],
    )?;
    let ck = fr("c");
    copies.push(ck.clone());
    let fold = builders::app(n_inst, builders::phi_var(ck, cons_ty(spec))?)?;
    let mut d = builders::app(d, fold)?;
    d = match copies.len() {
        1 => builders::lolli_i_bang(d, &copies[0])?,
        _ => {
            let d2 = builders::contract_group(d, &copies, &c)?;
            builders::lolli_i_bang(d2, &c)?
        }
    };
    let names = [Name::new("a"), Name::new("b")];
    let d = builders::forall_i_many(d, &names)?;
    builders::lolli_i(d, &n)
}

/// `delta = \cf. P2C (C2P cf) : C -o C`.
pub fn build_delta_bar(spec: &TMSpec) -> Build {
    let cf = fr("cf");
    let d = builders::app(
        p2c(spec)?,
        builders::app(c2p(spec)?, builders::axiom(cf.clone(), ty_conf(spec))?)?,
    )?;
    builders::lolli_i(d, &cf)
}

// ---------------------------------------------------------------------------
// Input handling and the machine term
// ---------------------------------------------------------------------------

/// `L2C : Tape list -o C` — the initial configuration for an input. The
/// list folds at thunk type so the border-consed base arrives as a value.
pub fn l2c_tm(spec: &TMSpec) -> Build {
    let lv = fr("l");
    let c = fr("c");
    let c1 = fr("c");
    let c2 = fr("c");
    let c3 = fr("c");
    let z = fr("z");
    let lb = fr("l");
    let rb = fr("r");
    let thty = th(spec);
    // step: \e g q. c e (g I) : Sigma -o ((b -o b) -o TH) -o TH
    let step = {
        let e = fr("e");
        let g = fr("g");
        let q = fr("q");
        let tail = builders::app(
            builders::axiom(g.clone(), Formula::lolli(arrow_self(&tv("b")), thty.clone()))?,
            builders::identity(tv("b"))?,
        )?;
        let consed = builders::app(
            builders::app(
                builders::axiom(c1.clone(), cons_ty(spec))?,
                builders::axiom(e.clone(), ty_sym(spec))?,
            )?,
            tail,
        )?;
        let d = builders::lolli_i_fake(consed, &q, arrow_self(&tv("b")))?;
        let d = builders::lolli_i(d, &g)?;
        builders::lolli_i(d, &e)?
    };
    let l_inst = builders::forall_e_many(
        builders::axiom(lv.clone(), ty_tape_list(spec))?,
        &[thty.clone(), arrow_self(&tv("b"))],
    )?;
    let fold = builders::app(l_inst, builders::bang(step, Some(&c1))?)?;
    // triple: <\y. c bot (\y. l), s0, z (\q. c top (\y. r)) I>
    let y1 = fr("y");
    let y2 = fr("y");
    let left = {
        let inner = builders::lolli_i_fake(
            builders::axiom(lb.clone(), tv("a"))?,
            &y2,
            arrow_self(&tv("b")),
        )?;
        let consed = builders::app(
            builders::app(builders::axiom(c2.clone(), cons_ty(spec))?, sym_deriv(spec, bot(spec)))?,
            inner,
        )?;
        builders::lolli_i_fake(consed, &y1, arrow_self(&tv("b")))?
    };
    let right = {
        let y3 = fr("y");
        let q = fr("q");
        let inner = builders::lolli_i_fake(
            builders::axiom(rb.clone(), tv("a"))?,
            &y3,
            arrow_self(&tv("b")),
        )?;
        let consed = builders::app(
            builders::app(builders::axiom(c3.clone(), cons_ty(spec))?, sym_deriv(spec, top(spec)))?,
            inner,
        )?;
        let base = builders::lolli_i_fake(consed, &q, arrow_self(&tv("b")))?;
        builders::app(
            builders::app(
                builders::axiom(
                    z.clone(),
                    Formula::lolli(thty.clone(), Formula::lolli(arrow_self(&tv("b")), thty.clone())),
                )?,
                base,
            )?,
            builders::identity(tv("b"))?,
        )?
    };
    let triple = data::tensor_intro(vec![left, state_deriv(spec, 0), right])?;
    let d = builders::lolli_i(triple, &rb)?;
    let d = builders::lolli_i(d, &lb)?;
    let d = builders::dollar(d, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let d = builders::lolli_i_dollar(d, &z)?;
    let d = builders::app(d, fold)?;
    let d = builders::contract_group(d, &[c1, c2, c3], &c)?;
    let d = builders::lolli_i_bang(d, &c)?;
    let names = [Name::new("a"), Name::new("b")];
    let d = builders::forall_i_many(d, &names)?;
    builders::lolli_i(d, &lv)
}

/// `L2N : Tape list -o N` — the input length as a string.
pub fn l2n(spec: &TMSpec) -> Build {
    let lv = fr("l");
    let f = fr("f");
    let a = tv("a");
    // fold argument: !(\e t. f (t I)) with f polynomial
    let e = fr("e");
    let t = fr("t");
    let content = builders::app(
        builders::axiom(f.clone(), arrow_self(&a))?,
        builders::app(
            builders::axiom(t.clone(), Formula::lolli(arrow_self(&tv("b")), a.clone()))?,
            builders::identity(tv("b"))?,
        )?,
    )?;
    let content = builders::lolli_i(content, &t)?;
    let content = builders::lolli_i_fake(content, &e, ty_sym(spec))?;
    let step = builders::bang(content, Some(&f))?;
    let l_inst = builders::forall_e_many(
        builders::axiom(lv.clone(), ty_tape_list(spec))?,
        &[tv("a"), arrow_self(&tv("b"))],
    )?;
    let fold = builders::app(l_inst, step)?;
    // (\z x. z x I)
    let z = fr("z");
    let x = fr("x");
    let body = builders::app(
        builders::app(
            builders::axiom(
                z.clone(),
                Formula::lolli(a.clone(), Formula::lolli(arrow_self(&tv("b")), a.clone())),
            )?,
            builders::axiom(x.clone(), a.clone())?,
        )?,
        builders::identity(tv("b"))?,
    )?;
    let d = builders::lolli_i(body, &x)?;
    let d = builders::dollar(d, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let d = builders::lolli_i_dollar(d, &z)?;
    let d = builders::app(d, fold)?;
    let d = builders::lolli_i_bang(d, &f)?;
    let d = builders::forall_i(d, "a")?;
    builders::lolli_i(d, &lv)
}

/// Coerce one symbol into a box: `\x. (x <thunked syms>) I : Sigma -o $Sigma`.
pub fn sym_coerce(spec: &TMSpec) -> Build {
    let x = fr("x");
    let delta = tv("d");
    let inst = Formula::lolli(arrow_self(&delta), Formula::par(ty_sym(spec)));
    let mut items = Vec::new();
    for i in 0..symwidth(spec) {
        let q = fr("q");
        items.push(builders::lolli_i_fake(
            builders::dollar_all_phi(sym_deriv(spec, i))?,
            &q,
            arrow_self(&delta),
        )?);
    }
    let table = data::tensor_intro(items)?;
    let d = builders::app(
        builders::app(
            builders::forall_e(builders::axiom(x.clone(), ty_sym(spec))?, inst)?,
            table,
        )?,
        builders::identity(delta)?,
    )?;
    builders::lolli_i(d, &x)
}

/// Duplicate one symbol: `Sigma -o ($Sigma (.) $Sigma)`.
pub fn sym_diag(spec: &TMSpec) -> Build {
    let x = fr("x");
    let comp = Formula::par(ty_sym(spec));
    let pair = data::ty_etensor(&[comp.clone(), comp]);
    let mut items = Vec::new();
    for i in 0..symwidth(spec) {
        items.push(data::etensor_intro(vec![
            builders::dollar_all_phi(sym_deriv(spec, i))?,
            builders::dollar_all_phi(sym_deriv(spec, i))?,
        ])?);
    }
    let table = data::tensor_intro(items)?;
    let d = builders::app(
        builders::forall_e(builders::axiom(x.clone(), ty_sym(spec))?, pair)?,
        table,
    )?;
    builders::lolli_i(d, &x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::reduce_to_nf;
    use crate::term::parse_term;
    use crate::tm::types::{bit_flip, tm_simulate};

    #[test]
    fn tape_lists_round_trip() {
        let m = bit_flip();
        let d = tape_list(&m, &[2, 1, 2]).unwrap();
        let j = d.check().unwrap();
        assert_eq!(j.ty, ty_tape_list(&m));
        assert_eq!(decode_tape_list(&m, d.subject()).unwrap(), vec![2, 1, 2]);
        let empty = tape_list(&m, &[]).unwrap();
        empty.check().unwrap();
        assert_eq!(decode_tape_list(&m, empty.subject()).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn configurations_round_trip() {
        let m = bit_flip();
        let d = make_conf(&m, &[], 0, &[2]).unwrap();
        let j = d.check().unwrap();
        assert_eq!(j.ty, ty_conf(&m));
        assert_eq!(decode_config(&m, d.subject()).unwrap(), (vec![], 0, vec![2]));
        assert!(decode_config(&m, &parse_term("\\x. x").unwrap()).is_err());
    }

    #[test]
    fn helpers_check() {
        let m = bit_flip();
        sym_coerce(&m).unwrap().check().unwrap();
        sym_diag(&m).unwrap().check().unwrap();
        l2n(&m).unwrap().check().unwrap();
        l2c_tm(&m).unwrap().check().unwrap();
    }

    #[test]
    fn l2c_and_l2n_run() {
        let m = bit_flip();
        let lst = tape_list(&m, &[2, 1]).unwrap();
        let d = l2c_tm(&m).unwrap();
        let t = Term::app(d.subject().clone(), lst.subject().clone());
        let (got, _) = reduce_to_nf(&t, 400_000).unwrap();
        assert_eq!(decode_config(&m, &got).unwrap(), (vec![], 0, vec![2, 1]));

        let n = l2n(&m).unwrap();
        let t = Term::app(n.subject().clone(), lst.subject().clone());
        let (got, _) = reduce_to_nf(&t, 400_000).unwrap();
        assert_eq!(crate::data::decode_string(&got).unwrap(), 2);
    }

    #[test]
    fn delta_bar_single_step() {
        let m = bit_flip();
        let d = build_delta_bar(&m).unwrap();
        let j = d.check().unwrap();
        assert_eq!(j.ty, Formula::lolli(ty_conf(&m), ty_conf(&m)));
        let conf = make_conf(&m, &[], 0, &[2]).unwrap();
        let t = Term::app(d.subject().clone(), conf.subject().clone());
        let (got, tr) = reduce_to_nf(&t, 4_000_000).unwrap();
        let (lt, st, rt) = decode_config(&m, &got).unwrap();
        let sim = tm_simulate(&m, &[2], 1);
        let want_left: Vec<usize> = sim.tape[..sim.head].iter().rev().copied().collect();
        let want_right: Vec<usize> = sim.tape[sim.head..].to_vec();
        assert_eq!(st, sim.state, "{} steps", tr.len());
        assert_eq!(lt, want_left);
        let strip = |v: &[usize]| -> Vec<usize> {
            let mut v = v.to_vec();
            while v.last() == Some(&m.blank()) {
                v.pop();
            }
            v
        };
        assert_eq!(strip(&rt), strip(&want_right));
    }
}

// ---------------------------------------------------------------------------
// List duplication, coercion, and the machine term
// ---------------------------------------------------------------------------

/// `Push : Sigma -o TapeList -o TapeList` — cons a symbol onto a list.
pub fn tape_push(spec: &TMSpec) -> Build {
    let e = fr("e");
    let lv = fr("l");
    let c = fr("c");
    let c1 = fr("c");
    let c2 = fr("c");
    let y = fr("y");
    let x = fr("x");
    let yd = fr("yd");
    let b = tv("b");
    let a = tv("a");
    let cty = Formula::lolli(
        ty_sym(spec),
        Formula::lolli(Formula::lolli(b.clone(), a.clone()), a.clone()),
    );
    // inside the box: \x yd. c1 e (\y'. y x yd)
    let y2 = fr("y'");
    let tailbody = builders::app(
        builders::app(
            builders::axiom(y.clone(), Formula::lolli(a.clone(), Formula::lolli(b.clone(), a.clone())))?,
            builders::axiom(x.clone(), a.clone())?,
        )?,
        builders::axiom(yd.clone(), b.clone())?,
    )?;
    let thunk = builders::lolli_i_fake(tailbody, &y2, b.clone())?;
    let body = builders::app(
        builders::app(builders::axiom(c1.clone(), cty.clone())?, builders::axiom(e.clone(), ty_sym(spec))?)?,
        thunk,
    )?;
    let body = builders::lolli_i(body, &yd)?;
    let body = builders::lolli_i(body, &x)?;
    let body = builders::dollar(
        body,
        &DollarSplit { to_delta: vec![y.clone()], to_theta: vec![e.clone()] },
    )?;
    let body = builders::lolli_i_dollar(body, &y)?;
    // apply to the tail content
    let l_inst = builders::forall_e_many(
        builders::axiom(lv.clone(), ty_tape_list(spec))?,
        &[a.clone(), b.clone()],
    )?;
    let tail = builders::app(l_inst, builders::phi_var(c2.clone(), cty.clone())?)?;
    let d = builders::app(body, tail)?;
    let d = builders::contract(d, &c1, &c2, &c)?;
    let d = builders::lolli_i_bang(d, &c)?;
    let names = [Name::new("a"), Name::new("b")];
    let d = builders::forall_i_many(d, &names)?;
    let d = builders::lolli_i(d, &lv)?;
    builders::eager_i(d, &e)
}

/// `TapeDiag : TapeList -o $($TapeList (.) $TapeList)` — two copies.
pub fn tape_list_diag(spec: &TMSpec) -> Build {
    let lst = ty_tape_list(spec);
    let pair = data::ty_etensor(&[Formula::par(lst.clone()), Formula::par(lst.clone())]);
    let lv = fr("l");
    // step: \e g. (\<{e1 e2}>. (\<{l1 l2}>. <{push e1 l1, push e2 l2}>)(g I))(diag e)
    let step = {
        let e = fr("e");
        let g = fr("g");
        let e1 = fr("e1");
        let e2 = fr("e2");
        let l1 = fr("l1");
        let l2 = fr("l2");
        let push = tape_push(spec)?;
        let lifted = linear_embed(push, 1, 0)?; // $ (Sigma =o L -o L)
        let _ = lifted;
        let comp = |ev: &Name, lvv: &Name| -> Build {
            // [push]-style: $Sigma =o $L -o $L via linear embedding of the
            // plain part and eager use of both pieces
            let pe = builders::app(tape_push(spec)?, eager_use(ev.clone(), &Formula::par(ty_sym(spec)))?)?;
            let le = linear_embed(pe, 1, 1)?;
            builders::app(le, eager_use(lvv.clone(), &Formula::par(lst.clone()))?)
        };
        let inner = data::etensor_intro(vec![comp(&e1, &l1)?, comp(&e2, &l2)?])?;
        let inner = data::lam_etensor(inner, &[(l1, lst.clone()), (l2, lst.clone())])?;
        let forced = builders::app(
            builders::axiom(g.clone(), Formula::lolli(arrow_self(&tv("b")), pair.clone()))?,
            builders::identity(tv("b"))?,
        )?;
        let inner = builders::app(inner, forced)?;
        let outer = data::lam_etensor(inner, &[(e1, ty_sym(spec)), (e2, ty_sym(spec))])?;
        let d = builders::app(outer, builders::app(sym_diag(spec)?, builders::axiom(e.clone(), ty_sym(spec))?)?)?;
        let d = builders::lolli_i(d, &g)?;
        builders::lolli_i(d, &e)?
    };
    let l_inst = builders::forall_e_many(
        builders::axiom(lv.clone(), ty_tape_list(spec))?,
        &[pair.clone(), arrow_self(&tv("b"))],
    )?;
    let fold = builders::app(l_inst, builders::bang(step, None)?)?;
    // base: <{nil, nil}>
    let base = data::etensor_intro(vec![
        builders::dollar_all_phi(tape_list(spec, &[])?)?,
        builders::dollar_all_phi(tape_list(spec, &[])?)?,
    ])?;
    let z = fr("z");
    let body = builders::app(
        builders::app(
            builders::axiom(
                z.clone(),
                Formula::lolli(pair.clone(), Formula::lolli(arrow_self(&tv("b")), pair.clone())),
            )?,
            base,
        )?,
        builders::identity(tv("b"))?,
    )?;
    let d = builders::dollar(body, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let d = builders::lolli_i_dollar(d, &z)?;
    let d = builders::app(d, fold)?;
    builders::lolli_i(d, &lv)
}

/// `TapeCoerce : TapeList -o $TapeList` — rebuild the list inside a box.
pub fn tape_list_coerce(spec: &TMSpec) -> Build {
    let lst = ty_tape_list(spec);
    let lv = fr("l");
    let a = tv("a");
    let b = tv("b");
    let cty = Formula::lolli(
        ty_sym(spec),
        Formula::lolli(Formula::lolli(b.clone(), a.clone()), a.clone()),
    );
    // step: \e g. (\y z. $[\x yd. c1 z (\y'. y x yd)]) ((g I) c2) (coerce e)
    let step = {
        let e = fr("e");
        let g = fr("g");
        let y = fr("y");
        let z = fr("z");
        let c1 = fr("c");
        let c2 = fr("c");
        let x = fr("x");
        let yd = fr("yd");
        let y2 = fr("y'");
        let tailbody = builders::app(
            builders::app(
                builders::axiom(
                    y.clone(),
                    Formula::lolli(a.clone(), Formula::lolli(b.clone(), a.clone())),
                )?,
                builders::axiom(x.clone(), a.clone())?,
            )?,
            builders::axiom(yd.clone(), b.clone())?,
        )?;
        let thunk = builders::lolli_i_fake(tailbody, &y2, b.clone())?;
        let body = builders::app(
            builders::app(
                builders::axiom(c1.clone(), cty.clone())?,
                builders::axiom(z.clone(), ty_sym(spec))?,
            )?,
            thunk,
        )?;
        let body = builders::lolli_i(body, &yd)?;
        let body = builders::lolli_i(body, &x)?;
        let body = builders::dollar(
            body,
            &DollarSplit { to_delta: vec![y.clone(), z.clone()], to_theta: vec![] },
        )?;
        let body = builders::lolli_i_dollar(body, &z)?;
        let body = builders::lolli_i_dollar(body, &y)?;
        let tail_list = builders::app(
            builders::axiom(g.clone(), Formula::lolli(arrow_self(&tv("b")), lst.clone()))?,
            builders::identity(tv("b"))?,
        )?;
        let tail = builders::app(
            builders::forall_e_many(tail_list, &[a.clone(), b.clone()])?,
            builders::phi_var(c2.clone(), cty.clone())?,
        )?;
        let coerced = builders::app(sym_coerce(spec)?, builders::axiom(e.clone(), ty_sym(spec))?)?;
        let d = builders::app(builders::app(body, tail)?, coerced)?;
        let d = builders::contract(d, &c1, &c2, &fr("c"))?;
        let d = builders::lolli_i(d, &g)?;
        builders::lolli_i(d, &e)?
    };
    // the step still carries its contracted cons as a polynomial; rebuild
    // the full coercion by folding and discharging at the top
    let phis: Vec<Name> = step
        .conclusion
        .e
        .phi_pairs()
        .filter_map(|p| p.phi.as_ref().map(|(n, _)| n.clone()))
        .collect();
    assert_eq!(phis.len(), 1);
    let cstep = phis[0].clone();
    let step_boxed = builders::bang(step, Some(&cstep))?;
    let l_inst = builders::forall_e_many(
        builders::axiom(lv.clone(), ty_tape_list(spec))?,
        &[lst.clone(), arrow_self(&tv("b"))],
    )?;
    let fold = builders::app(l_inst, step_boxed)?;
    let z = fr("z");
    let body = builders::app(
        builders::app(
            builders::axiom(
                z.clone(),
                Formula::lolli(lst.clone(), Formula::lolli(arrow_self(&tv("b")), lst.clone())),
            )?,
            tape_list(spec, &[])?,
        )?,
        builders::identity(tv("b"))?,
    )?;
    let d = builders::dollar(body, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let d = builders::lolli_i_dollar(d, &z)?;
    let d = builders::app(d, fold)?;
    let d = builders::lolli_i_bang(d, &cstep)?;
    let _ = builders::lolli_i_bang as fn(_, _) -> _;
    builders::lolli_i(d, &lv)
}

/// `TapeCoerce^n : TapeList -o $^n TapeList`.
pub fn it_tape_list_coerce(spec: &TMSpec, n: usize) -> Build {
    assert!(n >= 1);
    if n == 1 {
        return tape_list_coerce(spec);
    }
    let x = fr("x");
    let inner = builders::app(
        tape_list_coerce(spec)?,
        builders::axiom(x.clone(), ty_tape_list(spec))?,
    )?;
    let lifted = linear_embed(it_tape_list_coerce(spec, n - 1)?, 1, 1)?;
    let d = builders::app(lifted, inner)?;
    builders::lolli_i(d, &x)
}

/// Result modality of the machine term.
pub fn machine_exponent(spec: &TMSpec) -> usize {
    2 * spec.exponent() + 3
}

/// The machine: duplicate the input, clock one copy, fold the transition
/// over the other.
pub fn encode_machine(spec: &TMSpec) -> Build {
    let e = spec.exponent();
    let xv = fr("x");
    let zp = fr("zp");
    let zc = fr("zc");
    let iv = fr("i");
    let lv = fr("l");
    let z = fr("z");
    let lst = ty_tape_list(spec);
    // core: $[ ... $[ (\z. $[ z (L2C l) ]) (i delta) ... ] ]
    let core = builders::app(
        builders::axiom(z.clone(), Formula::lolli(ty_conf(spec), ty_conf(spec)))?,
        builders::app(l2c_tm(spec)?, builders::axiom(lv.clone(), lst.clone())?)?,
    )?;
    let core = builders::dollar(
        core,
        &DollarSplit { to_delta: vec![z.clone(), lv.clone()], to_theta: vec![] },
    )?;
    let core = builders::lolli_i_dollar(core, &z)?;
    let fold = builders::app(
        builders::forall_e(builders::axiom(iv.clone(), ty_string())?, ty_conf(spec))?,
        builders::bang(build_delta_bar(spec)?, None)?,
    )?;
    let mut inner = builders::app(core, fold)?;
    inner = builders::dollar(
        inner,
        &DollarSplit { to_delta: vec![iv.clone()], to_theta: vec![] },
    )?;
    for _ in 0..2 * e {
        inner = builders::dollar(inner, &DollarSplit::default())?;
    }
    let inner = builders::lolli_i_dollar(inner, &lv)?;
    let inner = builders::lolli_i_dollar(inner, &iv)?;
    // arguments: the clocked length and the coerced copy
    let clock = builders::app(
        super::npoly::npoly(e, spec.big_k())?,
        builders::app(basic_embed(l2n(spec)?, 1)?, eager_use(zp.clone(), &Formula::par(lst.clone()))?)?,
    )?;
    let coerced = builders::app(
        basic_embed(it_tape_list_coerce(spec, 2 * e + 1)?, 1)?,
        eager_use(zc.clone(), &Formula::par(lst.clone()))?,
    )?;
    let mcore = builders::app(builders::app(inner, clock)?, coerced)?;
    let combine = data::lam_etensor(mcore, &[(zp, lst.clone()), (zc, lst.clone())])?;
    let d = builders::app(
        linear_embed(combine, 1, 1)?,
        builders::app(tape_list_diag(spec)?, builders::axiom(xv.clone(), lst)?)?,
    )?;
    builders::lolli_i(d, &xv)
}

#[cfg(test)]
mod machine_tests {
    use super::*;
    use crate::reduction::reduce_to_nf;
    use crate::tm::types::{bit_flip, tm_simulate};

    #[test]
    fn list_helpers_run() {
        let m = bit_flip();
        let push = tape_push(&m).unwrap();
        push.check().unwrap();
        let diag = tape_list_diag(&m).unwrap();
        diag.check().unwrap();
        let lst = tape_list(&m, &[2, 1]).unwrap();
        let t = Term::app(diag.subject().clone(), lst.subject().clone());
        let (got, _) = reduce_to_nf(&t, 1_000_000).unwrap();
        // <{l, l}> = \z. z L L
        let (_, body) = got.as_abs().unwrap();
        let (f, l2) = body.as_app().unwrap();
        let (_, l1) = f.as_app().unwrap();
        assert_eq!(decode_tape_list(&m, l1).unwrap(), vec![2, 1]);
        assert_eq!(decode_tape_list(&m, l2).unwrap(), vec![2, 1]);

        let co = tape_list_coerce(&m).unwrap();
        co.check().unwrap();
        let t = Term::app(co.subject().clone(), tape_list(&m, &[1, 2, 1]).unwrap().subject().clone());
        let (got, _) = reduce_to_nf(&t, 1_000_000).unwrap();
        assert_eq!(decode_tape_list(&m, &got).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn machine_types() {
        let m = bit_flip();
        let d = encode_machine(&m).unwrap();
        let j = d.check().unwrap();
        assert_eq!(
            j.ty,
            Formula::lolli(
                ty_tape_list(&m),
                Formula::par_n(machine_exponent(&m), ty_conf(&m))
            )
        );
    }

    #[test]
    fn machine_runs_short_input() {
        let m = bit_flip();
        let d = encode_machine(&m).unwrap();
        let input = vec![2usize];
        let t = Term::app(d.subject().clone(), tape_list(&m, &input).unwrap().subject().clone());
        let (got, tr) = reduce_to_nf(&t, 30_000_000).unwrap();
        let (_, st, rt) = decode_config(&m, &got).unwrap();
        let sim = tm_simulate(&m, &input, m.clock(input.len() as u64));
        assert_eq!(st, sim.state, "{} steps", tr.len());
        let out: Vec<usize> = rt.iter().copied().take_while(|s| *s != m.blank()).collect();
        assert_eq!(out, sim.output_portion(&m));
    }
}
