//! Configurations, pre-configurations, the transition function, and the
//! iterator that drives the safe-recursion simulation.
//!
//! Slot layout: `1+n` normal rows of `$W` values (row 0 accumulates the
//! rebuilt first argument) and `s` safe rows of `$^m W` values; the result
//! accumulator has type `$^m W`. A pre-configuration pair carries the cons
//! variable, the popped head, and the thunked rebuilt tail; popping applies
//! the row's tail map inside the rebuilt cons, which keeps every substituted
//! argument a value.

use crate::builders::{self, Build, BuildError, DollarSplit};
use crate::data::{self, ty_word};
use crate::derivation::Derivation;
use crate::formula::Formula;
use crate::term::Name;

use super::core::linear_embed;
use super::{eager_use, fr};

fn tv(s: &str) -> Formula {
    Formula::tyvar(s)
}

fn arrow_self(a: &Formula) -> Formula {
    Formula::lolli(a.clone(), a.clone())
}

/// Row element types: `$W` for the `1+n` normal rows, `$^m W` for the safe
/// rows; index `i` ranges over `0..1+n+s`.
pub(crate) fn row_elem(i: usize, n: usize, m: usize) -> Formula {
    if i <= n {
        Formula::par(ty_word())
    } else {
        Formula::par_n(m, ty_word())
    }
}

pub(crate) fn acc_ty(m: usize) -> Formula {
    Formula::par_n(m, ty_word())
}

fn row_alphas(k: usize) -> Vec<Formula> {
    (0..k).map(|i| tv(&format!("a{i}"))).collect()
}

/// Pair type `T[alpha, delta; $A]`: a wrapped triple of the cons to rebuild
/// with, the popped head, and the thunked tail.
pub fn ty_pair(alpha: &Formula, delta: &Formula, elem: &Formula) -> Formula {
    let b = tv("b");
    let cons = Formula::eager(elem.clone(), arrow_self(alpha)).unwrap();
    let tail = Formula::lolli(arrow_self(delta), alpha.clone());
    let spine = Formula::lolli(
        cons,
        Formula::eager(elem.clone(), Formula::lolli(tail, b.clone())).unwrap(),
    );
    Formula::forall("b", Formula::lolli(spine, b)).unwrap()
}

/// Configuration type over the canonical rows.
pub fn ty_config(n: usize, s: usize, m: usize) -> Formula {
    let k = 1 + n + s;
    let alphas = row_alphas(k);
    let g = tv("g");
    let folds: Vec<Formula> = (0..k)
        .map(|i| Formula::bang(Formula::eager(row_elem(i, n, m), arrow_self(&alphas[i])).unwrap()))
        .collect();
    let consumer =
        Formula::eager(acc_ty(m), Formula::lolli_chain(alphas.iter().cloned(), g.clone()))
            .unwrap();
    let inner = Formula::lolli_chain(
        alphas.iter().cloned(),
        Formula::forall("g", Formula::lolli(consumer, g)).unwrap(),
    );
    let body = Formula::lolli_chain(folds, Formula::par(inner));
    let names: Vec<Name> = (0..k).map(|i| Name::new(&format!("a{i}"))).collect();
    Formula::forall_many(&names, body).unwrap()
}

/// Final configuration: the result quantifier moves out.
pub fn ty_final_config(n: usize, s: usize, m: usize) -> Formula {
    let k = 1 + n + s;
    let alphas = row_alphas(k);
    let g = tv("g");
    let folds: Vec<Formula> = (0..k)
        .map(|i| Formula::bang(Formula::eager(row_elem(i, n, m), arrow_self(&alphas[i])).unwrap()))
        .collect();
    let consumer =
        Formula::eager(acc_ty(m), Formula::lolli_chain(alphas.iter().cloned(), g.clone()))
            .unwrap();
    let inner = Formula::lolli_chain(alphas.iter().cloned(), Formula::lolli(consumer, g));
    let body = Formula::lolli_chain(folds, Formula::par(inner));
    let mut names: Vec<Name> = (0..k).map(|i| Name::new(&format!("a{i}"))).collect();
    names.push(Name::new("g"));
    Formula::forall_many(&names, body).unwrap()
}

/// Pre-configuration type over generic row variables.
pub fn ty_preconfig(n: usize, s: usize, m: usize) -> Formula {
    let k = 1 + n + s;
    let alphas = row_alphas(k);
    let d = tv("d");
    let g = tv("g");
    let pairs: Vec<Formula> =
        (0..k).map(|i| ty_pair(&alphas[i], &d, &row_elem(i, n, m))).collect();
    let consumer = Formula::eager(acc_ty(m), Formula::lolli_chain(pairs, g.clone())).unwrap();
    Formula::forall("g", Formula::lolli(consumer, g)).unwrap()
}

/// A closed `$^j W` numeral derivation.
pub(crate) fn lifted_word(v: u64, j: usize) -> Derivation {
    let mut d = data::word_deriv(v);
    for _ in 0..j {
        d = builders::dollar_all_phi(d).unwrap();
    }
    d
}

fn lifted_word_for(v: u64, elem: &Formula) -> Derivation {
    let (j, _) = elem.strip_pars();
    lifted_word(v, j)
}

fn build_config_like(
    r: u64,
    rows: &[Vec<u64>],
    n: usize,
    s: usize,
    m: usize,
    final_cfg: bool,
) -> Result<Derivation, BuildError> {
    let k = 1 + n + s;
    assert_eq!(rows.len(), k, "configuration needs 1+n+s rows");
    let len = rows[0].len();
    if rows.iter().any(|row| row.len() != len) {
        return Err(BuildError::Other("ragged configuration rows".into()));
    }
    let alphas = row_alphas(k);
    let g = tv("g");
    let mut folds = Vec::new();
    let mut copy_groups: Vec<Vec<Name>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let elem = row_elem(i, n, m);
        let cons_ty = Formula::eager(elem.clone(), arrow_self(&alphas[i])).unwrap();
        let w = Name::new(&format!("w{i}"));
        let mut acc = builders::axiom(w, alphas[i].clone())?;
        let mut copies = Vec::new();
        for v in row.iter().rev() {
            let c = fr(&format!("d{i}"));
            copies.push(c.clone());
            let head =
                builders::app(builders::axiom(c, cons_ty.clone())?, lifted_word_for(*v, &elem))?;
            acc = builders::app(head, acc)?;
        }
        copies.reverse();
        copy_groups.push(copies);
        folds.push(acc);
    }
    let x = fr("x");
    let consumer_ty =
        Formula::eager(acc_ty(m), Formula::lolli_chain(alphas.iter().cloned(), g.clone()))
            .unwrap();
    let mut body = builders::app(builders::axiom(x.clone(), consumer_ty)?, lifted_word(r, m))?;
    for f in folds {
        body = builders::app(body, f)?;
    }
    let mut d = builders::lolli_i(body, &x)?;
    if !final_cfg {
        d = builders::forall_i(d, "g")?;
    }
    for i in (0..k).rev() {
        d = builders::lolli_i(d, &Name::new(&format!("w{i}")))?;
    }
    d = builders::dollar_all_phi(d)?;
    for (i, copies) in copy_groups.iter().enumerate().rev() {
        let target = Name::new(&format!("d{i}"));
        let elem = row_elem(i, n, m);
        let cons_ty = Formula::eager(elem, arrow_self(&alphas[i])).unwrap();
        d = match copies.len() {
            0 => builders::lolli_i_bang_fake(d, &target, cons_ty)?,
            1 => builders::lolli_i_bang(d, &copies[0])?,
            _ => {
                let d2 = builders::contract_group(d, copies, &target)?;
                builders::lolli_i_bang(d2, &target)?
            }
        };
    }
    let mut names: Vec<Name> = (0..k).map(|i| Name::new(&format!("a{i}"))).collect();
    if final_cfg {
        names.push(Name::new("g"));
    }
    builders::forall_i_many(d, &names)
}

/// Canonical configuration realizer over the given row values.
pub fn make_configuration(
    r: u64,
    rows: &[Vec<u64>],
    n: usize,
    s: usize,
    m: usize,
) -> Result<Derivation, BuildError> {
    build_config_like(r, rows, n, s, m, false)
}

/// The same realizer typed at the final-configuration type.
pub fn make_final_configuration(
    r: u64,
    rows: &[Vec<u64>],
    n: usize,
    s: usize,
    m: usize,
) -> Result<Derivation, BuildError> {
    build_config_like(r, rows, n, s, m, true)
}

/// Canonical pre-configuration realizer. The cons variables `c<i>_<j>`, the
/// fold bases `w<i>`, and the row values appear exactly as in the typing
/// rule: cons and bases stay free linear assumptions.
pub fn make_preconfiguration(
    r: u64,
    rows: &[Vec<u64>],
    n: usize,
    s: usize,
    m: usize,
) -> Result<Derivation, BuildError> {
    let k = 1 + n + s;
    assert_eq!(rows.len(), k);
    let len = rows[0].len();
    if rows.iter().any(|row| row.len() != len) || len == 0 {
        return Err(BuildError::Other(
            "pre-configuration rows must share a positive length".into(),
        ));
    }
    let alphas = row_alphas(k);
    let d_ty = tv("d");
    let g = tv("g");
    let mut pairs = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let elem = row_elem(i, n, m);
        let cons_ty = Formula::eager(elem.clone(), arrow_self(&alphas[i])).unwrap();
        let w = Name::new(&format!("w{i}"));
        let mut acc = builders::axiom(w, alphas[i].clone())?;
        for (j, v) in row.iter().enumerate().skip(1).rev() {
            let c = Name::new(&format!("c{i}_{j}"));
            let head =
                builders::app(builders::axiom(c, cons_ty.clone())?, lifted_word_for(*v, &elem))?;
            acc = builders::app(head, acc)?;
        }
        let f = fr("f");
        let tail = builders::lolli_i_fake(acc, &f, arrow_self(&d_ty))?;
        let t = fr("t");
        let bpair = tv("b");
        let tail_ty = Formula::lolli(arrow_self(&d_ty), alphas[i].clone());
        let spine_ty = Formula::lolli(
            cons_ty.clone(),
            Formula::eager(elem.clone(), Formula::lolli(tail_ty, bpair.clone())).unwrap(),
        );
        let body = builders::app(
            builders::app(
                builders::app(
                    builders::axiom(t.clone(), spine_ty)?,
                    builders::axiom(Name::new(&format!("c{i}_0")), cons_ty.clone())?,
                )?,
                lifted_word_for(row[0], &elem),
            )?,
            tail,
        )?;
        let pair = builders::forall_i(builders::lolli_i(body, &t)?, "b")?;
        pairs.push(pair);
    }
    let x = fr("x");
    let pair_tys: Vec<Formula> =
        (0..k).map(|i| ty_pair(&alphas[i], &d_ty, &row_elem(i, n, m))).collect();
    let consumer_ty = Formula::eager(acc_ty(m), Formula::lolli_chain(pair_tys, g.clone())).unwrap();
    let mut body = builders::app(builders::axiom(x.clone(), consumer_ty)?, lifted_word(r, m))?;
    for p in pairs {
        body = builders::app(body, p)?;
    }
    let d = builders::lolli_i(body, &x)?;
    builders::forall_i(d, "g")
}

/// `Ba = \y x. x (\h t. t) B0 (\f. y) : a -o T[a, d; $^m W]` — base pair.
pub fn ba_ht(m: usize, alpha: &Formula) -> Build {
    let delta = tv("d");
    let m = m.max(1);
    let elem = Formula::par_n(m, ty_word());
    let cons_ty = Formula::eager(elem.clone(), arrow_self(alpha)).unwrap();
    let y = fr("y");
    let x = fr("x");
    let t0 = fr("t");
    let h0 = fr("h");
    let dead = builders::lolli_i(builders::axiom(t0.clone(), alpha.clone())?, &t0)?;
    let dead = builders::eager_i_fake(dead, &h0, Formula::par_n(m - 1, ty_word()))?;
    let b = tv("b");
    let tail_ty = Formula::lolli(arrow_self(&delta), alpha.clone());
    let spine_ty = Formula::lolli(
        cons_ty,
        Formula::eager(elem.clone(), Formula::lolli(tail_ty, b.clone())).unwrap(),
    );
    let f = fr("f");
    let thunk = builders::lolli_i_fake(
        builders::axiom(y.clone(), alpha.clone())?,
        &f,
        arrow_self(&delta),
    )?;
    let body = builders::app(
        builders::app(
            builders::app(builders::axiom(x.clone(), spine_ty)?, dead)?,
            lifted_word_for(0, &elem),
        )?,
        thunk,
    )?;
    let d = builders::forall_i(builders::lolli_i(body, &x)?, "b")?;
    builders::lolli_i(d, &y)
}

/// `St[F] = \c a t x. x c a (\f. t (\c' a' l'. c' (L[F] a') (l' I)))` —
/// step pair: pops `a`, stores the cons, maps `F` over the tail at pop time.
pub fn st_ht(f: Derivation, m: usize, alpha: &Formula) -> Build {
    let delta = tv("d");
    let m = m.max(1);
    let elem = Formula::par_n(m, ty_word());
    let cons_ty = Formula::eager(elem.clone(), arrow_self(alpha)).unwrap();
    let pair_ty = ty_pair(alpha, &delta, &elem);
    let c = fr("c");
    let a = fr("a");
    let t = fr("t");
    let x = fr("x");
    let c2 = fr("c'");
    let a2 = fr("a'");
    let l2 = fr("l'");
    let lf = linear_embed(f, m, 1)?;
    let mapped = builders::app(lf, eager_use(a2.clone(), &elem)?)?;
    let tail_ty = Formula::lolli(arrow_self(&delta), alpha.clone());
    let inner = builders::app(
        builders::app(builders::axiom(c2.clone(), cons_ty.clone())?, mapped)?,
        builders::app(
            builders::axiom(l2.clone(), tail_ty.clone())?,
            builders::identity(delta.clone())?,
        )?,
    )?;
    let inner = builders::lolli_i(inner, &l2)?;
    let inner = builders::eager_i(inner, &a2)?;
    let inner = builders::lolli_i(inner, &c2)?;
    let f2 = fr("f");
    let t_inst = builders::forall_e(builders::axiom(t.clone(), pair_ty.clone())?, alpha.clone())?;
    let forced = builders::app(t_inst, inner)?;
    let thunk = builders::lolli_i_fake(forced, &f2, arrow_self(&delta))?;
    let b = tv("b");
    let spine_ty = Formula::lolli(
        cons_ty.clone(),
        Formula::eager(elem.clone(), Formula::lolli(tail_ty, b.clone())).unwrap(),
    );
    let body = builders::app(
        builders::app(
            builders::app(
                builders::axiom(x.clone(), spine_ty)?,
                builders::axiom(c.clone(), cons_ty.clone())?,
            )?,
            eager_use(a.clone(), &elem)?,
        )?,
        thunk,
    )?;
    let d = builders::forall_i(builders::lolli_i(body, &x)?, "b")?;
    let d = builders::lolli_i(d, &t)?;
    let d = builders::eager_i(d, &a)?;
    builders::lolli_i(d, &c)
}

/// `C2PC[F]`: pops every row of a configuration once, mapping `F` over the
/// first row's tail, and delivers the function producing the
/// pre-configuration once the fold bases arrive.
pub fn c2pc(f: Derivation, n: usize, s: usize, m: usize) -> Build {
    let k = 1 + n + s;
    let alphas = row_alphas(k);
    let delta = tv("d");
    let x = fr("x");
    let pair_tys: Vec<Formula> =
        (0..k).map(|i| ty_pair(&alphas[i], &delta, &row_elem(i, n, m))).collect();
    let x_inst =
        builders::forall_e_many(builders::axiom(x.clone(), ty_config(n, s, m))?, &pair_tys)?;
    let mut fold = x_inst;
    let mut dnames = Vec::new();
    for (i, alpha) in alphas.iter().enumerate() {
        let mexp = if i <= n { 1 } else { m };
        let step = if i == 0 {
            st_ht(f.clone(), mexp, alpha)?
        } else {
            st_ht(builders::identity(ty_word())?, mexp, alpha)?
        };
        let dv = fr(&format!("d{i}"));
        let boxed = builders::bang(
            builders::app(
                step,
                builders::axiom(
                    dv.clone(),
                    Formula::eager(row_elem(i, n, m), arrow_self(alpha)).unwrap(),
                )?,
            )?,
            Some(&dv),
        )?;
        fold = builders::app(fold, boxed)?;
        dnames.push(dv);
    }
    let bvar = fr("b");
    let sc = ty_preconfig(n, s, m);
    let b_ty = Formula::lolli_chain(pair_tys.clone(), sc.clone());
    let mut body = builders::axiom(bvar.clone(), b_ty)?;
    for (i, alpha) in alphas.iter().enumerate() {
        let mexp = if i <= n { 1 } else { m };
        let ba = ba_ht(mexp, alpha)?;
        let w = Name::new(&format!("w{i}"));
        body = builders::app(body, builders::app(ba, builders::axiom(w, alpha.clone())?)?)?;
    }
    let mut inner = body;
    for i in (0..k).rev() {
        inner = builders::lolli_i(inner, &Name::new(&format!("w{i}")))?;
    }
    let inner =
        builders::dollar(inner, &DollarSplit { to_delta: vec![bvar.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &bvar)?;
    let mut d = builders::app(inner, fold)?;
    for dv in dnames.iter().rev() {
        d = builders::lolli_i_bang(d, dv)?;
    }
    builders::lolli_i(d, &x)
}

/// `PC2C[F']`: consumes a pre-configuration, computes the new accumulator
/// with `F'` on the popped heads, forces the rebuilt tails, and hands
/// everything to a continuation.
pub fn pc2c(fprime: Derivation, n: usize, s: usize, m: usize) -> Build {
    let k = 1 + n + s;
    let alphas = row_alphas(k);
    let delta = tv("d");
    let g = tv("g");
    let x = fr("x");
    let acc = acc_ty(m);
    let cont_ty =
        Formula::eager(acc.clone(), Formula::lolli_chain(alphas.iter().cloned(), g.clone()))
            .unwrap();
    let conses: Vec<Name> = (0..k).map(|i| fr(&format!("hc{i}"))).collect();
    let heads: Vec<Name> = (0..k).map(|i| fr(&format!("hn{i}"))).collect();
    let tails: Vec<Name> = (0..k).map(|i| fr(&format!("ht{i}"))).collect();
    let r = fr("r");
    let xx = fr("xx");
    let mut new_acc = fprime;
    for (i, h) in heads.iter().enumerate() {
        new_acc = builders::app(new_acc, eager_use(h.clone(), &row_elem(i, n, m))?)?;
    }
    new_acc = builders::app(new_acc, eager_use(r.clone(), &acc)?)?;
    let mut hbody = builders::app(builders::axiom(xx.clone(), cont_ty.clone())?, new_acc)?;
    for (i, t) in tails.iter().enumerate() {
        let tail_ty = Formula::lolli(arrow_self(&delta), alphas[i].clone());
        hbody = builders::app(
            hbody,
            builders::app(builders::axiom(t.clone(), tail_ty)?, builders::identity(delta.clone())?)?,
        )?;
    }
    let mut h = builders::lolli_i(hbody, &xx)?;
    for i in (0..k).rev() {
        let cons_ty = Formula::eager(row_elem(i, n, m), arrow_self(&alphas[i])).unwrap();
        h = builders::lolli_i(h, &tails[i])?;
        h = builders::eager_i(h, &heads[i])?;
        h = builders::lolli_i_fake(h, &conses[i], cons_ty)?;
    }
    // consumer spine types, innermost first
    let final_ty = Formula::lolli(cont_ty.clone(), g.clone());
    let mut remaining = vec![final_ty.clone()];
    for i in (0..k).rev() {
        let elem = row_elem(i, n, m);
        let cons_ty = Formula::eager(elem.clone(), arrow_self(&alphas[i])).unwrap();
        let tail_ty = Formula::lolli(arrow_self(&delta), alphas[i].clone());
        let last = remaining.last().unwrap().clone();
        remaining.push(Formula::lolli(
            cons_ty,
            Formula::eager(elem, Formula::lolli(tail_ty, last)).unwrap(),
        ));
    }
    remaining.reverse(); // remaining[i] = consumer type expected by pair i
    let tvars: Vec<Name> = (0..k).map(|i| fr(&format!("t{i}"))).collect();
    let mut chain = h;
    for i in 0..k {
        let pair_ty = ty_pair(&alphas[i], &delta, &row_elem(i, n, m));
        let inst_at = if i + 1 < k { remaining[i + 1].clone() } else { final_ty.clone() };
        let t_inst = builders::forall_e(builders::axiom(tvars[i].clone(), pair_ty)?, inst_at)?;
        chain = builders::app(t_inst, chain)?;
    }
    let mut consumer = chain;
    for t in tvars.iter().rev() {
        consumer = builders::lolli_i(consumer, t)?;
    }
    let consumer = builders::eager_i(consumer, &r)?;
    let x_inst =
        builders::forall_e(builders::axiom(x.clone(), ty_preconfig(n, s, m))?, final_ty)?;
    let d = builders::app(x_inst, consumer)?;
    builders::lolli_i(d, &x)
}

/// `C2C[F, F'] : C -o C` — one full transition.
pub fn c2c(f: Derivation, fprime: Derivation, n: usize, s: usize, m: usize) -> Build {
    let k = 1 + n + s;
    let alphas = row_alphas(k);
    let x = fr("x");
    let c2pc_d = c2pc(f, n, s, m)?;
    let pc2c_d = pc2c(fprime, n, s, m)?;
    let mut fold = builders::app(c2pc_d, builders::axiom(x.clone(), ty_config(n, s, m))?)?;
    let mut dnames = Vec::new();
    for (i, alpha) in alphas.iter().enumerate() {
        let dv = fr(&format!("d{i}"));
        let cons_ty = Formula::eager(row_elem(i, n, m), arrow_self(alpha)).unwrap();
        fold = builders::app(fold, builders::phi_var(dv.clone(), cons_ty)?)?;
        dnames.push(dv);
    }
    let bvar = fr("b");
    let sc = ty_preconfig(n, s, m);
    let b_ty = Formula::lolli_chain(alphas.iter().cloned(), sc);
    let mut body = builders::axiom(bvar.clone(), b_ty)?;
    for (i, alpha) in alphas.iter().enumerate() {
        let w = Name::new(&format!("w{i}"));
        body = builders::app(body, builders::axiom(w, alpha.clone())?)?;
    }
    let mut inner = builders::app(pc2c_d, body)?;
    inner = builders::forall_i(inner, "g")?;
    for i in (0..k).rev() {
        inner = builders::lolli_i(inner, &Name::new(&format!("w{i}")))?;
    }
    let inner =
        builders::dollar(inner, &DollarSplit { to_delta: vec![bvar.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &bvar)?;
    let mut d = builders::app(inner, fold)?;
    for dv in dnames.iter().rev() {
        d = builders::lolli_i_bang(d, dv)?;
    }
    let names: Vec<Name> = (0..k).map(|i| Name::new(&format!("a{i}"))).collect();
    let d = builders::forall_i_many(d, &names)?;
    builders::lolli_i(d, &x)
}

/// `\h0 .. hk r. r` — a step function that keeps the accumulator; used by
/// tests and as the trivial transition payload.
pub fn acc_projector(n: usize, s: usize, m: usize) -> Build {
    let k = 1 + n + s;
    let r = fr("r");
    let acc = acc_ty(m);
    let mut d = eager_use(r.clone(), &acc)?;
    d = builders::eager_i(d, &r)?;
    for i in (0..k).rev() {
        let h = fr(&format!("h{i}"));
        let elem = row_elem(i, n, m);
        let (j, _) = elem.strip_pars();
        d = builders::eager_i_fake(d, &h, Formula::par_n(j - 1, ty_word()))?;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::core::ws1;
    use crate::reduction::{nf, reduce_to_nf};
    use crate::term::Term;

    #[test]
    fn configuration_realizers_check() {
        let d = make_configuration(3, &[vec![0, 0], vec![5, 5]], 0, 1, 2).unwrap();
        let j = d.check().unwrap();
        assert_eq!(j.ty, ty_config(0, 1, 2));
        assert!(j.gamma.is_empty() && j.e.is_empty());

        let f = make_final_configuration(3, &[vec![0, 0], vec![5, 5]], 0, 1, 2).unwrap();
        assert_eq!(f.check().unwrap().ty, ty_final_config(0, 1, 2));

        let p = make_preconfiguration(3, &[vec![1, 2], vec![7, 7]], 0, 1, 2).unwrap();
        let j = p.check().unwrap();
        assert_eq!(j.ty, ty_preconfig(0, 1, 2));
        // cons and base variables stay linear assumptions
        assert!(!j.gamma.is_empty());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(make_configuration(0, &[vec![1, 2], vec![3]], 0, 1, 1).is_err());
    }

    #[test]
    fn pair_combinators_check() {
        let a0 = tv("a0");
        ba_ht(1, &a0).unwrap().check().unwrap();
        st_ht(ws1().unwrap(), 1, &a0).unwrap().check().unwrap();
        st_ht(builders::identity(ty_word()).unwrap(), 2, &a0).unwrap().check().unwrap();
    }

    #[test]
    fn transition_combinators_check() {
        c2pc(ws1().unwrap(), 0, 0, 1).unwrap().check().unwrap();
        let fp = acc_projector(0, 0, 1).unwrap();
        pc2c(fp.clone(), 0, 0, 1).unwrap().check().unwrap();
        let t = c2c(ws1().unwrap(), fp, 0, 0, 1).unwrap();
        let j = t.check().unwrap();
        assert_eq!(j.ty, Formula::lolli(ty_config(0, 0, 1), ty_config(0, 0, 1)));
    }

    #[test]
    fn transition_dynamics_one_round() {
        // C2C[Ws1, keep-acc] pops one element per row and appends a 1 digit
        // to the first row's tail.
        let fp = acc_projector(0, 0, 1).unwrap();
        let t = c2c(ws1().unwrap(), fp, 0, 0, 1).unwrap();
        let conf = make_configuration(6, &[vec![0, 0, 0]], 0, 0, 1).unwrap();
        let started = Term::app(t.subject().clone(), conf.subject().clone());
        let (got, _) = reduce_to_nf(&started, 400_000).unwrap();
        let want = make_configuration(6, &[vec![1, 1]], 0, 0, 1).unwrap();
        assert_eq!(got, nf(want.subject()));
    }
}

// ---------------------------------------------------------------------------
// Building and consuming configurations
// ---------------------------------------------------------------------------

/// `L2C`: one list per row becomes the initial configuration.
pub fn l2c(n: usize, s: usize, m: usize) -> Build {
    let k = 1 + n + s;
    let alphas = row_alphas(k);
    let g = tv("g");
    let lnames: Vec<Name> = (0..k).map(|i| fr(&format!("l{i}"))).collect();
    let dnames: Vec<Name> = (0..k).map(|i| fr(&format!("d{i}"))).collect();
    let bnames: Vec<Name> = (0..k).map(|i| fr(&format!("b{i}"))).collect();
    // inside the box: \w... \x. x B0 (b0 w0) ... (bk wk)
    let x = fr("x");
    let consumer_ty =
        Formula::eager(acc_ty(m), Formula::lolli_chain(alphas.iter().cloned(), g.clone()))
            .unwrap();
    let mut body = builders::app(builders::axiom(x.clone(), consumer_ty)?, lifted_word(0, m))?;
    for i in 0..k {
        let w = Name::new(&format!("w{i}"));
        body = builders::app(
            body,
            builders::app(
                builders::axiom(bnames[i].clone(), arrow_self(&alphas[i]))?,
                builders::axiom(w, alphas[i].clone())?,
            )?,
        )?;
    }
    let mut inner = builders::lolli_i(body, &x)?;
    inner = builders::forall_i(inner, "g")?;
    for i in (0..k).rev() {
        inner = builders::lolli_i(inner, &Name::new(&format!("w{i}")))?;
    }
    let inner = builders::dollar(
        inner,
        &DollarSplit { to_delta: bnames.clone(), to_theta: vec![] },
    )?;
    let mut inner = inner;
    for b in bnames.iter().rev() {
        inner = builders::lolli_i_dollar(inner, b)?;
    }
    // apply to the list folds l_i d_i
    let mut d = inner;
    for i in 0..k {
        let elem = row_elem(i, n, m);
        let cons_ty = Formula::eager(elem.clone(), arrow_self(&alphas[i])).unwrap();
        let li_inst = builders::forall_e(
            builders::axiom(lnames[i].clone(), data::ty_list(&elem))?,
            alphas[i].clone(),
        )?;
        let fold = builders::app(li_inst, builders::phi_var(dnames[i].clone(), cons_ty)?)?;
        d = builders::app(d, fold)?;
    }
    for dv in dnames.iter().rev() {
        d = builders::lolli_i_bang(d, dv)?;
    }
    let anames: Vec<Name> = (0..k).map(|i| Name::new(&format!("a{i}"))).collect();
    d = builders::forall_i_many(d, &anames)?;
    for l in lnames.iter().rev() {
        d = builders::lolli_i(d, l)?;
    }
    Ok(d)
}

/// `W2C`: replicates the first argument, measures it, and builds the initial
/// configuration whose rows all have length `|w| + 1`.
pub fn w2c(n: usize, s: usize, m: usize) -> Build {
    let k = 1 + n + s;
    let w = fr("w");
    let nnames: Vec<Name> = (1..=n).map(|i| fr(&format!("n{i}"))).collect();
    let snames: Vec<Name> = (1..=s).map(|j| fr(&format!("s{j}"))).collect();
    // tensor consumer \k0 ... kq. L2C (S2L ...) ...
    let knames: Vec<Name> = (0..k).map(|i| fr(&format!("k{i}"))).collect();
    let mut d = l2c(n, s, m)?;
    for i in 0..k {
        let elem = row_elem(i, n, m);
        let s2l_d = super::core::s2l(&elem)?;
        let count = builders::app(
            super::core::ss()?,
            builders::app(
                super::core::w2s()?,
                builders::axiom(knames[i].clone(), ty_word())?,
            )?,
        )?;
        let seed = if i == 0 {
            let (j, _) = elem.strip_pars();
            let seed_judgment = lifted_word(0, j + 1);
            builders::app(s2l_d, seed_judgment)?
        } else if i <= n {
            builders::app(s2l_d, eager_use(nnames[i - 1].clone(), &Formula::par(elem.clone()))?)?
        } else {
            builders::app(
                s2l_d,
                eager_use(snames[i - n - 1].clone(), &Formula::par(elem.clone()))?,
            )?
        };
        d = builders::app(d, builders::app(seed, count)?)?;
    }
    // eliminate the diagonal tensor
    let tuple_ty = data::ty_tensor(&vec![ty_word(); k]);
    let t = fr("t");
    let mut consumer = d;
    for kn in knames.iter().rev() {
        consumer = builders::lolli_i(consumer, kn)?;
    }
    let body = builders::app(
        builders::forall_e(builders::axiom(t.clone(), tuple_ty)?, ty_config(n, s, m))?,
        consumer,
    )?;
    let inner =
        builders::dollar(body, &DollarSplit { to_delta: vec![t.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &t)?;
    let diag_d = super::core::diag(k)?;
    let mut d = builders::app(
        inner,
        builders::app(diag_d, builders::axiom(w.clone(), ty_word())?)?,
    )?;
    d = builders::lolli_i(d, &w)?;
    for sj in snames.iter().rev() {
        d = builders::eager_i(d, sj)?;
    }
    for ni in nnames.iter().rev() {
        d = builders::eager_i(d, ni)?;
    }
    Ok(d)
}

/// `C2FC : C -o FC` — pushes the result quantifier out.
pub fn c2fc(n: usize, s: usize, m: usize) -> Build {
    let k = 1 + n + s;
    let alphas = row_alphas(k);
    let g = tv("g");
    let c = fr("c");
    let mut fold = builders::axiom(c.clone(), ty_config(n, s, m))?;
    let alpha_formulas: Vec<Formula> = alphas.clone();
    fold = builders::forall_e_many(fold, &alpha_formulas)?;
    let mut dnames = Vec::new();
    for (i, alpha) in alphas.iter().enumerate() {
        let dv = fr(&format!("d{i}"));
        let cons_ty = Formula::eager(row_elem(i, n, m), arrow_self(alpha)).unwrap();
        fold = builders::app(fold, builders::phi_var(dv.clone(), cons_ty)?)?;
        dnames.push(dv);
    }
    let bvar = fr("b");
    let consumer_ty =
        Formula::eager(acc_ty(m), Formula::lolli_chain(alphas.iter().cloned(), g.clone()))
            .unwrap();
    let inner_fn_ty = Formula::lolli_chain(
        alphas.iter().cloned(),
        Formula::forall("g", Formula::lolli(consumer_ty.clone(), g.clone())).unwrap(),
    );
    let mut body = builders::axiom(bvar.clone(), inner_fn_ty)?;
    for (i, alpha) in alphas.iter().enumerate() {
        let w = Name::new(&format!("w{i}"));
        body = builders::app(body, builders::axiom(w, alpha.clone())?)?;
    }
    let body = builders::forall_e(body, g.clone())?;
    let mut inner = body;
    for i in (0..k).rev() {
        inner = builders::lolli_i(inner, &Name::new(&format!("w{i}")))?;
    }
    let inner =
        builders::dollar(inner, &DollarSplit { to_delta: vec![bvar.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &bvar)?;
    let mut d = builders::app(inner, fold)?;
    for dv in dnames.iter().rev() {
        d = builders::lolli_i_bang(d, dv)?;
    }
    let mut names: Vec<Name> = (0..k).map(|i| Name::new(&format!("a{i}"))).collect();
    names.push(Name::new("g"));
    let d = builders::forall_i_many(d, &names)?;
    builders::lolli_i(d, &c)
}

/// `FC2W : FC -o $^{m+1} W` — reads the accumulator out of a final
/// configuration. Rows and result instantiate at thunked accumulators
/// `(d -o d) -o $^j W`, which keeps the substituends linear.
pub fn fc2w(n: usize, s: usize, m: usize) -> Build {
    let k = 1 + n + s;
    let c = fr("c");
    let acc = acc_ty(m);
    let delta = tv("d");
    let thunked = |inner: Formula| Formula::lolli(arrow_self(&delta), inner);
    let insts: Vec<Formula> =
        (0..k).map(|i| thunked(row_elem(i, n, m))).collect();
    let result_inst = thunked(acc.clone());
    let mut fold = builders::forall_e_many(
        builders::axiom(c.clone(), ty_final_config(n, s, m))?,
        &insts,
    )?;
    fold = builders::forall_e(fold, result_inst.clone())?;
    for i in 0..k {
        // K = \x y f. x : $A =o ((d -o d) -o $A) -o ((d -o d) -o $A)
        let elem = row_elem(i, n, m);
        let xv = fr("x");
        let yv = fr("y");
        let fv = fr("f");
        let kbody = eager_use(xv.clone(), &elem)?;
        let kbody = builders::lolli_i_fake(kbody, &fv, arrow_self(&delta))?;
        let kbody = builders::lolli_i_fake(kbody, &yv, insts[i].clone())?;
        let kd = builders::eager_i(kbody, &xv)?;
        fold = builders::app(fold, builders::bang(kd, None)?)?;
    }
    // \b. b (\f.B0) ... (\r xs f. r) I
    let bvar = fr("b");
    let consumer_inner_ty = Formula::eager(
        acc.clone(),
        Formula::lolli_chain(insts.iter().cloned(), result_inst.clone()),
    )
    .unwrap();
    let b_ty = Formula::lolli_chain(
        insts.iter().cloned(),
        Formula::lolli(consumer_inner_ty.clone(), result_inst.clone()),
    );
    let mut body = builders::axiom(bvar.clone(), b_ty)?;
    for (i, _) in insts.iter().enumerate() {
        let elem = row_elem(i, n, m);
        let (j, _) = elem.strip_pars();
        let fv = fr("f");
        body = builders::app(
            body,
            builders::lolli_i_fake(lifted_word(0, j), &fv, arrow_self(&delta))?,
        )?;
    }
    let r = fr("r");
    let fv = fr("f");
    let mut last = eager_use(r.clone(), &acc)?;
    last = builders::lolli_i_fake(last, &fv, arrow_self(&delta))?;
    for (i, inst) in insts.iter().enumerate().rev() {
        let _ = i;
        let xv = fr("x");
        last = builders::lolli_i_fake(last, &xv, inst.clone())?;
    }
    let last = builders::eager_i(last, &r)?;
    let body = builders::app(body, last)?;
    let body = builders::app(body, builders::identity(delta.clone())?)?;
    let inner =
        builders::dollar(body, &DollarSplit { to_delta: vec![bvar.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &bvar)?;
    let d = builders::app(inner, fold)?;
    builders::lolli_i(d, &c)
}

/// The step-function interface expected by the iterator and by the
/// transition payloads: `$W =o ($W =o)^n ($^m W =o)^s $^m W =o $^m W`.
pub fn step_fn_ty(n: usize, s: usize, m: usize) -> Formula {
    let mut args = vec![Formula::par(ty_word())];
    args.extend(std::iter::repeat(Formula::par(ty_word())).take(n));
    args.extend(std::iter::repeat(Formula::par_n(m, ty_word())).take(s));
    args.push(acc_ty(m));
    Formula::eager_chain(args, acc_ty(m))
}

/// The iterator: `It[G0, G1, G2]` replays the binary digits of its first
/// argument, running `G2` once to seed the accumulator from the base row and
/// `G_digit` per digit thereafter.
pub fn it(g0: Derivation, g1: Derivation, g2: Derivation, n: usize, s: usize, m: usize) -> Build {
    for g in [&g0, &g1, &g2] {
        if g.ty() != &step_fn_ty(n, s, m) {
            return Err(BuildError::Other(format!(
                "iterator payload has type {}, want {}",
                g.ty(),
                step_fn_ty(n, s, m)
            )));
        }
    }
    let cfg = ty_config(n, s, m);
    let nv = fr("n");
    let nnames: Vec<Name> = (1..=n).map(|i| fr(&format!("n{i}"))).collect();
    let snames: Vec<Name> = (1..=s).map(|j| fr(&format!("s{j}"))).collect();
    // INNER = \t v... u... . [2 boxes [ t-elim (\a b. ...) ]]
    let t = fr("t");
    let vnames: Vec<Name> = (1..=n).map(|i| fr(&format!("v{i}"))).collect();
    let unames: Vec<Name> = (1..=s).map(|j| fr(&format!("u{j}"))).collect();
    let a = fr("a");
    let b = fr("b");
    let z = fr("z");
    let y = fr("y");
    // \z y. FC2W (C2FC (z (C2C[I, G2] y)))
    let base_step = c2c(builders::identity(ty_word())?, g2, n, s, m)?;
    let zy_core = builders::app(base_step, builders::axiom(y.clone(), cfg.clone())?)?;
    let zy_core = builders::app(
        builders::axiom(z.clone(), Formula::lolli(cfg.clone(), cfg.clone()))?,
        zy_core,
    )?;
    let zy_core = builders::app(c2fc(n, s, m)?, zy_core)?;
    let zy_core = builders::app(fc2w(n, s, m)?, zy_core)?;
    let zy_core = builders::dollar(
        zy_core,
        &DollarSplit { to_delta: vec![z.clone(), y.clone()], to_theta: vec![] },
    )?;
    let zy = builders::lolli_i_dollar(builders::lolli_i_dollar(zy_core, &y)?, &z)?;
    // a C2C[Ws0,G0] C2C[Ws1,G1]
    let a_inst = builders::forall_e(builders::axiom(a.clone(), ty_word())?, cfg.clone())?;
    let a_fold = builders::app(
        builders::app(
            a_inst,
            builders::bang(c2c(super::core::ws0()?, g0, n, s, m)?, None)?,
        )?,
        builders::bang(c2c(super::core::ws1()?, g1, n, s, m)?, None)?,
    )?;
    // W2C v... u... b
    let mut w2c_part = w2c(n, s, m)?;
    for v in &vnames {
        w2c_part = builders::app(w2c_part, eager_use(v.clone(), &Formula::par_n(3, ty_word()))?)?;
    }
    for u in &unames {
        w2c_part =
            builders::app(w2c_part, eager_use(u.clone(), &Formula::par_n(m + 2, ty_word()))?)?;
    }
    w2c_part = builders::app(w2c_part, builders::axiom(b.clone(), ty_word())?)?;
    let consumer = builders::app(builders::app(zy, a_fold)?, w2c_part)?;
    let fthunk = fr("f");
    let delta = tv("d");
    let consumer = builders::lolli_i_fake(consumer, &fthunk, arrow_self(&delta))?;
    let consumer = builders::lolli_i(consumer, &b)?;
    let consumer = builders::lolli_i(consumer, &a)?;
    // t-elim at the thunked result type, forced with the identity
    let pair_ty = data::ty_tensor(&[ty_word(), ty_word()]);
    let inst = Formula::lolli(arrow_self(&delta), Formula::par_n(m + 2, ty_word()));
    let core = builders::app(
        builders::app(
            builders::forall_e(builders::axiom(t.clone(), pair_ty)?, inst)?,
            consumer,
        )?,
        builders::identity(delta.clone())?,
    )?;
    let core =
        builders::dollar(core, &DollarSplit { to_delta: vec![t.clone()], to_theta: vec![] })?;
    let core = builders::dollar(core, &DollarSplit::default())?;
    let mut inner = core;
    for u in unames.iter().rev() {
        inner = builders::eager_i(inner, u)?;
    }
    for v in vnames.iter().rev() {
        inner = builders::eager_i(inner, v)?;
    }
    inner = builders::lolli_i_dollar(inner, &t)?;
    // apply INNER to the replicated and coerced arguments
    let diag_part = builders::app(
        super::core::linear_embed(super::core::diag(2)?, 1, 1)?,
        builders::theta_var(nv.clone(), ty_word())?,
    )?;
    let mut d = builders::app(inner, diag_part)?;
    for ni in &nnames {
        let coerced = builders::app(
            super::core::linear_embed(super::core::coerce(4)?, 1, 1)?,
            builders::theta_var(ni.clone(), ty_word())?,
        )?;
        d = builders::app(d, coerced)?;
    }
    for sj in &snames {
        d = builders::app(d, eager_use(sj.clone(), &Formula::par_n(m + 4, ty_word()))?)?;
    }
    for sj in snames.iter().rev() {
        d = builders::eager_i(d, sj)?;
    }
    for ni in nnames.iter().rev() {
        d = builders::eager_i(d, ni)?;
    }
    builders::eager_i(d, &nv)
}

#[cfg(test)]
mod iterator_tests {
    use super::*;
    use crate::data::{decode_word, encode_word};
    use crate::reduction::reduce_to_nf;
    use crate::term::Term;

    #[test]
    fn building_blocks_check() {
        l2c(0, 0, 1).unwrap().check().unwrap();
        w2c(0, 0, 1).unwrap().check().unwrap();
        c2fc(0, 0, 1).unwrap().check().unwrap();
        fc2w(0, 0, 1).unwrap().check().unwrap();
        l2c(1, 1, 2).unwrap().check().unwrap();
    }

    #[test]
    fn fc2w_reads_accumulator() {
        let fc = make_final_configuration(13, &[vec![2, 4]], 0, 0, 1).unwrap();
        let d = fc2w(0, 0, 1).unwrap();
        d.check().unwrap();
        let t = Term::app(d.subject().clone(), fc.subject().clone());
        let (got, _) = reduce_to_nf(&t, 400_000).unwrap();
        assert_eq!(decode_word(&got).unwrap(), 13);
    }

    /// G2 := \h r. h (seed from the base row head), G0/G1 := successors of
    /// the accumulator; iterating over the digits of `w` computes a word.
    #[test]
    fn iterator_runs_simple_program() {
        // step functions: keep the accumulator for the base, then per digit
        // double / double-plus-one it: It[G0,G1,G2] B_w () == rebuilds w.
        let m = 1;
        // G2 = \h r. h  (accumulator := popped head of row 0 = B0)
        let h = fr("h");
        let r = fr("r");
        let g2 = {
            let d = eager_use(h.clone(), &Formula::par(ty_word())).unwrap();
            let d = builders::eager_i_fake(d, &r, ty_word()).unwrap();
            builders::eager_i(d, &h).unwrap()
        };
        assert_eq!(g2.ty(), &step_fn_ty(0, 0, m));
        // G_digit = \h r. [Ws_digit]^1_B r
        let mk_g = |s: Derivation| -> Derivation {
            let h = fr("h");
            let r = fr("r");
            let d = builders::app(
                super::super::core::basic_embed(s, 1).unwrap(),
                eager_use(r.clone(), &Formula::par(ty_word())).unwrap(),
            )
            .unwrap();
            let d = builders::eager_i(d, &r).unwrap();
            builders::eager_i_fake(d, &h, ty_word()).unwrap()
        };
        let g0 = mk_g(super::super::core::ws0().unwrap());
        let g1 = mk_g(super::super::core::ws1().unwrap());
        assert_eq!(g0.ty(), &step_fn_ty(0, 0, m));
        let itd = it(g0, g1, g2, 0, 0, m).unwrap();
        itd.check().unwrap();
        for w in [0u64, 1, 2, 5] {
            let t = Term::app(itd.subject().clone(), encode_word(w));
            let (got, tr) = reduce_to_nf(&t, 4_000_000).unwrap();
            assert_eq!(decode_word(&got).unwrap(), w, "iterate on {w}; {} steps", tr.len());
        }
    }
}

/// Flat compiled-function interface `($W =o)^k ($^m W =o)^l $^m W`
/// (no leading recursion argument).
pub fn step_fn_ty_flat(k: usize, l: usize, m: usize) -> Formula {
    let mut args = Vec::new();
    args.extend(std::iter::repeat(Formula::par(ty_word())).take(k));
    args.extend(std::iter::repeat(Formula::par_n(m, ty_word())).take(l));
    Formula::eager_chain(args, acc_ty(m))
}
