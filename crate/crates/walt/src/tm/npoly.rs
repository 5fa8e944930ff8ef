//! The clock: string addition, squaring by iterated addition over a mixed
//! pair, multiplication by a constant, and the majorized polynomial
//! `n -> K * n^(2^e)`.
//!
//! Iterated addition duplicates its addend through a `!` box, which needs a
//! polynomial companion; the companion is the identity, abstracted last and
//! applied in a context the box's elementary assumption cannot reach (the
//! wrapped value is consumed through a fresh linear variable first).

use crate::builders::{self, Build, DollarSplit};
use crate::combinators::core::{eager_embed0, linear_embed, ss};
use crate::combinators::{eager_use, fr};
use crate::data::{string_deriv, ty_string};
use crate::derivation::Derivation;
use crate::formula::Formula;
use crate::term::Name;

fn tv(s: &str) -> Formula {
    Formula::tyvar(s)
}

fn nn() -> Formula {
    ty_string()
}

fn arrow_self(a: &Formula) -> Formula {
    Formula::lolli(a.clone(), a.clone())
}

/// `+ : N -o N -o N` — both numerals iterate a thunked step, so the joined
/// chain never substitutes an open application.
pub fn plus() -> Build {
    let a = tv("a");
    let delta = tv("d");
    let th = Formula::lolli(arrow_self(&delta), a.clone());
    let m = fr("m");
    let n = fr("n");
    let f = fr("f");
    // step = \t q. f (t I) : TH -o TH, boxed over the polynomial f
    let mk_step = |fc: &Name| -> Build {
        let t = fr("t");
        let q = fr("q");
        let forced = builders::app(
            builders::axiom(t.clone(), th.clone())?,
            builders::identity(delta.clone())?,
        )?;
        let body = builders::app(builders::axiom(fc.clone(), arrow_self(&a))?, forced)?;
        let d = builders::lolli_i_fake(body, &q, arrow_self(&delta))?;
        let d = builders::lolli_i(d, &t)?;
        builders::bang(d, Some(fc))
    };
    let f1 = fr("f");
    let f2 = fr("f");
    let m_fold = builders::app(
        builders::forall_e(builders::axiom(m.clone(), nn())?, th.clone())?,
        mk_step(&f1)?,
    )?;
    let n_fold = builders::app(
        builders::forall_e(builders::axiom(n.clone(), nn())?, th.clone())?,
        mk_step(&f2)?,
    )?;
    // (\w z x. (w (z (\q. x))) I)
    let w = fr("w");
    let z = fr("z");
    let x = fr("x");
    let q = fr("q");
    let seed = builders::lolli_i_fake(builders::axiom(x.clone(), a.clone())?, &q, arrow_self(&delta))?;
    let chained = builders::app(
        builders::axiom(w.clone(), arrow_self(&th))?,
        builders::app(builders::axiom(z.clone(), arrow_self(&th))?, seed)?,
    )?;
    let body = builders::app(chained, builders::identity(delta.clone())?)?;
    let inner = builders::lolli_i(body, &x)?;
    let inner = builders::dollar(
        inner,
        &DollarSplit { to_delta: vec![w.clone(), z.clone()], to_theta: vec![] },
    )?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let inner = builders::lolli_i_dollar(inner, &w)?;
    let d = builders::app(builders::app(inner, m_fold)?, n_fold)?;
    let d = builders::contract(d, &f1, &f2, &f)?;
    let d = builders::lolli_i_bang(d, &f)?;
    let d = builders::forall_i(d, "a")?;
    let d = builders::lolli_i(d, &n)?;
    builders::lolli_i(d, &m)
}

/// Mixed pair `forall g. ((N -o $N =o g) -o g)`: a plain driver beside an
/// eagerly deliverable copy.
pub fn ty_pair_mix() -> Formula {
    let g = tv("g");
    let spine = Formula::lolli(
        nn(),
        Formula::eager(Formula::par(nn()), g.clone()).unwrap(),
    );
    Formula::forall("g", Formula::lolli(spine, g)).unwrap()
}

/// Intro `\k. k D1 D2` where `D1 : N` and `D2` is an eager `$N` judgment.
fn pair_mix_intro(d1: Derivation, d2: Derivation) -> Build {
    let g = tv("g");
    let k = fr("k");
    let spine = Formula::lolli(nn(), Formula::eager(Formula::par(nn()), g.clone()).unwrap());
    let body = builders::app(builders::app(builders::axiom(k.clone(), spine)?, d1)?, d2)?;
    builders::forall_i(builders::lolli_i(body, &k)?, "g")
}

/// `DiagMix : N -o $PairMix` — two copies of a string, one plain, one eager.
pub fn diag_mix() -> Build {
    let pm = ty_pair_mix();
    let w = fr("w");
    // step: \t. t (\n1 n2. <Ss n1, [Ss] n2>)
    let t = fr("t");
    let n1 = fr("n1");
    let n2 = fr("n2");
    let comp1 = builders::app(ss()?, builders::axiom(n1.clone(), nn())?)?;
    let comp2 = builders::app(
        crate::combinators::core::basic_embed(ss()?, 1)?,
        eager_use(n2.clone(), &Formula::par(nn()))?,
    )?;
    let rebuilt = pair_mix_intro(comp1, comp2)?;
    let consumer = builders::lolli_i(builders::eager_i(rebuilt, &n2)?, &n1)?;
    let step = builders::app(
        builders::forall_e(builders::axiom(t.clone(), pm.clone())?, pm.clone())?,
        consumer,
    )?;
    let step = builders::lolli_i(step, &t)?;
    let w_fold = builders::app(
        builders::forall_e(builders::axiom(w.clone(), nn())?, pm.clone())?,
        builders::bang(step, None)?,
    )?;
    let base = pair_mix_intro(string_deriv(0), builders::dollar_all_phi(string_deriv(0))?)?;
    let z = fr("z");
    let body = builders::app(builders::axiom(z.clone(), arrow_self(&pm))?, base)?;
    let inner = builders::dollar(body, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let d = builders::app(inner, w_fold)?;
    builders::lolli_i(d, &w)
}

/// The iterated-addition consumer `\n1 n2 c f. (\z. z U0)(n1 (\y. c (+ n2 y)))`
/// of type `N -o $N =o !(N -o N) -o (d -o d) -o $N`.
fn mult_consumer(driver: Option<Derivation>) -> Build {
    let n1 = fr("n1");
    let n2 = fr("n2");
    let c = fr("c");
    let f = fr("f");
    let y = fr("y");
    let delta = tv("d");
    let naa = arrow_self(&nn());
    // F-box: !( \y. c (+ n2 y) ) with n2 elementary, c polynomial
    let body = builders::app(
        builders::axiom(c.clone(), naa.clone())?,
        builders::app(
            builders::app(plus()?, builders::axiom(n2.clone(), nn())?)?,
            builders::axiom(y.clone(), nn())?,
        )?,
    )?;
    let fbox = builders::bang(builders::lolli_i(body, &y)?, Some(&c))?;
    let head = match driver {
        Some(d) => d,
        None => builders::axiom(n1.clone(), nn())?,
    };
    let fold = builders::app(builders::forall_e(head, nn())?, fbox)?;
    let z = fr("z");
    let zbody = builders::app(builders::axiom(z.clone(), naa)?, string_deriv(0))?;
    let inner = builders::dollar(zbody, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let inner = builders::lolli_i_dollar(inner, &z)?;
    let mut d = builders::app(inner, fold)?;
    d = builders::lolli_i_fake(d, &f, arrow_self(&delta))?;
    d = builders::lolli_i_bang(d, &c)?;
    d = builders::eager_i(d, &n2)?;
    if d.conclusion.gamma.contains(&n1) {
        d = builders::lolli_i(d, &n1)?;
    }
    Ok(d)
}

fn identity_bang() -> Build {
    builders::bang(builders::identity(nn())?, None)
}

/// `Sq : $N =o $$$N` — squares a string by iterated addition over its own
/// mixed duplicate.
pub fn square() -> Build {
    let delta = tv("d");
    let pm = ty_pair_mix();
    let v = fr("v");
    let z = fr("z");
    let g_inst = Formula::lolli(
        Formula::bang(arrow_self(&nn())),
        Formula::lolli(arrow_self(&delta), Formula::par(nn())),
    );
    let consumer = mult_consumer(None)?;
    let core = builders::app(
        builders::app(
            builders::app(
                builders::forall_e(builders::axiom(z.clone(), pm.clone())?, g_inst)?,
                consumer,
            )?,
            identity_bang()?,
        )?,
        builders::identity(delta.clone())?,
    )?;
    let core = builders::dollar(core, &DollarSplit { to_delta: vec![z.clone()], to_theta: vec![] })?;
    let core = builders::dollar(core, &DollarSplit::default())?;
    let core = builders::lolli_i_dollar(core, &z)?;
    let arg = builders::app(linear_embed(diag_mix()?, 1, 1)?, eager_use(v.clone(), &Formula::par(nn()))?)?;
    let d = builders::app(core, arg)?;
    builders::eager_i(d, &v)
}

/// Wrapped single value `forall g. (($N =o g) -o g)`.
fn ty_pack() -> Formula {
    let g = tv("g");
    Formula::forall(
        "g",
        Formula::lolli(Formula::eager(Formula::par(nn()), g.clone()).unwrap(), g),
    )
    .unwrap()
}

/// `pack = \n k. k n : $N =o Pack`.
fn pack() -> Build {
    let n = fr("n");
    let k = fr("k");
    let g = tv("g");
    let spine = Formula::eager(Formula::par(nn()), g.clone()).unwrap();
    let body = builders::app(
        builders::axiom(k.clone(), spine)?,
        eager_use(n.clone(), &Formula::par(nn()))?,
    )?;
    let d = builders::forall_i(builders::lolli_i(body, &k)?, "g")?;
    builders::eager_i(d, &n)
}

/// `MulK : $N =o $N` — multiply by the constant `K` (the driver is the
/// closed numeral, so no boxes are needed around the consumer).
pub fn mult_const(k: u64) -> Build {
    let delta = tv("d");
    let v = fr("v");
    let z = fr("z");
    let g_inst = Formula::lolli(
        Formula::bang(arrow_self(&nn())),
        Formula::lolli(arrow_self(&delta), Formula::par(nn())),
    );
    let consumer = mult_consumer(Some(string_deriv(k)))?;
    let core = builders::app(
        builders::app(
            builders::app(
                builders::forall_e(builders::axiom(z.clone(), ty_pack())?, g_inst)?,
                consumer,
            )?,
            identity_bang()?,
        )?,
        builders::identity(delta.clone())?,
    )?;
    let core = builders::lolli_i(core, &z)?;
    let arg = builders::app(pack()?, eager_use(v.clone(), &Formula::par(nn()))?)?;
    let d = builders::app(core, arg)?;
    builders::eager_i(d, &v)
}

/// `Sq^e : $N =o $^(2e+1) N` by composing squarings.
pub fn square_chain(e: usize) -> Build {
    assert!(e >= 1);
    let mut d = square()?;
    let mut a = 3usize;
    for _ in 1..e {
        let x = fr("x");
        let lifted = eager_embed0(square()?, a - 1, 1)?;
        let inner = builders::app(d, eager_use(x.clone(), &Formula::par(nn()))?)?;
        let applied = builders::app(lifted, inner)?;
        d = builders::eager_i(applied, &x)?;
        a += 2;
    }
    Ok(d)
}

/// `NPoly^K_e : $N =o $^(2e+1) N` computing `n -> K * n^(2^e)`.
pub fn npoly(e: usize, k: u64) -> Build {
    assert!(e >= 1);
    let x = fr("x");
    let sq = square_chain(e)?;
    let a = 2 * e + 1;
    let mul = eager_embed0(mult_const(k)?, a - 1, 1)?;
    let inner = builders::app(sq, eager_use(x.clone(), &Formula::par(nn()))?)?;
    let d = builders::app(mul, inner)?;
    builders::eager_i(d, &x)
}

/// Result modality of `npoly(e, _)`.
pub fn npoly_exponent(e: usize) -> usize {
    2 * e + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{decode_string, encode_string};
    use crate::reduction::reduce_to_nf;
    use crate::term::Term;

    fn run1(d: &Derivation, n: u64) -> u64 {
        let t = Term::app(d.subject().clone(), encode_string(n));
        let (got, _) = reduce_to_nf(&t, 2_000_000).unwrap();
        decode_string(&got).unwrap()
    }

    #[test]
    fn plus_types_and_runs() {
        let d = plus().unwrap();
        let j = d.check().unwrap();
        assert_eq!(j.ty, Formula::lolli(nn(), Formula::lolli(nn(), nn())));
        let t = Term::apps(d.subject().clone(), [encode_string(2), encode_string(3)]);
        let (got, _) = reduce_to_nf(&t, 100_000).unwrap();
        assert_eq!(decode_string(&got).unwrap(), 5);
    }

    #[test]
    fn square_types_and_runs() {
        let d = square().unwrap();
        let j = d.check().unwrap();
        assert_eq!(
            j.ty,
            Formula::eager(Formula::par(nn()), Formula::par_n(3, nn())).unwrap()
        );
        for n in [0u64, 1, 2, 3] {
            assert_eq!(run1(&d, n), n * n, "square of {n}");
        }
    }

    #[test]
    fn mult_const_runs() {
        let d = mult_const(3).unwrap();
        d.check().unwrap();
        for n in [0u64, 1, 4] {
            assert_eq!(run1(&d, n), 3 * n);
        }
    }

    #[test]
    fn npoly_types_and_runs() {
        let d = npoly(1, 2).unwrap();
        let j = d.check().unwrap();
        assert_eq!(
            j.ty,
            Formula::eager(Formula::par(nn()), Formula::par_n(3, nn())).unwrap()
        );
        // K n^2 with K=2: 3 -> 18
        assert_eq!(run1(&d, 3), 18);
        assert_eq!(run1(&d, 0), 0);
    }
}
