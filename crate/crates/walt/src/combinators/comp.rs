//! Linear safe composition: one shared replication of the normal arguments
//! feeds every component, safe arguments split across the safe components.

use crate::builders::{self, Build, BuildError, DollarSplit};
use crate::data::{self, ty_word};
use crate::derivation::Derivation;
use crate::formula::Formula;
use crate::term::Name;

use super::core::{coerce, diag_e, eager_embed0, linear_embed};
use super::iter::step_fn_ty_flat;
use super::{eager_use, fr};

fn tv(s: &str) -> Formula {
    Formula::tyvar(s)
}

fn arrow_self(a: &Formula) -> Formula {
    Formula::lolli(a.clone(), a.clone())
}

/// Eager interface `($W =o)^k ($^m W =o)^l $^m W` of a compiled function.
pub fn fn_ty(k: usize, l: usize, m: usize) -> Formula {
    step_fn_ty_flat(k, l, m)
}

/// Check that a part carries the expected compiled-function interface.
fn expect_fn(d: &Derivation, k: usize, l: usize, m: usize, what: &str) -> Result<(), BuildError> {
    let want = fn_ty(k, l, m);
    if d.ty() != &want {
        return Err(BuildError::Other(format!(
            "{what} has type {}, want {}",
            d.ty(),
            want
        )));
    }
    Ok(())
}

/// `Comp[F, G..., H...]` with `n` shared normal arguments, `n'` normal
/// components `G_i`, and safe components `H_j` with safe arities `sj`;
/// every part arrives at the uniform modality `m`.
///
/// Interface: `($W =o)^n ($^{2m+1} W =o)^{sum sj} $^{2m+1} W`.
pub fn comp(
    f: Derivation,
    gs: Vec<Derivation>,
    hs: Vec<(Derivation, usize)>,
    n: usize,
    m: usize,
) -> Build {
    let nprime = gs.len();
    let sprime = hs.len();
    let q = nprime + sprime;
    if q == 0 {
        return Err(BuildError::Other("composition needs at least one component".into()));
    }
    expect_fn(&f, nprime, sprime, m, "composition head")?;
    for (i, g) in gs.iter().enumerate() {
        expect_fn(g, n, 0, m, &format!("normal component {i}"))?;
    }
    for (j, (h, sj)) in hs.iter().enumerate() {
        expect_fn(h, n, *sj, m, &format!("safe component {j}"))?;
    }
    let total_safe: usize = hs.iter().map(|(_, sj)| *sj).sum();
    let out_m = 2 * m + 1;
    let w_elem = Formula::par(ty_word());
    let comp_elem = w_elem.clone();
    let tuple = data::ty_etensor(&vec![comp_elem.clone(); q]);
    let delta = tv("d");

    // --- the core under two boxes --------------------------------------
    // per shared normal argument: one tuple variable v_i : (o ... o) linear
    let vnames: Vec<Name> = (0..n).map(|i| fr(&format!("v{i}"))).collect();
    // safe receivers u_{j,t} : theta at $^{2m-2} W, used at $^{2m-1} W
    let unames: Vec<Vec<Name>> =
        hs.iter().enumerate().map(|(j, (_, sj))| (0..*sj).map(|t| fr(&format!("u{j}_{t}"))).collect()).collect();
    // component argument receivers from the tuple eliminations:
    // x[c][i] is component c's share of shared argument i
    let xnames: Vec<Vec<Name>> =
        (0..q).map(|c| (0..n).map(|i| fr(&format!("x{c}_{i}"))).collect()).collect();

    // body: E^{m-1}[F] (G-parts) (H-parts)
    let mut body = eager_embed0(f, m.saturating_sub(1), nprime + sprime)?;
    for (c, g) in gs.into_iter().enumerate() {
        let mut arg = g;
        for i in 0..n {
            arg = builders::app(arg, eager_use(xnames[c][i].clone(), &w_elem)?)?;
        }
        body = builders::app(body, arg)?;
    }
    for (j, (h, sj)) in hs.into_iter().enumerate() {
        let c = nprime + j;
        let mut wrap = eager_embed0(h, m.saturating_sub(1), n + sj)?;
        for i in 0..n {
            let lifted = builders::app(
                linear_embed(coerce(m - 1)?, 1, 1)?,
                eager_use(xnames[c][i].clone(), &w_elem)?,
            )?;
            wrap = builders::app(wrap, lifted)?;
        }
        for t in 0..sj {
            wrap = builders::app(
                wrap,
                eager_use(unames[j][t].clone(), &Formula::par_n(2 * m - 1, ty_word()))?,
            )?;
        }
        body = builders::app(body, wrap)?;
    }

    // wrap the tuple eliminations: (\<{x_{0i}...}>. ... ) v_0 ... applied
    // innermost-to-outermost as nested consumers; the body rides behind a
    // thunk so every elimination instantiates at a linear type
    let fthunk = fr("f");
    let mut elim = builders::lolli_i_fake(body, &fthunk, arrow_self(&delta))?;
    for i in (0..n).rev() {
        let binders: Vec<(Name, Formula)> =
            (0..q).map(|c| (xnames[c][i].clone(), ty_word())).collect();
        elim = data::lam_etensor(elim, &binders)?;
        elim = builders::app(elim, builders::axiom(vnames[i].clone(), tuple.clone())?)?;
    }
    let mut elim = builders::app(elim, builders::identity(delta.clone())?)?;

    // two boxes: v's to the second zone, thetas prefix twice
    let mut core = builders::dollar(
        elim,
        &DollarSplit { to_delta: vnames.clone(), to_theta: vec![] },
    )?;
    core = builders::dollar(core, &DollarSplit::default())?;
    for names in unames.iter().rev() {
        for u in names.iter().rev() {
            core = builders::eager_i(core, u)?;
        }
    }
    for v in vnames.iter().rev() {
        core = builders::lolli_i_dollar(core, v)?;
    }

    // --- apply to the replicated shared arguments -----------------------
    let shared: Vec<Name> = (0..n).map(|i| fr(&format!("n{i}"))).collect();
    let wnames: Vec<Vec<Name>> = unames
        .iter()
        .enumerate()
        .map(|(j, names)| (0..names.len()).map(|t| fr(&format!("w{j}_{t}"))).collect())
        .collect();
    let mut d = core;
    if n > 0 {
        let dg = diag_e(1, q)?;
        for x in &shared {
            let rep = builders::app(
                linear_embed(dg.clone(), 1, 1)?,
                builders::theta_var(x.clone(), ty_word())?,
            )?;
            d = builders::app(d, rep)?;
        }
    }
    for names in &wnames {
        for w in names {
            d = builders::app(d, eager_use(w.clone(), &Formula::par_n(out_m, ty_word()))?)?;
        }
    }
    for names in wnames.iter().rev() {
        for w in names.iter().rev() {
            d = builders::eager_i(d, w)?;
        }
    }
    for x in shared.iter().rev() {
        d = builders::eager_i(d, x)?;
    }
    let _ = arrow_self(&delta);
    let _ = total_safe;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::core::{basic_embed, pred_w, ws1};
    use crate::data::{decode_word, encode_word};
    use crate::reduction::reduce_to_nf;
    use crate::term::Term;

    /// `\x. [Ws1]^1_B x`-style unary step at the compiled interface.
    fn unary(fd: Derivation) -> Derivation {
        let x = fr("x");
        let d = builders::app(
            basic_embed(fd, 1).unwrap(),
            eager_use(x.clone(), &Formula::par(ty_word())).unwrap(),
        )
        .unwrap();
        builders::eager_i(d, &x).unwrap()
    }

    #[test]
    fn composition_types_and_runs() {
        // comp with shared arity 1: F(g1(x); h1(x; s))
        // F = \a s. Ws1-of-s  (k'=1 normal, l'=1 safe)
        let a = fr("a");
        let s = fr("s");
        let f = {
            let d = builders::app(
                basic_embed(ws1().unwrap(), 1).unwrap(),
                eager_use(s.clone(), &Formula::par(ty_word())).unwrap(),
            )
            .unwrap();
            let d = builders::eager_i(d, &s).unwrap();
            builders::eager_i_fake(d, &a, ty_word()).unwrap()
        };
        assert_eq!(f.ty(), &fn_ty(1, 1, 1));
        let g1 = unary(ws1().unwrap()); // g1(x) = 2x+1
        let h1 = {
            // h1(x; w) = P x  (ignores its safe argument)
            let x = fr("x");
            let w = fr("w");
            let d = builders::app(
                basic_embed(pred_w().unwrap(), 1).unwrap(),
                eager_use(x.clone(), &Formula::par(ty_word())).unwrap(),
            )
            .unwrap();
            let d = builders::eager_i_fake(d, &w, ty_word()).unwrap();
            builders::eager_i(d, &x).unwrap()
        };
        assert_eq!(h1.ty(), &fn_ty(1, 1, 1));
        let c = comp(f, vec![g1], vec![(h1, 1)], 1, 1).unwrap();
        let j = c.check().unwrap();
        assert_eq!(j.ty, fn_ty(1, 1, 3));
        // run: comp(x; w) = F(g1(x); h1(x; w)) = Ws1(P(x)) on x=6, w=9 -> 7
        let t = Term::apps(c.subject().clone(), [encode_word(6), encode_word(9)]);
        let (got, tr) = reduce_to_nf(&t, 2_000_000).unwrap();
        assert_eq!(decode_word(&got).unwrap(), 7, "{} steps", tr.len());
    }
}
