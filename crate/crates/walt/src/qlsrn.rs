//! Safe recursion on notation with linear safe composition: terms, the
//! reference evaluator, the weight measure, and the compiler into typed
//! lambda terms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;

use crate::builders::{self, BuildError};
use crate::combinators::comp::{comp, fn_ty};
use crate::combinators::core::{basic_embed, branch_w, coerce, eager_embed0, pred_w, ws0, ws1};
use crate::combinators::iter::{it, step_fn_ty};
use crate::combinators::{eager_use, fr};
use crate::data::{self, ty_word};
use crate::derivation::Derivation;
use crate::formula::Formula;
use crate::term::Name;

pub type Weight = Ratio<u64>;

/// Function symbols with their arity data. `k` normal, `l` safe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QFunction {
    Zero { k: usize, l: usize },
    Suc0,
    Suc1,
    Pred,
    Proj { k: usize, l: usize, i: usize },
    Branch,
    Comp { k: usize, f: Arc<QFunction>, gs: Vec<Arc<QFunction>>, hs: Vec<Arc<QFunction>> },
    Rec { g: Arc<QFunction>, h0: Arc<QFunction>, h1: Arc<QFunction> },
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QError {
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("unbound variable {0}")]
    UnboundVariable(Name),
    #[error("weight of an open term")]
    OpenTerm,
    #[error("projection index {i} out of range 1..={max}")]
    ProjRange { i: usize, max: usize },
    #[error("safe variable {0} used in more than one safe component")]
    SafeReuse(Name),
}

impl QFunction {
    /// Normal and safe arity.
    pub fn arity(&self) -> (usize, usize) {
        match self {
            QFunction::Zero { k, l } => (*k, *l),
            QFunction::Suc0 | QFunction::Suc1 | QFunction::Pred => (0, 1),
            QFunction::Proj { k, l, .. } => (*k, *l),
            QFunction::Branch => (0, 3),
            QFunction::Comp { k, hs, .. } => {
                (*k, hs.iter().map(|h| h.arity().1).sum())
            }
            QFunction::Rec { g, .. } => {
                let (k, l) = g.arity();
                (k + 1, l)
            }
        }
    }

    /// Validate the closure conditions of the signature.
    pub fn validate(&self) -> Result<(), QError> {
        match self {
            QFunction::Proj { k, l, i } => {
                if *i < 1 || *i > k + l {
                    return Err(QError::ProjRange { i: *i, max: k + l });
                }
                Ok(())
            }
            QFunction::Comp { k, f, gs, hs } => {
                let (kf, lf) = f.arity();
                if kf != gs.len() {
                    return Err(QError::Arity(format!(
                        "composition head takes {kf} normal arguments, got {} components",
                        gs.len()
                    )));
                }
                if lf != hs.len() {
                    return Err(QError::Arity(format!(
                        "composition head takes {lf} safe arguments, got {} components",
                        hs.len()
                    )));
                }
                for g in gs {
                    g.validate()?;
                    if g.arity() != (*k, 0) {
                        return Err(QError::Arity(format!(
                            "normal component must be in Sigma^({k},0), got {:?}",
                            g.arity()
                        )));
                    }
                }
                for h in hs {
                    h.validate()?;
                    if h.arity().0 != *k {
                        return Err(QError::Arity(format!(
                            "safe component must take {k} normal arguments, got {}",
                            h.arity().0
                        )));
                    }
                }
                f.validate()
            }
            QFunction::Rec { g, h0, h1 } => {
                let (k, l) = g.arity();
                for h in [h0, h1] {
                    h.validate()?;
                    if h.arity() != (k + 1, l + 1) {
                        return Err(QError::Arity(format!(
                            "recursion step must be in Sigma^({},{}), got {:?}",
                            k + 1,
                            l + 1,
                            h.arity()
                        )));
                    }
                }
                g.validate()
            }
            _ => Ok(()),
        }
    }

    /// The weight: base functions weigh nothing, composition triples and
    /// recursion doubles the maximum of the parts with a floor.
    pub fn weight(&self) -> Weight {
        match self {
            QFunction::Zero { .. }
            | QFunction::Suc0
            | QFunction::Suc1
            | QFunction::Pred
            | QFunction::Proj { .. }
            | QFunction::Branch => Weight::new(0, 1),
            QFunction::Comp { f, gs, hs, .. } => {
                let mut w = Weight::new(1, 3);
                for part in std::iter::once(f).chain(gs).chain(hs) {
                    w = w.max(part.weight());
                }
                w * Weight::new(3, 1)
            }
            QFunction::Rec { g, h0, h1 } => {
                let w = [g.weight(), h0.weight(), h1.weight(), Weight::new(1, 2)]
                    .into_iter()
                    .max()
                    .unwrap();
                w * Weight::new(2, 1)
            }
        }
    }
}

/// Terms: variables and fully applied function symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QTerm {
    Var(Name),
    Apply { f: Arc<QFunction>, normals: Vec<QTerm>, safes: Vec<QTerm> },
}

impl QTerm {
    pub fn num(n: u64) -> QTerm {
        // LSB-outermost constructor chain ending in s1(zero) for n >= 1
        if n == 0 {
            return QTerm::apply(QFunction::Zero { k: 0, l: 0 }, vec![], vec![]).unwrap();
        }
        let mut digits = Vec::new();
        let mut v = n;
        while v > 1 {
            digits.push(v & 1);
            v >>= 1;
        }
        let mut t = QTerm::apply(QFunction::Suc1, vec![], vec![QTerm::num(0)]).unwrap();
        for d in digits.iter().rev() {
            let f = if *d == 0 { QFunction::Suc0 } else { QFunction::Suc1 };
            t = QTerm::apply(f, vec![], vec![t]).unwrap();
        }
        t
    }

    pub fn apply(f: QFunction, normals: Vec<QTerm>, safes: Vec<QTerm>) -> Result<QTerm, QError> {
        f.validate()?;
        let (k, l) = f.arity();
        if normals.len() != k || safes.len() != l {
            return Err(QError::Arity(format!(
                "symbol takes ({k};{l}) arguments, got ({};{})",
                normals.len(),
                safes.len()
            )));
        }
        Ok(QTerm::Apply { f: Arc::new(f), normals, safes })
    }

    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        fn go(t: &QTerm, out: &mut Vec<Name>) {
            match t {
                QTerm::Var(n) => {
                    if !out.contains(n) {
                        out.push(n.clone());
                    }
                }
                QTerm::Apply { normals, safes, .. } => {
                    for a in normals.iter().chain(safes) {
                        go(a, out);
                    }
                }
            }
        }
        go(self, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Nesting depth of function applications.
    pub fn depth(&self) -> usize {
        match self {
            QTerm::Var(_) => 0,
            QTerm::Apply { normals, safes, .. } => {
                1 + normals.iter().chain(safes).map(QTerm::depth).max().unwrap_or(0)
            }
        }
    }

    /// Weight of a closed term: application doubles the max with floor 1/2.
    pub fn weight(&self) -> Result<Weight, QError> {
        match self {
            QTerm::Var(_) => Err(QError::OpenTerm),
            QTerm::Apply { f, normals, safes } => {
                let mut w = Weight::new(1, 2).max(f.weight());
                for a in normals.iter().chain(safes) {
                    w = w.max(a.weight()?);
                }
                Ok(w * Weight::new(2, 1))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Apply a function symbol to argument values.
pub fn apply_fn(f: &QFunction, normals: &[u64], safes: &[u64]) -> u64 {
    match f {
        QFunction::Zero { .. } => 0,
        QFunction::Suc0 => 2 * safes[0],
        QFunction::Suc1 => 2 * safes[0] + 1,
        QFunction::Pred => safes[0] / 2,
        QFunction::Proj { k, i, .. } => {
            if *i <= *k {
                normals[*i - 1]
            } else {
                safes[*i - *k - 1]
            }
        }
        QFunction::Branch => {
            if safes[0] == 0 {
                safes[1]
            } else {
                safes[2]
            }
        }
        QFunction::Comp { f, gs, hs, .. } => {
            let gvals: Vec<u64> = gs.iter().map(|g| apply_fn(g, normals, &[])).collect();
            let mut hvals = Vec::new();
            let mut used = 0;
            for h in hs {
                let (_, lh) = h.arity();
                hvals.push(apply_fn(h, normals, &safes[used..used + lh]));
                used += lh;
            }
            apply_fn(f, &gvals, &hvals)
        }
        QFunction::Rec { g, h0, h1 } => {
            let counter = normals[0];
            let rest = &normals[1..];
            if counter == 0 {
                apply_fn(g, rest, safes)
            } else {
                let step = if counter & 1 == 0 { h0 } else { h1 };
                let tail = counter / 2;
                let rec = apply_fn(&QFunction::Rec {
                    g: g.clone(),
                    h0: h0.clone(),
                    h1: h1.clone(),
                }, &{
                    let mut v = vec![tail];
                    v.extend_from_slice(rest);
                    v
                }, safes);
                let mut ns = vec![tail];
                ns.extend_from_slice(rest);
                let mut ss = safes.to_vec();
                ss.push(rec);
                apply_fn(step, &ns, &ss)
            }
        }
    }
}

/// Evaluate under an environment; every free variable must be bound.
pub fn eval_q(t: &QTerm, env: &BTreeMap<Name, u64>) -> Result<u64, QError> {
    match t {
        QTerm::Var(n) => env.get(n).copied().ok_or_else(|| QError::UnboundVariable(n.clone())),
        QTerm::Apply { f, normals, safes } => {
            let ns: Vec<u64> = normals.iter().map(|a| eval_q(a, env)).collect::<Result<_, _>>()?;
            let ss: Vec<u64> = safes.iter().map(|a| eval_q(a, env)).collect::<Result<_, _>>()?;
            Ok(apply_fn(f, &ns, &ss))
        }
    }
}

/// Independent oracle: the same semantics over little-endian bit vectors,
/// exercising a different arithmetic route than `eval_q`.
pub mod bits {
    use super::QFunction;

    pub type Bits = Vec<bool>;

    pub fn from_u64(mut n: u64) -> Bits {
        let mut v = Vec::new();
        while n > 0 {
            v.push(n & 1 == 1);
            n >>= 1;
        }
        v
    }

    pub fn to_u64(b: &Bits) -> u64 {
        b.iter().rev().fold(0, |acc, bit| (acc << 1) | u64::from(*bit))
    }

    pub fn apply(f: &QFunction, normals: &[Bits], safes: &[Bits]) -> Bits {
        match f {
            QFunction::Zero { .. } => Vec::new(),
            QFunction::Suc0 => {
                let mut v = safes[0].clone();
                if v.is_empty() {
                    return v;
                }
                v.insert(0, false);
                v
            }
            QFunction::Suc1 => {
                let mut v = safes[0].clone();
                v.insert(0, true);
                v
            }
            QFunction::Pred => {
                let mut v = safes[0].clone();
                if !v.is_empty() {
                    v.remove(0);
                }
                v
            }
            QFunction::Proj { k, i, .. } => {
                if *i <= *k {
                    normals[*i - 1].clone()
                } else {
                    safes[*i - *k - 1].clone()
                }
            }
            QFunction::Branch => {
                if safes[0].is_empty() {
                    safes[1].clone()
                } else {
                    safes[2].clone()
                }
            }
            QFunction::Comp { f, gs, hs, .. } => {
                let gvals: Vec<Bits> = gs.iter().map(|g| apply(g, normals, &[])).collect();
                let mut hvals = Vec::new();
                let mut used = 0;
                for h in hs {
                    let (_, lh) = h.arity();
                    hvals.push(apply(h, normals, &safes[used..used + lh]));
                    used += lh;
                }
                apply(f, &gvals, &hvals)
            }
            QFunction::Rec { g, h0, h1 } => {
                let counter = &normals[0];
                let rest = &normals[1..];
                if counter.is_empty() {
                    apply(g, rest, safes)
                } else {
                    let step: &QFunction = if counter[0] { h1 } else { h0 };
                    let tail: Bits = counter[1..].to_vec();
                    let mut ns = vec![tail];
                    ns.extend_from_slice(rest);
                    let rec = apply(
                        &QFunction::Rec { g: g.clone(), h0: h0.clone(), h1: h1.clone() },
                        &ns,
                        safes,
                    );
                    let mut ss = safes.to_vec();
                    ss.push(rec);
                    apply(step, &ns, &ss)
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

/// A compiled function: the derivation concludes the schema type
/// `($W =o)^k ($^m W =o)^l $^m W` for the witnessed `m`.
#[derive(Clone, Debug)]
pub struct Embedded {
    pub deriv: Derivation,
    pub m: usize,
}

/// Lift a compiled function from modality `m` to `p`, keeping the normal
/// arguments at `$W` by re-coercing them outside the added boxes.
fn schema_lift(e: Embedded, k: usize, l: usize, p: usize) -> Result<Embedded, BuildError> {
    assert!(p >= e.m);
    if p == e.m {
        return Ok(e);
    }
    let n = p - e.m;
    let w = ty_word();
    let inner_names: Vec<Name> = (0..k).map(|i| fr(&format!("iw{i}"))).collect();
    let z_names: Vec<Name> = (0..l).map(|j| fr(&format!("z{j}"))).collect();
    let mut d = e.deriv;
    for nm in &inner_names {
        d = builders::app(d, eager_use(nm.clone(), &Formula::par(w.clone()))?)?;
    }
    for z in &z_names {
        d = builders::app(d, eager_use(z.clone(), &Formula::par_n(e.m, w.clone()))?)?;
    }
    for _ in 0..n {
        d = builders::dollar_all_theta(d)?;
    }
    for z in z_names.iter().rev() {
        d = builders::eager_i(d, z)?;
    }
    for nm in inner_names.iter().rev() {
        d = builders::eager_i(d, nm)?;
    }
    // feed the coerced outer normals
    let outer: Vec<Name> = (0..k).map(|i| fr(&format!("x{i}"))).collect();
    for x in &outer {
        let coerced = builders::app(
            basic_embed(coerce(n)?, 1)?,
            eager_use(x.clone(), &Formula::par(w.clone()))?,
        )?;
        d = builders::app(d, coerced)?;
    }
    for x in outer.iter().rev() {
        d = builders::eager_i(d, x)?;
    }
    Ok(Embedded { deriv: d, m: p })
}

/// Compile a function symbol. The derivation concludes
/// `($W =o)^k ($^m W =o)^l $^m W` with the returned witness `m`.
pub fn embed_fn(f: &QFunction) -> Result<Embedded, BuildError> {
    f.validate().map_err(|e| BuildError::Other(e.to_string()))?;
    match f {
        QFunction::Zero { k, l } => {
            let mut d = builders::dollar_all_phi(data::word_deriv(0))?;
            for j in (0..*l).rev() {
                let s = fr(&format!("s{j}"));
                d = builders::eager_i_fake(d, &s, ty_word())?;
            }
            for i in (0..*k).rev() {
                let nm = fr(&format!("n{i}"));
                d = builders::eager_i_fake(d, &nm, ty_word())?;
            }
            Ok(Embedded { deriv: d, m: 1 })
        }
        QFunction::Suc0 => Ok(Embedded { deriv: basic_embed(ws0()?, 1)?, m: 1 }),
        QFunction::Suc1 => Ok(Embedded { deriv: basic_embed(ws1()?, 1)?, m: 1 }),
        QFunction::Pred => Ok(Embedded { deriv: basic_embed(pred_w()?, 1)?, m: 1 }),
        QFunction::Proj { k, l, i } => {
            let names: Vec<Name> = (0..k + l).map(|j| fr(&format!("x{j}"))).collect();
            let mut d = eager_use(names[*i - 1].clone(), &Formula::par(ty_word()))?;
            for (j, nm) in names.iter().enumerate().rev() {
                if j == *i - 1 {
                    d = builders::eager_i(d, nm)?;
                } else {
                    d = builders::eager_i_fake(d, nm, ty_word())?;
                }
            }
            Ok(Embedded { deriv: d, m: 1 })
        }
        QFunction::Branch => {
            let x = fr("x");
            let y = fr("y");
            let z = fr("z");
            let mut d = branch_w()?;
            for v in [&x, &y, &z] {
                d = builders::app(d, builders::axiom(v.clone(), ty_word())?)?;
            }
            d = builders::dollar_all_theta(d)?;
            let d = builders::eager_i(d, &z)?;
            let d = builders::eager_i(d, &y)?;
            let d = builders::eager_i(d, &x)?;
            Ok(Embedded { deriv: d, m: 1 })
        }
        QFunction::Comp { k, f, gs, hs } => {
            let ef = embed_fn(f)?;
            let egs: Vec<Embedded> = gs.iter().map(|g| embed_fn(g)).collect::<Result<_, _>>()?;
            let ehs: Vec<(Embedded, usize)> = hs
                .iter()
                .map(|h| embed_fn(h).map(|e| (e, h.arity().1)))
                .collect::<Result<_, _>>()?;
            let p = std::iter::once(ef.m)
                .chain(egs.iter().map(|e| e.m))
                .chain(ehs.iter().map(|(e, _)| e.m))
                .max()
                .unwrap();
            let (kf, lf) = f.arity();
            let ef = schema_lift(ef, kf, lf, p)?;
            let egs: Vec<Derivation> = egs
                .into_iter()
                .map(|e| schema_lift(e, *k, 0, p).map(|e| e.deriv))
                .collect::<Result<_, _>>()?;
            let ehs: Vec<(Derivation, usize)> = ehs
                .into_iter()
                .map(|(e, sj)| schema_lift(e, *k, sj, p).map(|e| (e.deriv, sj)))
                .collect::<Result<_, _>>()?;
            let d = comp(ef.deriv, egs, ehs, *k, p)?;
            Ok(Embedded { deriv: d, m: 2 * p + 1 })
        }
        QFunction::Rec { g, h0, h1 } => {
            let (k, l) = g.arity();
            let eg = embed_fn(g)?;
            let e0 = embed_fn(h0)?;
            let e1 = embed_fn(h1)?;
            let p = eg.m.max(e0.m).max(e1.m);
            let eg = schema_lift(eg, k, l, p)?;
            let e0 = schema_lift(e0, k + 1, l + 1, p)?;
            let e1 = schema_lift(e1, k + 1, l + 1, p)?;
            // G2 = \n0 nbar sbar r. g nbar sbar (drops counter and result)
            let n0 = fr("n0");
            let r = fr("r");
            let nn: Vec<Name> = (0..k).map(|i| fr(&format!("n{i}"))).collect();
            let ss: Vec<Name> = (0..l).map(|j| fr(&format!("s{j}"))).collect();
            let mut g2 = eg.deriv;
            for nm in &nn {
                g2 = builders::app(g2, eager_use(nm.clone(), &Formula::par(ty_word()))?)?;
            }
            for sv in &ss {
                g2 = builders::app(g2, eager_use(sv.clone(), &Formula::par_n(p, ty_word()))?)?;
            }
            g2 = builders::eager_i_fake(g2, &r, Formula::par_n(p.max(1) - 1, ty_word()))?;
            for sv in ss.iter().rev() {
                g2 = builders::eager_i(g2, sv)?;
            }
            for nm in nn.iter().rev() {
                g2 = builders::eager_i(g2, nm)?;
            }
            g2 = builders::eager_i_fake(g2, &n0, ty_word())?;
            debug_assert_eq!(g2.ty(), &step_fn_ty(k, l, p));
            let d = it(e0.deriv, e1.deriv, g2, k, l, p)?;
            Ok(Embedded { deriv: d, m: p + 4 })
        }
    }
}

/// The schema type and witness without building the full derivation tree.
pub fn embedded_type(f: &QFunction) -> Result<(Formula, usize), QError> {
    f.validate()?;
    fn m_of(f: &QFunction) -> usize {
        match f {
            QFunction::Comp { f, gs, hs, .. } => {
                let p = std::iter::once(m_of(f))
                    .chain(gs.iter().map(|g| m_of(g)))
                    .chain(hs.iter().map(|h| m_of(h)))
                    .max()
                    .unwrap();
                2 * p + 1
            }
            QFunction::Rec { g, h0, h1 } => m_of(g).max(m_of(h0)).max(m_of(h1)) + 4,
            _ => 1,
        }
    }
    let (k, l) = f.arity();
    let m = m_of(f);
    Ok((fn_ty(k, l, m), m))
}

/// A compiled closed term: the derivation concludes `$^v W`.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub deriv: Derivation,
    pub exponent: usize,
}

fn lift_closed(d: Derivation, by: usize) -> Result<Derivation, BuildError> {
    let mut d = d;
    for _ in 0..by {
        d = builders::dollar_all_phi(d)?;
    }
    Ok(d)
}

/// Compile a term under an environment that resolves every variable to a
/// numeral first.
pub fn interpret(t: &QTerm, env: &BTreeMap<Name, u64>) -> Result<Compiled, BuildError> {
    match t {
        QTerm::Var(n) => {
            let v = env
                .get(n)
                .copied()
                .ok_or_else(|| BuildError::Other(format!("unbound variable {n}")))?;
            interpret(&QTerm::num(v), env)
        }
        QTerm::Apply { f, normals, safes } => {
            let e = embed_fn(f)?;
            let m = e.m;
            let ns: Vec<Compiled> =
                normals.iter().map(|a| interpret(a, env)).collect::<Result<_, _>>()?;
            let ss: Vec<Compiled> =
                safes.iter().map(|a| interpret(a, env)).collect::<Result<_, _>>()?;
            let u = std::iter::once(m).chain(ns.iter().map(|c| c.exponent)).max().unwrap();
            let v = std::iter::once(u + m - 1).chain(ss.iter().map(|c| c.exponent)).max().unwrap();
            let inner = eager_embed0(e.deriv, u - 1, normals.len() + safes.len())?;
            let mut d = inner;
            for c in ns {
                d = builders::app(d, lift_closed(c.deriv, u - c.exponent)?)?;
            }
            let outer = eager_embed0(d, v + 1 - u - m + 1 - 1, safes.len())?;
            let mut d = outer;
            for c in ss {
                d = builders::app(d, lift_closed(c.deriv, v - c.exponent)?)?;
            }
            Ok(Compiled { deriv: d, exponent: v })
        }
    }
}

// ---------------------------------------------------------------------------
// Textual syntax
// ---------------------------------------------------------------------------

impl fmt::Display for QFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QFunction::Zero { k, l } => write!(f, "z[{k};{l}]"),
            QFunction::Suc0 => write!(f, "s0"),
            QFunction::Suc1 => write!(f, "s1"),
            QFunction::Pred => write!(f, "p"),
            QFunction::Proj { k, l, i } => write!(f, "proj[{k};{l};{i}]"),
            QFunction::Branch => write!(f, "b"),
            QFunction::Comp { k, f: head, gs, hs } => {
                let l: usize = hs.iter().map(|h| h.arity().1).sum();
                write!(f, "comp[{k};{l};{};{}]({head}", gs.len(), hs.len())?;
                f.write_str("; ")?;
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str("; ")?;
                for (i, h) in hs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{h}")?;
                }
                f.write_str(")")
            }
            QFunction::Rec { g, h0, h1 } => write!(f, "rec({g}; {h0}; {h1})"),
        }
    }
}

impl fmt::Display for QTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QTerm::Var(n) => write!(f, "{n}"),
            QTerm::Apply { f: head, normals, safes } => {
                write!(f, "{head}(")?;
                for (i, a) in normals.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(" ; ")?;
                for (i, a) in safes.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("qlsrn parse error at byte {at}: {msg}")]
pub struct QParseError {
    pub at: usize,
    pub msg: String,
}

struct P<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> P<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, QParseError> {
        Err(QParseError { at: self.pos, msg: msg.into() })
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), QParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<usize, QParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.src.get(self.pos), Some(c) if (*c as char).is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected number");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| QParseError { at: start, msg: "number out of range".into() })
    }

    fn ident(&mut self) -> Result<String, QParseError> {
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
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
    }

    fn function(&mut self, name: &str) -> Result<Option<QFunction>, QParseError> {
        match name {
            "s0" => Ok(Some(QFunction::Suc0)),
            "s1" => Ok(Some(QFunction::Suc1)),
            "p" => Ok(Some(QFunction::Pred)),
            "b" => Ok(Some(QFunction::Branch)),
            "z" => {
                self.expect(b'[')?;
                let k = self.number()?;
                self.expect(b';')?;
                let l = self.number()?;
                self.expect(b']')?;
                Ok(Some(QFunction::Zero { k, l }))
            }
            "proj" => {
                self.expect(b'[')?;
                let k = self.number()?;
                self.expect(b';')?;
                let l = self.number()?;
                self.expect(b';')?;
                let i = self.number()?;
                self.expect(b']')?;
                Ok(Some(QFunction::Proj { k, l, i }))
            }
            "comp" => {
                self.expect(b'[')?;
                let k = self.number()?;
                self.expect(b';')?;
                let _l = self.number()?;
                self.expect(b';')?;
                let _kp = self.number()?;
                self.expect(b';')?;
                let _lp = self.number()?;
                self.expect(b']')?;
                self.expect(b'(')?;
                let f = self.parse_fn()?;
                self.expect(b';')?;
                let mut gs = Vec::new();
                if self.peek() != Some(b';') {
                    gs.push(Arc::new(self.parse_fn()?));
                    while self.eat(b',') {
                        gs.push(Arc::new(self.parse_fn()?));
                    }
                }
                self.expect(b';')?;
                let mut hs = Vec::new();
                if self.peek() != Some(b')') {
                    hs.push(Arc::new(self.parse_fn()?));
                    while self.eat(b',') {
                        hs.push(Arc::new(self.parse_fn()?));
                    }
                }
                self.expect(b')')?;
                Ok(Some(QFunction::Comp { k, f: Arc::new(f), gs, hs }))
            }
            "rec" => {
                self.expect(b'(')?;
                let g = self.parse_fn()?;
                self.expect(b';')?;
                let h0 = self.parse_fn()?;
                self.expect(b';')?;
                let h1 = self.parse_fn()?;
                self.expect(b')')?;
                Ok(Some(QFunction::Rec {
                    g: Arc::new(g),
                    h0: Arc::new(h0),
                    h1: Arc::new(h1),
                }))
            }
            _ => Ok(None),
        }
    }

    fn parse_fn(&mut self) -> Result<QFunction, QParseError> {
        let name = self.ident()?;
        match self.function(&name)? {
            Some(f) => Ok(f),
            None => self.err(format!("unknown function symbol {name}")),
        }
    }

    fn term(&mut self) -> Result<QTerm, QParseError> {
        let name = self.ident()?;
        let f = self.function(&name)?;
        match f {
            None => Ok(QTerm::Var(Name::new(&name))),
            Some(f) => {
                self.expect(b'(')?;
                let mut args: Vec<QTerm> = Vec::new();
                let mut split: Option<usize> = None;
                loop {
                    match self.peek() {
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(b';') => {
                            self.pos += 1;
                            if split.is_some() {
                                return self.err("two ';' separators");
                            }
                            split = Some(args.len());
                        }
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(_) => args.push(self.term()?),
                        None => return self.err("unterminated argument list"),
                    }
                }
                let (k, l) = f.arity();
                let cut = match split {
                    Some(c) => c,
                    None => {
                        if args.len() != k + l {
                            return self.err(format!(
                                "symbol takes {} arguments, got {}",
                                k + l,
                                args.len()
                            ));
                        }
                        k
                    }
                };
                let safes = args.split_off(cut);
                QTerm::apply(f, args, safes).map_err(|e| QParseError {
                    at: self.pos,
                    msg: e.to_string(),
                })
            }
        }
    }
}

pub fn parse_qterm(src: &str) -> Result<QTerm, QParseError> {
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
    use crate::data::decode_word;
    use crate::reduction::reduce_to_nf;

    fn ev(t: &QTerm) -> u64 {
        eval_q(t, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn evaluation_clauses() {
        // p halves, branch tests zero, projections pick
        let two = QTerm::num(2);
        assert_eq!(ev(&two), 2);
        let p2 = QTerm::apply(QFunction::Pred, vec![], vec![two]).unwrap();
        assert_eq!(ev(&p2), 1);
        let br = QTerm::apply(
            QFunction::Branch,
            vec![],
            vec![QTerm::num(0), QTerm::num(4), QTerm::num(7)],
        )
        .unwrap();
        assert_eq!(ev(&br), 4);
        let rec = QFunction::Rec {
            g: Arc::new(QFunction::Zero { k: 0, l: 0 }),
            h0: Arc::new(QFunction::Proj { k: 1, l: 1, i: 2 }),
            h1: Arc::new(QFunction::Proj { k: 1, l: 1, i: 2 }),
        };
        // counting recursion: result of rec(g; pi; pi)(n) follows the unfold
        let r = QTerm::apply(rec, vec![QTerm::num(6)], vec![]).unwrap();
        assert_eq!(ev(&r), 0);
    }

    #[test]
    fn parser_round_trip() {
        for s in [
            "p(s1(z[0;0]()))",
            "b(; z[0;0](), s1(; z[0;0]()), x)",
            "rec(z[0;0]; proj[1;1;2]; proj[1;1;2])(s1(; z[0;0]()) ; )",
            "comp[0;1;0;1](p; ; proj[0;1;1])( ; s1( ; z[0;0]()))",
        ] {
            let t = parse_qterm(s).unwrap();
            let printed = t.to_string();
            assert_eq!(parse_qterm(&printed).unwrap(), t, "{s} -> {printed}");
        }
        assert_eq!(ev(&parse_qterm("p(s1(z[0;0]()))").unwrap()), 0);
    }

    #[test]
    fn weights() {
        assert_eq!(QFunction::Pred.weight(), Weight::new(0, 1));
        let rec = QFunction::Rec {
            g: Arc::new(QFunction::Zero { k: 0, l: 0 }),
            h0: Arc::new(QFunction::Proj { k: 1, l: 1, i: 2 }),
            h1: Arc::new(QFunction::Proj { k: 1, l: 1, i: 2 }),
        };
        assert_eq!(rec.weight(), Weight::new(1, 1));
        let cmp = QFunction::Comp {
            k: 0,
            f: Arc::new(QFunction::Pred),
            gs: vec![],
            hs: vec![Arc::new(QFunction::Proj { k: 0, l: 1, i: 1 })],
        };
        assert_eq!(cmp.weight(), Weight::new(1, 1));
        assert_eq!(QTerm::num(0).weight().unwrap(), Weight::new(1, 1));
    }

    #[test]
    fn bit_oracle_agrees() {
        let f = QFunction::Rec {
            g: Arc::new(QFunction::Proj { k: 0, l: 1, i: 1 }),
            h0: Arc::new(QFunction::Proj { k: 1, l: 2, i: 3 }),
            h1: Arc::new(QFunction::Comp {
                k: 1,
                f: Arc::new(QFunction::Suc1),
                gs: vec![],
                hs: vec![Arc::new(QFunction::Proj { k: 1, l: 2, i: 3 })],
            }),
        };
        for n in 0..16u64 {
            for s in 0..4u64 {
                let direct = apply_fn(&f, &[n], &[s]);
                let viabits =
                    bits::to_u64(&bits::apply(&f, &[bits::from_u64(n)], &[bits::from_u64(s)]));
                assert_eq!(direct, viabits);
            }
        }
    }

    #[test]
    fn base_embeddings_check_and_run() {
        for (f, input, want) in [
            (QFunction::Suc0, 3u64, 6u64),
            (QFunction::Suc1, 3, 7),
            (QFunction::Pred, 6, 3),
        ] {
            let e = embed_fn(&f).unwrap();
            let j = e.deriv.check().unwrap();
            assert_eq!(j.ty, fn_ty(0, 1, 1));
            assert_eq!(e.m, 1);
            let t = crate::term::Term::app(
                e.deriv.subject().clone(),
                data::encode_word(input),
            );
            let (got, _) = reduce_to_nf(&t, 200_000).unwrap();
            assert_eq!(decode_word(&got).unwrap(), want, "{f:?}");
        }
        let z = embed_fn(&QFunction::Zero { k: 1, l: 1 }).unwrap();
        assert_eq!(z.deriv.check().unwrap().ty, fn_ty(1, 1, 1));
        let proj = embed_fn(&QFunction::Proj { k: 1, l: 1, i: 2 }).unwrap();
        assert_eq!(proj.deriv.check().unwrap().ty, fn_ty(1, 1, 1));
        let br = embed_fn(&QFunction::Branch).unwrap();
        assert_eq!(br.deriv.check().unwrap().ty, fn_ty(0, 3, 1));
    }

    #[test]
    fn interpret_numerals() {
        for n in [0u64, 1, 5] {
            let c = interpret(&QTerm::num(n), &BTreeMap::new()).unwrap();
            c.deriv.check().unwrap();
            let (got, _) = reduce_to_nf(c.deriv.subject(), 500_000).unwrap();
            assert_eq!(decode_word(&got).unwrap(), n);
        }
        // variables resolve through the environment
        let mut env = BTreeMap::new();
        env.insert(Name::new("x"), 3u64);
        let c = interpret(&QTerm::Var(Name::new("x")), &env).unwrap();
        let (got, _) = reduce_to_nf(c.deriv.subject(), 500_000).unwrap();
        assert_eq!(decode_word(&got).unwrap(), 3);
    }

    #[test]
    fn interpret_simple_applications() {
        let t = parse_qterm("p(s1(z[0;0]()))").unwrap();
        assert_eq!(ev(&t), 0);
        let c = interpret(&t, &BTreeMap::new()).unwrap();
        c.deriv.check().unwrap();
        let (got, _) = reduce_to_nf(c.deriv.subject(), 1_000_000).unwrap();
        assert_eq!(decode_word(&got).unwrap(), 0);
    }
}

#[cfg(test)]
mod embedding_tests {
    use super::*;
    use crate::data::decode_word;
    use crate::reduction::reduce_to_nf;

    /// rec(g; h0; h1) with g = pi(safe), h_i = s_i(rec-result): rebuilds the
    /// counter into the accumulator, i.e. computes its first argument.
    fn rebuild_rec() -> QFunction {
        let h = |suc: QFunction| {
            Arc::new(QFunction::Comp {
                k: 1,
                f: Arc::new(suc),
                gs: vec![],
                hs: vec![Arc::new(QFunction::Proj { k: 1, l: 2, i: 3 })],
            })
        };
        QFunction::Rec {
            g: Arc::new(QFunction::Proj { k: 0, l: 1, i: 1 }),
            h0: h(QFunction::Suc0),
            h1: h(QFunction::Suc1),
        }
    }

    #[test]
    fn compiled_rec_types_and_runs() {
        let f = rebuild_rec();
        // semantics: f(n; s)=n rebuilt over base s... check against eval
        let e = embed_fn(&f).unwrap();
        let j = e.deriv.check().unwrap();
        let (want_ty, want_m) = embedded_type(&f).unwrap();
        assert_eq!(j.ty, want_ty);
        assert_eq!(e.m, want_m);
        for (n, s) in [(0u64, 0u64), (1, 0), (2, 0), (5, 1)] {
            let expect = apply_fn(&f, &[n], &[s]);
            let t = crate::term::Term::apps(
                e.deriv.subject().clone(),
                [data::encode_word(n), data::encode_word(s)],
            );
            let (got, tr) = reduce_to_nf(&t, 6_000_000).unwrap();
            assert_eq!(
                decode_word(&got).unwrap(),
                expect,
                "rec on ({n};{s}), {} steps",
                tr.len()
            );
        }
    }

    #[test]
    fn interpret_rec_application() {
        let f = rebuild_rec();
        let t = QTerm::apply(f, vec![QTerm::num(5)], vec![QTerm::num(0)]).unwrap();
        let expect = eval_q(&t, &BTreeMap::new()).unwrap();
        let c = interpret(&t, &BTreeMap::new()).unwrap();
        c.deriv.check().unwrap();
        let (got, tr) = reduce_to_nf(c.deriv.subject(), 8_000_000).unwrap();
        assert_eq!(decode_word(&got).unwrap(), expect, "{} steps", tr.len());
        // the witnessed exponent matches the schema arithmetic
        let (_, m) = embedded_type(&rebuild_rec()).unwrap();
        assert!(c.exponent >= m);
    }
}
