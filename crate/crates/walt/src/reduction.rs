//! The restricted reduction relation, level-indexed steps, rounds, the
//! canonical strategy, and polynomial step accounting.
//!
//! A beta redex `(\x.M)N` fires only when it erases (`x` unused), when the
//! argument is a value consumed once, or when the argument is a value with at
//! most one free variable. Depth labels ride on the term nodes: substitution
//! keeps the argument's labels and the context's labels, so labels stay sound
//! across steps and rounds can select redexes by level.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::derivation::Derivation;
use crate::measures;
use crate::term::{Name, Position, Selector, Term};

/// Which clause of the rewriting relation lets the redex fire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RedexCase {
    /// Binder unused; any argument.
    Erasing,
    /// Binder used once; the argument is a value.
    LinearValue,
    /// Binder used more than once; the argument is a value with at most one
    /// free variable.
    DuplicableValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub pos: Position,
    pub case: RedexCase,
    pub binder_occurrences: u64,
}

/// Classify an application node, if it is a redex.
fn classify(t: &Term) -> Option<(RedexCase, u64)> {
    let (fun, arg) = t.as_app()?;
    let (x, body) = fun.as_abs()?;
    let n = body.nocc(x);
    if n == 0 {
        return Some((RedexCase::Erasing, 0));
    }
    if !arg.is_value() {
        return None;
    }
    if n == 1 {
        return Some((RedexCase::LinearValue, 1));
    }
    if arg.free_vars().len() <= 1 {
        return Some((RedexCase::DuplicableValue, n));
    }
    None
}

/// All redexes in leftmost-outermost order.
pub fn find_redexes(t: &Term) -> Vec<Redex> {
    let mut out = Vec::new();
    fn go(t: &Term, cur: &mut Vec<Selector>, out: &mut Vec<Redex>) {
        if let Some((case, n)) = classify(t) {
            out.push(Redex {
                pos: Position::from_selectors(cur.clone()),
                case,
                binder_occurrences: n,
            });
        }
        if let Some((_, b)) = t.as_abs() {
            cur.push(Selector::Body);
            go(b, cur, out);
            cur.pop();
        } else if let Some((f, a)) = t.as_app() {
            cur.push(Selector::Fun);
            go(f, cur, out);
            cur.pop();
            cur.push(Selector::Arg);
            go(a, cur, out);
            cur.pop();
        }
    }
    go(t, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, thiserror::Error)]
pub enum ReduceError {
    #[error("not a redex at {0}: {1}")]
    NotARedex(Position, String),
    #[error("budget exhausted after {steps} steps")]
    BudgetExhausted { steps: u64, trace: Trace },
    #[error("term not normal after the final round")]
    NotNormalAfterFinalRound { trace: Trace },
}

/// Contract the redex at `r.pos`. The firing conditions are re-checked.
pub fn step(t: &Term, r: &Redex) -> Result<Term, ReduceError> {
    let sub = t
        .subterm_at(&r.pos)
        .ok_or_else(|| ReduceError::NotARedex(r.pos.clone(), "position invalid".into()))?;
    let Some((case, _)) = classify(sub) else {
        return Err(ReduceError::NotARedex(
            r.pos.clone(),
            "firing conditions do not hold".into(),
        ));
    };
    if case != r.case {
        return Err(ReduceError::NotARedex(r.pos.clone(), "case mismatch".into()));
    }
    let (fun, arg) = sub.as_app().unwrap();
    let (x, body) = fun.as_abs().unwrap();
    let contracted = body.substitute1(x, arg);
    Ok(t.replace_at(&r.pos, contracted).unwrap())
}

/// One recorded reduction step.
#[derive(Clone, Debug)]
pub struct Step {
    pub before: Term,
    pub pos: Position,
    pub depth: u32,
    pub after: Term,
}

/// Summary of one complete round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundSummary {
    pub level: u32,
    pub steps: u64,
    pub size_after: u64,
}

#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub steps: Vec<Step>,
    pub rounds: Vec<RoundSummary>,
}

impl Trace {
    pub fn len(&self) -> u64 {
        self.steps.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One line per step, then one line per round summary.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "#{} d={} pos={} | {} --> {}",
                i, s.depth, s.pos, s.before, s.after
            );
        }
        for r in &self.rounds {
            let _ = writeln!(out, "ROUND d={} steps={} size={}", r.level, r.steps, r.size_after);
        }
        out
    }
}

/// Engine state: a cache of subterms known to be free of redexes (by node
/// identity). Terms are immutable and shared, so normality is stable; the
/// guard list keeps every cached node alive for the lifetime of the run.
struct Engine {
    normal: HashSet<usize>,
    guard: Vec<Term>,
    level: Option<u32>,
}

impl Engine {
    fn new(level: Option<u32>) -> Engine {
        Engine { normal: HashSet::new(), guard: Vec::new(), level }
    }

    fn eligible(&self, t: &Term) -> Option<(RedexCase, u64)> {
        let c = classify(t)?;
        if let Some(lvl) = self.level {
            if t.dep() != lvl {
                return None;
            }
        }
        Some(c)
    }

    /// Leftmost-outermost eligible redex, skipping cached-normal subtrees.
    fn first_redex(&mut self, t: &Term, cur: &mut Vec<Selector>) -> Option<Redex> {
        if self.normal.contains(&t.addr()) {
            return None;
        }
        if let Some((case, n)) = self.eligible(t) {
            return Some(Redex {
                pos: Position::from_selectors(cur.clone()),
                case,
                binder_occurrences: n,
            });
        }
        if let Some((_, b)) = t.as_abs() {
            cur.push(Selector::Body);
            let r = self.first_redex(b, cur);
            cur.pop();
            if r.is_some() {
                return r;
            }
        } else if let Some((f, a)) = t.as_app() {
            cur.push(Selector::Fun);
            let r = self.first_redex(f, cur);
            cur.pop();
            if r.is_some() {
                return r;
            }
            cur.push(Selector::Arg);
            let r = self.first_redex(a, cur);
            cur.pop();
            if r.is_some() {
                return r;
            }
        }
        self.normal.insert(t.addr());
        self.guard.push(t.clone());
        None
    }

    fn run(&mut self, start: &Term, budget: u64, trace: &mut Trace) -> Result<(Term, u64), ReduceError> {
        let mut cur = start.clone();
        let mut steps = 0u64;
        while let Some(r) = self.first_redex(&cur.clone(), &mut Vec::new()) {
            if steps >= budget {
                return Err(ReduceError::BudgetExhausted { steps, trace: std::mem::take(trace) });
            }
            let depth = cur.subterm_at(&r.pos).unwrap().dep();
            let next = step(&cur, &r)?;
            trace.steps.push(Step { before: cur.clone(), pos: r.pos, depth, after: next.clone() });
            cur = next;
            steps += 1;
        }
        Ok((cur, steps))
    }
}

/// Normalize under the leftmost-outermost strategy; the unrestricted run
/// fires any eligible redex regardless of level.
pub fn reduce_to_nf(t: &Term, budget: u64) -> Result<(Term, Trace), ReduceError> {
    let mut trace = Trace::default();
    let mut eng = Engine::new(None);
    let (nf, _) = eng.run(t, budget, &mut trace)?;
    Ok((nf, trace))
}

/// Convenience wrapper that panics on budget exhaustion; test use only.
pub fn nf(t: &Term) -> Term {
    reduce_to_nf(t, DEFAULT_BUDGET).expect("normalization within budget").0
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Fire only redexes labelled `lvl` until none remain (a complete round).
pub fn round(t: &Term, lvl: u32, budget: u64) -> Result<(Term, u64), ReduceError> {
    let mut trace = Trace::default();
    let mut eng = Engine::new(Some(lvl));
    eng.run(t, budget, &mut trace)
}

/// Like `round` but records steps into the given trace.
fn round_traced(t: &Term, lvl: u32, budget: u64, trace: &mut Trace) -> Result<(Term, u64), ReduceError> {
    let mut eng = Engine::new(Some(lvl));
    eng.run(t, budget, trace)
}

/// Execute complete rounds at levels `0..=depth` starting from the checked
/// derivation's subject, then assert the result is in full normal form.
pub fn canonical_normalize(d: &Derivation, budget: u64) -> Result<(Term, Trace), ReduceError> {
    let mut trace = Trace::default();
    let dmax = measures::depth(d);
    let mut cur = measures::annotate_subject(d);
    let mut left = budget;
    for lvl in 0..=dmax {
        let (next, steps) = round_traced(&cur, lvl, left, &mut trace)?;
        left = left.saturating_sub(steps);
        cur = next;
        trace.rounds.push(RoundSummary { level: lvl, steps, size_after: cur.size() });
    }
    if !find_redexes(&cur).is_empty() {
        return Err(ReduceError::NotNormalAfterFinalRound { trace });
    }
    Ok((cur, trace))
}

/// Purely arithmetic report of the polynomial bound: per-level step budgets
/// are the partial sizes of the initial derivation, the growth cap doubles
/// the square of the running size surrogate per round, and the total bound
/// sums the surrogates across all rounds.
#[derive(Clone, Debug)]
pub struct PolyBoundReport {
    /// Maximal per-round polynomial degree.
    pub k: u32,
    pub depth: u32,
    /// Size surrogate: the sum of all partial sizes.
    pub size: u64,
    /// Partial size per level of the initial derivation.
    pub per_round_bounds: Vec<u64>,
    /// Surrogate size cap entering each round.
    pub growth_caps: Vec<BigUint>,
    /// Total step bound for a complete canonical strategy.
    pub bound: BigUint,
}

pub fn poly_bound_report(d: &Derivation) -> PolyBoundReport {
    let depth = measures::depth(d);
    let per_round_bounds = measures::partial_sizes(d);
    let size: u64 = per_round_bounds.iter().sum();
    let mut caps = Vec::new();
    let mut cap = BigUint::from(size);
    let mut bound = BigUint::from(0u32);
    for lvl in 0..=depth {
        caps.push(cap.clone());
        bound += if lvl == 0 { BigUint::from(per_round_bounds[0]) } else { cap.clone() };
        cap = BigUint::from(2u32) * cap.clone() * cap;
    }
    PolyBoundReport { k: 2, depth, size, per_round_bounds, growth_caps: caps, bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn redex_cases() {
        let r = find_redexes(&t("(\\x. y)(w z)"));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].case, RedexCase::Erasing);

        let r = find_redexes(&t("(\\x. x)(\\y. y)"));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].case, RedexCase::LinearValue);

        // duplication requires a value argument
        assert!(find_redexes(&t("(\\x. z x x)(w v)")).is_empty());

        let r = find_redexes(&t("(\\x. x x)(\\y. w y)"));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].case, RedexCase::DuplicableValue);

        // two free variables in the argument block duplication
        assert!(find_redexes(&t("(\\x. x x)(\\y. w (v y))")).is_empty());
    }

    #[test]
    fn step_examples() {
        let m = t("(\\x. y) q");
        let r = &find_redexes(&m)[0];
        assert_eq!(step(&m, r).unwrap(), t("y"));

        let m = t("(\\x. x x)(\\y. y)");
        let r = &find_redexes(&m)[0];
        assert_eq!(step(&m, r).unwrap(), t("(\\y. y)(\\y. y)"));

        let m = t("(\\x. f x x)(g y)");
        let r = Redex {
            pos: Position::root(),
            case: RedexCase::DuplicableValue,
            binder_occurrences: 2,
        };
        assert!(matches!(step(&m, &r), Err(ReduceError::NotARedex(..))));
    }

    #[test]
    fn normalize_simple() {
        let (nf, tr) = reduce_to_nf(&t("(\\x. x)(\\y. y)"), 100).unwrap();
        assert_eq!(nf, t("\\y. y"));
        assert_eq!(tr.len(), 1);
        let (nf, tr) = reduce_to_nf(&t("\\x. x"), 100).unwrap();
        assert_eq!(nf, t("\\x. x"));
        assert!(tr.is_empty());
    }

    #[test]
    fn shared_arg_is_stuck() {
        // the duplicable case needs a value argument
        let m = t("(\\x. y x x)(w z)");
        let (nf, tr) = reduce_to_nf(&m, 100).unwrap();
        assert_eq!(nf, m);
        assert!(tr.is_empty());
    }

    #[test]
    fn budget_exhaustion_reports_partial_trace() {
        // (\x. x x)(\x. x x) never fires under the restricted relation
        // (two occurrences, argument closed: it does fire and loops)
        let m = t("(\\x. x x)(\\x. x x)");
        match reduce_to_nf(&m, 10) {
            Err(ReduceError::BudgetExhausted { steps, trace }) => {
                assert_eq!(steps, 10);
                assert_eq!(trace.len(), 10);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn trace_render_format() {
        let m = t("(\\x. x)(\\y. y)");
        let (_, tr) = reduce_to_nf(&m, 10).unwrap();
        let s = tr.render();
        assert!(s.starts_with("#0 d=0 pos=. | "));
        assert!(s.contains("-->"));
    }
}
