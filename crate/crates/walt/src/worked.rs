//! Small standalone derivations used across the test suites and shipped as
//! sample inputs: the application of a boxed identity under two modal rules,
//! the non-normalizing double application, and an identity applied to a
//! two-iteration numeral.

use crate::builders::{self, DollarSplit};
use crate::data;
use crate::derivation::Derivation;
use crate::formula::{parse_formula, Formula};
use crate::term::{fresh, Name};

/// `w y (\x. x)` where `w : !a -o $!(b -o b) -o g`, `y` polynomial.
/// Depth 2, partial sizes (3, 3, 4).
pub fn pi_wy_id() -> Derivation {
    let w_ty = parse_formula("!a -o $!(b -o b) -o g").unwrap();
    let aw = builders::axiom("w", w_ty).unwrap();
    let ay = builders::phi_var("y", Formula::tyvar("a")).unwrap();
    let wy = builders::app(aw, ay).unwrap();
    let id = builders::identity(Formula::tyvar("b")).unwrap();
    let id = builders::bang(id, None).unwrap();
    let id = builders::dollar(id, &DollarSplit::default()).unwrap();
    builders::app(wy, id).unwrap()
}

/// `(\x. y x x)(w z)` with the argument boxed over its own assumptions;
/// the term is typeable but carries no redex the restricted relation fires.
pub fn pi_shared_arg() -> Derivation {
    let a = Formula::tyvar("a");
    let y_ty = parse_formula("!a -o !a -o a").unwrap();
    let x = fresh("x");
    let ax1 = builders::phi_var(x.clone(), a.clone()).unwrap();
    let ax2 = builders::phi_var(x.clone(), a.clone()).unwrap();
    let ay = builders::axiom("y", y_ty).unwrap();
    let body = builders::app(builders::app(ay, ax1).unwrap(), ax2).unwrap();
    let fun = builders::lolli_i_bang(body, &x).unwrap();
    let aw = builders::axiom("w", parse_formula("a -o a").unwrap()).unwrap();
    let az = builders::axiom("z", a).unwrap();
    let wz = builders::app(aw, az).unwrap();
    let wz = builders::bang(wz, Some(&Name::new("z"))).unwrap();
    builders::app(fun, wz).unwrap()
}

/// `(\x. x)(\f y. f (f y))` at the string type; width 2 at level one.
pub fn pi_id_two() -> Derivation {
    let n = data::ty_string();
    let x = fresh("x");
    let id = builders::lolli_i(builders::axiom(x.clone(), n).unwrap(), &x).unwrap();
    builders::app(id, data::string_deriv(2)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{depth, depth_map, partial_sizes, width, widths};
    use crate::term::{parse_term, Position, Selector};

    #[test]
    fn wy_id_measures() {
        let d = pi_wy_id();
        d.check().unwrap();
        assert_eq!(d.subject(), &parse_term("w y (\\x. x)").unwrap());
        assert_eq!(depth(&d), 2);
        assert_eq!(partial_sizes(&d), vec![3, 3, 4]);
        assert_eq!(width(&d, 0), 0);
        // a bare axiom has zero width everywhere
        let ax = builders::axiom("v", Formula::tyvar("a")).unwrap();
        assert_eq!(width(&ax, 1), 0);
        assert_eq!(depth(&ax), 0);
        assert_eq!(partial_sizes(&ax), vec![1]);
    }

    #[test]
    fn wy_id_depth_map() {
        let d = pi_wy_id();
        let map = depth_map(&d);
        assert_eq!(map[&Position::root()], 0);
        // y sits under one ! box
        assert_eq!(map[&Position::from_selectors(vec![Selector::Fun, Selector::Arg])], 1);
        // the identity sits under one $ and one !
        assert_eq!(map[&Position::from_selectors(vec![Selector::Arg])], 2);
        assert_eq!(
            map[&Position::from_selectors(vec![Selector::Arg, Selector::Body])],
            2
        );
        let dmax = depth(&d);
        assert!(map.values().all(|v| *v <= dmax));
    }

    #[test]
    fn shared_argument_checks() {
        let d = pi_shared_arg();
        let j = d.check().unwrap();
        assert_eq!(j.subject, parse_term("(\\x. y x x)(w z)").unwrap());
        assert_eq!(depth(&d), 1);
    }

    #[test]
    fn id_two_width() {
        let d = pi_id_two();
        d.check().unwrap();
        assert_eq!(width(&d, 1), 2);
        assert_eq!(depth(&d), 1);
        // width never exceeds partial size on these examples
        for ex in [pi_wy_id(), pi_shared_arg(), pi_id_two()] {
            let ws = widths(&ex);
            let ps = partial_sizes(&ex);
            for (w, p) in ws.iter().zip(&ps) {
                assert!(w <= p, "width {w} above size {p}");
            }
        }
    }

    #[test]
    fn modal_box_mutations_are_rejected() {
        use crate::derivation::{Rule, ViolationKind};
        // force a nonempty second zone into the premise of the ! box
        let mut d = pi_wy_id();
        fn poison(d: &mut Derivation) -> bool {
            if matches!(d.rule, Rule::Bang) {
                let p = &mut d.premises[0];
                p.conclusion.delta.insert(Name::new("junk"), Formula::tyvar("a"));
                return true;
            }
            d.premises.iter_mut().any(poison)
        }
        assert!(poison(&mut d));
        let v = d.check().unwrap_err();
        assert!(matches!(
            v.kind,
            ViolationKind::BangPremiseDelta | ViolationKind::ContextMismatch
        ));
    }
}
