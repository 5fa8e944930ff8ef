//! The combinator catalog: every encoding ships as a closed term together
//! with a derivation the checker accepts, and the dynamics suites compare
//! reduction results against symbolically built expectations.

pub mod comp;
pub mod core;
pub mod iter;

pub use self::core::*;

use crate::builders::{self, Build};
use crate::formula::Formula;
use crate::term::{fresh, Name};

/// Judgment `;;{({x:$^{n-1}L};)} |- x : $^n L` for an elementary variable
/// consumed at the given `$`-modal type.
pub fn eager_use(x: impl Into<Name>, target: &Formula) -> Build {
    let (n, core) = target.strip_pars();
    assert!(n >= 1, "eager_use needs a $-modal target");
    builders::theta_var_n(x, core.clone(), n)
}

/// Fresh name helper shared by the builders in this module tree.
pub(crate) fn fr(base: &str) -> Name {
    fresh(base)
}
