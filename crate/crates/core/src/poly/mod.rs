//! Exact rational computer-algebra kernel: canonical symbolic expressions
//! in `t` (with a parameter `s`), exact expansion and differentiation, and
//! certified polynomial positivity.

mod expr;
mod positivity;
mod sexpr;

pub use expr::{differentiate, equal_exact, expand_collect, rat, Expr, Rat, SPoly, TermKey};
pub use positivity::{
    certify_positive, certify_positive_global, eval_poly, CertLeaf, Certificate, PositivityFailure,
};
pub use sexpr::{
    parse as parse_sexpr, parse_claim_file, print as print_sexpr, SexprError, TopForm,
};
