//! Translation to the temporal description logic DLR_US and evaluation of
//! its axioms over finite interpretations.

mod eval;
mod expr;
mod translate;

pub use eval::{
    axiom_counterexamples, kb_satisfied, kb_satisfied_with, Counterexample, DlrError, Elem, Ext, Interp,
};
pub use expr::{name, Cmp, Dir, Expr, Sort, TOp};
pub use translate::{
    future_set, past_set, translate, translate_with, Axiom, Definition, DlrKb, Provenance, Signature,
};
