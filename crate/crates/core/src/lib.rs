//! Effect-parameterized combinatory algebras with executable law checkers.
//!
//! The crate provides, in layers:
//!
//! - [`syntax`]: expressions over lexical addresses, substitution, a
//!   parser and canonical printer;
//! - [`algebra`]: codes, the effect interface, call-by-value evaluation,
//!   the S/K presentation and bracket abstraction;
//! - [`effects`]: five concrete backends (partial, power, state, CPS,
//!   reader) and their primitive codes;
//! - [`machine`]: the defunctionalized eval/apply stack machine;
//! - [`order`]: complete Heyting prealgebras and their finite instances;
//! - [`modality`]: post-condition modalities over computations, with law
//!   and separator checkers;
//! - [`frame`]: propositions over codes, evidence, the evidenced-frame
//!   law suite, consistency, and the tripos preorder;
//! - [`assembly`]: assemblies and tracked morphisms over a frame.

pub mod algebra;
pub mod assembly;
pub mod config;
pub mod effects;
pub mod frame;
pub mod gen;
pub mod machine;
pub mod modality;
pub mod order;
pub mod report;
pub mod syntax;

pub use algebra::{apply, eval, Code, Effect, EvalError, EvalResult, PrimCode};
pub use syntax::{parse, scope_check, subst, Expr};

/// Run a computation on a dedicated thread with a large stack.
///
/// The evaluator nests in proportion to its fuel budget on diverging
/// terms, which outgrows default thread stacks well before a budget of
/// 10^4 beta steps is spent. Values built inside stay inside unless they
/// are `Send`; callers move whole computations in and plain results out.
pub fn with_deep_stack<R: Send + 'static>(f: impl FnOnce() -> R + Send + 'static) -> R {
    std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(f)
        .expect("spawn evaluation thread")
        .join()
        .expect("evaluation thread panicked")
}
