//! Shared fixtures for the benchmarks.

use mca::algebra::Code;
use mca::gen::{gen_closed_pure_expr, Rng};
use mca::syntax::{parse, Expr};

/// A deterministic pool of closed pure terms.
pub fn term_pool(count: usize, depth: u32) -> Vec<Expr> {
    let mut rng = Rng::new(0xbe9c);
    (0..count)
        .map(|_| gen_closed_pure_expr(&mut rng, depth))
        .collect()
}

/// Church-numeral iteration: `n̄ succ m̄` with an iterating successor.
pub fn church_sum_term(n: u64, m: u64) -> Expr {
    let succ = parse("<2|1 (0 1 2)>").expect("succ parses");
    Expr::apps(
        Expr::lit(mca::effects::church(n)),
        [succ, Expr::lit(mca::effects::church(m))],
    )
}

/// The S/K compilation of the S combinator body, a mid-sized bracket job.
pub fn bracket_job() -> (u32, Expr) {
    (2, parse("(0 2)(1 2)").expect("body parses"))
}

pub fn looping() -> Code {
    mca::algebra::looping_code()
}
