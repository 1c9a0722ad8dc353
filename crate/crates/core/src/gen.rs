//! Deterministic sample generation for the law suites.
//!
//! A fixed-seed splitmix64 keeps reports byte-identical across platforms,
//! which the golden-file tests and the CLI's `--seed` contract rely on.

use crate::algebra::Code;
use crate::syntax::Expr;

#[derive(Clone, Debug)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.wrapping_add(0x9e3779b97f4a7c15))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len() as u64) as usize]
    }
}

/// Random expression in `E_n`, leaves drawn from variables, the supplied
/// code pool, and fresh small closures.
pub fn gen_expr(rng: &mut Rng, n: u32, depth: u32, pool: &[Code]) -> Expr {
    if depth == 0 || rng.chance(1, 3) {
        // leaf
        let has_vars = n > 0;
        match rng.below(if has_vars { 3 } else { 2 }) {
            0 if has_vars => Expr::Var(rng.below(u64::from(n)) as u32),
            1 if !pool.is_empty() => Expr::Lit(rng.pick(pool).clone()),
            _ => Expr::Lit(gen_closure(rng, depth.saturating_sub(1), pool)),
        }
    } else {
        Expr::app(
            gen_expr(rng, n, depth - 1, pool),
            gen_expr(rng, n, depth - 1, pool),
        )
    }
}

/// Random pure closure `⟨λᵏ.e⟩`, `k ≤ 3`, body depth-bounded.
pub fn gen_closure(rng: &mut Rng, depth: u32, pool: &[Code]) -> Code {
    let arity = rng.below(4) as u32;
    let body = gen_expr(rng, arity + 1, depth, pool);
    Code::closure_unchecked(arity, body)
}

/// Closed expression built from pure closures only.
pub fn gen_closed_pure_expr(rng: &mut Rng, depth: u32) -> Expr {
    gen_expr(rng, 0, depth, &[])
}

/// A small pool of structurally distinct pure codes for probing.
pub fn canonical_codes() -> Vec<Code> {
    use crate::algebra::{k_code, s_code};
    use crate::effects::church;
    vec![
        Code::closure_unchecked(0, Expr::Var(0)),
        k_code(),
        s_code(),
        church(0),
        church(1),
        church(2),
        church(3),
    ]
}
