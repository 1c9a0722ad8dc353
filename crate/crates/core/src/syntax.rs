//! Applicative expressions over lexical addresses (de Bruijn levels).
//!
//! An expression is a variable level, a code literal, or an application.
//! `E_n` is the set of expressions whose variable levels are all `< n`;
//! `scope_check` tests membership. Substitution consumes level 0 and
//! shifts the remaining levels down, so repeatedly substituting closes a
//! term one parameter at a time.

use std::fmt;
use std::rc::Rc;

use crate::algebra::Code;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    /// A lexical address: the index of a formal parameter, outermost first.
    Var(u32),
    /// An embedded code constant.
    Lit(Code),
    /// Application, left-associative in the surface syntax.
    App(Rc<Expr>, Rc<Expr>),
}

impl Expr {
    pub fn var(i: u32) -> Expr {
        Expr::Var(i)
    }

    pub fn lit(c: Code) -> Expr {
        Expr::Lit(c)
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Rc::new(f), Rc::new(a))
    }

    /// Left-associated application of several arguments.
    pub fn apps<I: IntoIterator<Item = Expr>>(f: Expr, args: I) -> Expr {
        args.into_iter().fold(f, Expr::app)
    }

    /// Largest variable level occurring in the expression, if any.
    /// Codes are atomic: levels inside closure literals do not count.
    pub fn max_level(&self) -> Option<u32> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Lit(_) => None,
            Expr::App(f, a) => match (f.max_level(), a.max_level()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, None) => x,
                (None, y) => y,
            },
        }
    }
}

/// True iff `e` is a member of `E_n`, i.e. every variable level is `< n`.
pub fn scope_check(e: &Expr, n: u32) -> bool {
    match e.max_level() {
        None => true,
        Some(m) => m < n,
    }
}

/// Signalled when an expression escapes its declared scope. Always a
/// caller bug: closure bodies are scope-checked at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScopeViolation {
    pub level: u32,
    pub bound: u32,
}

impl fmt::Display for ScopeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "variable level {} out of scope (expected < {})",
            self.level, self.bound
        )
    }
}

impl std::error::Error for ScopeViolation {}

/// Substitute `c` for level 0 in `e ∈ E_{n+1}`, shifting the other levels
/// down; the result is in `E_n`. Level 0 becomes the literal `c`, level
/// `i+1` becomes `i`, literals are untouched, applications map structurally.
pub fn subst(e: &Expr, n: u32, c: &Code) -> Result<Expr, ScopeViolation> {
    match e {
        Expr::Var(0) => Ok(Expr::Lit(c.clone())),
        Expr::Var(i) if *i <= n => Ok(Expr::Var(i - 1)),
        Expr::Var(i) => Err(ScopeViolation {
            level: *i,
            bound: n + 1,
        }),
        Expr::Lit(k) => Ok(Expr::Lit(k.clone())),
        Expr::App(f, a) => Ok(Expr::app(subst(f, n, c)?, subst(a, n, c)?)),
    }
}

// ---------------------------------------------------------------------------
// Canonical printing
//
// term := atom | term atom          (application, left-associative)
// atom := NAT | '<' NAT '|' term '>' | '#' IDENT | '(' term ')'
// ---------------------------------------------------------------------------

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, f, false)
    }
}

fn fmt_expr(e: &Expr, f: &mut fmt::Formatter<'_>, arg_position: bool) -> fmt::Result {
    match e {
        Expr::Var(i) => write!(f, "{i}"),
        Expr::Lit(c) => write!(f, "{c}"),
        Expr::App(fun, arg) => {
            if arg_position {
                write!(f, "(")?;
            }
            fmt_expr(fun, f, false)?;
            write!(f, " ")?;
            fmt_expr(arg, f, true)?;
            if arg_position {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// The sanity bound on parsed numerals; catches malformed input cheaply.
pub const MAX_LEVEL: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    UnexpectedChar { pos: usize, found: char },
    UnexpectedEnd,
    UnknownPrim { pos: usize, name: String },
    NumeralTooLarge { pos: usize },
    BodyOutOfScope { pos: usize, arity: u32, level: u32 },
    TrailingInput { pos: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::UnexpectedChar { pos, found } => {
                write!(f, "unexpected character {found:?} at byte {pos}")
            }
            ParseError::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseError::UnknownPrim { pos, name } => {
                write!(f, "unknown primitive #{name} at byte {pos}")
            }
            ParseError::NumeralTooLarge { pos } => {
                write!(f, "numeral at byte {pos} exceeds the 2^32 sanity bound")
            }
            ParseError::BodyOutOfScope { pos, arity, level } => write!(
                f,
                "closure body at byte {pos} uses level {level}, but <{arity}|..> binds levels < {}",
                arity + 1
            ),
            ParseError::TrailingInput { pos } => write!(f, "trailing input at byte {pos}"),
        }
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == ch => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(ParseError::UnexpectedChar {
                pos: self.pos,
                found: c as char,
            }),
            None => Err(ParseError::UnexpectedEnd),
        }
    }

    fn numeral(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(d) = self.src.get(self.pos).copied().filter(u8::is_ascii_digit) {
            value = value * 10 + u64::from(d - b'0');
            if value >= MAX_LEVEL {
                return Err(ParseError::NumeralTooLarge { pos: start });
            }
            self.pos += 1;
        }
        Ok(value as u32)
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.atom()?;
        loop {
            match self.peek() {
                Some(c) if c == b'>' || c == b')' || c == b'|' => break,
                Some(_) => acc = Expr::app(acc, self.atom()?),
                None => break,
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Expr::Var(self.numeral()?)),
            Some(b'<') => {
                let open = self.pos;
                self.expect(b'<')?;
                self.skip_ws();
                let arity = self.numeral()?;
                self.expect(b'|')?;
                let body = self.term()?;
                self.expect(b'>')?;
                match body.max_level() {
                    Some(level) if level > arity => Err(ParseError::BodyOutOfScope {
                        pos: open,
                        arity,
                        level,
                    }),
                    _ => Ok(Expr::Lit(Code::closure_unchecked(arity, body))),
                }
            }
            Some(b'#') => {
                self.pos += 1;
                let start = self.pos;
                let name = self.ident();
                match Code::prim_by_name(&name) {
                    Some(code) => Ok(Expr::Lit(code)),
                    None => Err(ParseError::UnknownPrim { pos: start, name }),
                }
            }
            Some(b'(') => {
                self.expect(b'(')?;
                let inner = self.term()?;
                self.expect(b')')?;
                Ok(inner)
            }
            // Sugar for the bracket-abstraction output format.
            Some(b'S') => {
                self.pos += 1;
                Ok(Expr::Lit(crate::algebra::s_code()))
            }
            Some(b'K') => {
                self.pos += 1;
                Ok(Expr::Lit(crate::algebra::k_code()))
            }
            Some(c) => Err(ParseError::UnexpectedChar {
                pos: self.pos,
                found: c as char,
            }),
            None => Err(ParseError::UnexpectedEnd),
        }
    }
}

/// Parse a term. `print(parse(t))` reparses to an equal tree. The
/// uppercase `S` and `K` atoms are accepted as sugar for the standard
/// combinator closures so that `compile` output is readable back in.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text);
    let e = p.term()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ParseError::TrailingInput { pos: p.pos });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{k_code, s_code};

    fn closure(n: u32, body: Expr) -> Code {
        Code::closure(n, body).unwrap()
    }

    #[test]
    fn parse_single_variable() {
        assert_eq!(parse("0").unwrap(), Expr::Var(0));
    }

    #[test]
    fn parse_identity_closure_literal() {
        let e = parse("<1|0>").unwrap();
        assert_eq!(e, Expr::Lit(closure(1, Expr::Var(0))));
    }

    #[test]
    fn parse_s_shaped_closure() {
        let e = parse("<2|(0 2)(1 2)>").unwrap();
        let body = Expr::app(
            Expr::app(Expr::Var(0), Expr::Var(2)),
            Expr::app(Expr::Var(1), Expr::Var(2)),
        );
        assert_eq!(e, Expr::Lit(closure(2, body)));
    }

    #[test]
    fn parse_rejects_out_of_scope_body() {
        assert!(matches!(
            parse("<1|2>"),
            Err(ParseError::BodyOutOfScope { .. })
        ));
    }

    #[test]
    fn parse_rejects_unknown_prim() {
        assert!(matches!(parse("#bogus"), Err(ParseError::UnknownPrim { .. })));
    }

    #[test]
    fn parse_rejects_huge_numeral() {
        assert!(matches!(
            parse("4294967296"),
            Err(ParseError::NumeralTooLarge { .. })
        ));
        assert!(parse("4294967295").is_ok());
    }

    #[test]
    fn parse_reports_trailing_input() {
        assert!(matches!(parse("0 )"), Err(ParseError::TrailingInput { .. })));
    }

    #[test]
    fn print_is_canonical() {
        assert_eq!(Expr::Var(0).to_string(), "0");
        let self_app = closure(0, Expr::app(Expr::Var(0), Expr::Var(0)));
        assert_eq!(Expr::Lit(self_app).to_string(), "<0|0 0>");
    }

    #[test]
    fn print_left_associative_without_redundant_parens() {
        let e = parse("0 1 2").unwrap();
        assert_eq!(e.to_string(), "0 1 2");
        let e = parse("0 (1 2)").unwrap();
        assert_eq!(e.to_string(), "0 (1 2)");
    }

    #[test]
    fn sk_sugar_parses_to_combinator_closures() {
        assert_eq!(parse("S").unwrap(), Expr::Lit(s_code()));
        assert_eq!(parse("K").unwrap(), Expr::Lit(k_code()));
        assert!(parse("S K K").is_ok());
    }

    #[test]
    fn subst_replaces_level_zero() {
        let c = closure(1, Expr::Var(0));
        assert_eq!(subst(&Expr::Var(0), 0, &c).unwrap(), Expr::Lit(c));
    }

    #[test]
    fn subst_shifts_higher_levels_down() {
        let c = closure(1, Expr::Var(0));
        assert_eq!(subst(&Expr::Var(3), 3, &c).unwrap(), Expr::Var(2));
    }

    #[test]
    fn subst_maps_applications_structurally() {
        let c = closure(1, Expr::Var(0));
        let e = Expr::app(Expr::Var(0), Expr::Var(1));
        let expected = Expr::app(Expr::Lit(c.clone()), Expr::Var(0));
        assert_eq!(subst(&e, 1, &c).unwrap(), expected);
    }

    #[test]
    fn subst_flags_scope_violations() {
        let c = closure(1, Expr::Var(0));
        assert_eq!(
            subst(&Expr::Var(2), 1, &c),
            Err(ScopeViolation { level: 2, bound: 2 })
        );
    }

    #[test]
    fn scope_check_examples() {
        let c = closure(1, Expr::Var(0));
        assert!(scope_check(&Expr::Var(0), 1));
        assert!(!scope_check(&Expr::Var(1), 1));
        assert!(scope_check(&Expr::app(Expr::Var(2), Expr::Lit(c)), 3));
    }
}
