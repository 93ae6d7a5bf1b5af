//! Read-once formulas, whose restrictions stay read-once, so restricting
//! one never needs the truth table.

use super::{AdversaryError, Result};
use crate::boolfn::BooleanFunction;
use std::fmt;

/// AND/OR formula in which each variable appears at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadOnceFormula {
    Var { index: usize, negated: bool },
    Const(bool),
    And(Vec<ReadOnceFormula>),
    Or(Vec<ReadOnceFormula>),
}

impl ReadOnceFormula {
    pub fn var(index: usize) -> Self {
        ReadOnceFormula::Var { index, negated: false }
    }

    pub fn evaluate(&self, x: u64) -> bool {
        match self {
            ReadOnceFormula::Var { index, negated } => (x >> index & 1 == 1) != *negated,
            ReadOnceFormula::Const(b) => *b,
            ReadOnceFormula::And(cs) => cs.iter().all(|c| c.evaluate(x)),
            ReadOnceFormula::Or(cs) => cs.iter().any(|c| c.evaluate(x)),
        }
    }

    /// Variable indices in left-to-right order.
    pub fn variables(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            ReadOnceFormula::Var { index, .. } => out.push(*index),
            ReadOnceFormula::Const(_) => {}
            ReadOnceFormula::And(cs) | ReadOnceFormula::Or(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    fn check_read_once(&self) -> Result<()> {
        let mut vars = self.variables();
        vars.sort_unstable();
        if vars.windows(2).any(|w| w[0] == w[1]) {
            return Err(AdversaryError::BadArgument(format!("{self} reads a variable twice")));
        }
        Ok(())
    }

    /// Truth table over `arity` variables.
    pub fn to_function(&self, arity: usize) -> Result<BooleanFunction> {
        if let Some(&m) = self.variables().iter().max() {
            if m >= arity {
                return Err(AdversaryError::BadArgument(format!("variable x{} beyond arity {arity}", m + 1)));
            }
        }
        if arity > crate::boolfn::TABLE_CAP {
            return Err(AdversaryError::TooLarge { what: "formula arity", size: arity, cap: crate::boolfn::TABLE_CAP });
        }
        Ok(BooleanFunction::from_fn(arity, self.to_string(), |x| self.evaluate(x)))
    }

    /// `&`, `|`, `!`, parentheses, `0`, `1` and 1-based variables `x1, x2, …`.
    /// Mixing `&` and `|` at one level needs parentheses.
    pub fn parse(text: &str) -> Result<Self> {
        let tokens: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let f = parse_expr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(AdversaryError::BadArgument(format!("trailing input at {pos} in {text:?}")));
        }
        f.check_read_once()?;
        Ok(f)
    }
}

fn parse_expr(t: &[char], pos: &mut usize) -> Result<ReadOnceFormula> {
    let first = parse_atom(t, pos)?;
    let Some(&op) = t.get(*pos).filter(|c| **c == '&' || **c == '|') else { return Ok(first) };
    let mut items = vec![first];
    while t.get(*pos) == Some(&op) {
        *pos += 1;
        items.push(parse_atom(t, pos)?);
    }
    if matches!(t.get(*pos), Some('&' | '|')) {
        return Err(AdversaryError::BadArgument("mixed & and | need parentheses".into()));
    }
    Ok(if op == '&' { ReadOnceFormula::And(items) } else { ReadOnceFormula::Or(items) })
}

fn parse_atom(t: &[char], pos: &mut usize) -> Result<ReadOnceFormula> {
    let bad = |what: &str, at: usize| AdversaryError::BadArgument(format!("expected {what} at {at}"));
    match t.get(*pos) {
        Some('(') => {
            *pos += 1;
            let f = parse_expr(t, pos)?;
            if t.get(*pos) != Some(&')') {
                return Err(bad("')'", *pos));
            }
            *pos += 1;
            Ok(f)
        }
        Some('!') => {
            *pos += 1;
            Ok(negate(parse_atom(t, pos)?))
        }
        Some('0') => {
            *pos += 1;
            Ok(ReadOnceFormula::Const(false))
        }
        Some('1') => {
            *pos += 1;
            Ok(ReadOnceFormula::Const(true))
        }
        Some('x') => {
            *pos += 1;
            let start = *pos;
            while t.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                *pos += 1;
            }
            let n: usize = t[start..*pos].iter().collect::<String>().parse().map_err(|_| bad("a variable number", start))?;
            if n == 0 {
                return Err(bad("a 1-based variable", start));
            }
            Ok(ReadOnceFormula::var(n - 1))
        }
        _ => Err(bad("a variable, constant, '!' or '('", *pos)),
    }
}

/// De Morgan push-down, so negation only sits on variables.
fn negate(f: ReadOnceFormula) -> ReadOnceFormula {
    match f {
        ReadOnceFormula::Var { index, negated } => ReadOnceFormula::Var { index, negated: !negated },
        ReadOnceFormula::Const(b) => ReadOnceFormula::Const(!b),
        ReadOnceFormula::And(cs) => ReadOnceFormula::Or(cs.into_iter().map(negate).collect()),
        ReadOnceFormula::Or(cs) => ReadOnceFormula::And(cs.into_iter().map(negate).collect()),
    }
}

impl fmt::Display for ReadOnceFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, cs: &[ReadOnceFormula], op: &str| {
            write!(f, "(")?;
            for (k, c) in cs.iter().enumerate() {
                if k > 0 {
                    write!(f, "{op}")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        };
        match self {
            ReadOnceFormula::Var { index, negated } => write!(f, "{}x{}", if *negated { "!" } else { "" }, index + 1),
            ReadOnceFormula::Const(b) => write!(f, "{}", u8::from(*b)),
            ReadOnceFormula::And(cs) => join(f, cs, "&"),
            ReadOnceFormula::Or(cs) => join(f, cs, "|"),
        }
    }
}

/// Fixes every variable outside `free` per `assignment` (bit `i` is
/// variable `i`), simplifies, and renames free variable `free[j]` to `j`.
/// The result is again read-once.
pub fn read_once_restrict(formula: &ReadOnceFormula, free: &[usize], assignment: u64) -> ReadOnceFormula {
    let rename = |i: usize| free.iter().position(|&v| v == i);
    fn go(f: &ReadOnceFormula, rename: &dyn Fn(usize) -> Option<usize>, a: u64) -> ReadOnceFormula {
        match f {
            ReadOnceFormula::Var { index, negated } => match rename(*index) {
                Some(j) => ReadOnceFormula::Var { index: j, negated: *negated },
                None => ReadOnceFormula::Const((a >> index & 1 == 1) != *negated),
            },
            ReadOnceFormula::Const(b) => ReadOnceFormula::Const(*b),
            ReadOnceFormula::And(cs) | ReadOnceFormula::Or(cs) => {
                let is_and = matches!(f, ReadOnceFormula::And(_));
                // AND absorbs into 0, OR into 1; the identity drops out.
                let mut kept = Vec::new();
                for c in cs {
                    match go(c, rename, a) {
                        ReadOnceFormula::Const(b) if b != is_and => return ReadOnceFormula::Const(b),
                        ReadOnceFormula::Const(_) => {}
                        g => kept.push(g),
                    }
                }
                match kept.len() {
                    0 => ReadOnceFormula::Const(is_and),
                    1 => kept.pop().expect("one child"),
                    _ if is_and => ReadOnceFormula::And(kept),
                    _ => ReadOnceFormula::Or(kept),
                }
            }
        }
    }
    go(formula, &rename, assignment)
}
