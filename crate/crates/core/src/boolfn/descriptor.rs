//! Text descriptor of a function:
//!
//! ```text
//! arity <N>
//! kind table|<generator>
//! outputs <hex>      (tables)
//! domain <hex>       (tables)
//! param <name> <v>   (generators, repeated)
//! ```
//!
//! Hex strings list the packed bytes of the `2^N`-bit table with byte 0
//! (inputs 0..8) first and input `8k + j` in bit `j` of byte `k`.

use super::{BoolFnError, BooleanFunction, GeneratorSpec, Result};
use crate::bits::Bits;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DescriptorKind {
    Table { outputs: Bits, domain: Bits },
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    pub arity: usize,
    pub kind: DescriptorKind,
}

fn bad(msg: impl Into<String>) -> BoolFnError {
    BoolFnError::Descriptor(msg.into())
}

impl Descriptor {
    pub fn parse(text: &str) -> Result<Descriptor> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let arity = match lines.next().map(|l| l.split_whitespace().collect::<Vec<_>>()) {
            Some(w) if w.len() == 2 && w[0] == "arity" => w[1].parse::<usize>().map_err(|_| bad("arity is not a number"))?,
            _ => return Err(bad("line 1 must be `arity <N>`")),
        };
        let kind = match lines.next().map(|l| l.split_whitespace().collect::<Vec<_>>()) {
            Some(w) if w.len() == 2 && w[0] == "kind" => w[1].to_string(),
            _ => return Err(bad("line 2 must be `kind <name>`")),
        };
        if kind == "table" {
            if arity > super::TABLE_CAP {
                return Err(BoolFnError::TooLarge { what: "truth table", arity, cap: super::TABLE_CAP });
            }
            let mut field = |name: &str| -> Result<Bits> {
                let l = lines.next().ok_or_else(|| bad(format!("missing `{name}` line")))?;
                let rest = l.strip_prefix(name).ok_or_else(|| bad(format!("expected `{name} <hex>`")))?;
                Bits::from_hex(rest.trim(), 1 << arity).map_err(|e| bad(format!("{name}: {e}")))
            };
            let outputs = field("outputs")?;
            let domain = field("domain")?;
            if lines.next().is_some() {
                return Err(bad("trailing lines after a table"));
            }
            return Ok(Descriptor { arity, kind: DescriptorKind::Table { outputs, domain } });
        }
        let mut spec = GeneratorSpec::new(kind);
        for l in lines {
            let w: Vec<&str> = l.split_whitespace().collect();
            if w.len() != 3 || w[0] != "param" {
                return Err(bad(format!("expected `param <name> <value>`, got `{l}`")));
            }
            spec.params.push((w[1].to_string(), w[2].to_string()));
        }
        Ok(Descriptor { arity, kind: DescriptorKind::Generator(spec) })
    }

    /// Builds the function, resolving generator names through the
    /// constructions registry and checking the declared arity.
    pub fn build(&self) -> Result<BooleanFunction> {
        let f = match &self.kind {
            DescriptorKind::Table { outputs, domain } => BooleanFunction::from_table(self.arity, outputs.clone(), domain.clone())?,
            DescriptorKind::Generator(spec) => crate::constructions::build_generator(spec)?,
        };
        if f.arity() != self.arity {
            return Err(bad(format!("declared arity {} but `{}` has arity {}", self.arity, f.name(), f.arity())));
        }
        Ok(f)
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "arity {}", self.arity)?;
        match &self.kind {
            DescriptorKind::Table { outputs, domain } => {
                writeln!(f, "kind table")?;
                writeln!(f, "outputs {}", outputs.to_hex())?;
                writeln!(f, "domain {}", domain.to_hex())
            }
            DescriptorKind::Generator(spec) => {
                writeln!(f, "kind {}", spec.name)?;
                for (k, v) in &spec.params {
                    writeln!(f, "param {k} {v}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip() {
        let f = BooleanFunction::from_partial_fn(3, "t", |x| (x != 5).then_some(x % 3 == 0));
        let text = f.descriptor().unwrap().to_string();
        assert!(text.starts_with("arity 3\nkind table\noutputs "));
        let g = Descriptor::parse(&text).unwrap().build().unwrap();
        assert!(f.same_as(&g).unwrap());
    }

    #[test]
    fn and2_table_hex() {
        let f = BooleanFunction::from_fn(2, "and", |x| x == 3);
        assert_eq!(f.descriptor().unwrap().to_string(), "arity 2\nkind table\noutputs 08\ndomain 0f\n");
    }

    #[test]
    fn generator_lines_parse() {
        let d = Descriptor::parse("arity 8\nkind pointer\nparam n 4\nparam k 2\n").unwrap();
        match d.kind {
            DescriptorKind::Generator(spec) => {
                assert_eq!(spec.name, "pointer");
                assert_eq!(spec.get_usize("k").unwrap(), 2);
            }
            _ => panic!("expected generator"),
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(Descriptor::parse("kind table").is_err());
        assert!(Descriptor::parse("arity 2\nkind table\noutputs 08\n").is_err());
        assert!(Descriptor::parse("arity 2\nkind and\nparam n\n").is_err());
    }
}
