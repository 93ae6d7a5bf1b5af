//! Name → builder registry behind generator descriptors.
//!
//! Nested functions (the inner function of a cheat sheet, the components of
//! COR) are passed inline as `name(key=value,key=value)`.

use super::{basic, cheatsheet, cor, dj, forrelation, ksum, pointer, two_adaptive};
use crate::boolfn::{BoolFnError, BooleanFunction, GeneratorSpec, Result};

/// Every registered generator name.
pub const GENERATORS: &[&str] = &[
    "and",
    "or",
    "parity",
    "maj",
    "threshold",
    "const",
    "and-or",
    "ksum",
    "block-ksum",
    "bkk",
    "dj",
    "forrelation",
    "pointer",
    "cor",
    "ana",
    "cheatsheet",
    "canonical-cheatsheet",
    "two-adaptive",
];

pub fn to_inline(spec: &GeneratorSpec) -> String {
    let params: Vec<String> = spec.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{}({})", spec.name, params.join(","))
}

fn bad_inline(s: &str) -> BoolFnError {
    BoolFnError::Descriptor(format!("malformed inline generator `{s}`"))
}

/// Inverse of [`to_inline`]; a bare name means no parameters.
pub fn parse_inline(s: &str) -> Result<GeneratorSpec> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        if s.is_empty() || s.contains([')', ',', '=']) {
            return Err(bad_inline(s));
        }
        return Ok(GeneratorSpec::new(s));
    };
    if !s.ends_with(')') {
        return Err(bad_inline(s));
    }
    let mut spec = GeneratorSpec::new(&s[..open]);
    let body = &s[open + 1..s.len() - 1];
    let mut depth = 0i32;
    let mut start = 0;
    let mut pieces = Vec::new();
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                pieces.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(bad_inline(s));
        }
    }
    if depth != 0 {
        return Err(bad_inline(s));
    }
    if !body.is_empty() {
        pieces.push(&body[start..]);
    }
    for p in pieces {
        let (k, v) = p.split_once('=').ok_or_else(|| bad_inline(s))?;
        spec.params.push((k.to_string(), v.to_string()));
    }
    Ok(spec)
}

fn nested(spec: &GeneratorSpec, key: &str) -> Result<BooleanFunction> {
    let raw = spec.get(key).ok_or_else(|| BoolFnError::BadParam { name: key.into(), reason: "missing".into() })?;
    build_generator(&parse_inline(raw)?)
}

fn get_u64(spec: &GeneratorSpec, name: &str) -> Result<u64> {
    Ok(spec.get_usize(name)? as u64)
}

/// Builds a registered generator from its name and parameters.
pub fn build_generator(spec: &GeneratorSpec) -> Result<BooleanFunction> {
    let n = || spec.get_usize("n");
    match spec.name.as_str() {
        "and" => basic::and(n()?),
        "or" => basic::or(n()?),
        "parity" => basic::parity(n()?),
        "maj" => basic::maj(n()?),
        "threshold" => basic::threshold(n()?, spec.get_usize("t")?),
        "const" => basic::constant(n()?, spec.get_usize("value")? != 0),
        "and-or" => basic::and_or(spec.get_usize("blocks")?, spec.get_usize("block-size")?),
        "ksum" => ksum::make_ksum(spec.get_usize("blocks")?, spec.get_usize("k")?, spec.get_usize("block-bits")?, get_u64(spec, "modulus")?),
        "block-ksum" => {
            ksum::make_block_ksum(spec.get_usize("blocks")?, spec.get_usize("k")?, spec.get_usize("block-bits")?, get_u64(spec, "modulus")?)
        }
        "bkk" => {
            let d = ksum::BkkParams::desk(spec.get_usize_or("n", 2)?);
            ksum::make_bkk(ksum::BkkParams {
                k: spec.get_usize_or("k", d.k)?,
                outer_blocks: spec.get_usize_or("outer-blocks", d.outer_blocks)?,
                outer_block_bits: spec.get_usize_or("outer-block-bits", d.outer_block_bits)?,
                outer_modulus: spec.get_usize_or("outer-modulus", d.outer_modulus as usize)? as u64,
                inner_blocks: spec.get_usize_or("inner-blocks", d.inner_blocks)?,
                inner_block_bits: spec.get_usize_or("inner-block-bits", d.inner_block_bits)?,
                inner_modulus: spec.get_usize_or("inner-modulus", d.inner_modulus as usize)? as u64,
            })
        }
        "dj" => dj::make_dj(n()?),
        "forrelation" => forrelation::make_forrelation(n()?),
        "pointer" => pointer::make_pointer(n()?, spec.get_usize("k")?),
        "cor" => cor::make_cor(&nested(spec, "f")?, &nested(spec, "g")?),
        "ana" => {
            let kind: cor::AnaKind = spec.get("kind").unwrap_or("dj").parse()?;
            let d = cor::AnaParams::toy(kind);
            cor::make_ana(cor::AnaParams {
                kind,
                pointer_blocks: spec.get_usize_or("n", d.pointer_blocks)?,
                k: spec.get_usize_or("k", d.k)?,
                m: spec.get_usize_or("m", d.m)?,
                inner_n: spec.get_usize_or("inner", d.inner_n)?,
            })
        }
        "cheatsheet" => {
            let inner = nested(spec, "inner")?;
            Ok(cheatsheet::CheatSheet::exhaustive(&inner, spec.get_usize("c")?, spec.get_usize("cell-size")?)?.function())
        }
        "canonical-cheatsheet" => {
            let g = nested(spec, "inner")?;
            let d = cheatsheet::CanonicalParams::toy();
            let p = cheatsheet::CanonicalParams {
                copies: spec.get_usize_or("c", d.copies)?,
                blocks: spec.get_usize_or("blocks", d.blocks)?,
                block_size: spec.get_usize_or("block-size", d.block_size)?,
                cell_size: spec.get("cell-size").map(|_| spec.get_usize("cell-size")).transpose()?,
                pin_all_blocks: spec.get_usize_or("pin-all", 0)? != 0,
            };
            cheatsheet::make_canonical_cheatsheet(&g, p)
        }
        "two-adaptive" => {
            let f = nested(spec, "inner")?;
            let d = two_adaptive::TwoAdaptiveParams::toy();
            two_adaptive::make_two_adaptive(
                &f,
                two_adaptive::TwoAdaptiveParams {
                    segments: spec.get_usize_or("segments", d.segments)?,
                    blocks: spec.get_usize_or("blocks", d.blocks)?,
                    block_size: spec.get_usize_or("block-size", d.block_size)?,
                },
            )
        }
        other => Err(BoolFnError::UnknownGenerator(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bits;
    use crate::boolfn::Descriptor;

    #[test]
    fn inline_round_trip_nests() {
        let inner = GeneratorSpec::new("cor").param("f", "and(n=2)").param("g", "or(n=2)");
        let s = to_inline(&inner);
        assert_eq!(s, "cor(f=and(n=2),g=or(n=2))");
        assert_eq!(parse_inline(&s).unwrap(), inner);
        assert_eq!(parse_inline("dj").unwrap(), GeneratorSpec::new("dj"));
        for bad in ["", "a(b", "a(b=1))", "a(b)", "x)"] {
            assert!(parse_inline(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn every_generator_rebuilds_from_its_descriptor() {
        let specs = [
            "and(n=3)",
            "or(n=3)",
            "parity(n=3)",
            "maj(n=3)",
            "threshold(n=4,t=2)",
            "const(n=2,value=1)",
            "and-or(blocks=2,block-size=2)",
            "ksum(blocks=3,k=2,block-bits=2,modulus=4)",
            "block-ksum(blocks=2,k=2,block-bits=2,modulus=4)",
            "bkk(n=2)",
            "dj(n=2)",
            "forrelation(n=1)",
            "pointer(n=4,k=2)",
            "cor(f=and(n=2),g=dj(n=2))",
            "ana(kind=dj)",
            "canonical-cheatsheet(inner=dj(n=2))",
            "two-adaptive(inner=dj(n=2))",
        ];
        for s in specs {
            let f = build_generator(&parse_inline(s).unwrap()).unwrap();
            let text = f.descriptor().unwrap().to_string();
            let g = Descriptor::parse(&text).unwrap().build().unwrap();
            assert_eq!(g.arity(), f.arity(), "{s}");
            let probe = Bits::from_bools(&(0..f.arity()).map(|i| i % 3 == 0).collect::<Vec<_>>());
            assert_eq!(g.value(&probe), f.value(&probe), "{s}");
        }
        assert_eq!(build_generator(&GeneratorSpec::new("pointer").param("n", 4).param("k", 2)).unwrap().arity(), 8);
        assert!(matches!(build_generator(&GeneratorSpec::new("nope")), Err(BoolFnError::UnknownGenerator(_))));
    }
}
