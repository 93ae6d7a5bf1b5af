//! Correlated-output problems: two inputs promised to share an output.

use super::{basic, dj, finish, forrelation, pointer, registry};
use crate::boolfn::{compose, BoolFnError, BooleanFunction, GeneratorSpec, Result};
use std::fmt;
use std::str::FromStr;

/// `COR(f, g)` on `x ⁀ y`: defined iff both are in their domains and
/// `f(x) = g(y)`, with value the common output.
pub fn make_cor(f: &BooleanFunction, g: &BooleanFunction) -> Result<BooleanFunction> {
    let (nf, ng) = (f.arity(), g.arity());
    let spec = match (f.generator_spec(), g.generator_spec()) {
        (Some(sf), Some(sg)) => GeneratorSpec::new("cor").param("f", registry::to_inline(sf)).param("g", registry::to_inline(sg)),
        _ => GeneratorSpec::new(format!("cor({},{})", f.name(), g.name())),
    };
    let rebuildable = spec.name == "cor";
    let (fc, gc) = (f.fast(), g.fast());
    let out = BooleanFunction::generator(nf + ng, spec, false, move |z| {
        let a = fc.value(&z.slice(0, nf))?;
        let b = gc.value(&z.slice(nf, ng))?;
        (a == b).then_some(a)
    });
    let out = finish(out);
    Ok(if rebuildable { out } else { out.without_spec() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnaKind {
    Dj,
    Forrelation,
}

impl fmt::Display for AnaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnaKind::Dj => "dj",
            AnaKind::Forrelation => "forrelation",
        })
    }
}

impl FromStr for AnaKind {
    type Err = BoolFnError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dj" => Ok(AnaKind::Dj),
            "forrelation" => Ok(AnaKind::Forrelation),
            _ => Err(BoolFnError::BadParam { name: "kind".into(), reason: format!("`{s}` is not dj or forrelation") }),
        }
    }
}

/// `COR(pointer_{N,k}, PARITY_m ∘ inner)`, with `inner = DJ_{inner_n}` or
/// `Forrelation(inner_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnaParams {
    pub kind: AnaKind,
    pub pointer_blocks: usize,
    pub k: usize,
    pub m: usize,
    pub inner_n: usize,
}

impl AnaParams {
    /// 4-block pointer with 2 hops against the parity of two inner cells
    /// (`DJ_2`, or Forrelation at `n = 1`).
    pub fn toy(kind: AnaKind) -> Self {
        let inner_n = match kind {
            AnaKind::Dj => 2,
            AnaKind::Forrelation => 1,
        };
        AnaParams { kind, pointer_blocks: 4, k: 2, m: 2, inner_n }
    }

    pub fn inner(&self) -> Result<BooleanFunction> {
        match self.kind {
            AnaKind::Dj => dj::make_dj(self.inner_n),
            AnaKind::Forrelation => forrelation::make_forrelation(self.inner_n),
        }
    }

    pub fn pointer_arity(&self) -> usize {
        self.pointer_blocks * pointer::pointer_label_bits(self.pointer_blocks)
    }
}

pub fn make_ana(p: AnaParams) -> Result<BooleanFunction> {
    let ptr = pointer::make_pointer(p.pointer_blocks, p.k)?;
    let g = compose(&basic::parity(p.m)?, &p.inner()?)?;
    let cor = make_cor(&ptr.without_spec(), &g.without_spec())?;
    let spec = GeneratorSpec::new("ana")
        .param("kind", p.kind)
        .param("n", p.pointer_blocks)
        .param("k", p.k)
        .param("m", p.m)
        .param("inner", p.inner_n);
    Ok(cor.with_name("ana").with_spec(spec))
}
