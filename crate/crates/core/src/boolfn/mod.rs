//! Boolean functions on `{0,1}^N`, possibly partial, and their exact
//! combinatorial measures.
//!
//! A function is backed either by a packed truth table (arity ≤ [`TABLE_CAP`])
//! or by a named generator whose evaluator runs on demand. Out-of-domain
//! points evaluate to `None`.

mod descriptor;
mod measures;
mod restrict;
mod spectral;

pub use descriptor::{Descriptor, DescriptorKind};
pub use measures::{
    block_sensitivity, certificate_complexity, certificate_sizes, max_disjoint_sensitive_blocks, min_certificate,
    Side, BS_CAP, CERTIFICATE_CAP,
};
pub(crate) use measures::masks_of_size;
pub use restrict::{compose, restrict, restrictions, Restriction};
pub use spectral::{sensitivity_graph, spectral_sensitivity, SPECTRAL_CAP};

use crate::bits::Bits;
use crate::linalg::LinalgError;
use std::fmt;
use std::sync::Arc;

/// Largest arity that is materialized as a truth table.
pub const TABLE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoolFnError {
    #[error("input is outside the function's domain")]
    OutOfDomain,
    #[error("expected {expected} input bits, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("{what} needs arity ≤ {cap}, got {arity}")]
    TooLarge { what: &'static str, arity: usize, cap: usize },
    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("restriction free set and assignment overlap or leave gaps")]
    BadRestriction,
    #[error("{0} requires a total function")]
    NotTotal(&'static str),
    #[error("descriptor: {0}")]
    Descriptor(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator parameter `{name}`: {reason}")]
    BadParam { name: String, reason: String },
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, BoolFnError>;

/// Block-alphabet view of a bit function: `block_count` blocks of `block_bits`
/// consecutive bits, each read as a little-endian integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockMeta {
    pub block_bits: usize,
    pub block_count: usize,
}

/// Name and parameters of a generator-backed function, in descriptor order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GeneratorSpec {
    pub name: String,
    pub params: Vec<(String, String)>,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>) -> Self {
        GeneratorSpec { name: name.into(), params: Vec::new() }
    }

    pub fn param(mut self, name: &str, value: impl fmt::Display) -> Self {
        self.params.push((name.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    pub fn get_usize(&self, name: &str) -> Result<usize> {
        let raw = self.get(name).ok_or_else(|| BoolFnError::BadParam { name: name.into(), reason: "missing".into() })?;
        raw.parse().map_err(|_| BoolFnError::BadParam { name: name.into(), reason: format!("`{raw}` is not a natural number") })
    }

    pub fn get_usize_or(&self, name: &str, default: usize) -> Result<usize> {
        if self.get(name).is_some() {
            self.get_usize(name)
        } else {
            Ok(default)
        }
    }
}

type Evaluator = dyn Fn(&Bits) -> Option<bool> + Send + Sync;

#[derive(Clone)]
enum Backing {
    Table { outputs: Bits, domain: Bits },
    Generator { eval: Arc<Evaluator>, total: bool },
}

/// An immutable (partial) boolean function. Cloning is cheap.
#[derive(Clone)]
pub struct BooleanFunction {
    inner: Arc<Inner>,
}

struct Inner {
    arity: usize,
    name: String,
    backing: Backing,
    block_meta: Option<BlockMeta>,
    spec: Option<GeneratorSpec>,
}

impl BooleanFunction {
    /// Table-backed function. `outputs` and `domain` have `2^arity` bits and
    /// outputs outside the domain are forced to 0.
    pub fn from_table(arity: usize, mut outputs: Bits, domain: Bits) -> Result<Self> {
        if arity > TABLE_CAP {
            return Err(BoolFnError::TooLarge { what: "truth table", arity, cap: TABLE_CAP });
        }
        let size = 1usize << arity;
        if outputs.len() != size || domain.len() != size {
            return Err(BoolFnError::Descriptor(format!("truth table needs {size} bits")));
        }
        for i in 0..size {
            if !domain.get(i) {
                outputs.set(i, false);
            }
        }
        Ok(Self::wrap(arity, format!("table{arity}"), Backing::Table { outputs, domain }, None, None))
    }

    /// Materializes a total function from its value on each input index.
    pub fn from_fn(arity: usize, name: impl Into<String>, f: impl Fn(u64) -> bool) -> Self {
        Self::from_partial_fn(arity, name, |x| Some(f(x)))
    }

    /// Materializes a partial function; `None` marks points outside the domain.
    pub fn from_partial_fn(arity: usize, name: impl Into<String>, f: impl Fn(u64) -> Option<bool>) -> Self {
        assert!(arity <= TABLE_CAP, "arity {arity} exceeds the table cap");
        let size = 1usize << arity;
        let mut outputs = Bits::zeros(size);
        let mut domain = Bits::zeros(size);
        for x in 0..size {
            if let Some(v) = f(x as u64) {
                domain.set(x, true);
                outputs.set(x, v);
            }
        }
        Self::wrap(arity, name.into(), Backing::Table { outputs, domain }, None, None)
    }

    /// Generator-backed function evaluated on demand.
    pub fn generator(
        arity: usize,
        spec: GeneratorSpec,
        total: bool,
        eval: impl Fn(&Bits) -> Option<bool> + Send + Sync + 'static,
    ) -> Self {
        let name = spec.name.clone();
        Self::wrap(arity, name, Backing::Generator { eval: Arc::new(eval), total }, None, Some(spec))
    }

    fn wrap(arity: usize, name: String, backing: Backing, block_meta: Option<BlockMeta>, spec: Option<GeneratorSpec>) -> Self {
        BooleanFunction { inner: Arc::new(Inner { arity, name, backing, block_meta, spec }) }
    }

    fn rewrap(&self, name: String, block_meta: Option<BlockMeta>, spec: Option<GeneratorSpec>) -> Self {
        Self::wrap(self.arity(), name, self.inner.backing.clone(), block_meta, spec)
    }

    pub fn with_name(&self, name: impl Into<String>) -> Self {
        self.rewrap(name.into(), self.inner.block_meta, self.inner.spec.clone())
    }

    pub fn with_block_meta(&self, meta: BlockMeta) -> Self {
        assert_eq!(meta.block_bits * meta.block_count, self.arity(), "block layout must tile the input");
        self.rewrap(self.inner.name.clone(), Some(meta), self.inner.spec.clone())
    }

    /// Attaches the generator record that rebuilds this function.
    pub fn with_spec(&self, spec: GeneratorSpec) -> Self {
        self.rewrap(self.inner.name.clone(), self.inner.block_meta, Some(spec))
    }

    /// Drops the generator record so the descriptor is emitted as a table.
    pub fn without_spec(&self) -> Self {
        self.rewrap(self.inner.name.clone(), self.inner.block_meta, None)
    }

    pub fn arity(&self) -> usize {
        self.inner.arity
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn block_meta(&self) -> Option<BlockMeta> {
        self.inner.block_meta
    }

    /// The generator record, when the function came from a named builder.
    pub fn generator_spec(&self) -> Option<&GeneratorSpec> {
        self.inner.spec.as_ref()
    }

    pub fn is_table(&self) -> bool {
        matches!(self.inner.backing, Backing::Table { .. })
    }

    /// `(outputs, domain)` bitsets for table-backed functions.
    pub fn table(&self) -> Option<(&Bits, &Bits)> {
        match &self.inner.backing {
            Backing::Table { outputs, domain } => Some((outputs, domain)),
            Backing::Generator { .. } => None,
        }
    }

    /// `f(x)`, or `None` outside the domain. The length of `x` is not checked.
    pub fn value(&self, x: &Bits) -> Option<bool> {
        match &self.inner.backing {
            Backing::Table { outputs, domain } => {
                let i = x.to_u64() as usize;
                domain.get(i).then(|| outputs.get(i))
            }
            Backing::Generator { eval, .. } => eval(x),
        }
    }

    /// `f` at the input whose bit `i` is bit `i` of `x`; arity ≤ 64.
    pub fn value_at(&self, x: u64) -> Option<bool> {
        match &self.inner.backing {
            Backing::Table { outputs, domain } => {
                let i = x as usize;
                domain.get(i).then(|| outputs.get(i))
            }
            Backing::Generator { eval, .. } => eval(&Bits::from_u64(x, self.arity())),
        }
    }

    pub fn evaluate(&self, x: &Bits) -> Result<bool> {
        if x.len() != self.arity() {
            return Err(BoolFnError::ArityMismatch { expected: self.arity(), got: x.len() });
        }
        self.value(x).ok_or(BoolFnError::OutOfDomain)
    }

    pub fn in_domain(&self, x: &Bits) -> bool {
        self.value(x).is_some()
    }

    pub fn is_total(&self) -> bool {
        match &self.inner.backing {
            Backing::Table { domain, .. } => domain.count_ones() == domain.len(),
            Backing::Generator { total, .. } => *total,
        }
    }

    /// Number of domain points; sweeps generators up to the table cap.
    pub fn domain_size(&self) -> Result<u64> {
        match &self.inner.backing {
            Backing::Table { domain, .. } => Ok(domain.count_ones() as u64),
            Backing::Generator { total: true, .. } if self.arity() < 64 => Ok(1u64 << self.arity()),
            Backing::Generator { .. } => Ok(self.materialize()?.domain_size()?),
        }
    }

    /// Table-backed copy of this function (identity for tables).
    pub fn materialize(&self) -> Result<BooleanFunction> {
        if self.is_table() {
            return Ok(self.clone());
        }
        if self.arity() > TABLE_CAP {
            return Err(BoolFnError::TooLarge { what: "truth table", arity: self.arity(), cap: TABLE_CAP });
        }
        let out = Self::from_partial_fn(self.arity(), self.name().to_string(), |x| self.value_at(x));
        Ok(out.rewrap(self.inner.name.clone(), self.inner.block_meta, self.inner.spec.clone()))
    }

    /// Domain points with their values, in increasing index order; arity ≤ table cap.
    pub fn points(&self) -> Result<Vec<(u64, bool)>> {
        if self.arity() > TABLE_CAP {
            return Err(BoolFnError::TooLarge { what: "domain sweep", arity: self.arity(), cap: TABLE_CAP });
        }
        Ok((0..1u64 << self.arity()).filter_map(|x| self.value_at(x).map(|v| (x, v))).collect())
    }

    pub fn inputs_with_value(&self, b: bool) -> Result<Vec<u64>> {
        Ok(self.points()?.into_iter().filter(|p| p.1 == b).map(|p| p.0).collect())
    }

    pub fn is_constant(&self) -> Result<bool> {
        let pts = self.points()?;
        Ok(pts.iter().all(|p| p.1) || pts.iter().all(|p| !p.1))
    }

    /// Generator form when a builder record is attached, table form otherwise.
    pub fn descriptor(&self) -> Result<Descriptor> {
        if let Some(spec) = &self.inner.spec {
            return Ok(Descriptor { arity: self.arity(), kind: DescriptorKind::Generator(spec.clone()) });
        }
        self.table_descriptor()
    }

    /// Truth-table descriptor, materializing within the table cap.
    pub fn table_descriptor(&self) -> Result<Descriptor> {
        let t = self.materialize()?;
        let (outputs, domain) = t.table().unwrap();
        Ok(Descriptor { arity: self.arity(), kind: DescriptorKind::Table { outputs: outputs.clone(), domain: domain.clone() } })
    }

    /// Table-backed copy when the arity allows it, otherwise `self`.
    pub fn fast(&self) -> BooleanFunction {
        if self.arity() <= TABLE_CAP {
            self.materialize().expect("within the table cap")
        } else {
            self.clone()
        }
    }

    /// Whether two functions agree (domain and values) on every input; arity ≤ table cap.
    pub fn same_as(&self, other: &BooleanFunction) -> Result<bool> {
        if self.arity() != other.arity() {
            return Ok(false);
        }
        if self.arity() > TABLE_CAP {
            return Err(BoolFnError::TooLarge { what: "pointwise comparison", arity: self.arity(), cap: TABLE_CAP });
        }
        Ok((0..1u64 << self.arity()).all(|x| self.value_at(x) == other.value_at(x)))
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BooleanFunction")
            .field("name", &self.name())
            .field("arity", &self.arity())
            .field("table", &self.is_table())
            .field("block_meta", &self.block_meta())
            .finish()
    }
}
