//! Cheat-sheet totalization of a partial function.
//!
//! Layout: `c` address copies of the inner function (`F` bits each), then
//! `2^c` cells of `M` bits. Cell `ℓ` (with `ℓ_i` = bit `i` of the index) must
//! hold a certificate, over the whole address region, that forces every copy
//! `i` into the domain with value `ℓ_i`.

use super::certificate::{CertChecker, Certificate, CompositionCertChecker, ExhaustiveChecker, CERT_COUNT_BITS};
use super::{basic, finish, registry};
use crate::bits::Bits;
use crate::boolfn::{certificate_complexity, compose, BoolFnError, BooleanFunction, GeneratorSpec, Result, Side};
use std::sync::Arc;

/// Largest address region [`CheatSheet::input_suite`] enumerates.
pub const INPUT_SUITE_ADDRESS_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheatSheetLayout {
    pub inner_arity: usize,
    pub copies: usize,
    pub cell_size: usize,
}

impl CheatSheetLayout {
    pub fn address_len(&self) -> usize {
        self.copies * self.inner_arity
    }

    pub fn cell_count(&self) -> usize {
        1 << self.copies
    }

    pub fn arity(&self) -> usize {
        self.address_len() + self.cell_size * self.cell_count()
    }

    pub fn copy_start(&self, i: usize) -> usize {
        i * self.inner_arity
    }

    pub fn cell_start(&self, ell: usize) -> usize {
        self.address_len() + ell * self.cell_size
    }

    pub fn index_bits(&self) -> usize {
        Certificate::index_bits(self.address_len())
    }

    /// Most certificate entries a cell can hold.
    pub fn max_entries(&self) -> usize {
        self.cell_size.saturating_sub(CERT_COUNT_BITS) / (self.index_bits() + 1)
    }
}

/// Everything the output depends on, for algorithms and witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheatSheetEval {
    pub copy_values: Vec<Option<bool>>,
    /// Cell index when every copy is in the domain.
    pub ell: Option<usize>,
    pub output: bool,
}

#[derive(Clone)]
pub struct CheatSheet {
    pub layout: CheatSheetLayout,
    inner: BooleanFunction,
    checker: Arc<dyn CertChecker>,
    parts: Option<(BooleanFunction, BooleanFunction)>,
    spec: GeneratorSpec,
}

impl CheatSheet {
    pub fn new(inner: &BooleanFunction, copies: usize, cell_size: usize, checker: Arc<dyn CertChecker>) -> Result<Self> {
        if copies == 0 || copies > 16 {
            return Err(BoolFnError::BadParam { name: "c".into(), reason: "must lie in 1..=16".into() });
        }
        if checker.copy_arity() != inner.arity() {
            return Err(BoolFnError::ArityMismatch { expected: inner.arity(), got: checker.copy_arity() });
        }
        if cell_size < CERT_COUNT_BITS {
            return Err(BoolFnError::BadParam { name: "cell-size".into(), reason: format!("must be at least {CERT_COUNT_BITS}") });
        }
        let layout = CheatSheetLayout { inner_arity: inner.arity(), copies, cell_size };
        let spec = match inner.generator_spec() {
            Some(s) => GeneratorSpec::new("cheatsheet").param("inner", registry::to_inline(s)),
            None => GeneratorSpec::new(format!("cheatsheet({})", inner.name())),
        }
        .param("c", copies)
        .param("cell-size", cell_size);
        Ok(CheatSheet { layout, inner: inner.fast(), checker, parts: None, spec })
    }

    /// Generic cheat sheet whose cells are checked by brute force.
    pub fn exhaustive(inner: &BooleanFunction, copies: usize, cell_size: usize) -> Result<Self> {
        Self::new(inner, copies, cell_size, Arc::new(ExhaustiveChecker::new(inner)?))
    }

    /// Canonical cheat sheet over `g ∘ AND_blocks ∘ OR_block_size`.
    ///
    /// With no explicit cell size, cells fit one minimum certificate per copy:
    /// `arity(g)` inner blocks, each pinned by at most `C(AND∘OR)` entries.
    pub fn canonical(g: &BooleanFunction, p: CanonicalParams) -> Result<Self> {
        let h = basic::and_or(p.blocks, p.block_size)?;
        let inner = compose(g, &h)?;
        let cert_h = if h.arity() <= crate::boolfn::CERTIFICATE_CAP {
            certificate_complexity(&h, Side::Max)?
        } else {
            p.blocks.max(p.block_size)
        };
        let entries = p.copies * g.arity() * cert_h;
        let cell_size = p.cell_size.unwrap_or_else(|| Certificate::encoded_len(entries, p.copies * inner.arity()));
        let checker = CompositionCertChecker::new(g, &h)?;
        let checker = Arc::new(if p.pin_all_blocks { checker.pinning_all_blocks() } else { checker });
        let mut cs = Self::new(&inner, p.copies, cell_size, checker)?;
        cs.parts = Some((g.fast(), h));
        let mut spec = match g.generator_spec() {
            Some(s) => GeneratorSpec::new("canonical-cheatsheet").param("inner", registry::to_inline(s)),
            None => GeneratorSpec::new(format!("canonical-cheatsheet({})", g.name())),
        }
        .param("c", p.copies)
        .param("blocks", p.blocks)
        .param("block-size", p.block_size);
        if let Some(m) = p.cell_size {
            spec = spec.param("cell-size", m);
        }
        if p.pin_all_blocks {
            spec = spec.param("pin-all", 1);
        }
        cs.spec = spec;
        Ok(cs)
    }

    pub fn inner(&self) -> &BooleanFunction {
        &self.inner
    }

    pub fn checker(&self) -> &dyn CertChecker {
        &*self.checker
    }

    /// `(g, h)` for canonical sheets, where the inner function is `g ∘ h`.
    pub fn parts(&self) -> Option<(&BooleanFunction, &BooleanFunction)> {
        self.parts.as_ref().map(|(g, h)| (g, h))
    }

    pub fn copy_input(&self, x: &Bits, i: usize) -> Bits {
        x.slice(self.layout.copy_start(i), self.layout.inner_arity)
    }

    pub fn cell(&self, x: &Bits, ell: usize) -> Bits {
        x.slice(self.layout.cell_start(ell), self.layout.cell_size)
    }

    /// Whether `cell` certifies that copy `i` has value bit `i` of `ell`.
    /// `address` reads address bits; only certificate positions are read.
    /// The empty certificate never verifies.
    pub fn cell_verifies(&self, cell: &Bits, ell: usize, mut address: impl FnMut(usize) -> bool) -> bool {
        let Some(cert) = Certificate::decode(cell, self.layout.address_len()) else { return false };
        self.certificate_verifies(&cert, ell) && cert.entries.iter().all(|&(i, v)| address(i) == v)
    }

    /// The structural half of verification: the asserted values force every
    /// copy to the claimed output. Needs no address reads.
    pub fn certificate_verifies(&self, cert: &Certificate, ell: usize) -> bool {
        if cert.entries.is_empty() {
            return false;
        }
        let f = self.layout.inner_arity;
        let mut per_copy: Vec<Vec<(usize, bool)>> = vec![Vec::new(); self.layout.copies];
        for &(i, v) in &cert.entries {
            per_copy[i / f].push((i % f, v));
        }
        per_copy.iter().enumerate().all(|(c, fixed)| self.checker.forces(fixed, (ell >> c) & 1 == 1))
    }

    pub fn evaluate_detail(&self, x: &Bits) -> CheatSheetEval {
        let copy_values: Vec<Option<bool>> = (0..self.layout.copies).map(|i| self.inner.value(&self.copy_input(x, i))).collect();
        let ell = copy_values
            .iter()
            .enumerate()
            .try_fold(0usize, |acc, (i, v)| v.map(|b| acc | ((b as usize) << i)));
        let output = ell.is_some_and(|l| self.cell_verifies(&self.cell(x, l), l, |i| x.get(i)));
        CheatSheetEval { copy_values, ell, output }
    }

    /// Certificate for the given in-domain copies, assembled from the
    /// checker's per-copy certifying sets.
    pub fn certificate_for(&self, copies: &[Bits]) -> Result<(usize, Certificate)> {
        let mut entries = Vec::new();
        let mut ell = 0usize;
        for (c, x) in copies.iter().enumerate() {
            let v = self.inner.value(x).ok_or(BoolFnError::OutOfDomain)?;
            ell |= (v as usize) << c;
            let set = self.checker.certify(x).ok_or_else(|| BoolFnError::ConstructionFailed("no certifying set".into()))?;
            entries.extend(set.into_iter().map(|i| (self.layout.copy_start(c) + i, x.get(i))));
        }
        Ok((ell, Certificate::new(entries)))
    }

    /// A 1-input: the given address copies, a valid certificate in cell `ℓ`
    /// and every other cell zero.
    pub fn yes_input(&self, copies: &[Bits]) -> Result<Bits> {
        if copies.len() != self.layout.copies {
            return Err(BoolFnError::ArityMismatch { expected: self.layout.copies, got: copies.len() });
        }
        let (ell, cert) = self.certificate_for(copies)?;
        let mut x = Bits::zeros(self.layout.arity());
        for (c, xc) in copies.iter().enumerate() {
            x.write_slice(self.layout.copy_start(c), xc);
        }
        x.write_slice(self.layout.cell_start(ell), &cert.encode(self.layout.address_len(), self.layout.cell_size)?);
        Ok(x)
    }

    pub fn function(&self) -> BooleanFunction {
        let me = self.clone();
        let f = BooleanFunction::generator(self.layout.arity(), self.spec.clone(), true, move |x| Some(me.evaluate_detail(x).output));
        let rebuildable = !self.spec.name.contains('(');
        let f = finish(f);
        if rebuildable {
            f
        } else {
            f.without_spec()
        }
    }

    /// Test inputs for every address setting: all cells zero, then (for
    /// in-domain addresses) the valid 1-input, one input per certificate
    /// entry with that entry's asserted value flipped, the valid cell moved
    /// to the next cell index, and finally random cell contents.
    pub fn input_suite(&self, seed: u64) -> Result<Vec<Bits>> {
        use rand::{Rng, SeedableRng};
        let l = self.layout;
        if l.address_len() > INPUT_SUITE_ADDRESS_CAP {
            return Err(BoolFnError::TooLarge { what: "input suite address", arity: l.address_len(), cap: INPUT_SUITE_ADDRESS_CAP });
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for addr in 0..1u64 << l.address_len() {
            let mut base = Bits::zeros(l.arity());
            base.write_uint(0, l.address_len(), addr);
            out.push(base.clone());
            let copies: Vec<Bits> = (0..l.copies).map(|c| self.copy_input(&base, c)).collect();
            if let Ok(yes) = self.yes_input(&copies) {
                let ell = self.evaluate_detail(&yes).ell.expect("in-domain copies");
                let cell = self.cell(&yes, ell);
                out.push(yes.clone());
                let entries = Certificate::decode(&cell, l.address_len()).expect("freshly encoded").entries.len();
                for e in 0..entries {
                    let mut bad = yes.clone();
                    bad.flip(l.cell_start(ell) + CERT_COUNT_BITS + e * (l.index_bits() + 1) + l.index_bits());
                    out.push(bad);
                }
                let mut moved = base.clone();
                moved.write_slice(l.cell_start((ell + 1) % l.cell_count()), &cell);
                out.push(moved);
            }
            for b in l.address_len()..l.arity() {
                base.set(b, rng.gen_bool(0.5));
            }
            out.push(base);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalParams {
    pub copies: usize,
    pub blocks: usize,
    pub block_size: usize,
    pub cell_size: Option<usize>,
    /// Store certificates pinning every block of `g`, not a smallest
    /// forcing subset.
    pub pin_all_blocks: bool,
}

impl CanonicalParams {
    /// One copy over 2×2 AND∘OR blocks: with `DJ_2` outside this is 72 bits.
    pub fn toy() -> Self {
        CanonicalParams { copies: 1, blocks: 2, block_size: 2, cell_size: None, pin_all_blocks: false }
    }
}

pub fn make_cheatsheet(inner: &BooleanFunction, copies: usize, cell_size: usize, checker: Arc<dyn CertChecker>) -> Result<BooleanFunction> {
    Ok(CheatSheet::new(inner, copies, cell_size, checker)?.function())
}

pub fn make_canonical_cheatsheet(g: &BooleanFunction, p: CanonicalParams) -> Result<BooleanFunction> {
    Ok(CheatSheet::canonical(g, p)?.function())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::dj;

    fn toy() -> CheatSheet {
        CheatSheet::canonical(&dj::make_dj(2).unwrap(), CanonicalParams::toy()).unwrap()
    }

    #[test]
    fn toy_layout_sizes() {
        let cs = toy();
        assert_eq!(cs.layout.address_len(), 8);
        assert_eq!(cs.layout.cell_size, 32);
        assert_eq!(cs.layout.arity(), 72);
        assert_eq!(cs.layout.max_entries(), 4);
    }

    #[test]
    fn yes_witness_and_corruptions() {
        let cs = toy();
        let f = cs.function();
        // blocks "10 01" and "00 11": AND∘OR values 1, 0, so DJ sees 10 → 1
        let addr: Bits = "1001 0011".parse().unwrap();
        let x = cs.yes_input(std::slice::from_ref(&addr)).unwrap();
        assert!(f.evaluate(&x).unwrap());
        assert_eq!(cs.evaluate_detail(&x).ell, Some(1));

        // flipping a certified address bit breaks the match
        let (_, cert) = cs.certificate_for(&[addr]).unwrap();
        for &(i, _) in &cert.entries {
            let mut y = x.clone();
            y.flip(i);
            assert!(!f.evaluate(&y).unwrap(), "flip {i}");
        }
        // flipping any bit of the indexed cell's used prefix breaks decoding or forcing
        let used = Certificate::encoded_len(cert.entries.len(), 8);
        for t in 0..used {
            let mut y = x.clone();
            y.flip(cs.layout.cell_start(1) + t);
            assert!(!f.evaluate(&y).unwrap(), "cell bit {t}");
        }
        // the other cell is never read
        for t in 0..32 {
            let mut y = x.clone();
            y.flip(cs.layout.cell_start(0) + t);
            assert!(f.evaluate(&y).unwrap());
        }
    }

    #[test]
    fn zero_cells_and_out_of_domain_copies_give_zero() {
        let cs = toy();
        let f = cs.function();
        assert!(!f.evaluate(&Bits::zeros(72)).unwrap());
        // address "1111 1111" has DJ input 11: outside the promise
        let mut x = Bits::zeros(72);
        for i in 0..8 {
            x.set(i, true);
        }
        assert_eq!(cs.evaluate_detail(&x).ell, None);
        assert!(!f.evaluate(&x).unwrap());
    }

    #[test]
    fn exhaustive_checker_sheet_agrees_on_yes_inputs() {
        let g = dj::make_dj(2).unwrap();
        let inner = compose(&g, &basic::and_or(2, 2).unwrap()).unwrap();
        let cs = CheatSheet::exhaustive(&inner, 1, 32).unwrap();
        for (a, _) in inner.points().unwrap() {
            let x = cs.yes_input(&[Bits::from_u64(a, 8)]).unwrap();
            assert!(cs.evaluate_detail(&x).output);
        }
    }
}
