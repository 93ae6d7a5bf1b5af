//! Bit-exact certificates and checkers deciding whether a partial assignment
//! forces a function's domain membership and value.

use crate::bits::Bits;
use crate::boolfn::{min_certificate, BoolFnError, BooleanFunction, Result};

/// Width of the entry-count header of an encoded certificate.
pub const CERT_COUNT_BITS: usize = 16;
/// Largest copy arity an exhaustive checker will enumerate.
pub const EXHAUSTIVE_CHECK_CAP: usize = 20;

/// Ordered `(index, asserted value)` pairs over some input string.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    pub entries: Vec<(usize, bool)>,
}

impl Certificate {
    pub fn new(entries: Vec<(usize, bool)>) -> Self {
        Certificate { entries }
    }

    /// Certificate asserting the values of `x` at `positions`.
    pub fn of_input(x: &Bits, positions: &[usize]) -> Self {
        Certificate { entries: positions.iter().map(|&i| (i, x.get(i))).collect() }
    }

    /// `⌈log2 L⌉` bits per index, at least 1.
    pub fn index_bits(input_len: usize) -> usize {
        (usize::BITS - input_len.saturating_sub(1).leading_zeros()).max(1) as usize
    }

    pub fn encoded_len(entries: usize, input_len: usize) -> usize {
        CERT_COUNT_BITS + entries * (Self::index_bits(input_len) + 1)
    }

    /// Count header, then `(index, value)` per entry, zero-padded to `cell_size`.
    pub fn encode(&self, input_len: usize, cell_size: usize) -> Result<Bits> {
        let need = Self::encoded_len(self.entries.len(), input_len);
        if need > cell_size || self.entries.len() >= 1 << CERT_COUNT_BITS {
            return Err(BoolFnError::ConstructionFailed(format!("certificate needs {need} bits, cell has {cell_size}")));
        }
        let w = Self::index_bits(input_len);
        let mut out = Bits::zeros(cell_size);
        out.write_uint(0, CERT_COUNT_BITS, self.entries.len() as u64);
        for (e, &(i, v)) in self.entries.iter().enumerate() {
            let at = CERT_COUNT_BITS + e * (w + 1);
            out.write_uint(at, w, i as u64);
            out.set(at + w, v);
        }
        Ok(out)
    }

    /// `None` when the header overruns the cell or an index is out of range
    /// or repeated.
    pub fn decode(cell: &Bits, input_len: usize) -> Option<Certificate> {
        if cell.len() < CERT_COUNT_BITS {
            return None;
        }
        let count = cell.read_uint(0, CERT_COUNT_BITS) as usize;
        if Self::encoded_len(count, input_len) > cell.len() {
            return None;
        }
        let w = Self::index_bits(input_len);
        let mut seen = vec![false; input_len];
        let mut entries = Vec::with_capacity(count);
        for e in 0..count {
            let at = CERT_COUNT_BITS + e * (w + 1);
            let i = cell.read_uint(at, w) as usize;
            if i >= input_len || std::mem::replace(&mut seen[i], true) {
                return None;
            }
            entries.push((i, cell.get(at + w)));
        }
        Some(Certificate { entries })
    }

    pub fn matches(&self, x: &Bits) -> bool {
        self.entries.iter().all(|&(i, v)| x.get(i) == v)
    }
}

/// Decides certification for one copy of a (partial) function.
pub trait CertChecker: Send + Sync {
    fn copy_arity(&self) -> usize;

    /// Whether every completion of `fixed` (copy-local indices) lies in the
    /// domain with value `value`.
    fn forces(&self, fixed: &[(usize, bool)], value: bool) -> bool;

    /// A small certifying index set for an in-domain copy input.
    fn certify(&self, x: &Bits) -> Option<Vec<usize>>;
}

/// Whether all completions of `fixed` on a table-backed `f` have value `value`.
fn table_forces(f: &BooleanFunction, fixed: &[(usize, bool)], value: bool) -> bool {
    let n = f.arity();
    let (mut mask, mut pattern) = (0u64, 0u64);
    for &(i, v) in fixed {
        if i >= n {
            return false;
        }
        mask |= 1 << i;
        pattern |= (v as u64) << i;
    }
    let free = !mask & ((1u64 << n) - 1);
    // enumerate the submasks of `free`
    let mut sub = free;
    loop {
        if f.value_at(pattern | sub) != Some(value) {
            return false;
        }
        if sub == 0 {
            return true;
        }
        sub = (sub - 1) & free;
    }
}

/// Brute-force checker over all completions of one copy.
pub struct ExhaustiveChecker {
    f: BooleanFunction,
}

impl ExhaustiveChecker {
    pub fn new(f: &BooleanFunction) -> Result<Self> {
        if f.arity() > EXHAUSTIVE_CHECK_CAP {
            return Err(BoolFnError::TooLarge { what: "exhaustive certificate check", arity: f.arity(), cap: EXHAUSTIVE_CHECK_CAP });
        }
        Ok(ExhaustiveChecker { f: f.materialize()? })
    }
}

impl CertChecker for ExhaustiveChecker {
    fn copy_arity(&self) -> usize {
        self.f.arity()
    }

    fn forces(&self, fixed: &[(usize, bool)], value: bool) -> bool {
        table_forces(&self.f, fixed, value)
    }

    /// Smallest forcing set, by increasing size.
    fn certify(&self, x: &Bits) -> Option<Vec<usize>> {
        let v = self.f.value(x)?;
        let n = self.f.arity();
        for size in 0..=n {
            for s in crate::boolfn::masks_of_size(n, size) {
                let fixed: Vec<(usize, bool)> = (0..n).filter(|i| (s >> i) & 1 == 1).map(|i| (i, x.get(i))).collect();
                if table_forces(&self.f, &fixed, v) {
                    return Some(fixed.into_iter().map(|e| e.0).collect());
                }
            }
        }
        None
    }
}

/// Checker for `g ∘ h` with `h` total: each inner block's entries pin `h` to
/// a value or leave it open, and `g` must be forced over every combination
/// of the open blocks. Exact because the blocks are independent.
pub struct CompositionCertChecker {
    g: BooleanFunction,
    h: BooleanFunction,
    pin_all: bool,
}

impl CompositionCertChecker {
    pub fn new(g: &BooleanFunction, h: &BooleanFunction) -> Result<Self> {
        if !h.is_total() {
            return Err(BoolFnError::NotTotal("inner function of a composition checker"));
        }
        for (what, f) in [("outer", g), ("inner", h)] {
            if f.arity() > EXHAUSTIVE_CHECK_CAP {
                return Err(BoolFnError::TooLarge { what, arity: f.arity(), cap: EXHAUSTIVE_CHECK_CAP });
            }
        }
        Ok(CompositionCertChecker { g: g.materialize()?, h: h.materialize()?, pin_all: false })
    }

    /// Certificates pin every inner block instead of a smallest forcing set
    /// of blocks, so flipping any inner block's value breaks them.
    pub fn pinning_all_blocks(mut self) -> Self {
        self.pin_all = true;
        self
    }

    pub fn outer(&self) -> &BooleanFunction {
        &self.g
    }

    pub fn inner(&self) -> &BooleanFunction {
        &self.h
    }

    /// `Some(b)` when the block-local entries force `h = b`.
    fn block_value(&self, fixed: &[(usize, bool)]) -> Option<bool> {
        [false, true].into_iter().find(|&b| table_forces(&self.h, fixed, b))
    }

    fn outer_forced(&self, pinned: &[Option<bool>], value: bool) -> bool {
        let fixed: Vec<(usize, bool)> = pinned.iter().enumerate().filter_map(|(j, z)| z.map(|b| (j, b))).collect();
        table_forces(&self.g, &fixed, value)
    }
}

impl CertChecker for CompositionCertChecker {
    fn copy_arity(&self) -> usize {
        self.g.arity() * self.h.arity()
    }

    fn forces(&self, fixed: &[(usize, bool)], value: bool) -> bool {
        let hn = self.h.arity();
        let mut per_block: Vec<Vec<(usize, bool)>> = vec![Vec::new(); self.g.arity()];
        for &(i, v) in fixed {
            if i >= self.copy_arity() {
                return false;
            }
            per_block[i / hn].push((i % hn, v));
        }
        let pinned: Vec<Option<bool>> = per_block.iter().map(|b| self.block_value(b)).collect();
        self.outer_forced(&pinned, value)
    }

    /// Smallest set of blocks forcing `g` (all of them when pinning every
    /// block), each pinned by a minimum certificate of `h`.
    fn certify(&self, x: &Bits) -> Option<Vec<usize>> {
        let (gn, hn) = (self.g.arity(), self.h.arity());
        let blocks: Vec<Bits> = (0..gn).map(|j| x.slice(j * hn, hn)).collect();
        let z: Vec<bool> = blocks.iter().map(|b| self.h.value(b).expect("inner function is total")).collect();
        let v = self.g.value(&Bits::from_bools(&z))?;
        let sizes = if self.pin_all { gn..=gn } else { 0..=gn };
        for size in sizes {
            for s in crate::boolfn::masks_of_size(gn, size) {
                let pinned: Vec<Option<bool>> = (0..gn).map(|j| ((s >> j) & 1 == 1).then_some(z[j])).collect();
                if self.outer_forced(&pinned, v) {
                    let mut out = Vec::new();
                    for j in (0..gn).filter(|j| (s >> j) & 1 == 1) {
                        let c = min_certificate(&self.h, &blocks[j]).ok()?;
                        out.extend(c.into_iter().map(|i| j * hn + i));
                    }
                    return Some(out);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::compose;
    use crate::constructions::{basic, dj};
    use proptest::prelude::*;

    #[test]
    fn index_width() {
        assert_eq!(Certificate::index_bits(1), 1);
        assert_eq!(Certificate::index_bits(2), 1);
        assert_eq!(Certificate::index_bits(8), 3);
        assert_eq!(Certificate::index_bits(9), 4);
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(idx in proptest::sample::subsequence((0..40usize).collect::<Vec<_>>(), 0..10), vals in proptest::collection::vec(any::<bool>(), 10)) {
            let c = Certificate::new(idx.iter().zip(&vals).map(|(&i, &v)| (i, v)).collect());
            let cell = c.encode(40, 100).unwrap();
            prop_assert_eq!(Certificate::decode(&cell, 40), Some(c));
        }
    }

    #[test]
    fn decode_rejects_duplicates_and_overruns() {
        let dup = Certificate::new(vec![(1, true), (1, true)]);
        assert_eq!(Certificate::decode(&dup.encode(8, 32).unwrap(), 8), None);
        let mut cell = Bits::zeros(24);
        cell.write_uint(0, CERT_COUNT_BITS, 3);
        assert_eq!(Certificate::decode(&cell, 8), None);
        assert_eq!(Certificate::decode(&Bits::zeros(24), 8), Some(Certificate::default()));
    }

    #[test]
    fn composition_checker_agrees_with_exhaustive() {
        let g = dj::make_dj(2).unwrap();
        let h = basic::and_or(2, 2).unwrap();
        let comp = CompositionCertChecker::new(&g, &h).unwrap();
        let exh = ExhaustiveChecker::new(&compose(&g, &h).unwrap()).unwrap();
        // every partial assignment on 8 bits: 3^8 of them
        for code in 0..3usize.pow(8) {
            let mut c = code;
            let mut fixed = Vec::new();
            for i in 0..8 {
                match c % 3 {
                    0 => fixed.push((i, false)),
                    1 => fixed.push((i, true)),
                    _ => {}
                }
                c /= 3;
            }
            for v in [false, true] {
                assert_eq!(comp.forces(&fixed, v), exh.forces(&fixed, v), "{fixed:?} {v}");
            }
        }
    }

    #[test]
    fn certify_produces_forcing_sets() {
        let g = dj::make_dj(2).unwrap();
        let h = basic::and_or(2, 2).unwrap();
        let f = compose(&g, &h).unwrap();
        let comp = CompositionCertChecker::new(&g, &h).unwrap();
        let exh = ExhaustiveChecker::new(&f).unwrap();
        for (x, v) in f.points().unwrap() {
            let x = Bits::from_u64(x, 8);
            for checker in [&comp as &dyn CertChecker, &exh] {
                let s = checker.certify(&x).unwrap();
                let fixed: Vec<(usize, bool)> = s.iter().map(|&i| (i, x.get(i))).collect();
                assert!(checker.forces(&fixed, v));
                assert!(s.len() <= 4);
            }
        }
    }
}
