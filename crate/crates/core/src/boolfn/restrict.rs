//! Restrictions and composition.

use super::{BoolFnError, BooleanFunction, GeneratorSpec, Result, TABLE_CAP};
use crate::bits::Bits;

/// `base` with every index outside `free` fixed. Bit `j` of the induced
/// function is `base`'s input `free[j]`.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub base: BooleanFunction,
    pub free: Vec<usize>,
    pub fixed: Vec<(usize, bool)>,
}

impl Restriction {
    pub fn new(base: &BooleanFunction, free: &[usize], fixed: &[(usize, bool)]) -> Result<Self> {
        let n = base.arity();
        let mut seen = vec![false; n];
        for &i in free.iter().chain(fixed.iter().map(|(i, _)| i)) {
            if i >= n {
                return Err(BoolFnError::IndexOutOfRange { index: i, arity: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(BoolFnError::BadRestriction);
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(BoolFnError::BadRestriction);
        }
        Ok(Restriction { base: base.clone(), free: free.to_vec(), fixed: fixed.to_vec() })
    }

    /// Completes a point of the restricted cube to a base input.
    pub fn complete(&self, z: &Bits) -> Bits {
        let mut x = Bits::zeros(self.base.arity());
        for &(i, v) in &self.fixed {
            x.set(i, v);
        }
        for (j, &i) in self.free.iter().enumerate() {
            x.set(i, z.get(j));
        }
        x
    }

    /// [`Restriction::complete`] on index form; base arity ≤ 64.
    pub fn complete_index(&self, z: u64) -> u64 {
        let mut x = self.fixed.iter().filter(|f| f.1).fold(0u64, |a, f| a | (1 << f.0));
        for (j, &i) in self.free.iter().enumerate() {
            x |= ((z >> j) & 1) << i;
        }
        x
    }

    pub fn function(&self) -> BooleanFunction {
        let p = self.free.len();
        if p <= TABLE_CAP && self.base.arity() <= 64 {
            BooleanFunction::from_partial_fn(p, format!("{}|restricted", self.base.name()), |z| {
                self.base.value_at(self.complete_index(z))
            })
        } else {
            let me = self.clone();
            let spec = GeneratorSpec::new(format!("{}|restricted", self.base.name()));
            BooleanFunction::generator(p, spec, false, move |z| me.base.value(&me.complete(z)))
        }
    }
}

/// The function of `S` obtained by fixing `[N] \ S` as `fixed`.
pub fn restrict(f: &BooleanFunction, free: &[usize], fixed: &[(usize, bool)]) -> Result<BooleanFunction> {
    Ok(Restriction::new(f, free, fixed)?.function())
}

/// Every restriction with `p` free indices: `C(N,p)·2^{N-p}` of them, free
/// sets in increasing mask order, assignments in increasing index order.
pub fn restrictions(f: &BooleanFunction, p: usize) -> impl Iterator<Item = Restriction> + '_ {
    let n = f.arity();
    super::measures::masks_of_size(n, p.min(n)).flat_map(move |s| {
        let free: Vec<usize> = (0..n).filter(|i| (s >> i) & 1 == 1).collect();
        let rest: Vec<usize> = (0..n).filter(|i| (s >> i) & 1 == 0).collect();
        (0..1u64 << rest.len()).map(move |a| Restriction {
            base: f.clone(),
            free: free.clone(),
            fixed: rest.iter().enumerate().map(|(t, &i)| (i, (a >> t) & 1 == 1)).collect(),
        })
    })
}

/// `f ∘ g`: input block `i` (bits `i·M .. (i+1)·M`) feeds `g`, whose outputs feed
/// `f`. A point is in the domain iff every block is in `g`'s domain and the
/// outer string is in `f`'s.
pub fn compose(f: &BooleanFunction, g: &BooleanFunction) -> Result<BooleanFunction> {
    let (nf, ng) = (f.arity(), g.arity());
    let arity = nf * ng;
    let name = format!("{}∘{}", f.name(), g.name());
    if arity <= TABLE_CAP {
        let mask = if ng == 64 { u64::MAX } else { (1u64 << ng) - 1 };
        return Ok(BooleanFunction::from_partial_fn(arity, name, |x| {
            let mut outer = 0u64;
            for i in 0..nf {
                if g.value_at((x >> (i * ng)) & mask)? {
                    outer |= 1 << i;
                }
            }
            f.value_at(outer)
        }));
    }
    let (f, g) = (f.clone(), g.clone());
    let total = f.is_total() && g.is_total();
    let spec = GeneratorSpec::new(name);
    Ok(BooleanFunction::generator(arity, spec, total, move |x| {
        let mut outer = Bits::zeros(nf);
        for i in 0..nf {
            outer.set(i, g.value(&x.slice(i * ng, ng))?);
        }
        f.value(&outer)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and(n: usize) -> BooleanFunction {
        BooleanFunction::from_fn(n, "and", move |x| x == (1 << n) - 1)
    }
    fn or(n: usize) -> BooleanFunction {
        BooleanFunction::from_fn(n, "or", |x| x != 0)
    }
    fn parity(n: usize) -> BooleanFunction {
        BooleanFunction::from_fn(n, "parity", |x| x.count_ones() % 2 == 1)
    }

    #[test]
    fn restriction_examples() {
        let id = restrict(&and(3), &[0], &[(1, true), (2, true)]).unwrap();
        assert_eq!((id.value_at(0), id.value_at(1)), (Some(false), Some(true)));
        let zero = restrict(&and(3), &[0], &[(1, true), (2, false)]).unwrap();
        assert!(zero.is_constant().unwrap());
        let andor = compose(&and(2), &or(2)).unwrap();
        let g = restrict(&andor, &[0, 1], &[(2, false), (3, true)]).unwrap();
        assert!(g.same_as(&or(2)).unwrap());
    }

    #[test]
    fn restriction_errors() {
        assert_eq!(restrict(&and(3), &[0, 3], &[(1, true)]).unwrap_err(), BoolFnError::IndexOutOfRange { index: 3, arity: 3 });
        assert_eq!(restrict(&and(3), &[0, 1], &[(1, true), (2, true)]).unwrap_err(), BoolFnError::BadRestriction);
    }

    #[test]
    fn restriction_count_is_binomial_times_assignments() {
        let f = parity(5);
        assert_eq!(restrictions(&f, 2).count(), 10 * 8);
        assert_eq!(restrictions(&f, 0).count(), 32);
    }

    #[test]
    fn composition_examples() {
        let andor = compose(&and(2), &or(2)).unwrap();
        assert_eq!(andor.inputs_with_value(true).unwrap().len(), 9);
        assert!(compose(&parity(2), &parity(2)).unwrap().same_as(&parity(4)).unwrap());
    }

    #[test]
    fn large_composition_uses_generator() {
        let f = compose(&parity(5), &and(5)).unwrap();
        assert!(!f.is_table());
        assert_eq!(f.evaluate(&Bits::ones(25)), Ok(true));
    }
}
