use std::sync::Arc;

use super::poly;
use super::{prime_factors, Field, FieldError, PrimeField};

/// Largest supported base field order.
pub const BASE_LIMIT: u64 = 1 << 16;

/// The field `F_q = F_p[x]/(g)` with `q = p^e`.
///
/// Elements are canonical encodings in `[0, q)`; multiplication goes through
/// discrete log tables built from the residue of `x`, which is primitive by
/// construction.
#[derive(Debug, Clone)]
pub struct BaseField {
    inner: Arc<BaseInner>,
}

#[derive(Debug)]
struct BaseInner {
    prime: PrimeField,
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl BaseField {
    /// `F_{p^e}` with the lexicographically smallest primitive modulus.
    pub fn new(p: u64, e: u32) -> Result<Self, FieldError> {
        let prime = PrimeField::new(p)?;
        let q = Self::checked_order(p, e)?;
        let group = q - 1;
        let factors = prime_factors(group);
        let modulus = first_primitive(&prime, e as usize, group, &factors)
            .ok_or(FieldError::NoPrimitivePolynomial(e as usize))?;
        Ok(Self::build(prime, e, modulus))
    }

    /// `F_{p^e}` with an explicit monic modulus (coefficients low to high).
    pub fn with_modulus(p: u64, e: u32, modulus: &[u64]) -> Result<Self, FieldError> {
        let prime = PrimeField::new(p)?;
        let q = Self::checked_order(p, e)?;
        if modulus.len() != e as usize + 1 || modulus.last() != Some(&1) {
            return Err(FieldError::WrongModulusDegree {
                expected: e as usize,
                got: modulus.len(),
            });
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(FieldError::CoefficientOutOfRange(c));
        }
        let modulus: Vec<u32> = modulus.iter().map(|&c| c as u32).collect();
        if !poly::is_irreducible(&prime, &modulus) {
            return Err(FieldError::ReducibleModulus);
        }
        let (order, group) = poly::root_order(&prime, &modulus);
        if order != group {
            return Err(FieldError::NonPrimitiveModulus {
                order,
                expected: group,
            });
        }
        debug_assert_eq!(group, q - 1);
        Ok(Self::build(prime, e, modulus))
    }

    fn checked_order(p: u64, e: u32) -> Result<u64, FieldError> {
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        match p.checked_pow(e) {
            Some(q) if q <= BASE_LIMIT => Ok(q),
            _ => Err(FieldError::TooLarge {
                p,
                degree: u64::from(e),
            }),
        }
    }

    fn build(prime: PrimeField, e: u32, modulus: Vec<u32>) -> Self {
        let p = prime.characteristic();
        let q = p.pow(e);
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q as usize];
        // Powers of x as coefficient vectors, packed base p.
        let mut cur = poly::rem(&prime, &[1], &modulus);
        let x = [0u32, 1];
        for i in 0..n {
            let code = pack(&cur, p);
            exp[i] = code;
            exp[i + n] = code;
            log[code as usize] = i as u32;
            cur = poly::mul_mod(&prime, &cur, &x, &modulus);
        }
        Self {
            inner: Arc::new(BaseInner {
                prime,
                p,
                e,
                q,
                modulus,
                exp,
                log,
            }),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.e
    }

    pub fn size(&self) -> u32 {
        self.inner.q
    }

    /// Monic modulus over `F_p`, coefficients low to high.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn prime_field(&self) -> &PrimeField {
        &self.inner.prime
    }

    /// The primitive element (residue of `x`).
    pub fn generator(&self) -> u32 {
        self.inner.exp[if self.inner.q == 2 { 0 } else { 1 }]
    }
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Lexicographically smallest monic primitive polynomial of degree `d`: the
/// lower coefficients, read as base-`|F|` digits, form the smallest integer.
pub(crate) fn first_primitive<F: Field>(
    f: &F,
    d: usize,
    group: u64,
    factors: &[u64],
) -> Option<Vec<F::Elem>> {
    let base = f.order();
    let count = base.checked_pow(d as u32)?;
    (0..count).find_map(|t| {
        let mut h = Vec::with_capacity(d + 1);
        let mut v = t;
        for _ in 0..d {
            h.push(f.element(v % base));
            v /= base;
        }
        h.push(f.one());
        poly::is_primitive(f, &h, group, factors).then_some(h)
    })
}

/// Digitwise base-`p` addition of two packed coordinate vectors.
pub(crate) fn add_digits(p: u64, mut a: u64, mut b: u64) -> u64 {
    if p == 2 {
        return a ^ b;
    }
    let mut out = 0;
    let mut place = 1;
    while a > 0 || b > 0 {
        let s = (a % p + b % p) % p;
        out += s * place;
        place *= p;
        a /= p;
        b /= p;
    }
    out
}

pub(crate) fn neg_digits(p: u64, mut a: u64) -> u64 {
    if p == 2 {
        return a;
    }
    let mut out = 0;
    let mut place = 1;
    while a > 0 {
        let d = a % p;
        out += ((p - d) % p) * place;
        place *= p;
        a /= p;
    }
    out
}

impl Field for BaseField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        if self.inner.e == 1 {
            return self.inner.prime.add(a, b);
        }
        add_digits(u64::from(self.inner.p), u64::from(a), u64::from(b)) as u32
    }

    fn neg(&self, a: u32) -> u32 {
        if self.inner.e == 1 {
            return self.inner.prime.neg(a);
        }
        neg_digits(u64::from(self.inner.p), u64::from(a)) as u32
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let i = &self.inner;
        i.exp[(i.log[a as usize] + i.log[b as usize]) as usize]
    }

    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_{}", self.inner.q);
        let i = &self.inner;
        let n = i.q - 1;
        i.exp[((n - i.log[a as usize]) % n) as usize]
    }

    fn order(&self) -> u64 {
        u64::from(self.inner.q)
    }

    fn element(&self, index: u64) -> u32 {
        index as u32
    }

    fn index(&self, a: u32) -> u64 {
        u64::from(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli() {
        assert_eq!(BaseField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(BaseField::new(3, 1).unwrap().modulus(), &[1, 1]);
        assert_eq!(BaseField::new(2, 1).unwrap().modulus(), &[1, 1]);
        assert_eq!(BaseField::new(5, 1).unwrap().modulus(), &[2, 1]);
        assert_eq!(BaseField::new(3, 2).unwrap().modulus(), &[2, 1, 1]);
    }

    #[test]
    fn f4_tables() {
        let f = BaseField::new(2, 2).unwrap();
        // x^2 = x + 1, encodings: x = 2, x + 1 = 3.
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.inv(3), 2);
        assert_eq!(f.add(2, 3), 1);
    }

    #[test]
    fn every_nonzero_element_has_an_inverse() {
        for (p, e) in [(2, 3), (3, 2), (5, 1), (7, 1), (2, 4)] {
            let f = BaseField::new(p, e).unwrap();
            for a in 1..f.size() {
                assert_eq!(f.mul(a, f.inv(a)), 1);
                assert_eq!(f.add(a, f.neg(a)), 0);
            }
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert_eq!(
            BaseField::with_modulus(3, 2, &[1, 0, 1]).unwrap_err(),
            FieldError::NonPrimitiveModulus {
                order: 4,
                expected: 8
            }
        );
        assert_eq!(
            BaseField::with_modulus(3, 2, &[2, 0, 1]).unwrap_err(),
            FieldError::ReducibleModulus
        );
        assert!(matches!(
            BaseField::with_modulus(3, 2, &[2, 1]),
            Err(FieldError::WrongModulusDegree { .. })
        ));
        assert!(BaseField::with_modulus(3, 2, &[2, 1, 1]).is_ok());
    }
}
