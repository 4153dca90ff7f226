//! Exact finite-field arithmetic.
//!
//! Three layers are provided: the prime field `F_p` ([`PrimeField`]), the base
//! field `F_q = F_p[x]/(g)` with `q = p^e` ([`BaseField`]) and the extension
//! `F_{q^m} = F_q[y]/(h)` ([`FieldTower`]). All of them implement [`Field`], so
//! the generic dense-polynomial and matrix routines work over any layer.
//!
//! Elements are stored in their canonical integer encoding: a residue
//! `sum_i c_i y^i` of `F_{q^m}` with `c_i` in `F_q` encodes as
//! `sum_i enc(c_i) q^i`, where `enc` on `F_q` is `sum_j d_j p^j` for the
//! `F_p`-digits `d_j` of the residue polynomial. Flattened, this is simply the
//! base-`p` representation of all `m*e` prime-field coordinates.

mod base;
pub mod poly;
mod prime;
mod tower;

pub use base::BaseField;
pub use prime::PrimeField;
pub use tower::{Elem, FieldSpec, FieldTower, CLASS_GUARD, TABLE_LIMIT, TOWER_LIMIT};

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

/// Arithmetic in a finite field whose elements are small `Copy` handles.
///
/// `inv` panics on zero, mirroring integer division by zero.
pub trait Field {
    type Elem: Copy + Eq + Hash + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Self::Elem;
    /// Number of elements.
    fn order(&self) -> u64;
    /// The element with canonical encoding `index` (`index < order`).
    fn element(&self, index: u64) -> Self::Elem;
    /// Canonical encoding of `a`.
    fn index(&self, a: Self::Elem) -> u64;

    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.add(a, self.neg(b))
    }

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    fn div(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.mul(a, self.inv(b))
    }

    fn pow(&self, a: Self::Elem, mut exp: u128) -> Self::Elem {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus must be monic of degree {expected}, got {got} coefficients")]
    WrongModulusDegree { expected: usize, got: usize },
    #[error("modulus coefficient {0} is out of range")]
    CoefficientOutOfRange(u64),
    #[error("modulus is reducible")]
    ReducibleModulus,
    #[error("modulus root has multiplicative order {order}, not {expected}")]
    NonPrimitiveModulus { order: u64, expected: u64 },
    #[error("field of order {p}^{degree} exceeds the supported size")]
    TooLarge { p: u64, degree: u64 },
    #[error("exhaustive enumeration over {order} elements exceeds the guard {guard}")]
    SizeGuard { order: u64, guard: u64 },
    #[error("no primitive polynomial of degree {0} found")]
    NoPrimitivePolynomial(usize),
}

/// Trial-division primality test, adequate for the small characteristics used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits a prime power `q` into `(p, e)`; `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let mut e = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        e += 1;
    }
    Some((p, e))
}

/// Smallest prime power `>= lower`.
pub fn next_prime_power(lower: u64) -> u64 {
    let mut q = lower.max(2);
    while prime_power(q).is_none() {
        q += 1;
    }
    q
}

/// Multiplicative order of a nonzero `a`, given the group order and its prime factors.
pub fn multiplicative_order<F: Field>(
    field: &F,
    a: F::Elem,
    group_order: u64,
    factors: &[u64],
) -> u64 {
    let mut order = group_order;
    for &r in factors {
        while order % r == 0 && field.pow(a, u128::from(order / r)) == field.one() {
            order /= r;
        }
    }
    order
}
