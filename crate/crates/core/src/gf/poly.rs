//! Dense commutative polynomials over a [`Field`], coefficients low to high.
//!
//! Used to build and test moduli. Results are always trimmed so the last
//! coefficient is nonzero; the zero polynomial is the empty vector.

use super::{prime_factors, Field};

pub fn trim<F: Field>(f: &F, mut a: Vec<F::Elem>) -> Vec<F::Elem> {
    while a.last().is_some_and(|&c| f.is_zero(c)) {
        a.pop();
    }
    a
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(f.zero());
            let y = b.get(i).copied().unwrap_or(f.zero());
            f.add(x, y)
        })
        .collect();
    trim(f, out)
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let nb: Vec<_> = b.iter().map(|&c| f.neg(c)).collect();
    add(f, a, &nb)
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(f, out)
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub fn div_rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
    let b = trim(f, b.to_vec());
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut r = trim(f, a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = f.inv(*b.last().unwrap());
    let mut quot = vec![f.zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = f.mul(*r.last().unwrap(), lead_inv);
        quot[shift] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] = f.sub(r[shift + j], f.mul(c, bj));
        }
        r = trim(f, r);
    }
    (trim(f, quot), r)
}

pub fn rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    div_rem(f, a, b).1
}

/// Monic greatest common divisor (zero if both inputs are zero).
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut x = trim(f, a.to_vec());
    let mut y = trim(f, b.to_vec());
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, x)
}

pub fn monic<F: Field>(f: &F, a: Vec<F::Elem>) -> Vec<F::Elem> {
    match a.last() {
        None => a,
        Some(&lead) => {
            let inv = f.inv(lead);
            a.into_iter().map(|c| f.mul(c, inv)).collect()
        }
    }
}

pub fn mul_mod<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem], modulus: &[F::Elem]) -> Vec<F::Elem> {
    rem(f, &mul(f, a, b), modulus)
}

pub fn pow_mod<F: Field>(f: &F, a: &[F::Elem], mut exp: u128, modulus: &[F::Elem]) -> Vec<F::Elem> {
    let mut base = rem(f, a, modulus);
    let mut acc = rem(f, &[f.one()], modulus);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(f, &acc, &base, modulus);
        }
        base = mul_mod(f, &base, &base, modulus);
        exp >>= 1;
    }
    acc
}

/// Evaluates `a` at a point.
pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: F::Elem) -> F::Elem {
    a.iter()
        .rev()
        .fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
}

/// Rabin's irreducibility test for a polynomial of degree `d >= 1`.
pub fn is_irreducible<F: Field>(f: &F, h: &[F::Elem]) -> bool {
    let h = trim(f, h.to_vec());
    if h.len() < 2 {
        return false;
    }
    let d = (h.len() - 1) as u64;
    let q = u128::from(f.order());
    let x = vec![f.zero(), f.one()];
    // x^(q^i) mod h, by repeated q-th powering.
    let frob = |times: u64| {
        let mut g = rem(f, &x, &h);
        for _ in 0..times {
            g = pow_mod(f, &g, q, &h);
        }
        g
    };
    if !rem(f, &sub(f, &frob(d), &x), &h).is_empty() {
        return false;
    }
    prime_factors(d).into_iter().all(|r| {
        let diff = sub(f, &frob(d / r), &x);
        gcd(f, &h, &diff).len() == 1
    })
}

/// Multiplicative order of the residue of `x` modulo `h`, together with `|F|^d - 1`.
///
/// `h` must be irreducible and `|F|^d` must fit in `u64`.
pub fn root_order<F: Field>(f: &F, h: &[F::Elem]) -> (u64, u64) {
    let d = (h.len() - 1) as u32;
    let group = f.order().pow(d) - 1;
    let x = vec![f.zero(), f.one()];
    let one = rem(f, &[f.one()], h);
    let mut order = group;
    for r in prime_factors(group) {
        while order % r == 0 && pow_mod(f, &x, u128::from(order / r), h) == one {
            order /= r;
        }
    }
    (order, group)
}

/// Whether `h` is primitive: `x` generates the full unit group of `F[x]/(h)`.
///
/// This implies irreducibility, since a reducible modulus has fewer than
/// `|F|^d - 1` units. `group_factors` are the prime factors of `|F|^d - 1`.
pub fn is_primitive<F: Field>(f: &F, h: &[F::Elem], group: u64, group_factors: &[u64]) -> bool {
    if h.first().is_none_or(|&c| f.is_zero(c)) {
        return false;
    }
    let x = vec![f.zero(), f.one()];
    let one = rem(f, &[f.one()], h);
    pow_mod(f, &x, u128::from(group), h) == one
        && group_factors
            .iter()
            .all(|&r| pow_mod(f, &x, u128::from(group / r), h) != one)
}
