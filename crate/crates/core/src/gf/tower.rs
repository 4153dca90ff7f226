use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::base::{add_digits, first_primitive, neg_digits};
use super::{poly, prime_factors, prime_power, BaseField, Field, FieldError};
use crate::linalg::Matrix;

/// Largest supported extension order `q^m`.
pub const TOWER_LIMIT: u64 = 1 << 48;
/// Extensions up to this order use discrete log tables for multiplication.
pub const TABLE_LIMIT: u64 = 1 << 20;
/// Largest order for which conjugacy classes are enumerated.
pub const CLASS_GUARD: u64 = 1 << 20;

/// An element of `F_{q^m}` in canonical encoding.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u64);

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Portable description of a field tower: characteristic, degrees and both moduli.
///
/// Moduli are monic, coefficients low to high including the leading 1. Base
/// modulus coefficients lie in `F_p`, top modulus coefficients are canonical
/// `F_q` encodings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub m: u32,
    pub base_modulus: Vec<u64>,
    pub top_modulus: Vec<u64>,
}

/// The extension `F_{q^m} = F_q[y]/(h)` over `F_q = F_p[x]/(g)`.
///
/// Cheap to clone; all tables live behind an `Arc`.
#[derive(Clone)]
pub struct FieldTower {
    inner: Arc<TowerInner>,
}

struct TowerInner {
    base: BaseField,
    p: u64,
    q: u64,
    m: u32,
    size: u64,
    modulus: Vec<u32>,
    gamma: Elem,
    tables: Option<(Vec<u32>, Vec<u32>)>,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FieldTower(F_{}^{}, h = {:?})",
            self.inner.q, self.inner.m, self.inner.modulus
        )
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        self.spec() == other.spec()
    }
}

impl Eq for FieldTower {}

impl FieldTower {
    /// `F_{q^m}` with default (lexicographically smallest primitive) moduli.
    pub fn new(q: u64, m: u32) -> Result<Self, FieldError> {
        let (p, e) = prime_power(q).ok_or(FieldError::NotPrime(q))?;
        Self::from_parts(p, e, m)
    }

    pub fn from_parts(p: u64, e: u32, m: u32) -> Result<Self, FieldError> {
        let base = BaseField::new(p, e)?;
        let (group, factors) = Self::group(&base, p, m)?;
        let modulus = first_primitive(&base, m as usize, group, &factors)
            .ok_or(FieldError::NoPrimitivePolynomial(m as usize))?;
        Ok(Self::build(base, m, modulus))
    }

    /// A tower with explicit moduli; both are checked for primitivity.
    pub fn with_moduli(
        p: u64,
        e: u32,
        m: u32,
        base_modulus: &[u64],
        top_modulus: &[u64],
    ) -> Result<Self, FieldError> {
        let base = BaseField::with_modulus(p, e, base_modulus)?;
        let (group, _) = Self::group(&base, p, m)?;
        let q = base.order();
        if top_modulus.len() != m as usize + 1 || top_modulus.last() != Some(&1) {
            return Err(FieldError::WrongModulusDegree {
                expected: m as usize,
                got: top_modulus.len(),
            });
        }
        if let Some(&c) = top_modulus.iter().find(|&&c| c >= q) {
            return Err(FieldError::CoefficientOutOfRange(c));
        }
        let modulus: Vec<u32> = top_modulus.iter().map(|&c| c as u32).collect();
        if !poly::is_irreducible(&base, &modulus) {
            return Err(FieldError::ReducibleModulus);
        }
        let (order, _) = poly::root_order(&base, &modulus);
        if order != group {
            return Err(FieldError::NonPrimitiveModulus {
                order,
                expected: group,
            });
        }
        Ok(Self::build(base, m, modulus))
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self, FieldError> {
        Self::with_moduli(
            spec.p,
            spec.e,
            spec.m,
            &spec.base_modulus,
            &spec.top_modulus,
        )
    }

    pub fn spec(&self) -> FieldSpec {
        let base = &self.inner.base;
        FieldSpec {
            p: self.inner.p,
            e: base.degree(),
            m: self.inner.m,
            base_modulus: base.modulus().iter().map(|&c| u64::from(c)).collect(),
            top_modulus: self.inner.modulus.iter().map(|&c| u64::from(c)).collect(),
        }
    }

    fn group(base: &BaseField, p: u64, m: u32) -> Result<(u64, Vec<u64>), FieldError> {
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let degree = u64::from(base.degree()) * u64::from(m);
        match base.order().checked_pow(m) {
            Some(size) if size <= TOWER_LIMIT => Ok((size - 1, prime_factors(size - 1))),
            _ => Err(FieldError::TooLarge { p, degree }),
        }
    }

    fn build(base: BaseField, m: u32, modulus: Vec<u32>) -> Self {
        let q = base.order();
        let size = q.pow(m);
        let p = u64::from(base.characteristic());
        let mut inner = TowerInner {
            base,
            p,
            q,
            m,
            size,
            modulus,
            gamma: Elem(0),
            tables: None,
        };
        let y = if m == 1 {
            inner.reduce_poly(vec![0, 1])
        } else {
            Elem(q)
        };
        inner.gamma = y;
        if size <= TABLE_LIMIT {
            let n = (size - 1) as usize;
            let mut exp = vec![0u32; 2 * n.max(1)];
            let mut log = vec![0u32; size as usize];
            let mut cur = Elem(1);
            for i in 0..n {
                exp[i] = cur.0 as u32;
                exp[i + n] = cur.0 as u32;
                log[cur.0 as usize] = i as u32;
                cur = inner.mul_generic(cur, y);
            }
            if n == 1 {
                exp[1] = 1;
            }
            inner.tables = Some((exp, log));
        }
        Self {
            inner: Arc::new(inner),
        }
    }

    pub fn base(&self) -> &BaseField {
        &self.inner.base
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    /// Order of the base field.
    pub fn q(&self) -> u64 {
        self.inner.q
    }

    /// Extension degree over the base field.
    pub fn m(&self) -> u32 {
        self.inner.m
    }

    /// Order `q^m` of the field.
    pub fn size(&self) -> u64 {
        self.inner.size
    }

    /// Top modulus over `F_q`, coefficients low to high.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// The primitive element: the residue of `y`.
    pub fn gamma(&self) -> Elem {
        self.inner.gamma
    }

    pub fn gamma_pow(&self, i: u64) -> Elem {
        self.pow(self.inner.gamma, u128::from(i % (self.inner.size - 1)))
    }

    /// Embeds an `F_q` element.
    pub fn from_base(&self, c: u32) -> Elem {
        Elem(u64::from(c))
    }

    pub fn is_base(&self, a: Elem) -> bool {
        a.0 < self.inner.q
    }

    /// Coordinates over `F_q` in the power basis of `y`.
    pub fn coords(&self, a: Elem) -> Vec<u32> {
        self.inner.unpack(a)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Elem {
        self.inner.pack(coords)
    }

    /// `sigma(a) = a^q`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, u128::from(self.inner.q))
    }

    /// `sigma^j(a) = a^(q^j)`; `j` is taken modulo `m`.
    pub fn frobenius_pow(&self, a: Elem, j: usize) -> Elem {
        let j = j % self.inner.m as usize;
        self.pow(a, u128::from(self.inner.q).pow(j as u32))
    }

    /// `sigma^(-j)(a)`.
    pub fn frobenius_inv_pow(&self, a: Elem, j: usize) -> Elem {
        let m = self.inner.m as usize;
        self.frobenius_pow(a, (m - j % m) % m)
    }

    /// Relative norm to `F_q`: `a^((q^m - 1)/(q - 1))`.
    pub fn norm(&self, a: Elem) -> Elem {
        let i = &self.inner;
        self.pow(a, u128::from((i.size - 1) / (i.q - 1)))
    }

    /// Whether `b = c^(q - 1) a` for some nonzero `c`.
    ///
    /// For nonzero elements this is equivalent to equal norms; zero is only
    /// conjugate to itself.
    pub fn are_conjugate(&self, a: Elem, b: Elem) -> bool {
        if a.0 == 0 || b.0 == 0 {
            return a == b;
        }
        self.norm(a) == self.norm(b)
    }

    /// The class `C(gamma^i)` of elements conjugate to `gamma^i`, ascending.
    pub fn conjugacy_class(&self, i: u64) -> Result<Vec<Elem>, FieldError> {
        self.class_guard()?;
        let target = self.norm(self.gamma_pow(i));
        Ok((1..self.inner.size)
            .map(Elem)
            .filter(|&a| self.norm(a) == target)
            .collect())
    }

    /// All `q - 1` nonzero classes, in the order `C(1), C(gamma), ..., C(gamma^(q-2))`.
    pub fn conjugacy_classes(&self) -> Result<Vec<Vec<Elem>>, FieldError> {
        self.class_guard()?;
        let classes = (self.inner.q - 1) as usize;
        let mut index = std::collections::HashMap::new();
        for i in 0..classes {
            index.insert(self.norm(self.gamma_pow(i as u64)), i);
        }
        let mut out = vec![Vec::new(); classes];
        for a in 1..self.inner.size {
            out[index[&self.norm(Elem(a))]].push(Elem(a));
        }
        Ok(out)
    }

    fn class_guard(&self) -> Result<(), FieldError> {
        if self.inner.size > CLASS_GUARD {
            return Err(FieldError::SizeGuard {
                order: self.inner.size,
                guard: CLASS_GUARD,
            });
        }
        Ok(())
    }

    /// The `m x n` matrix over `F_q` whose columns are the coordinates of `v`.
    pub fn expand(&self, v: &[Elem]) -> Matrix<u32> {
        let m = self.inner.m as usize;
        let mut out = Matrix::filled(m, v.len(), 0u32);
        for (c, &a) in v.iter().enumerate() {
            for (r, x) in self.coords(a).into_iter().enumerate() {
                out.set(r, c, x);
            }
        }
        out
    }

    /// Dimension of the `F_q`-span of `v`.
    pub fn rank_q(&self, v: &[Elem]) -> usize {
        if v.iter().all(|a| a.0 == 0) {
            return 0;
        }
        self.expand(v).rank(&self.inner.base)
    }

    pub fn linearly_independent(&self, v: &[Elem]) -> bool {
        self.rank_q(v) == v.len()
    }

    /// Iterator over all elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.inner.size).map(Elem)
    }
}

impl TowerInner {
    fn unpack(&self, a: Elem) -> Vec<u32> {
        let mut v = a.0;
        (0..self.m)
            .map(|_| {
                let d = (v % self.q) as u32;
                v /= self.q;
                d
            })
            .collect()
    }

    fn pack(&self, coords: &[u32]) -> Elem {
        Elem(
            coords
                .iter()
                .rev()
                .fold(0u64, |acc, &c| acc * self.q + u64::from(c)),
        )
    }

    /// Reduces an arbitrary-degree polynomial in `y` modulo `h`.
    fn reduce_poly(&self, mut c: Vec<u32>) -> Elem {
        let m = self.m as usize;
        let f = &self.base;
        for k in (m..c.len()).rev() {
            let lead = c[k];
            if lead == 0 {
                continue;
            }
            c[k] = 0;
            for j in 0..m {
                let t = f.mul(lead, self.modulus[j]);
                c[k - m + j] = f.sub(c[k - m + j], t);
            }
        }
        c.truncate(m);
        c.resize(m, 0);
        self.pack(&c)
    }

    fn mul_generic(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem(0);
        }
        let f = &self.base;
        let x = self.unpack(a);
        let y = self.unpack(b);
        let mut prod = vec![0u32; 2 * x.len() - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    prod[i + j] = f.add(prod[i + j], f.mul(xi, yj));
                }
            }
        }
        self.reduce_poly(prod)
    }

    fn pow_generic(&self, a: Elem, mut exp: u128) -> Elem {
        let mut base = a;
        let mut acc = Elem(1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_generic(acc, base);
            }
            base = self.mul_generic(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl Field for FieldTower {
    type Elem = Elem;

    fn zero(&self) -> Elem {
        Elem(0)
    }

    fn one(&self) -> Elem {
        Elem(1)
    }

    fn add(&self, a: Elem, b: Elem) -> Elem {
        let i = &self.inner;
        if i.m == 1 && i.base.degree() == 1 {
            return Elem(u64::from(i.base.add(a.0 as u32, b.0 as u32)));
        }
        Elem(add_digits(i.p, a.0, b.0))
    }

    fn neg(&self, a: Elem) -> Elem {
        Elem(neg_digits(self.inner.p, a.0))
    }

    fn mul(&self, a: Elem, b: Elem) -> Elem {
        let i = &self.inner;
        match &i.tables {
            Some((exp, log)) => {
                if a.0 == 0 || b.0 == 0 {
                    return Elem(0);
                }
                Elem(u64::from(
                    exp[(log[a.0 as usize] + log[b.0 as usize]) as usize],
                ))
            }
            None => i.mul_generic(a, b),
        }
    }

    fn inv(&self, a: Elem) -> Elem {
        assert!(a.0 != 0, "inverse of zero in F_{}", self.inner.size);
        let i = &self.inner;
        match &i.tables {
            Some((exp, log)) => {
                let n = (i.size - 1) as u32;
                Elem(u64::from(exp[((n - log[a.0 as usize]) % n) as usize]))
            }
            None => i.pow_generic(a, u128::from(i.size - 2)),
        }
    }

    fn pow(&self, a: Elem, exp: u128) -> Elem {
        let i = &self.inner;
        match &i.tables {
            Some((table, log)) => {
                if a.0 == 0 {
                    return if exp == 0 { Elem(1) } else { Elem(0) };
                }
                let n = u128::from(i.size - 1);
                Elem(u64::from(
                    table[((u128::from(log[a.0 as usize]) * (exp % n)) % n) as usize],
                ))
            }
            None => i.pow_generic(a, exp),
        }
    }

    fn order(&self) -> u64 {
        self.inner.size
    }

    fn element(&self, index: u64) -> Elem {
        Elem(index)
    }

    fn index(&self, a: Elem) -> u64 {
        a.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_default() {
        let f = FieldTower::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let classes = f.conjugacy_classes().unwrap();
        assert_eq!(classes, vec![vec![Elem(1), Elem(2), Elem(3)]]);
    }

    fn f9() -> FieldTower {
        FieldTower::new(3, 2).unwrap()
    }

    #[test]
    fn f9_default_modulus_and_gamma() {
        let f = f9();
        assert_eq!(f.modulus(), &[2, 1, 1]);
        let g = f.gamma();
        assert_eq!(g, Elem(3));
        // gamma^2 = 2 gamma + 1.
        assert_eq!(f.mul(g, g), Elem(2 * 3 + 1));
        // sigma(gamma) = gamma^3 = 2 gamma + 2.
        assert_eq!(f.frobenius(g), Elem(8));
        assert_eq!(f.norm(g), Elem(2));
    }

    #[test]
    fn f9_conjugacy_classes() {
        let f = f9();
        let classes = f.conjugacy_classes().unwrap();
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().all(|c| c.len() == 4));
        assert!(classes[0].contains(&Elem(1)));
        assert!(classes[1].contains(&f.gamma()));
        assert_eq!(f.conjugacy_class(1).unwrap(), classes[1]);
    }

    #[test]
    fn explicit_moduli_are_validated() {
        assert_eq!(
            FieldTower::with_moduli(3, 1, 2, &[1, 1], &[1, 0, 1]).unwrap_err(),
            FieldError::NonPrimitiveModulus {
                order: 4,
                expected: 8
            }
        );
        assert_eq!(
            FieldTower::with_moduli(3, 1, 2, &[1, 1], &[2, 0, 1]).unwrap_err(),
            FieldError::ReducibleModulus
        );
        let f = FieldTower::with_moduli(3, 1, 2, &[1, 1], &[2, 1, 1]).unwrap();
        assert_eq!(f, f9());
    }

    #[test]
    fn spec_round_trip() {
        let f = FieldTower::new(4, 3).unwrap();
        let spec = f.spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back: FieldSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(FieldTower::from_spec(&back).unwrap(), f);
    }

    #[test]
    fn generic_and_table_paths_agree() {
        let f = FieldTower::new(4, 3).unwrap();
        let inner = &f.inner;
        for a in (0..64).map(Elem) {
            for b in (0..64).map(Elem) {
                assert_eq!(f.mul(a, b), inner.mul_generic(a, b));
            }
            let generic_frob = inner.pow_generic(a, 4);
            assert_eq!(f.frobenius(a), generic_frob);
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = FieldTower::new(2, 30).unwrap();
        assert!(f.inner.tables.is_none());
        let a = Elem(123_456_789);
        assert_eq!(f.mul(a, f.inv(a)), Elem(1));
        assert_eq!(f.frobenius_pow(a, 30), a);
        assert_eq!(f.frobenius(a), f.mul(a, a));
        assert_eq!(f.pow(f.gamma(), u128::from(f.size() - 1)), Elem(1));
    }

    #[test]
    fn rank_over_base() {
        let f = f9();
        let g = f.gamma();
        assert_eq!(f.rank_q(&[Elem(1), g]), 2);
        assert_eq!(f.rank_q(&[Elem(1), Elem(2)]), 1);
        assert_eq!(f.rank_q(&[Elem(0)]), 0);
        assert!(!f.linearly_independent(&[g, f.mul(Elem(2), g)]));
    }

    #[test]
    fn size_guards() {
        assert!(matches!(
            FieldTower::new(2, 49),
            Err(FieldError::TooLarge { .. })
        ));
        let f = FieldTower::new(2, 21).unwrap();
        assert!(matches!(
            f.conjugacy_classes(),
            Err(FieldError::SizeGuard { .. })
        ));
    }
}
