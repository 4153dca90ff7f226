//! The skew polynomial ring `F_{q^m}[X; sigma]` with `X * a = sigma(a) * X`.
//!
//! Evaluation is the remainder evaluation: `f(a)` is the remainder of `f` on
//! right division by `X - a`, computed as `sum_i f_i N_i(a)` with the
//! truncated norms `N_i(a) = a * sigma(a) * ... * sigma^(i-1)(a)`.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::gf::{Elem, Field, FieldTower};
use crate::linalg::Matrix;

/// Largest field order for exhaustive root enumeration.
pub const ROOT_GUARD: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkewError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("lclm of the zero polynomial is undefined")]
    ZeroInput,
    #[error("root enumeration over {order} elements exceeds the guard {guard}")]
    SizeGuard { order: u64, guard: u64 },
    #[error("skew multiplication matrix needs cols - rows >= deg u, got {rows}x{cols} for degree {degree}")]
    Shape {
        rows: usize,
        cols: usize,
        degree: usize,
    },
}

/// Degree with a sentinel for the zero polynomial, ordered below every integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(usize),
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Degree::MinusInfinity, Degree::MinusInfinity) => Ordering::Equal,
            (Degree::MinusInfinity, _) => Ordering::Less,
            (_, Degree::MinusInfinity) => Ordering::Greater,
            (Degree::Finite(a), Degree::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A skew polynomial; `coeffs[i]` is the coefficient of `X^i`. Always trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SkewPoly {
    coeffs: Vec<Elem>,
}

impl SkewPoly {
    pub fn new(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last() == Some(&Elem(0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self {
            coeffs: vec![Elem(1)],
        }
    }

    pub fn constant(c: Elem) -> Self {
        Self::new(vec![c])
    }

    /// `X^t`.
    pub fn x_pow(t: usize) -> Self {
        let mut coeffs = vec![Elem(0); t + 1];
        coeffs[t] = Elem(1);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of `X^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem(0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::MinusInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree of a nonzero polynomial. Panics on zero.
    pub fn deg(&self) -> usize {
        self.coeffs
            .len()
            .checked_sub(1)
            .expect("degree of the zero polynomial")
    }

    pub fn leading(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(Elem(1))
    }
}

impl fmt::Display for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*X")?,
                _ => write!(f, "{c}*X^{i}")?,
            }
        }
        Ok(())
    }
}

/// Arithmetic in `F_{q^m}[X; sigma]` over a fixed tower.
#[derive(Debug, Clone)]
pub struct SkewRing {
    field: FieldTower,
}

impl SkewRing {
    pub fn new(field: FieldTower) -> Self {
        Self { field }
    }

    pub fn field(&self) -> &FieldTower {
        &self.field
    }

    /// `X - a`.
    pub fn linear(&self, a: Elem) -> SkewPoly {
        SkewPoly::new(vec![self.field.neg(a), Elem(1)])
    }

    pub fn add(&self, f: &SkewPoly, g: &SkewPoly) -> SkewPoly {
        let n = f.coeffs.len().max(g.coeffs.len());
        SkewPoly::new(
            (0..n)
                .map(|i| self.field.add(f.coeff(i), g.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, f: &SkewPoly, g: &SkewPoly) -> SkewPoly {
        let n = f.coeffs.len().max(g.coeffs.len());
        SkewPoly::new(
            (0..n)
                .map(|i| self.field.sub(f.coeff(i), g.coeff(i)))
                .collect(),
        )
    }

    /// `c * f` (scalar on the left).
    pub fn scale(&self, c: Elem, f: &SkewPoly) -> SkewPoly {
        SkewPoly::new(f.coeffs.iter().map(|&a| self.field.mul(c, a)).collect())
    }

    /// `f` scaled on the left to leading coefficient 1; zero stays zero.
    pub fn monic(&self, f: &SkewPoly) -> SkewPoly {
        match f.leading() {
            None => SkewPoly::zero(),
            Some(lc) => self.scale(self.field.inv(lc), f),
        }
    }

    /// `X^t * f`: coefficients move up by `t` and pick up `sigma^t`.
    pub fn shift(&self, t: usize, f: &SkewPoly) -> SkewPoly {
        if f.is_zero() {
            return SkewPoly::zero();
        }
        let mut coeffs = vec![Elem(0); t];
        coeffs.extend(f.coeffs.iter().map(|&a| self.field.frobenius_pow(a, t)));
        SkewPoly::new(coeffs)
    }

    /// `f * g = sum_{i,j} f_i sigma^i(g_j) X^(i+j)`.
    pub fn mul(&self, f: &SkewPoly, g: &SkewPoly) -> SkewPoly {
        if f.is_zero() || g.is_zero() {
            return SkewPoly::zero();
        }
        let fld = &self.field;
        let mut out = vec![Elem(0); f.coeffs.len() + g.coeffs.len() - 1];
        for (i, &fi) in f.coeffs.iter().enumerate() {
            if fi == Elem(0) {
                continue;
            }
            for (j, &gj) in g.coeffs.iter().enumerate() {
                if gj == Elem(0) {
                    continue;
                }
                let term = fld.mul(fi, fld.frobenius_pow(gj, i));
                out[i + j] = fld.add(out[i + j], term);
            }
        }
        SkewPoly::new(out)
    }

    /// `(quotient, remainder)` with `f = quotient * g + remainder`, `deg remainder < deg g`.
    pub fn right_div(&self, f: &SkewPoly, g: &SkewPoly) -> Result<(SkewPoly, SkewPoly), SkewError> {
        let lg = g.leading().ok_or(SkewError::DivisionByZero)?;
        let fld = &self.field;
        let dg = g.deg();
        let mut r = f.clone();
        let mut quot = vec![Elem(0); f.coeffs.len().saturating_sub(dg)];
        while !r.is_zero() && r.deg() >= dg {
            let d = r.deg() - dg;
            // (c X^d) * g has leading coefficient c * sigma^d(lc g).
            let c = fld.div(r.leading().unwrap(), fld.frobenius_pow(lg, d));
            quot[d] = c;
            let mut term = self.shift(d, g);
            term = self.scale(c, &term);
            r = self.sub(&r, &term);
        }
        Ok((SkewPoly::new(quot), r))
    }

    /// `(quotient, remainder)` with `f = g * quotient + remainder`, `deg remainder < deg g`.
    pub fn left_div(&self, f: &SkewPoly, g: &SkewPoly) -> Result<(SkewPoly, SkewPoly), SkewError> {
        let lg = g.leading().ok_or(SkewError::DivisionByZero)?;
        let fld = &self.field;
        let dg = g.deg();
        let lg_inv = fld.inv(lg);
        let mut r = f.clone();
        let mut quot = vec![Elem(0); f.coeffs.len().saturating_sub(dg)];
        while !r.is_zero() && r.deg() >= dg {
            let d = r.deg() - dg;
            // g * (c X^d) has leading coefficient lc(g) * sigma^dg(c).
            let c = fld.frobenius_inv_pow(fld.mul(lg_inv, r.leading().unwrap()), dg);
            quot[d] = c;
            let mut mono = vec![Elem(0); d + 1];
            mono[d] = c;
            r = self.sub(&r, &self.mul(g, &SkewPoly::new(mono)));
        }
        Ok((SkewPoly::new(quot), r))
    }

    /// `(q^i - 1)/(q - 1)` reduced modulo the multiplicative group order.
    fn norm_exponent(&self, i: usize) -> u128 {
        let n = u128::from(self.field.size() - 1);
        let q = u128::from(self.field.q()) % n.max(1);
        let mut acc = 0u128;
        let mut pw = 1u128 % n.max(1);
        for _ in 0..i {
            acc = (acc + pw) % n.max(1);
            pw = pw * q % n.max(1);
        }
        acc
    }

    /// `N_i(a) = a^((q^i - 1)/(q - 1))`, with `N_0(a) = 1`.
    pub fn truncated_norm(&self, a: Elem, i: usize) -> Elem {
        if i == 0 {
            return Elem(1);
        }
        if a == Elem(0) {
            return Elem(0);
        }
        self.field.pow(a, self.norm_exponent(i))
    }

    /// Remainder evaluation `f(a) = sum_i f_i N_i(a)`.
    pub fn evaluate(&self, f: &SkewPoly, a: Elem) -> Elem {
        let fld = &self.field;
        // N_{i+1}(a) = N_i(a) * sigma^i(a), accumulated incrementally.
        let mut norm = Elem(1);
        let mut conj = a;
        let mut acc = Elem(0);
        for &c in &f.coeffs {
            acc = fld.add(acc, fld.mul(c, norm));
            norm = fld.mul(norm, conj);
            conj = fld.frobenius(conj);
        }
        acc
    }

    /// The remainder of `f` on right division by `X - a`.
    pub fn evaluate_by_division(&self, f: &SkewPoly, a: Elem) -> Elem {
        let (_, r) = self
            .right_div(f, &self.linear(a))
            .expect("X - a is nonzero");
        r.coeff(0)
    }

    /// Monic greatest common right divisor; zero only when both inputs are zero.
    pub fn gcrd(&self, f: &SkewPoly, g: &SkewPoly) -> SkewPoly {
        let mut a = f.clone();
        let mut b = g.clone();
        while !b.is_zero() {
            let (_, r) = self.right_div(&a, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Monic least common left multiple via the extended right Euclidean algorithm.
    pub fn lclm(&self, f: &SkewPoly, g: &SkewPoly) -> Result<SkewPoly, SkewError> {
        if f.is_zero() || g.is_zero() {
            return Err(SkewError::ZeroInput);
        }
        // Invariant: r_i = u_i * f + v_i * g.
        let (mut r_prev, mut r) = (f.clone(), g.clone());
        let (mut u_prev, mut u) = (SkewPoly::one(), SkewPoly::zero());
        while !r.is_zero() {
            let (quot, rem) = self.right_div(&r_prev, &r)?;
            let u_next = self.sub(&u_prev, &self.mul(&quot, &u));
            r_prev = std::mem::replace(&mut r, rem);
            u_prev = std::mem::replace(&mut u, u_next);
        }
        Ok(self.monic(&self.mul(&u, f)))
    }

    /// Left fold of pairwise lclm; the empty list gives 1.
    pub fn lclm_all(&self, polys: &[SkewPoly]) -> Result<SkewPoly, SkewError> {
        polys
            .iter()
            .try_fold(SkewPoly::one(), |acc, p| self.lclm(&acc, p))
    }

    /// Monic minimal polynomial of a set of points, by Newton interpolation.
    ///
    /// Each point not yet annihilated multiplies the current polynomial on
    /// the left by `X - sigma(v) a v^-1` with `v = g(a)`. The empty set gives 1.
    pub fn minimal_polynomial(&self, points: &[Elem]) -> SkewPoly {
        let fld = &self.field;
        let mut g = SkewPoly::one();
        for &a in points {
            let v = self.evaluate(&g, a);
            if v == Elem(0) {
                continue;
            }
            let conj = fld.mul(fld.mul(fld.frobenius(v), a), fld.inv(v));
            g = self.mul(&self.linear(conj), &g);
        }
        g
    }

    pub fn is_p_independent(&self, points: &[Elem]) -> bool {
        self.minimal_polynomial(points).degree() == Degree::Finite(points.len())
    }

    /// Rows `N_0(a_j), ..., N_{rows-1}(a_j)` for each point `a_j`.
    pub fn theta_vandermonde(&self, points: &[Elem], rows: usize) -> Matrix<Elem> {
        let mut out = Matrix::filled(rows, points.len(), Elem(0));
        for (j, &a) in points.iter().enumerate() {
            for i in 0..rows {
                out.set(i, j, self.truncated_norm(a, i));
            }
        }
        out
    }

    /// All roots of `f` in the field, ascending, by exhaustive evaluation.
    pub fn roots_in_field(&self, f: &SkewPoly) -> Result<Vec<Elem>, SkewError> {
        let order = self.field.size();
        if order > ROOT_GUARD {
            return Err(SkewError::SizeGuard {
                order,
                guard: ROOT_GUARD,
            });
        }
        Ok(self
            .field
            .elements()
            .filter(|&a| self.evaluate(f, a) == Elem(0))
            .collect())
    }

    /// The `rows x cols` matrix whose row `r` holds the coefficients of `X^r * u`.
    ///
    /// Multiplying a coefficient row of `v` (length `rows`) by it gives the
    /// coefficient row of `v * u`.
    pub fn skew_mult_matrix(
        &self,
        u: &SkewPoly,
        rows: usize,
        cols: usize,
    ) -> Result<Matrix<Elem>, SkewError> {
        let degree = match u.degree() {
            Degree::MinusInfinity => 0,
            Degree::Finite(d) => d,
        };
        if cols < rows || cols - rows < degree {
            return Err(SkewError::Shape { rows, cols, degree });
        }
        let mut out = Matrix::filled(rows, cols, Elem(0));
        for r in 0..rows {
            for (j, &c) in u.coeffs().iter().enumerate() {
                out.set(r, r + j, self.field.frobenius_pow(c, r));
            }
        }
        Ok(out)
    }
}
