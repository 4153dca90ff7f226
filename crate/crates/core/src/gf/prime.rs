use super::{is_prime, Field, FieldError};

/// The prime field `F_p`, elements are residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !is_prime(p) || p > u64::from(u16::MAX) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self { p: p as u32 })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32
    }

    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, u128::from(self.p - 2))
    }

    fn order(&self) -> u64 {
        u64::from(self.p)
    }

    fn element(&self, index: u64) -> u32 {
        index as u32
    }

    fn index(&self, a: u32) -> u64 {
        u64::from(a)
    }
}
