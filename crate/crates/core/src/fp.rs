//! Residue arithmetic modulo a small prime p, 2 <= p <= 13.

use crate::error::{Error, Result};

/// Primes this crate supports as moduli. Everything downstream grows like
/// (p^3 + 1)^r, so there is no point going further.
pub const SUPPORTED_PRIMES: [u8; 6] = [2, 3, 5, 7, 11, 13];

/// Check that `p` is one of the supported prime moduli.
pub fn check_modulus(p: u64) -> Result<u8> {
    if p <= 13 && SUPPORTED_PRIMES.contains(&(p as u8)) {
        Ok(p as u8)
    } else {
        Err(Error::InvalidModulus(p))
    }
}

/// A residue in [0, p) together with its prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u8,
    p: u8,
}

impl FpScalar {
    pub fn new(value: u64, p: u64) -> Result<Self> {
        let p = check_modulus(p)?;
        Ok(Self {
            value: (value % p as u64) as u8,
            p,
        })
    }

    pub fn value(&self) -> u8 {
        self.value
    }

    pub fn modulus(&self) -> u8 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

pub(crate) fn add_mod(a: u8, b: u8, p: u8) -> u8 {
    let s = a as u16 + b as u16;
    (s % p as u16) as u8
}

pub(crate) fn sub_mod(a: u8, b: u8, p: u8) -> u8 {
    let s = a as i16 - b as i16;
    (s.rem_euclid(p as i16)) as u8
}

pub(crate) fn mul_mod(a: u8, b: u8, p: u8) -> u8 {
    ((a as u16 * b as u16) % p as u16) as u8
}

pub(crate) fn pow_mod(mut base: u8, mut exp: u64, p: u8) -> u8 {
    let mut acc = 1u8 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse mod p, by Fermat's little theorem.
pub fn fp_inverse(x: FpScalar) -> Result<FpScalar> {
    if x.value == 0 {
        return Err(Error::NonInvertible(0, x.p));
    }
    Ok(FpScalar {
        value: pow_mod(x.value, x.p as u64 - 2, x.p),
        p: x.p,
    })
}

pub(crate) fn inv_mod(x: u8, p: u8) -> Result<u8> {
    if x.is_multiple_of(p) {
        return Err(Error::NonInvertible(x as u64, p));
    }
    Ok(pow_mod(x, p as u64 - 2, p))
}

impl std::ops::Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: FpScalar) -> FpScalar {
        assert_eq!(self.p, rhs.p, "mismatched moduli");
        FpScalar {
            value: add_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}

impl std::ops::Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: FpScalar) -> FpScalar {
        assert_eq!(self.p, rhs.p, "mismatched moduli");
        FpScalar {
            value: sub_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}

impl std::ops::Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: FpScalar) -> FpScalar {
        assert_eq!(self.p, rhs.p, "mismatched moduli");
        FpScalar {
            value: mul_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}
