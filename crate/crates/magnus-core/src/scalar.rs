//! Ground-field scalars: exact rationals of arbitrary precision or IEEE
//! doubles, never mixed silently.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{AlgebraError, Result};

/// Which scalar backend a series uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

/// A coefficient, either an exact rational in lowest terms or a finite double.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::one()),
            Mode::Float => Scalar::Float(1.0),
        }
    }

    pub fn from_int(mode: Mode, v: i64) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(v))),
            Mode::Float => Scalar::Float(v as f64),
        }
    }

    pub fn ratio(mode: Mode, num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        match mode {
            Mode::Exact => {
                Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
            }
            Mode::Float => Scalar::Float(num as f64 / den as f64),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    /// Checks the float-mode invariant: stored values must be finite.
    pub fn check_finite(&self) -> Result<()> {
        if let Scalar::Float(x) = self {
            if !x.is_finite() {
                return Err(AlgebraError::NonFinite);
            }
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a + b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            _ => Err(AlgebraError::ModeMismatch),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a - b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a - b)),
            _ => Err(AlgebraError::ModeMismatch),
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a * b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            _ => Err(AlgebraError::ModeMismatch),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(a) => Scalar::Float(-a),
        }
    }

    pub fn scale_int(&self, k: i64) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a * BigRational::from_integer(BigInt::from(k))),
            Scalar::Float(a) => Scalar::Float(a * k as f64),
        }
    }

    /// Divides by a nonzero integer, exact in rational mode.
    pub fn div_int(&self, k: i64) -> Scalar {
        assert!(k != 0);
        match self {
            Scalar::Exact(a) => Scalar::Exact(a / BigRational::from_integer(BigInt::from(k))),
            Scalar::Float(a) => Scalar::Float(a / k as f64),
        }
    }

    /// Absolute value as f64; exact rationals are converted for norms only.
    pub fn abs_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => {
                let n = r.numer().abs();
                let d = r.denom().abs();
                big_to_f64(&n) / big_to_f64(&d)
            }
            Scalar::Float(x) => x.abs(),
        }
    }
}

fn big_to_f64(b: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    b.to_f64().unwrap_or(f64::INFINITY)
}
