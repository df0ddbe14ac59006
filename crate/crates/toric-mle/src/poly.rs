//! Univariate polynomials over the rationals, exact.
//!
//! Just enough arithmetic for counting distinct complex roots:
//! multiplication, differentiation, and the Euclidean gcd. Root counting is
//! `deg g - deg gcd(g, g')`, which never needs a root to be isolated.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::ratio_from_i64;

/// Coefficients in ascending degree; the zero polynomial is the empty list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::new(vec![BigRational::one()])
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&v| ratio_from_i64(v)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * ratio_from_i64((i + 1) as i64))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn evaluate(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn make_monic(&mut self) {
        if let Some(lead) = self.coeffs.last().cloned() {
            if !lead.is_one() {
                for c in self.coeffs.iter_mut() {
                    *c = &*c / &lead;
                }
            }
        }
    }

    /// Remainder of Euclidean division.
    fn rem(&self, divisor: &Self) -> Self {
        debug_assert!(!divisor.is_zero());
        let dd = divisor.coeffs.len();
        let mut rem = self.coeffs.clone();
        let lead = divisor.coeffs.last().unwrap();
        while rem.len() >= dd {
            let q = rem.last().unwrap() / lead;
            let shift = rem.len() - dd;
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                let sub = dc * &q;
                rem[shift + i] -= sub;
            }
            // The top coefficient cancels by construction.
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        Self { coeffs: rem }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        // Keeping the remainders monic bounds coefficient growth.
        a.make_monic();
        b.make_monic();
        while !b.is_zero() {
            let mut r = a.rem(&b);
            r.make_monic();
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.make_monic_owned()
        }
    }

    fn make_monic_owned(mut self) -> Self {
        self.make_monic();
        self
    }

    /// Number of distinct complex roots: `deg g - deg gcd(g, g')`.
    pub fn distinct_root_count(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let deg = self.degree().unwrap();
        if deg == 0 {
            return Ok(0);
        }
        let g = self.gcd(&self.derivative());
        Ok(deg - g.degree().unwrap_or(0))
    }
}
