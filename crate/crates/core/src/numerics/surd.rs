//! Exact arithmetic in the field generated by square roots of rationals.
//!
//! A value is stored as `Σ c_k √r_k` with integer radicands `r_k` whose
//! pairwise products are not perfect squares. Square roots of such
//! radicands are linearly independent over ℚ, so the representation is
//! canonical and `is_zero` is exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Surd {
    terms: Vec<(BigInt, Rational)>,
}

fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// Pulls small square factors out of `rad` into `coeff`.
fn reduce(mut rad: BigInt, mut coeff: Rational) -> (BigInt, Rational) {
    if let Some(s) = perfect_sqrt(&rad) {
        return (BigInt::one(), coeff * Rational::from_integer(s));
    }
    for d in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let d = BigInt::from(d);
        let d2 = &d * &d;
        while rad.is_multiple_of(&d2) {
            rad /= &d2;
            coeff *= Rational::from_integer(d.clone());
        }
    }
    (rad, coeff)
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn one() -> Self {
        Surd::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut s = Surd::zero();
        s.push(BigInt::one(), r);
        s
    }

    /// `√r` for `r >= 0`.
    pub fn sqrt(r: &Rational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        let (p, q) = (r.numer(), r.denom());
        let (rad, coeff) = reduce(p * q, Rational::new(BigInt::one(), q.clone()));
        let mut s = Surd::zero();
        s.push(rad, coeff);
        Some(s)
    }

    fn push(&mut self, rad: BigInt, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        for k in 0..self.terms.len() {
            let r0 = &self.terms[k].0;
            if let Some(s) = perfect_sqrt(&(r0 * &rad)) {
                // √rad = (s / r0) √r0
                let add = coeff * Rational::new(s, r0.clone());
                self.terms[k].1 += add;
                if self.terms[k].1.is_zero() {
                    self.terms.swap_remove(k);
                }
                return;
            }
        }
        self.terms.push((rad, coeff));
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.to_rational().is_some_and(|r| r.is_one())
    }

    /// The value if it is rational.
    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(r, c)] if r.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// `c √r` with a single term, as `(c, r)`.
    pub fn as_monomial(&self) -> Option<(Rational, Rational)> {
        match self.terms.as_slice() {
            [] => Some((Rational::zero(), Rational::one())),
            [(r, c)] => Some((c.clone(), Rational::from_integer(r.clone()))),
            _ => None,
        }
    }

    /// Exact square of a monomial, i.e. `c² r`.
    pub fn monomial_square(&self) -> Option<Rational> {
        self.as_monomial().map(|(c, r)| &c * &c * r)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| c.to_f64().unwrap_or(f64::NAN) * r.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (r, c) in &rhs.terms {
            out.push(r.clone(), c.clone());
        }
        out
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect(),
        }
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        self + &(-rhs)
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &rhs.terms {
                let g = r1.gcd(r2);
                let rad = (r1 / &g) * (r2 / &g);
                out.push(rad, c1 * c2 * Rational::from_integer(g));
            }
        }
        out
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if r.is_one() {
                write!(f, "{}", format_rational(c))?;
            } else {
                write!(f, "{}*sqrt({r})", format_rational(c))?;
            }
        }
        Ok(())
    }
}
