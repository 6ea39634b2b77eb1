//! Exact arithmetic in ℚ(τ), τ = exp(2πi/3).
//!
//! Values are stored as `a + b·τ` with rational coordinates and reduced with
//! τ² = −1 − τ, so every product stays in the same two-dimensional basis.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rational = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Eisenstein {
    pub a: Rational,
    pub b: Rational,
}

impl Eisenstein {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self::new(Rational::from_integer(a), Rational::from_integer(b))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn tau() -> Self {
        Self::from_ints(0, 1)
    }

    /// τ^k for any integer k (τ³ = 1).
    pub fn tau_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Self::one(),
            1 => Self::tau(),
            _ => Self::from_ints(-1, -1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Multiplication by τ: (a + bτ)τ = −b + (a − b)τ.
    pub fn mul_tau(&self) -> Self {
        Self::new(-self.b, self.a - self.b)
    }

    pub fn scale(&self, s: Rational) -> Self {
        Self::new(self.a * s, self.b * s)
    }

    /// Complex embedding a + b(−1/2 + i√3/2).
    pub fn to_complex(&self) -> (f64, f64) {
        let a = ratio_to_f64(&self.a);
        let b = ratio_to_f64(&self.b);
        (a - 0.5 * b, b * 3f64.sqrt() * 0.5)
    }

    /// Squared modulus a² − ab + b², exact.
    pub fn norm(&self) -> Rational {
        self.a * self.a - self.a * self.b + self.b * self.b
    }
}

pub fn ratio_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            Some(Rational::new(p.trim().parse().ok()?, q))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

impl Add for Eisenstein {
    type Output = Eisenstein;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl<'a> Add<&'a Eisenstein> for &'a Eisenstein {
    type Output = Eisenstein;
    fn add(self, rhs: &Eisenstein) -> Eisenstein {
        Eisenstein::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl AddAssign for Eisenstein {
    fn add_assign(&mut self, rhs: Self) {
        self.a += rhs.a;
        self.b += rhs.b;
    }
}

impl Sub for Eisenstein {
    type Output = Eisenstein;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl<'a> Sub<&'a Eisenstein> for &'a Eisenstein {
    type Output = Eisenstein;
    fn sub(self, rhs: &Eisenstein) -> Eisenstein {
        Eisenstein::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for Eisenstein {
    type Output = Eisenstein;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl<'a> Mul<&'a Eisenstein> for &'a Eisenstein {
    type Output = Eisenstein;
    // (a + bτ)(c + dτ) = ac + (ad + bc)τ + bdτ² = (ac − bd) + (ad + bc − bd)τ
    fn mul(self, rhs: &Eisenstein) -> Eisenstein {
        let bd = self.b * rhs.b;
        Eisenstein::new(self.a * rhs.a - bd, self.a * rhs.b + self.b * rhs.a - bd)
    }
}

impl Mul for Eisenstein {
    type Output = Eisenstein;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl fmt::Display for Eisenstein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{} {} {}τ",
            format_rational(&self.a),
            sign,
            format_rational(&self.b.abs())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    #[test]
    fn tau_cubed_is_one() {
        let t = Eisenstein::tau();
        assert_eq!(&(&t * &t) * &t, Eisenstein::one());
        let sum = Eisenstein::one() + Eisenstein::tau() + Eisenstein::tau_pow(2);
        assert!(sum.is_zero());
        assert_eq!(Eisenstein::tau_pow(-1), Eisenstein::tau_pow(2));
    }

    #[test]
    fn mul_tau_rule() {
        let x = Eisenstein::new(q(3, 2), q(-5, 7));
        assert_eq!(x.mul_tau(), Eisenstein::new(q(5, 7), q(3, 2) + q(5, 7)));
        assert_eq!(x.mul_tau(), &x * &Eisenstein::tau());
    }

    #[test]
    fn rational_formatting_round_trips() {
        for r in [q(1, 2), q(-3, 8), q(0, 1), q(7, 1)] {
            assert_eq!(parse_rational(&format_rational(&r)), Some(r));
        }
        assert_eq!(parse_rational("1/0"), None);
    }

    fn small() -> impl Strategy<Value = Eisenstein> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20)
            .prop_map(|(a, da, b, db)| Eisenstein::new(q(a, da), q(b, db)))
    }

    proptest! {
        #[test]
        fn ring_laws(x in small(), y in small(), z in small()) {
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        }

        #[test]
        fn embedding_is_a_homomorphism(x in small(), y in small()) {
            let (xr, xi) = x.to_complex();
            let (yr, yi) = y.to_complex();
            let (pr, pi) = (&x * &y).to_complex();
            let scale = 1.0 + (xr.abs() + xi.abs()) * (yr.abs() + yi.abs());
            prop_assert!((pr - (xr * yr - xi * yi)).abs() <= 1e-12 * scale);
            prop_assert!((pi - (xr * yi + xi * yr)).abs() <= 1e-12 * scale);
        }
    }
}
