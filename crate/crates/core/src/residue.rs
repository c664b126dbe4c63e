//! Exact residue fields and root finding for univariate polynomials over them.
//!
//! Two fields are supported: the rationals and prime fields `GF(p)` with a
//! small modulus. Root finding returns the distinct nonzero roots and fails
//! with [`Error::NonSplitting`] when the polynomial (after removing its
//! factor `x^k`) is not a product of linear factors over the field.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Largest prime modulus accepted by [`ResidueField::prime`].
pub const DEFAULT_PRIME_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResidueField {
    Rationals,
    Prime(u64),
}

impl ResidueField {
    pub fn prime(p: u64) -> Result<Self> {
        Self::prime_with_cap(p, DEFAULT_PRIME_CAP)
    }

    pub fn prime_with_cap(p: u64, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if p > cap {
            return Err(Error::InvalidArgument(format!(
                "prime {p} exceeds the configured bound {cap}"
            )));
        }
        Ok(ResidueField::Prime(p))
    }

    pub fn zero(self) -> ResidueElem {
        self.from_i64(0)
    }

    pub fn one(self) -> ResidueElem {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> ResidueElem {
        self.from_int(&BigInt::from(n))
    }

    pub fn from_int(self, n: &BigInt) -> ResidueElem {
        match self {
            ResidueField::Rationals => ResidueElem::Rational(BigRational::from_integer(n.clone())),
            ResidueField::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                ResidueElem::Modular {
                    value: r.to_u64().expect("reduced residue fits in u64"),
                    modulus: p,
                }
            }
        }
    }

    /// Maps a rational number into the field; fails if the denominator
    /// vanishes modulo `p`.
    pub fn from_rational(self, r: &BigRational) -> Result<ResidueElem> {
        match self {
            ResidueField::Rationals => Ok(ResidueElem::Rational(r.clone())),
            ResidueField::Prime(_) => {
                let num = self.from_int(r.numer());
                let den = self.from_int(r.denom());
                num.checked_div(&den)
            }
        }
    }

    pub fn contains(self, e: &ResidueElem) -> bool {
        e.field() == self
    }

    /// Draws a random nonzero element. Rationals are kept small so that
    /// randomized checks stay cheap.
    pub fn sample_unit<R: Rng + ?Sized>(self, rng: &mut R) -> ResidueElem {
        match self {
            ResidueField::Rationals => {
                let mut num: i64 = rng.gen_range(1..=6);
                if rng.gen_bool(0.5) {
                    num = -num;
                }
                let den: i64 = rng.gen_range(1..=3);
                ResidueElem::Rational(BigRational::new(num.into(), den.into()))
            }
            ResidueField::Prime(p) => ResidueElem::Modular {
                value: rng.gen_range(1..p),
                modulus: p,
            },
        }
    }
}

impl fmt::Display for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueField::Rationals => write!(f, "QQ"),
            ResidueField::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a residue field in canonical form, so that structural
/// equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResidueElem {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
}

impl ResidueElem {
    pub fn field(&self) -> ResidueField {
        match self {
            ResidueElem::Rational(_) => ResidueField::Rationals,
            ResidueElem::Modular { modulus, .. } => ResidueField::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ResidueElem::Rational(r) => r.is_zero(),
            ResidueElem::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            ResidueElem::Rational(r) => r.is_one(),
            ResidueElem::Modular { value, .. } => *value == 1,
        }
    }

    /// True for rationals below zero; prime-field elements are never negative.
    pub fn is_negative(&self) -> bool {
        matches!(self, ResidueElem::Rational(r) if r.is_negative())
    }

    pub fn inverse(&self) -> Result<ResidueElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            ResidueElem::Rational(r) => ResidueElem::Rational(r.recip()),
            ResidueElem::Modular { value, modulus } => ResidueElem::Modular {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn checked_div(&self, rhs: &ResidueElem) -> Result<ResidueElem> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn pow(&self, exp: u32) -> ResidueElem {
        match self {
            ResidueElem::Rational(r) => ResidueElem::Rational(num_traits::pow(r.clone(), exp as usize)),
            ResidueElem::Modular { value, modulus } => ResidueElem::Modular {
                value: pow_mod(*value, exp as u64, *modulus),
                modulus: *modulus,
            },
        }
    }

    fn combine(
        &self,
        rhs: &ResidueElem,
        rat: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        modular: impl FnOnce(u128, u128, u128) -> u128,
    ) -> ResidueElem {
        match (self, rhs) {
            (ResidueElem::Rational(a), ResidueElem::Rational(b)) => ResidueElem::Rational(rat(a, b)),
            (
                ResidueElem::Modular { value: a, modulus: p },
                ResidueElem::Modular { value: b, modulus: q },
            ) if p == q => ResidueElem::Modular {
                value: modular(*a as u128, *b as u128, *p as u128) as u64,
                modulus: *p,
            },
            _ => panic!("residue field mismatch: {} vs {}", self.field(), rhs.field()),
        }
    }
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

impl<'a> Add<&'a ResidueElem> for &'a ResidueElem {
    type Output = ResidueElem;
    fn add(self, rhs: &ResidueElem) -> ResidueElem {
        self.combine(rhs, |a, b| a + b, |a, b, p| (a + b) % p)
    }
}

impl<'a> Sub<&'a ResidueElem> for &'a ResidueElem {
    type Output = ResidueElem;
    fn sub(self, rhs: &ResidueElem) -> ResidueElem {
        self.combine(rhs, |a, b| a - b, |a, b, p| (a + p - b) % p)
    }
}

impl<'a> Mul<&'a ResidueElem> for &'a ResidueElem {
    type Output = ResidueElem;
    fn mul(self, rhs: &ResidueElem) -> ResidueElem {
        self.combine(rhs, |a, b| a * b, |a, b, p| a * b % p)
    }
}

impl Neg for &ResidueElem {
    type Output = ResidueElem;
    fn neg(self) -> ResidueElem {
        match self {
            ResidueElem::Rational(r) => ResidueElem::Rational(-r),
            ResidueElem::Modular { value, modulus } => ResidueElem::Modular {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for ResidueElem {
    type Output = ResidueElem;
    fn neg(self) -> ResidueElem {
        -&self
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<ResidueElem> for ResidueElem {
            type Output = ResidueElem;
            fn $method(self, rhs: ResidueElem) -> ResidueElem {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl fmt::Display for ResidueElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueElem::Rational(r) => write!(f, "{r}"),
            ResidueElem::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Dense univariate polynomial over a residue field, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResiduePoly {
    field: ResidueField,
    coeffs: Vec<ResidueElem>,
}

impl ResiduePoly {
    pub fn new(field: ResidueField, mut coeffs: Vec<ResidueElem>) -> Self {
        debug_assert!(coeffs.iter().all(|c| field.contains(c)));
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ResiduePoly { field, coeffs }
    }

    pub fn field(&self) -> ResidueField {
        self.field
    }

    pub fn coeffs(&self) -> &[ResidueElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &ResidueElem) -> ResidueElem {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    /// Divides by `(x - r)`, returning the quotient and the remainder.
    fn div_linear(&self, r: &ResidueElem) -> (ResiduePoly, ResidueElem) {
        let n = self.coeffs.len();
        if n == 0 {
            return (self.clone(), self.field.zero());
        }
        let mut quotient = vec![self.field.zero(); n - 1];
        let mut carry = self.field.zero();
        for i in (0..n).rev() {
            let cur = &self.coeffs[i] + &(&carry * r);
            if i == 0 {
                return (ResiduePoly::new(self.field, quotient), cur);
            }
            quotient[i - 1] = cur.clone();
            carry = cur;
        }
        unreachable!()
    }

    fn without_zero_roots(&self) -> ResiduePoly {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        ResiduePoly::new(self.field, self.coeffs[k..].to_vec())
    }

    /// The distinct roots of `self` in the unit group of the field, sorted.
    ///
    /// Fails with [`Error::NonSplitting`] when the part of `self` coprime to
    /// `x` is not a product of linear factors over the field.
    pub fn roots_in_units(&self) -> Result<Vec<ResidueElem>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let core = self.without_zero_roots();
        if core.degree() == Some(0) {
            return Ok(Vec::new());
        }
        let candidates = match self.field {
            ResidueField::Rationals => rational_root_candidates(&core),
            ResidueField::Prime(p) => (1..p)
                .map(|v| ResidueElem::Modular { value: v, modulus: p })
                .collect(),
        };
        let mut roots = BTreeSet::new();
        let mut rest = core;
        for c in candidates {
            loop {
                let (q, r) = rest.div_linear(&c);
                if !r.is_zero() {
                    break;
                }
                roots.insert(c.clone());
                rest = q;
            }
            if rest.degree() == Some(0) {
                break;
            }
        }
        if rest.degree() != Some(0) {
            return Err(Error::NonSplitting {
                poly: self.to_string(),
                field: self.field.to_string(),
            });
        }
        Ok(roots.into_iter().collect())
    }
}

/// Candidate rational roots `±p/q` with `p | a_0` and `q | a_d` after
/// clearing denominators.
fn rational_root_candidates(poly: &ResiduePoly) -> Vec<ResidueElem> {
    let rats: Vec<&BigRational> = poly
        .coeffs
        .iter()
        .map(|c| match c {
            ResidueElem::Rational(r) => r,
            _ => unreachable!("rational field holds rationals"),
        })
        .collect();
    let lcm = rats
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = rats
        .iter()
        .map(|r| r.numer() * (&lcm / r.denom()))
        .collect();
    let constant = ints.first().expect("nonzero polynomial").abs();
    let leading = ints.last().expect("nonzero polynomial").abs();
    let num_divs = divisors(&constant);
    let den_divs = divisors(&leading);
    let mut set = BTreeSet::new();
    for p in &num_divs {
        for q in &den_divs {
            let r = BigRational::new(p.clone(), q.clone());
            set.insert(-r.clone());
            set.insert(r);
        }
    }
    set.into_iter().map(ResidueElem::Rational).collect()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    debug_assert!(n.is_positive());
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut d = BigInt::from(2);
    while &d * &d <= rest {
        let mut e = 0;
        while (&rest % &d).is_zero() {
            rest /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if !rest.is_one() {
        factors.push((rest, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let current = divs.clone();
        let mut power = BigInt::one();
        for _ in 0..e {
            power *= &p;
            divs.extend(current.iter().map(|d| d * &power));
        }
    }
    divs.sort();
    divs
}

impl fmt::Display for ResiduePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match deg {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    write!(f, "x")?;
                    if deg > 1 {
                        write!(f, "^{deg}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
