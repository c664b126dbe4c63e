//! Finite Puiseux series `sum c_w t^w` with rational exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::residue::ResidueElem;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// An exact element of the field of Puiseux series with finite support.
///
/// Terms are kept sorted by strictly increasing exponent with nonzero
/// coefficients; the empty sequence is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PuiseuxScalar {
    terms: Vec<(Rat, ResidueElem)>,
}

impl PuiseuxScalar {
    pub fn zero() -> Self {
        PuiseuxScalar { terms: Vec::new() }
    }

    pub fn constant(c: ResidueElem) -> Self {
        Self::monomial(c, Rat::zero())
    }

    /// `c * t^exp`
    pub fn monomial(c: ResidueElem, exp: Rat) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            PuiseuxScalar { terms: vec![(exp, c)] }
        }
    }

    /// Builds a canonical scalar from arbitrary terms, merging equal exponents.
    pub fn from_terms(terms: impl IntoIterator<Item = (Rat, ResidueElem)>) -> Self {
        let mut acc: BTreeMap<Rat, ResidueElem> = BTreeMap::new();
        for (e, c) in terms {
            accumulate(&mut acc, e, c);
        }
        Self::from_map(acc)
    }

    fn from_map(map: BTreeMap<Rat, ResidueElem>) -> Self {
        PuiseuxScalar {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[(Rat, ResidueElem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn valuation(&self) -> Result<&Rat> {
        self.terms.first().map(|(e, _)| e).ok_or(Error::ZeroHasNoValuation)
    }

    /// The lowest nonzero coefficient.
    pub fn initial(&self) -> Result<&ResidueElem> {
        self.terms.first().map(|(_, c)| c).ok_or(Error::ZeroHasNoValuation)
    }

    /// Largest exponent in the support.
    pub fn top_exponent(&self) -> Option<&Rat> {
        self.terms.last().map(|(e, _)| e)
    }

    pub fn scale(&self, c: &ResidueElem) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PuiseuxScalar {
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    /// Multiplication by `t^q`.
    pub fn shift(&self, q: &Rat) -> Self {
        PuiseuxScalar {
            terms: self.terms.iter().map(|(e, a)| (e + q, a.clone())).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let field = match self.terms.first() {
            Some((_, c)) => c.field(),
            // zero carries no field, so 0^0 is reported as zero as well
            None => return Self::zero(),
        };
        let mut base = self.clone();
        let mut acc = Self::constant(field.one());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Inverse of a single-term scalar.
    pub fn monomial_inverse(&self) -> Result<Self> {
        match self.terms.as_slice() {
            [(e, c)] => Ok(Self::monomial(c.inverse()?, -e)),
            [] => Err(Error::DivisionByZero),
            _ => Err(Error::InvalidArgument(format!("{self} is not a monomial"))),
        }
    }

    /// Keeps the terms with exponent strictly below `bound`.
    pub fn truncate_below(&self, bound: &Rat) -> Self {
        PuiseuxScalar {
            terms: self.terms.iter().filter(|(e, _)| e < bound).cloned().collect(),
        }
    }
}

fn accumulate(acc: &mut BTreeMap<Rat, ResidueElem>, e: Rat, c: ResidueElem) {
    match acc.get_mut(&e) {
        Some(existing) => *existing = &*existing + &c,
        None => {
            acc.insert(e, c);
        }
    }
}

impl<'a> Add<&'a PuiseuxScalar> for &'a PuiseuxScalar {
    type Output = PuiseuxScalar;
    fn add(self, rhs: &PuiseuxScalar) -> PuiseuxScalar {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &rhs.terms[j];
            match ea.cmp(eb) {
                std::cmp::Ordering::Less => {
                    out.push((ea.clone(), ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((eb.clone(), cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = ca + cb;
                    if !s.is_zero() {
                        out.push((ea.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&rhs.terms[j..]);
        PuiseuxScalar { terms: out }
    }
}

impl Neg for &PuiseuxScalar {
    type Output = PuiseuxScalar;
    fn neg(self) -> PuiseuxScalar {
        PuiseuxScalar {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for PuiseuxScalar {
    type Output = PuiseuxScalar;
    fn neg(self) -> PuiseuxScalar {
        -&self
    }
}

impl<'a> Sub<&'a PuiseuxScalar> for &'a PuiseuxScalar {
    type Output = PuiseuxScalar;
    fn sub(self, rhs: &PuiseuxScalar) -> PuiseuxScalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a PuiseuxScalar> for &'a PuiseuxScalar {
    type Output = PuiseuxScalar;
    fn mul(self, rhs: &PuiseuxScalar) -> PuiseuxScalar {
        if self.is_zero() || rhs.is_zero() {
            return PuiseuxScalar::zero();
        }
        if let [(e, c)] = rhs.terms.as_slice() {
            return self.scale(c).shift(e);
        }
        if let [(e, c)] = self.terms.as_slice() {
            return rhs.scale(c).shift(e);
        }
        let mut acc = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                accumulate(&mut acc, ea + eb, ca * cb);
            }
        }
        PuiseuxScalar::from_map(acc)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<PuiseuxScalar> for PuiseuxScalar {
            type Output = PuiseuxScalar;
            fn $method(self, rhs: PuiseuxScalar) -> PuiseuxScalar {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

/// Formats `t^e` in the input grammar: `t`, `t^2`, `t^(1/2)`, `t^(-1)`.
pub(crate) fn fmt_t_power(e: &Rat) -> Option<String> {
    if e.is_zero() {
        None
    } else if e.is_one() {
        Some("t".to_string())
    } else if e.is_integer() && e.is_positive() {
        Some(format!("t^{e}"))
    } else {
        Some(format!("t^({e})"))
    }
}

/// Writes `c*t^e` with magnitude of `c`; the caller handles the sign.
pub(crate) fn fmt_term(mag: &ResidueElem, e: &Rat, extra: Option<&str>) -> String {
    let mut factors = Vec::new();
    let is_unit = mag.is_one();
    if !is_unit {
        factors.push(mag.to_string());
    }
    if let Some(tp) = fmt_t_power(e) {
        factors.push(tp);
    }
    if let Some(x) = extra {
        factors.push(x.to_string());
    }
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

impl fmt::Display for PuiseuxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}", fmt_term(&mag, e, None))?;
        }
        Ok(())
    }
}
