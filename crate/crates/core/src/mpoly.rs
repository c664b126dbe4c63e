//! Sparse multivariate polynomials in `x1..xn` over Puiseux scalars.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::expansion::ApproxRoot;
use crate::puiseux::PuiseuxScalar;
use crate::residue::ResidueField;
use crate::upoly::{write_sum, UCoeff, UPoly};

/// Exponent vector of length `nvars`.
pub type XMonomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<XMonomial, PuiseuxScalar>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: PuiseuxScalar) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], c)])
    }

    /// The variable `x_{k+1}`.
    pub fn var(nvars: usize, k: usize, field: ResidueField) -> Self {
        let mut m = vec![0; nvars];
        m[k] = 1;
        Self::from_terms(nvars, [(m, PuiseuxScalar::constant(field.one()))])
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (XMonomial, PuiseuxScalar)>) -> Self {
        let mut out = MPoly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial length must match the number of variables");
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: XMonomial, c: PuiseuxScalar) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.remove(&m) {
            Some(existing) => &existing + &c,
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(m, s);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<XMonomial, PuiseuxScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn field(&self) -> Option<ResidueField> {
        self.terms.values().next().and_then(|c| c.initial().ok()).map(|c| c.field())
    }

    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms.keys().map(|m| m[k]).max().unwrap_or(0)
    }

    /// Largest index of a variable that occurs, if any.
    pub fn max_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&k| self.degree_in(k) > 0)
    }

    /// The single scalar coefficient of a constant polynomial.
    pub fn as_scalar(&self) -> Option<PuiseuxScalar> {
        if self.is_zero() {
            return Some(PuiseuxScalar::zero());
        }
        match self.terms.len() {
            1 => self.terms.get(&vec![0; self.nvars]).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &PuiseuxScalar) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(m, a)| (m.clone(), a * c)))
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let Some(field) = self.field() else {
            return MPoly::zero(self.nvars);
        };
        let mut base = self.clone();
        let mut acc = MPoly::constant(self.nvars, PuiseuxScalar::constant(field.one()));
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

    /// Substitutes `values[i]` for `x_{i+1}` (`i < values.len()`) and keeps
    /// `x_{target+1}` as the variable of the resulting univariate polynomial.
    /// Requires `values.len() == target` and no variable beyond `target`.
    pub fn compose(&self, values: &[UCoeff], target: usize) -> Result<UPoly> {
        if values.len() != target {
            return Err(Error::InvalidArgument(format!(
                "{} substitution values given for target x{}",
                values.len(),
                target + 1
            )));
        }
        if let Some(k) = self.max_var().filter(|&k| k > target) {
            return Err(Error::InvalidArgument(format!(
                "x{} occurs beyond target x{}",
                k + 1,
                target + 1
            )));
        }
        let mut powers: BTreeMap<(usize, u32), UCoeff> = BTreeMap::new();
        let mut coeffs: BTreeMap<u32, UCoeff> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut acc = UCoeff::constant(c.clone());
            for (i, value) in values.iter().enumerate() {
                if m[i] > 0 {
                    let p = powers.entry((i, m[i])).or_insert_with(|| value.pow(m[i]));
                    acc = &acc * p;
                }
            }
            let j = if target < self.nvars { m[target] } else { 0 };
            let entry = coeffs.entry(j).or_default();
            *entry = &*entry + &acc;
        }
        let out = UPoly::from_coeffs(target, coeffs);
        if out.is_zero() && !self.is_zero() {
            return Err(Error::ZeroAfterSubstitution);
        }
        Ok(out)
    }

    /// [`MPoly::compose`] with the full symbolic roots, tails included.
    pub fn compose_roots(&self, roots: &[ApproxRoot], target: usize) -> Result<UPoly> {
        let values: Vec<UCoeff> = roots.iter().map(ApproxRoot::to_ucoeff).collect();
        self.compose(&values, target)
    }
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

fn fmt_x_monomial(m: &[u32]) -> Option<String> {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(k, e)| match e {
            1 => format!("x{}", k + 1),
            _ => format!("x{}^{}", k + 1, e),
        })
        .collect();
    (!parts.is_empty()).then(|| parts.join("*"))
}

/// Output is accepted by the system parser.
impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // graded by total degree, highest first
        let mut keys: Vec<&XMonomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.iter().rev().cmp(a.iter().rev()))
        });
        let items: Vec<(&PuiseuxScalar, Option<String>)> =
            keys.into_iter().map(|m| (&self.terms[m], fmt_x_monomial(m))).collect();
        write_sum(f, &items)
    }
}
