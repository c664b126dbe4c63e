//! The uncertainty ring `K[u_1, ..., u_n]` and univariate polynomials over it.
//!
//! The variable `u_i` stands for an unknown element of valuation zero: the
//! unresolved tail of the `i`-th coordinate of a root. Valuations and initials
//! extend from [`PuiseuxScalar`] by taking the minimum over all coefficients.
//!
//! Indices are zero based: `UMonomial::var(0, 1)` is `u1` and a [`UPoly`] in
//! variable `0` is a polynomial in `x1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::puiseux::{fmt_term, PuiseuxScalar, Rat};
use crate::residue::{ResidueElem, ResidueField, ResiduePoly};

/// Exponent vector in the `u` variables with trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UMonomial(Vec<u32>);

impl UMonomial {
    pub fn one() -> Self {
        UMonomial(Vec::new())
    }

    pub fn var(k: usize, exp: u32) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = exp;
        Self::from_exponents(v)
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        UMonomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, k: usize) -> u32 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, e)| **e > 0).map(|(k, _)| k)
    }

    pub fn mul(&self, other: &UMonomial) -> UMonomial {
        let n = self.0.len().max(other.0.len());
        let exps = (0..n).map(|k| self.exponent(k) + other.exponent(k)).collect();
        UMonomial::from_exponents(exps)
    }

    /// The same monomial with `u_k` removed.
    pub fn without(&self, k: usize) -> UMonomial {
        let mut exps = self.0.clone();
        if k < exps.len() {
            exps[k] = 0;
        }
        UMonomial::from_exponents(exps)
    }
}

impl fmt::Display for UMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .vars()
            .map(|k| match self.0[k] {
                1 => format!("u{}", k + 1),
                e => format!("u{}^{}", k + 1, e),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Signed summands of `scalar * mono`. A multi-term scalar next to a
/// nontrivial monomial becomes one parenthesized summand.
pub(crate) fn summands(scalar: &PuiseuxScalar, mono: Option<&str>) -> Vec<(bool, String)> {
    match (mono, scalar.terms()) {
        (Some(m), terms) if terms.len() > 1 => vec![(false, format!("({scalar})*{m}"))],
        (_, terms) => terms
            .iter()
            .map(|(e, c)| {
                let mag = if c.is_negative() { -c } else { c.clone() };
                (c.is_negative(), fmt_term(&mag, e, mono))
            })
            .collect(),
    }
}

pub(crate) fn write_summands(f: &mut fmt::Formatter<'_>, pieces: &[(bool, String)]) -> fmt::Result {
    if pieces.is_empty() {
        return write!(f, "0");
    }
    for (k, (neg, text)) in pieces.iter().enumerate() {
        match (k, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        write!(f, "{text}")?;
    }
    Ok(())
}

pub(crate) fn write_sum(f: &mut fmt::Formatter<'_>, items: &[(&PuiseuxScalar, Option<String>)]) -> fmt::Result {
    let pieces: Vec<(bool, String)> = items.iter().flat_map(|(s, m)| summands(s, m.as_deref())).collect();
    write_summands(f, &pieces)
}

/// Element of the uncertainty ring: a sparse polynomial in the `u`
/// variables with nonzero [`PuiseuxScalar`] coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UCoeff {
    terms: BTreeMap<UMonomial, PuiseuxScalar>,
}

impl UCoeff {
    pub fn zero() -> Self {
        UCoeff { terms: BTreeMap::new() }
    }

    pub fn constant(c: PuiseuxScalar) -> Self {
        Self::term(UMonomial::one(), c)
    }

    pub fn term(m: UMonomial, c: PuiseuxScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        UCoeff { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (UMonomial, PuiseuxScalar)>) -> Self {
        let mut out = UCoeff::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: UMonomial, c: PuiseuxScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<UMonomial, PuiseuxScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn field(&self) -> Option<ResidueField> {
        self.terms.values().next().and_then(|c| c.initial().ok()).map(|c| c.field())
    }

    /// The coefficient as a plain scalar, if no `u` variable occurs.
    pub fn as_scalar(&self) -> Option<PuiseuxScalar> {
        match self.terms.len() {
            0 => Some(PuiseuxScalar::zero()),
            1 => self.terms.get(&UMonomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect()
    }

    pub fn scale(&self, c: &PuiseuxScalar) -> Self {
        if c.is_zero() {
            return UCoeff::zero();
        }
        UCoeff {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let Some(field) = self.field() else {
            return UCoeff::zero();
        };
        let mut base = self.clone();
        let mut acc = UCoeff::constant(PuiseuxScalar::constant(field.one()));
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

    /// Minimum valuation over all coefficients.
    pub fn uval(&self) -> Result<Rat> {
        self.terms
            .values()
            .map(|c| c.valuation().cloned())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .ok_or(Error::ZeroHasNoValuation)
    }

    /// Sum of `init(a_m) * u^m` over the terms attaining [`UCoeff::uval`].
    pub fn uinitial(&self) -> Result<ResidueUPoly> {
        let v = self.uval()?;
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| c.valuation().ok() == Some(&v))
            .map(|(m, c)| (m.clone(), c.initial().expect("nonzero").clone()))
            .collect();
        Ok(ResidueUPoly { terms })
    }

    /// Substitutes `u_k -> values[k]` for every `k` present in `values`.
    pub fn specialize(&self, values: &BTreeMap<usize, PuiseuxScalar>) -> UCoeff {
        let mut out = UCoeff::zero();
        let mut cache: BTreeMap<(usize, u32), PuiseuxScalar> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = m.exponents().to_vec();
            for (&k, value) in values {
                let e = m.exponent(k);
                if e == 0 {
                    continue;
                }
                let p = cache.entry((k, e)).or_insert_with(|| value.pow(e));
                coeff = &coeff * p;
                rest[k] = 0;
            }
            out.add_term(UMonomial::from_exponents(rest), coeff);
        }
        out
    }
}

impl<'a> Add<&'a UCoeff> for &'a UCoeff {
    type Output = UCoeff;
    fn add(self, rhs: &UCoeff) -> UCoeff {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &UCoeff {
    type Output = UCoeff;
    fn neg(self) -> UCoeff {
        UCoeff {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<'a> Sub<&'a UCoeff> for &'a UCoeff {
    type Output = UCoeff;
    fn sub(self, rhs: &UCoeff) -> UCoeff {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a UCoeff> for &'a UCoeff {
    type Output = UCoeff;
    fn mul(self, rhs: &UCoeff) -> UCoeff {
        let mut out = UCoeff::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for UCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<(&PuiseuxScalar, Option<String>)> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| (c, (!m.is_one()).then(|| m.to_string())))
            .collect();
        write_sum(f, &items)
    }
}

/// Polynomial in the `u` variables over the residue field, the image of
/// [`UCoeff::uinitial`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ResidueUPoly {
    terms: BTreeMap<UMonomial, ResidueElem>,
}

impl ResidueUPoly {
    pub fn from_terms(terms: impl IntoIterator<Item = (UMonomial, ResidueElem)>) -> Self {
        let mut map: BTreeMap<UMonomial, ResidueElem> = BTreeMap::new();
        for (m, c) in terms {
            let s = match map.remove(&m) {
                Some(existing) => &existing + &c,
                None => c,
            };
            if !s.is_zero() {
                map.insert(m, s);
            }
        }
        ResidueUPoly { terms: map }
    }

    pub fn terms(&self) -> &BTreeMap<UMonomial, ResidueElem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_single_term(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn contains_u(&self) -> bool {
        self.terms.keys().any(|m| !m.is_one())
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect()
    }

    /// The distinct exponents of `u_k` among the terms.
    pub fn degrees_in(&self, k: usize) -> BTreeSet<u32> {
        self.terms.keys().map(|m| m.exponent(k)).collect()
    }

    pub fn as_constant(&self) -> Option<&ResidueElem> {
        match self.terms.len() {
            1 => self.terms.get(&UMonomial::one()),
            _ => None,
        }
    }

    /// Evaluates every variable except `u_k`, returning a univariate
    /// polynomial in `u_k`. Variables missing from `values` evaluate to 1.
    pub fn eval_except(
        &self,
        k: usize,
        values: &BTreeMap<usize, ResidueElem>,
        field: ResidueField,
    ) -> ResiduePoly {
        let deg = self.degrees_in(k).into_iter().max().unwrap_or(0) as usize;
        let mut coeffs = vec![field.zero(); deg + 1];
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for var in m.vars().filter(|&var| var != k) {
                let base = values.get(&var).cloned().unwrap_or_else(|| field.one());
                v = &v * &base.pow(m.exponent(var));
            }
            let e = m.exponent(k) as usize;
            coeffs[e] = &coeffs[e] + &v;
        }
        ResiduePoly::new(field, coeffs)
    }
}

impl fmt::Display for ResidueUPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scalars: Vec<(PuiseuxScalar, Option<String>)> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| (PuiseuxScalar::constant(c.clone()), (!m.is_one()).then(|| m.to_string())))
            .collect();
        let items: Vec<(&PuiseuxScalar, Option<String>)> =
            scalars.iter().map(|(s, m)| (s, m.clone())).collect();
        write_sum(f, &items)
    }
}

/// Univariate polynomial in `x_var` with coefficients in the uncertainty ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly {
    var: usize,
    coeffs: BTreeMap<u32, UCoeff>,
}

impl UPoly {
    pub fn zero(var: usize) -> Self {
        UPoly { var, coeffs: BTreeMap::new() }
    }

    pub fn from_coeffs(var: usize, coeffs: impl IntoIterator<Item = (u32, UCoeff)>) -> Self {
        let mut out = UPoly::zero(var);
        for (j, c) in coeffs {
            out.add_coeff(j, c);
        }
        out
    }

    /// `t^scale * x` plus `prefix`.
    pub fn linear(var: usize, prefix: &PuiseuxScalar, scale: &Rat, field: ResidueField) -> Self {
        UPoly::from_coeffs(
            var,
            [
                (0, UCoeff::constant(prefix.clone())),
                (1, UCoeff::constant(PuiseuxScalar::monomial(field.one(), scale.clone()))),
            ],
        )
    }

    fn add_coeff(&mut self, j: u32, c: UCoeff) {
        if c.is_zero() {
            return;
        }
        let s = match self.coeffs.remove(&j) {
            Some(existing) => &existing + &c,
            None => c,
        };
        if !s.is_zero() {
            self.coeffs.insert(j, s);
        }
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, UCoeff> {
        &self.coeffs
    }

    pub fn coeff(&self, j: u32) -> Option<&UCoeff> {
        self.coeffs.get(&j)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn field(&self) -> Option<ResidueField> {
        self.coeffs.values().next().and_then(UCoeff::field)
    }

    pub fn u_vars(&self) -> BTreeSet<usize> {
        self.coeffs.values().flat_map(UCoeff::vars).collect()
    }

    /// The points `(j, uval(a_j))` of the support.
    pub fn support_points(&self) -> Vec<(u32, Rat)> {
        self.coeffs
            .iter()
            .map(|(j, c)| (*j, c.uval().expect("stored coefficients are nonzero")))
            .collect()
    }

    pub fn scale(&self, c: &UCoeff) -> Self {
        UPoly::from_coeffs(self.var, self.coeffs.iter().map(|(j, a)| (*j, a * c)))
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let Some(field) = self.field() else {
            return UPoly::zero(self.var);
        };
        let mut base = self.clone();
        let mut acc = UPoly::from_coeffs(
            self.var,
            [(0, UCoeff::constant(PuiseuxScalar::constant(field.one())))],
        );
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

    /// Evaluates at an element of the uncertainty ring.
    pub fn eval(&self, z: &UCoeff) -> UCoeff {
        let Some(deg) = self.degree() else {
            return UCoeff::zero();
        };
        let mut acc = UCoeff::zero();
        for j in (0..=deg).rev() {
            acc = &acc * z;
            if let Some(c) = self.coeffs.get(&j) {
                acc = &acc + c;
            }
        }
        acc
    }

    /// Composition `self(g(x))` for `g` in the same variable.
    pub fn substitute(&self, g: &UPoly) -> UPoly {
        let Some(deg) = self.degree() else {
            return UPoly::zero(self.var);
        };
        let mut acc = UPoly::zero(self.var);
        for j in (0..=deg).rev() {
            acc = &acc * g;
            if let Some(c) = self.coeffs.get(&j) {
                acc.add_coeff(0, c.clone());
            }
        }
        acc
    }

    /// `self(prefix + t^scale * x)`.
    pub fn shift_substitute(&self, prefix: &PuiseuxScalar, scale: &Rat) -> UPoly {
        match self.field() {
            Some(field) => self.substitute(&UPoly::linear(self.var, prefix, scale, field)),
            None => self.clone(),
        }
    }

    /// Terms minimizing `w*j + uval(a_j)`, with coefficients replaced by
    /// their initials.
    pub fn initial_form(&self, w: &Rat) -> Result<InitialForm> {
        let weighted: Vec<(u32, Rat)> = self
            .support_points()
            .into_iter()
            .map(|(j, v)| (j, v + w * Rat::from_integer(j.into())))
            .collect();
        let min = weighted
            .iter()
            .map(|(_, v)| v)
            .min()
            .cloned()
            .ok_or(Error::ZeroPolynomial)?;
        let mut terms = BTreeMap::new();
        for (j, v) in weighted {
            if v == min {
                terms.insert(j, self.coeffs[&j].uinitial()?);
            }
        }
        Ok(InitialForm { var: self.var, terms })
    }

    /// Substitutes valuation-zero values for the listed `u` variables.
    pub fn specialize_u(&self, values: &BTreeMap<usize, PuiseuxScalar>) -> Result<UPoly> {
        for (&k, value) in values {
            if value.is_zero() || !value.valuation()?.is_zero() {
                return Err(Error::InvalidSpecialization {
                    var: k + 1,
                    value: value.to_string(),
                });
            }
        }
        Ok(UPoly::from_coeffs(
            self.var,
            self.coeffs.iter().map(|(j, c)| (*j, c.specialize(values))),
        ))
    }
}

impl<'a> Add<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        debug_assert_eq!(self.var, rhs.var);
        let mut out = self.clone();
        for (j, c) in &rhs.coeffs {
            out.add_coeff(*j, c.clone());
        }
        out
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly {
            var: self.var,
            coeffs: self.coeffs.iter().map(|(j, c)| (*j, -c)).collect(),
        }
    }
}

impl<'a> Sub<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn sub(self, rhs: &UPoly) -> UPoly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn mul(self, rhs: &UPoly) -> UPoly {
        debug_assert_eq!(self.var, rhs.var);
        let mut out = UPoly::zero(self.var);
        for (ja, ca) in &self.coeffs {
            for (jb, cb) in &rhs.coeffs {
                out.add_coeff(ja + jb, ca * cb);
            }
        }
        out
    }
}

fn x_power(var: usize, j: u32) -> Option<String> {
    match j {
        0 => None,
        1 => Some(format!("x{}", var + 1)),
        _ => Some(format!("x{}^{}", var + 1, j)),
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces = Vec::new();
        for (j, c) in self.coeffs.iter().rev() {
            let xp = x_power(self.var, *j);
            if let Some(s) = c.as_scalar() {
                pieces.extend(summands(&s, xp.as_deref()));
                continue;
            }
            match (xp, c.terms().len()) {
                (None, _) => {
                    for (m, a) in c.terms().iter().rev() {
                        let m = (!m.is_one()).then(|| m.to_string());
                        pieces.extend(summands(a, m.as_deref()));
                    }
                }
                (Some(x), 1) => {
                    let (m, a) = c.terms().iter().next().expect("one term");
                    pieces.extend(summands(a, Some(&format!("{m}*{x}"))));
                }
                (Some(x), _) => pieces.push((false, format!("({c})*{x}"))),
            }
        }
        write_summands(f, &pieces)
    }
}

/// Initial form of a [`UPoly`]: coefficients live in the residue field
/// extended by the `u` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialForm {
    var: usize,
    terms: BTreeMap<u32, ResidueUPoly>,
}

impl InitialForm {
    pub fn terms(&self) -> &BTreeMap<u32, ResidueUPoly> {
        &self.terms
    }

    /// True when some coefficient involves an uncertainty variable.
    pub fn contains_u(&self) -> bool {
        self.terms.values().any(ResidueUPoly::contains_u)
    }

    /// The initial form as a dense residue polynomial, if it is `u`-free.
    pub fn to_residue_poly(&self) -> Option<ResiduePoly> {
        if self.contains_u() {
            return None;
        }
        let field = self.terms.values().next()?.terms().values().next()?.field();
        let deg = *self.terms.keys().next_back()? as usize;
        let mut coeffs = vec![field.zero(); deg + 1];
        for (j, c) in &self.terms {
            coeffs[*j as usize] = c.as_constant().cloned().unwrap_or_else(|| field.zero());
        }
        Some(ResiduePoly::new(field, coeffs))
    }
}

impl fmt::Display for InitialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(j, c)| match x_power(self.var, *j) {
                None => format!("{c}"),
                Some(x) if c.is_single_term() && c.as_constant().is_some_and(ResidueElem::is_one) => x,
                Some(x) => format!("({c})*{x}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Small helpers for building uncertainty-ring elements in tests and fixtures.
pub mod build {
    use super::*;

    /// `c * t^e * u^m` over the rationals.
    pub fn term(c: i64, e: Rat, m: UMonomial) -> UCoeff {
        UCoeff::term(m, PuiseuxScalar::monomial(ResidueField::Rationals.from_i64(c), e))
    }

    pub fn scalar(s: PuiseuxScalar) -> UCoeff {
        UCoeff::constant(s)
    }
}
