//! Random instance generators shared by the property and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ztrop::puiseux::{int, rat};
use ztrop::{
    MPoly, PuiseuxScalar, Rat, ResidueElem, ResidueField, TriangularSystem, TropPoint, UCoeff, UMonomial,
    UPoly,
};

pub const Q: ResidueField = ResidueField::Rationals;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> ResidueElem {
    Q.from_i64(n)
}

/// `sum c_e t^e` from integer pairs `(c, e)`.
pub fn s(terms: &[(i64, i64)]) -> PuiseuxScalar {
    PuiseuxScalar::from_terms(terms.iter().map(|&(c, e)| (int(e), q(c))))
}

/// Nonzero scalar with 1..=max_terms terms, exponents `k/den` with
/// `k` in `lo..=hi` and `den` drawn from 1..=3.
pub fn scalar<R: Rng>(rng: &mut R, field: ResidueField, max_terms: usize, lo: i64, hi: i64) -> PuiseuxScalar {
    let den: i64 = rng.gen_range(1..=3);
    loop {
        let count = rng.gen_range(1..=max_terms);
        let terms: Vec<(Rat, ResidueElem)> = (0..count)
            .map(|_| (rat(rng.gen_range(lo..=hi), den), field.sample_unit(rng)))
            .collect();
        let out = PuiseuxScalar::from_terms(terms);
        if !out.is_zero() {
            return out;
        }
    }
}

/// Scalar that may be zero.
pub fn scalar_or_zero<R: Rng>(rng: &mut R, field: ResidueField) -> PuiseuxScalar {
    if rng.gen_bool(0.15) {
        PuiseuxScalar::zero()
    } else {
        scalar(rng, field, 3, -2, 3)
    }
}

/// Random multilinear monomial in `u1..u{nu}`.
pub fn umonomial<R: Rng>(rng: &mut R, nu: usize) -> UMonomial {
    UMonomial::from_exponents((0..nu).map(|_| rng.gen_range(0..=1)).collect())
}

/// Element of the uncertainty ring with up to `max_terms` terms.
pub fn ucoeff<R: Rng>(rng: &mut R, field: ResidueField, nu: usize, max_terms: usize) -> UCoeff {
    loop {
        let count = rng.gen_range(1..=max_terms);
        let out = UCoeff::from_terms((0..count).map(|_| (umonomial(rng, nu), scalar(rng, field, 2, -1, 3))));
        if !out.is_zero() {
            return out;
        }
    }
}

/// Nonzero univariate polynomial in `x{var+1}` over the uncertainty ring.
pub fn upoly<R: Rng>(rng: &mut R, field: ResidueField, var: usize, nu: usize, max_deg: u32) -> UPoly {
    loop {
        let deg = rng.gen_range(0..=max_deg);
        let mut coeffs = Vec::new();
        for j in 0..=deg {
            if rng.gen_bool(0.7) {
                coeffs.push((j, ucoeff(rng, field, nu, 3)));
            }
        }
        let out = UPoly::from_coeffs(var, coeffs);
        if !out.is_zero() {
            return out;
        }
    }
}

/// Polynomial whose coefficient valuations tie often, so that hull vertices
/// frequently carry several terms of minimal valuation.
pub fn tied_upoly<R: Rng>(rng: &mut R, with_u: bool) -> UPoly {
    let nu = if with_u { 2 } else { 0 };
    loop {
        let deg = rng.gen_range(1..=4);
        let mut coeffs = Vec::new();
        for j in 0..=deg {
            if !rng.gen_bool(0.75) {
                continue;
            }
            let count = rng.gen_range(1..=3);
            let c = UCoeff::from_terms((0..count).map(|_| {
                let e = [int(0), int(1), int(2), rat(1, 2)].choose(rng).expect("nonempty").clone();
                (umonomial(rng, nu), PuiseuxScalar::monomial(Q.sample_unit(rng), e))
            }));
            coeffs.push((j, c));
        }
        let out = UPoly::from_coeffs(0, coeffs);
        if !out.is_zero() {
            return out;
        }
    }
}

/// Random polynomial in `x1..x{nvars}` with small degrees.
pub fn mpoly<R: Rng>(rng: &mut R, field: ResidueField, nvars: usize, max_terms: usize) -> MPoly {
    let count = rng.gen_range(1..=max_terms);
    MPoly::from_terms(
        nvars,
        (0..count).map(|_| {
            let m: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..=2)).collect();
            (m, scalar(rng, field, 2, -1, 2))
        }),
    )
}

/// A triangular system built from explicitly chosen solutions, together
/// with the valuation vectors of those solutions.
pub struct OracleSystem {
    pub system: TriangularSystem,
    pub solutions: Vec<Vec<PuiseuxScalar>>,
    pub expected: BTreeSet<TropPoint>,
}

/// `f_1 = prod (x_1 - r)`, and for `i > 1`, `f_i = prod (x_i - g(x_1..x_{i-1}))`
/// with affine `g`. Solutions are enumerated by direct evaluation; instances
/// with a zero coordinate are redrawn.
pub fn oracle_system<R: Rng>(rng: &mut R, n: usize, max_factors: usize) -> OracleSystem {
    'retry: loop {
        let mut polys = Vec::with_capacity(n);
        let mut solutions: Vec<Vec<PuiseuxScalar>> = vec![Vec::new()];
        for i in 0..n {
            let factors = rng.gen_range(1..=max_factors);
            let mut f = MPoly::constant(n, PuiseuxScalar::constant(Q.one()));
            let mut next = Vec::new();
            let mut affine = Vec::with_capacity(factors);
            for _ in 0..factors {
                let coeffs: Vec<PuiseuxScalar> = (0..i)
                    .map(|_| {
                        if rng.gen_bool(0.6) {
                            PuiseuxScalar::monomial(Q.sample_unit(rng), rat(rng.gen_range(-2..=2), rng.gen_range(1..=3)))
                        } else {
                            PuiseuxScalar::zero()
                        }
                    })
                    .collect();
                let constant = if i == 0 { scalar(rng, Q, 3, -2, 3) } else { scalar_or_zero(rng, Q) };
                let mut g = MPoly::constant(n, constant.clone());
                for (k, a) in coeffs.iter().enumerate() {
                    g = &g + &MPoly::var(n, k, Q).scale(a);
                }
                f = &f * &(&MPoly::var(n, i, Q) - &g);
                affine.push((coeffs, constant));
            }
            for sol in &solutions {
                for (coeffs, constant) in &affine {
                    let value = coeffs.iter().zip(sol).fold(constant.clone(), |acc, (a, x)| &acc + &(a * x));
                    if value.is_zero() {
                        continue 'retry;
                    }
                    let mut extended = sol.clone();
                    extended.push(value);
                    next.push(extended);
                }
            }
            solutions = next;
            polys.push(f);
        }
        let expected = solutions
            .iter()
            .map(|sol| TropPoint(sol.iter().map(|z| z.valuation().expect("nonzero").clone()).collect()))
            .collect();
        let system = TriangularSystem::new(Q, polys).expect("triangular by construction");
        return OracleSystem { system, solutions, expected };
    }
}

/// `prod (x - r)` as a univariate polynomial.
pub fn product_of_linears(var: usize, roots: &[PuiseuxScalar]) -> UPoly {
    roots.iter().fold(UPoly::from_coeffs(var, [(0, UCoeff::constant(s(&[(1, 0)])))]), |acc, r| {
        let lin = UPoly::from_coeffs(var, [(1, UCoeff::constant(s(&[(1, 0)]))), (0, UCoeff::constant(-r))]);
        &acc * &lin
    })
}
