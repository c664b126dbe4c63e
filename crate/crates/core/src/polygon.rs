//! Newton polygons of univariate polynomials over the uncertainty ring.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::puiseux::{rat, PuiseuxScalar, Rat};
use crate::residue::{ResidueElem, ResidueField};
use crate::upoly::{ResidueUPoly, UPoly};

/// Lower convex hull of the points `(j, uval(a_j))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polygon {
    vertices: Vec<(u32, Rat)>,
}

fn cross(o: &(u32, Rat), a: &(u32, Rat), b: &(u32, Rat)) -> Rat {
    let ax = Rat::from_integer((a.0 as i64 - o.0 as i64).into());
    let bx = Rat::from_integer((b.0 as i64 - o.0 as i64).into());
    ax * (&b.1 - &o.1) - (&a.1 - &o.1) * bx
}

impl Polygon {
    /// Lower hull of points with distinct first coordinates.
    pub fn from_points(points: &[(u32, Rat)]) -> Result<Polygon> {
        if points.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        let mut sorted = points.to_vec();
        sorted.sort_by_key(|a| a.0);
        let mut hull: Vec<(u32, Rat)> = Vec::with_capacity(sorted.len());
        for p in sorted {
            while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p).is_positive() {
                hull.pop();
            }
            hull.push(p);
        }
        let polygon = Polygon { vertices: hull };
        debug_assert!(polygon.slopes().windows(2).all(|w| w[0] < w[1]));
        debug_assert!(points.iter().all(|(j, v)| polygon.height_at(*j).is_some_and(|h| &h <= v)));
        Ok(polygon)
    }

    pub fn vertices(&self) -> &[(u32, Rat)] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&(u32, Rat), &(u32, Rat))> {
        self.vertices.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn slopes(&self) -> Vec<Rat> {
        self.edges()
            .map(|(a, b)| (&b.1 - &a.1) / Rat::from_integer(((b.0 - a.0) as i64).into()))
            .collect()
    }

    /// Negated slopes, left to right (hence decreasing).
    pub fn tropical_points(&self) -> Vec<Rat> {
        self.slopes().into_iter().map(|s| -s).collect()
    }

    /// Height of the lower boundary above `j`, if `j` is within range.
    pub fn height_at(&self, j: u32) -> Option<Rat> {
        let first = self.vertices.first()?;
        if j < first.0 {
            return None;
        }
        if j == first.0 {
            return Some(first.1.clone());
        }
        self.edges().find(|(a, b)| a.0 < j && j <= b.0).map(|(a, b)| {
            let span = Rat::from_integer(((b.0 - a.0) as i64).into());
            let dx = Rat::from_integer(((j - a.0) as i64).into());
            &a.1 + (&b.1 - &a.1) * dx / span
        })
    }

    /// True when `(j, v)` lies on a lower edge or is a vertex.
    pub fn on_lower_boundary(&self, j: u32, v: &Rat) -> bool {
        self.height_at(j).is_some_and(|h| &h == v)
    }

    pub fn is_vertex(&self, j: u32) -> bool {
        self.vertices.iter().any(|(k, _)| *k == j)
    }
}

pub fn newton_polygon(f: &UPoly) -> Result<Polygon> {
    Polygon::from_points(&f.support_points())
}

/// `uinitial` of the coefficient at each hull vertex, left to right.
pub fn vertex_initials(f: &UPoly) -> Result<Vec<ResidueUPoly>> {
    newton_polygon(f)?
        .vertices()
        .iter()
        .map(|(j, _)| f.coeff(*j).expect("vertex is in the support").uinitial())
        .collect()
}

/// True when every hull vertex coefficient has a single-term initial, so no
/// valuation-zero specialization of the `u` variables can move the hull.
pub fn is_unique(f: &UPoly) -> Result<bool> {
    Ok(vertex_initials(f)?.iter().all(ResidueUPoly::is_single_term))
}

fn random_unit_series<R: Rng>(rng: &mut R, field: ResidueField, lead: ResidueElem) -> PuiseuxScalar {
    let mut terms = vec![(Rat::zero(), lead)];
    if rng.gen_bool(0.5) {
        let exps = [rat(1, 2), rat(1, 1), rat(2, 1), rat(1, 3)];
        terms.push((exps.choose(rng).expect("nonempty").clone(), field.sample_unit(rng)));
    }
    PuiseuxScalar::from_terms(terms)
}

/// Picks residues for all variables of `f`, trying to annihilate the initial
/// of one coefficient by solving for one of its variables.
fn adversarial_residues<R: Rng>(
    rng: &mut R,
    f: &UPoly,
    field: ResidueField,
    vars: &[usize],
) -> BTreeMap<usize, ResidueElem> {
    let mut residues: BTreeMap<usize, ResidueElem> =
        vars.iter().map(|&k| (k, field.sample_unit(rng))).collect();
    let polygon = newton_polygon(f).expect("nonzero polynomial");
    let candidates: Vec<ResidueUPoly> = f
        .coeffs()
        .iter()
        .filter(|(j, _)| rng.gen_bool(0.2) || polygon.is_vertex(**j))
        .map(|(_, c)| c.uinitial().expect("nonzero coefficient"))
        .filter(|p| !p.vars().is_empty() && !p.is_single_term())
        .collect();
    let Some(target) = candidates.choose(rng) else {
        return residues;
    };
    let target_vars: Vec<usize> = target.vars().into_iter().collect();
    let k = *target_vars.choose(rng).expect("target has variables");
    let univariate = target.eval_except(k, &residues, field);
    if univariate.degree().unwrap_or(0) == 0 {
        return residues;
    }
    if let Ok(roots) = univariate.roots_in_units() {
        if let Some(root) = roots.choose(rng) {
            residues.insert(k, root.clone());
        }
    }
    residues
}

/// Randomized semantic check of uniqueness: specializes the `u` variables to
/// random (and deliberately cancelling) valuation-zero values and compares
/// the resulting polygons. Deterministic in `seed`.
pub fn uniqueness_oracle(f: &UPoly, trials: usize, seed: u64) -> bool {
    let vars: Vec<usize> = f.u_vars().into_iter().collect();
    let Some(field) = f.field() else {
        return true;
    };
    if vars.is_empty() {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reference: Option<Option<Polygon>> = None;
    for trial in 0..trials {
        let residues = if trial % 2 == 0 {
            vars.iter().map(|&k| (k, field.sample_unit(&mut rng))).collect()
        } else {
            adversarial_residues(&mut rng, f, field, &vars)
        };
        let values: BTreeMap<usize, PuiseuxScalar> = residues
            .into_iter()
            .map(|(k, r)| (k, random_unit_series(&mut rng, field, r)))
            .collect();
        let specialized = f.specialize_u(&values).expect("values have valuation zero");
        let polygon = newton_polygon(&specialized).ok();
        match &reference {
            None => reference = Some(polygon),
            Some(r) if *r != polygon => return false,
            Some(_) => {}
        }
    }
    true
}
