//! Newton–Puiseux expansion over the uncertainty ring and the predicates
//! characterizing approximate roots.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::polygon::{is_unique, newton_polygon};
use crate::puiseux::{fmt_term, PuiseuxScalar, Rat};
use crate::residue::ResidueField;
use crate::upoly::{UCoeff, UMonomial, UPoly};

pub const DEFAULT_MAX_DEPTH: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tail {
    /// `+ u_i * t^w_r`
    Uncertain(Rat),
    Exact,
}

/// A finite Puiseux prefix of a root of coordinate `coord`, optionally
/// followed by an unknown valuation-zero tail `u_{coord+1} * t^w_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApproxRoot {
    coord: usize,
    known: PuiseuxScalar,
    tail: Tail,
}

impl ApproxRoot {
    /// `u * t^w`, the root before anything is known about it.
    pub fn fresh(coord: usize, w: Rat) -> Self {
        ApproxRoot { coord, known: PuiseuxScalar::zero(), tail: Tail::Uncertain(w) }
    }

    pub fn uncertain(coord: usize, known: PuiseuxScalar, w_r: Rat) -> Self {
        debug_assert!(known.top_exponent().is_none_or(|e| *e < w_r));
        ApproxRoot { coord, known, tail: Tail::Uncertain(w_r) }
    }

    pub fn exact(coord: usize, known: PuiseuxScalar) -> Self {
        ApproxRoot { coord, known, tail: Tail::Exact }
    }

    pub fn coord(&self) -> usize {
        self.coord
    }

    pub fn known(&self) -> &PuiseuxScalar {
        &self.known
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_exact(&self) -> bool {
        self.tail == Tail::Exact
    }

    pub fn tail_exponent(&self) -> Option<&Rat> {
        match &self.tail {
            Tail::Uncertain(w) => Some(w),
            Tail::Exact => None,
        }
    }

    /// Leading exponent; `None` only for the exact zero root.
    pub fn valuation(&self) -> Option<Rat> {
        match (self.known.valuation(), &self.tail) {
            (Ok(v), _) => Some(v.clone()),
            (Err(_), Tail::Uncertain(w)) => Some(w.clone()),
            (Err(_), Tail::Exact) => None,
        }
    }

    /// `w_r - w_0`; `None` stands for infinite precision (exact roots).
    pub fn relative_precision(&self) -> Option<Rat> {
        let w_r = self.tail_exponent()?;
        Some(w_r - self.valuation().expect("uncertain roots have a valuation"))
    }

    pub fn to_ucoeff(&self) -> UCoeff {
        let known = UCoeff::constant(self.known.clone());
        match &self.tail {
            Tail::Exact => known,
            Tail::Uncertain(w) => {
                let field = self.field();
                let tail = UCoeff::term(UMonomial::var(self.coord, 1), PuiseuxScalar::monomial(field.one(), w.clone()));
                &known + &tail
            }
        }
    }

    /// A bare tail carries no field; its unit coefficient is the same in all.
    fn field(&self) -> ResidueField {
        self.known.initial().map(|c| c.field()).unwrap_or(ResidueField::Rationals)
    }
}

impl fmt::Display for ApproxRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.tail, self.known.is_zero()) {
            (Tail::Exact, _) => write!(f, "{}", self.known),
            (Tail::Uncertain(w), true) => {
                let u = format!("u{}", self.coord + 1);
                write!(f, "{}", fmt_term(&self.field().one(), w, Some(&u)))
            }
            (Tail::Uncertain(w), false) => {
                let u = format!("u{}", self.coord + 1);
                let one = self.field().one();
                write!(f, "{} + {}", self.known, fmt_term(&one, w, Some(&u)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionConfig {
    pub max_depth: usize,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig { max_depth: DEFAULT_MAX_DEPTH }
    }
}

/// One recursive call of the expansion: prefix so far, target valuation and
/// remaining relative-precision budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionCall {
    pub prefix: PuiseuxScalar,
    pub w: Rat,
    pub budget: Rat,
}

/// All approximate roots of `f` with valuation `w`, each either of relative
/// precision at least `p_rel` or of maximal precision.
pub fn puiseux_expansion(f: &UPoly, w: &Rat, p_rel: &Rat) -> Result<Vec<ApproxRoot>> {
    puiseux_expansion_with(f, w, p_rel, &PuiseuxScalar::zero(), &ExpansionConfig::default(), None)
}

/// Expansion with an explicit known `prefix` (prepended to every returned
/// root), configuration, and an optional trace of recursive calls.
pub fn puiseux_expansion_with(
    f: &UPoly,
    w: &Rat,
    p_rel: &Rat,
    prefix: &PuiseuxScalar,
    config: &ExpansionConfig,
    mut trace: Option<&mut Vec<ExpansionCall>>,
) -> Result<Vec<ApproxRoot>> {
    let polygon = newton_polygon(f)?;
    if !polygon.tropical_points().contains(w) {
        return Err(Error::InvalidTarget { w: w.to_string(), poly: f.to_string() });
    }
    let mut out = Vec::new();
    if !is_unique(f)? {
        if let Some(t) = trace.as_deref_mut() {
            t.push(ExpansionCall { prefix: prefix.clone(), w: w.clone(), budget: p_rel.clone() });
        }
        out.push(ApproxRoot::uncertain(f.var(), prefix.clone(), w.clone()));
        return Ok(out);
    }
    expand(f, w, p_rel, prefix, 0, config, &mut trace, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    f: &UPoly,
    w: &Rat,
    budget: &Rat,
    prefix: &PuiseuxScalar,
    depth: usize,
    config: &ExpansionConfig,
    trace: &mut Option<&mut Vec<ExpansionCall>>,
    out: &mut Vec<ApproxRoot>,
) -> Result<()> {
    if depth > config.max_depth {
        return Err(Error::RecursionLimit { depth: config.max_depth });
    }
    if let Some(t) = trace.as_deref_mut() {
        t.push(ExpansionCall { prefix: prefix.clone(), w: w.clone(), budget: budget.clone() });
    }
    let coord = f.var();
    let tail = ApproxRoot::uncertain(coord, prefix.clone(), w.clone());
    let h = f.initial_form(w)?;
    let residue_poly = match h.to_residue_poly() {
        Some(p) if budget.is_positive() => p,
        _ => {
            push_unique(out, tail);
            return Ok(());
        }
    };
    let mut local = Vec::new();
    for c in residue_poly.roots_in_units()? {
        let term = PuiseuxScalar::monomial(c, w.clone());
        let g = f.shift_substitute(&term, &Rat::zero());
        if !is_unique(&g)? {
            push_unique(out, tail);
            return Ok(());
        }
        let next_prefix = prefix + &term;
        if g.coeff(0).is_none() {
            local.push(ApproxRoot::exact(coord, next_prefix.clone()));
        }
        let next: Vec<Rat> = newton_polygon(&g)?.tropical_points().into_iter().filter(|w2| w2 > w).collect();
        // precision gained is the distance to the nearest next term
        let Some(nearest) = next.iter().min() else {
            continue;
        };
        let next_budget = budget - (nearest - w);
        for w2 in &next {
            expand(&g, w2, &next_budget, &next_prefix, depth + 1, config, trace, &mut local)?;
        }
    }
    for r in local {
        push_unique(out, r);
    }
    Ok(())
}

fn push_unique(out: &mut Vec<ApproxRoot>, r: ApproxRoot) {
    if !out.contains(&r) {
        out.push(r);
    }
}

/// True when `z` is an approximate root of `f`: the initial of `f(z)` has at
/// least two distinct degrees in the tail variable.
pub fn is_approximate_root(f: &UPoly, z: &ApproxRoot) -> Result<bool> {
    let value = f.eval(&z.to_ucoeff());
    if value.is_zero() {
        return Err(Error::ExactRootSubstitution { root: z.to_string() });
    }
    Ok(value.uinitial()?.degrees_in(z.coord()).len() >= 2)
}

/// True when refining `z` further is blocked: the polygon of
/// `f(known + t^w_r * x)` is unique and some point on its lower boundary has
/// a `u`-dependent initial.
pub fn has_maximal_precision(f: &UPoly, z: &ApproxRoot) -> Result<bool> {
    let Some(w_r) = z.tail_exponent() else {
        return Ok(false);
    };
    let g = f.shift_substitute(z.known(), w_r);
    if !is_unique(&g)? {
        return Ok(false);
    }
    let polygon = newton_polygon(&g)?;
    for (j, v) in g.support_points() {
        if polygon.on_lower_boundary(j, &v) && g.coeff(j).expect("support").uinitial()?.contains_u() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Relative precision comparison treating `None` as infinity.
pub fn precision_at_least(p: &Option<Rat>, bound: &Rat) -> bool {
    p.as_ref().is_none_or(|p| p >= bound)
}
