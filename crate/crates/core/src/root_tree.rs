//! The root tree of a triangular system and the driver computing its
//! tropical points.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::expansion::{puiseux_expansion_with, ApproxRoot, ExpansionConfig};
use crate::mpoly::MPoly;
use crate::polygon::{is_unique, newton_polygon, Polygon};
use crate::puiseux::{PuiseuxScalar, Rat};
use crate::residue::ResidueField;
use crate::upoly::UPoly;

/// `f_1, ..., f_n` with `f_i` in `K[x_1..x_i]` of positive degree in `x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularSystem {
    field: ResidueField,
    polys: Vec<MPoly>,
}

impl TriangularSystem {
    pub fn new(field: ResidueField, polys: Vec<MPoly>) -> Result<Self> {
        let n = polys.len();
        if n == 0 {
            return Err(Error::NonTriangularInput { index: 0, reason: "empty system".into() });
        }
        for (i, f) in polys.iter().enumerate() {
            let index = i + 1;
            if f.nvars() != n {
                return Err(Error::NonTriangularInput {
                    index,
                    reason: format!("expected {n} variables, found {}", f.nvars()),
                });
            }
            if let Some(k) = f.max_var().filter(|&k| k > i) {
                return Err(Error::NonTriangularInput { index, reason: format!("uses x{}", k + 1) });
            }
            if f.degree_in(i) == 0 {
                return Err(Error::NonTriangularInput { index, reason: format!("does not use x{index}") });
            }
            if let Some(other) = f.field().filter(|g| *g != field) {
                return Err(Error::NonTriangularInput {
                    index,
                    reason: format!("coefficients over {other}, system over {field}"),
                });
            }
        }
        Ok(TriangularSystem { field, polys })
    }

    pub fn field(&self) -> ResidueField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[MPoly] {
        &self.polys
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Valuation vector of a full branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TropPoint(pub Vec<Rat>);

impl fmt::Display for TropPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Rat::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Debug)]
struct Vertex {
    parent: Option<VertexId>,
    children: Vec<VertexId>,
    depth: usize,
    root: Option<ApproxRoot>,
    p: Rat,
    dead: bool,
    removed: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub grow: usize,
    pub reinforce: usize,
}

/// Polynomials examined by the driver, reported to an observer.
#[derive(Debug)]
pub enum TreeEvent<'a> {
    Extension { vertex: VertexId, poly: &'a UPoly, polygon: &'a Polygon, unique: bool },
    Reinforcement { vertex: VertexId, poly: &'a UPoly, polygon: &'a Polygon },
}

/// Read-only view of a vertex.
#[derive(Clone, Debug)]
pub struct VertexInfo<'a> {
    pub id: VertexId,
    pub parent: Option<VertexId>,
    pub children: &'a [VertexId],
    pub depth: usize,
    pub root: Option<&'a ApproxRoot>,
    pub p: &'a Rat,
    pub dead: bool,
}

#[derive(Clone, Debug)]
pub struct RootTree {
    system: TriangularSystem,
    p_step: Rat,
    p_max: Rat,
    config: ExpansionConfig,
    vertices: Vec<Vertex>,
    counters: Counters,
}

impl RootTree {
    pub const ROOT: VertexId = VertexId(0);

    pub fn starting_tree(system: TriangularSystem, p_step: Rat, p_max: Rat) -> Result<Self> {
        if !p_step.is_positive() {
            return Err(Error::InvalidArgument(format!("p_step must be positive, got {p_step}")));
        }
        if p_max.is_negative() {
            return Err(Error::InvalidArgument(format!("p_max must be nonnegative, got {p_max}")));
        }
        let root = Vertex {
            parent: None,
            children: Vec::new(),
            depth: 0,
            root: None,
            p: Rat::zero(),
            dead: false,
            removed: false,
        };
        Ok(RootTree {
            system,
            p_step,
            p_max,
            config: ExpansionConfig::default(),
            vertices: vec![root],
            counters: Counters::default(),
        })
    }

    pub fn with_config(mut self, config: ExpansionConfig) -> Self {
        self.config = config;
        self
    }

    pub fn system(&self) -> &TriangularSystem {
        &self.system
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    fn v(&self, id: VertexId) -> &Vertex {
        let v = &self.vertices[id.0];
        debug_assert!(!v.removed, "vertex {id} was removed");
        v
    }

    pub fn vertex(&self, id: VertexId) -> VertexInfo<'_> {
        let v = self.v(id);
        VertexInfo {
            id,
            parent: v.parent,
            children: &v.children,
            depth: v.depth,
            root: v.root.as_ref(),
            p: &v.p,
            dead: v.dead,
        }
    }

    /// All live vertices in depth-first order, children in insertion order.
    pub fn vertices_dfs(&self) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack = vec![Self::ROOT];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.v(id).children.iter().rev());
        }
        out
    }

    /// `v_1, ..., v_k` for a vertex `v_k`.
    pub fn branch(&self, id: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut cur = id;
        while let Some(parent) = self.v(cur).parent {
            out.push(cur);
            cur = parent;
        }
        out.reverse();
        out
    }

    fn branch_roots(&self, id: VertexId) -> Vec<ApproxRoot> {
        self.branch(id)
            .into_iter()
            .map(|v| self.v(v).root.clone().expect("non-root vertices carry roots"))
            .collect()
    }

    fn describe_branch(&self, id: VertexId) -> String {
        let depth = self.v(id).depth;
        let roots: Vec<String> = self
            .branch_roots(id)
            .iter()
            .enumerate()
            .map(|(i, r)| format!("x{} = {r}", i + 1))
            .collect();
        if roots.is_empty() {
            format!("f{}", depth + 1)
        } else {
            format!("f{} at {}", depth + 1, roots.join(", "))
        }
    }

    /// `f_{k+1}(z_1, ..., z_k, x_{k+1})` for `v` of depth `k < n`.
    pub fn extension_polynomial(&self, id: VertexId) -> Result<UPoly> {
        let k = self.v(id).depth;
        assert!(k < self.system.len(), "extension past a vertex of full depth");
        self.system.polys[k].compose_roots(&self.branch_roots(id), k)
    }

    /// `f_k(z_1, ..., z_{k-1}, x_k + known part of z_k)` for `v` of depth `k >= 1`.
    pub fn reinforcement_polynomial(&self, id: VertexId) -> Result<UPoly> {
        let k = self.v(id).depth;
        assert!(k >= 1, "reinforcement at the root vertex");
        let roots = self.branch_roots(id);
        let f = self.system.polys[k - 1].compose_roots(&roots[..k - 1], k - 1)?;
        Ok(f.shift_substitute(roots[k - 1].known(), &Rat::zero()))
    }

    fn add_vertex(&mut self, parent: VertexId, root: ApproxRoot, p: Rat, dead: bool) -> VertexId {
        let id = VertexId(self.vertices.len());
        let depth = self.vertices[parent.0].depth + 1;
        self.vertices.push(Vertex { parent: Some(parent), children: Vec::new(), depth, root: Some(root), p, dead, removed: false });
        id
    }

    fn remove_subtree(&mut self, id: VertexId) {
        let children = std::mem::take(&mut self.vertices[id.0].children);
        for c in children {
            self.remove_subtree(c);
        }
        self.vertices[id.0].removed = true;
    }

    /// Copies the subtree below `src` under `dst`.
    fn copy_children(&mut self, src: VertexId, dst: VertexId) {
        let children = self.v(src).children.clone();
        for c in children {
            let v = self.v(c).clone();
            let copy = self.add_vertex(dst, v.root.expect("non-root"), v.p, v.dead);
            self.vertices[dst.0].children.push(copy);
            self.copy_children(c, copy);
        }
    }

    /// Adds one child `u_{k+1} t^w` per tropical point of the extension
    /// polynomial; marks the leaf dead if there is none. Fails with
    /// `NonSplitting` if a `u`-free initial form has roots outside the
    /// residue field.
    pub fn grow(&mut self, id: VertexId) -> Result<()> {
        let poly = self.extension_polynomial(id)?;
        self.grow_with(id, &poly)
    }

    fn grow_with(&mut self, id: VertexId, poly: &UPoly) -> Result<()> {
        self.counters.grow += 1;
        let k = self.v(id).depth;
        let points = newton_polygon(poly)?.tropical_points();
        // a u-free initial form must split for its point to be realized over K
        for w in &points {
            if let Some(h) = poly.initial_form(w)?.to_residue_poly() {
                h.roots_in_units()?;
            }
        }
        if points.is_empty() {
            self.vertices[id.0].dead = true;
        }
        for w in points {
            let child = self.add_vertex(id, ApproxRoot::fresh(k, w), Rat::zero(), false);
            self.vertices[id.0].children.push(child);
        }
        Ok(())
    }

    /// Refines the root at the first branch vertex lagging behind `v_1` in
    /// precision, or raises the precision of `v_1` itself.
    pub fn reinforce(&mut self, id: VertexId) -> Result<()> {
        self.reinforce_observed(id, &mut |_| {})
    }

    fn reinforce_observed(&mut self, id: VertexId, observer: &mut dyn FnMut(&TreeEvent<'_>)) -> Result<()> {
        self.counters.reinforce += 1;
        let branch = self.branch(id);
        assert!(!branch.is_empty(), "reinforcement at the root vertex");
        let p1 = self.v(branch[0]).p.clone();
        let l = (1..branch.len()).find(|&j| self.v(branch[j]).p < p1).unwrap_or(0);
        let vl = branch[l];
        let (new_p, target) = if l == 0 {
            let new_p = &p1 + &self.p_step;
            if new_p > self.p_max {
                return Err(Error::PrecisionLimitExceeded { requested: new_p.to_string(), limit: self.p_max.to_string() });
            }
            (new_p.clone(), new_p)
        } else {
            (p1, self.p_max.clone())
        };

        let root = self.v(vl).root.clone().expect("non-root");
        let refined = match root.tail_exponent() {
            None => vec![root.clone()],
            Some(w_r) => {
                let poly = self.reinforcement_polynomial(vl)?;
                let polygon = newton_polygon(&poly)?;
                observer(&TreeEvent::Reinforcement { vertex: vl, poly: &poly, polygon: &polygon });
                if polygon.tropical_points().contains(w_r) {
                    let w0 = root.valuation().expect("uncertain roots have a valuation");
                    let budget = &target - (w_r - &w0);
                    puiseux_expansion_with(&poly, w_r, &budget, root.known(), &self.config, None)?
                } else {
                    Vec::new()
                }
            }
        };

        self.vertices[vl.0].p = new_p.clone();
        if refined.len() == 1 && refined[0] == root {
            return Ok(());
        }
        let parent = self.v(vl).parent.expect("non-root");
        let position = self.v(parent).children.iter().position(|c| *c == vl).expect("child of its parent");
        let mut copies = Vec::with_capacity(refined.len());
        for r in refined {
            let copy = self.add_vertex(parent, r, new_p.clone(), false);
            self.copy_children(vl, copy);
            copies.push(copy);
        }
        self.remove_subtree(vl);
        let siblings = &mut self.vertices[parent.0].children;
        siblings.splice(position..=position, copies);
        if siblings.is_empty() {
            self.vertices[parent.0].dead = true;
        }
        Ok(())
    }

    /// The next leaf to process: deepest first, then oldest.
    fn next_leaf(&self) -> Option<VertexId> {
        let n = self.system.len();
        self.vertices_dfs()
            .into_iter()
            .filter(|&id| {
                let v = self.v(id);
                v.children.is_empty() && !v.dead && v.depth < n
            })
            .max_by(|a, b| self.v(*a).depth.cmp(&self.v(*b).depth).then_with(|| b.0.cmp(&a.0)))
    }

    /// Runs one grow or reinforce step; returns false once every branch is
    /// complete or dead.
    pub fn step(&mut self, observer: &mut dyn FnMut(&TreeEvent<'_>)) -> Result<bool> {
        let Some(leaf) = self.next_leaf() else {
            return Ok(false);
        };
        let result = (|| {
            let poly = self.extension_polynomial(leaf)?;
            let polygon = newton_polygon(&poly)?;
            let unique = is_unique(&poly)?;
            observer(&TreeEvent::Extension { vertex: leaf, poly: &poly, polygon: &polygon, unique });
            if unique {
                self.grow_with(leaf, &poly)
            } else {
                self.reinforce_observed(leaf, observer)
            }
        })();
        result.map_err(|e| Error::OnBranch { branch: self.describe_branch(leaf), source: Box::new(e) })?;
        debug_assert!(self.check_invariants().is_ok(), "{:?}", self.check_invariants());
        Ok(true)
    }

    pub fn run(&mut self) -> Result<()> {
        self.run_with(&mut |_| {})
    }

    pub fn run_with(&mut self, observer: &mut dyn FnMut(&TreeEvent<'_>)) -> Result<()> {
        while self.step(observer)? {}
        Ok(())
    }

    /// Valuation vectors of full branches in depth-first order, without
    /// duplicates.
    pub fn tropical_points(&self) -> Vec<TropPoint> {
        let n = self.system.len();
        let mut out: Vec<TropPoint> = Vec::new();
        for id in self.vertices_dfs() {
            let v = self.v(id);
            if v.depth != n || v.dead {
                continue;
            }
            let point = TropPoint(
                self.branch_roots(id)
                    .iter()
                    .map(|r| r.valuation().expect("roots on branches are nonzero"))
                    .collect(),
            );
            if !out.contains(&point) {
                out.push(point);
            }
        }
        out
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.system.len();
        let mut seen = vec![false; self.vertices.len()];
        for id in self.vertices_dfs() {
            if std::mem::replace(&mut seen[id.0], true) {
                return Err(format!("vertex {id} reached twice"));
            }
            let v = self.v(id);
            if v.depth > n {
                return Err(format!("vertex {id} deeper than {n}"));
            }
            for c in &v.children {
                let child = self.v(*c);
                if child.parent != Some(id) || child.depth != v.depth + 1 {
                    return Err(format!("vertex {c} has inconsistent parent link"));
                }
            }
            if id == Self::ROOT {
                continue;
            }
            let root = v.root.as_ref().ok_or_else(|| format!("vertex {id} has no root"))?;
            if root.coord() + 1 != v.depth {
                return Err(format!("vertex {id} carries a root for x{}", root.coord() + 1));
            }
            let branch = self.branch(id);
            if v.p > self.v(branch[0]).p {
                return Err(format!("vertex {id} has precision above its branch head"));
            }
            if v.p.is_negative() {
                return Err(format!("vertex {id} has negative precision"));
            }
        }
        Ok(())
    }
}

/// Tropical points of the ideal generated by a triangular system.
pub fn trop_triangular(system: &TriangularSystem, p_step: &Rat, p_max: &Rat) -> Result<Vec<TropPoint>> {
    let mut tree = RootTree::starting_tree(system.clone(), p_step.clone(), p_max.clone())?;
    tree.run()?;
    Ok(tree.tropical_points())
}

/// `x_k - root` as a polynomial in `x_1..x_n`; convenient for building
/// systems with prescribed solutions.
pub fn linear_factor(nvars: usize, k: usize, field: ResidueField, root: &MPoly) -> MPoly {
    &MPoly::var(nvars, k, field) - root
}

/// Scalar `c` as a constant polynomial in `nvars` variables.
pub fn scalar(nvars: usize, c: PuiseuxScalar) -> MPoly {
    MPoly::constant(nvars, c)
}
