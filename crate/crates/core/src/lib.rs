//! Exact tropical points of zero-dimensional triangular polynomial systems
//! over finite Puiseux series, computed with symbolic uncertainty variables
//! standing in for unknown tails of roots.

pub mod error;
pub mod expansion;
pub mod mpoly;
pub mod parse;
pub mod polygon;
pub mod puiseux;
pub mod residue;
pub mod root_tree;
pub mod upoly;

pub use error::{Error, Result};
pub use expansion::{has_maximal_precision, is_approximate_root, puiseux_expansion, ApproxRoot, Tail};
pub use mpoly::MPoly;
pub use parse::{format_system, parse_system};
pub use polygon::{is_unique, newton_polygon, uniqueness_oracle, Polygon};
pub use puiseux::{PuiseuxScalar, Rat};
pub use residue::{ResidueElem, ResidueField, ResiduePoly};
pub use root_tree::{trop_triangular, RootTree, TriangularSystem, TropPoint, VertexId};
pub use upoly::{UCoeff, UMonomial, UPoly};
