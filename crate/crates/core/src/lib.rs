//! Wythoffian polytopes from decorated Coxeter diagrams: the reflection
//! group, the face lattice built from `{0,1,2}` decorations, coordinates,
//! and a ruled regularity test.

pub mod decoration;
pub mod diagram;
pub mod geometry;
pub mod group;
pub mod lattice;
pub mod regular;

pub use decoration::{Decoration012, DecorationError};
pub use diagram::{DecoratedDiagram, DiagramError, FamilyTag, Mark, NodeSet};
pub use geometry::{realize, wythoff_point, GeometryError, Realization};
pub use group::{Group, GroupError};
pub use lattice::{f_vector_formula, FaceLattice, LatticeError};
pub use regular::{classify, is_regular_oracle, is_regular_ruled, PolytopeKind, RegularError, RegularVerdict};
