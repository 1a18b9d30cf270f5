//! Maps, products, submanifolds and the conormal algebroid.

pub mod conormal;
pub mod maps;
pub mod relations;
pub mod submanifold;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::symexpr::SymError;

pub use conormal::{conormal_algebroid, ConormalAlgebroid, FiberAlgebra};
pub use maps::{
    are_f_related, is_kv_map, kv_map_residual, poisson_map_residual, product_kv, pullback,
    relatedness_defect, tangent_map, theorem1_equivalences, AffineMap, ProductSign,
    ProductStructure, Theorem1Report,
};
pub use relations::{graph_check, preimage_transversal, GraphReport, PreimageReport};
pub use submanifold::{
    adapted_blocks, adapted_frame, coordinate_subspace, intersect, is_coisotropic,
    is_kv_submanifold, is_transversal, leaf_openness_check, AdaptedFrame, AffineSubmanifold,
    CoisotropicReport, KvSubmanifoldReport, LeafPoint, TransversalReport, Transversality,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("basis of `{0}` is not linearly independent")]
    DegenerateBasis(String),
    #[error("submanifold `{0}` is not coisotropic")]
    NotCoisotropic(String),
    #[error("conormal product of `{0}` leaves the conormal bundle")]
    ClosureFailure(String),
    #[error("submanifold `{0}` is not transversal")]
    NotTransverse(String),
    #[error("preimage is empty")]
    EmptyPreimage,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

pub type Result<T> = std::result::Result<T, StructureError>;
