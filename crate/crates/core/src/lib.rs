//! Typed feature structures over finite signatures: parsing, resolvant
//! enumeration, the satisfiability decision, morph witnesses with their finite
//! models, and unification on the resolvant-set representation.
//!
//! ```
//! use tfs_core::{FeatureStructure, Signature, resolve};
//!
//! let sig = Signature::parse(
//!     "type top\ntype t refines top\ntype a refines t\ntype b refines t\nattr f\napprop a f a\n",
//! ).unwrap();
//! let fs = FeatureStructure::parse("root q0\nnode q0 t\nedge q0 f q0\n", &sig).unwrap();
//! assert!(resolve::sat(&fs, &sig));
//! assert_eq!(resolve::res_refined(&fs, &sig).len(), 1);
//! ```

pub mod cli;
pub mod error;
pub mod fstruct;
pub mod interp;
pub mod morph;
pub mod random;
pub mod resolve;
pub mod signature;
mod text;
pub mod unify;

pub use error::{Error, Result};
pub use fstruct::{
    is_resolvant_of, FeatureStructure, Path, ResolvedFeatureStructure, Skeleton, StateId,
};
pub use interp::{FiniteInterpretation, ObjectId};
pub use morph::MorphAutomaton;
pub use resolve::{Assignment, ResolvantSet};
pub use signature::{AttrId, Signature, SignatureBuilder, TypeId};
pub use unify::ConstrainedSkeleton;
