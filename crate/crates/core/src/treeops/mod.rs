//! Structural transforms: binarization, constituent → dependency conversion
//! and per-EDU structural measurements.

mod binarize;
mod depconv;
mod profile;

pub use binarize::binarize;
pub use depconv::to_dependencies;
pub use profile::{structural_profile, StructuralProfile, SubordStrategy, SyntaxLayer, SyntaxToken};
