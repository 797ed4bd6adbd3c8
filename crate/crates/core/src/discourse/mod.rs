//! Documents, EDUs, constituent trees, dependency graphs and relation taxonomies.

mod dep;
mod dm;
mod relations;
mod text;
mod tree;
mod validate;

pub use dep::{DepGraph, DepNode};
pub use dm::{DmAnnotation, DmStatus, RelationLink};
pub use relations::{Fallback, Normalization, RelationScheme, ROOT, SPAN};
pub use text::{check_partition, tokenize_segments, Boundaries, BoundarySource, Edu, Segmented, Stoplist, Token};
pub use tree::{ChildLink, ConstituentNode, NodeIter, Role, RstTree};
pub use validate::{validate_tree, ValidationReport, Violation};

/// Map a fine-grained label to its class under `scheme`.
pub fn map_label_to_class(label: &str, scheme: &RelationScheme) -> crate::Result<String> {
    scheme.class_of(label)
}
