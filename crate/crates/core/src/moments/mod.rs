//! Moment words, operator algebras, data sources and the template compiler
//! that turns a string set into a partially specified moment matrix.

mod algebra;
mod source;
mod template;
mod words;

pub use algebra::{AliceAlgebra, BobAlgebra};
pub use source::{AssemblageSource, GaussianSource, MomentSource, StateSource, TrueModel};
pub use template::{
    BobPoly, CanonicalUnknown, Classification, EntryExpansion, MomentTemplate, ObservabilityPolicy,
    TemplateExport,
};
pub use words::{
    custom_string_set, gaussian_set, generate_level, generate_level_with, noon_set,
    stratum_size_unsorted, werner_set, AliceWord, Level, MomentWord, StringSet,
};
