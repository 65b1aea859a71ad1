//! Grushko decompositions of finite graphs of finitely generated free groups.

pub mod automorphism;
pub mod cli;
pub mod decompose;
pub mod gersten;
pub mod gog;
pub mod presentation;
pub mod stallings;
pub mod word;

pub use automorphism::{
    factor_automorphism, invert_automorphism, ElementaryAuto, ExtendedPermutation, WhiteheadAuto,
};
pub use decompose::{decompose, is_free, relative_decompose, DecomposeConfig, DecomposeError, Decomposition, Factor};
pub use gersten::{
    detect_visible, gersten_representative, improve_step, is_primitive, ConjClassSequence, GerstenConfig,
    GerstenError, Lexity, VisibleSimplification,
};
pub use gog::{
    apply_conjugation, make_good_bases, reduce, vertex_link, ConjugationData, GogError, GraphOfGroups, Move,
    MoveKind, TerminationMeasure, Violation,
};
pub use presentation::{abelianization, presentation, Abelianization, Presentation};
pub use stallings::{GraphError, GraphSequence, LabeledGraph};
pub use word::{Basis, Endomorphism, Letter, Symbol, Word, WordError};
