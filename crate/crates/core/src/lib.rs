//! Exact machinery for counting empty convex pentagons (5-holes) in planar
//! point sets: predicates, hole enumeration, line-divided sets and their
//! wedges, abstract order types given by signature functions, exhaustive
//! lemma verification, hole statistics, witness constructions, and the
//! island partition used to lift local 5-holes to global counts.

pub mod analytics;
pub mod chirotope;
pub mod constructions;
pub mod divided;
pub mod enumerate;
pub mod error;
pub mod geometry;
pub mod holes;
pub mod partition;
pub mod signature;
pub mod verifier;

pub use chirotope::{Chirotope, OrientationTable};
pub use error::{Error, Result};
pub use geometry::{
    collinear_triple, enumerate_k_holes, is_general_position, is_k_hole, orientation, shear_to_distinct_x, HoleSet,
    Orientation, Point, PointSet, Rational,
};
pub use enumerate::{EnumerationOptions, SearchStats, SignatureSearch};
pub use holes::HoleIndex;
pub use signature::{admissible_patterns, signature_k_holes, signature_of, PartialSignature, Signature};
pub use divided::{divide, enumerate_divided_k_holes, wedge_decomposition, Apex, DividedSet, WedgeDecomposition};
pub use verifier::{run_lemma, LemmaSpec, RunOptions, VerificationReport, Verdict};
pub use analytics::{census, garcia_audit, generated_3_holes, generated_4_holes, min_holes_corpus, min_holes_signatures, HoleCensus, MinHolesReport};
pub use constructions::{construct_carrot, construct_horton, harborth_witness};
pub use partition::{balanced_halfplane, lower_bound_account, partition_islands, HoleAccount, IslandPartition};
