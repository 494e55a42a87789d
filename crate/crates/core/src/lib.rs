//! Exact computations with quantale-enriched categories and groups on finite
//! carriers.
//!
//! A quantale `V` ([`quantale`]) supplies truth values; V-relations and
//! V-categories ([`vrel`]) are matrices over it. Finite groups ([`group`])
//! equipped with a shift-invariant V-category structure are V-groups
//! ([`vgroup`]), stored through the profile `δ(x) = a(0, x)`. The [`laws`]
//! module runs exhaustive and sampled checks of structural theorems about
//! these objects and reports the outcome as [`report::LawReport`]s.
//!
//! All arithmetic is exact. Iteration bounds are explicit and exceeding them
//! is an error rather than a silent truncation.

pub mod group;
pub mod io;
pub mod laws;
pub mod num;
pub mod par;
pub mod quantale;
pub mod report;
pub mod vgroup;
pub mod vrel;

pub use group::FiniteGroup;
pub use quantale::{Quantale, QuantaleSpec, Value};
pub use report::{LawReport, Status};
pub use vgroup::{VGroup, VGroupHom};
pub use vrel::{VCategory, VRel};
