//! Exact computations on the Garcia–Stichtenoth tower over `F_{p^2}` and on
//! its Galois closure: field arithmetic, tower descriptions, a symbolic
//! kernel for the tower function fields, rational point enumeration,
//! ramification and genus formulas, and an identity checker.

pub mod expr;
pub mod field;
pub mod identities;
pub mod kernel;
pub mod points;
pub mod ramification;
pub mod report;
pub mod tower;

pub use expr::Expr;
pub use field::{make_field, FieldCtx, FieldElement, FieldError};
pub use kernel::{RelationSystem, SymbolicElement};
pub use points::{count_split_points, degree_via_fiber, enumerate_fiber, Census, ModelDegree};
pub use ramification::{DegreeExpr, Locus};
pub use report::RunManifest;
pub use tower::{closure_tower, gs_tower, ClosureModel, GeneratorId, TowerSpec, Variant};
