//! Exact symbolic computation in the quantized enveloping algebra
//! `U_q(sl4+)`, its Cauchon localization tower and the associated
//! quantum torus.
//!
//! The crate is organized as:
//! - [`field`]: the coefficient field `K = Q(q)` with canonical forms;
//! - [`torus`]: quantum torus arithmetic, center, derivation splitting;
//! - [`ore`]: generic normal ordering for iterated Ore extensions;
//! - [`model`]: the concrete `U_q(sl4+)` instantiation and basis changes;
//! - [`deriv`]: derivations of `U_q(sl4+)` and their full decomposition;
//! - [`expr`]: the expression grammar and evaluation;
//! - [`doc`]: bit-exact serialization of elements and presentations;
//! - [`verify`]: the batch identity-verification suite.

pub mod deriv;
pub mod doc;
pub mod expr;
pub mod field;
pub mod model;
pub mod ore;
pub mod torus;
pub mod verify;

pub use deriv::{Decomposition, DerivError, DerivationSpec};
pub use doc::DocError;
pub use expr::{Ast, EvalContext, ExprError, Value};
pub use field::{FieldError, LaurentPoly, QElem, Rat};
pub use model::{AlgebraElement, Automorphism, DeltaPoly, Level, ModelError, UqModel, ZPoly};
pub use ore::{OreError, OrePresentation, OreRelation, PBWElement};
pub use torus::{
    LambdaMatrix, QuantumTorus, TorusDecomposition, TorusDerivation, TorusElement, TorusError,
};
pub use verify::{run_suite, VerifyOptions, VerifyReport};
