//! Exact decision procedures for simultaneous orthogonalization of finite
//! families of symmetric bilinear forms over ℚ, GF(p) and ℚ(t), with
//! certificates, plus computable ultraproduct and standard-part models.

// Verification errors carry exact witness scalars; they are cold paths.
#![allow(clippy::result_large_err)]

pub mod field;
pub mod forms;
pub mod linalg;
pub mod family;
pub mod operators;
pub mod pipeline;
pub mod hyperreal;
pub mod ultrafilter;
pub mod io;
pub mod oracle;
