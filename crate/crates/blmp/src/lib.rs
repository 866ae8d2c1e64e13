//! Solution families of the (2+1)-dimensional Boiti-Leon-Manna-Pempinelli
//! equation and its N=1 supersymmetric extension, with numerical
//! verification by exact-derivative substitution.
//!
//! The crate is organized bottom-up:
//!
//! * [`jet`]: truncated Taylor jets in (x, y, t), the derivative engine
//! * [`grassmann`]: finite-dimensional Grassmann algebra with jet
//!   coefficients
//! * [`superfield`]: superspace values `a + theta b` and the covariant
//!   derivatives D_x, D_y
//! * [`hirota`]: classical and super Hirota bilinear operators
//! * [`bell`]: super Bell polynomials and their binary variants
//! * [`funcs`]: the registered library for the free functions q(y), m(y)
//! * [`solutions`]: the classical solution families
//! * [`residual`]: sampled residual verification of the governing
//!   equations
//! * [`susy`]: supersymmetric solutions and structure checks
//! * [`backlund`]: the bilinear Backlund transformation
//! * [`cli`]: the command-line front end
//! * [`descriptor`]: serializable descriptors for the CLI

pub mod backlund;
pub mod cli;
pub mod bell;
pub mod descriptor;
pub mod error;
pub mod funcs;
pub mod grassmann;
pub mod hirota;
pub mod jet;
pub mod residual;
pub mod solutions;
pub mod superfield;
pub mod susy;

pub use error::{Error, Result};

/// Entry point used by the `blmp` binary; returns the process exit code.
pub fn cli_main() -> i32 {
    cli::main_from_env()
}
