//! Weak Galerkin finite element solver for the clamped Reissner-Mindlin plate
//! model on general polygonal meshes, including non-convex cells.
//!
//! The discretization works with weak functions {interior polynomial, edge
//! polynomial} for the transverse displacement and the rotation field. The
//! shear term is assembled from discrete weak gradients against a raised
//! polynomial degree, which removes the rotation stabilizer; only the
//! displacement keeps the classical edge-jump penalty.
//!
//! Pipeline: `mesh` -> `quadrature`/`poly` -> `weakops` (per-cell operator
//! matrices) -> `assembly` (global SPD system) -> `solver` -> `postproc`
//! (projected-exact errors, convergence orders). `experiment` drives
//! refinement sweeps and writes CSV/Markdown tables; `main.rs` is a thin CLI
//! over it.

pub mod assembly;
pub mod error;
pub mod experiment;
pub mod mesh;
pub mod poly;
pub mod postproc;
pub mod quadrature;
pub mod rm_model;
pub mod solver;
pub mod weakops;

pub use error::{Error, Result};
