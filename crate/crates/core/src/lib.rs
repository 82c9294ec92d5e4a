//! Graph-regularized nonnegative matrix factorization with an ℓ2,0 row budget.
//!
//! Solves
//!
//! ```text
//! min  ½‖X − WH‖²_F + λ·Tr(H L Hᵀ)
//! s.t. W ≥ 0, at most k nonzero rows in W, H ≥ 0
//! ```
//!
//! by proximal alternating linearized minimization ([`solver::Algorithm::Palm`])
//! or its extrapolated variant with adaptive momentum
//! ([`solver::Algorithm::AccPalm`]).
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches
//! files, clocks or the command line lives in the companion `gnmf` crate.
//!
//! ```
//! use gnmf_core::{datagen, graph::GraphModel, objective::ProblemSpec, solver};
//!
//! let (x, _labels) = datagen::generate_synthetic(&datagen::SyntheticSpec::default());
//! let adjacency = datagen::generate_block_adjacency(
//!     &datagen::BlockAdjacencySpec::for_blocks(vec![50, 50, 50]),
//! ).unwrap();
//! let graph = GraphModel::from_adjacency(adjacency).unwrap();
//! let spec = ProblemSpec::new(x, 3, 17, 1.0, graph).unwrap();
//! let out = solver::solve(&spec, &solver::SolverConfig::default()).unwrap();
//! assert!(out.trace.records.len() <= 1000);
//! ```
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod datagen;
mod error;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod objective;
pub mod prox;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
