//! Exact analysis of transportation cost spaces on Laakso and
//! multibranching diamond graphs.
//!
//! The crate constructs the recursive graph families, the orthogonal
//! cycle/cut bases of the Laakso edge space, low-norm and orthogonal
//! projections onto the cycle space with exact l1 operator norms,
//! transportation-cost norms via an exact transportation simplex, quotient
//! norms over the cycle space, the interval-model analysis of diamond
//! graphs, and two small metric spaces whose transportation cost spaces
//! contain isometric copies of l-infinity cubes.
//!
//! ```
//! use std::sync::Arc;
//! use tcs_core::graphs::RecursiveGraph;
//! use tcs_core::projections::{build_pn, operator_l1_norm};
//! use tcs_core::rational::rat_str;
//! use tcs_core::spaces::OrthoBasis;
//!
//! let g = RecursiveGraph::laakso(2, 100_000)?;
//! let basis = Arc::new(OrthoBasis::new(&g)?);
//! let (p, trace) = build_pn(&g, &basis)?;
//! assert_eq!(rat_str(&trace.x[0]), "3/2");
//! let (norm, witness) = operator_l1_norm(&p);
//! assert_eq!(rat_str(&norm), "3/2");
//! assert_eq!(witness, 6); // the lowest edge of sub-copy B
//! # Ok::<(), tcs_core::Error>(())
//! ```

pub mod diamond;
pub mod edgespace;
pub mod embed;
pub mod error;
pub mod flow;
pub mod graphs;
pub mod json;
pub mod lp;
pub mod projections;
pub mod rational;
pub mod spaces;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rat;

/// Default cap on constructed edge counts (CLI `--max-edges`).
pub const DEFAULT_EDGE_CAP: usize = 100_000;
