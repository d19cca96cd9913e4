//! Computational toolkit for Coxeter presentation complexes.
//!
//! The pipeline builds a finite regular cover of the standard 2-complex of a
//! Coxeter presentation from a permutation quotient, compresses it, extracts
//! its walls and checks them for pathologies, then searches for a wall
//! orientation whose ascending and descending links are nonempty and
//! connected at every vertex. Supporting modules compute the Euler
//! characteristic, separating partition families, the probability bounds that
//! drive the random orientation argument, and combinatorial curvature.

pub mod complex;
pub mod coxeter;
pub mod cover;
pub mod curvature;
pub mod dot;
mod dsu;
pub mod error;
mod interval;
pub mod morse;
pub mod partitions;
pub mod perm;
pub mod probability;
pub mod rational;
pub mod walls;

pub use complex::{CellTag, End, LinkGraph, OneCell, Sign, Step, TwoCell, TwoComplex};
pub use coxeter::{CoxeterDiagram, CoxeterPresentation, Exponent};
pub use cover::{PermutationQuotient, RegularCover, TorsionVerdict};
pub use error::{Error, Result};
pub use morse::{Certificate, CertificateStatus, DirectedSkeleton, WallOrientation};
pub use partitions::{Partition, PartitionFamily};
pub use perm::Perm;
pub use rational::Rational;
pub use walls::{PathologyReport, Wall, WallSet};
