//! Orbit functions and orthogonal polynomials of compact simple Lie groups of rank at most three.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`] holds root-system data (Cartan matrices, marks, level vectors), Weyl reflections,
//!   orbit generation with reflection parity, and congruence classes.
//! * [`orbit`] evaluates C-functions, S-functions and irreducible characters at points of the
//!   torus.
//! * [`grid`] builds the lattice fragments `F_M` / interior `F~_M` of the fundamental region and
//!   checks discrete orthogonality through Gram matrices.
//! * [`poly`] is exact sparse multivariate polynomial arithmetic with the level-vector monomial
//!   order.
//! * [`family`] constructs the C- and S-polynomial families from orbit products, weight
//!   multiplicities, the `x -> u` substitution and its Jacobian weight polynomial.
//! * [`branching`] reduces polynomials of a group to polynomials of its maximal semisimple
//!   subgroups.
//!
//! Data-parallel loops (Gram accumulation, multiplicity projection) run on rayon when the
//! `parallel` feature is enabled; every such entry point also takes an [`Execution`] so the
//! sequential path stays available.

pub mod branching;
pub mod error;
pub mod exec;
pub mod family;
pub mod grid;
pub mod group;
pub mod orbit;
pub mod poly;

pub use error::{Error, Result};
pub use exec::Execution;
pub use group::{GroupData, GroupId, SimpleType, Weight, WeylOrbit};
pub use poly::{LevelOrder, Monomial, MultiPoly};
