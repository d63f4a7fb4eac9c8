//! Construction and verification of graph designs for the five graphs with
//! six vertices and ten edges known as n3, n6, n8, n10 and n13.
//!
//! A *G-design of order n* is a partition of the edge set of the complete
//! graph K_n into copies of G.  This crate provides:
//!
//! * the catalog of all 15 six-vertex ten-edge graphs with their labelled
//!   edge sets and the arithmetic admissibility conditions ([`catalog`]);
//! * a data model for base-block decompositions under piecewise cyclic
//!   development, together with an exact-once edge-coverage verifier
//!   ([`decomp_core`]);
//! * a parser and index for the corpus of transcribed base-block records
//!   ([`corpus`]);
//! * finite fields, MOLS, transversal designs, affine/projective planes,
//!   group divisible designs, truncation and a small GDD search
//!   ([`gdd_engine`]);
//! * Wilson's fundamental construction (point inflation, block replacement,
//!   group filling) and its specialization to resolvable 4-GDDs
//!   ([`wilson`]);
//! * an orchestrator that routes every admissible order to a direct design,
//!   a recipe, or the main parameterized construction ([`spectrum`]);
//! * a mechanical version of the degree-partition counting arguments that
//!   certify the nonexistence exceptions ([`nonexistence`]).
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion CLI
//! crate.  Every design produced by the construction layers is re-verified
//! by exhaustive pair counting before it is returned — verification is the
//! authority everywhere, construction routes are implementation details.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod catalog;
pub mod corpus;
pub mod decomp_core;
pub mod gdd_engine;
pub mod nonexistence;
pub mod spectrum;
pub mod wilson;
