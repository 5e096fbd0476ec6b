//! Test path generation for web navigation models.
//!
//! A navigation model (XML, a guard-annotated graph DSL, or recorded
//! Selenese scripts) is lowered to a weighted multidigraph. Leaf pages get
//! reset links back to home, an optimal directed Chinese Postman tour is
//! computed and cut into test paths, and every path becomes a data-driven
//! test plan that can be replayed against a simulated system under test.
//!
//! Graph algorithms are generic over the weight type ([`scalar::Weight`]);
//! the aliases below fix it to exact rationals, which is what the rest of
//! the pipeline uses.

pub mod bench;
pub mod cpp;
pub mod fixtures;
pub mod html;
pub mod locator;
pub mod models;
pub mod navgraph;
pub mod pathalg;
pub mod scalar;
pub mod sutsim;
pub mod testgen;

pub use scalar::{Rational, Weight};

/// Navigation graph with exact rational weights.
pub type Graph = navgraph::Multidigraph<Rational>;
/// Navigation graph with floating point weights.
pub type GraphF64 = navgraph::Multidigraph<f64>;
pub type GraphPath = navgraph::Path<Rational>;
pub type Solution = cpp::CppSolution<Rational>;
