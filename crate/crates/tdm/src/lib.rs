//! Toolchain for the TDM textual variability language.
//!
//! A `.tdm` source mixes a feature model (typed features with value domains,
//! requires/excludes control rules, named configuration specs) with a product
//! model (class interfaces, guarded members, and candidate implementations).
//! The pipeline is: [`parser::parse_model`] -> [`check::check`] ->
//! [`engine`] (enumeration, counting, dead-value detection) ->
//! [`release`] (implementation selection and manifest emission).

pub mod check;
pub mod diag;
pub mod engine;
pub mod lexer;
pub mod model;
pub mod parser;
pub mod printer;
pub mod release;
pub mod span;
