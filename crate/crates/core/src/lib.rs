//! Exact and numeric laboratory for the Mayer and virial coefficients of a gas with
//! uniformly repulsive pair interaction.
//!
//! Time enters through `η = e^{−2εt}` and `λ = (1 − η)/(2ε)`. Exact work happens in the
//! `2ε = 1` normalization; other ε follow from the rescaling `γ_k(t; ε) = (2ε)^{−k} γ_k(2εt; 1/2)`.

pub mod ring;
pub mod series;
pub mod engines;
pub mod bounds;
pub mod models;
pub mod acceptance;
