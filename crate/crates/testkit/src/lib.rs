//! Independent reference implementations for cross-checking the solver and
//! the commitment model, plus seeded instance generators.

pub mod enumerate;
pub mod random;
pub mod tableau;
