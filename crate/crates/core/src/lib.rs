pub mod error;
pub mod funcexpr;
pub mod norms;
pub mod modelspace;
pub mod quotient;
pub mod extremal;
pub mod cli;
