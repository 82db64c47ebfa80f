pub mod error;
pub mod matrix;
pub mod word;
pub mod coords;
pub mod classify;
pub mod reconstruct;
pub mod fuzz;
