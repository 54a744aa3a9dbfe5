//! Exact, machine-level experiments on algorithmic complexity.
//!
//! Everything is measured on one small reference machine ([`bitvm`]): exact
//! complexities of short strings by exhaustive search ([`searcher`]), the
//! counting argument behind "a program that outputs something more complex
//! than itself" and its resolution ([`paradox`]), subadditivity of joint
//! complexity ([`joint`]), and the contrast between statistical randomness
//! and algorithmic simplicity in Champernowne-style sequences
//! ([`champernowne`]).

pub mod bits;
pub mod bitvm;
pub mod searcher;
pub mod paradox;
pub mod joint;
pub mod champernowne;
pub mod cli;
