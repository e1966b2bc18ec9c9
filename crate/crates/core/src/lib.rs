//! Exact arithmetic model of CM points on the modular tower at a finite level
//! `N`, together with the level-`N` shadows of the Galois action on them.
//!
//! Modules, bottom-up: [`numth`], [`qforms`], [`adele`], [`shimura`],
//! [`galois`], [`tori`], [`approx`], and the [`cli`] front end.

pub mod error;
pub mod numth;
pub mod qforms;
pub mod adele;
pub mod shimura;
pub mod galois;
pub mod tori;
pub mod approx;
pub mod cli;

pub use error::{Error, Result};
