//! Nash equilibria for reciprocally bilinear games.

pub mod algorithms;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod game;
pub mod lcp;
pub mod lp;
pub mod models;
pub mod numerics;
pub mod poly;

pub use error::{Error, Result};
