pub mod cables;
pub mod catalog;
pub mod config;
pub mod cube;
pub mod diagram;
pub mod error;
pub mod homfly;
pub mod linalg;
pub mod obstruct;
pub mod seifert;
pub mod table;

mod uf;

pub use error::{Error, Result};
