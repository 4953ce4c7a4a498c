//! Projectivity groups of finite classical polar spaces.

pub mod error;
pub mod gf;
pub mod linalg;
pub mod forms;
pub mod permgrp;
pub mod polar;
pub mod proj;
pub mod verify;

pub use error::{Error, Result};
