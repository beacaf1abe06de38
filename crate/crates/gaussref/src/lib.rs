//! Disk formats and command line for [`gaussref_core`].
//!
//! Meshes are OBJ, cameras a small stanza format, images PNG or PPM, and
//! sequences a manifest naming one mesh and one image per camera for every
//! frame. Every file this crate writes goes through a temporary file and
//! a rename, so an interrupted run never leaves a partial output behind.

pub mod calib;
pub mod cli;
pub mod config;
pub mod error;
pub mod fsutil;
pub mod imageio;
pub mod manifest;
pub mod obj;
pub mod tables;

pub use error::{Error, Result};
