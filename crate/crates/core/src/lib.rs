//! Multi-view surface refinement with Gaussian photo-consistency.
//!
//! A coarse mesh is turned into a set of colored 3D surface Gaussians, the
//! input frames into 2D image Gaussians over color-coherent quad-tree
//! patches, and each surface Gaussian is displaced along its fixed vertex
//! normal so that the color-weighted overlap of the projected model with
//! the images is maximal. The overlap has a closed form, which makes both
//! the energy and its derivative with respect to every displacement cheap
//! to evaluate exactly.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature. File formats, images on disk and the command line live
//! in the companion `gaussref` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod camera;
pub mod checks;
pub mod color;
pub mod energy;
pub mod image;
pub mod math;
pub mod mesh;
mod par;
pub mod quadtree;
pub mod raster;
pub mod solver;
pub mod surface;
pub mod synth;
pub mod visibility;

pub use camera::{CameraError, CameraSpec};
pub use color::{color_distance, hsv_to_rgb, rgb_to_hsv, Hsv, HueMetric, Rgb};
pub use energy::{EnergyError, EnergyModel, EnergyParams, EnergyReport, Evaluation, NeighborGraph, OverlapForm};
pub use image::RgbImage;
pub use mesh::{Mesh, MeshError};
pub use quadtree::{decompose_image, ImageGaussian, ImageGaussianIndex, QuadTreeParams};
pub use solver::{
    ascend, refine_frame, refine_sequence, FrameInput, FrameResult, FrameSource, PipelineError, RefinementReport,
    RunParams, SolverConfig, SolverError,
};
pub use surface::{ProjectedGaussian, SurfaceError, SurfaceGaussian};
pub use visibility::VisibilityMask;
