//! Topological gait signatures.
//!
//! A sequence of binary silhouettes is stacked into a 3D binary image, whose
//! cubical complex yields a triangulated boundary surface. That surface is
//! filtered by distance to eight reference planes; the dimension 0 and 1
//! barcodes of each filtration are sampled in windows to form sixteen
//! integer vectors, and two gait sequences are compared by the angles
//! between corresponding vectors.
//!
//! ```
//! use gaitsig::silhouette::{stack, BitGrid, StackOptions};
//! use gaitsig::signature::{gait_signature, angle_distance, SignatureConfig};
//!
//! let frame = BitGrid::from_ascii(&["###.", "###.", "###.", "...."]).unwrap();
//! let image = stack(&[frame.clone(), frame.clone(), frame], &StackOptions::full_body()).unwrap();
//! let surface = gaitsig::complex::surface_of(&image).unwrap();
//! let sig = gait_signature(&surface, &SignatureConfig::default()).unwrap();
//! assert_eq!(sig.vectors().len(), 16);
//! assert_eq!(angle_distance(&sig, &sig).unwrap(), 0.0);
//! ```

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod complex;
pub mod error;
pub mod filtration;
pub mod gallery;
pub mod persistence;
pub mod pipeline;
pub mod pnm;
pub mod signature;
pub mod silhouette;
pub mod synthlab;

pub use error::{Error, Result};
