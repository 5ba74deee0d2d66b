//! Foveated visual clutter.
//!
//! Dense clutter maps (Feature Congestion, Edge Density, Subband Energy) are
//! pooled through a log-polar peripheral architecture centred on a fixation.
//! The pooled and unpooled maps are compared around a target to obtain the
//! peripheral integration coefficient, which scales the global clutter score.

pub mod congestion;
pub mod error;
pub mod export;
pub mod foveation;
pub mod imagecore;
pub mod models;
pub mod peripheral;
pub mod roi;
pub mod stats;
pub mod sweep;
pub mod synth;

pub use error::{ClutterError, Result, RowIssue};
