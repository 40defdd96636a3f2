//! Mixing-based augmentation for wireless point-cloud datasets.
//!
//! Frames are turned into simulated range profiles, mixed at the profile
//! level and turned back into points. See [`mixer::mix_frames`] for a single
//! pair, [`augment::augment`] for a whole dataset and [`uda::run_uda`] for the
//! self-training loop.

pub mod augment;
pub mod bench;
pub mod frames;
pub mod mixer;
pub mod profile;
pub mod seed;
pub mod uda;
