//! Differentiable FMCW radar ray tracing and inverse scene fitting.
//!
//! The crate simulates how a frequency-modulated continuous-wave radar
//! observes a parameterized 3D scene, and — the part that makes the
//! simulation *invertible* — computes analytic derivatives of the radar
//! observables with respect to the scene parameters so the scene can be
//! recovered from measured range profiles by gradient descent.
//!
//! ## Pipeline
//!
//! ```text
//! θ (pose / shape / material)
//!   │  geometry: apply_params, vertex Jacobians
//!   ▼
//! world mesh ──► tracer: image-method specular paths (τ, α, φ) per rx
//!   │
//!   ├─► radar: IF signal → windowed DFT range profile   (exact)
//!   ├─► radar: Gaussian-kernel range surrogate          (smooth, for optimization)
//!   ├─► radar: array snapshots → beamforming / MUSIC / Airy spectra
//!   ▼
//! gradients: interior path Jacobians + silhouette-edge boundary term
//!   ▼
//! optimize: multiscale MSE, regularized SGD, fit loop
//! ```
//!
//! The exact range profile is faithful but wavelength-periodic in the
//! scene parameters; the surrogate decouples the carrier phase from the
//! delay so the optimization landscape has a single basin. Both maps come
//! with closed-form per-tap partial derivatives.

pub mod error;
pub mod geometry;
pub mod gradients;
pub mod io;
pub mod math;
pub mod optimize;
pub mod radar;
pub mod tracer;

pub use error::{Error, Result};
