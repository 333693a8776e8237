//! Desk-scale laboratory for redacting regions of sample space from
//! pre-trained GANs.
//!
//! The crate has two tiers. The exact tier works on finite supports where the
//! label-smoothed minimax objective can be evaluated and optimized to machine
//! precision: [`divergence`] holds the convex-analysis machinery, [`exact`]
//! the closed-form optimal discriminator and a simplex minimax solver that
//! recovers the restricted data distribution. The neural tier is a toy
//! MLP GAN with manual backpropagation ([`nn`], [`gan`]) on which the three
//! redaction algorithms ([`redaction`]) and the evaluation metrics
//! ([`evaluation`]) run end to end. [`dynamics`] studies the per-round decay
//! of invalid mass under a query budget, and [`distributions`] holds the
//! shared distribution primitives plus the deletion-vs-redaction contrast.

pub mod distributions;
pub mod divergence;
pub mod dynamics;
pub mod error;
pub mod evaluation;
pub mod exact;
pub mod gan;
pub mod nn;
pub mod redaction;

pub use error::{Error, Result};
