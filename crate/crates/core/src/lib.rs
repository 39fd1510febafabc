//! Sentiment workbench: a reproducible text-classification pipeline for
//! labeled tweet corpora.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! * [`corpus`] loads, balances and splits labeled documents,
//! * [`preprocess`] turns raw text into lowercase alphabetic tokens,
//! * [`features`] fits bag-of-words, TF-IDF, skip-gram and external
//!   embedding encoders and concatenates them,
//! * [`models`] trains logistic regression, linear SVM, CART trees and
//!   random forests from scratch,
//! * [`eval`] computes weighted accuracy/precision/recall/F1 and renders
//!   results tables.
//!
//! [`experiment`] wires everything into a seeded encoder × model grid.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod models;
pub mod preprocess;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
