//! Mining toolkit for software-development screencasts.
//!
//! * [`detect`] scores videos by the similarity of consecutive sampled frames
//!   and ranks likely development screencasts first.
//! * [`topics`] fits LDA over titles or transcripts, ranks topic terms by
//!   relevance and lays topics out on an intertopic distance map.
//! * [`doclink`] ranks API reference pages against a transcript by TF-IDF
//!   cosine and evaluates the ranking against relevance judgments.
//!
//! [`corpus`] loads the inputs and [`vectorspace`] holds the bag-of-words
//! vectors and similarity measures everything else is built on.

pub mod cli;
pub mod corpus;
pub mod detect;
pub mod doclink;
pub mod error;
pub mod topics;
pub mod vectorspace;

pub use error::{Error, Result};
