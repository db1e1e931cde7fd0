//! Evaluation toolkit for forced alignments of language documentation corpora.
//!
//! The crate is organised around one pipeline: Praat TextGrids and WAV audio
//! come in ([`textgrid`], [`audio`]), transcripts are normalised for aligner
//! training ([`corpus`], [`g2p`], [`inventory`]), aligner output is compared
//! against human annotation ([`boundary`], [`vowel`]), and the results are
//! rendered as figures and tables ([`report`]).

pub mod audio;
pub mod boundary;
pub mod corpus;
pub mod diagnostics;
pub mod g2p;
pub mod inventory;
pub mod report;
pub mod textgrid;
pub mod vowel;

pub use diagnostics::{Diagnostic, Diagnostics, Severity};
