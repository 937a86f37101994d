//! Polysemy-over-age analysis of longitudinal child/adult transcript corpora.

pub mod analysis;
pub mod annotation;
pub mod chat;
pub mod lexicon;
pub mod pipeline;
pub mod report;
pub mod stats;
