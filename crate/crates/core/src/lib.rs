//! Mining English-Japanese parallel sentences from web crawls.
//!
//! Stages: rank domains by language balance ([`langstat`]), crawl them
//! ([`crawler`]), read archives ([`ingest`], [`warc`]), extract and segment
//! text ([`extract`]), pair documents ([`docalign`]), align sentences
//! ([`sentalign`]) and score the pairs ([`filter`]).

pub mod corpus;
pub mod crawler;
pub mod docalign;
pub mod extract;
pub mod filter;
pub mod ingest;
pub mod langstat;
pub mod lexicon;
pub mod sentalign;
pub mod synth;
pub mod warc;

pub use corpus::{
    AlignmentBead, BeadKind, DomainLangStats, FilterModel, LangCode, RawDocument, SentencePair, TextDocument,
};
pub use lexicon::Lexicon;
