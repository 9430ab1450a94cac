//! Exact-arithmetic toolkit for cospectral multiple coalescences.
//!
//! A coalescence spec picks root vertices of a host graph and a multiplicity
//! for each; attaching any rooted graph at those roots yields a coalescence.
//! Two specs with the same multiplicity signature produce cospectral
//! coalescences for every choice of attached graph exactly when their
//! Hosoya vectors agree, which reduces the search for such pairs to exact
//! polynomial arithmetic on vertex-deleted characteristic polynomials.
//!
//! The crate provides the polynomial and graph primitives ([`poly`],
//! [`sympoly`], [`graph`], [`charpoly`]), coalescence assembly and the
//! symbolic expansion of a spec ([`coalescence`]), the cospectrality
//! criteria ([`cospectral`]), an exhaustive fingerprint-accelerated search
//! over signatures and selections ([`search`]), a constructive infinite
//! family of matching path specs ([`families`]), generation of small test
//! graphs ([`gen`]), and file formats for pipelines ([`report`]).

pub mod charpoly;
pub mod coalescence;
pub mod cospectral;
mod deletions;
pub mod families;
pub mod gen;
pub mod graph;
pub mod poly;
pub mod report;
pub mod search;
pub mod sympoly;
