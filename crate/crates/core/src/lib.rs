//! Synthetic scene pairs, self-play dialogs and metrics for a two-player
//! spot-the-difference game.
//!
//! A questioner and an answerer each see one scene of a pair. The scenes
//! differ in a single object; the questioner asks templated questions until
//! it can point at the object the answerer does not have.

pub mod asim;
pub mod config;
pub mod eval;
pub mod nlg;
pub mod pipeline;
pub mod qsim;
pub mod scene;
pub mod state;
pub mod taxonomy;
pub mod world;

pub use world::World;
