//! Verification of Q-Gorenstein smoothing constructions: curve
//! configurations on a surface, blow-ups, class T chains, and the invariants
//! of the contracted surface and its smoothing.

pub mod blowup;
pub mod config;
pub mod corpus;
pub mod exec;
pub mod fibration;
pub mod ratlin;
pub mod smoothing;
pub mod wahl;

mod ser;
