//! Bandwidth-guaranteed traffic-engineering routing: algorithms and simulation.
//!
//! The crate models a capacitated directed network ([`net::NetworkGraph`]),
//! five reactive route-selection strategies (MHA, MIRA, RRATE, BGMRA, TEARD)
//! sharing the weight-then-Dijkstra pipeline ([`algo`]), seeded demand
//! generation for static and dynamic scenarios ([`workload`]), and a
//! discrete-event harness that replays a demand trace against an algorithm
//! and reports acceptance ratios and per-demand handling times ([`sim`]).
//!
//! Batch entry points (`sim::compare_algorithms`, `sim::sweep_teard`) run
//! their independent simulations on a rayon pool when the default `parallel`
//! feature is enabled, and sequentially otherwise. A single simulation run is
//! always single-threaded; results are identical either way.

pub mod algo;
pub mod catalog;
pub mod maxflow;
pub mod net;
pub mod report;
pub mod rng;
pub mod sim;
pub mod synthetic;
pub mod time;
pub mod workload;

pub use net::{Demand, IePair, Link, NetworkGraph, Path, Topology};
