//! Emission and transition probabilities over the network.

pub mod emission;
pub mod routing;
pub mod transition;

pub use emission::emission;
pub use routing::{fragment_gap, min_travel_time, shortest_route, NetPos, Route, ShortestPaths};
pub use transition::{
    diffuse_particle, prior_mean, simulate_transition, smoothed_probabilities, Breadcrumb,
    DiffusionPolicy, ParticleTrace, TransitionEstimate, TransitionParams,
};
