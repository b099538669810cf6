pub mod allocation;
pub mod centrality;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod model;
pub mod report;
pub mod scenario;
pub mod sdp;
pub mod sets;
pub mod sim;
pub mod wcai;
