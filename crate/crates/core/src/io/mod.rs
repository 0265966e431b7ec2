//! Mesh generators, mesh files, configuration and trajectories.

pub mod config;
pub mod generators;
pub mod mesh_file;
pub mod trajectory;
