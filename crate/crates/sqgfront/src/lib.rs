pub mod cli;
pub mod config;
pub mod dispersion;
pub mod evolution;
pub mod manifest;
pub mod nonlinearity;
pub mod paraproduct;
pub mod snapshot;
pub mod spectral;
