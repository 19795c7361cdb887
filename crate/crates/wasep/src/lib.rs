//! Simulation and analysis toolkit for the boundary-driven weakly asymmetric
//! simple exclusion process and its macroscopic fluctuation limits.

pub mod harness;
pub mod lattice;
pub mod observables;
pub mod spde;
pub mod spectral;
