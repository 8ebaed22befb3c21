pub mod exact;
pub mod group;
pub mod lattice;
pub mod classify;
pub mod factory;
pub mod io;
