pub mod app;
pub mod bounds;
pub mod lattice;
pub mod repdata;
pub mod slnreduce;
pub mod specproj;
pub mod torus;
pub mod verify;
