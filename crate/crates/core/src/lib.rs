pub mod collision;
pub mod error;
pub mod motion;
pub mod nn;
pub mod planners;
pub mod robot;
pub mod sampling;
pub mod simplify;
pub mod trace;
pub mod vector;
