pub mod caratheodory;
pub mod bounds;
pub mod convexity;
pub mod error;
pub mod exec;
pub mod interval;
pub mod pointmass1d;
pub mod rational;
