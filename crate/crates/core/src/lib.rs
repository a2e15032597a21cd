pub mod counters;
pub mod oracle;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod quadtree;
pub mod range2d;
pub mod range3d;
pub mod reporter;
pub mod smallset;
pub mod stabbing;

pub use counters::Counters;
pub use error::{Error, Result};
pub use geometry::{AspectBound, Box3, Point2, Point3, Rect2, Universe};
