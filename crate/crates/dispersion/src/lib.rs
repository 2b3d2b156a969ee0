//! Dispersion of point sets: the largest empty axis-parallel box.
//!
//! The dispersion of a finite set `P` in the unit cube `[0,1]^d` is the
//! supremal volume of an axis-parallel box containing no point of `P`; on
//! the torus the boxes may wrap around. Small dispersion is what
//! quasi-Monte Carlo point sets are after, and surprisingly few random
//! points achieve it — the machinery in this crate makes that quantitative
//! at desk scale.
//!
//! What's here:
//!
//! * [`geometry`] — points, boxes, periodic boxes, and their predicates.
//! * [`solver`] — exact dispersion by candidate enumeration (cube and
//!   torus) and a grid-restricted approximation with a proven sandwich.
//! * [`nets`] — cover families for boxes of volume at least `eps`: the
//!   general 1/2-net, a 3/4-net for `d >= 4 ln(1/eps)`, and the 1/2-dinet
//!   whose members only need to catch clamp-adjusted points.
//! * [`sampler`] — seeded, stream-addressed generation of point sets and
//!   random test boxes.
//! * [`bounds`] — the closed-form upper/lower bound calculators and the
//!   union-bound point count.
//! * [`verify`] — randomized suites checking the cover guarantees
//!   (zero-tolerance) and reproducing the union-bound argument end to end.
//!
//! ```
//! use dispersion::geometry::{Point, PointSet};
//! use dispersion::solver::{exact_dispersion_cube, SolverConfig};
//!
//! let midpoint = Point::new(vec![0.5, 0.5]).unwrap();
//! let set = PointSet::new(vec![midpoint]).unwrap();
//! let result = exact_dispersion_cube(&set, &SolverConfig::default()).unwrap();
//! assert_eq!(result.value, 0.5);
//! ```

pub mod bounds;
pub mod geometry;
pub mod io;
pub mod nets;
pub mod sampler;
pub mod solver;
pub mod verify;
