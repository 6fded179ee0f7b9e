//! Super Fock-Goncharov cluster ensembles at desk scale: exact seed and
//! super-seed mutation with bracket verification, quantum-torus mutation with
//! pentagon checks, Smith-normal-form elimination to the fiber curve with
//! Newton-polygon genus, Grassmann/BCFW odd-sector identities, and
//! floating-point evaluation of the two-loop hexagon period.

pub mod boundary;
pub mod double;
pub mod fiber;
pub mod grassmann;
pub mod hexagon;
pub mod json;
pub mod linalg;
pub mod qtorus;
pub mod seed;
pub mod superseed;
pub mod sfrat;
pub mod suites;
