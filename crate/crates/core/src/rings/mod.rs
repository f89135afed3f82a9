pub mod field;
pub mod gf;
pub mod matrix;
pub mod quaternion;
pub mod semisimple;
pub mod unit_class;

pub use field::{DivisionRing, Scalar};
pub use gf::FiniteField;
pub use matrix::{mat_invert, Mat, Row};
pub use quaternion::Quaternion;
pub use semisimple::{ring_decompose, Component, RingDescriptor, RingElement};
pub use unit_class::{dieudonne_det, ClassOp, ClassOpResult, ClassValue, UnitClass};
