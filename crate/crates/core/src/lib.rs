//! Irreducible representations of finite nilpotent groups and phase retrieval
//! for the orbit frames they generate.

pub mod catalog;
pub mod chars;
pub mod error;
pub mod frame;
pub mod group;
pub mod kirillov;
pub mod numerics;
pub mod rep;

pub use error::{FrameError, GroupError, KirillovError, RepError};
pub use group::{make_group, GroupTable, QuotientMap, Subgroup};
pub use numerics::{TolerancePolicy, C64, CMat, CVec};
pub use rep::UnitaryRep;
