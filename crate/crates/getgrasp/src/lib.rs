//! Grasp mechanics analysis for 1-DoF parallel-jaw finger designs.
//!
//! The library models two finger arrangements on a parallel jaw, a flat
//! opposing pair and a converging pair opposed by a single centered finger.
//! It resolves gel-pad contact sets under jaw closure, and evaluates grasp
//! quality: force closure, per-axis maximum resistible disturbance wrenches,
//! and a secure-grasp verdict against a force-disturbance threshold.
//!
//! Units are millimetres, Newtons, Newton-millimetres, kilograms and degrees
//! throughout; the grasp frame has `x` along the finger length, `z` along
//! the jaw-closure axis and `y` completing the right-handed triad.

pub mod analysis;
pub mod contact;
pub mod error;
pub mod geometry;
pub mod render;
pub mod scenario;
pub mod shape;
pub mod wrench;

pub use analysis::{compare_grippers, run_scenario, AnalysisConfig, ComparisonReport, Scenario};
pub use contact::{close_jaws, contact_force_distribution, Contact, ContactKind, ContactSet, GelModel};
pub use error::{GraspError, Result};
pub use geometry::{Arrangement, FingerProfile, GraspFrame, GripperConfig, ScaleMode};
pub use shape::{ObjectModel, Pose, ShapePrimitive};
pub use wrench::{
    epsilon_quality, force_closure, grasp_matrix, max_disturbance, secure_grasp_check,
    torque_envelope, DisturbanceEnvelope, WrenchGenerators,
};
