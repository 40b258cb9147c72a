//! Closed-loop simulation and control of dynamic pricing for high-occupancy-toll
//! (HOT) lanes.
//!
//! A freeway corridor has two lane groups, each modeled as a point queue behind a
//! bottleneck: the HOT lanes (HOVs ride free, SOVs pay a dynamic price `u`) and the
//! general-purpose (GP) lanes. A pluggable lane-choice model maps the posted price
//! and the queueing-time difference `w` to the fraction of SOVs that pay. The
//! pricing law `u = a*w + b` is adapted by two integral controllers that drive the
//! HOT queue length and the HOT residual capacity to zero, without knowing the
//! lane-choice model or its parameters. Observed flows then let an operator recover
//! the value-of-time parameters of the model in use.
//!
//! Units are fixed globally: time in minutes, vehicles for queue lengths, dollars
//! for prices. All rates are per minute.

pub mod analysis;
pub mod choice;
pub mod controller;
pub mod domain;
pub mod engine;
pub mod estimation;
pub mod queue;

pub use choice::{
    flow_and_residual, ChoiceError, ChoiceOutcome, ChoiceSpec, DistributionSpec, FlowSplit,
    LaneChoiceModel, VotDistribution,
};
pub use domain::{
    validate_scenario, Capacities, ControllerState, DemandSample, Gains, LaneState,
    ScenarioConfig, StepRecord, ValidatedScenario, ValidationErrors,
};
pub use engine::{detect_convergence, run, DemandSpec, SimError, SimTrace};
