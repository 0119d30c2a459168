//! Positions to sound attributes and back.
//!
//! Objects are located in a global frame or in a player-centered local frame
//! (Cartesian or polar). A [`MappingSpec`] assigns one sound attribute to each
//! spatial dimension of its frame through a linear, logarithmic or
//! proximity-warp curve.

mod ping;
mod pose;
mod spec;

use thiserror::Error;

pub use ping::{ping_schedule, Ping, PingConfig, PingSchedule, ZeroAngle};
pub use pose::{local_to_polar, local_to_world, normalize_angle, world_to_local, Point2, Pose};
pub use spec::{
    as_point, Attribute, CoordinateFrame, Curve, Dimension, DimensionMapping, FramePoint, Interval,
    Mapped, MappingSpec, RestAttributes, SpecViolation, POSITION_STEPS_PER_M,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MappingError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("position does not match the {0:?} frame")]
    FrameMismatch(CoordinateFrame),
    #[error("{dimension} = {value} lies outside its input range")]
    OutOfRange { dimension: Dimension, value: f64 },
    #[error("{attribute} = {value} lies outside its output range")]
    AttributeOutOfRange { attribute: Attribute, value: f64 },
    #[error("frame carries no {0} value")]
    MissingAttribute(Attribute),
    #[error("sweep period must be positive, got {0}")]
    InvalidPeriod(f64),
    #[error("invalid mapping spec: {}", crate::join_display(.0))]
    InvalidSpec(Vec<SpecViolation>),
}

/// Sonifies a position given in `spec`'s frame coordinates (clamping).
pub fn position_to_attributes(
    spec: &MappingSpec,
    position: FramePoint,
    t: f64,
) -> Result<Mapped, MappingError> {
    spec.to_attributes(position, t)
}

/// Recovers the position encoded by `frame` under `spec`.
pub fn attributes_to_position(
    spec: &MappingSpec,
    frame: &crate::synth::SoundAttributeFrame,
) -> Result<FramePoint, MappingError> {
    spec.to_position(frame)
}

/// Lists every rule `spec` violates.
pub fn validate_spec(spec: &MappingSpec) -> Result<(), Vec<SpecViolation>> {
    let v = spec.validate();
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}
