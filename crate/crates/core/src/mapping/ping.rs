//! Sonar-style sweep: bearing becomes a time offset within a fixed-period
//! sweep, range becomes a sound attribute of the ping.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::pose::{local_to_polar, world_to_local, Point2, Pose};
use super::spec::{
    mapping_violations, Attribute, Curve, Dimension, DimensionMapping, Interval, RestAttributes,
};
use super::{CoordinateFrame, MappingError};
use crate::synth::SoundAttributeFrame;

/// Where the sweep starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroAngle {
    #[default]
    Facing,
    Behind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PingConfig {
    pub sweep_period_s: f64,
    pub zero_angle: ZeroAngle,
    /// Must house [`Dimension::Range`].
    pub range_mapping: DimensionMapping,
    pub rest: RestAttributes,
}

impl PingConfig {
    /// Range `[0, 50] m` through a proximity warp (`r0 = 5 m`) onto the
    /// attribute's default output range.
    pub fn new(sweep_period_s: f64, range_attribute: Attribute) -> Self {
        Self {
            sweep_period_s,
            zero_angle: ZeroAngle::Facing,
            range_mapping: DimensionMapping::new(
                Dimension::Range,
                range_attribute,
                Interval::new(0.0, 50.0),
                range_attribute.default_output(),
                Curve::ProximityWarp { r0: 5.0 },
            ),
            rest: RestAttributes::default(),
        }
    }
}

impl Default for PingConfig {
    fn default() -> Self {
        Self::new(2.0, Attribute::Timbre)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ping {
    /// Index into the object list handed to [`ping_schedule`].
    pub object: usize,
    /// Clockwise from the zero angle, in `[0, 2pi)`.
    pub bearing: f64,
    pub range_m: f64,
    /// Seconds after the start of the sweep, in `[0, sweep_period_s)`.
    pub offset_s: f64,
    /// Attribute frame of the ping, `t` equal to `offset_s`.
    pub frame: SoundAttributeFrame,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PingSchedule {
    pub sweep_period_s: f64,
    pub zero_angle: ZeroAngle,
    /// Sorted by offset.
    pub pings: Vec<Ping>,
}

/// Builds one sweep as heard from `player`.
///
/// An object at the player's own position has no bearing; it pings at offset
/// `0` with range `0`.
pub fn ping_schedule(
    player: &Pose,
    objects: &[Point2],
    config: &PingConfig,
) -> Result<PingSchedule, MappingError> {
    let period = config.sweep_period_s;
    if !(period.is_finite() && period > 0.0) {
        return Err(MappingError::InvalidPeriod(period));
    }
    let m = &config.range_mapping;
    if m.dimension != Dimension::Range {
        return Err(MappingError::FrameMismatch(CoordinateFrame::LocalPolar));
    }
    let mut violations = mapping_violations(m);
    violations.extend(config.rest.violations());
    if !violations.is_empty() {
        return Err(MappingError::InvalidSpec(violations));
    }

    let mut pings = objects
        .iter()
        .enumerate()
        .map(|(object, &world)| {
            let (range_m, facing_bearing) = local_to_polar(world_to_local(player, world)?);
            let bearing = match config.zero_angle {
                _ if range_m == 0.0 => 0.0,
                ZeroAngle::Facing => facing_bearing,
                ZeroAngle::Behind => wrap_turn(facing_bearing + PI),
            };
            let offset_s = wrap_offset(bearing / TAU * period, period);
            let mut frame = config.rest.frame(offset_s);
            let r = range_m.clamp(m.input_range.lo, m.input_range.hi);
            m.attribute.write(&mut frame, m.forward(r));
            Ok(Ping {
                object,
                bearing,
                range_m,
                offset_s,
                frame,
            })
        })
        .collect::<Result<Vec<_>, MappingError>>()?;
    pings.sort_by(|a, b| a.offset_s.total_cmp(&b.offset_s).then(a.object.cmp(&b.object)));
    Ok(PingSchedule {
        sweep_period_s: period,
        zero_angle: config.zero_angle,
        pings,
    })
}

fn wrap_turn(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

fn wrap_offset(offset: f64, period: f64) -> f64 {
    if offset >= period {
        offset - period
    } else {
        offset
    }
}
