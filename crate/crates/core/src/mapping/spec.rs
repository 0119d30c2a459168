use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::pose::{local_to_polar, world_to_local, Point2, Pose};
use super::MappingError;
use crate::synth::SoundAttributeFrame;

/// Local-frame positions are snapped to a grid of this many steps per meter
/// before mapping, so floating-point noise from the frame transform never
/// reaches the audio.
pub const POSITION_STEPS_PER_M: f64 = 1e6;

// Relative slack when checking decoded attributes against an output range.
const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateFrame {
    GlobalCartesian,
    LocalCartesian,
    LocalPolar,
}

impl CoordinateFrame {
    pub fn dimensions(self) -> [Dimension; 2] {
        match self {
            Self::GlobalCartesian | Self::LocalCartesian => [Dimension::X, Dimension::Y],
            Self::LocalPolar => [Dimension::Range, Dimension::Bearing],
        }
    }

    pub fn is_local(self) -> bool {
        !matches!(self, Self::GlobalCartesian)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    X,
    Y,
    Range,
    Bearing,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::X => "x",
            Self::Y => "y",
            Self::Range => "range",
            Self::Bearing => "bearing",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Pitch,
    Amplitude,
    Timbre,
    Waveshape,
    Pan,
}

impl Attribute {
    pub const ALL: [Attribute; 5] = [
        Self::Pitch,
        Self::Amplitude,
        Self::Timbre,
        Self::Waveshape,
        Self::Pan,
    ];

    /// Admissible values, `None` meaning unbounded above (pitch).
    pub fn domain(self) -> (f64, Option<f64>) {
        match self {
            Self::Pitch => (0.0, None),
            Self::Amplitude | Self::Timbre | Self::Waveshape => (0.0, Some(1.0)),
            Self::Pan => (-1.0, Some(1.0)),
        }
    }

    /// Output range used when an attribute is picked without an explicit one.
    pub fn default_output(self) -> Interval {
        match self {
            Self::Pitch => Interval::new(220.0, 880.0),
            Self::Amplitude => Interval::new(0.1, 1.0),
            Self::Timbre | Self::Waveshape => Interval::new(0.0, 1.0),
            Self::Pan => Interval::new(-1.0, 1.0),
        }
    }

    pub fn read(self, frame: &SoundAttributeFrame) -> Option<f64> {
        match self {
            Self::Pitch => Some(frame.pitch_hz),
            Self::Amplitude => Some(frame.amplitude),
            Self::Timbre => Some(frame.timbre),
            Self::Waveshape => Some(frame.waveshape),
            Self::Pan => frame.pan,
        }
    }

    pub(crate) fn write(self, frame: &mut SoundAttributeFrame, value: f64) {
        match self {
            Self::Pitch => frame.pitch_hz = value,
            Self::Amplitude => frame.amplitude = value,
            Self::Timbre => frame.timbre = value,
            Self::Waveshape => frame.waveshape = value,
            Self::Pan => frame.pan = Some(value),
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pitch => "pitch",
            Self::Amplitude => "amplitude",
            Self::Timbre => "timbre",
            Self::Waveshape => "waveshape",
            Self::Pan => "pan",
        })
    }
}

/// Closed interval, serialized as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.lo..=self.hi).contains(&v)
    }
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Self { lo, hi }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Curve {
    /// Affine.
    Linear,
    /// Geometric interpolation of the output range.
    Log,
    /// `r0 / (r0 + d)`, rescaled so the near end of the input range lands on
    /// the top of the output range.
    ProximityWarp { r0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionMapping {
    pub dimension: Dimension,
    pub attribute: Attribute,
    pub input_range: Interval,
    pub output_range: Interval,
    pub curve: Curve,
}

impl DimensionMapping {
    pub fn new(
        dimension: Dimension,
        attribute: Attribute,
        input_range: Interval,
        output_range: Interval,
        curve: Curve,
    ) -> Self {
        Self {
            dimension,
            attribute,
            input_range,
            output_range,
            curve,
        }
    }

    /// Unit-interval position of an in-range input along the output range.
    fn fraction(&self, v: f64) -> f64 {
        let i = self.input_range;
        match self.curve {
            Curve::Linear | Curve::Log => (v - i.lo) / i.width(),
            Curve::ProximityWarp { r0 } => {
                let warp = |d: f64| r0 / (r0 + d);
                (warp(v) - warp(i.hi)) / (warp(i.lo) - warp(i.hi))
            }
        }
    }

    fn at_fraction(&self, s: f64) -> f64 {
        let i = self.input_range;
        match self.curve {
            Curve::Linear | Curve::Log => i.lo + s * i.width(),
            Curve::ProximityWarp { r0 } => {
                let warp = |d: f64| r0 / (r0 + d);
                let w = warp(i.hi) + s * (warp(i.lo) - warp(i.hi));
                r0 / w - r0
            }
        }
    }

    /// Maps an input value already inside `input_range`.
    pub fn forward(&self, v: f64) -> f64 {
        let s = self.fraction(v);
        let o = self.output_range;
        let out = match self.curve {
            Curve::Log => o.lo * (o.hi / o.lo).powf(s),
            _ => o.lo + s * o.width(),
        };
        out.clamp(o.lo, o.hi)
    }

    /// Inverse of [`forward`](Self::forward) for an output inside `output_range`.
    pub fn inverse(&self, out: f64) -> f64 {
        let o = self.output_range;
        let s = match self.curve {
            Curve::Log => (out / o.lo).ln() / (o.hi / o.lo).ln(),
            _ => (out - o.lo) / o.width(),
        };
        self.at_fraction(s.clamp(0.0, 1.0))
            .clamp(self.input_range.lo, self.input_range.hi)
    }

    /// `|d attribute / d input|` at `v`, in output units per input unit.
    pub fn slope(&self, v: f64) -> f64 {
        let o = self.output_range;
        let i = self.input_range;
        match self.curve {
            Curve::Linear => o.width() / i.width(),
            Curve::Log => self.forward(v) * (o.hi / o.lo).ln() / i.width(),
            Curve::ProximityWarp { r0 } => {
                let span = r0 / (r0 + i.lo) - r0 / (r0 + i.hi);
                o.width() * r0 / ((r0 + v) * (r0 + v) * span)
            }
        }
    }
}

/// Values taken by attributes that house no spatial dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestAttributes {
    pub pitch_hz: f64,
    pub amplitude: f64,
    pub timbre: f64,
    pub waveshape: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pan: Option<f64>,
}

impl Default for RestAttributes {
    fn default() -> Self {
        Self {
            pitch_hz: 440.0,
            amplitude: 0.8,
            timbre: 0.5,
            waveshape: 0.5,
            pan: None,
        }
    }
}

impl RestAttributes {
    pub fn violations(&self) -> Vec<SpecViolation> {
        let checks = [
            (Attribute::Pitch, self.pitch_hz.is_finite() && self.pitch_hz > 0.0),
            (Attribute::Amplitude, (0.0..=1.0).contains(&self.amplitude)),
            (Attribute::Timbre, (0.0..=1.0).contains(&self.timbre)),
            (Attribute::Waveshape, (0.0..=1.0).contains(&self.waveshape)),
            (
                Attribute::Pan,
                self.pan.is_none_or(|p| (-1.0..=1.0).contains(&p)),
            ),
        ];
        checks
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(a, _)| SpecViolation::RestOutOfRange(a))
            .collect()
    }

    pub fn frame(&self, t: f64) -> SoundAttributeFrame {
        SoundAttributeFrame {
            t,
            pitch_hz: self.pitch_hz,
            amplitude: self.amplitude,
            timbre: self.timbre,
            waveshape: self.waveshape,
            pan: self.pan,
        }
    }
}

/// Declarative assignment of sound attributes to the spatial dimensions of a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSpec {
    pub frame: CoordinateFrame,
    pub dimensions: Vec<DimensionMapping>,
    #[serde(default)]
    pub rest: RestAttributes,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecViolation {
    #[error("dimension unhoused: {0}")]
    DimensionUnhoused(Dimension),
    #[error("attribute reused: {0}")]
    AttributeReused(Attribute),
    #[error("dimension mapped more than once: {0}")]
    DimensionRepeated(Dimension),
    #[error("dimension {dimension} does not belong to frame {frame:?}")]
    ForeignDimension {
        dimension: Dimension,
        frame: CoordinateFrame,
    },
    #[error("degenerate input range for {0}")]
    DegenerateInput(Dimension),
    #[error("degenerate output range for {0}")]
    DegenerateOutput(Dimension),
    #[error("log curve on {0} needs a strictly positive output range")]
    LogNonPositive(Dimension),
    #[error("proximity warp on {0} needs r0 > 0 and a non-negative input range")]
    BadWarp(Dimension),
    #[error("output range of {dimension} leaves the domain of {attribute}")]
    OutputOutsideDomain {
        dimension: Dimension,
        attribute: Attribute,
    },
    #[error("rest value for {0} is out of range")]
    RestOutOfRange(Attribute),
}

/// Result of sonifying one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mapped {
    pub frame: SoundAttributeFrame,
    /// At least one coordinate fell outside its input range and was clamped.
    pub clamped: bool,
}

/// A position expressed in the coordinates of a [`CoordinateFrame`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FramePoint {
    Cartesian(Point2),
    Polar { range: f64, bearing: f64 },
}

impl FramePoint {
    pub fn get(&self, dim: Dimension) -> Option<f64> {
        match (self, dim) {
            (Self::Cartesian(p), Dimension::X) => Some(p.x),
            (Self::Cartesian(p), Dimension::Y) => Some(p.y),
            (Self::Polar { range, .. }, Dimension::Range) => Some(*range),
            (Self::Polar { bearing, .. }, Dimension::Bearing) => Some(*bearing),
            _ => None,
        }
    }

    fn set(&mut self, dim: Dimension, v: f64) {
        match (self, dim) {
            (Self::Cartesian(p), Dimension::X) => p.x = v,
            (Self::Cartesian(p), Dimension::Y) => p.y = v,
            (Self::Polar { range, .. }, Dimension::Range) => *range = v,
            (Self::Polar { bearing, .. }, Dimension::Bearing) => *bearing = v,
            _ => {}
        }
    }

    fn zero(frame: CoordinateFrame) -> Self {
        match frame {
            CoordinateFrame::LocalPolar => Self::Polar {
                range: 0.0,
                bearing: 0.0,
            },
            _ => Self::Cartesian(Point2::ORIGIN),
        }
    }

    fn matches(&self, frame: CoordinateFrame) -> bool {
        matches!(
            (self, frame),
            (Self::Polar { .. }, CoordinateFrame::LocalPolar)
                | (
                    Self::Cartesian(_),
                    CoordinateFrame::GlobalCartesian | CoordinateFrame::LocalCartesian
                )
        )
    }
}

impl MappingSpec {
    /// The tablet game layout: waveshape along x, pitch (log) along y, both
    /// over the unit square.
    pub fn tablet() -> Self {
        Self {
            frame: CoordinateFrame::GlobalCartesian,
            dimensions: vec![
                DimensionMapping::new(
                    Dimension::X,
                    Attribute::Waveshape,
                    Interval::new(0.0, 1.0),
                    Interval::new(0.0, 1.0),
                    Curve::Linear,
                ),
                DimensionMapping::new(
                    Dimension::Y,
                    Attribute::Pitch,
                    Interval::new(0.0, 1.0),
                    Interval::new(220.0, 880.0),
                    Curve::Log,
                ),
            ],
            rest: RestAttributes::default(),
        }
    }

    /// Player-centered Cartesian layout: timbre across, waveshape along the heading.
    pub fn local_cartesian(half_extent_m: f64) -> Self {
        let input = Interval::new(-half_extent_m, half_extent_m);
        Self {
            frame: CoordinateFrame::LocalCartesian,
            dimensions: vec![
                DimensionMapping::new(
                    Dimension::X,
                    Attribute::Timbre,
                    input,
                    Interval::new(0.0, 1.0),
                    Curve::Linear,
                ),
                DimensionMapping::new(
                    Dimension::Y,
                    Attribute::Waveshape,
                    input,
                    Interval::new(0.0, 1.0),
                    Curve::Linear,
                ),
            ],
            rest: RestAttributes::default(),
        }
    }

    /// Player-centered polar layout: warped range on timbre, bearing on waveshape.
    pub fn local_polar(max_range_m: f64, r0: f64) -> Self {
        Self {
            frame: CoordinateFrame::LocalPolar,
            dimensions: vec![
                DimensionMapping::new(
                    Dimension::Range,
                    Attribute::Timbre,
                    Interval::new(0.0, max_range_m),
                    Interval::new(0.0, 1.0),
                    Curve::ProximityWarp { r0 },
                ),
                DimensionMapping::new(
                    Dimension::Bearing,
                    Attribute::Waveshape,
                    Interval::new(0.0, std::f64::consts::TAU),
                    Interval::new(0.0, 1.0),
                    Curve::Linear,
                ),
            ],
            rest: RestAttributes::default(),
        }
    }

    pub fn mapping_for(&self, dim: Dimension) -> Option<&DimensionMapping> {
        self.dimensions.iter().find(|m| m.dimension == dim)
    }

    pub fn mapping_of(&self, attribute: Attribute) -> Option<&DimensionMapping> {
        self.dimensions.iter().find(|m| m.attribute == attribute)
    }

    /// Every rule this mapping violates, empty when it is usable.
    pub fn validate(&self) -> Vec<SpecViolation> {
        let mut out = Vec::new();
        let allowed = self.frame.dimensions();
        let mut dim_uses: BTreeMap<Dimension, usize> = BTreeMap::new();
        let mut attr_uses: BTreeMap<Attribute, usize> = BTreeMap::new();
        for m in &self.dimensions {
            *dim_uses.entry(m.dimension).or_default() += 1;
            *attr_uses.entry(m.attribute).or_default() += 1;
            if !allowed.contains(&m.dimension) {
                out.push(SpecViolation::ForeignDimension {
                    dimension: m.dimension,
                    frame: self.frame,
                });
            }
            out.extend(mapping_violations(m));
        }
        for d in allowed {
            if !dim_uses.contains_key(&d) {
                out.push(SpecViolation::DimensionUnhoused(d));
            }
        }
        out.extend(
            dim_uses
                .iter()
                .filter(|(_, &n)| n > 1)
                .map(|(&d, _)| SpecViolation::DimensionRepeated(d)),
        );
        out.extend(
            attr_uses
                .iter()
                .filter(|(_, &n)| n > 1)
                .map(|(&a, _)| SpecViolation::AttributeReused(a)),
        );
        out.extend(self.rest.violations());
        out
    }

    fn ensure_valid(&self) -> Result<(), MappingError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(MappingError::InvalidSpec(v))
        }
    }

    /// Sonifies a position given in this spec's frame coordinates.
    /// Out-of-range coordinates are clamped and flagged.
    pub fn to_attributes(&self, position: FramePoint, t: f64) -> Result<Mapped, MappingError> {
        self.map_position(position, t, false)
    }

    /// Like [`to_attributes`](Self::to_attributes) but rejects out-of-range coordinates.
    pub fn to_attributes_strict(&self, position: FramePoint, t: f64) -> Result<SoundAttributeFrame, MappingError> {
        self.map_position(position, t, true).map(|m| m.frame)
    }

    fn map_position(&self, position: FramePoint, t: f64, strict: bool) -> Result<Mapped, MappingError> {
        self.ensure_valid()?;
        if !position.matches(self.frame) {
            return Err(MappingError::FrameMismatch(self.frame));
        }
        let mut frame = self.rest.frame(t);
        let mut clamped = false;
        for m in &self.dimensions {
            let v = position.get(m.dimension).ok_or(MappingError::FrameMismatch(self.frame))?;
            if !v.is_finite() {
                return Err(MappingError::NonFinite);
            }
            let inside = m.input_range.contains(v);
            if !inside && strict {
                return Err(MappingError::OutOfRange {
                    dimension: m.dimension,
                    value: v,
                });
            }
            clamped |= !inside;
            let v = v.clamp(m.input_range.lo, m.input_range.hi);
            m.attribute.write(&mut frame, m.forward(v));
        }
        Ok(Mapped { frame, clamped })
    }

    /// Recovers the position encoded in a frame.
    pub fn to_position(&self, frame: &SoundAttributeFrame) -> Result<FramePoint, MappingError> {
        self.ensure_valid()?;
        let mut p = FramePoint::zero(self.frame);
        for m in &self.dimensions {
            let value = m
                .attribute
                .read(frame)
                .ok_or(MappingError::MissingAttribute(m.attribute))?;
            let o = m.output_range;
            let slack = RANGE_SLACK * o.width();
            if !(value.is_finite() && value >= o.lo - slack && value <= o.hi + slack) {
                return Err(MappingError::AttributeOutOfRange {
                    attribute: m.attribute,
                    value,
                });
            }
            p.set(m.dimension, m.inverse(value.clamp(o.lo, o.hi)));
        }
        Ok(p)
    }

    /// Like [`to_position`](Self::to_position) but clamps attributes into
    /// their output ranges instead of rejecting them.
    pub fn to_position_clamped(&self, frame: &SoundAttributeFrame) -> Result<FramePoint, MappingError> {
        let mut f = *frame;
        for m in &self.dimensions {
            if let Some(v) = m.attribute.read(&f) {
                m.attribute
                    .write(&mut f, v.clamp(m.output_range.lo, m.output_range.hi));
            }
        }
        self.to_position(&f)
    }

    /// Converts a global point into this spec's frame as seen from `player`.
    pub fn frame_point(&self, player: &Pose, world: Point2) -> Result<FramePoint, MappingError> {
        if self.frame == CoordinateFrame::GlobalCartesian {
            if !world.is_finite() {
                return Err(MappingError::NonFinite);
            }
            return Ok(FramePoint::Cartesian(world));
        }
        let local = world_to_local(player, world)?;
        let local = Point2::new(snap(local.x), snap(local.y));
        Ok(match self.frame {
            CoordinateFrame::LocalPolar => {
                let (range, bearing) = local_to_polar(local);
                FramePoint::Polar { range, bearing }
            }
            _ => FramePoint::Cartesian(local),
        })
    }

    /// Sonifies a global point as heard by `player`.
    pub fn sonify_world(&self, player: &Pose, world: Point2, t: f64) -> Result<Mapped, MappingError> {
        let p = self.frame_point(player, world)?;
        self.to_attributes(p, t)
    }
}

pub(crate) fn mapping_violations(m: &DimensionMapping) -> Vec<SpecViolation> {
    let mut out = Vec::new();
    if !m.input_range.is_nondegenerate() {
        out.push(SpecViolation::DegenerateInput(m.dimension));
    }
    let o = m.output_range;
    if !o.is_nondegenerate() {
        out.push(SpecViolation::DegenerateOutput(m.dimension));
    }
    if m.curve == Curve::Log && (o.lo.is_nan() || o.lo <= 0.0) {
        out.push(SpecViolation::LogNonPositive(m.dimension));
    }
    if let Curve::ProximityWarp { r0 } = m.curve {
        if !(r0.is_finite() && r0 > 0.0 && m.input_range.lo >= 0.0) {
            out.push(SpecViolation::BadWarp(m.dimension));
        }
    }
    let (lo, hi) = m.attribute.domain();
    let inside = if m.attribute == Attribute::Pitch {
        o.lo > lo
    } else {
        o.lo >= lo && hi.is_none_or(|h| o.hi <= h)
    };
    if !inside {
        out.push(SpecViolation::OutputOutsideDomain {
            dimension: m.dimension,
            attribute: m.attribute,
        });
    }
    out
}

fn snap(v: f64) -> f64 {
    // `+ 0.0` turns -0.0 into 0.0.
    (v * POSITION_STEPS_PER_M).round() / POSITION_STEPS_PER_M + 0.0
}

/// Cartesian coordinates of a frame point, if it has them.
pub fn as_point(p: FramePoint) -> Option<Point2> {
    match p {
        FramePoint::Cartesian(p) => Some(p),
        FramePoint::Polar { .. } => None,
    }
}
