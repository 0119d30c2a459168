use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::MappingError;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Player position and heading in the global frame.
///
/// `heading` is measured counterclockwise from global +x and points along the
/// direction of motion; it is kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Point2,
    heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Result<Self, MappingError> {
        if !(x.is_finite() && y.is_finite() && heading.is_finite()) {
            return Err(MappingError::NonFinite);
        }
        Ok(Self {
            position: Point2::new(x, y),
            heading: normalize_angle(heading),
        })
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn rotated(&self, by: f64) -> Result<Self, MappingError> {
        Self::new(self.position.x, self.position.y, self.heading + by)
    }

    // Unit vectors of the local axes expressed in the global frame.
    fn axes(&self) -> (Point2, Point2) {
        let (s, c) = self.heading.sin_cos();
        (Point2::new(s, -c), Point2::new(c, s))
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

/// Expresses a global point in the player's frame: origin at the player,
/// +y along the heading, +x to the player's right.
pub fn world_to_local(player: &Pose, object: Point2) -> Result<Point2, MappingError> {
    if !object.is_finite() {
        return Err(MappingError::NonFinite);
    }
    let dx = object.x - player.position.x;
    let dy = object.y - player.position.y;
    let (right, forward) = player.axes();
    Ok(Point2::new(
        dx * right.x + dy * right.y,
        dx * forward.x + dy * forward.y,
    ))
}

/// Inverse of [`world_to_local`].
pub fn local_to_world(player: &Pose, local: Point2) -> Result<Point2, MappingError> {
    if !local.is_finite() {
        return Err(MappingError::NonFinite);
    }
    let (right, forward) = player.axes();
    Ok(Point2::new(
        player.position.x + local.x * right.x + local.y * forward.x,
        player.position.y + local.x * right.y + local.y * forward.y,
    ))
}

/// Range and clockwise bearing from the local +y axis, bearing in `[0, 2pi)`.
/// The bearing of the origin itself is defined as `0`.
pub fn local_to_polar(local: Point2) -> (f64, f64) {
    let range = local.norm();
    if range == 0.0 {
        return (0.0, 0.0);
    }
    let bearing = local.x.atan2(local.y).rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative angles.
    (range, if bearing >= TAU { 0.0 } else { bearing })
}
