use serde::{Deserialize, Serialize};

use super::{ObjectInstance, SceneGraph};

/// Height that maps to the top of the image.
pub const MAX_HEIGHT: f64 = 10.0;

// Vertical image coordinate blends floor depth and height.
const DEPTH_WEIGHT: f64 = 0.6;
const HEIGHT_WEIGHT: f64 = 0.4;

/// Normalized image-space box, origin at the top left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox2D {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox2D {
    pub fn center(&self) -> [f64; 2] {
        [(self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0]
    }
}

fn elevation(scene: &SceneGraph, y: f64, z: f64) -> f64 {
    DEPTH_WEIGHT * y / scene.bounds[1] + HEIGHT_WEIGHT * z / MAX_HEIGHT
}

/// Fixed oblique camera looking from the front (small y) edge of the floor.
/// Front objects sit lower in the image.
pub fn project_bbox2d(scene: &SceneGraph, object: &ObjectInstance) -> BoundingBox2D {
    let [x, y, z] = object.position;
    let [w, d, h] = object.size;
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    let low = elevation(scene, y - d / 2.0, z);
    let high = elevation(scene, y + d / 2.0, z + h);
    BoundingBox2D {
        x_min: clamp((x - w / 2.0) / scene.bounds[0]),
        x_max: clamp((x + w / 2.0) / scene.bounds[0]),
        y_min: clamp(1.0 - high),
        y_max: clamp(1.0 - low),
    }
}
