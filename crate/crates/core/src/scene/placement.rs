use rand::Rng;

use super::{SceneConfig, SceneError, SceneGraph};
use crate::taxonomy::ObjectId;

/// Axis-aligned rectangle on a surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn contains(&self, inner: &Rect) -> bool {
        inner.x_min >= self.x_min && inner.y_min >= self.y_min && inner.x_max <= self.x_max && inner.y_max <= self.y_max
    }
}

/// Center and `(width, depth)` of an object's ground projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Footprint {
    pub center: [f64; 2],
    pub extent: [f64; 2],
}

impl Footprint {
    pub fn new(center: [f64; 2], extent: [f64; 2]) -> Self {
        Footprint { center, extent }
    }

    pub fn rect(&self) -> Rect {
        let [hw, hd] = [self.extent[0] / 2.0, self.extent[1] / 2.0];
        Rect {
            x_min: self.center[0] - hw,
            y_min: self.center[1] - hd,
            x_max: self.center[0] + hw,
            y_max: self.center[1] + hd,
        }
    }
}

/// Edge-to-edge L∞ gap; negative when the footprints overlap.
pub fn linf_gap(a: &Footprint, b: &Footprint) -> f64 {
    let gx = (a.center[0] - b.center[0]).abs() - (a.extent[0] + b.extent[0]) / 2.0;
    let gy = (a.center[1] - b.center[1]).abs() - (a.extent[1] + b.extent[1]) / 2.0;
    gx.max(gy)
}

fn l1(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).abs() + (a[1] - b[1]).abs()
}

fn quantize(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Candidate centers whose footprint stays inside `area` and keeps at least
/// `min_gap` from every sibling.
pub fn survivors(
    points: &[[f64; 2]],
    area: &Rect,
    extent: [f64; 2],
    siblings: &[Footprint],
    min_gap: f64,
) -> Vec<[f64; 2]> {
    points
        .iter()
        .copied()
        .filter(|&p| {
            let fp = Footprint::new(p, extent);
            area.contains(&fp.rect()) && siblings.iter().all(|s| linf_gap(&fp, s) >= min_gap)
        })
        .collect()
}

/// Index of the survivor with the smallest L1 distance to its nearest
/// sibling; the first such index on ties. `None` without siblings or
/// survivors.
pub fn closest_survivor(survivors: &[[f64; 2]], siblings: &[Footprint]) -> Option<usize> {
    if siblings.is_empty() {
        return None;
    }
    survivors
        .iter()
        .map(|&p| siblings.iter().map(|s| l1(p, s.center)).fold(f64::INFINITY, f64::min))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// Samples a center for a footprint of `extent` on `surface`.
pub fn place_object<R: Rng + ?Sized>(
    scene: &SceneGraph,
    surface: Option<&ObjectId>,
    extent: [f64; 2],
    config: &SceneConfig,
    rng: &mut R,
) -> Result<[f64; 2], SceneError> {
    let area = scene.surface_area(surface)?;
    let points: Vec<[f64; 2]> = (0..config.sample_points.max(1))
        .map(|_| [quantize(rng.gen_range(area.x_min..=area.x_max)), quantize(rng.gen_range(area.y_min..=area.y_max))])
        .collect();
    let siblings: Vec<Footprint> = scene.children(surface).map(|o| o.footprint()).collect();
    let alive = survivors(&points, &area, extent, &siblings, config.min_gap);
    if alive.is_empty() {
        return Err(SceneError::PlacementFailure);
    }
    let pick = match closest_survivor(&alive, &siblings) {
        Some(i) => i,
        None => rng.gen_range(0..alive.len()),
    };
    Ok(alive[pick])
}
