//! Abstract 3D scenes: objects resting on the floor or on each other, the
//! placement relation that licenses those edges, and pair construction.

mod generate;
mod placement;
mod projection;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::{Color, Material, ObjectId, Props, Taxonomy, TaxonomyError};

pub use generate::{generate_pair, generate_scene, inject_difference};
pub use placement::{closest_survivor, linf_gap, place_object, survivors, Footprint, Rect};
pub use projection::{project_bbox2d, BoundingBox2D, MAX_HEIGHT};

/// Name of the ground surface in placement data.
pub const FLOOR: &str = "floor";

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("no sampled point survived the boundary and spacing filters")]
    PlacementFailure,
    #[error("placed {placed} objects, below the minimum of {min}")]
    GenerationFailure { placed: usize, min: usize },
    #[error("no valid replacement found")]
    InjectionFailure,
    #[error("unknown object `{0}`")]
    UnknownObject(ObjectId),
    #[error("placement data: surface `{0}` is not a known category")]
    UnknownSurface(String),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}

/// Knobs for scene synthesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    /// Floor `[width, depth]`.
    pub floor: [f64; 2],
    pub min_objects: usize,
    pub max_objects: usize,
    /// Points sampled per placement attempt.
    pub sample_points: usize,
    /// Minimum edge-to-edge gap between siblings.
    pub min_gap: f64,
    /// Upper bound on the number of instantiated children of any category.
    pub max_divergence: usize,
    /// Failed attempts tolerated per object before generation stops.
    pub retry_budget: usize,
    /// Probability that a replacement has a different category.
    pub different_category_prob: f64,
    /// Assets with a smaller footprint are never placed.
    pub min_footprint_area: f64,
    /// Scene regenerations tolerated per pair.
    pub pair_retry_budget: usize,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            floor: [16.0, 12.0],
            min_objects: 8,
            max_objects: 15,
            sample_points: 100,
            min_gap: 0.3,
            max_divergence: 3,
            retry_budget: 50,
            different_category_prob: 0.5,
            min_footprint_area: 0.05,
            pair_retry_budget: 20,
        }
    }
}

/// Which categories may rest on which surfaces.
#[derive(Clone, Debug, Default)]
pub struct PlacementGraph {
    edges: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
struct PlacementFile {
    surface: Vec<SurfaceEntry>,
}

#[derive(Deserialize)]
struct SurfaceEntry {
    category: String,
    supports: Vec<String>,
}

pub const BUILTIN_PLACEMENT: &str = include_str!("../../data/placement.toml");

impl PlacementGraph {
    pub fn builtin(taxonomy: &Taxonomy) -> Self {
        Self::from_toml(BUILTIN_PLACEMENT, taxonomy).expect("builtin placement data is valid")
    }

    pub fn from_toml(text: &str, taxonomy: &Taxonomy) -> Result<Self, SceneError> {
        let file: PlacementFile = toml::from_str(text).map_err(TaxonomyError::from)?;
        let mut edges: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for entry in file.surface {
            if entry.category != FLOOR && !taxonomy.contains(&entry.category) {
                return Err(SceneError::UnknownSurface(entry.category));
            }
            for c in &entry.supports {
                if !taxonomy.contains(c) {
                    return Err(TaxonomyError::UnknownCategory(c.clone()).into());
                }
            }
            edges.entry(entry.category).or_default().extend(entry.supports);
        }
        Ok(PlacementGraph { edges })
    }

    /// Surface categories and the categories listed for them.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.edges.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Whether an object of `category` may rest on `surface` (`None` is the
    /// floor). Both sides resolve through their ancestor chains.
    pub fn supports(&self, taxonomy: &Taxonomy, surface: Option<&str>, category: &str) -> bool {
        let surface_chain = match surface {
            None => vec![FLOOR],
            Some(s) => taxonomy.chain(s).unwrap_or_default(),
        };
        surface_chain
            .iter()
            .filter_map(|s| self.edges.get(*s))
            .any(|allowed| allowed.iter().any(|a| taxonomy.is_a(category, a)))
    }

    /// Whether objects of `category` can carry other objects.
    pub fn is_surface(&self, taxonomy: &Taxonomy, category: &str) -> bool {
        taxonomy.chain(category).map(|chain| chain.iter().any(|c| self.edges.contains_key(*c))).unwrap_or(false)
    }
}

/// One placed object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: ObjectId,
    pub asset: String,
    /// Leaf category of the asset.
    pub category: String,
    pub color: Color,
    pub material: Material,
    /// Supporting object, `None` for the floor.
    pub parent: Option<ObjectId>,
    /// Footprint center `(x, y)` and base height `z`.
    pub position: [f64; 3],
    /// `[width, depth, height]`.
    pub size: [f64; 3],
}

impl ObjectInstance {
    pub fn description(&self) -> Props {
        Props::describe(self.color, self.material, self.category.clone())
    }

    pub fn footprint(&self) -> Footprint {
        Footprint::new([self.position[0], self.position[1]], [self.size[0], self.size[1]])
    }

    /// Height of the top face, where children rest.
    pub fn top(&self) -> f64 {
        self.position[2] + self.size[2]
    }
}

/// A full symbolic scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    /// Floor `[width, depth]`.
    pub bounds: [f64; 2],
    pub objects: Vec<ObjectInstance>,
}

impl SceneGraph {
    pub fn new(bounds: [f64; 2]) -> Self {
        SceneGraph { bounds, objects: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn get(&self, id: &ObjectId) -> Option<&ObjectInstance> {
        self.objects.iter().find(|o| &o.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &ObjectId> {
        self.objects.iter().map(|o| &o.id)
    }

    pub fn children<'a>(&'a self, parent: Option<&'a ObjectId>) -> impl Iterator<Item = &'a ObjectInstance> + 'a {
        self.objects.iter().filter(move |o| o.parent.as_ref() == parent)
    }

    pub fn has_children(&self, id: &ObjectId) -> bool {
        self.objects.iter().any(|o| o.parent.as_ref() == Some(id))
    }

    /// Placeable area of a surface (`None` is the floor).
    pub fn surface_area(&self, surface: Option<&ObjectId>) -> Result<Rect, SceneError> {
        match surface {
            None => Ok(Rect { x_min: 0.0, y_min: 0.0, x_max: self.bounds[0], y_max: self.bounds[1] }),
            Some(id) => {
                let o = self.get(id).ok_or_else(|| SceneError::UnknownObject(id.clone()))?;
                Ok(o.footprint().rect())
            }
        }
    }

    /// Base height of objects resting on a surface.
    pub fn surface_height(&self, surface: Option<&ObjectId>) -> Result<f64, SceneError> {
        match surface {
            None => Ok(0.0),
            Some(id) => Ok(self.get(id).ok_or_else(|| SceneError::UnknownObject(id.clone()))?.top()),
        }
    }

    pub fn description_of(&self, id: &ObjectId) -> Option<Props> {
        self.get(id).map(ObjectInstance::description)
    }
}

/// Every category instantiated in the scene, ancestors included.
pub fn instantiated_categories<'a>(
    scene: &'a SceneGraph,
    taxonomy: &'a Taxonomy,
) -> Result<HashSet<&'a str>, SceneError> {
    let mut out = HashSet::new();
    for o in &scene.objects {
        out.extend(taxonomy.chain(&o.category)?);
    }
    Ok(out)
}

/// Number of distinct children of `category` instantiated in the scene.
pub fn divergence(scene: &SceneGraph, taxonomy: &Taxonomy, category: &str) -> Result<usize, SceneError> {
    let present = instantiated_categories(scene, taxonomy)?;
    Ok(taxonomy.children(category)?.iter().filter(|c| present.contains(*c)).count())
}

/// Largest divergence over all categories for a multiset of leaf categories.
pub fn max_divergence<'a>(taxonomy: &Taxonomy, leaves: impl IntoIterator<Item = &'a str>) -> Result<usize, SceneError> {
    let mut present = HashSet::new();
    for leaf in leaves {
        present.extend(taxonomy.chain(leaf)?);
    }
    let mut per_parent: HashMap<&str, usize> = HashMap::new();
    for c in &present {
        if let Some(p) = taxonomy.parent(c)? {
            *per_parent.entry(p).or_default() += 1;
        }
    }
    Ok(per_parent.values().copied().max().unwrap_or(0))
}

/// Two scenes differing in one object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenePair {
    pub scene_q: SceneGraph,
    pub scene_a: SceneGraph,
    /// Object of `scene_q` missing from `scene_a`.
    pub target_id: ObjectId,
    /// Object of `scene_a` standing where the target was.
    pub replacement_id: ObjectId,
}
