use rand::seq::SliceRandom;
use rand::Rng;

use super::placement::{linf_gap, place_object};
use super::{max_divergence, ObjectInstance, SceneConfig, SceneError, SceneGraph, ScenePair};
use crate::taxonomy::{AssetSpec, Color, Material, ObjectId};
use crate::world::World;

fn usable_assets<'w>(world: &'w World, config: &SceneConfig) -> Vec<&'w AssetSpec> {
    world.catalog.assets().iter().filter(|a| a.footprint_area() >= config.min_footprint_area).collect()
}

fn surface_category<'s>(scene: &'s SceneGraph, surface: Option<&ObjectId>) -> Option<&'s str> {
    surface.and_then(|id| scene.get(id)).map(|o| o.category.as_str())
}

/// Builds a scene one object at a time.
pub fn generate_scene<R: Rng + ?Sized>(
    world: &World,
    config: &SceneConfig,
    rng: &mut R,
) -> Result<SceneGraph, SceneError> {
    let wanted = rng.gen_range(config.min_objects..=config.max_objects.max(config.min_objects));
    let assets = usable_assets(world, config);
    let mut scene = SceneGraph::new(config.floor);
    while scene.len() < wanted {
        let mut placed = false;
        for _ in 0..config.retry_budget.max(1) {
            if try_add(world, config, &assets, &mut scene, rng)? {
                placed = true;
                break;
            }
        }
        if !placed {
            break;
        }
    }
    if scene.len() < config.min_objects {
        return Err(SceneError::GenerationFailure { placed: scene.len(), min: config.min_objects });
    }
    Ok(scene)
}

fn try_add<R: Rng + ?Sized>(
    world: &World,
    config: &SceneConfig,
    assets: &[&AssetSpec],
    scene: &mut SceneGraph,
    rng: &mut R,
) -> Result<bool, SceneError> {
    let mut surfaces: Vec<Option<ObjectId>> = vec![None];
    surfaces.extend(
        scene
            .objects
            .iter()
            .filter(|o| world.placement.is_surface(&world.taxonomy, &o.category))
            .map(|o| Some(o.id.clone())),
    );
    let surface = surfaces.choose(rng).expect("floor is always a surface").clone();
    let area = scene.surface_area(surface.as_ref())?;
    let surface_cat = surface_category(scene, surface.as_ref());
    let fitting: Vec<&AssetSpec> = assets
        .iter()
        .copied()
        .filter(|a| {
            a.size[0] <= area.x_max - area.x_min
                && a.size[1] <= area.y_max - area.y_min
                && world.placement.supports(&world.taxonomy, surface_cat, &a.category)
        })
        .collect();
    let Some(asset) = fitting.choose(rng).copied() else {
        return Ok(false);
    };
    let leaves = scene.objects.iter().map(|o| o.category.as_str()).chain([asset.category.as_str()]);
    if max_divergence(&world.taxonomy, leaves)? > config.max_divergence {
        return Ok(false);
    }
    let center = match place_object(scene, surface.as_ref(), [asset.size[0], asset.size[1]], config, rng) {
        Ok(c) => c,
        Err(SceneError::PlacementFailure) => return Ok(false),
        Err(e) => return Err(e),
    };
    let z = scene.surface_height(surface.as_ref())?;
    let color = *asset.allowed_colors.choose(rng).expect("validated non-empty");
    let material = *asset.allowed_materials.choose(rng).expect("validated non-empty");
    scene.objects.push(ObjectInstance {
        id: ObjectId::new(format!("o{}", scene.len())),
        asset: asset.name.clone(),
        category: asset.category.clone(),
        color,
        material,
        parent: surface,
        position: [center[0], center[1], z],
        size: asset.size,
    });
    Ok(true)
}

/// Replacement candidates for `target`: assets that fit at its position and
/// keep the scene within the divergence bound.
fn replacement_assets<'w>(
    world: &World,
    config: &SceneConfig,
    assets: &[&'w AssetSpec],
    scene: &SceneGraph,
    target: &ObjectInstance,
    different_category: bool,
) -> Result<Vec<&'w AssetSpec>, SceneError> {
    let area = scene.surface_area(target.parent.as_ref())?;
    let surface_cat = surface_category(scene, target.parent.as_ref());
    let siblings: Vec<_> =
        scene.children(target.parent.as_ref()).filter(|o| o.id != target.id).map(|o| o.footprint()).collect();
    let center = [target.position[0], target.position[1]];
    let mut out = Vec::new();
    for &a in assets {
        if (a.category != target.category) != different_category {
            continue;
        }
        if !world.placement.supports(&world.taxonomy, surface_cat, &a.category) {
            continue;
        }
        let fp = super::Footprint::new(center, [a.size[0], a.size[1]]);
        if !area.contains(&fp.rect()) || siblings.iter().any(|s| linf_gap(&fp, s) < config.min_gap) {
            continue;
        }
        let leaves = scene
            .objects
            .iter()
            .filter(|o| o.id != target.id)
            .map(|o| o.category.as_str())
            .chain([a.category.as_str()]);
        if max_divergence(&world.taxonomy, leaves)? > config.max_divergence {
            continue;
        }
        out.push(a);
    }
    Ok(out)
}

fn fresh_combos(asset: &AssetSpec, target: &ObjectInstance) -> Vec<(Color, Material)> {
    let mut out = Vec::new();
    for &c in &asset.allowed_colors {
        for &m in &asset.allowed_materials {
            if (c, m) != (target.color, target.material) {
                out.push((c, m));
            }
        }
    }
    out
}

/// Swaps one object with nothing resting on it for a different one.
pub fn inject_difference<R: Rng + ?Sized>(
    world: &World,
    config: &SceneConfig,
    scene: &SceneGraph,
    rng: &mut R,
) -> Result<ScenePair, SceneError> {
    let assets = usable_assets(world, config);
    let mut replaceable: Vec<usize> = (0..scene.len()).filter(|&i| !scene.has_children(&scene.objects[i].id)).collect();
    replaceable.shuffle(rng);
    for idx in replaceable {
        let target = &scene.objects[idx];
        let first = rng.gen_bool(config.different_category_prob.clamp(0.0, 1.0));
        for different in [first, !first] {
            let mut options = replacement_assets(world, config, &assets, scene, target, different)?;
            let chosen = if different {
                options.choose(rng).map(|a| {
                    let c = *a.allowed_colors.choose(rng).expect("validated non-empty");
                    let m = *a.allowed_materials.choose(rng).expect("validated non-empty");
                    (*a, c, m)
                })
            } else {
                options.retain(|a| !fresh_combos(a, target).is_empty());
                options.choose(rng).map(|a| {
                    let (c, m) = *fresh_combos(a, target).choose(rng).expect("non-empty");
                    (*a, c, m)
                })
            };
            if let Some((asset, color, material)) = chosen {
                let replacement = ObjectInstance {
                    id: ObjectId::new(format!("o{}", scene.len())),
                    asset: asset.name.clone(),
                    category: asset.category.clone(),
                    color,
                    material,
                    parent: target.parent.clone(),
                    position: target.position,
                    size: asset.size,
                };
                let mut scene_a = scene.clone();
                scene_a.objects[idx] = replacement.clone();
                return Ok(ScenePair {
                    scene_q: scene.clone(),
                    scene_a,
                    target_id: target.id.clone(),
                    replacement_id: replacement.id,
                });
            }
        }
    }
    Err(SceneError::InjectionFailure)
}

/// Generates a scene and injects a difference, regenerating on failure.
pub fn generate_pair<R: Rng + ?Sized>(
    world: &World,
    config: &SceneConfig,
    rng: &mut R,
) -> Result<ScenePair, SceneError> {
    let mut last = SceneError::InjectionFailure;
    for _ in 0..config.pair_retry_budget.max(1) {
        let scene = match generate_scene(world, config, rng) {
            Ok(s) => s,
            Err(e @ SceneError::GenerationFailure { .. }) => {
                last = e;
                continue;
            }
            Err(e) => return Err(e),
        };
        match inject_difference(world, config, &scene, rng) {
            Ok(pair) => return Ok(pair),
            Err(SceneError::InjectionFailure) => last = SceneError::InjectionFailure,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}
