//! Answerer: reads ground truth off its own scene for every question
//! subtype, plus a perturbing wrapper for degradation studies.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qsim::{Direction, QuestionAction};
use crate::scene::{ObjectInstance, SceneGraph};
use crate::taxonomy::{Color, Material, Props, Taxonomy};
use crate::world::World;

/// `count` objects all satisfying `description`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DescriptionGroup {
    pub description: Props,
    pub count: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoneReason {
    /// Nothing satisfies the condition.
    Absent,
    /// The condition does not single out one object.
    Ambiguous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeValue {
    Color(Color),
    Material(Material),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum AnswerAction {
    Count(u32),
    Description(Vec<DescriptionGroup>),
    Attribute(AttributeValue),
    None(NoneReason),
}

impl AnswerAction {
    pub fn kind(&self) -> &'static str {
        match self {
            AnswerAction::Count(_) => "count",
            AnswerAction::Description(_) => "description",
            AnswerAction::Attribute(_) => "attribute",
            AnswerAction::None(_) => "none",
        }
    }

    /// Total multiplicity of a description answer.
    pub fn described_total(&self) -> Option<u32> {
        match self {
            AnswerAction::Description(groups) => Some(groups.iter().map(|g| g.count).sum()),
            _ => None,
        }
    }
}

/// Objects whose full description entails `p`.
pub fn matching<'s>(
    scene: &'s SceneGraph,
    taxonomy: &'s Taxonomy,
    p: &'s Props,
) -> impl Iterator<Item = &'s ObjectInstance> + 's {
    scene.objects.iter().filter(move |o| taxonomy.entails(&o.description(), p))
}

pub fn count_objects(scene: &SceneGraph, taxonomy: &Taxonomy, p: &Props) -> u32 {
    matching(scene, taxonomy, p).count() as u32
}

// Smaller is more extreme.
fn extremity(o: &ObjectInstance, direction: Direction) -> f64 {
    match direction {
        Direction::Left => o.position[0],
        Direction::Right => -o.position[0],
        Direction::Front => o.position[1],
        Direction::Back => -o.position[1],
    }
}

/// The most extreme object along `direction`; ties go to the smaller id.
pub fn extreme_object<'s>(
    objects: impl IntoIterator<Item = &'s ObjectInstance>,
    direction: Direction,
) -> Option<&'s ObjectInstance> {
    objects
        .into_iter()
        .min_by(|a, b| extremity(a, direction).total_cmp(&extremity(b, direction)).then_with(|| a.id.cmp(&b.id)))
}

/// Like [`extreme_object`] but `None` unless the extreme is unique.
pub fn strict_extreme<'s>(
    objects: impl IntoIterator<Item = &'s ObjectInstance>,
    direction: Direction,
) -> Option<&'s ObjectInstance> {
    let objects: Vec<_> = objects.into_iter().collect();
    let best = extreme_object(objects.iter().copied(), direction)?;
    let key = extremity(best, direction);
    let ties = objects.iter().filter(|o| extremity(o, direction) == key).count();
    (ties == 1).then_some(best)
}

/// Outcome of locating the object an extreme question asks about.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Located<'s> {
    Found(&'s ObjectInstance),
    Missing(NoneReason),
}

/// Finds the object an extreme question refers to. `strict` rejects ties
/// at either selection step as ambiguous.
pub fn locate_extreme<'s>(
    scene: &'s SceneGraph,
    taxonomy: &Taxonomy,
    question: &QuestionAction,
    strict: bool,
) -> Option<Located<'s>> {
    let pick = |objs: Vec<&'s ObjectInstance>, dir: Direction| -> Located<'s> {
        if objs.is_empty() {
            return Located::Missing(NoneReason::Absent);
        }
        let found = if strict { strict_extreme(objs, dir) } else { extreme_object(objs, dir) };
        match found {
            Some(o) => Located::Found(o),
            None => Located::Missing(NoneReason::Ambiguous),
        }
    };
    let children = |anchor: &'s ObjectInstance| scene.children(Some(&anchor.id)).collect::<Vec<_>>();
    Some(match question {
        QuestionAction::ExtremePic { location, .. } => pick(scene.objects.iter().collect(), *location),
        QuestionAction::ExtremeObj { anchor, location, .. } => {
            let anchors: Vec<_> = scene.objects.iter().filter(|o| taxonomy.entails(&o.description(), anchor)).collect();
            match anchors.as_slice() {
                [] => Located::Missing(NoneReason::Absent),
                [one] => pick(children(one), *location),
                _ => Located::Missing(NoneReason::Ambiguous),
            }
        }
        QuestionAction::ExtremeObj2 { anchor, anchor_location, location, .. } => {
            let anchors: Vec<_> = scene.objects.iter().filter(|o| taxonomy.entails(&o.description(), anchor)).collect();
            match pick(anchors, *anchor_location) {
                Located::Found(a) => pick(children(a), *location),
                missing => missing,
            }
        }
        _ => return None,
    })
}

/// Groups objects by category, describing each group with the fewest
/// attributes that still tell its distinct color/material pairs apart.
pub fn describe_objects(objects: &[&ObjectInstance]) -> Vec<DescriptionGroup> {
    let mut by_category: BTreeMap<&str, Vec<&ObjectInstance>> = BTreeMap::new();
    for o in objects {
        by_category.entry(o.category.as_str()).or_default().push(o);
    }
    let mut counts: BTreeMap<Props, u32> = BTreeMap::new();
    for (category, group) in by_category {
        let mut combos: Vec<(Color, Material)> = group.iter().map(|o| (o.color, o.material)).collect();
        combos.sort();
        combos.dedup();
        let distinct = |f: &dyn Fn(&(Color, Material)) -> u8| {
            let mut v: Vec<u8> = combos.iter().map(f).collect();
            v.sort();
            v.dedup();
            v.len()
        };
        let (use_color, use_material) = if combos.len() == 1 {
            (false, false)
        } else if distinct(&|c| c.0 as u8) == combos.len() {
            (true, false)
        } else if distinct(&|c| c.1 as u8) == combos.len() {
            (false, true)
        } else {
            (true, true)
        };
        for o in group {
            let p = Props::new(
                use_color.then_some(o.color),
                use_material.then_some(o.material),
                Some(category.to_string()),
            )
            .expect("category present");
            *counts.entry(p).or_default() += 1;
        }
    }
    let mut groups: Vec<DescriptionGroup> =
        counts.into_iter().map(|(description, count)| DescriptionGroup { description, count }).collect();
    groups.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.description.cmp(&b.description)));
    groups
}

pub fn resolve_refer(scene: &SceneGraph, taxonomy: &Taxonomy, antecedent: &Props) -> AnswerAction {
    let objs: Vec<_> = matching(scene, taxonomy, antecedent).collect();
    if objs.is_empty() {
        AnswerAction::None(NoneReason::Absent)
    } else {
        AnswerAction::Description(describe_objects(&objs))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttributeKind {
    Color,
    Material,
}

pub fn attribute_of(o: &ObjectInstance, which: AttributeKind) -> AttributeValue {
    match which {
        AttributeKind::Color => AttributeValue::Color(o.color),
        AttributeKind::Material => AttributeValue::Material(o.material),
    }
}

pub fn query_attribute(
    scene: &SceneGraph,
    taxonomy: &Taxonomy,
    referent: &Props,
    which: AttributeKind,
) -> AnswerAction {
    let values: Vec<AttributeValue> = matching(scene, taxonomy, referent).map(|o| attribute_of(o, which)).collect();
    match values.first() {
        None => AnswerAction::None(NoneReason::Absent),
        Some(first) if values.iter().all(|v| v == first) => AnswerAction::Attribute(*first),
        Some(_) => AnswerAction::None(NoneReason::Ambiguous),
    }
}

fn full_description(o: &ObjectInstance) -> AnswerAction {
    AnswerAction::Description(vec![DescriptionGroup { description: o.description(), count: 1 }])
}

/// Ground-truth answer to `question` over `scene`.
pub fn oracle_answer(scene: &SceneGraph, taxonomy: &Taxonomy, question: &QuestionAction) -> AnswerAction {
    match question {
        QuestionAction::CountNoHint { p_set } | QuestionAction::CountHint { p_set, .. } => {
            AnswerAction::Count(count_objects(scene, taxonomy, p_set))
        }
        QuestionAction::ExtremePic { .. } | QuestionAction::ExtremeObj { .. } | QuestionAction::ExtremeObj2 { .. } => {
            match locate_extreme(scene, taxonomy, question, false).expect("extreme subtype") {
                Located::Found(o) => full_description(o),
                Located::Missing(reason) => AnswerAction::None(reason),
            }
        }
        QuestionAction::QueryColor { referent, .. } => query_attribute(scene, taxonomy, referent, AttributeKind::Color),
        QuestionAction::QueryMaterial { referent, .. } => {
            query_attribute(scene, taxonomy, referent, AttributeKind::Material)
        }
        QuestionAction::RefIt { antecedent } | QuestionAction::RefThem { antecedent } => {
            resolve_refer(scene, taxonomy, antecedent)
        }
    }
}

/// Something that answers question actions about its own scene.
pub trait Answerer {
    fn answer(&mut self, question: &QuestionAction) -> AnswerAction;
}

/// Truthful answerer.
pub struct Oracle<'a> {
    pub world: &'a World,
    pub scene: &'a SceneGraph,
}

impl Answerer for Oracle<'_> {
    fn answer(&mut self, question: &QuestionAction) -> AnswerAction {
        oracle_answer(self.scene, &self.world.taxonomy, question)
    }
}

/// Oracle whose answers are perturbed with probability `epsilon`.
pub struct NoisyAnswerer<'a, R> {
    pub oracle: Oracle<'a>,
    pub epsilon: f64,
    pub rng: R,
}

impl<R: Rng> Answerer for NoisyAnswerer<'_, R> {
    fn answer(&mut self, question: &QuestionAction) -> AnswerAction {
        let truth = self.oracle.answer(question);
        noisy_answer(self.oracle.world, question, truth, self.epsilon, &mut self.rng)
    }
}

fn other<T: Copy + PartialEq, R: Rng + ?Sized>(all: &[T], not: T, rng: &mut R) -> T {
    let rest: Vec<T> = all.iter().copied().filter(|&v| v != not).collect();
    *rest.choose(rng).expect("vocabulary has at least two values")
}

fn random_description<R: Rng + ?Sized>(world: &World, rng: &mut R) -> Props {
    let asset = world.catalog.assets().choose(rng).expect("catalog is non-empty");
    Props::describe(
        *asset.allowed_colors.choose(rng).expect("non-empty"),
        *asset.allowed_materials.choose(rng).expect("non-empty"),
        asset.category.clone(),
    )
}

// Changes the color, or sets one when absent.
fn swap_description<R: Rng + ?Sized>(p: &Props, rng: &mut R) -> Props {
    match p.color() {
        Some(c) => p.clone().with_color(other(Color::ALL, c, rng)),
        None => p.clone().with_color(*Color::ALL.choose(rng).expect("non-empty")),
    }
}

/// An answer guaranteed to differ from `answer`, of a kind valid for
/// `question`.
pub fn perturb<R: Rng + ?Sized>(
    world: &World,
    question: &QuestionAction,
    answer: &AnswerAction,
    rng: &mut R,
) -> AnswerAction {
    match answer {
        AnswerAction::Count(0) => AnswerAction::Count(1),
        AnswerAction::Count(k) => AnswerAction::Count(if rng.gen_bool(0.5) { k + 1 } else { k - 1 }),
        AnswerAction::Description(groups) => {
            let mut groups = groups.clone();
            let i = rng.gen_range(0..groups.len());
            if groups.len() > 1 && rng.gen_bool(0.5) {
                groups.remove(i);
            } else {
                groups[i].description = swap_description(&groups[i].description, rng);
            }
            AnswerAction::Description(groups)
        }
        AnswerAction::Attribute(AttributeValue::Color(c)) => {
            AnswerAction::Attribute(AttributeValue::Color(other(Color::ALL, *c, rng)))
        }
        AnswerAction::Attribute(AttributeValue::Material(m)) => {
            AnswerAction::Attribute(AttributeValue::Material(other(Material::ALL, *m, rng)))
        }
        AnswerAction::None(_) => match question {
            QuestionAction::QueryColor { .. } => {
                AnswerAction::Attribute(AttributeValue::Color(*Color::ALL.choose(rng).expect("non-empty")))
            }
            QuestionAction::QueryMaterial { .. } => {
                AnswerAction::Attribute(AttributeValue::Material(*Material::ALL.choose(rng).expect("non-empty")))
            }
            _ => AnswerAction::Description(vec![DescriptionGroup {
                description: random_description(world, rng),
                count: 1,
            }]),
        },
    }
}

pub fn noisy_answer<R: Rng + ?Sized>(
    world: &World,
    question: &QuestionAction,
    answer: AnswerAction,
    epsilon: f64,
    rng: &mut R,
) -> AnswerAction {
    if epsilon > 0.0 && rng.gen_bool(epsilon.min(1.0)) {
        perturb(world, question, &answer, rng)
    } else {
        answer
    }
}
