//! Rule-based questioner: question gating, slot selection and termination.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asim::{self, AnswerAction};
use crate::scene::{ObjectInstance, SceneGraph};
use crate::state::{StateError, Tracker};
use crate::taxonomy::{Color, Material, ObjectId, Props, Taxonomy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
    Front,
    Back,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Front, Direction::Back];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Front => "front",
            Direction::Back => "back",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuestionType {
    Count,
    Extreme,
    Query,
    Refer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuestionSubtype {
    #[serde(rename = "count-nohint")]
    CountNoHint,
    #[serde(rename = "count-hint")]
    CountHint,
    #[serde(rename = "extreme-pic")]
    ExtremePic,
    #[serde(rename = "extreme-obj")]
    ExtremeObj,
    #[serde(rename = "extreme-obj2")]
    ExtremeObj2,
    #[serde(rename = "query-color")]
    QueryColor,
    #[serde(rename = "query-material")]
    QueryMaterial,
    #[serde(rename = "ref-it")]
    RefIt,
    #[serde(rename = "ref-them")]
    RefThem,
}

impl QuestionSubtype {
    pub const ALL: [QuestionSubtype; 9] = [
        QuestionSubtype::CountNoHint,
        QuestionSubtype::CountHint,
        QuestionSubtype::ExtremePic,
        QuestionSubtype::ExtremeObj,
        QuestionSubtype::ExtremeObj2,
        QuestionSubtype::QueryColor,
        QuestionSubtype::QueryMaterial,
        QuestionSubtype::RefIt,
        QuestionSubtype::RefThem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionSubtype::CountNoHint => "count-nohint",
            QuestionSubtype::CountHint => "count-hint",
            QuestionSubtype::ExtremePic => "extreme-pic",
            QuestionSubtype::ExtremeObj => "extreme-obj",
            QuestionSubtype::ExtremeObj2 => "extreme-obj2",
            QuestionSubtype::QueryColor => "query-color",
            QuestionSubtype::QueryMaterial => "query-material",
            QuestionSubtype::RefIt => "ref-it",
            QuestionSubtype::RefThem => "ref-them",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }

    pub fn question_type(self) -> QuestionType {
        match self {
            QuestionSubtype::CountNoHint | QuestionSubtype::CountHint => QuestionType::Count,
            QuestionSubtype::ExtremePic | QuestionSubtype::ExtremeObj | QuestionSubtype::ExtremeObj2 => {
                QuestionType::Extreme
            }
            QuestionSubtype::QueryColor | QuestionSubtype::QueryMaterial => QuestionType::Query,
            QuestionSubtype::RefIt | QuestionSubtype::RefThem => QuestionType::Refer,
        }
    }

    pub fn of_type(t: QuestionType) -> impl Iterator<Item = QuestionSubtype> {
        Self::ALL.into_iter().filter(move |s| s.question_type() == t)
    }
}

/// A question with its slot values. `own` slots carry what the asker sees
/// in its own scene; some templates disclose it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "subtype", content = "slots")]
pub enum QuestionAction {
    #[serde(rename = "count-nohint")]
    CountNoHint { p_set: Props },
    #[serde(rename = "count-hint")]
    CountHint { p_set: Props, count: u32 },
    #[serde(rename = "extreme-pic")]
    ExtremePic {
        location: Direction,
        #[serde(default)]
        own: Option<Props>,
    },
    #[serde(rename = "extreme-obj")]
    ExtremeObj {
        anchor: Props,
        location: Direction,
        #[serde(default)]
        own: Option<Props>,
    },
    #[serde(rename = "extreme-obj2")]
    ExtremeObj2 {
        anchor: Props,
        anchor_location: Direction,
        location: Direction,
        #[serde(default)]
        own: Option<Props>,
    },
    #[serde(rename = "query-color")]
    QueryColor {
        referent: Props,
        #[serde(default)]
        own: Option<Color>,
    },
    #[serde(rename = "query-material")]
    QueryMaterial {
        referent: Props,
        #[serde(default)]
        own: Option<Material>,
    },
    /// `antecedent` is the previous round's counted set; it is not spoken.
    #[serde(rename = "ref-it")]
    RefIt { antecedent: Props },
    #[serde(rename = "ref-them")]
    RefThem { antecedent: Props },
}

impl QuestionAction {
    pub fn subtype(&self) -> QuestionSubtype {
        match self {
            QuestionAction::CountNoHint { .. } => QuestionSubtype::CountNoHint,
            QuestionAction::CountHint { .. } => QuestionSubtype::CountHint,
            QuestionAction::ExtremePic { .. } => QuestionSubtype::ExtremePic,
            QuestionAction::ExtremeObj { .. } => QuestionSubtype::ExtremeObj,
            QuestionAction::ExtremeObj2 { .. } => QuestionSubtype::ExtremeObj2,
            QuestionAction::QueryColor { .. } => QuestionSubtype::QueryColor,
            QuestionAction::QueryMaterial { .. } => QuestionSubtype::QueryMaterial,
            QuestionAction::RefIt { .. } => QuestionSubtype::RefIt,
            QuestionAction::RefThem { .. } => QuestionSubtype::RefThem,
        }
    }

    /// The property set the question is about; refer questions inherit
    /// their antecedent.
    pub fn property_set(&self) -> Option<&Props> {
        match self {
            QuestionAction::CountNoHint { p_set } | QuestionAction::CountHint { p_set, .. } => Some(p_set),
            QuestionAction::ExtremePic { .. } => None,
            QuestionAction::ExtremeObj { anchor, .. } | QuestionAction::ExtremeObj2 { anchor, .. } => Some(anchor),
            QuestionAction::QueryColor { referent, .. } | QuestionAction::QueryMaterial { referent, .. } => {
                Some(referent)
            }
            QuestionAction::RefIt { antecedent } | QuestionAction::RefThem { antecedent } => Some(antecedent),
        }
    }

    pub fn count_set(&self) -> Option<&Props> {
        match self {
            QuestionAction::CountNoHint { p_set } | QuestionAction::CountHint { p_set, .. } => Some(p_set),
            _ => None,
        }
    }

    pub fn hint(&self) -> Option<u32> {
        match self {
            QuestionAction::CountHint { count, .. } => Some(*count),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessAction {
    pub object_id: ObjectId,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Ask(QuestionAction),
    Guess(GuessAction),
}

#[derive(Debug, Error)]
pub enum QsimError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("the questioner's scene is empty")]
    EmptyScene,
}

/// Strategy knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyConfig {
    /// Extreme, refer and query open up below this many candidates.
    pub candidate_gate: usize,
    /// Refer and query open up after a count answer below this.
    pub count_gate: u32,
    pub max_rounds: usize,
    /// Probability that a disclosed hint is off by one.
    pub hint_epsilon: f64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig { candidate_gate: 5, count_gate: 4, max_rounds: 10, hint_epsilon: 0.0 }
    }
}

fn last_count(tracker: &Tracker) -> Option<(&Props, u32)> {
    match tracker.log().last() {
        Some((q, AnswerAction::Count(k))) => q.count_set().map(|p| (p, *k)),
        _ => None,
    }
}

/// Question types the gating rules currently allow, as subtypes.
pub fn allowed_types(tracker: &Tracker, config: &StrategyConfig) -> Vec<QuestionSubtype> {
    let mut types = BTreeSet::from([QuestionType::Count]);
    if tracker.candidate_count() < config.candidate_gate {
        types.extend([QuestionType::Extreme, QuestionType::Refer, QuestionType::Query]);
    }
    if last_count(tracker).is_some_and(|(_, k)| k < config.count_gate) {
        types.extend([QuestionType::Refer, QuestionType::Query]);
    }
    QuestionSubtype::ALL.into_iter().filter(|s| types.contains(&s.question_type())).collect()
}

/// Count sets not yet asked that some candidate still holds unconfirmed,
/// with their frequencies.
pub fn askable_counts(tracker: &Tracker) -> Vec<(Props, usize)> {
    let asked: BTreeSet<&Props> = tracker.log().iter().filter_map(|(q, _)| q.count_set()).collect();
    let mut sets: BTreeSet<Props> = BTreeSet::new();
    for g in tracker.graphs() {
        if !tracker.is_candidate(g.object_id()) {
            continue;
        }
        for node in g.unconfirmed_nodes() {
            if let Some(p) = node.as_props() {
                if !asked.contains(p) {
                    sets.insert(p.clone());
                }
            }
        }
    }
    sets.into_iter()
        .map(|p| {
            let f = tracker.frequency(&p);
            (p, f)
        })
        .filter(|(_, f)| *f >= 1)
        .collect()
}

/// The askable set whose frequency is closest to half the candidates;
/// ties prefer more properties, then canonical order.
pub fn select_count_slots(tracker: &Tracker) -> Option<(Props, usize)> {
    let half2 = tracker.candidate_count() as i64;
    askable_counts(tracker).into_iter().min_by(|(pa, fa), (pb, fb)| {
        let da = (2 * *fa as i64 - half2).abs();
        let db = (2 * *fb as i64 - half2).abs();
        da.cmp(&db).then_with(|| pb.len().cmp(&pa.len())).then_with(|| pa.cmp(pb))
    })
}

/// Smallest property set naming only `target` in the scene, optionally
/// avoiding one attribute kind. Prefers sets with the most specific category.
pub fn unique_description(
    scene: &SceneGraph,
    taxonomy: &Taxonomy,
    target: &ObjectInstance,
    avoid: Option<asim::AttributeKind>,
) -> Option<Props> {
    let mut sets = taxonomy.property_sets(&target.description()).ok()?;
    sets.retain(|p| match avoid {
        Some(asim::AttributeKind::Color) => p.color().is_none(),
        Some(asim::AttributeKind::Material) => p.material().is_none(),
        None => true,
    });
    let depth = |p: &Props| p.category().map_or(0, |c| taxonomy.chain(c).map_or(0, |ch| ch.len()));
    sets.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.category().is_none().cmp(&b.category().is_none()))
            .then_with(|| depth(b).cmp(&depth(a)))
            .then_with(|| a.cmp(b))
    });
    sets.into_iter().find(|p| asim::count_objects(scene, taxonomy, p) == 1)
}

fn already_asked(tracker: &Tracker, q: &QuestionAction) -> bool {
    tracker.log().iter().any(|(asked, _)| asked == q)
}

/// All slot fillings for a non-count subtype. With `informative_only`, only
/// those whose answer can change the tracker and that were not asked yet.
pub fn enumerate_slots(
    tracker: &Tracker,
    taxonomy: &Taxonomy,
    subtype: QuestionSubtype,
    informative_only: bool,
) -> Vec<QuestionAction> {
    let scene = tracker.scene();
    let useful =
        |o: Option<&ObjectInstance>| -> bool { !informative_only || o.is_some_and(|o| tracker.is_candidate(&o.id)) };
    fn pick(objs: Vec<&ObjectInstance>, d: Direction, strict: bool) -> Option<&ObjectInstance> {
        if strict {
            asim::strict_extreme(objs, d)
        } else {
            asim::extreme_object(objs, d)
        }
    }
    let mut out = Vec::new();
    match subtype {
        QuestionSubtype::ExtremePic => {
            for d in Direction::ALL {
                let o = pick(scene.objects.iter().collect(), d, informative_only);
                if useful(o) {
                    out.push(QuestionAction::ExtremePic { location: d, own: o.map(|o| o.description()) });
                }
            }
        }
        QuestionSubtype::ExtremeObj => {
            for anchor in scene.objects.iter().filter(|o| scene.has_children(&o.id)) {
                let Some(desc) = unique_description(scene, taxonomy, anchor, None) else { continue };
                for d in Direction::ALL {
                    let o = pick(scene.children(Some(&anchor.id)).collect(), d, informative_only);
                    if useful(o) {
                        out.push(QuestionAction::ExtremeObj {
                            anchor: desc.clone(),
                            location: d,
                            own: o.map(|o| o.description()),
                        });
                    }
                }
            }
        }
        QuestionSubtype::ExtremeObj2 => {
            let mut anchors: BTreeSet<Props> = BTreeSet::new();
            for o in scene.objects.iter().filter(|o| scene.has_children(&o.id)) {
                anchors.extend(taxonomy.property_sets(&o.description()).unwrap_or_default());
            }
            for anchor in anchors {
                let group: Vec<_> = asim::matching(scene, taxonomy, &anchor).collect();
                if group.len() < 2 {
                    continue;
                }
                for ad in Direction::ALL {
                    let Some(a) = pick(group.clone(), ad, informative_only) else { continue };
                    if !scene.has_children(&a.id) {
                        continue;
                    }
                    for d in Direction::ALL {
                        let o = pick(scene.children(Some(&a.id)).collect(), d, informative_only);
                        if useful(o) {
                            out.push(QuestionAction::ExtremeObj2 {
                                anchor: anchor.clone(),
                                anchor_location: ad,
                                location: d,
                                own: o.map(|o| o.description()),
                            });
                        }
                    }
                }
            }
        }
        QuestionSubtype::QueryColor | QuestionSubtype::QueryMaterial => {
            let kind = if subtype == QuestionSubtype::QueryColor {
                asim::AttributeKind::Color
            } else {
                asim::AttributeKind::Material
            };
            for o in &scene.objects {
                if informative_only && !tracker.is_candidate(&o.id) {
                    continue;
                }
                let Some(referent) = unique_description(scene, taxonomy, o, Some(kind)) else { continue };
                let q = match kind {
                    asim::AttributeKind::Color => {
                        let node = referent.clone().with_color(o.color);
                        if informative_only && !tracker.graph(&o.id).is_some_and(|g| g.is_unconfirmed_props(&node)) {
                            continue;
                        }
                        QuestionAction::QueryColor { referent, own: Some(o.color) }
                    }
                    asim::AttributeKind::Material => {
                        let node = referent.clone().with_material(o.material);
                        if informative_only && !tracker.graph(&o.id).is_some_and(|g| g.is_unconfirmed_props(&node)) {
                            continue;
                        }
                        QuestionAction::QueryMaterial { referent, own: Some(o.material) }
                    }
                };
                out.push(q);
            }
        }
        QuestionSubtype::RefIt | QuestionSubtype::RefThem => {
            if let Some((p, k)) = last_count(tracker) {
                let fits = if subtype == QuestionSubtype::RefIt { k == 1 } else { k >= 2 };
                let mine: Vec<_> = asim::matching(scene, taxonomy, p).collect();
                let informative = mine.len() as u32 != k || mine.iter().any(|o| tracker.is_candidate(&o.id));
                if fits && (informative || !informative_only) {
                    let antecedent = p.clone();
                    out.push(if subtype == QuestionSubtype::RefIt {
                        QuestionAction::RefIt { antecedent }
                    } else {
                        QuestionAction::RefThem { antecedent }
                    });
                }
            }
        }
        QuestionSubtype::CountNoHint | QuestionSubtype::CountHint => {
            let sets: Vec<Props> = if informative_only {
                askable_counts(tracker).into_iter().map(|(p, _)| p).collect()
            } else {
                let mut all = BTreeSet::new();
                for o in &scene.objects {
                    all.extend(taxonomy.property_sets(&o.description()).unwrap_or_default());
                }
                all.into_iter().collect()
            };
            for p_set in sets {
                out.push(if subtype == QuestionSubtype::CountHint {
                    let count = asim::count_objects(scene, taxonomy, &p_set);
                    QuestionAction::CountHint { p_set, count }
                } else {
                    QuestionAction::CountNoHint { p_set }
                });
            }
        }
    }
    if informative_only {
        out.retain(|q| !already_asked(tracker, q));
    }
    out
}

/// Candidate with the least confirmed evidence; used when no question is
/// left to ask or rounds run out.
pub fn forced_guess(tracker: &Tracker) -> Result<GuessAction, QsimError> {
    if let Some(id) = tracker.resolved_target()? {
        return Ok(GuessAction { object_id: id });
    }
    let pool: Vec<&ObjectId> = {
        let c = tracker.candidates();
        if c.is_empty() {
            tracker.scene().ids().collect()
        } else {
            c
        }
    };
    pool.into_iter()
        .min_by_key(|id| tracker.graph(id).map(|g| g.confirmed_count()).unwrap_or(usize::MAX))
        .map(|id| GuessAction { object_id: id.clone() })
        .ok_or(QsimError::EmptyScene)
}

fn noisy_hint<R: Rng + ?Sized>(count: u32, epsilon: f64, rng: &mut R) -> u32 {
    if epsilon > 0.0 && rng.gen_bool(epsilon.min(1.0)) {
        if count == 0 || rng.gen_bool(0.5) {
            count + 1
        } else {
            count - 1
        }
    } else {
        count
    }
}

/// The rule-based questioner.
#[derive(Clone, Debug, Default)]
pub struct Questioner {
    pub config: StrategyConfig,
}

impl Questioner {
    pub fn new(config: StrategyConfig) -> Self {
        Questioner { config }
    }

    /// Guess once the target is pinned down, otherwise pick a question type
    /// uniformly among the allowed ones and fill its slots.
    pub fn next_step<R: Rng + ?Sized>(
        &self,
        tracker: &Tracker,
        taxonomy: &Taxonomy,
        rng: &mut R,
    ) -> Result<Step, QsimError> {
        if let Some(id) = tracker.resolved_target()? {
            return Ok(Step::Guess(GuessAction { object_id: id }));
        }
        let allowed = allowed_types(tracker, &self.config);
        let mut types: Vec<QuestionType> = allowed.iter().map(|s| s.question_type()).collect();
        types.dedup();
        while !types.is_empty() {
            let ti = rng.gen_range(0..types.len());
            let t = types[ti];
            if let Some(q) = self.fill_type(tracker, taxonomy, t, &allowed, rng) {
                return Ok(Step::Ask(q));
            }
            types.remove(ti);
        }
        Ok(Step::Guess(forced_guess(tracker)?))
    }

    fn fill_type<R: Rng + ?Sized>(
        &self,
        tracker: &Tracker,
        taxonomy: &Taxonomy,
        t: QuestionType,
        allowed: &[QuestionSubtype],
        rng: &mut R,
    ) -> Option<QuestionAction> {
        if t == QuestionType::Count {
            let (p_set, _) = select_count_slots(tracker)?;
            return Some(if rng.gen_bool(0.5) {
                let own = asim::count_objects(tracker.scene(), taxonomy, &p_set);
                QuestionAction::CountHint { p_set, count: noisy_hint(own, self.config.hint_epsilon, rng) }
            } else {
                QuestionAction::CountNoHint { p_set }
            });
        }
        let mut subtypes: Vec<QuestionSubtype> = QuestionSubtype::of_type(t).filter(|s| allowed.contains(s)).collect();
        while !subtypes.is_empty() {
            let si = rng.gen_range(0..subtypes.len());
            let slots = enumerate_slots(tracker, taxonomy, subtypes[si], true);
            if let Some(q) = slots.choose(rng) {
                return Some(q.clone());
            }
            subtypes.remove(si);
        }
        None
    }
}

/// A structurally valid question of `subtype` about random content of
/// `scene`, without any strategy. Used to probe answerers.
pub fn sample_question<R: Rng + ?Sized>(
    scene: &SceneGraph,
    taxonomy: &Taxonomy,
    subtype: QuestionSubtype,
    rng: &mut R,
) -> Option<QuestionAction> {
    let object = scene.objects.choose(rng)?;
    let random_set = |o: &ObjectInstance, rng: &mut R| {
        let sets = taxonomy.property_sets(&o.description()).ok()?;
        sets.choose(rng).cloned()
    };
    let direction = |rng: &mut R| *Direction::ALL.choose(rng).expect("non-empty");
    Some(match subtype {
        QuestionSubtype::CountNoHint => QuestionAction::CountNoHint { p_set: random_set(object, rng)? },
        QuestionSubtype::CountHint => {
            let p_set = random_set(object, rng)?;
            QuestionAction::CountHint { count: rng.gen_range(0..5), p_set }
        }
        QuestionSubtype::ExtremePic => QuestionAction::ExtremePic { location: direction(rng), own: None },
        QuestionSubtype::ExtremeObj => {
            let surfaces: Vec<_> = scene.objects.iter().filter(|o| scene.has_children(&o.id)).collect();
            let anchor = surfaces.choose(rng).copied().unwrap_or(object);
            QuestionAction::ExtremeObj { anchor: random_set(anchor, rng)?, location: direction(rng), own: None }
        }
        QuestionSubtype::ExtremeObj2 => {
            let surfaces: Vec<_> = scene.objects.iter().filter(|o| scene.has_children(&o.id)).collect();
            let anchor = surfaces.choose(rng).copied().unwrap_or(object);
            QuestionAction::ExtremeObj2 {
                anchor: random_set(anchor, rng)?,
                anchor_location: direction(rng),
                location: direction(rng),
                own: None,
            }
        }
        QuestionSubtype::QueryColor => QuestionAction::QueryColor { referent: random_set(object, rng)?, own: None },
        QuestionSubtype::QueryMaterial => {
            QuestionAction::QueryMaterial { referent: random_set(object, rng)?, own: None }
        }
        QuestionSubtype::RefIt => QuestionAction::RefIt { antecedent: random_set(object, rng)? },
        QuestionSubtype::RefThem => QuestionAction::RefThem { antecedent: random_set(object, rng)? },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asim::AnswerAction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obj(id: &str, cat: &str, color: Color, material: Material, parent: Option<&str>, x: f64) -> ObjectInstance {
        ObjectInstance {
            id: ObjectId::new(id),
            asset: format!("{cat}_01"),
            category: cat.into(),
            color,
            material,
            parent: parent.map(ObjectId::new),
            position: [x, 5.0, 0.0],
            size: [0.5, 0.5, 0.5],
        }
    }

    fn twelve() -> SceneGraph {
        use Color::*;
        use Material::*;
        let cats =
            ["apple", "banana", "vase", "frame", "cup", "plate", "bread", "pizza", "cola", "milk", "tea", "beer"];
        let colors = [Red, Yellow, White, Black, White, White, Brown, Red, Black, White, Green, Brown];
        let objects = cats
            .iter()
            .zip(colors)
            .enumerate()
            .map(|(i, (c, col))| obj(&format!("o{i}"), c, col, Plastic, None, i as f64))
            .collect();
        SceneGraph { bounds: [16.0, 12.0], objects }
    }

    #[test]
    fn fresh_episode_allows_only_counts() {
        let t = Taxonomy::builtin();
        let tr = Tracker::new(&twelve(), &t).unwrap();
        let allowed = allowed_types(&tr, &StrategyConfig::default());
        assert_eq!(allowed, vec![QuestionSubtype::CountNoHint, QuestionSubtype::CountHint]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let step = Questioner::default().next_step(&tr, &t, &mut rng).unwrap();
        assert!(matches!(step, Step::Ask(QuestionAction::CountHint { .. } | QuestionAction::CountNoHint { .. })));
    }

    #[test]
    fn small_count_answer_opens_refer() {
        let t = Taxonomy::builtin();
        let mut tr = Tracker::new(&twelve(), &t).unwrap();
        let q = QuestionAction::CountNoHint { p_set: Props::of_category("fruit") };
        tr.apply_answer(&t, &q, &AnswerAction::Count(2)).unwrap();
        let allowed = allowed_types(&tr, &StrategyConfig::default());
        assert!(allowed.contains(&QuestionSubtype::RefThem));
        assert!(!allowed.contains(&QuestionSubtype::ExtremePic));
        let them = enumerate_slots(&tr, &t, QuestionSubtype::RefThem, true);
        assert_eq!(them, vec![QuestionAction::RefThem { antecedent: Props::of_category("fruit") }]);
        assert!(enumerate_slots(&tr, &t, QuestionSubtype::RefIt, true).is_empty());
    }

    #[test]
    fn few_candidates_open_extreme() {
        let t = Taxonomy::builtin();
        let mut s = twelve();
        s.objects.truncate(4);
        let tr = Tracker::new(&s, &t).unwrap();
        let allowed = allowed_types(&tr, &StrategyConfig::default());
        assert!(allowed.contains(&QuestionSubtype::ExtremePic));
        assert!(allowed.contains(&QuestionSubtype::RefIt));
    }

    #[test]
    fn count_choice_is_half_the_candidates() {
        let t = Taxonomy::builtin();
        let tr = Tracker::new(&twelve(), &t).unwrap();
        let (p, f) = select_count_slots(&tr).unwrap();
        // Brute force over every askable set.
        for (_, g) in askable_counts(&tr) {
            assert!((2 * g as i64 - 12).abs() >= (2 * f as i64 - 12).abs());
        }
        assert!(!p.is_empty());
    }

    #[test]
    fn tie_prefers_larger_sets() {
        let t = Taxonomy::builtin();
        use Color::*;
        use Material::*;
        let s = SceneGraph {
            bounds: [16.0, 12.0],
            objects: vec![
                obj("o0", "nightstand", White, Wooden, None, 1.0),
                obj("o1", "chair", White, Metal, None, 3.0),
                obj("o2", "sofa", White, Fabric, None, 5.0),
                obj("o3", "vase", Black, Glass, None, 7.0),
                obj("o4", "frame", Black, Plastic, None, 9.0),
                obj("o5", "plate", Red, Ceramic, None, 11.0),
            ],
        };
        let tr = Tracker::new(&s, &t).unwrap();
        let (p, f) = select_count_slots(&tr).unwrap();
        assert_eq!(f, 3);
        assert_eq!(p, Props::of_color(White).with_category("furniture"));
    }

    #[test]
    fn query_skips_confirmed_color() {
        let t = Taxonomy::builtin();
        let mut s = twelve();
        s.objects.truncate(3);
        let mut tr = Tracker::new(&s, &t).unwrap();
        let before = enumerate_slots(&tr, &t, QuestionSubtype::QueryColor, true);
        assert!(before.iter().any(|q| q.property_set() == Some(&Props::of_category("apple"))));
        tr.confirm(
            &ObjectId::new("o0"),
            &crate::taxonomy::PropertySet::Props(Props::of_color(Color::Red).with_category("apple")),
        )
        .unwrap();
        let after = enumerate_slots(&tr, &t, QuestionSubtype::QueryColor, true);
        assert!(!after.iter().any(|q| q.property_set() == Some(&Props::of_category("apple"))));
    }

    #[test]
    fn extreme_obj_names_anchor() {
        let t = Taxonomy::builtin();
        use Color::*;
        use Material::*;
        let s = SceneGraph {
            bounds: [16.0, 12.0],
            objects: vec![
                obj("o0", "tea table", Brown, Wooden, None, 8.0),
                obj("o1", "vase", White, Glass, Some("o0"), 7.0),
                obj("o2", "frame", Black, Wooden, Some("o0"), 9.0),
            ],
        };
        let tr = Tracker::new(&s, &t).unwrap();
        let slots = enumerate_slots(&tr, &t, QuestionSubtype::ExtremeObj, true);
        let left = QuestionAction::ExtremeObj {
            anchor: Props::of_category("tea table"),
            location: Direction::Left,
            own: Some(Props::describe(White, Glass, "vase")),
        };
        assert!(slots.contains(&left));
    }

    #[test]
    fn serde_shape() {
        let q = QuestionAction::CountHint { p_set: Props::of_color(Color::White), count: 4 };
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, r#"{"subtype":"count-hint","slots":{"p_set":{"color":"white"},"count":4}}"#);
        assert_eq!(serde_json::from_str::<QuestionAction>(&json).unwrap(), q);
    }
}
