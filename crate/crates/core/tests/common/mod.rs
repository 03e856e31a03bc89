//! Brute-force reference implementations shared by the integration tests.
//! They read the raw data files and avoid the library's own lookups.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use diffgame::asim::{AnswerAction, AttributeValue, DescriptionGroup, NoneReason};
use diffgame::qsim::{Direction, QuestionAction};
use diffgame::scene::{ObjectInstance, SceneGraph, ScenePair};
use diffgame::taxonomy::{Color, Material, ObjectId, Props};

fn data(name: &str) -> toml::Table {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap().parse().unwrap()
}

/// Parent links and placement edges straight from the data files.
pub struct RawWorld {
    pub parent: BTreeMap<String, Option<String>>,
    pub supports: BTreeMap<String, Vec<String>>,
}

impl RawWorld {
    pub fn load() -> Self {
        let mut parent = BTreeMap::new();
        for c in data("taxonomy.toml")["category"].as_array().unwrap() {
            let name = c["name"].as_str().unwrap().to_string();
            parent.insert(name, c.get("parent").map(|p| p.as_str().unwrap().to_string()));
        }
        let mut supports = BTreeMap::new();
        for s in data("placement.toml")["surface"].as_array().unwrap() {
            let items = s["supports"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
            supports.insert(s["category"].as_str().unwrap().to_string(), items);
        }
        RawWorld { parent, supports }
    }

    /// The category followed by its ancestors.
    pub fn chain(&self, category: &str) -> Vec<String> {
        let mut out = vec![category.to_string()];
        let mut cur = category.to_string();
        while let Some(Some(p)) = self.parent.get(&cur) {
            out.push(p.clone());
            cur = p.clone();
        }
        out
    }

    pub fn children(&self, category: &str) -> Vec<&str> {
        self.parent.iter().filter(|(_, p)| p.as_deref() == Some(category)).map(|(c, _)| c.as_str()).collect()
    }

    pub fn entails(&self, specific: &Props, general: &Props) -> bool {
        let color = general.color().is_none_or(|c| specific.color() == Some(c));
        let material = general.material().is_none_or(|m| specific.material() == Some(m));
        let category = match (specific.category(), general.category()) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(s), Some(g)) => self.chain(s).iter().any(|c| c == g),
        };
        color && material && category
    }

    /// Every non-empty subset of the object's atoms, with categories taken
    /// from its chain.
    pub fn property_sets(&self, o: &ObjectInstance) -> Vec<Props> {
        let mut out = Vec::new();
        for c in [None, Some(o.color)] {
            for m in [None, Some(o.material)] {
                let cats = std::iter::once(None).chain(self.chain(&o.category).into_iter().map(Some));
                for cat in cats {
                    if let Some(p) = Props::new(c, m, cat) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    /// Whether `surface` (a category, or "floor") may carry `category`.
    pub fn licensed(&self, surface: &str, category: &str) -> bool {
        let surfaces = if surface == "floor" { vec!["floor".to_string()] } else { self.chain(surface) };
        let items = self.chain(category);
        surfaces.iter().any(|s| self.supports.get(s).is_some_and(|list| list.iter().any(|x| items.contains(x))))
    }

    pub fn divergence(&self, scene: &SceneGraph, category: &str) -> usize {
        self.children(category)
            .into_iter()
            .filter(|child| scene.objects.iter().any(|o| self.chain(&o.category).iter().any(|c| c == child)))
            .count()
    }
}

pub fn description(o: &ObjectInstance) -> Props {
    Props::describe(o.color, o.material, o.category.clone())
}

fn key(o: &ObjectInstance, d: Direction) -> f64 {
    match d {
        Direction::Left => o.position[0],
        Direction::Right => -o.position[0],
        Direction::Front => o.position[1],
        Direction::Back => -o.position[1],
    }
}

fn extreme<'a>(objs: &[&'a ObjectInstance], d: Direction) -> Option<&'a ObjectInstance> {
    let mut best: Option<&ObjectInstance> = None;
    for &o in objs {
        best = match best {
            None => Some(o),
            Some(b) if key(o, d) < key(b, d) || (key(o, d) == key(b, d) && o.id < b.id) => Some(o),
            keep => keep,
        };
    }
    best
}

fn found(o: &ObjectInstance) -> AnswerAction {
    AnswerAction::Description(vec![DescriptionGroup { description: description(o), count: 1 }])
}

fn describe_group(objs: &[&ObjectInstance]) -> Vec<DescriptionGroup> {
    let mut counts: BTreeMap<Props, u32> = BTreeMap::new();
    let categories: BTreeSet<&str> = objs.iter().map(|o| o.category.as_str()).collect();
    for cat in categories {
        let members: Vec<&&ObjectInstance> = objs.iter().filter(|o| o.category == cat).collect();
        let combos: BTreeSet<(Color, Material)> = members.iter().map(|o| (o.color, o.material)).collect();
        let colors: BTreeSet<Color> = combos.iter().map(|c| c.0).collect();
        let materials: BTreeSet<Material> = combos.iter().map(|c| c.1).collect();
        for o in members {
            let p = if combos.len() == 1 {
                Props::of_category(cat)
            } else if colors.len() == combos.len() {
                Props::of_category(cat).with_color(o.color)
            } else if materials.len() == combos.len() {
                Props::of_category(cat).with_material(o.material)
            } else {
                description(o)
            };
            *counts.entry(p).or_insert(0) += 1;
        }
    }
    let mut groups: Vec<DescriptionGroup> =
        counts.into_iter().map(|(description, count)| DescriptionGroup { description, count }).collect();
    groups.sort_by(|a, b| b.count.cmp(&a.count).then(a.description.cmp(&b.description)));
    groups
}

/// Answer by scanning every object.
pub fn scan_answer(raw: &RawWorld, scene: &SceneGraph, q: &QuestionAction) -> AnswerAction {
    let matches = |p: &Props| -> Vec<&ObjectInstance> {
        scene.objects.iter().filter(|o| raw.entails(&description(o), p)).collect()
    };
    let children = |a: &ObjectInstance| -> Vec<&ObjectInstance> {
        scene.objects.iter().filter(|o| o.parent.as_ref() == Some(&a.id)).collect()
    };
    let absent = AnswerAction::None(NoneReason::Absent);
    match q {
        QuestionAction::CountNoHint { p_set } | QuestionAction::CountHint { p_set, .. } => {
            AnswerAction::Count(matches(p_set).len() as u32)
        }
        QuestionAction::ExtremePic { location, .. } => {
            let all: Vec<&ObjectInstance> = scene.objects.iter().collect();
            extreme(&all, *location).map_or(absent, found)
        }
        QuestionAction::ExtremeObj { anchor, location, .. } => match matches(anchor).as_slice() {
            [] => absent,
            [one] => extreme(&children(one), *location).map_or(absent, found),
            _ => AnswerAction::None(NoneReason::Ambiguous),
        },
        QuestionAction::ExtremeObj2 { anchor, anchor_location, location, .. } => {
            match extreme(&matches(anchor), *anchor_location) {
                None => absent,
                Some(a) => extreme(&children(a), *location).map_or(absent, found),
            }
        }
        QuestionAction::QueryColor { referent, .. } => {
            let values: BTreeSet<Color> = matches(referent).iter().map(|o| o.color).collect();
            match values.len() {
                0 => absent,
                1 => AnswerAction::Attribute(AttributeValue::Color(*values.first().unwrap())),
                _ => AnswerAction::None(NoneReason::Ambiguous),
            }
        }
        QuestionAction::QueryMaterial { referent, .. } => {
            let values: BTreeSet<Material> = matches(referent).iter().map(|o| o.material).collect();
            match values.len() {
                0 => absent,
                1 => AnswerAction::Attribute(AttributeValue::Material(*values.first().unwrap())),
                _ => AnswerAction::None(NoneReason::Ambiguous),
            }
        }
        QuestionAction::RefIt { antecedent } | QuestionAction::RefThem { antecedent } => {
            let objs = matches(antecedent);
            if objs.is_empty() {
                absent
            } else {
                AnswerAction::Description(describe_group(&objs))
            }
        }
    }
}

/// Property sets as atom sets: (color, material, category).
type Atoms = BTreeSet<String>;

fn atoms(p: &Props) -> Atoms {
    let mut s = Atoms::new();
    if let Some(c) = p.color() {
        s.insert(format!("c:{}", c.as_str()));
    }
    if let Some(m) = p.material() {
        s.insert(format!("m:{}", m.as_str()));
    }
    if let Some(k) = p.category() {
        s.insert(format!("k:{k}"));
    }
    s
}

/// Least fixed point of the confirmation rules for one object: confirmed
/// sets confirm everything they entail, unions of confirmed sets that are
/// nodes are confirmed, the full description settles the identifier and the
/// identifier settles everything. Returns (identifier confirmed, confirmed
/// property sets).
pub fn brute_closure(raw: &RawWorld, o: &ObjectInstance, seeds: &[Option<Props>]) -> (bool, BTreeSet<Props>) {
    let nodes = raw.property_sets(o);
    let full = description(o);
    let mut id = seeds.iter().any(|s| s.is_none());
    let mut confirmed: BTreeSet<Props> = seeds.iter().flatten().cloned().collect();
    loop {
        let before = (id, confirmed.len());
        if id {
            confirmed.extend(nodes.iter().cloned());
        }
        let current: Vec<Props> = confirmed.iter().cloned().collect();
        for a in &current {
            for n in &nodes {
                if raw.entails(a, n) {
                    confirmed.insert(n.clone());
                }
            }
        }
        let current: Vec<Props> = confirmed.iter().cloned().collect();
        for a in &current {
            for b in &current {
                let u: Atoms = atoms(a).union(&atoms(b)).cloned().collect();
                if let Some(n) = nodes.iter().find(|n| atoms(n) == u) {
                    confirmed.insert(n.clone());
                }
            }
        }
        if confirmed.contains(&full) {
            id = true;
        }
        if (id, confirmed.len()) == before {
            return (id, confirmed);
        }
    }
}

/// Edge-to-edge L∞ gap between two footprints; negative when overlapping.
pub fn gap(a: &ObjectInstance, b: &ObjectInstance) -> f64 {
    let dx = (a.position[0] - b.position[0]).abs() - (a.size[0] + b.size[0]) / 2.0;
    let dy = (a.position[1] - b.position[1]).abs() - (a.size[1] + b.size[1]) / 2.0;
    dx.max(dy)
}

/// Placement, geometry, spacing and divergence violations of one scene.
pub fn scene_violations(raw: &RawWorld, scene: &SceneGraph, min_gap: f64, k: usize) -> Vec<String> {
    let mut out = Vec::new();
    let by_id: BTreeMap<&ObjectId, &ObjectInstance> = scene.objects.iter().map(|o| (&o.id, o)).collect();
    if by_id.len() != scene.len() {
        out.push("duplicate ids".to_string());
    }
    for o in &scene.objects {
        let (surface, area, z) = match &o.parent {
            None => ("floor".to_string(), [0.0, 0.0, scene.bounds[0], scene.bounds[1]], 0.0),
            Some(p) => {
                let Some(parent) = by_id.get(p) else {
                    out.push(format!("{} rests on missing {p}", o.id));
                    continue;
                };
                let [x, y, base] = parent.position;
                let [w, d, h] = parent.size;
                (parent.category.clone(), [x - w / 2.0, y - d / 2.0, x + w / 2.0, y + d / 2.0], base + h)
            }
        };
        if !raw.licensed(&surface, &o.category) {
            out.push(format!("{} ({}) not licensed on {surface}", o.id, o.category));
        }
        let eps = 1e-9;
        let [x, y, base] = o.position;
        let [w, d, _] = o.size;
        if x - w / 2.0 < area[0] - eps
            || y - d / 2.0 < area[1] - eps
            || x + w / 2.0 > area[2] + eps
            || y + d / 2.0 > area[3] + eps
        {
            out.push(format!("{} overhangs its surface", o.id));
        }
        if (base - z).abs() > 1e-9 {
            out.push(format!("{} floats at {base} instead of {z}", o.id));
        }
    }
    for (i, a) in scene.objects.iter().enumerate() {
        for b in &scene.objects[i + 1..] {
            if a.parent == b.parent && gap(a, b) < min_gap - 1e-9 {
                out.push(format!("{} and {} are {:.4} apart", a.id, b.id, gap(a, b)));
            }
        }
    }
    for category in raw.parent.keys() {
        let d = raw.divergence(scene, category);
        if d > k {
            out.push(format!("divergence of {category} is {d}"));
        }
    }
    out
}

/// Violations of the one-for-one replacement rule.
pub fn pair_violations(pair: &ScenePair) -> Vec<String> {
    let (q, a) = (&pair.scene_q, &pair.scene_a);
    if q.len() != a.len() {
        return vec!["object counts differ".to_string()];
    }
    let changed: Vec<usize> = (0..q.len()).filter(|&i| q.objects[i] != a.objects[i]).collect();
    let [i] = changed.as_slice() else { return vec![format!("{} objects differ", changed.len())] };
    let (t, r) = (&q.objects[*i], &a.objects[*i]);
    let mut out = Vec::new();
    if t.id != pair.target_id || r.id != pair.replacement_id || q.get(&r.id).is_some() {
        out.push("target or replacement id mismatch".to_string());
    }
    if t.parent != r.parent || t.position[..2] != r.position[..2] {
        out.push("replacement moved".to_string());
    }
    if t.category == r.category && (t.color, t.material) == (r.color, r.material) {
        out.push("replacement is indistinguishable".to_string());
    }
    if q.objects.iter().any(|o| o.parent.as_ref() == Some(&t.id)) {
        out.push("replaced a supporting object".to_string());
    }
    out
}
