//! Questioner-side belief: one confirmation graph per object, object
//! presence, and the rules that turn answers into evidence.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asim::{self, AnswerAction, AttributeKind, AttributeValue, Located, NoneReason};
use crate::qsim::QuestionAction;
use crate::scene::{ObjectInstance, SceneGraph};
use crate::taxonomy::{ObjectId, PropertySet, Props, Taxonomy, TaxonomyError};

#[derive(Debug, Error)]
pub enum StateError {
    #[error("property set {0} is not a node of this graph")]
    UnknownNode(PropertySet),
    #[error("unknown object `{0}`")]
    UnknownObject(ObjectId),
    #[error("{subtype} question cannot take a {kind} answer")]
    Protocol { subtype: &'static str, kind: &'static str },
    #[error("objects {0:?} are all refuted; at most one object can be missing")]
    Inconsistent(Vec<ObjectId>),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}

/// Property sets satisfied by one object, ordered by entailment, each with a
/// confirmation flag.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectStateGraph {
    object_id: ObjectId,
    // nodes[0] is the identifier.
    nodes: Vec<PropertySet>,
    index: HashMap<PropertySet, usize>,
    confirmed: Vec<bool>,
    // Strict transitive successors.
    reach: Vec<Vec<usize>>,
    full: usize,
}

impl ObjectStateGraph {
    pub fn build(taxonomy: &Taxonomy, id: &ObjectId, description: &Props) -> Result<Self, StateError> {
        let nodes = taxonomy.enumerate_property_sets(id, description)?;
        let index: HashMap<_, _> = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let reach = nodes
            .iter()
            .map(|a| {
                (0..nodes.len())
                    .filter(|&j| {
                        let b = &nodes[j];
                        a != b && taxonomy.entails_set(a, b, |_| Some(description.clone()))
                    })
                    .collect()
            })
            .collect();
        let full = index[&PropertySet::Props(description.clone())];
        Ok(ObjectStateGraph { object_id: id.clone(), confirmed: vec![false; nodes.len()], nodes, index, reach, full })
    }

    pub fn object_id(&self) -> &ObjectId {
        &self.object_id
    }

    pub fn nodes(&self) -> &[PropertySet] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Strict successors of a node.
    pub fn successors(&self, node: &PropertySet) -> Option<impl Iterator<Item = &PropertySet>> {
        let i = *self.index.get(node)?;
        Some(self.reach[i].iter().map(|&j| &self.nodes[j]))
    }

    pub fn contains(&self, node: &PropertySet) -> bool {
        self.index.contains_key(node)
    }

    /// `None` when the set is not a node.
    pub fn is_confirmed(&self, node: &PropertySet) -> Option<bool> {
        self.index.get(node).map(|&i| self.confirmed[i])
    }

    pub fn is_unconfirmed_props(&self, p: &Props) -> bool {
        self.is_confirmed(&PropertySet::Props(p.clone())) == Some(false)
    }

    pub fn confirmed_count(&self) -> usize {
        self.confirmed.iter().filter(|&&c| c).count()
    }

    pub fn fully_confirmed(&self) -> bool {
        self.confirmed.iter().all(|&c| c)
    }

    pub fn confirmed_nodes(&self) -> impl Iterator<Item = &PropertySet> {
        self.nodes.iter().zip(&self.confirmed).filter(|(_, &c)| c).map(|(n, _)| n)
    }

    pub fn unconfirmed_nodes(&self) -> impl Iterator<Item = &PropertySet> {
        self.nodes.iter().zip(&self.confirmed).filter(|(_, &c)| !c).map(|(n, _)| n)
    }

    fn mark(&mut self, i: usize) {
        self.confirmed[i] = true;
        for k in 0..self.reach[i].len() {
            let j = self.reach[i][k];
            self.confirmed[j] = true;
        }
    }

    /// Confirms a node and closes under reachability and pairwise union.
    pub fn confirm(&mut self, node: &PropertySet) -> Result<(), StateError> {
        let i = *self.index.get(node).ok_or_else(|| StateError::UnknownNode(node.clone()))?;
        self.mark(i);
        self.close();
        Ok(())
    }

    pub fn confirm_all(&mut self) {
        self.mark(0);
    }

    fn close(&mut self) {
        loop {
            let confirmed: Vec<&Props> = self
                .nodes
                .iter()
                .zip(&self.confirmed)
                .filter_map(|(n, &c)| if c { n.as_props() } else { None })
                .collect();
            let mut newly = Vec::new();
            for (k, a) in confirmed.iter().enumerate() {
                for b in &confirmed[k + 1..] {
                    if let Some(u) = a.union(b) {
                        if let Some(&j) = self.index.get(&PropertySet::Props(u)) {
                            if !self.confirmed[j] {
                                newly.push(j);
                            }
                        }
                    }
                }
            }
            if newly.is_empty() {
                break;
            }
            for j in newly {
                self.mark(j);
            }
        }
        // Only the absent object can fail to have its full description
        // confirmed, so a confirmed full description settles the identifier.
        if self.confirmed[self.full] {
            self.confirmed[0] = true;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Presence {
    Unknown,
    /// Known to exist in the other scene.
    Verified,
    /// Known to be the missing object.
    Refuted,
}

/// Snapshot of one object's belief state, for debugging views.
#[derive(Clone, Debug, Serialize)]
pub struct ObjectSnapshot {
    pub id: ObjectId,
    pub presence: Presence,
    pub candidate: bool,
    pub confirmed: Vec<PropertySet>,
    pub unconfirmed: Vec<PropertySet>,
}

/// Per-episode belief of the questioner over its own scene.
#[derive(Clone, Debug)]
pub struct Tracker {
    scene: SceneGraph,
    graphs: Vec<ObjectStateGraph>,
    presence: Vec<Presence>,
    log: Vec<(QuestionAction, AnswerAction)>,
}

impl Tracker {
    pub fn new(scene: &SceneGraph, taxonomy: &Taxonomy) -> Result<Self, StateError> {
        let graphs = scene
            .objects
            .iter()
            .map(|o| ObjectStateGraph::build(taxonomy, &o.id, &o.description()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Tracker { scene: scene.clone(), presence: vec![Presence::Unknown; graphs.len()], graphs, log: Vec::new() })
    }

    pub fn scene(&self) -> &SceneGraph {
        &self.scene
    }

    pub fn graphs(&self) -> &[ObjectStateGraph] {
        &self.graphs
    }

    pub fn log(&self) -> &[(QuestionAction, AnswerAction)] {
        &self.log
    }

    fn position(&self, id: &ObjectId) -> Result<usize, StateError> {
        self.scene.objects.iter().position(|o| &o.id == id).ok_or_else(|| StateError::UnknownObject(id.clone()))
    }

    pub fn graph(&self, id: &ObjectId) -> Option<&ObjectStateGraph> {
        self.position(id).ok().map(|i| &self.graphs[i])
    }

    pub fn presence(&self, id: &ObjectId) -> Option<Presence> {
        self.position(id).ok().map(|i| self.presence[i])
    }

    fn is_candidate_at(&self, i: usize) -> bool {
        self.presence[i] == Presence::Unknown && !self.graphs[i].fully_confirmed()
    }

    pub fn is_candidate(&self, id: &ObjectId) -> bool {
        self.position(id).map(|i| self.is_candidate_at(i)).unwrap_or(false)
    }

    /// Objects still under suspicion, in scene order.
    pub fn candidates(&self) -> Vec<&ObjectId> {
        (0..self.graphs.len()).filter(|&i| self.is_candidate_at(i)).map(|i| &self.scene.objects[i].id).collect()
    }

    pub fn candidate_count(&self) -> usize {
        (0..self.graphs.len()).filter(|&i| self.is_candidate_at(i)).count()
    }

    /// Candidates holding `p` as an unconfirmed node.
    pub fn frequency(&self, p: &Props) -> usize {
        (0..self.graphs.len()).filter(|&i| self.is_candidate_at(i) && self.graphs[i].is_unconfirmed_props(p)).count()
    }

    pub fn confirm(&mut self, id: &ObjectId, node: &PropertySet) -> Result<(), StateError> {
        let i = self.position(id)?;
        self.graphs[i].confirm(node)
    }

    /// Marks an object as present in the other scene.
    pub fn verify(&mut self, id: &ObjectId) -> Result<(), StateError> {
        let i = self.position(id)?;
        if self.presence[i] == Presence::Unknown {
            self.presence[i] = Presence::Verified;
        }
        self.graphs[i].confirm_all();
        Ok(())
    }

    /// Marks an object as the missing one.
    pub fn refute(&mut self, id: &ObjectId) -> Result<(), StateError> {
        let i = self.position(id)?;
        self.presence[i] = Presence::Refuted;
        Ok(())
    }

    /// The object the evidence points to, if it is pinned down.
    pub fn resolved_target(&self) -> Result<Option<ObjectId>, StateError> {
        let refuted: Vec<ObjectId> = (0..self.graphs.len())
            .filter(|&i| self.presence[i] == Presence::Refuted)
            .map(|i| self.scene.objects[i].id.clone())
            .collect();
        match refuted.len() {
            0 => {}
            1 => return Ok(refuted.into_iter().next()),
            _ => return Err(StateError::Inconsistent(refuted)),
        }
        let cands = self.candidates();
        Ok(match cands.as_slice() {
            [only] => Some((*only).clone()),
            _ => None,
        })
    }

    pub fn snapshot(&self) -> Vec<ObjectSnapshot> {
        (0..self.graphs.len())
            .map(|i| ObjectSnapshot {
                id: self.scene.objects[i].id.clone(),
                presence: self.presence[i],
                candidate: self.is_candidate_at(i),
                confirmed: self.graphs[i].confirmed_nodes().cloned().collect(),
                unconfirmed: self.graphs[i].unconfirmed_nodes().cloned().collect(),
            })
            .collect()
    }

    fn matchers(&self, taxonomy: &Taxonomy, p: &Props) -> Vec<ObjectId> {
        asim::matching(&self.scene, taxonomy, p).map(|o| o.id.clone()).collect()
    }

    /// Integrates one answered question. Confirmations are never undone.
    pub fn apply_answer(
        &mut self,
        taxonomy: &Taxonomy,
        question: &QuestionAction,
        answer: &AnswerAction,
    ) -> Result<(), StateError> {
        let protocol = || StateError::Protocol { subtype: question.subtype().as_str(), kind: answer.kind() };
        match question {
            QuestionAction::CountNoHint { p_set } | QuestionAction::CountHint { p_set, .. } => {
                let AnswerAction::Count(answered) = *answer else { return Err(protocol()) };
                self.count_evidence(taxonomy, p_set, answered)?;
            }
            QuestionAction::ExtremePic { .. }
            | QuestionAction::ExtremeObj { .. }
            | QuestionAction::ExtremeObj2 { .. } => match answer {
                AnswerAction::Description(groups) => {
                    let described = match groups.as_slice() {
                        [one] if one.count == 1 => Some(&one.description),
                        _ => None,
                    };
                    self.extreme_evidence(taxonomy, question, described)?;
                }
                AnswerAction::None(_) => {}
                _ => return Err(protocol()),
            },
            QuestionAction::QueryColor { referent, .. } | QuestionAction::QueryMaterial { referent, .. } => {
                let which = match question {
                    QuestionAction::QueryColor { .. } => AttributeKind::Color,
                    _ => AttributeKind::Material,
                };
                match (which, answer) {
                    (AttributeKind::Color, AnswerAction::Attribute(AttributeValue::Color(_)))
                    | (AttributeKind::Material, AnswerAction::Attribute(AttributeValue::Material(_)))
                    | (_, AnswerAction::None(_)) => self.query_evidence(taxonomy, referent, which, answer)?,
                    _ => return Err(protocol()),
                }
            }
            QuestionAction::RefIt { antecedent } | QuestionAction::RefThem { antecedent } => match answer {
                AnswerAction::Description(groups) => self.refer_evidence(taxonomy, antecedent, groups)?,
                AnswerAction::None(_) => self.refer_evidence(taxonomy, antecedent, &[])?,
                _ => return Err(protocol()),
            },
        }
        self.log.push((question.clone(), answer.clone()));
        Ok(())
    }

    fn count_evidence(&mut self, taxonomy: &Taxonomy, p: &Props, answered: u32) -> Result<(), StateError> {
        let mine = self.matchers(taxonomy, p);
        let own = mine.len() as i64;
        let delta = own - answered as i64;
        match delta {
            0 => {
                let node = PropertySet::Props(p.clone());
                for id in &mine {
                    if self.is_candidate(id) {
                        self.confirm(id, &node)?;
                    }
                }
            }
            // The missing object satisfies `p` and its replacement does not.
            1 => {
                let others: Vec<ObjectId> = self.scene.ids().filter(|id| !mine.contains(id)).cloned().collect();
                for id in &others {
                    self.verify(id)?;
                }
            }
            // The replacement satisfies `p` and the missing object does not.
            -1 => {
                for id in &mine {
                    self.verify(id)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn extreme_evidence(
        &mut self,
        taxonomy: &Taxonomy,
        question: &QuestionAction,
        described: Option<&Props>,
    ) -> Result<(), StateError> {
        let Some(described) = described else { return Ok(()) };
        let mine = match asim::locate_extreme(&self.scene, taxonomy, question, true) {
            Some(Located::Found(o)) => o.clone(),
            _ => return Ok(()),
        };
        if &mine.description() == described {
            self.verify(&mine.id)
        } else {
            self.refute(&mine.id)
        }
    }

    fn query_evidence(
        &mut self,
        taxonomy: &Taxonomy,
        referent: &Props,
        which: AttributeKind,
        answer: &AnswerAction,
    ) -> Result<(), StateError> {
        let mine: Vec<&ObjectInstance> = asim::matching(&self.scene, taxonomy, referent).collect();
        let [only] = mine.as_slice() else { return Ok(()) };
        let (id, own) = (only.id.clone(), asim::attribute_of(only, which));
        match answer {
            AnswerAction::Attribute(v) if *v == own => {
                let node = match v {
                    AttributeValue::Color(c) => referent.clone().with_color(*c),
                    AttributeValue::Material(m) => referent.clone().with_material(*m),
                };
                let node = PropertySet::Props(node);
                if self.graph(&id).is_some_and(|g| g.contains(&node)) {
                    self.confirm(&id, &node)?;
                }
            }
            AnswerAction::Attribute(_) | AnswerAction::None(NoneReason::Absent) => self.refute(&id)?,
            // Two or more matches on the other side means ours is still there.
            AnswerAction::None(NoneReason::Ambiguous) => self.verify(&id)?,
            _ => {}
        }
        Ok(())
    }

    fn refer_evidence(
        &mut self,
        taxonomy: &Taxonomy,
        antecedent: &Props,
        groups: &[asim::DescriptionGroup],
    ) -> Result<(), StateError> {
        let mine: Vec<(ObjectId, Props)> =
            asim::matching(&self.scene, taxonomy, antecedent).map(|o| (o.id.clone(), o.description())).collect();
        let answered: u32 = groups.iter().map(|g| g.count).sum();
        if answered as usize == mine.len() + 1 {
            for (id, _) in &mine {
                self.verify(id)?;
            }
            return Ok(());
        }
        let unmatched: Vec<&ObjectId> = mine
            .iter()
            .filter(|(_, d)| !groups.iter().any(|g| taxonomy.entails(d, &g.description)))
            .map(|(id, _)| id)
            .collect();
        if let [only] = unmatched.as_slice() {
            let only = (*only).clone();
            return self.refute(&only);
        }
        if !unmatched.is_empty() {
            return Ok(());
        }
        let mut suspects: Option<Vec<ObjectId>> = None;
        let mut cleared: Vec<ObjectId> = Vec::new();
        for g in groups {
            let members: Vec<ObjectId> =
                mine.iter().filter(|(_, d)| taxonomy.entails(d, &g.description)).map(|(id, _)| id.clone()).collect();
            let have = members.len() as u32;
            if have == g.count + 1 {
                suspects = Some(match suspects {
                    None => members,
                    Some(prev) => prev.into_iter().filter(|id| members.contains(id)).collect(),
                });
            } else if have + 1 == g.count {
                cleared.extend(members);
            }
        }
        if let Some(suspects) = suspects {
            let others: Vec<ObjectId> = self.scene.ids().filter(|id| !suspects.contains(id)).cloned().collect();
            cleared.extend(others);
        }
        for id in &cleared {
            self.verify(id)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::ObjectInstance;
    use crate::taxonomy::{Color, Material};

    fn nightstand_graph() -> ObjectStateGraph {
        let t = Taxonomy::builtin();
        let d = Props::describe(Color::White, Material::Wooden, "nightstand");
        ObjectStateGraph::build(&t, &ObjectId::new("o0"), &d).unwrap()
    }

    fn ps(p: Props) -> PropertySet {
        PropertySet::Props(p)
    }

    #[test]
    fn graph_shape() {
        let g = nightstand_graph();
        assert_eq!(g.len(), 12);
        let ident = PropertySet::Object(ObjectId::new("o0"));
        assert_eq!(g.successors(&ident).unwrap().count(), 11);
        let white = ps(Props::of_color(Color::White));
        assert_eq!(g.successors(&white).unwrap().count(), 0);
        for n in g.nodes() {
            for s in g.successors(n).unwrap() {
                assert!(!g.successors(s).unwrap().any(|back| back == n));
            }
        }
    }

    #[test]
    fn identifier_confirms_everything() {
        let mut g = nightstand_graph();
        g.confirm(&PropertySet::Object(ObjectId::new("o0"))).unwrap();
        assert!(g.fully_confirmed());
    }

    #[test]
    fn union_rule() {
        let mut g = nightstand_graph();
        g.confirm(&ps(Props::of_color(Color::White))).unwrap();
        g.confirm(&ps(Props::of_category("nightstand"))).unwrap();
        assert_eq!(g.is_confirmed(&ps(Props::of_color(Color::White).with_category("nightstand"))), Some(true));
        assert_eq!(g.is_confirmed(&ps(Props::of_color(Color::White).with_category("furniture"))), Some(true));
        assert_eq!(g.is_confirmed(&ps(Props::of_material(Material::Wooden))), Some(false));
    }

    #[test]
    fn reachability_is_specific_to_general() {
        let mut g = nightstand_graph();
        g.confirm(&ps(Props::of_color(Color::White).with_category("furniture"))).unwrap();
        assert_eq!(g.is_confirmed(&ps(Props::of_color(Color::White))), Some(true));
        assert_eq!(g.is_confirmed(&ps(Props::of_category("furniture"))), Some(true));
        assert_eq!(g.is_confirmed(&ps(Props::of_color(Color::White).with_category("nightstand"))), Some(false));
        assert!(g.confirm(&ps(Props::of_color(Color::Red))).is_err());
    }

    #[test]
    fn full_description_settles_identifier() {
        let mut g = nightstand_graph();
        g.confirm(&ps(Props::of_color(Color::White))).unwrap();
        g.confirm(&ps(Props::of_material(Material::Wooden))).unwrap();
        assert!(!g.fully_confirmed());
        g.confirm(&ps(Props::of_category("nightstand"))).unwrap();
        assert!(g.fully_confirmed());
    }

    fn obj(id: &str, cat: &str, color: Color, material: Material, x: f64) -> ObjectInstance {
        ObjectInstance {
            id: ObjectId::new(id),
            asset: format!("{cat}_01"),
            category: cat.into(),
            color,
            material,
            parent: None,
            position: [x, 5.0, 0.0],
            size: [0.5, 0.5, 0.5],
        }
    }

    fn scene(objects: Vec<ObjectInstance>) -> SceneGraph {
        SceneGraph { bounds: [16.0, 12.0], objects }
    }

    #[test]
    fn frequency_counts_unconfirmed_candidates() {
        let t = Taxonomy::builtin();
        let s = scene(vec![
            obj("o0", "vase", Color::White, Material::Glass, 1.0),
            obj("o1", "nightstand", Color::White, Material::Wooden, 3.0),
            obj("o2", "plate", Color::White, Material::Ceramic, 5.0),
            obj("o3", "frame", Color::White, Material::Wooden, 7.0),
            obj("o4", "apple", Color::Red, Material::Plastic, 9.0),
        ]);
        let mut tr = Tracker::new(&s, &t).unwrap();
        let white = Props::of_color(Color::White);
        assert_eq!(tr.frequency(&white), 4);
        assert_eq!(tr.frequency(&Props::of_category("bed")), 0);
        tr.confirm(&ObjectId::new("o0"), &ps(white.clone())).unwrap();
        assert_eq!(tr.frequency(&white), 3);
        assert_eq!(tr.resolved_target().unwrap(), None);
    }

    #[test]
    fn count_rules() {
        let t = Taxonomy::builtin();
        let s = scene(vec![
            obj("o0", "vase", Color::White, Material::Glass, 1.0),
            obj("o1", "decorative plate", Color::White, Material::Ceramic, 3.0),
            obj("o2", "frame", Color::Black, Material::Wooden, 5.0),
            obj("o3", "nightstand", Color::White, Material::Wooden, 7.0),
        ]);
        let mut tr = Tracker::new(&s, &t).unwrap();
        let white = Props::of_color(Color::White);
        tr.apply_answer(&t, &QuestionAction::CountNoHint { p_set: white.clone() }, &AnswerAction::Count(3)).unwrap();
        for id in ["o0", "o1", "o3"] {
            assert_eq!(tr.graph(&ObjectId::new(id)).unwrap().is_confirmed(&ps(white.clone())), Some(true));
        }
        let deco = Props::of_category("decoration");
        tr.apply_answer(&t, &QuestionAction::CountNoHint { p_set: deco }, &AnswerAction::Count(2)).unwrap();
        let cands: Vec<_> = tr.candidates().into_iter().map(|i| i.as_str().to_string()).collect();
        assert_eq!(cands, vec!["o0", "o1", "o2"]);
        assert_eq!(tr.presence(&ObjectId::new("o3")), Some(Presence::Verified));
        // Replacement is a frame: one more frame over there.
        let frame = Props::of_category("frame");
        tr.apply_answer(&t, &QuestionAction::CountNoHint { p_set: frame }, &AnswerAction::Count(2)).unwrap();
        assert_eq!(tr.presence(&ObjectId::new("o2")), Some(Presence::Verified));
        assert_eq!(tr.candidate_count(), 2);
    }

    #[test]
    fn refer_answer_implicates_missing_object() {
        let t = Taxonomy::builtin();
        let s = scene(vec![
            obj("o0", "decorative plate", Color::White, Material::Ceramic, 1.0),
            obj("o1", "decorative plate", Color::White, Material::Ceramic, 3.0),
            obj("o2", "frame", Color::Black, Material::Wooden, 5.0),
        ]);
        let mut tr = Tracker::new(&s, &t).unwrap();
        let groups = vec![
            asim::DescriptionGroup { description: Props::of_category("decorative plate"), count: 2 },
            asim::DescriptionGroup { description: Props::of_category("vase"), count: 1 },
        ];
        let q = QuestionAction::RefThem { antecedent: Props::of_category("decoration") };
        tr.apply_answer(&t, &q, &AnswerAction::Description(groups)).unwrap();
        assert_eq!(tr.resolved_target().unwrap(), Some(ObjectId::new("o2")));
        assert_eq!(tr.presence(&ObjectId::new("o2")), Some(Presence::Refuted));
    }

    #[test]
    fn singleton_candidate_resolves() {
        let t = Taxonomy::builtin();
        let s = scene(vec![
            obj("o0", "apple", Color::Red, Material::Plastic, 1.0),
            obj("o1", "banana", Color::Yellow, Material::Plastic, 3.0),
            obj("o2", "vase", Color::Green, Material::Glass, 5.0),
        ]);
        let mut tr = Tracker::new(&s, &t).unwrap();
        let fruit = Props::of_category("fruit");
        tr.apply_answer(&t, &QuestionAction::CountNoHint { p_set: fruit }, &AnswerAction::Count(2)).unwrap();
        assert_eq!(tr.candidate_count(), 3);
        let vase = Props::of_category("vase");
        tr.apply_answer(&t, &QuestionAction::CountNoHint { p_set: vase }, &AnswerAction::Count(0)).unwrap();
        assert_eq!(tr.resolved_target().unwrap(), Some(ObjectId::new("o2")));
    }

    #[test]
    fn two_refutations_are_inconsistent() {
        let t = Taxonomy::builtin();
        let s = scene(vec![
            obj("o0", "apple", Color::Red, Material::Plastic, 1.0),
            obj("o1", "banana", Color::Yellow, Material::Plastic, 3.0),
        ]);
        let mut tr = Tracker::new(&s, &t).unwrap();
        tr.refute(&ObjectId::new("o0")).unwrap();
        tr.refute(&ObjectId::new("o1")).unwrap();
        assert!(matches!(tr.resolved_target(), Err(StateError::Inconsistent(_))));
    }

    #[test]
    fn protocol_mismatch() {
        let t = Taxonomy::builtin();
        let s = scene(vec![obj("o0", "apple", Color::Red, Material::Plastic, 1.0)]);
        let mut tr = Tracker::new(&s, &t).unwrap();
        let q = QuestionAction::CountNoHint { p_set: Props::of_category("apple") };
        assert!(matches!(
            tr.apply_answer(&t, &q, &AnswerAction::None(NoneReason::Absent)),
            Err(StateError::Protocol { .. })
        ));
    }
}
