//! Metrics over action-annotated dialogs.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asim::{count_objects, matching, noisy_answer, oracle_answer, AnswerAction};
use crate::pipeline::{episode_stream, play_episode, stream, Dataset, DialogRecord, PipelineError, Round};
use crate::qsim::{QuestionAction, QuestionSubtype};
use crate::scene::SceneGraph;
use crate::taxonomy::{Props, Taxonomy};
use crate::World;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("success rate of an empty set is undefined")]
    Empty,
    #[error("dialog refers to missing pair {0}")]
    MissingPair(u64),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Fraction of `true` outcomes.
pub fn success_rate(outcomes: impl IntoIterator<Item = bool>) -> Result<f64, EvalError> {
    let (mut n, mut hits) = (0usize, 0usize);
    for ok in outcomes {
        n += 1;
        hits += usize::from(ok);
    }
    if n == 0 {
        return Err(EvalError::Empty);
    }
    Ok(hits as f64 / n as f64)
}

/// Fraction of records whose guess is the target.
pub fn task_success(records: &[DialogRecord]) -> Result<f64, EvalError> {
    success_rate(records.iter().map(|r| r.guess.object_id == r.target_id))
}

/// A count question over at least two kinds of object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CateQ {
    pub p_set: Props,
    pub hint: Option<u32>,
}

/// Count questions whose property set matches objects of two or more
/// distinct leaf categories in the questioner's scene.
pub fn extract_cateq(rounds: &[Round], scene_q: &SceneGraph, taxonomy: &Taxonomy) -> Vec<CateQ> {
    rounds
        .iter()
        .filter_map(|r| {
            let p = r.question.count_set()?;
            let kinds: BTreeSet<&str> = matching(scene_q, taxonomy, p).map(|o| o.category.as_str()).collect();
            (kinds.len() >= 2).then(|| CateQ { p_set: p.clone(), hint: r.question.hint() })
        })
        .collect()
}

/// Share of hint-bearing Cate-Q whose hint is the true count in the
/// questioner's scene; `None` without any.
pub fn cateq_accuracy(rounds: &[Round], scene_q: &SceneGraph, taxonomy: &Taxonomy) -> Option<f64> {
    let hinted: Vec<(Props, u32)> =
        extract_cateq(rounds, scene_q, taxonomy).into_iter().filter_map(|c| Some((c.p_set, c.hint?))).collect();
    if hinted.is_empty() {
        return None;
    }
    let right = hinted.iter().filter(|(p, h)| count_objects(scene_q, taxonomy, p) == *h).count();
    Some(right as f64 / hinted.len() as f64)
}

/// |A ∩ B| / |B| over the property sets asked; `None` when the reference
/// asked none.
pub fn cateq_recall(evaluated: &[CateQ], reference: &[CateQ]) -> Option<f64> {
    let a: BTreeSet<&Props> = evaluated.iter().map(|c| &c.p_set).collect();
    let b: BTreeSet<&Props> = reference.iter().map(|c| &c.p_set).collect();
    if b.is_empty() {
        return None;
    }
    Some(a.intersection(&b).count() as f64 / b.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transition {
    /// The next set strictly refines the previous one.
    Deepening,
    Converting,
}

pub fn classify_transition(prev: &Props, next: &Props, taxonomy: &Taxonomy) -> Transition {
    if prev != next && taxonomy.entails(next, prev) {
        Transition::Deepening
    } else {
        Transition::Converting
    }
}

/// Transitions between consecutive property-set-bearing questions.
pub fn question_transitions(rounds: &[Round], taxonomy: &Taxonomy) -> Vec<Transition> {
    rounds
        .windows(2)
        .filter_map(|w| {
            let (a, b) = (w[0].question.property_set()?, w[1].question.property_set()?);
            Some(classify_transition(a, b, taxonomy))
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SubtypeAccuracy {
    pub questions: usize,
    pub correct: usize,
    pub accuracy: Option<f64>,
}

/// Per-subtype share of `agent` answers equal to the oracle's, each
/// question asked about the paired scene.
pub fn answer_accuracy_by_subtype<'a, F>(
    instances: impl IntoIterator<Item = (&'a SceneGraph, &'a QuestionAction)>,
    taxonomy: &Taxonomy,
    mut agent: F,
) -> BTreeMap<QuestionSubtype, SubtypeAccuracy>
where
    F: FnMut(&SceneGraph, &QuestionAction) -> AnswerAction,
{
    let mut out: BTreeMap<QuestionSubtype, SubtypeAccuracy> =
        QuestionSubtype::ALL.iter().map(|&s| (s, SubtypeAccuracy::default())).collect();
    for (scene, q) in instances {
        let entry = out.entry(q.subtype()).or_default();
        entry.questions += 1;
        entry.correct += usize::from(agent(scene, q) == oracle_answer(scene, taxonomy, q));
    }
    for e in out.values_mut() {
        e.accuracy = (e.questions > 0).then(|| e.correct as f64 / e.questions as f64);
    }
    out
}

/// Accuracy and recall bucket edges; the last bucket is closed.
pub const BUCKET_EDGES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub dialogs: usize,
    pub successes: usize,
    pub success_rate: Option<f64>,
}

impl Group {
    fn add(&mut self, success: bool) {
        self.dialogs += 1;
        self.successes += usize::from(success);
        self.success_rate = Some(self.successes as f64 / self.dialogs as f64);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub lo: f64,
    pub hi: f64,
    #[serde(flatten)]
    pub group: Group,
}

/// Success rate per value bucket. Dialogs whose value is undefined are kept
/// apart so the buckets and `undefined` together cover every dialog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub buckets: Vec<Bucket>,
    pub undefined: Group,
}

impl Histogram {
    pub fn new(edges: &[f64]) -> Self {
        let buckets = edges.windows(2).map(|w| Bucket { lo: w[0], hi: w[1], group: Group::default() }).collect();
        Histogram { edges: edges.to_vec(), buckets, undefined: Group::default() }
    }

    pub fn add(&mut self, value: Option<f64>, success: bool) {
        let last = self.buckets.len() - 1;
        match value {
            Some(v) => {
                let i = self.buckets.iter().position(|b| v < b.hi).unwrap_or(last);
                self.buckets[i].group.add(success);
            }
            None => self.undefined.add(success),
        }
    }

    pub fn total(&self) -> (usize, usize) {
        self.buckets
            .iter()
            .map(|b| &b.group)
            .chain([&self.undefined])
            .fold((0, 0), |(d, s), g| (d + g.dialogs, s + g.successes))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionTable {
    pub deepening: Group,
    pub converting: Group,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub agent_epsilon: f64,
    /// Retained dialogs of the dataset.
    pub reference_dialogs: usize,
    /// Success of the dataset's own records.
    pub dataset_success_rate: f64,
    /// Success of replaying every reference episode against the agent.
    pub success_rate: f64,
    pub cateq_accuracy_histogram: Histogram,
    pub cateq_recall_histogram: Histogram,
    pub transition_table: TransitionTable,
    pub per_subtype_accuracy: BTreeMap<String, SubtypeAccuracy>,
}

struct Replay {
    success: bool,
    accuracy: Option<f64>,
    recall: Option<f64>,
    transitions: Vec<Transition>,
}

/// Replays every dataset dialog with the answerer replaced by one that lies
/// with probability `epsilon`, on the episode's own random stream. With
/// `epsilon` equal to the generation value each replay reproduces its
/// record. Per-subtype accuracy scores the agent on the recorded questions,
/// with noise drawn from `seed`.
pub fn evaluate(world: &World, dataset: &Dataset, epsilon: f64, seed: u64) -> Result<MetricsReport, EvalError> {
    let config = &dataset.manifest.config;
    let tax = &world.taxonomy;
    let replays: Vec<Replay> = dataset
        .dialogs
        .par_iter()
        .map(|record| {
            let pair = dataset.pair(record.pair_id).ok_or(EvalError::MissingPair(record.pair_id))?;
            let (scene_q, scene_a, target) = record.orientation.view(&pair.pair);
            let mut rng = episode_stream(config.seed, record.pair_id, record.orientation);
            let episode = play_episode(world, scene_q, scene_a, &config.strategy, epsilon, &mut rng)?;
            let success = episode.succeeded(target) && episode.rounds.len() <= config.strategy.max_rounds;
            let reference = extract_cateq(&record.rounds, scene_q, tax);
            Ok(Replay {
                success,
                accuracy: cateq_accuracy(&episode.rounds, scene_q, tax),
                recall: cateq_recall(&extract_cateq(&episode.rounds, scene_q, tax), &reference),
                transitions: question_transitions(&episode.rounds, tax),
            })
        })
        .collect::<Result<_, EvalError>>()?;

    let mut accuracy = Histogram::new(&BUCKET_EDGES);
    let mut recall = Histogram::new(&BUCKET_EDGES);
    let mut table = TransitionTable { deepening: Group::default(), converting: Group::default() };
    for r in &replays {
        accuracy.add(r.accuracy, r.success);
        recall.add(r.recall, r.success);
        for t in &r.transitions {
            match t {
                Transition::Deepening => table.deepening.add(r.success),
                Transition::Converting => table.converting.add(r.success),
            }
        }
    }

    let mut instances = Vec::new();
    for record in &dataset.dialogs {
        let pair = dataset.pair(record.pair_id).ok_or(EvalError::MissingPair(record.pair_id))?;
        let (_, scene_a, _) = record.orientation.view(&pair.pair);
        instances.extend(record.rounds.iter().map(|r| (scene_a, &r.question)));
    }
    let mut rng = stream(seed, 0);
    let per_subtype = answer_accuracy_by_subtype(instances, tax, |scene, q| {
        let truth = oracle_answer(scene, tax, q);
        noisy_answer(world, q, truth, epsilon, &mut rng)
    });

    Ok(MetricsReport {
        agent_epsilon: epsilon,
        reference_dialogs: dataset.dialogs.len(),
        dataset_success_rate: task_success(&dataset.dialogs)?,
        success_rate: success_rate(replays.iter().map(|r| r.success))?,
        cateq_accuracy_histogram: accuracy,
        cateq_recall_histogram: recall,
        transition_table: table,
        per_subtype_accuracy: per_subtype.into_iter().map(|(k, v)| (k.as_str().to_string(), v)).collect(),
    })
}
