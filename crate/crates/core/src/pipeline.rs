//! Self-play episodes, retention, splits, dataset files and statistics.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asim::{noisy_answer, oracle_answer, AnswerAction};
use crate::config::RunConfig;
use crate::nlg::NlgError;
use crate::qsim::{GuessAction, QsimError, QuestionAction, Questioner, Step, StrategyConfig};
use crate::scene::{generate_pair, project_bbox2d, BoundingBox2D, SceneError, SceneGraph, ScenePair};
use crate::state::Tracker;
use crate::taxonomy::ObjectId;
use crate::World;

pub const SCHEMA: &str = "diffgame-dataset/1";
pub const SCENES_FILE: &str = "scenes.jsonl";
pub const DIALOGS_FILE: &str = "dialogs.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("pair {pair_id}: {source}")]
    Generation { pair_id: u64, source: SceneError },
    #[error("rendering: {0}")]
    Render(#[from] NlgError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path} line {line}: {source}")]
    Decode { path: String, line: usize, source: serde_json::Error },
    #[error("{path}: schema `{found}` is not `{SCHEMA}`")]
    Schema { path: String, found: String },
    #[error("dataset has no dialogs")]
    EmptyDataset,
    #[error("building thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.display().to_string(), source }
}

/// Which scene of the pair the questioner sees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Questioner holds the original scene; the target is the replaced object.
    Forward,
    /// Questioner holds the edited scene; the target is the replacement.
    Reverse,
}

impl Orientation {
    pub const BOTH: [Orientation; 2] = [Orientation::Forward, Orientation::Reverse];

    /// (questioner scene, answerer scene, target).
    pub fn view(self, pair: &ScenePair) -> (&SceneGraph, &SceneGraph, &ObjectId) {
        match self {
            Orientation::Forward => (&pair.scene_q, &pair.scene_a, &pair.target_id),
            Orientation::Reverse => (&pair.scene_a, &pair.scene_q, &pair.replacement_id),
        }
    }

    fn index(self) -> u64 {
        match self {
            Orientation::Forward => 0,
            Orientation::Reverse => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub question: QuestionAction,
    pub question_text: String,
    pub answer: AnswerAction,
    pub answer_text: String,
}

/// An object of the questioner's scene as a guess candidate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateBox {
    pub id: ObjectId,
    pub category: String,
    pub bbox: BoundingBox2D,
}

pub fn candidate_boxes(scene: &SceneGraph) -> Vec<CandidateBox> {
    scene
        .objects
        .iter()
        .map(|o| CandidateBox { id: o.id.clone(), category: o.category.clone(), bbox: project_bbox2d(scene, o) })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DialogRecord {
    pub pair_id: u64,
    pub orientation: Orientation,
    pub split: Split,
    pub rounds: Vec<Round>,
    pub guess: GuessAction,
    pub target_id: ObjectId,
    pub success: bool,
    pub correct_object_list: Vec<CandidateBox>,
}

/// Both scenes of a pair, as stored in the scenes file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair_id: u64,
    pub split: Split,
    #[serde(flatten)]
    pub pair: ScenePair,
}

/// Why an episode was not retained.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discard {
    /// Still asking when the round limit was reached.
    RoundLimit,
    WrongGuess,
    /// Guessed before asking anything.
    NoRounds,
    /// The tracker rejected the evidence.
    Inconsistent,
}

impl Discard {
    pub fn as_str(&self) -> &'static str {
        match self {
            Discard::RoundLimit => "round-limit",
            Discard::WrongGuess => "wrong-guess",
            Discard::NoRounds => "no-rounds",
            Discard::Inconsistent => "inconsistent",
        }
    }
}

/// A played episode before the retention rules are applied.
#[derive(Clone, Debug)]
pub struct Episode {
    pub rounds: Vec<Round>,
    /// `None` when the round limit hit first.
    pub guess: Option<GuessAction>,
    /// Set when the tracker rejected an answer.
    pub error: Option<String>,
}

impl Episode {
    pub fn succeeded(&self, target: &ObjectId) -> bool {
        self.error.is_none() && self.guess.as_ref().is_some_and(|g| &g.object_id == target)
    }
}

/// Questioner against an oracle answerer whose answers are perturbed with
/// probability `epsilon`. Tracker failures end the episode without a guess.
pub fn play_episode<R: Rng + ?Sized>(
    world: &World,
    scene_q: &SceneGraph,
    scene_a: &SceneGraph,
    strategy: &StrategyConfig,
    epsilon: f64,
    rng: &mut R,
) -> Result<Episode, PipelineError> {
    let questioner = Questioner::new(strategy.clone());
    let mut rounds = Vec::new();
    let fail = |rounds, e: String| Ok(Episode { rounds, guess: None, error: Some(e) });
    let mut tracker = match Tracker::new(scene_q, &world.taxonomy) {
        Ok(t) => t,
        Err(e) => return fail(rounds, e.to_string()),
    };
    loop {
        let step = match questioner.next_step(&tracker, &world.taxonomy, rng) {
            Ok(s) => s,
            Err(e @ (QsimError::State(_) | QsimError::EmptyScene)) => return fail(rounds, e.to_string()),
        };
        match step {
            Step::Guess(guess) => return Ok(Episode { rounds, guess: Some(guess), error: None }),
            Step::Ask(_) if rounds.len() >= strategy.max_rounds => {
                return Ok(Episode { rounds, guess: None, error: None })
            }
            Step::Ask(question) => {
                let truth = oracle_answer(scene_a, &world.taxonomy, &question);
                let answer = noisy_answer(world, &question, truth, epsilon, rng);
                let question_text = world.lexicon.realize_question(&question, rng)?;
                let answer_text = world.lexicon.realize_answer(&answer, &question, rng)?;
                let applied = tracker.apply_answer(&world.taxonomy, &question, &answer);
                rounds.push(Round { question, question_text, answer, answer_text });
                if let Err(e) = applied {
                    return fail(rounds, e.to_string());
                }
            }
        }
    }
}

/// Plays one orientation of a pair and applies the retention rules: at most
/// `max_rounds` rounds and a correct guess.
pub fn run_selfplay<R: Rng + ?Sized>(
    world: &World,
    pair_id: u64,
    pair: &ScenePair,
    orientation: Orientation,
    split: Split,
    config: &RunConfig,
    rng: &mut R,
) -> Result<Result<DialogRecord, Discard>, PipelineError> {
    let (scene_q, scene_a, target) = orientation.view(pair);
    let episode = play_episode(world, scene_q, scene_a, &config.strategy, config.epsilon, rng)?;
    if episode.error.is_some() {
        return Ok(Err(Discard::Inconsistent));
    }
    let Some(guess) = episode.guess else { return Ok(Err(Discard::RoundLimit)) };
    if episode.rounds.is_empty() {
        return Ok(Err(Discard::NoRounds));
    }
    if &guess.object_id != target {
        return Ok(Err(Discard::WrongGuess));
    }
    Ok(Ok(DialogRecord {
        pair_id,
        orientation,
        split,
        rounds: episode.rounds,
        guess,
        target_id: target.clone(),
        success: true,
        correct_object_list: candidate_boxes(scene_q),
    }))
}

/// Pair ids per split, sized by rounding the ratios; the test split takes
/// the remainder.
pub fn assign_splits(config: &RunConfig) -> Vec<Split> {
    let n = config.pairs;
    let train = (((n as f64) * config.split.train).round() as usize).min(n);
    let valid = (((n as f64) * config.split.valid).round() as usize).min(n - train);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut stream(config.seed, u64::MAX));
    let mut out = vec![Split::Test; n];
    for (rank, &id) in ids.iter().enumerate() {
        out[id] = if rank < train {
            Split::Train
        } else if rank < train + valid {
            Split::Valid
        } else {
            Split::Test
        };
    }
    out
}

/// Independent random stream per pair, so output does not depend on
/// scheduling.
pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub seed: u64,
    pub config_sha256: String,
    pub config: RunConfig,
    pub pairs: usize,
    pub episodes: usize,
    pub dialogs: usize,
    pub discard_rate: f64,
    pub discards: BTreeMap<String, usize>,
    pub split_pairs: SplitCounts,
    pub split_dialogs: SplitCounts,
    pub template_count: usize,
    pub phrase_count: usize,
}

/// A generated dataset held in memory. Pairs and dialogs are ordered by pair
/// id, forward before reverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub manifest: Manifest,
    pub pairs: Vec<PairRecord>,
    pub dialogs: Vec<DialogRecord>,
}

impl Dataset {
    pub fn pair(&self, pair_id: u64) -> Option<&PairRecord> {
        self.pairs.iter().find(|p| p.pair_id == pair_id)
    }
}

/// Stream an episode plays from. Each orientation gets its own so one
/// episode's length never shifts the other's randomness; replaying an
/// episode with the same answerer reproduces it exactly.
pub fn episode_stream(seed: u64, pair_id: u64, orientation: Orientation) -> ChaCha8Rng {
    stream(seed ^ (orientation.index() + 1).rotate_left(32), pair_id)
}

type PairOutcome = (PairRecord, Vec<Result<DialogRecord, Discard>>);

fn generate_one(world: &World, config: &RunConfig, pair_id: u64, split: Split) -> Result<PairOutcome, PipelineError> {
    let mut rng = stream(config.seed, pair_id);
    let pair = generate_pair(world, &config.scene, &mut rng)
        .map_err(|source| PipelineError::Generation { pair_id, source })?;
    let mut outcomes = Vec::with_capacity(2);
    for orientation in Orientation::BOTH {
        let mut episode_rng = episode_stream(config.seed, pair_id, orientation);
        outcomes.push(run_selfplay(world, pair_id, &pair, orientation, split, config, &mut episode_rng)?);
    }
    Ok((PairRecord { pair_id, split, pair }, outcomes))
}

fn count_splits<'a>(splits: impl Iterator<Item = &'a Split>) -> SplitCounts {
    let mut c = SplitCounts { train: 0, valid: 0, test: 0 };
    for s in splits {
        match s {
            Split::Train => c.train += 1,
            Split::Valid => c.valid += 1,
            Split::Test => c.test += 1,
        }
    }
    c
}

/// Generates `config.pairs` pairs and plays both orientations of each, in
/// parallel. The result is identical for any worker count.
pub fn generate_dataset(world: &World, config: &RunConfig) -> Result<Dataset, PipelineError> {
    let splits = assign_splits(config);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build()?;
    let outcomes: Vec<PairOutcome> = pool.install(|| {
        splits
            .par_iter()
            .enumerate()
            .map(|(i, &split)| generate_one(world, config, i as u64, split))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut pairs = Vec::with_capacity(outcomes.len());
    let mut dialogs = Vec::new();
    let mut discards: BTreeMap<String, usize> = BTreeMap::new();
    for (pair, results) in outcomes {
        pairs.push(pair);
        for r in results {
            match r {
                Ok(d) => dialogs.push(d),
                Err(reason) => *discards.entry(reason.as_str().to_string()).or_default() += 1,
            }
        }
    }
    let episodes = 2 * pairs.len();
    let manifest = Manifest {
        schema: SCHEMA.to_string(),
        seed: config.seed,
        config_sha256: config.digest(),
        config: config.canonical(),
        pairs: pairs.len(),
        episodes,
        dialogs: dialogs.len(),
        discard_rate: (episodes - dialogs.len()) as f64 / episodes as f64,
        discards,
        split_pairs: count_splits(splits.iter()),
        split_dialogs: count_splits(dialogs.iter().map(|d| &d.split)),
        template_count: world.lexicon.template_count(),
        phrase_count: world.lexicon.phrase_catalog(&world.taxonomy)?.len(),
    };
    Ok(Dataset { manifest, pairs, dialogs })
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), PipelineError> {
    let file = fs::File::create(path).map_err(io_error(path))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).expect("records serialize");
        w.write_all(b"\n").map_err(io_error(path))?;
    }
    w.flush().map_err(io_error(path))
}

/// Writes the three dataset files into `dir`, creating it. Files are staged
/// under temporary names and renamed at the end; nothing is left behind on
/// failure.
pub fn write_dataset(dataset: &Dataset, dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let staged = |name: &str| dir.join(format!(".{name}.partial"));
    let names = [SCENES_FILE, DIALOGS_FILE, MANIFEST_FILE];
    let result = (|| {
        write_jsonl(&staged(SCENES_FILE), &dataset.pairs)?;
        write_jsonl(&staged(DIALOGS_FILE), &dataset.dialogs)?;
        let path = staged(MANIFEST_FILE);
        let mut json = serde_json::to_string_pretty(&dataset.manifest).expect("manifest serializes");
        json.push('\n');
        fs::write(&path, json).map_err(io_error(&path))?;
        for name in names {
            let target = dir.join(name);
            fs::rename(staged(name), &target).map_err(io_error(&target))?;
        }
        Ok(())
    })();
    if result.is_err() {
        for name in names {
            let _ = fs::remove_file(staged(name));
        }
    }
    result
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let file = fs::File::open(path).map_err(io_error(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_error(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|source| PipelineError::Decode {
            path: path.display().to_string(),
            line: i + 1,
            source,
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn load_dataset(dir: &Path) -> Result<Dataset, PipelineError> {
    let path: PathBuf = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(io_error(&path))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| PipelineError::Decode {
        path: path.display().to_string(),
        line: 0,
        source,
    })?;
    if manifest.schema != SCHEMA {
        return Err(PipelineError::Schema { path: path.display().to_string(), found: manifest.schema });
    }
    Ok(Dataset { manifest, pairs: read_jsonl(&dir.join(SCENES_FILE))?, dialogs: read_jsonl(&dir.join(DIALOGS_FILE))? })
}

/// Structural problems of a loaded dataset, one message each.
pub fn validate_dataset(dataset: &Dataset) -> Vec<String> {
    let mut problems = Vec::new();
    let m = &dataset.manifest;
    if m.pairs != dataset.pairs.len() {
        problems.push(format!("manifest lists {} pairs, scenes file has {}", m.pairs, dataset.pairs.len()));
    }
    if m.dialogs != dataset.dialogs.len() {
        problems.push(format!("manifest lists {} dialogs, dialogs file has {}", m.dialogs, dataset.dialogs.len()));
    }
    for (i, p) in dataset.pairs.iter().enumerate() {
        if p.pair_id != i as u64 {
            problems.push(format!("scenes line {}: pair id {} out of order", i + 1, p.pair_id));
        }
    }
    if count_splits(dataset.pairs.iter().map(|p| &p.split)) != m.split_pairs {
        problems.push("pair split counts disagree with the manifest".to_string());
    }
    let max_rounds = m.config.strategy.max_rounds;
    for (i, d) in dataset.dialogs.iter().enumerate() {
        let at = |msg: String| format!("dialog {} (pair {}, {:?}): {msg}", i + 1, d.pair_id, d.orientation);
        let Some(pair) = dataset.pair(d.pair_id) else {
            problems.push(at("unknown pair".to_string()));
            continue;
        };
        let (scene_q, _, target) = d.orientation.view(&pair.pair);
        if d.split != pair.split {
            problems.push(at(format!("split {:?} differs from its pair's {:?}", d.split, pair.split)));
        }
        if d.rounds.is_empty() || d.rounds.len() > max_rounds {
            problems.push(at(format!("{} rounds outside 1..={max_rounds}", d.rounds.len())));
        }
        if &d.target_id != target {
            problems.push(at(format!("target {} is not the pair's {}", d.target_id, target)));
        }
        if d.success != (d.guess.object_id == d.target_id) {
            problems.push(at("success flag disagrees with the guess".to_string()));
        }
        if !d.success {
            problems.push(at("retained dialog is unsuccessful".to_string()));
        }
        let listed: Vec<&ObjectId> = d.correct_object_list.iter().map(|c| &c.id).collect();
        let present: Vec<&ObjectId> = scene_q.ids().collect();
        if listed != present {
            problems.push(at("candidate list does not cover the questioner's scene".to_string()));
        }
    }
    problems
}

/// Corpus statistics over retained dialogs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub dialogs: usize,
    pub questions: usize,
    pub mean_rounds: f64,
    pub unique_questions: usize,
    pub unique_answers: usize,
    pub mean_question_tokens: f64,
    /// Fraction of questions per subtype.
    pub subtype_distribution: BTreeMap<String, f64>,
    pub count_fraction: f64,
    /// Most frequent answer strings with their counts.
    pub top_answers: Vec<(String, usize)>,
    /// Share of all answers covered by the six most frequent strings.
    pub top6_answer_mass: f64,
    /// The same share over answer actions instead of rendered strings.
    pub top6_answer_action_mass: f64,
}

fn top_mass<K: std::hash::Hash + Eq>(items: impl Iterator<Item = K>, k: usize) -> f64 {
    let mut counts: HashMap<K, usize> = HashMap::new();
    let mut total = 0usize;
    for item in items {
        *counts.entry(item).or_default() += 1;
        total += 1;
    }
    let mut v: Vec<usize> = counts.into_values().collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v.iter().take(k).sum::<usize>() as f64 / total.max(1) as f64
}

pub fn compute_stats(dialogs: &[DialogRecord]) -> Result<StatsReport, PipelineError> {
    if dialogs.is_empty() {
        return Err(PipelineError::EmptyDataset);
    }
    let rounds: Vec<&Round> = dialogs.iter().flat_map(|d| &d.rounds).collect();
    let n = rounds.len().max(1) as f64;
    let mut questions: HashMap<&str, usize> = HashMap::new();
    let mut answers: HashMap<&str, usize> = HashMap::new();
    let mut subtypes: BTreeMap<String, usize> = BTreeMap::new();
    let mut tokens = 0usize;
    for r in &rounds {
        *questions.entry(&r.question_text).or_default() += 1;
        *answers.entry(&r.answer_text).or_default() += 1;
        *subtypes.entry(r.question.subtype().as_str().to_string()).or_default() += 1;
        tokens += r.question_text.split_whitespace().count();
    }
    let count_questions = subtypes.get("count-hint").unwrap_or(&0) + subtypes.get("count-nohint").unwrap_or(&0);
    let mut ranked: Vec<(String, usize)> = answers.iter().map(|(a, c)| (a.to_string(), *c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let top6_answer_mass = top_mass(rounds.iter().map(|r| r.answer_text.as_str()), 6);
    let top6_answer_action_mass = top_mass(rounds.iter().map(|r| &r.answer), 6);
    ranked.truncate(10);
    Ok(StatsReport {
        dialogs: dialogs.len(),
        questions: rounds.len(),
        mean_rounds: rounds.len() as f64 / dialogs.len() as f64,
        unique_questions: questions.len(),
        unique_answers: answers.len(),
        mean_question_tokens: tokens as f64 / n,
        subtype_distribution: subtypes.into_iter().map(|(k, v)| (k, v as f64 / n)).collect(),
        count_fraction: count_questions as f64 / n,
        top_answers: ranked,
        top6_answer_mass,
        top6_answer_action_mass,
    })
}
