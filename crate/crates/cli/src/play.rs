//! Interactive mode: a human questioner picks actions from menus.

use std::io::{BufRead, Write};

use anyhow::{bail, Context, Result};
use diffgame::asim::{count_objects, oracle_answer};
use diffgame::pipeline::{stream, Orientation};
use diffgame::qsim::{allowed_types, askable_counts, enumerate_slots, QuestionAction, QuestionSubtype, StrategyConfig};
use diffgame::scene::{generate_pair, SceneConfig, SceneGraph};
use diffgame::state::Tracker;
use diffgame::World;

#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub success: bool,
    pub rounds: usize,
}

enum Choice {
    Item(usize),
    Guess,
}

fn read_choice<R: BufRead, W: Write>(input: &mut R, out: &mut W, n: usize, allow_guess: bool) -> Result<Choice> {
    loop {
        write!(out, "> ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            bail!("input ended before the game did");
        }
        let line = line.trim();
        if allow_guess && line.eq_ignore_ascii_case("g") {
            return Ok(Choice::Guess);
        }
        match line.parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => return Ok(Choice::Item(i - 1)),
            _ if allow_guess => writeln!(out, "enter a number from 1 to {n}, or g to guess")?,
            _ => writeln!(out, "enter a number from 1 to {n}")?,
        }
    }
}

fn list_scene<W: Write>(out: &mut W, scene: &SceneGraph) -> Result<()> {
    for (i, o) in scene.objects.iter().enumerate() {
        let on = o.parent.as_ref().map_or_else(|| "floor".to_string(), |p| p.to_string());
        writeln!(
            out,
            "  {:>2}) {:<4} {:<40} at ({:.1}, {:.1}) on {on}",
            i + 1,
            o.id.to_string(),
            o.description().to_string(),
            o.position[0],
            o.position[1]
        )?;
    }
    Ok(())
}

/// Options for one subtype, each with its rendered question.
fn options(
    world: &World,
    tracker: &Tracker,
    subtype: QuestionSubtype,
    rng: &mut impl rand::Rng,
) -> Result<Vec<(QuestionAction, String)>> {
    let actions: Vec<QuestionAction> = match subtype {
        QuestionSubtype::CountNoHint => {
            askable_counts(tracker).into_iter().map(|(p_set, _)| QuestionAction::CountNoHint { p_set }).collect()
        }
        QuestionSubtype::CountHint => askable_counts(tracker)
            .into_iter()
            .map(|(p_set, _)| {
                let count = count_objects(tracker.scene(), &world.taxonomy, &p_set);
                QuestionAction::CountHint { p_set, count }
            })
            .collect(),
        other => enumerate_slots(tracker, &world.taxonomy, other, true),
    };
    actions
        .into_iter()
        .map(|q| {
            let text = world.lexicon.realize_question(&q, rng)?;
            Ok((q, text))
        })
        .collect()
}

fn debug_view<W: Write>(out: &mut W, tracker: &Tracker) -> Result<()> {
    for s in tracker.snapshot() {
        let mark = if s.candidate { "*" } else { " " };
        writeln!(out, "  {mark} {} {:?}", s.id, s.presence)?;
        let show =
            |v: &[diffgame::taxonomy::PropertySet]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(out, "      confirmed:   {}", show(&s.confirmed))?;
        writeln!(out, "      unconfirmed: {}", show(&s.unconfirmed))?;
    }
    Ok(())
}

/// Runs one game on the pair generated from `seed`.
pub fn play<R: BufRead, W: Write>(
    world: &World,
    seed: u64,
    orientation: Orientation,
    debug: bool,
    input: &mut R,
    out: &mut W,
) -> Result<Outcome> {
    let mut rng = stream(seed, 0);
    let pair = generate_pair(world, &SceneConfig::default(), &mut rng).context("generating the scene pair")?;
    let (scene_q, scene_a, target) = orientation.view(&pair);
    let strategy = StrategyConfig::default();
    let mut tracker = Tracker::new(scene_q, &world.taxonomy)?;
    writeln!(out, "One object in your picture is missing from mine. Find it.")?;
    writeln!(out, "Your picture:")?;
    list_scene(out, scene_q)?;

    let mut rounds = 0;
    while rounds < strategy.max_rounds {
        let allowed = allowed_types(&tracker, &strategy);
        writeln!(out, "\nRound {}. Pick a question type, or g to guess:", rounds + 1)?;
        for (i, s) in allowed.iter().enumerate() {
            writeln!(out, "  {}) {}", i + 1, s.as_str())?;
        }
        let Choice::Item(t) = read_choice(input, out, allowed.len(), true)? else { break };
        let opts = options(world, &tracker, allowed[t], &mut rng)?;
        if opts.is_empty() {
            writeln!(out, "Nothing informative left to ask of that kind.")?;
            continue;
        }
        writeln!(out, "Pick a question:")?;
        for (i, (_, text)) in opts.iter().enumerate() {
            writeln!(out, "  {}) {text}", i + 1)?;
        }
        let Choice::Item(k) = read_choice(input, out, opts.len(), false)? else { unreachable!("guess not offered") };
        let (question, text) = &opts[k];
        let answer = oracle_answer(scene_a, &world.taxonomy, question);
        writeln!(out, "You: {text}")?;
        writeln!(out, "Me:  {}", world.lexicon.realize_answer(&answer, question, &mut rng)?)?;
        tracker.apply_answer(&world.taxonomy, question, &answer)?;
        rounds += 1;
        if debug {
            debug_view(out, &tracker)?;
        }
    }
    if rounds == strategy.max_rounds {
        writeln!(out, "\nThat was the last round. Time to guess.")?;
    }
    writeln!(out, "Which object is missing from my picture?")?;
    list_scene(out, scene_q)?;
    let Choice::Item(g) = read_choice(input, out, scene_q.len(), false)? else { unreachable!("guess not offered") };
    let guessed = &scene_q.objects[g].id;
    let success = guessed == target;
    let missing = scene_q.get(target).map(|o| o.description().to_string()).unwrap_or_default();
    if success {
        writeln!(out, "Correct! {target} {missing} is not in my picture.")?;
    } else {
        writeln!(out, "Wrong. The missing object was {target} {missing}.")?;
    }
    Ok(Outcome { success, rounds })
}
