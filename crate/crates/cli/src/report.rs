//! Plain-text renderings of manifests, statistics and metrics.

use std::io::Write;
use std::path::Path;

use anyhow::Result;
use diffgame::eval::{Group, Histogram, MetricsReport};
use diffgame::pipeline::{Manifest, StatsReport};
use serde::Serialize;

pub fn json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn manifest<W: Write>(out: &mut W, m: &Manifest, dir: &Path) -> Result<()> {
    writeln!(out, "wrote {}", dir.display())?;
    writeln!(out, "  seed            {}", m.seed)?;
    writeln!(out, "  config sha256   {}", m.config_sha256)?;
    writeln!(out, "  pairs           {}", m.pairs)?;
    writeln!(out, "  dialogs         {} of {} episodes", m.dialogs, m.episodes)?;
    writeln!(out, "  discard rate    {:.3}", m.discard_rate)?;
    for (reason, n) in &m.discards {
        writeln!(out, "    {reason:<14}{n}")?;
    }
    let s = &m.split_pairs;
    writeln!(out, "  split pairs     train {} / valid {} / test {}", s.train, s.valid, s.test)?;
    writeln!(out, "  templates       {}", m.template_count)?;
    writeln!(out, "  phrases         {}", m.phrase_count)?;
    Ok(())
}

pub fn stats<W: Write>(out: &mut W, s: &StatsReport) -> Result<()> {
    writeln!(out, "dialogs               {}", s.dialogs)?;
    writeln!(out, "questions             {}", s.questions)?;
    writeln!(out, "mean rounds           {:.2}", s.mean_rounds)?;
    writeln!(out, "unique questions      {}", s.unique_questions)?;
    writeln!(out, "unique answers        {}", s.unique_answers)?;
    writeln!(out, "mean question length  {:.2}", s.mean_question_tokens)?;
    writeln!(out, "count questions       {:.3}", s.count_fraction)?;
    writeln!(out, "top-6 answer mass     {:.3} (actions {:.3})", s.top6_answer_mass, s.top6_answer_action_mass)?;
    writeln!(out, "subtypes")?;
    for (k, v) in &s.subtype_distribution {
        writeln!(out, "  {k:<16}{v:.3}")?;
    }
    writeln!(out, "frequent answers")?;
    for (a, n) in &s.top_answers {
        writeln!(out, "  {n:>7}  {a}")?;
    }
    Ok(())
}

fn rate(g: &Group) -> String {
    g.success_rate.map_or_else(|| "-".to_string(), |r| format!("{:.3}", r))
}

fn histogram<W: Write>(out: &mut W, title: &str, h: &Histogram) -> Result<()> {
    writeln!(out, "{title}")?;
    let last = h.buckets.len().saturating_sub(1);
    for (i, b) in h.buckets.iter().enumerate() {
        let close = if i == last { ']' } else { ')' };
        writeln!(
            out,
            "  [{:.2}, {:.2}{close}  dialogs {:>6}  success {}",
            b.lo,
            b.hi,
            b.group.dialogs,
            rate(&b.group)
        )?;
    }
    writeln!(out, "  undefined     dialogs {:>6}  success {}", h.undefined.dialogs, rate(&h.undefined))?;
    Ok(())
}

pub fn metrics<W: Write>(out: &mut W, m: &MetricsReport) -> Result<()> {
    writeln!(out, "answerer epsilon      {}", m.agent_epsilon)?;
    writeln!(out, "reference dialogs     {}", m.reference_dialogs)?;
    writeln!(out, "dataset success       {:.3}", m.dataset_success_rate)?;
    writeln!(out, "replay success        {:.3}", m.success_rate)?;
    histogram(out, "cate-q accuracy", &m.cateq_accuracy_histogram)?;
    histogram(out, "cate-q recall", &m.cateq_recall_histogram)?;
    writeln!(out, "transitions")?;
    let t = &m.transition_table;
    writeln!(out, "  deepening   pairs {:>6}  success {}", t.deepening.dialogs, rate(&t.deepening))?;
    writeln!(out, "  converting  pairs {:>6}  success {}", t.converting.dialogs, rate(&t.converting))?;
    writeln!(out, "answer accuracy by subtype")?;
    for (k, a) in &m.per_subtype_accuracy {
        let acc = a.accuracy.map_or_else(|| "-".to_string(), |r| format!("{r:.3}"));
        writeln!(out, "  {k:<16}{acc:>7}  ({} questions)", a.questions)?;
    }
    Ok(())
}
