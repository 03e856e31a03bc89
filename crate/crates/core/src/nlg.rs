//! Template realization of question and answer actions.
//!
//! Slot markers: `[f(X)]`, `[f(X1)]`, `[f(X2)]` are property-set phrases,
//! `[C]` a count or a color, `[A]` the copula, `[L]`, `[L1]`, `[L2]`
//! directions and `[M]` a material.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::asim::{AnswerAction, AttributeValue, DescriptionGroup, NoneReason};
use crate::qsim::{QuestionAction, QuestionSubtype};
use crate::taxonomy::{Color, Material, Props, Taxonomy, TaxonomyError};

#[derive(Debug, Error)]
pub enum NlgError {
    #[error("no phrase for category `{0}`")]
    MissingPhrase(String),
    #[error("no template for {0} with the given slots")]
    MissingTemplate(&'static str),
    #[error("unknown subtype `{0}` in template data")]
    UnknownSubtype(String),
    #[error("template `{pattern}` uses `{marker}` outside the {subtype} slot schema")]
    ForeignMarker { subtype: &'static str, pattern: String, marker: String },
    #[error("unfilled marker left in `{0}`")]
    Unfilled(String),
    #[error("phrase `{phrase}` names both {first} and {second}")]
    AmbiguousPhrase { phrase: String, first: Props, second: Props },
    #[error("malformed data file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}

const MARKERS: [&str; 9] = ["[f(X)]", "[f(X1)]", "[f(X2)]", "[C]", "[A]", "[L]", "[L1]", "[L2]", "[M]"];

/// Markers a subtype may use, and which of them disclose the asker's own
/// observation.
fn schema(subtype: QuestionSubtype) -> (&'static [&'static str], Option<&'static str>) {
    match subtype {
        QuestionSubtype::CountNoHint => (&["[f(X)]"], None),
        QuestionSubtype::CountHint => (&["[C]", "[A]", "[f(X)]"], None),
        QuestionSubtype::RefIt | QuestionSubtype::RefThem => (&[], None),
        QuestionSubtype::ExtremePic => (&["[L]", "[f(X)]"], Some("[f(X)]")),
        QuestionSubtype::ExtremeObj => (&["[L1]", "[f(X2)]", "[f(X1)]"], Some("[f(X1)]")),
        QuestionSubtype::ExtremeObj2 => (&["[L1]", "[L2]", "[f(X2)]", "[f(X1)]"], Some("[f(X1)]")),
        QuestionSubtype::QueryColor => (&["[f(X)]", "[C]"], Some("[C]")),
        QuestionSubtype::QueryMaterial => (&["[f(X)]", "[M]"], Some("[M]")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Number {
    Singular,
    Plural,
}

/// How a phrase is introduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Determiner {
    /// After "the": no article.
    Bare,
    /// "a"/"an" with the singular.
    Indefinite,
}

#[derive(Clone, Debug)]
struct NounForm {
    singular: String,
    plural: String,
}

impl NounForm {
    fn get(&self, number: Number) -> &str {
        match number {
            Number::Singular => &self.singular,
            Number::Plural => &self.plural,
        }
    }
}

fn with_adjectives(head: &str, adjectives: &str) -> String {
    if head.contains("{adj}") {
        let adj = if adjectives.is_empty() { String::new() } else { format!("{adjectives} ") };
        head.replace("{adj}", &adj)
    } else if adjectives.is_empty() {
        head.to_string()
    } else {
        format!("{adjectives} {head}")
    }
}

#[derive(Deserialize)]
struct NounFile {
    generic: Vec<[String; 2]>,
    noun: BTreeMap<String, NounEntry>,
}

#[derive(Deserialize)]
struct NounEntry {
    forms: Vec<[String; 2]>,
}

#[derive(Deserialize)]
struct TemplateFile {
    template: Vec<TemplateEntry>,
    transitions: Transitions,
}

#[derive(Deserialize)]
struct TemplateEntry {
    subtype: String,
    patterns: Vec<String>,
}

/// Canned answer prefixes comparing the answer to a disclosed count.
#[derive(Clone, Debug, Deserialize)]
pub struct Transitions {
    pub same: Vec<String>,
    pub diff: Vec<String>,
    pub more: Vec<String>,
    pub less: Vec<String>,
}

impl Transitions {
    fn len(&self) -> usize {
        self.same.len() + self.diff.len() + self.more.len() + self.less.len()
    }
}

pub const BUILTIN_NOUNS: &str = include_str!("../data/nouns.toml");
pub const BUILTIN_TEMPLATES: &str = include_str!("../data/templates.toml");

/// Noun forms, question templates and transition sentences.
#[derive(Clone, Debug)]
pub struct Lexicon {
    generic: Vec<NounForm>,
    nouns: HashMap<String, Vec<NounForm>>,
    templates: BTreeMap<QuestionSubtype, Vec<String>>,
    transitions: Transitions,
}

fn forms(raw: Vec<[String; 2]>) -> Vec<NounForm> {
    raw.into_iter().map(|[singular, plural]| NounForm { singular, plural }).collect()
}

impl Lexicon {
    pub fn builtin(taxonomy: &Taxonomy) -> Self {
        Self::from_toml(BUILTIN_NOUNS, BUILTIN_TEMPLATES, taxonomy).expect("builtin lexicon is valid")
    }

    pub fn from_toml(nouns: &str, templates: &str, taxonomy: &Taxonomy) -> Result<Self, NlgError> {
        let nf: NounFile = toml::from_str(nouns)?;
        let tf: TemplateFile = toml::from_str(templates)?;
        for name in nf.noun.keys() {
            if !taxonomy.contains(name) {
                return Err(TaxonomyError::UnknownCategory(name.clone()).into());
            }
        }
        for c in taxonomy.categories() {
            if nf.noun.get(c).is_none_or(|e| e.forms.is_empty()) {
                return Err(NlgError::MissingPhrase(c.to_string()));
            }
        }
        let mut by_subtype: BTreeMap<QuestionSubtype, Vec<String>> = BTreeMap::new();
        for entry in tf.template {
            let subtype = QuestionSubtype::parse(&entry.subtype)
                .ok_or_else(|| NlgError::UnknownSubtype(entry.subtype.clone()))?;
            let (allowed, _) = schema(subtype);
            for p in &entry.patterns {
                for m in markers_in(p) {
                    if !allowed.contains(&m.as_str()) {
                        return Err(NlgError::ForeignMarker {
                            subtype: subtype.as_str(),
                            pattern: p.clone(),
                            marker: m,
                        });
                    }
                }
            }
            by_subtype.entry(subtype).or_default().extend(entry.patterns);
        }
        for s in QuestionSubtype::ALL {
            if by_subtype.get(&s).is_none_or(|v| v.is_empty()) {
                return Err(NlgError::MissingTemplate(s.as_str()));
            }
        }
        Ok(Lexicon {
            generic: forms(nf.generic),
            nouns: nf.noun.into_iter().map(|(k, v)| (k, forms(v.forms))).collect(),
            templates: by_subtype,
            transitions: tf.transitions,
        })
    }

    pub fn templates(&self, subtype: QuestionSubtype) -> &[String] {
        self.templates.get(&subtype).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn transitions(&self) -> &Transitions {
        &self.transitions
    }

    /// Question templates plus transition sentences.
    pub fn template_count(&self) -> usize {
        self.templates.values().map(Vec::len).sum::<usize>() + self.transitions.len()
    }

    fn heads(&self, category: Option<&str>) -> Result<&[NounForm], NlgError> {
        match category {
            None => Ok(&self.generic),
            Some(c) => self.nouns.get(c).map(Vec::as_slice).ok_or_else(|| NlgError::MissingPhrase(c.to_string())),
        }
    }

    /// Every (singular, plural) phrase pair for a property set, without
    /// articles.
    pub fn phrases(&self, p: &Props) -> Result<Vec<(String, String)>, NlgError> {
        let adjectives = adjectives(p);
        Ok(self
            .heads(p.category())?
            .iter()
            .map(|f| (with_adjectives(&f.singular, &adjectives), with_adjectives(&f.plural, &adjectives)))
            .collect())
    }

    /// One phrase for `p`; the head noun variant is drawn from `rng`.
    pub fn realize_property_set<R: Rng + ?Sized>(
        &self,
        p: &Props,
        number: Number,
        determiner: Determiner,
        rng: &mut R,
    ) -> Result<String, NlgError> {
        let heads = self.heads(p.category())?;
        let head = heads.choose(rng).ok_or_else(|| NlgError::MissingPhrase(p.to_string()))?;
        let phrase = with_adjectives(head.get(number), &adjectives(p));
        Ok(match (determiner, number) {
            (Determiner::Indefinite, Number::Singular) => format!("{} {phrase}", indefinite_article(&phrase)),
            _ => phrase,
        })
    }

    /// Phrase preceded by a count, with number agreement.
    pub fn realize_counted<R: Rng + ?Sized>(&self, p: &Props, count: u32, rng: &mut R) -> Result<String, NlgError> {
        if count == 1 {
            self.realize_property_set(p, Number::Singular, Determiner::Indefinite, rng)
        } else {
            let phrase = self.realize_property_set(p, Number::Plural, Determiner::Bare, rng)?;
            Ok(format!("{} {phrase}", count_word(count)))
        }
    }

    /// Every phrase the catalog can produce for property sets over the
    /// taxonomy, mapped back to its property set. Fails if two sets share
    /// a phrase.
    pub fn phrase_catalog(&self, taxonomy: &Taxonomy) -> Result<BTreeMap<String, Props>, NlgError> {
        let colors = std::iter::once(None).chain(Color::ALL.iter().copied().map(Some));
        let materials: Vec<Option<Material>> =
            std::iter::once(None).chain(Material::ALL.iter().copied().map(Some)).collect();
        let categories: Vec<Option<String>> =
            std::iter::once(None).chain(taxonomy.categories().map(|c| Some(c.to_string()))).collect();
        let mut out: BTreeMap<String, Props> = BTreeMap::new();
        for c in colors {
            for &m in &materials {
                for cat in &categories {
                    let Some(p) = Props::new(c, m, cat.clone()) else { continue };
                    for (sg, pl) in self.phrases(&p)? {
                        for phrase in [sg, pl] {
                            if let Some(prev) = out.get(&phrase) {
                                if prev != &p {
                                    return Err(NlgError::AmbiguousPhrase { phrase, first: prev.clone(), second: p });
                                }
                            } else {
                                out.insert(phrase, p.clone());
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn pick_template<R: Rng + ?Sized>(
        &self,
        subtype: QuestionSubtype,
        has_own: bool,
        rng: &mut R,
    ) -> Result<&str, NlgError> {
        let (_, own_marker) = schema(subtype);
        let usable: Vec<&String> =
            self.templates(subtype).iter().filter(|t| has_own || own_marker.is_none_or(|m| !t.contains(m))).collect();
        usable.choose(rng).map(|s| s.as_str()).ok_or(NlgError::MissingTemplate(subtype.as_str()))
    }

    /// Question text: a uniformly chosen template of the subtype with its
    /// slots filled.
    pub fn realize_question<R: Rng + ?Sized>(
        &self,
        question: &QuestionAction,
        rng: &mut R,
    ) -> Result<String, NlgError> {
        let subtype = question.subtype();
        let mut fills: Vec<(&str, String)> = Vec::new();
        let has_own = match question {
            QuestionAction::ExtremePic { own, .. }
            | QuestionAction::ExtremeObj { own, .. }
            | QuestionAction::ExtremeObj2 { own, .. } => own.is_some(),
            QuestionAction::QueryColor { own, .. } => own.is_some(),
            QuestionAction::QueryMaterial { own, .. } => own.is_some(),
            _ => true,
        };
        let template = self.pick_template(subtype, has_own, rng)?.to_string();
        match question {
            QuestionAction::CountNoHint { p_set } => {
                fills.push(("[f(X)]", self.realize_property_set(p_set, Number::Plural, Determiner::Bare, rng)?));
            }
            QuestionAction::CountHint { p_set, count } => {
                let number = if *count == 1 { Number::Singular } else { Number::Plural };
                fills.push(("[C]", count_word(*count)));
                fills.push(("[A]", if *count == 1 { "is" } else { "are" }.to_string()));
                fills.push(("[f(X)]", self.realize_property_set(p_set, number, Determiner::Bare, rng)?));
            }
            QuestionAction::ExtremePic { location, own } => {
                fills.push(("[L]", location.as_str().to_string()));
                if let Some(own) = own {
                    fills.push((
                        "[f(X)]",
                        self.realize_property_set(own, Number::Singular, Determiner::Indefinite, rng)?,
                    ));
                }
            }
            QuestionAction::ExtremeObj { anchor, location, own } => {
                fills.push(("[L1]", location.as_str().to_string()));
                fills.push(("[f(X2)]", self.realize_property_set(anchor, Number::Singular, Determiner::Bare, rng)?));
                if let Some(own) = own {
                    fills.push((
                        "[f(X1)]",
                        self.realize_property_set(own, Number::Singular, Determiner::Indefinite, rng)?,
                    ));
                }
            }
            QuestionAction::ExtremeObj2 { anchor, anchor_location, location, own } => {
                fills.push(("[L1]", location.as_str().to_string()));
                fills.push(("[L2]", anchor_location.as_str().to_string()));
                fills.push(("[f(X2)]", self.realize_property_set(anchor, Number::Singular, Determiner::Bare, rng)?));
                if let Some(own) = own {
                    fills.push((
                        "[f(X1)]",
                        self.realize_property_set(own, Number::Singular, Determiner::Indefinite, rng)?,
                    ));
                }
            }
            QuestionAction::QueryColor { referent, own } => {
                fills.push(("[f(X)]", self.realize_property_set(referent, Number::Singular, Determiner::Bare, rng)?));
                if let Some(c) = own {
                    fills.push(("[C]", c.as_str().to_string()));
                }
            }
            QuestionAction::QueryMaterial { referent, own } => {
                fills.push(("[f(X)]", self.realize_property_set(referent, Number::Singular, Determiner::Bare, rng)?));
                if let Some(m) = own {
                    fills.push(("[M]", material_noun(*m).to_string()));
                }
            }
            QuestionAction::RefIt { .. } | QuestionAction::RefThem { .. } => {}
        }
        fill(&template, &fills)
    }

    /// Answer text. Answers to count-hint questions open with a transition
    /// sentence comparing the answer to the hint.
    pub fn realize_answer<R: Rng + ?Sized>(
        &self,
        answer: &AnswerAction,
        question: &QuestionAction,
        rng: &mut R,
    ) -> Result<String, NlgError> {
        let pick = |set: &[String], rng: &mut R| set.choose(rng).cloned().unwrap_or_default();
        Ok(match answer {
            AnswerAction::Count(k) => match question.hint() {
                Some(h) if h == *k => pick(&self.transitions.same, rng),
                Some(h) => {
                    let set = if *k == h + 1 {
                        &self.transitions.more
                    } else if *k + 1 == h {
                        &self.transitions.less
                    } else {
                        &self.transitions.diff
                    };
                    format!("{} I have {}.", pick(set, rng), count_word(*k))
                }
                None => format!("{}.", capitalize(&count_word(*k))),
            },
            AnswerAction::Description(groups) => format!("{}.", capitalize(&self.enumerate(groups, rng)?)),
            AnswerAction::Attribute(AttributeValue::Color(c)) => format!("{}.", capitalize(c.as_str())),
            AnswerAction::Attribute(AttributeValue::Material(m)) => format!("{}.", capitalize(m.as_str())),
            AnswerAction::None(NoneReason::Absent) => "There is no such thing in my picture.".to_string(),
            AnswerAction::None(NoneReason::Ambiguous) => "I am not sure which one you mean.".to_string(),
        })
    }

    fn enumerate<R: Rng + ?Sized>(&self, groups: &[DescriptionGroup], rng: &mut R) -> Result<String, NlgError> {
        let parts =
            groups.iter().map(|g| self.realize_counted(&g.description, g.count, rng)).collect::<Result<Vec<_>, _>>()?;
        Ok(match parts.as_slice() {
            [] => String::new(),
            [one] => one.clone(),
            [init @ .., last] => format!("{} and {last}", init.join(", ")),
        })
    }
}

fn adjectives(p: &Props) -> String {
    [p.color().map(Color::as_str), p.material().map(Material::as_str)]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>()
        .join(" ")
}

fn markers_in(pattern: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = pattern;
    while let Some(start) = rest.find('[') {
        let Some(len) = rest[start..].find(']') else { break };
        out.push(rest[start..start + len + 1].to_string());
        rest = &rest[start + len + 1..];
    }
    out
}

fn fill(template: &str, fills: &[(&str, String)]) -> Result<String, NlgError> {
    let mut out = template.to_string();
    for (marker, value) in fills {
        out = out.replace(marker, value);
    }
    if MARKERS.iter().any(|m| out.contains(m)) || out.contains("[f(") {
        return Err(NlgError::Unfilled(out));
    }
    Ok(capitalize(&out))
}

pub fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn indefinite_article(phrase: &str) -> &'static str {
    match phrase.chars().next() {
        Some(c) if "aeiouAEIOU".contains(c) => "an",
        _ => "a",
    }
}

/// Words up to ten, digits above.
pub fn count_word(n: u32) -> String {
    const WORDS: [&str; 11] = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"];
    WORDS.get(n as usize).map(|w| w.to_string()).unwrap_or_else(|| n.to_string())
}

pub fn material_noun(m: Material) -> &'static str {
    match m {
        Material::Wooden => "wood",
        other => other.as_str(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::Direction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lexicon() -> (Taxonomy, Lexicon) {
        let t = Taxonomy::builtin();
        let l = Lexicon::builtin(&t);
        (t, l)
    }

    #[test]
    fn inventory_size() {
        let (_, l) = lexicon();
        assert_eq!(l.template_count(), 43);
        assert_eq!(l.templates(QuestionSubtype::CountNoHint).len(), 5);
        assert_eq!(l.templates(QuestionSubtype::CountHint).len(), 4);
    }

    #[test]
    fn property_set_phrases() {
        let (_, l) = lexicon();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let wf = Props::of_material(Material::Wooden).with_category("furniture");
        assert_eq!(
            l.realize_property_set(&wf, Number::Plural, Determiner::Bare, &mut rng).unwrap(),
            "pieces of wooden furniture"
        );
        let apple = Props::of_category("apple");
        assert_eq!(
            l.realize_property_set(&apple, Number::Singular, Determiner::Indefinite, &mut rng).unwrap(),
            "an apple"
        );
        let white = Props::of_color(Color::White);
        let p = l.realize_property_set(&white, Number::Plural, Determiner::Bare, &mut rng).unwrap();
        assert!(p == "white things" || p == "white objects");
    }

    #[test]
    fn catalog_round_trips() {
        let (t, l) = lexicon();
        let catalog = l.phrase_catalog(&t).unwrap();
        let p = Props::of_color(Color::White).with_material(Material::Wooden).with_category("nightstand");
        for (sg, pl) in l.phrases(&p).unwrap() {
            assert_eq!(catalog[&sg], p);
            assert_eq!(catalog[&pl], p);
        }
        assert!(catalog.len() > 10_000);
    }

    #[test]
    fn count_questions() {
        let (_, l) = lexicon();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let white = Props::of_color(Color::White);
        for _ in 0..20 {
            let q = l.realize_question(&QuestionAction::CountNoHint { p_set: white.clone() }, &mut rng).unwrap();
            assert!(q.contains("white things") || q.contains("white objects"), "{q}");
            let q =
                l.realize_question(&QuestionAction::CountHint { p_set: white.clone(), count: 4 }, &mut rng).unwrap();
            assert!(q.to_lowercase().contains("four white"), "{q}");
            assert!(!q.contains(" is "), "{q}");
        }
        let q = l.realize_question(&QuestionAction::RefThem { antecedent: white }, &mut rng).unwrap();
        assert!(l.templates(QuestionSubtype::RefThem).contains(&q));
    }

    #[test]
    fn hint_transitions() {
        let (_, l) = lexicon();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = Props::of_color(Color::White);
        let q = |count| QuestionAction::CountHint { p_set: p.clone(), count };
        let same = l.realize_answer(&AnswerAction::Count(4), &q(4), &mut rng).unwrap();
        assert!(l.transitions().same.contains(&same));
        let less = l.realize_answer(&AnswerAction::Count(2), &q(3), &mut rng).unwrap();
        assert!(l.transitions().less.iter().any(|t| less.starts_with(t.as_str())), "{less}");
        assert!(less.ends_with("I have two."));
        let more = l.realize_answer(&AnswerAction::Count(4), &q(3), &mut rng).unwrap();
        assert!(l.transitions().more.iter().any(|t| more.starts_with(t.as_str())));
        let diff = l.realize_answer(&AnswerAction::Count(6), &q(3), &mut rng).unwrap();
        assert!(l.transitions().diff.iter().any(|t| diff.starts_with(t.as_str())));
        let plain =
            l.realize_answer(&AnswerAction::Count(4), &QuestionAction::CountNoHint { p_set: p }, &mut rng).unwrap();
        assert_eq!(plain, "Four.");
    }

    #[test]
    fn enumeration_answer() {
        let (_, l) = lexicon();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = AnswerAction::Description(vec![
            DescriptionGroup { description: Props::of_category("decorative plate"), count: 2 },
            DescriptionGroup { description: Props::of_category("vase"), count: 1 },
        ]);
        let q = QuestionAction::RefThem { antecedent: Props::of_category("decoration") };
        assert_eq!(l.realize_answer(&a, &q, &mut rng).unwrap(), "Two decorative plates and a vase.");
    }

    #[test]
    fn extreme_question_fills_all_slots() {
        let (_, l) = lexicon();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let q = QuestionAction::ExtremeObj2 {
            anchor: Props::of_category("table"),
            anchor_location: Direction::Right,
            location: Direction::Left,
            own: Some(Props::describe(Color::Black, Material::Wooden, "frame")),
        };
        for _ in 0..30 {
            let text = l.realize_question(&q, &mut rng).unwrap();
            assert!(!text.contains('['), "{text}");
            assert!(text.contains("rightmost table"), "{text}");
        }
        let bare = QuestionAction::ExtremePic { location: Direction::Left, own: None };
        for _ in 0..30 {
            let text = l.realize_question(&bare, &mut rng).unwrap();
            assert!(!text.contains('['), "{text}");
        }
    }

    #[test]
    fn number_words() {
        assert_eq!(count_word(10), "ten");
        assert_eq!(count_word(11), "11");
        assert_eq!(indefinite_article("elephant toy"), "an");
    }

    #[test]
    fn rejects_foreign_marker() {
        let t = Taxonomy::builtin();
        let bad = BUILTIN_TEMPLATES.replace("What are they?", "What are [f(X)]?");
        assert!(matches!(Lexicon::from_toml(BUILTIN_NOUNS, &bad, &t), Err(NlgError::ForeignMarker { .. })));
    }
}
