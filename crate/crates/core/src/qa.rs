//! Multiple-choice coordination questions.
//!
//! A scenario is a frozen engine state plus the acting seat. Each scenario
//! yields up to three questions:
//!
//! | category | asks                                   | options                         |
//! |----------|----------------------------------------|---------------------------------|
//! | EC       | an authored question about the layout  | authored                        |
//! | ToM      | what the partner intends or needs      | partner's legal actions, or authored |
//! | JP       | "What action should I take next?"      | the acting seat's legal actions |
//!
//! Scenario files hold one JSON record per line.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{fuzzy_pick, letters_in, normalize, overlap};
use crate::backend::{Backend, ChatMessage};
use crate::game::{letter_index, option_letter, GameKind};
use crate::hanabi::{HanabiState, MAX_TOKENS, RANK_COUNTS};
use crate::kitchen::{feasible_macros, KitchenState, StationKind};
use crate::pursuit::{PursuitMode, PursuitState};
use crate::stats::{pearson, spearman, StatsError};
use crate::text::{self, ObsFlags};

/// Token-overlap settings for matching free text against option text.
pub const MATCH_THRESHOLD: f64 = 0.6;
pub const MATCH_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "EC")]
    Ec,
    #[serde(rename = "ToM")]
    Tom,
    #[serde(rename = "JP")]
    Jp,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Ec, Category::Tom, Category::Jp];

    pub fn name(self) -> &'static str {
        match self {
            Category::Ec => "EC",
            Category::Tom => "ToM",
            Category::Jp => "JP",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown category {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "game", content = "state", rename_all = "lowercase")]
pub enum Snapshot {
    Hanabi(HanabiState),
    Kitchen(KitchenState),
    Capture(PursuitState),
    Escape(PursuitState),
}

impl Snapshot {
    pub fn game(&self) -> GameKind {
        match self {
            Snapshot::Hanabi(_) => GameKind::Hanabi,
            Snapshot::Kitchen(_) => GameKind::Kitchen,
            Snapshot::Capture(_) => GameKind::Capture,
            Snapshot::Escape(_) => GameKind::Escape,
        }
    }

    pub fn pursuit(state: PursuitState) -> Self {
        match state.mode {
            PursuitMode::Capture => Snapshot::Capture(state),
            PursuitMode::Escape => Snapshot::Escape(state),
        }
    }

    /// Scenario text from `player`'s seat, without any action list.
    pub fn body(&self, player: usize) -> String {
        match self {
            Snapshot::Hanabi(s) => text::hanabi_body(s, player),
            Snapshot::Kitchen(s) => text::kitchen_body(s, player, ObsFlags::default()),
            Snapshot::Capture(s) | Snapshot::Escape(s) => {
                text::pursuit_body(s, player, ObsFlags::default())
            }
        }
    }

    /// Labels `player` could choose from right now.
    pub fn legal_labels(&self, player: usize) -> Vec<String> {
        match self {
            Snapshot::Hanabi(s) if s.current_player == player => s
                .legal_moves()
                .into_iter()
                .map(|m| s.move_label(m))
                .collect(),
            Snapshot::Hanabi(_) => Vec::new(),
            Snapshot::Kitchen(s) => feasible_macros(s, player)
                .iter()
                .map(|m| m.label())
                .collect(),
            Snapshot::Capture(s) | Snapshot::Escape(s) => s
                .legal_moves(player)
                .iter()
                .map(|m| m.to_string())
                .collect(),
        }
    }

    /// Structural checks a reloaded state must pass before questions are asked about it.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Snapshot::Hanabi(s) => validate_hanabi(s),
            Snapshot::Kitchen(s) => validate_kitchen(s),
            Snapshot::Capture(s) | Snapshot::Escape(s) => validate_pursuit(s),
        }
    }
}

fn validate_hanabi(s: &HanabiState) -> Result<(), String> {
    if s.card_total() != 50 {
        return Err(format!(
            "{} cards accounted for, expected 50",
            s.card_total()
        ));
    }
    if s.reveal_tokens > MAX_TOKENS || s.lives > 3 {
        return Err("token or life count out of range".into());
    }
    if s.stacks.iter().any(|&r| r > 5) {
        return Err("stack above 5".into());
    }
    let mut counts = [0u8; 25];
    let all = s
        .deck
        .iter()
        .chain(s.hands.iter().flatten())
        .chain(&s.discard_pile);
    for c in all {
        counts[c.color.index() * 5 + c.rank as usize - 1] += 1;
    }
    for (ci, &top) in s.stacks.iter().enumerate() {
        for r in 1..=top {
            counts[ci * 5 + r as usize - 1] += 1;
        }
    }
    if counts
        .iter()
        .enumerate()
        .any(|(i, &n)| n != RANK_COUNTS[i % 5])
    {
        return Err("card identities do not match the deck composition".into());
    }
    for (hand, know) in s.hands.iter().zip(&s.knowledge) {
        if hand.len() != know.len() {
            return Err("hand and knowledge lengths differ".into());
        }
        if hand.iter().zip(know).any(|(c, k)| !k.may_be(*c)) {
            return Err("knowledge rules out the actual card".into());
        }
    }
    if s.current_player >= s.hands.len() {
        return Err("current player out of range".into());
    }
    Ok(())
}

fn validate_kitchen(s: &KitchenState) -> Result<(), String> {
    let l = &s.layout;
    if s.chefs.iter().any(|c| !l.is_floor(c.pos)) {
        return Err("chef off the floor".into());
    }
    if s.chefs[0].pos == s.chefs[1].pos {
        return Err("chefs share a cell".into());
    }
    if s.cookers.len() != l.stations(StationKind::Cooker).len()
        || s.shared.len() != l.stations(StationKind::Shared).len()
        || s.counters.len() != l.stations(StationKind::Counter).len()
    {
        return Err("station counts differ from the layout".into());
    }
    if s.cookers.iter().any(|c| c.onions > 3) {
        return Err("cooker over capacity".into());
    }
    if !s.score.is_multiple_of(20) {
        return Err("score is not a whole number of deliveries".into());
    }
    Ok(())
}

fn validate_pursuit(s: &PursuitState) -> Result<(), String> {
    let rooms = &s.map.rooms;
    if !s
        .agent_rooms
        .iter()
        .chain([&s.adversary_room])
        .all(|r| rooms.contains(r))
    {
        return Err("unknown room".into());
    }
    if s.door_open.len() != s.map.doors.len() || s.fixes_done.len() != s.map.generators.len() {
        return Err("door or generator counts differ from the map".into());
    }
    Ok(())
}

/// One authored question. Missing `question` or `options` fall back to the
/// category defaults described at the top of this module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<String>>,
    /// Option text of the correct answer.
    pub gold: String,
}

impl QuestionSpec {
    pub fn gold(gold: impl Into<String>) -> Self {
        QuestionSpec {
            question: None,
            options: None,
            gold: gold.into(),
        }
    }

    pub fn authored<S: Into<String>>(
        question: impl Into<String>,
        options: impl IntoIterator<Item = S>,
        gold: impl Into<String>,
    ) -> Self {
        QuestionSpec {
            question: Some(question.into()),
            options: Some(options.into_iter().map(Into::into).collect()),
            gold: gold.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub id: String,
    /// Seat the questions are asked from.
    pub player: usize,
    pub snapshot: Snapshot,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ec: Option<QuestionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tom: Option<QuestionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jp: Option<QuestionSpec>,
}

impl ScenarioRecord {
    pub fn game(&self) -> GameKind {
        self.snapshot.game()
    }

    pub fn spec(&self, category: Category) -> Option<&QuestionSpec> {
        match category {
            Category::Ec => self.ec.as_ref(),
            Category::Tom => self.tom.as_ref(),
            Category::Jp => self.jp.as_ref(),
        }
    }

    pub fn partner(&self) -> usize {
        1 - self.player
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McqItem {
    pub scenario_id: String,
    pub game: GameKind,
    pub category: Category,
    pub prompt: String,
    /// Option texts; option `i` carries letter `option_letter(i)`.
    pub options: Vec<String>,
    pub gold: String,
}

impl McqItem {
    pub fn letters(&self) -> Vec<String> {
        (0..self.options.len()).map(option_letter).collect()
    }

    pub fn gold_index(&self) -> Option<usize> {
        letter_index(&self.gold).filter(|&i| i < self.options.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QaError {
    #[error("scenario {id} has no gold answer for {category}")]
    MissingGold { id: String, category: Category },
    #[error("scenario {id}: gold {gold:?} is not among the {category} options")]
    GoldNotInOptions {
        id: String,
        category: Category,
        gold: String,
    },
    #[error("scenario {id}: {category} needs at least two options")]
    TooFewOptions { id: String, category: Category },
    #[error("scenario {id}: {message}")]
    InvalidState { id: String, message: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error("expected {expected} response rows, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

fn default_question(game: GameKind, category: Category) -> Option<&'static str> {
    match (category, game) {
        (Category::Jp, _) => Some("What action should I take next?"),
        (Category::Tom, GameKind::Hanabi) => None,
        (Category::Tom, _) => Some("What action does my partner intend to take?"),
        (Category::Ec, _) => None,
    }
}

/// Build the multiple-choice item for one category of a scenario.
pub fn render_mcq(rec: &ScenarioRecord, category: Category) -> Result<McqItem, QaError> {
    let missing = || QaError::MissingGold {
        id: rec.id.clone(),
        category,
    };
    let spec = rec.spec(category).ok_or_else(missing)?;
    let game = rec.game();
    let question = spec
        .question
        .clone()
        .or_else(|| default_question(game, category).map(String::from))
        .ok_or_else(missing)?;
    // Action lists are headed as actions; authored lists as answers.
    let (options, header) = match (&spec.options, category) {
        (Some(o), _) => (o.clone(), "Available Answers:"),
        (None, Category::Jp) => (rec.snapshot.legal_labels(rec.player), "Available Actions:"),
        (None, Category::Tom) if game != GameKind::Hanabi => (
            partner_labels(&rec.snapshot, rec.partner()),
            "Available Actions:",
        ),
        (None, _) => return Err(missing()),
    };
    if options.len() < 2 {
        return Err(QaError::TooFewOptions {
            id: rec.id.clone(),
            category,
        });
    }
    let gold_idx = options
        .iter()
        .position(|o| *o == spec.gold)
        .ok_or_else(|| QaError::GoldNotInOptions {
            id: rec.id.clone(),
            category,
            gold: spec.gold.clone(),
        })?;
    // Room-graph scenarios are short enough that one blank line reads better.
    let gap = if matches!(game, GameKind::Capture | GameKind::Escape) {
        "\n\n"
    } else {
        "\n\n\n"
    };
    let prompt = format!(
        "{}{gap}{question}\n{header}\n{}",
        rec.snapshot.body(rec.player),
        text::lettered(&options)
    );
    Ok(McqItem {
        scenario_id: rec.id.clone(),
        game,
        category,
        prompt,
        options,
        gold: option_letter(gold_idx),
    })
}

/// What the partner could do next, as seen by the engine. For turn-based
/// Hanabi this is only defined on the partner's turn.
fn partner_labels(snapshot: &Snapshot, partner: usize) -> Vec<String> {
    match snapshot {
        Snapshot::Hanabi(s) => {
            let mut t = s.clone();
            t.current_player = partner;
            Snapshot::Hanabi(t).legal_labels(partner)
        }
        other => other.legal_labels(partner),
    }
}

/// Every item the scenarios define, in scenario then category order.
pub fn render_all(records: &[ScenarioRecord]) -> Result<Vec<McqItem>, QaError> {
    let mut out = Vec::new();
    for rec in records {
        for c in Category::ALL {
            if rec.spec(c).is_some() {
                out.push(render_mcq(rec, c)?);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- files

pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioRecord>, QaError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rec: ScenarioRecord = serde_json::from_str(line).map_err(|e| QaError::Format {
            line: i + 1,
            message: e.to_string(),
        })?;
        rec.snapshot
            .validate()
            .map_err(|message| QaError::InvalidState {
                id: rec.id.clone(),
                message,
            })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn load_scenarios(path: &Path) -> Result<Vec<ScenarioRecord>, QaError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| QaError::Io(format!("{}: {e}", path.display())))?;
    parse_scenarios(&text)
}

pub fn write_scenarios<W: Write>(mut w: W, records: &[ScenarioRecord]) -> Result<(), QaError> {
    for rec in records {
        let line = serde_json::to_string(rec).map_err(|e| QaError::Io(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| QaError::Io(e.to_string()))?;
    }
    Ok(())
}

const BUNDLED_PACK: &str = include_str!("../data/scenarios/coordination_qa.jsonl");

/// The small authored scenario pack shipped with the crate.
pub fn bundled_scenarios() -> &'static [ScenarioRecord] {
    static PACK: OnceLock<Vec<ScenarioRecord>> = OnceLock::new();
    PACK.get_or_init(|| parse_scenarios(BUNDLED_PACK).expect("bundled scenario pack is valid"))
}

// ---------------------------------------------------------------- answers

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    Option(usize),
    Unmatched,
}

impl Answer {
    pub fn letter(self) -> Option<String> {
        match self {
            Answer::Option(i) => Some(option_letter(i)),
            Answer::Unmatched => None,
        }
    }
}

fn answer_marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?i:answer)(?:\s+(?i:is))?\s*[:\-]?\s*(?i:option\s+)?\(?([A-Z]{1,2})(?:[.):,]|\s|$)",
        )
        .expect("valid regex")
    })
}

/// Read the chosen option out of a free-text reply.
///
/// Order: an `Answer: X` style marker, then bare option letters like `C.` or
/// `(C)`, then the option text itself.
pub fn extract_answer(response: &str, item: &McqItem) -> Answer {
    let n = item.options.len();
    if n == 0 {
        return Answer::Unmatched;
    }
    let marked = answer_marker()
        .captures_iter(response)
        .filter_map(|c| letter_index(c.get(1)?.as_str()))
        .filter(|&i| i < n)
        .last();
    if let Some(i) = marked {
        return Answer::Option(i);
    }

    let found = letters_in(response, n);
    let mut distinct: Vec<usize> = found.iter().map(|f| f.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() == 1 {
        return Answer::Option(distinct[0]);
    }
    if distinct.len() > 1 {
        // Keep the letter whose option text follows it.
        let agreeing: Vec<usize> = distinct
            .iter()
            .copied()
            .filter(|&i| {
                found.iter().any(|&(j, end)| {
                    j == i && {
                        let rest = response
                            .get(end..)
                            .unwrap_or("")
                            .lines()
                            .next()
                            .unwrap_or("");
                        overlap(rest, &item.options[i]) >= MATCH_THRESHOLD
                    }
                })
            })
            .collect();
        if agreeing.len() == 1 {
            return Answer::Option(agreeing[0]);
        }
    }

    let labels: Vec<&str> = item.options.iter().map(String::as_str).collect();
    let normalized: Vec<String> = labels.iter().map(|l| normalize(l)).collect();
    let lines: Vec<&str> = response
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    for candidate in lines.iter().copied().chain([response]) {
        let c = normalize(candidate);
        if let Some(i) = normalized.iter().position(|l| !l.is_empty() && *l == c) {
            return Answer::Option(i);
        }
    }
    fuzzy_pick(response, &labels, MATCH_THRESHOLD, MATCH_MARGIN)
        .or_else(|| {
            let hits: Vec<usize> = lines
                .iter()
                .filter_map(|l| fuzzy_pick(l, &labels, MATCH_THRESHOLD, MATCH_MARGIN))
                .collect();
            hits.last().copied()
        })
        .map_or(Answer::Unmatched, Answer::Option)
}

// ---------------------------------------------------------------- scoring

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialScore {
    pub trial: usize,
    pub correct: usize,
    pub total: usize,
    /// Replies no option could be read from; also counted as incorrect.
    pub unmatched: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub category: Category,
    pub trials: Vec<TrialScore>,
    pub mean_accuracy: f64,
    /// Expected accuracy of uniform random answering, the mean of 1/|options|.
    pub random_baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunScore {
    pub categories: Vec<CategoryScore>,
}

impl RunScore {
    pub fn category(&self, c: Category) -> Option<&CategoryScore> {
        self.categories.iter().find(|s| s.category == c)
    }
}

/// Grade `responses[item][trial]` against each item's gold letter.
pub fn score_run(
    items: &[McqItem],
    responses: &[Vec<String>],
    trials: usize,
) -> Result<RunScore, QaError> {
    if trials == 0 {
        return Err(QaError::NoTrials);
    }
    if responses.len() != items.len() {
        return Err(QaError::LengthMismatch {
            expected: items.len(),
            got: responses.len(),
        });
    }
    if let Some(bad) = responses.iter().find(|r| r.len() != trials) {
        return Err(QaError::LengthMismatch {
            expected: trials,
            got: bad.len(),
        });
    }
    let mut by_cat: BTreeMap<Category, Vec<usize>> = BTreeMap::new();
    for (i, item) in items.iter().enumerate() {
        by_cat.entry(item.category).or_default().push(i);
    }
    let categories = by_cat
        .into_iter()
        .map(|(category, idx)| {
            let trials: Vec<TrialScore> = (0..trials)
                .map(|t| {
                    let mut correct = 0;
                    let mut unmatched = 0;
                    for &i in &idx {
                        match extract_answer(&responses[i][t], &items[i]) {
                            Answer::Option(k) if Some(k) == items[i].gold_index() => correct += 1,
                            Answer::Option(_) => {}
                            Answer::Unmatched => unmatched += 1,
                        }
                    }
                    TrialScore {
                        trial: t,
                        correct,
                        total: idx.len(),
                        unmatched,
                        accuracy: correct as f64 / idx.len() as f64,
                    }
                })
                .collect();
            let mean_accuracy =
                trials.iter().map(|t| t.accuracy).sum::<f64>() / trials.len() as f64;
            let random_baseline = idx
                .iter()
                .map(|&i| 1.0 / items[i].options.len() as f64)
                .sum::<f64>()
                / idx.len() as f64;
            CategoryScore {
                category,
                trials,
                mean_accuracy,
                random_baseline,
            }
        })
        .collect();
    Ok(RunScore { categories })
}

/// Pearson r and Spearman rho (average ranks for ties).
pub fn correlations(x: &[f64], y: &[f64]) -> Result<(f64, f64), QaError> {
    Ok((pearson(x, y)?, spearman(x, y)?))
}

/// Ask `backend` every item `trials` times, with at most `max_workers` calls
/// in flight. Failed calls come back as empty replies, which score as unmatched.
pub fn collect_responses(
    items: &[McqItem],
    backend: &dyn Backend,
    trials: usize,
    max_workers: usize,
) -> Result<Vec<Vec<String>>, QaError> {
    let jobs: Vec<(usize, usize)> = (0..items.len())
        .flat_map(|i| (0..trials).map(move |t| (i, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(max_workers.max(1))
        .build()
        .map_err(|e| QaError::Io(e.to_string()))?;
    let replies: Vec<String> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, _)| match backend.complete(&[ChatMessage::user(items[i].prompt.clone())]) {
                Ok(c) => c.text,
                Err(e) => {
                    tracing::warn!(item = %items[i].scenario_id, error = %e, "question went unanswered");
                    String::new()
                }
            })
            .collect()
    });
    let mut out = vec![Vec::with_capacity(trials); items.len()];
    for ((i, _), r) in jobs.into_iter().zip(replies) {
        out[i].push(r);
    }
    Ok(out)
}

// ---------------------------------------------------------------- export

/// One row of the accuracy table: the data behind per-category bar charts
/// and model-to-model correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub model: String,
    pub category: Category,
    pub trial: usize,
    pub accuracy: f64,
}

pub fn accuracy_rows(model: &str, score: &RunScore) -> Vec<AccuracyRow> {
    score
        .categories
        .iter()
        .flat_map(|c| {
            c.trials.iter().map(|t| AccuracyRow {
                model: model.to_string(),
                category: c.category,
                trial: t.trial,
                accuracy: t.accuracy,
            })
        })
        .collect()
}

pub fn write_accuracy_csv<W: Write>(w: W, rows: &[AccuracyRow]) -> Result<(), QaError> {
    let mut csv = csv::Writer::from_writer(w);
    for r in rows {
        csv.serialize(r).map_err(|e| QaError::Io(e.to_string()))?;
    }
    csv.flush().map_err(|e| QaError::Io(e.to_string()))
}

pub fn read_accuracy_csv<R: Read>(r: R) -> Result<Vec<AccuracyRow>, QaError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| QaError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(options: &[&str], gold: &str) -> McqItem {
        McqItem {
            scenario_id: "t".into(),
            game: GameKind::Kitchen,
            category: Category::Jp,
            prompt: String::new(),
            options: options.iter().map(|s| s.to_string()).collect(),
            gold: gold.into(),
        }
    }

    #[test]
    fn answer_is_sentence() {
        let it = item(&["a", "b", "c", "d"], "C");
        assert_eq!(extract_answer("The answer is C.", &it), Answer::Option(2));
        assert_eq!(extract_answer("Answer: (B)", &it), Answer::Option(1));
        assert_eq!(extract_answer("", &it), Answer::Unmatched);
    }

    #[test]
    fn option_text_without_letter() {
        let it = item(
            &["pick up onion from o0.", "pick up plate from p0.", "wait."],
            "B",
        );
        assert_eq!(
            extract_answer("I would pick up plate from p0", &it),
            Answer::Option(1)
        );
    }

    #[test]
    fn out_of_range_letters_are_ignored() {
        let it = item(&["yes", "no"], "A");
        assert_eq!(extract_answer("Answer: E", &it), Answer::Unmatched);
    }

    #[test]
    fn bundled_pack_renders_with_gold_in_options() {
        let pack = bundled_scenarios();
        assert!(pack.len() >= 12);
        for it in render_all(pack).unwrap() {
            assert!(it.gold_index().is_some());
        }
    }
}
