//! The coordination agent: memory assembly, a planner with optional partner
//! modelling and self-verification, and grounding of free text to legal moves.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{BackendError, BackendRef, ChatMessage};
use crate::game::{letter_index, ActionId, Agent, Decision, DecisionView, GameKind, StateRef};
use crate::hanabi::HanabiMove;
use crate::text::{tom_prompt, Templates};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AgentError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("no legal actions to choose from")]
    NoLegalActions,
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FallbackRule {
    /// Never gamble: discard the oldest unclued card, wait, or stay.
    Safest,
    FirstLegal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Planner,
    Tom,
    Verifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Okay,
    NotOkay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCall {
    pub stage: Stage,
    pub prompt: Vec<ChatMessage>,
    pub response: String,
    pub latency: f64,
    /// Action the call was about: parsed for the planner, checked for the verifier.
    pub action: Option<String>,
    pub verdict: Option<Verdict>,
}

/// Everything one decision asked and heard.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecisionTrace {
    pub player: usize,
    pub calls: Vec<TraceCall>,
    pub tom: Option<ToMNotes>,
    pub chosen: String,
    pub fallback: bool,
}

impl DecisionTrace {
    pub fn count(&self, stage: Stage) -> usize {
        self.calls.iter().filter(|c| c.stage == stage).count()
    }

    pub fn latency(&self) -> f64 {
        self.calls.iter().map(|c| c.latency).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToMNotes {
    pub explanation: Option<String>,
    pub suggestion: Option<String>,
    pub raw: String,
}

impl ToMNotes {
    /// Text appended to working memory.
    pub fn render(&self) -> String {
        match (&self.explanation, &self.suggestion) {
            (None, None) => self.raw.trim().to_string(),
            (e, s) => {
                let mut out = Vec::new();
                if let Some(e) = e {
                    out.push(format!("Partner Action Explanation: {e}"));
                }
                if let Some(s) = s {
                    out.push(format!("Clue Suggestion: {s}"));
                }
                out.join("\n")
            }
        }
    }
}

/// Memory bundle for one seat.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentContext {
    pub long_term: String,
    pub working: String,
    pub episodic: Vec<String>,
}

#[derive(Clone)]
pub struct CacConfig {
    pub planner: BackendRef,
    pub tom: Option<BackendRef>,
    pub verifier: Option<BackendRef>,
    pub max_verify_retries: u32,
    pub max_parse_retries: u32,
    pub fallback: FallbackRule,
    pub match_threshold: f64,
    pub match_margin: f64,
    pub templates: Arc<Templates>,
}

impl CacConfig {
    pub fn new(planner: BackendRef) -> Self {
        CacConfig {
            planner,
            tom: None,
            verifier: None,
            max_verify_retries: 3,
            max_parse_retries: 2,
            fallback: FallbackRule::Safest,
            match_threshold: 0.6,
            match_margin: 0.1,
            templates: Arc::new(Templates::bundled().clone()),
        }
    }

    pub fn with_tom(mut self, backend: BackendRef) -> Self {
        self.tom = Some(backend);
        self
    }

    pub fn with_verifier(mut self, backend: BackendRef) -> Self {
        self.verifier = Some(backend);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("response does not name a legal action")]
pub struct ParseFailure;

fn marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)action\s*:").expect("valid regex"))
}

fn letter_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?:^|[^A-Za-z])\(?([A-Z]{1,2})(?:[.):]|$)").expect("valid regex")
    })
}

/// Lowercase words with punctuation and possessive marks dropped.
pub fn normalize(text: &str) -> String {
    let lowered = text.to_lowercase().replace("'s", "s").replace('’', "");
    lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn tokens(text: &str) -> BTreeSet<String> {
    normalize(text)
        .split(' ')
        .filter(|w| !w.is_empty())
        .map(String::from)
        .collect()
}

/// Dice overlap of the two token sets, in [0, 1].
pub fn overlap(a: &str, b: &str) -> f64 {
    let (ta, tb) = (tokens(a), tokens(b));
    if ta.is_empty() || tb.is_empty() {
        return 0.0;
    }
    let common = ta.intersection(&tb).count();
    2.0 * common as f64 / (ta.len() + tb.len()) as f64
}

/// Best fuzzy match of `text` among `labels`, if clear enough.
pub fn fuzzy_pick(text: &str, labels: &[&str], threshold: f64, margin: f64) -> Option<usize> {
    let mut scored: Vec<(f64, usize)> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (overlap(text, l), i))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let (best, idx) = *scored.first()?;
    let runner = scored.get(1).map_or(0.0, |s| s.0);
    (best >= threshold && best - runner >= margin).then_some(idx)
}

/// Option letters mentioned in `text` that fall inside `0..count`, in order of appearance.
pub fn letters_in(text: &str, count: usize) -> Vec<(usize, usize)> {
    letter_re()
        .captures_iter(text)
        .filter_map(|c| {
            let m = c.get(1)?;
            let i = letter_index(m.as_str())?;
            (i < count).then_some((i, m.end()))
        })
        .collect()
}

/// Map a free-text reply onto one of `labels`.
///
/// Tries, in order: the text after the last `Action:` marker matched exactly
/// (ignoring case and punctuation), an option letter when the list is lettered,
/// and finally token overlap above `threshold` with a clear `margin`.
pub fn parse_action(
    response: &str,
    labels: &[&str],
    lettered: bool,
    threshold: f64,
    margin: f64,
) -> Result<usize, ParseFailure> {
    if labels.is_empty() {
        return Err(ParseFailure);
    }
    let segment = match marker().find_iter(response).last() {
        Some(m) => &response[m.end()..],
        None => response,
    };
    let segment = segment.trim();
    let first_line = segment
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("")
        .trim();
    let normalized: Vec<String> = labels.iter().map(|l| normalize(l)).collect();

    for candidate in [first_line, segment] {
        let n = normalize(candidate);
        if let Some(i) = normalized.iter().position(|l| *l == n) {
            return Ok(i);
        }
    }

    if lettered {
        let found = letters_in(first_line, labels.len());
        let found = if found.is_empty() {
            letters_in(segment, labels.len())
        } else {
            found
        };
        let distinct: BTreeSet<usize> = found.iter().map(|f| f.0).collect();
        if distinct.len() == 1 {
            return Ok(found[0].0);
        }
        // Several letters: keep the one whose label follows it.
        let agreeing: BTreeSet<usize> = found
            .iter()
            .filter(|(i, end)| {
                let rest = &segment.get(*end..).unwrap_or("");
                let rest = rest.lines().next().unwrap_or("");
                overlap(rest, labels[*i]) >= threshold
            })
            .map(|f| f.0)
            .collect();
        if agreeing.len() == 1 {
            return Ok(*agreeing.iter().next().expect("one element"));
        }
    }

    fuzzy_pick(first_line, labels, threshold, margin)
        .or_else(|| fuzzy_pick(segment, labels, threshold, margin))
        .ok_or(ParseFailure)
}

/// Read the last `Verification: Okay|Not Okay` marker. Anything else is a rejection.
pub fn parse_verdict(reply: &str) -> Verdict {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r"(?i)verification\s*:\s*\**\s*(not\s+okay|okay)").expect("valid regex")
    });
    match re.captures_iter(reply).last() {
        Some(c) if c[1].to_lowercase() == "okay" => Verdict::Okay,
        _ => Verdict::NotOkay,
    }
}

pub fn parse_tom(reply: &str) -> ToMNotes {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r"(?im)^\s*\**\s*(partner action explanation|clue suggestion)\s*\**\s*:\s*(.*)$")
            .expect("valid regex")
    });
    let mut notes = ToMNotes {
        raw: reply.to_string(),
        ..ToMNotes::default()
    };
    for c in re.captures_iter(reply) {
        let value = c[2].trim().to_string();
        if value.is_empty() {
            continue;
        }
        if c[1].to_lowercase().starts_with("partner") {
            notes.explanation = Some(value);
        } else {
            notes.suggestion = Some(value);
        }
    }
    notes
}

fn call(
    backend: &BackendRef,
    stage: Stage,
    prompt: Vec<ChatMessage>,
    trace: &mut DecisionTrace,
) -> Result<String, AgentError> {
    let completion = backend.complete(&prompt)?;
    trace.calls.push(TraceCall {
        stage,
        prompt,
        response: completion.text.clone(),
        latency: completion.latency,
        action: None,
        verdict: None,
    });
    Ok(completion.text)
}

/// Ask the partner-modelling backend to explain the partner's last move.
pub fn tom_infer(
    backend: &BackendRef,
    system: &str,
    partner_action: &str,
    observation: &str,
    trace: &mut DecisionTrace,
) -> Result<ToMNotes, AgentError> {
    let prompt = vec![
        ChatMessage::system(system),
        ChatMessage::user(format!(
            "My partner's selected action: {partner_action}\n\nMy latest state information:\n{observation}"
        )),
    ];
    let reply = call(backend, Stage::Tom, prompt, trace)?;
    Ok(parse_tom(&reply))
}

/// Ask the verifier whether `action` is safe in the current state.
pub fn verify(
    backend: &BackendRef,
    system: &str,
    action: &str,
    observation: &str,
    trace: &mut DecisionTrace,
) -> Result<Verdict, AgentError> {
    let prompt = vec![
        ChatMessage::system(system),
        ChatMessage::user(format!(
            "Selected action: {action}\n\nCurrent state:\n{observation}"
        )),
    ];
    let reply = call(backend, Stage::Verifier, prompt, trace)?;
    let verdict = parse_verdict(&reply);
    if let Some(last) = trace.calls.last_mut() {
        last.action = Some(action.to_string());
        last.verdict = Some(verdict);
    }
    Ok(verdict)
}

/// The action a cautious player takes when nothing better is known.
pub fn fallback_index(
    rule: FallbackRule,
    game: GameKind,
    legal: &[ActionId],
    state: StateRef<'_>,
) -> usize {
    if rule == FallbackRule::FirstLegal {
        return 0;
    }
    let find = |label: &str| legal.iter().position(|a| a.label == label);
    let picked = match (game, state) {
        (GameKind::Hanabi, StateRef::Hanabi(s)) => {
            let me = s.current_player;
            let oldest = s.knowledge[me]
                .iter()
                .position(|k| k.is_unclued())
                .unwrap_or(0);
            find(&s.move_label(HanabiMove::Discard(oldest)))
                .or_else(|| find(&s.move_label(HanabiMove::Discard(0))))
                .or_else(|| legal.iter().position(|a| a.label.starts_with("Reveal")))
        }
        (GameKind::Kitchen, _) => find("wait."),
        (GameKind::Capture | GameKind::Escape, _) => find("Stay in current Room"),
        _ => None,
    };
    picked.unwrap_or(0)
}

/// Memory, reasoning and grounding around one planner backend.
pub struct CacAgent {
    name: String,
    config: CacConfig,
    context: AgentContext,
}

impl CacAgent {
    pub fn new(name: impl Into<String>, config: CacConfig) -> Self {
        CacAgent {
            name: name.into(),
            config,
            context: AgentContext::default(),
        }
    }

    pub fn context(&self) -> &AgentContext {
        &self.context
    }

    pub fn config(&self) -> &CacConfig {
        &self.config
    }

    fn planner_prompt(&self, excluded: &[String], reask: bool) -> Vec<ChatMessage> {
        let mut working = self.context.working.clone();
        if !excluded.is_empty() {
            working.push_str(&format!(
                "\n\nDo not choose the following action(s): {}.",
                excluded.join(", ")
            ));
        }
        if reask {
            working.push_str(
                "\n\nYour previous reply did not name one of the available actions. \
                 Choose exactly one of the available actions and end with Action:<selected action>.",
            );
        }
        vec![
            ChatMessage::user(self.context.long_term.clone()),
            ChatMessage::assistant("Got it."),
            ChatMessage::user(working),
        ]
    }

    /// Planner call with re-asks on unparseable replies. `None` means give up.
    fn propose(
        &self,
        view: &DecisionView<'_>,
        labels: &[&str],
        excluded: &[String],
        trace: &mut DecisionTrace,
    ) -> Result<Option<usize>, AgentError> {
        let cfg = &self.config;
        for attempt in 0..=cfg.max_parse_retries {
            let prompt = self.planner_prompt(excluded, attempt > 0);
            let reply = call(&cfg.planner, Stage::Planner, prompt, trace)?;
            let parsed = parse_action(
                &reply,
                labels,
                view.game.lettered(),
                cfg.match_threshold,
                cfg.match_margin,
            );
            match parsed {
                Ok(i) if !excluded.iter().any(|e| e == labels[i]) => {
                    if let Some(last) = trace.calls.last_mut() {
                        last.action = Some(labels[i].to_string());
                    }
                    return Ok(Some(i));
                }
                _ => tracing::debug!(player = view.player, attempt, "planner reply not usable"),
            }
        }
        Ok(None)
    }
}

impl Agent for CacAgent {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn decide(&mut self, view: &DecisionView<'_>) -> Result<Decision, AgentError> {
        if view.legal.is_empty() {
            return Err(AgentError::NoLegalActions);
        }
        let labels: Vec<&str> = view.legal.iter().map(|a| a.label.as_str()).collect();
        let mut trace = DecisionTrace {
            player: view.player,
            ..DecisionTrace::default()
        };

        self.context.long_term = view.description.to_string();
        let mut working = String::new();
        if view.game != GameKind::Hanabi {
            working.push_str(&format!(
                "My Action History: [{}]\n\n",
                self.context.episodic.join(", ")
            ));
        }
        working.push_str(view.observation);

        if let (Some(tom), Some(partner_last)) = (self.config.tom.clone(), view.partner_last) {
            let system = tom_prompt(
                &self.config.templates,
                view.game,
                view.player_names,
                view.player,
            );
            let notes = tom_infer(
                &tom,
                &system,
                &partner_last.label,
                view.observation,
                &mut trace,
            )?;
            working.push_str("\n\nNotes on my partner's last action:\n");
            working.push_str(&notes.render());
            trace.tom = Some(notes);
        }
        self.context.working = working;

        let mut excluded: Vec<String> = Vec::new();
        let mut chosen = None;
        while let Some(i) = self.propose(view, &labels, &excluded, &mut trace)? {
            let Some(verifier) = self.config.verifier.clone() else {
                chosen = Some(i);
                break;
            };
            let system = self.config.templates.verifier.clone();
            match verify(&verifier, &system, labels[i], view.observation, &mut trace)? {
                Verdict::Okay => {
                    chosen = Some(i);
                    break;
                }
                Verdict::NotOkay => {
                    excluded.push(labels[i].to_string());
                    let exhausted = excluded.len() as u32 > self.config.max_verify_retries.max(1)
                        || excluded.len() >= labels.len();
                    if exhausted {
                        break;
                    }
                }
            }
        }

        let fallback = chosen.is_none();
        let index = chosen.unwrap_or_else(|| {
            fallback_index(self.config.fallback, view.game, view.legal, view.state)
        });
        if fallback {
            tracing::info!(
                player = view.player,
                action = labels[index],
                "fallback rule applied"
            );
        }
        trace.chosen = labels[index].to_string();
        trace.fallback = fallback;
        self.context.episodic.push(labels[index].to_string());
        Ok(Decision {
            index,
            latency: trace.latency(),
            fallback,
            trace: Some(trace),
        })
    }

    fn reset(&mut self) {
        self.context = AgentContext::default();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KITCHEN: [&str; 4] = [
        "place onion in c0.",
        "place onion in c1.",
        "wait.",
        "move away.",
    ];
    const HANABI: [&str; 4] = [
        "Reveal Bob's Red color cards",
        "Reveal Bob's Green color cards",
        "Play my Card 0",
        "Discard my Card 0",
    ];

    fn parse(r: &str, labels: &[&str], lettered: bool) -> Result<usize, ParseFailure> {
        parse_action(r, labels, lettered, 0.6, 0.1)
    }

    #[test]
    fn exact_modulo_punctuation() {
        assert_eq!(parse("Action: place onion in c0", &KITCHEN, false), Ok(0));
        assert_eq!(parse("I think so.\nAction: Wait", &KITCHEN, false), Ok(2));
    }

    #[test]
    fn last_marker_wins() {
        let r = "Action: wait.\nOn second thought...\nAction: move away.";
        assert_eq!(parse(r, &KITCHEN, false), Ok(3));
    }

    #[test]
    fn option_letter_with_echoed_label() {
        assert_eq!(
            parse("I choose B. Reveal Bob's Green color cards", &HANABI, true),
            Ok(1)
        );
        assert_eq!(parse("Action: C", &HANABI, true), Ok(2));
        assert_eq!(parse("Answer: (D)", &HANABI, true), Ok(3));
    }

    #[test]
    fn letters_ignored_for_unlettered_lists() {
        assert_eq!(parse("Action: B", &KITCHEN, false), Err(ParseFailure));
    }

    #[test]
    fn nonsense_fails() {
        assert_eq!(
            parse("Action: fly to the moon", &KITCHEN, false),
            Err(ParseFailure)
        );
        assert_eq!(parse("", &KITCHEN, false), Err(ParseFailure));
    }

    #[test]
    fn ambiguous_overlap_fails() {
        assert_eq!(
            parse("Action: place onion in c2", &KITCHEN, false),
            Err(ParseFailure)
        );
    }

    #[test]
    fn fuzzy_overlap_accepts_near_miss() {
        assert_eq!(
            parse(
                "Action: Reveal Bob's Green color cards please",
                &HANABI,
                true
            ),
            Ok(1)
        );
    }

    #[test]
    fn verdict_last_occurrence() {
        assert_eq!(parse_verdict("blah\nVerification: Okay"), Verdict::Okay);
        assert_eq!(parse_verdict("no marker here"), Verdict::NotOkay);
        assert_eq!(
            parse_verdict("Verification: Okay ... actually Verification: Not Okay"),
            Verdict::NotOkay
        );
        assert_eq!(
            parse_verdict("verification: NOT OKAY then VERIFICATION: okay"),
            Verdict::Okay
        );
    }

    #[test]
    fn tom_fields() {
        let n = parse_tom(
            "Partner Action Explanation: wants me to play\nClue Suggestion: reveal rank 1",
        );
        assert_eq!(n.explanation.as_deref(), Some("wants me to play"));
        assert_eq!(n.suggestion.as_deref(), Some("reveal rank 1"));
        let n = parse_tom("Partner Action Explanation: saving a five");
        assert_eq!(n.suggestion, None);
        let n = parse_tom("no structure");
        assert_eq!(n.render(), "no structure");
    }
}
