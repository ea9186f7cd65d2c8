//! Instrument definitions: which answer slot feeds which trait variable, and
//! the display text shown next to each item.
//!
//! Items are addressed by `(questionnaire, group, slot)`; the text is only
//! carried along for rendering forms.

use serde::{Deserialize, Serialize};

use crate::style::Trait;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Situation {
    Normal,
    Tense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub situation: Situation,
    pub prompt: String,
    /// Letter printed next to each answer slot, e.g. `A`..`D` or `a`..`d`.
    pub letters: Vec<char>,
    /// Trait variable each answer slot contributes to.
    pub traits: Vec<Trait>,
    pub answers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocioInstrument {
    pub name: String,
    pub questionnaires: Vec<Vec<GroupSpec>>,
}

impl SocioInstrument {
    pub fn group_count(&self) -> usize {
        self.questionnaires.iter().map(Vec::len).sum()
    }

    /// Two questionnaires of six ranked groups each. Groups 1-3 describe the
    /// normal situation (letters A-L), groups 4-6 the tense one (a-l). In
    /// every group the four slots feed Z, X, W, Y in that order.
    pub fn builtin() -> Self {
        let q1 = vec![
            group(
                Situation::Normal,
                "I like to act...",
                "ABCD",
                [
                    "Friendly and support other people.",
                    "Quickly and decisively with others.",
                    "Compact and firm with others.",
                    "As appropriate every time.",
                ],
            ),
            group(
                Situation::Normal,
                "I frequently try to be...",
                "EFGH",
                [
                    "Modest and idealist.",
                    "Persuasive and winner.",
                    "Patient and realistic.",
                    "Nice and real.",
                ],
            ),
            group(
                Situation::Normal,
                "People see me as...",
                "IJKL",
                [
                    "A trustful and advisable person.",
                    "A self-confident person who takes the initiative and acts.",
                    "A careful, conscious and a systematic person.",
                    "An enthusiastic person who understands easily and adapts to any situation.",
                ],
            ),
            group(
                Situation::Tense,
                "If I am in disagreement...",
                "abcd",
                [
                    "I appeal to the sense of justice and legality of other people.",
                    "I try to be smarter and maneuverable.",
                    "I stay quiet.",
                    "Try again and/or open a new point of view.",
                ],
            ),
            group(
                Situation::Tense,
                "When I fail...",
                "efgh",
                [
                    "I feel panic and look for others to support me.",
                    "I keep on pushing because of my ideas.",
                    "I remain quiet and inflexible.",
                    "I keep my mind open and I continue joyfully.",
                ],
            ),
            group(
                Situation::Tense,
                "People who look at me in my worst moments, say I am...",
                "ijkl",
                [
                    "Humble and emotional.",
                    "Aggressive and commanding.",
                    "Stubborn/bull-headed and absent minded.",
                    "Superficial/shallow and disloyal.",
                ],
            ),
        ];
        let q2 = vec![
            group(
                Situation::Normal,
                "Usually I want to...",
                "ABCD",
                [
                    "Move forward with pride to great ideals.",
                    "Take control of the situation and reach the goals.",
                    "Be systematic, logical and a sound thinker.",
                    "Win the people being insistent and convincing.",
                ],
            ),
            group(
                Situation::Normal,
                "I usually treat others...",
                "EFGH",
                [
                    "By being polite.",
                    "In an active way and focusing on tasks.",
                    "In a methodical manner.",
                    "In a friendly way.",
                ],
            ),
            group(
                Situation::Normal,
                "I want to see myself as...",
                "IJKL",
                [
                    "A loyal and trustworthy person.",
                    "A competent and active person.",
                    "A careful and logical person.",
                    "A flexible and comprehensive person.",
                ],
            ),
            group(
                Situation::Tense,
                "In times of stress, I...",
                "abcd",
                [
                    "Assume more responsibilities and remain robust.",
                    "I get impatient and act quickly.",
                    "I prove what I say with real data and information.",
                    "I try not to interfere with others.",
                ],
            ),
            group(
                Situation::Tense,
                "In moments of stress I relate to others...",
                "efgh",
                [
                    "Being gullible and easily influenced.",
                    "Being dominant and impulsive.",
                    "Being shy and distrustful.",
                    "Being very flexible.",
                ],
            ),
            group(
                Situation::Tense,
                "People see me sometimes as...",
                "ijkl",
                [
                    "Having little confidence in myself.",
                    "Being a tough negotiator.",
                    "Being stubborn and determined.",
                    "Being inconsistent to attract attention.",
                ],
            ),
        ];
        SocioInstrument {
            name: "sociological".to_string(),
            questionnaires: vec![q1, q2],
        }
    }
}

fn group(situation: Situation, prompt: &str, letters: &str, answers: [&str; 4]) -> GroupSpec {
    GroupSpec {
        situation,
        prompt: prompt.to_string(),
        letters: letters.chars().collect(),
        traits: Trait::ALL.to_vec(),
        answers: answers.iter().map(|s| s.to_string()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QolCategory {
    Fatigue,
    Emotional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QolQuestion {
    /// 1-based question number.
    pub number: usize,
    pub category: QolCategory,
    pub text: String,
}

pub const QOL_QUESTION_COUNT: usize = 11;
pub const QOL_MIN_ANSWER: u8 = 1;
pub const QOL_MAX_ANSWER: u8 = 7;

/// The 11-item quality-of-life questionnaire, rated 1 (worst) to 7 (best).
pub fn qol_questions() -> Vec<QolQuestion> {
    use QolCategory::*;
    let items = [
        (Emotional, "Overall, during the last two weeks, how much of the time have you felt frustrated or impatient?"),
        (Fatigue, "How tired have you felt over the last two weeks?"),
        (Emotional, "How often during the last two weeks have you felt inadequate, worthless or as if you were a burden on others?"),
        (Fatigue, "How much energetic have you felt in the last two weeks?"),
        (Emotional, "Overall, how much of the time did you feel upset, worried or depressed during the last two weeks?"),
        (Emotional, "How much of the time during the last two weeks did you feel relaxed and free of tension?"),
        (Fatigue, "How often during the last two weeks have you felt low in energy?"),
        (Emotional, "In general, how often during the last two weeks have you felt discouraged or depressed?"),
        (Fatigue, "How often during the last two weeks have you felt worn out or sluggish?"),
        (Emotional, "How happy, satisfied or pleased have you been with your personal life during the last two weeks?"),
        (Emotional, "Overall, how often during the last two weeks have you felt restless or tense?"),
    ];
    items
        .iter()
        .enumerate()
        .map(|(i, (category, text))| QolQuestion {
            number: i + 1,
            category: *category,
            text: text.to_string(),
        })
        .collect()
}
