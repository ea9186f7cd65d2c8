//! Behavioral style classification of a trait quartet.
//!
//! The style kind is decided by the gap between the largest and the
//! second-largest trait. Ties are broken by canonical order (Z, X, W, Y) and
//! flagged, so the same quartet always yields the same classification.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::profile::{
    score_quality_of_life, score_sociological, QolScore, Quartet, ResponseDocument, SocioProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Trait {
    /// Z
    Collaborator,
    /// X
    Controller,
    /// W
    Analyzer,
    /// Y
    Promoter,
}

impl Trait {
    /// Canonical order, also used to break ties.
    pub const ALL: [Trait; 4] = [
        Trait::Collaborator,
        Trait::Controller,
        Trait::Analyzer,
        Trait::Promoter,
    ];

    pub fn letter(self) -> char {
        match self {
            Trait::Collaborator => 'Z',
            Trait::Controller => 'X',
            Trait::Analyzer => 'W',
            Trait::Promoter => 'Y',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Trait::Collaborator => "Collaborator",
            Trait::Controller => "Controller",
            Trait::Analyzer => "Analyzer",
            Trait::Promoter => "Promoter",
        }
    }

    pub fn from_letter(c: char) -> Option<Trait> {
        match c.to_ascii_uppercase() {
            'Z' => Some(Trait::Collaborator),
            'X' => Some(Trait::Controller),
            'W' => Some(Trait::Analyzer),
            'Y' => Some(Trait::Promoter),
            _ => None,
        }
    }

    pub fn from_name(s: &str) -> Option<Trait> {
        Trait::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
    }

    /// Behavior descriptors for this trait.
    pub fn descriptors(self) -> &'static [&'static str] {
        match self {
            Trait::Collaborator => &[
                "Idealistic, Ambitious, and Receptive",
                "Loyal, Confident",
                "Modest and Attentive",
                "Considered and Collaborative",
                "Courteous and Responsive",
            ],
            Trait::Promoter => &[
                "Enthusiastic and Energetic",
                "Persuasive and Motivational",
                "Creative and Positive",
                "Optimistic and Adaptable",
                "Prudent and Sensitive",
            ],
            Trait::Analyzer => &[
                "Logical, Practical, Methodical",
                "Persistent",
                "Efficient and Careful",
                "Judicious and Reserved",
                "Cautious and Quiet",
            ],
            Trait::Controller => &[
                "Strong and Confident",
                "Persistent, Active and Anxious",
                "Quick to Act",
                "Decisive and Executive",
                "Persuasive and Imaginative",
                "Entrepreneur",
            ],
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Trait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiffCategory {
    Remarkable,
    Discrete,
    Short,
}

impl DiffCategory {
    pub fn of(diff: i64) -> DiffCategory {
        match diff {
            d if d >= 10 => DiffCategory::Remarkable,
            d if d >= 6 => DiffCategory::Discrete,
            _ => DiffCategory::Short,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffAssessment {
    pub pair: (Trait, Trait),
    pub diff: i64,
    pub category: DiffCategory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StyleKind {
    Dominant,
    MajorMinor,
    Mixed,
}

impl StyleKind {
    pub fn label(self) -> &'static str {
        match self {
            StyleKind::Dominant => "Dominant",
            StyleKind::MajorMinor => "Major-Minor",
            StyleKind::Mixed => "Mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MixedSubstyle {
    Administrative,
    Technical,
    Executive,
    Energetic,
    Diplomatic,
    Developed,
}

impl MixedSubstyle {
    pub const ALL: [MixedSubstyle; 6] = [
        MixedSubstyle::Administrative,
        MixedSubstyle::Technical,
        MixedSubstyle::Executive,
        MixedSubstyle::Energetic,
        MixedSubstyle::Diplomatic,
        MixedSubstyle::Developed,
    ];

    /// Substyle for an unordered pair of top traits; `None` for a == b.
    ///
    /// {Y, Z} maps to Developed: it is the only pair left once the other five
    /// substyles claim theirs.
    pub fn for_pair(a: Trait, b: Trait) -> Option<MixedSubstyle> {
        use Trait::*;
        let pair = if a <= b { (a, b) } else { (b, a) };
        Some(match pair {
            (Collaborator, Controller) => MixedSubstyle::Administrative,
            (Collaborator, Analyzer) => MixedSubstyle::Technical,
            (Controller, Analyzer) => MixedSubstyle::Executive,
            (Controller, Promoter) => MixedSubstyle::Energetic,
            (Analyzer, Promoter) => MixedSubstyle::Diplomatic,
            (Collaborator, Promoter) => MixedSubstyle::Developed,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            MixedSubstyle::Administrative => "Administrative",
            MixedSubstyle::Technical => "Technical",
            MixedSubstyle::Executive => "Executive",
            MixedSubstyle::Energetic => "Energetic",
            MixedSubstyle::Diplomatic => "Diplomatic",
            MixedSubstyle::Developed => "Developed",
        }
    }

    pub fn from_name(s: &str) -> Option<MixedSubstyle> {
        MixedSubstyle::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StyleClass {
    pub kind: StyleKind,
    pub dominant_trait: Trait,
    pub secondary_trait: Trait,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed_substyle: Option<MixedSubstyle>,
    /// Set when a tie decided the dominant or secondary trait.
    pub tied: bool,
}

impl StyleClass {
    /// Short human label, e.g. `Controller / Major-Minor` or
    /// `Collaborator / Mixed (Administrative)`.
    pub fn summary(&self) -> String {
        match self.mixed_substyle {
            Some(m) => format!("{} / {} ({})", self.dominant_trait, self.kind.label(), m.name()),
            None => format!("{} / {}", self.dominant_trait, self.kind.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Activity {
    Active,
    Passive,
    Tied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    TaskOriented,
    PeopleOriented,
    Tied,
}

/// Pairwise sums that place a person on the activity and orientation axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientationScores {
    /// Y + X
    pub active_score: i64,
    /// Z + W
    pub passive_score: i64,
    /// Z + Y
    pub people_score: i64,
    /// W + X
    pub task_score: i64,
    pub activity: Activity,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SituationAssessment {
    pub quartet: Quartet,
    pub style: StyleClass,
    pub orientation: OrientationScores,
    pub descriptors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonAssessment {
    pub normal: SituationAssessment,
    pub tense: SituationAssessment,
    /// True when the dominant trait is the same under normal and tense conditions.
    pub stable_under_stress: bool,
}

pub fn pairwise_diff(quartet: &Quartet, a: Trait, b: Trait) -> Result<DiffAssessment> {
    if a == b {
        return Err(Error::SameTrait);
    }
    let diff = (quartet.get(a) - quartet.get(b)).abs();
    Ok(DiffAssessment {
        pair: (a, b),
        diff,
        category: DiffCategory::of(diff),
    })
}

/// Traits sorted by value descending, ties in canonical order.
fn ranked(quartet: &Quartet) -> [Trait; 4] {
    let mut traits = Trait::ALL;
    traits.sort_by(|a, b| quartet.get(*b).cmp(&quartet.get(*a)).then(a.index().cmp(&b.index())));
    traits
}

pub fn classify_style(quartet: &Quartet) -> Result<StyleClass> {
    quartet.validate()?;
    let order = ranked(quartet);
    let (first, second) = (order[0], order[1]);
    let tied = quartet.get(first) == quartet.get(second) || quartet.get(second) == quartet.get(order[2]);
    let kind = match pairwise_diff(quartet, first, second)?.category {
        DiffCategory::Remarkable => StyleKind::Dominant,
        DiffCategory::Discrete => StyleKind::MajorMinor,
        DiffCategory::Short => StyleKind::Mixed,
    };
    let mixed_substyle = match kind {
        StyleKind::Mixed => MixedSubstyle::for_pair(first, second),
        _ => None,
    };
    Ok(StyleClass {
        kind,
        dominant_trait: first,
        secondary_trait: second,
        mixed_substyle,
        tied,
    })
}

pub fn derive_orientation(quartet: &Quartet) -> Result<OrientationScores> {
    quartet.validate()?;
    let active_score = quartet.promoter + quartet.controller;
    let passive_score = quartet.collaborator + quartet.analyzer;
    let people_score = quartet.collaborator + quartet.promoter;
    let task_score = quartet.analyzer + quartet.controller;
    let activity = match active_score.cmp(&passive_score) {
        std::cmp::Ordering::Greater => Activity::Active,
        std::cmp::Ordering::Less => Activity::Passive,
        std::cmp::Ordering::Equal => Activity::Tied,
    };
    let orientation = match task_score.cmp(&people_score) {
        std::cmp::Ordering::Greater => Orientation::TaskOriented,
        std::cmp::Ordering::Less => Orientation::PeopleOriented,
        std::cmp::Ordering::Equal => Orientation::Tied,
    };
    Ok(OrientationScores {
        active_score,
        passive_score,
        people_score,
        task_score,
        activity,
        orientation,
    })
}

/// Descriptors of the dominant trait (canonical-order winner on ties).
pub fn describe_traits(quartet: &Quartet) -> Vec<&'static str> {
    ranked(quartet)[0].descriptors().to_vec()
}

fn assess_situation(quartet: &Quartet) -> Result<SituationAssessment> {
    Ok(SituationAssessment {
        quartet: *quartet,
        style: classify_style(quartet)?,
        orientation: derive_orientation(quartet)?,
        descriptors: describe_traits(quartet).iter().map(|s| s.to_string()).collect(),
    })
}

pub fn assess_person(profile: &SocioProfile) -> Result<PersonAssessment> {
    let normal = assess_situation(&profile.normal)?;
    let tense = assess_situation(&profile.tense)?;
    let stable_under_stress = normal.style.dominant_trait == tense.style.dominant_trait;
    Ok(PersonAssessment {
        normal,
        tense,
        stable_under_stress,
    })
}

/// Everything the scoring step yields for one person's forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreCard {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
    pub profile: SocioProfile,
    pub assessment: PersonAssessment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qol: Option<QolScore>,
}

pub fn score_document(doc: &ResponseDocument, candidate: Option<&str>) -> Result<ScoreCard> {
    let profile = score_sociological(&doc.socio);
    Ok(ScoreCard {
        candidate: candidate.map(str::to_string),
        assessment: assess_person(&profile)?,
        profile,
        qol: doc.qol.as_ref().map(score_quality_of_life),
    })
}
