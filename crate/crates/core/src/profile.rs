//! Person-level scoring: the two ranked sociological questionnaires and the
//! quality-of-life instrument.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result, Violation};
use crate::instrument::{
    QolCategory, Situation, SocioInstrument, QOL_MAX_ANSWER, QOL_MIN_ANSWER, QOL_QUESTION_COUNT,
};
use crate::style::Trait;

/// Number of answer slots in every sociological group.
pub const SLOTS_PER_GROUP: usize = 4;
/// Total of a quartet scored with the built-in instrument.
pub const QUARTET_TOTAL: i64 = 60;
pub const TRAIT_MIN: i64 = 6;
pub const TRAIT_MAX: i64 = 24;

/// One value per trait, in canonical order Z, X, W, Y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Quartet {
    #[serde(rename = "Z")]
    pub collaborator: i64,
    #[serde(rename = "X")]
    pub controller: i64,
    #[serde(rename = "W")]
    pub analyzer: i64,
    #[serde(rename = "Y")]
    pub promoter: i64,
}

impl Quartet {
    /// Builds a quartet from values in canonical (Z, X, W, Y) order.
    pub const fn new(z: i64, x: i64, w: i64, y: i64) -> Self {
        Quartet {
            collaborator: z,
            controller: x,
            analyzer: w,
            promoter: y,
        }
    }

    pub fn get(&self, t: Trait) -> i64 {
        match t {
            Trait::Collaborator => self.collaborator,
            Trait::Controller => self.controller,
            Trait::Analyzer => self.analyzer,
            Trait::Promoter => self.promoter,
        }
    }

    pub fn get_mut(&mut self, t: Trait) -> &mut i64 {
        match t {
            Trait::Collaborator => &mut self.collaborator,
            Trait::Controller => &mut self.controller,
            Trait::Analyzer => &mut self.analyzer,
            Trait::Promoter => &mut self.promoter,
        }
    }

    pub fn to_array(&self) -> [i64; 4] {
        [self.collaborator, self.controller, self.analyzer, self.promoter]
    }

    pub fn sum(&self) -> i64 {
        self.to_array().iter().sum()
    }

    /// Checks the built-in instrument's invariants: total 60, each value in 6..=24.
    pub fn validate(&self) -> Result<()> {
        let a = self.to_array();
        if self.sum() != QUARTET_TOTAL || a.iter().any(|v| !(TRAIT_MIN..=TRAIT_MAX).contains(v)) {
            return Err(Error::InvalidQuartet(a));
        }
        Ok(())
    }
}

impl From<[i64; 4]> for Quartet {
    fn from(a: [i64; 4]) -> Self {
        Quartet::new(a[0], a[1], a[2], a[3])
    }
}

/// Ranked answers to both sociological questionnaires.
///
/// Only constructible through validation, so every group is a permutation of
/// 1..=4 and the group counts match the instrument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SocioResponses {
    questionnaire1: Vec<[u8; SLOTS_PER_GROUP]>,
    questionnaire2: Vec<[u8; SLOTS_PER_GROUP]>,
}

impl SocioResponses {
    pub fn new(
        questionnaire1: Vec<[u8; SLOTS_PER_GROUP]>,
        questionnaire2: Vec<[u8; SLOTS_PER_GROUP]>,
    ) -> Result<Self> {
        Self::new_for(&SocioInstrument::builtin(), questionnaire1, questionnaire2)
    }

    pub fn new_for(
        instrument: &SocioInstrument,
        questionnaire1: Vec<[u8; SLOTS_PER_GROUP]>,
        questionnaire2: Vec<[u8; SLOTS_PER_GROUP]>,
    ) -> Result<Self> {
        let raw = serde_json::json!({
            "questionnaire1": questionnaire1,
            "questionnaire2": questionnaire2,
        });
        validate_responses_for(instrument, &raw).map_err(Error::Validation)
    }

    pub fn questionnaire(&self, index: usize) -> &[[u8; SLOTS_PER_GROUP]] {
        match index {
            0 => &self.questionnaire1,
            _ => &self.questionnaire2,
        }
    }
}

impl<'de> Deserialize<'de> for SocioResponses {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Value::deserialize(d)?;
        validate_responses(&raw).map_err(|v| {
            serde::de::Error::custom(
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })
    }
}

/// Trait scores under normal and tense conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SocioProfile {
    pub normal: Quartet,
    pub tense: Quartet,
}

impl SocioProfile {
    pub fn new(normal: Quartet, tense: Quartet) -> Self {
        SocioProfile { normal, tense }
    }

    pub fn quartet(&self, situation: Situation) -> &Quartet {
        match situation {
            Situation::Normal => &self.normal,
            Situation::Tense => &self.tense,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.normal.validate()?;
        self.tense.validate()
    }
}

/// Answers to the quality-of-life questionnaire, indexed by question number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct QolResponses {
    answers: [u8; QOL_QUESTION_COUNT],
}

impl QolResponses {
    pub fn new(answers: [u8; QOL_QUESTION_COUNT]) -> Result<Self> {
        validate_qol(&serde_json::json!(answers.to_vec())).map_err(Error::Validation)
    }

    /// Answer to 1-based question `number`.
    pub fn answer(&self, number: usize) -> u8 {
        self.answers[number - 1]
    }

    pub fn answers(&self) -> &[u8; QOL_QUESTION_COUNT] {
        &self.answers
    }
}

impl<'de> Deserialize<'de> for QolResponses {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Value::deserialize(d)?;
        validate_qol(&raw).map_err(|v| {
            serde::de::Error::custom(
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QolScore {
    pub fatigue: i64,
    pub emotional: i64,
}

impl QolScore {
    pub const FATIGUE_RANGE: (i64, i64) = (4, 28);
    pub const EMOTIONAL_RANGE: (i64, i64) = (7, 49);

    pub fn total(&self) -> i64 {
        self.fatigue + self.emotional
    }
}

/// Sums each trait's ranks over both questionnaires with the built-in
/// instrument: normal groups feed (Z, X, W, Y), tense groups (z, x, w, y).
pub fn score_sociological(responses: &SocioResponses) -> SocioProfile {
    score_sociological_with(&SocioInstrument::builtin(), responses)
}

pub fn score_sociological_with(
    instrument: &SocioInstrument,
    responses: &SocioResponses,
) -> SocioProfile {
    let mut normal = Quartet::default();
    let mut tense = Quartet::default();
    for (qi, groups) in instrument.questionnaires.iter().enumerate().take(2) {
        for (spec, ranks) in groups.iter().zip(responses.questionnaire(qi)) {
            let target = match spec.situation {
                Situation::Normal => &mut normal,
                Situation::Tense => &mut tense,
            };
            for (t, &rank) in spec.traits.iter().zip(ranks) {
                *target.get_mut(*t) += i64::from(rank);
            }
        }
    }
    SocioProfile { normal, tense }
}

pub fn score_quality_of_life(responses: &QolResponses) -> QolScore {
    let mut score = QolScore {
        fatigue: 0,
        emotional: 0,
    };
    for q in crate::instrument::qol_questions() {
        let v = i64::from(responses.answer(q.number));
        match q.category {
            QolCategory::Fatigue => score.fatigue += v,
            QolCategory::Emotional => score.emotional += v,
        }
    }
    score
}

/// Validates a raw `{"questionnaire1": [[..]; 6], "questionnaire2": ..}`
/// document against the built-in instrument, collecting every violation.
pub fn validate_responses(raw: &Value) -> std::result::Result<SocioResponses, Vec<Violation>> {
    validate_responses_for(&SocioInstrument::builtin(), raw)
}

pub fn validate_responses_for(
    instrument: &SocioInstrument,
    raw: &Value,
) -> std::result::Result<SocioResponses, Vec<Violation>> {
    let mut violations = Vec::new();
    let mut parsed: [Vec<[u8; SLOTS_PER_GROUP]>; 2] = [Vec::new(), Vec::new()];

    let Some(obj) = raw.as_object() else {
        return Err(vec![Violation::Malformed {
            path: "$".into(),
            reason: "expected an object with questionnaire1 and questionnaire2".into(),
        }]);
    };

    for (qi, target) in parsed.iter_mut().enumerate() {
        let key = format!("questionnaire{}", qi + 1);
        let expected = instrument.questionnaires.get(qi).map_or(0, Vec::len);
        let groups = match obj.get(&key) {
            None => {
                violations.push(Violation::MissingGroup {
                    questionnaire: qi + 1,
                    expected,
                    found: 0,
                });
                continue;
            }
            Some(Value::Array(groups)) => groups,
            Some(_) => {
                violations.push(Violation::Malformed {
                    path: key,
                    reason: "expected an array of groups".into(),
                });
                continue;
            }
        };
        if groups.len() != expected {
            violations.push(Violation::MissingGroup {
                questionnaire: qi + 1,
                expected,
                found: groups.len(),
            });
        }
        for (gi, group) in groups.iter().enumerate() {
            if let Some(ranks) = check_group(&key, qi + 1, gi + 1, group, &mut violations) {
                target.push(ranks);
            }
        }
    }

    if violations.is_empty() {
        let [questionnaire1, questionnaire2] = parsed;
        Ok(SocioResponses {
            questionnaire1,
            questionnaire2,
        })
    } else {
        Err(violations)
    }
}

fn check_group(
    key: &str,
    questionnaire: usize,
    group: usize,
    raw: &Value,
    violations: &mut Vec<Violation>,
) -> Option<[u8; SLOTS_PER_GROUP]> {
    let Some(slots) = raw.as_array() else {
        violations.push(Violation::Malformed {
            path: format!("{key}[{}]", group - 1),
            reason: "expected an array of four ranks".into(),
        });
        return None;
    };
    let before = violations.len();
    if slots.len() != SLOTS_PER_GROUP {
        violations.push(Violation::WrongSlotCount {
            questionnaire,
            group,
            expected: SLOTS_PER_GROUP,
            found: slots.len(),
        });
    }
    let mut ranks = Vec::with_capacity(slots.len());
    for (si, v) in slots.iter().enumerate() {
        match v.as_i64() {
            Some(r) if (1..=4).contains(&r) => ranks.push(r),
            Some(r) => violations.push(Violation::InvalidRank {
                questionnaire,
                group,
                slot: si + 1,
                value: r,
            }),
            None => violations.push(Violation::Malformed {
                path: format!("{key}[{}][{si}]", group - 1),
                reason: "expected an integer rank".into(),
            }),
        }
    }
    let mut seen = [0usize; 5];
    for &r in &ranks {
        seen[r as usize] += 1;
    }
    for (value, &count) in seen.iter().enumerate() {
        if count > 1 {
            violations.push(Violation::DuplicateRank {
                questionnaire,
                group,
                value: value as i64,
            });
        }
    }
    if violations.len() != before {
        return None;
    }
    let mut out = [0u8; SLOTS_PER_GROUP];
    for (o, r) in out.iter_mut().zip(&ranks) {
        *o = *r as u8;
    }
    Some(out)
}

/// Validates a raw array of eleven answers in question order.
pub fn validate_qol(raw: &Value) -> std::result::Result<QolResponses, Vec<Violation>> {
    let Some(items) = raw.as_array() else {
        return Err(vec![Violation::Malformed {
            path: "qol".into(),
            reason: "expected an array of eleven answers".into(),
        }]);
    };
    let mut violations = Vec::new();
    if items.len() != QOL_QUESTION_COUNT {
        violations.push(Violation::MissingAnswer {
            expected: QOL_QUESTION_COUNT,
            found: items.len(),
        });
    }
    let mut answers = [0u8; QOL_QUESTION_COUNT];
    for (i, v) in items.iter().enumerate() {
        match v.as_i64() {
            Some(a) if (i64::from(QOL_MIN_ANSWER)..=i64::from(QOL_MAX_ANSWER)).contains(&a) => {
                if let Some(slot) = answers.get_mut(i) {
                    *slot = a as u8;
                }
            }
            Some(a) => violations.push(Violation::OutOfRangeAnswer {
                question: i + 1,
                value: a,
            }),
            None => violations.push(Violation::Malformed {
                path: format!("qol[{i}]"),
                reason: "expected an integer answer".into(),
            }),
        }
    }
    if violations.is_empty() {
        Ok(QolResponses { answers })
    } else {
        Err(violations)
    }
}

/// A candidate's filled-in forms: both sociological questionnaires plus an
/// optional quality-of-life sheet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResponseDocument {
    #[serde(flatten)]
    pub socio: SocioResponses,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qol: Option<QolResponses>,
}

impl ResponseDocument {
    /// Parses and validates a JSON response document. Never panics; any
    /// problem, including a syntax error, comes back as a violation.
    pub fn from_json_str(text: &str) -> std::result::Result<Self, Vec<Violation>> {
        let raw: Value = serde_json::from_str(text).map_err(|e| {
            vec![Violation::Malformed {
                path: format!("line {} column {}", e.line(), e.column()),
                reason: e.to_string(),
            }]
        })?;
        Self::from_value(&raw)
    }

    pub fn from_value(raw: &Value) -> std::result::Result<Self, Vec<Violation>> {
        let mut violations = Vec::new();
        let socio = validate_responses(raw).map_err(|v| violations.extend(v)).ok();
        let qol = match raw.get("qol") {
            None | Some(Value::Null) => None,
            Some(q) => validate_qol(q).map_err(|v| violations.extend(v)).ok(),
        };
        match socio {
            Some(socio) if violations.is_empty() => Ok(ResponseDocument { socio, qol }),
            _ => Err(violations),
        }
    }
}

impl<'de> Deserialize<'de> for ResponseDocument {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Value::deserialize(d)?;
        ResponseDocument::from_value(&raw).map_err(|v| {
            serde::de::Error::custom(
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn test_worked_example_scores() {
        let p = score_sociological(&fixtures::worked_example());
        assert_eq!(p.normal, Quartet::new(11, 23, 14, 12));
        assert_eq!(p.tense, Quartet::new(11, 23, 14, 12));
    }

    #[test]
    fn test_forced_maximum_pattern() {
        let g = vec![[4, 3, 2, 1]; 6];
        let r = SocioResponses::new(g.clone(), g).unwrap();
        let p = score_sociological(&r);
        assert_eq!(p.normal, Quartet::new(24, 18, 12, 6));
        assert_eq!(p.tense, Quartet::new(24, 18, 12, 6));
    }

    #[test]
    fn test_qol_bounds() {
        for (v, f, e) in [(1u8, 4, 7), (7, 28, 49), (4, 16, 28)] {
            let s = score_quality_of_life(&QolResponses::new([v; 11]).unwrap());
            assert_eq!((s.fatigue, s.emotional), (f, e));
        }
    }

    #[test]
    fn test_qol_uses_right_questions() {
        let mut a = [1u8; 11];
        for q in [2, 4, 7, 9] {
            a[q - 1] = 7;
        }
        let s = score_quality_of_life(&QolResponses::new(a).unwrap());
        assert_eq!(s, QolScore { fatigue: 28, emotional: 7 });
    }

    #[test]
    fn test_validate_accepts_permutation() {
        let g = json!(vec![[1, 2, 3, 4]; 6]);
        let raw = json!({"questionnaire1": g, "questionnaire2": g});
        assert!(validate_responses(&raw).is_ok());
    }

    #[test]
    fn test_validate_duplicate_rank() {
        let mut groups = vec![json!([1, 2, 3, 4]); 6];
        groups[2] = json!([1, 2, 2, 4]);
        let raw = json!({"questionnaire1": groups, "questionnaire2": vec![json!([1,2,3,4]); 6]});
        let v = validate_responses(&raw).unwrap_err();
        assert_eq!(
            v,
            vec![Violation::DuplicateRank {
                questionnaire: 1,
                group: 3,
                value: 2
            }]
        );
    }

    #[test]
    fn test_validate_eleven_groups() {
        let raw = json!({
            "questionnaire1": vec![json!([1,2,3,4]); 6],
            "questionnaire2": vec![json!([1,2,3,4]); 5],
        });
        let v = validate_responses(&raw).unwrap_err();
        assert_eq!(
            v,
            vec![Violation::MissingGroup {
                questionnaire: 2,
                expected: 6,
                found: 5
            }]
        );
    }

    #[test]
    fn test_validate_collects_everything() {
        let raw = json!({
            "questionnaire1": [[0, 2, 3, 4], [1, 1, 1, 1], "x", [1, 2, 3], [1, 2, 3, 4], [1, 2, 3, 9]],
        });
        let v = validate_responses(&raw).unwrap_err();
        assert!(v.contains(&Violation::InvalidRank {
            questionnaire: 1,
            group: 1,
            slot: 1,
            value: 0
        }));
        assert!(v.contains(&Violation::DuplicateRank {
            questionnaire: 1,
            group: 2,
            value: 1
        }));
        assert!(v.iter().any(|x| matches!(x, Violation::Malformed { .. })));
        assert!(v.contains(&Violation::WrongSlotCount {
            questionnaire: 1,
            group: 4,
            expected: 4,
            found: 3
        }));
        assert!(v.contains(&Violation::InvalidRank {
            questionnaire: 1,
            group: 6,
            slot: 4,
            value: 9
        }));
        assert!(v.contains(&Violation::MissingGroup {
            questionnaire: 2,
            expected: 6,
            found: 0
        }));
    }

    #[test]
    fn test_qol_violations() {
        let v = validate_qol(&json!([1, 2, 8, 4, 5, 6, 7, 1, 2, 3])).unwrap_err();
        assert!(v.contains(&Violation::MissingAnswer {
            expected: 11,
            found: 10
        }));
        assert!(v.contains(&Violation::OutOfRangeAnswer {
            question: 3,
            value: 8
        }));
    }

    #[test]
    fn test_document_garbage_never_panics() {
        for text in ["", "{", "[]", "null", "{\"questionnaire1\": 5}", "{\"qol\": {}}"] {
            assert!(ResponseDocument::from_json_str(text).is_err());
        }
    }

    #[test]
    fn test_document_serde_round_trip() {
        let doc = ResponseDocument {
            socio: fixtures::worked_example(),
            qol: Some(QolResponses::new([3; 11]).unwrap()),
        };
        let s = serde_json::to_string(&doc).unwrap();
        let back: ResponseDocument = serde_json::from_str(&s).unwrap();
        assert_eq!(back, doc);
    }

    fn group_strategy() -> impl Strategy<Value = [u8; 4]> {
        Just([1u8, 2, 3, 4]).prop_shuffle().prop_map(|v| [v[0], v[1], v[2], v[3]])
    }

    proptest! {
        #[test]
        fn prop_swap_moves_two_variables(
            q1 in proptest::collection::vec(group_strategy(), 6),
            q2 in proptest::collection::vec(group_strategy(), 6),
            qi in 0usize..2, gi in 0usize..6, a in 0usize..4, b in 0usize..4,
        ) {
            prop_assume!(a != b);
            let base = score_sociological(&SocioResponses::new(q1.clone(), q2.clone()).unwrap());
            let (mut s1, mut s2) = (q1, q2);
            let g = if qi == 0 { &mut s1[gi] } else { &mut s2[gi] };
            g.swap(a, b);
            let swapped = score_sociological(&SocioResponses::new(s1, s2).unwrap());
            let situation = if gi < 3 { Situation::Normal } else { Situation::Tense };
            let before = base.quartet(situation).to_array();
            let after = swapped.quartet(situation).to_array();
            let deltas: Vec<i64> = before.iter().zip(&after).map(|(x, y)| y - x).collect();
            prop_assert_eq!(deltas.iter().sum::<i64>(), 0);
            for (i, d) in deltas.iter().enumerate() {
                if i != a && i != b {
                    prop_assert_eq!(*d, 0);
                }
            }
            prop_assert_eq!(deltas[a], -deltas[b]);
        }
    }
}
