//! Structural error classes and the irregular-verb regularization tag.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::edit::{edit_script, EditOp, EditScript};
use crate::text::fold;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorClass {
    /// Characters missing, nothing else wrong.
    DropOnly,
    /// Extra characters only, each a copy of a neighbouring target character.
    RepeatInsertion,
    /// Extra characters only, at least one not found next to its gap.
    AddInsertion,
    SubstitutionOnly,
    Mixed,
}

impl ErrorClass {
    pub const ALL: [ErrorClass; 5] = [
        ErrorClass::DropOnly,
        ErrorClass::RepeatInsertion,
        ErrorClass::AddInsertion,
        ErrorClass::SubstitutionOnly,
        ErrorClass::Mixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::DropOnly => "drop-only",
            ErrorClass::RepeatInsertion => "repeat-insertion",
            ErrorClass::AddInsertion => "add-insertion",
            ErrorClass::SubstitutionOnly => "substitution-only",
            ErrorClass::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexicalTag {
    RegularizedIrregular,
}

/// Class of a minimal script between case-folded target and reading.
/// `None` for an empty script cost (the strings match).
pub fn class_of_script(target: &[char], script: &EditScript) -> Option<ErrorClass> {
    let c = script.counts();
    let kinds = [c.deletions > 0, c.insertions > 0, c.substitutions > 0]
        .iter()
        .filter(|&&k| k)
        .count();
    if kinds == 0 {
        return None;
    }
    if kinds > 1 {
        return Some(ErrorClass::Mixed);
    }
    if c.deletions > 0 {
        return Some(ErrorClass::DropOnly);
    }
    if c.substitutions > 0 {
        return Some(ErrorClass::SubstitutionOnly);
    }
    let repeats = script.steps.iter().all(|s| match s.op {
        EditOp::Insert { ch } => {
            let before = s.target_pos.checked_sub(1).and_then(|p| target.get(p));
            let after = target.get(s.target_pos);
            before == Some(&ch) || after == Some(&ch)
        }
        _ => true,
    });
    Some(if repeats { ErrorClass::RepeatInsertion } else { ErrorClass::AddInsertion })
}

/// An irregular verb: its root and its past-tense form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IrregularVerb {
    pub root: String,
    pub past: String,
}

/// Editable list of irregular past-tense verbs checked for `-d`/`-ed`
/// regularization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrregularVerbs {
    pub entries: Vec<IrregularVerb>,
}

/// Shipped default list (23 entries).
pub const DEFAULT_IRREGULAR_VERBS: [(&str, &str); 23] = [
    ("begin", "began"),
    ("choose", "chose"),
    ("dig", "dug"),
    ("fight", "fought"),
    ("throw", "threw"),
    ("know", "knew"),
    ("bring", "brought"),
    ("buy", "bought"),
    ("catch", "caught"),
    ("teach", "taught"),
    ("think", "thought"),
    ("drink", "drank"),
    ("drive", "drove"),
    ("eat", "ate"),
    ("fall", "fell"),
    ("fly", "flew"),
    ("give", "gave"),
    ("grow", "grew"),
    ("ride", "rode"),
    ("run", "ran"),
    ("sing", "sang"),
    ("speak", "spoke"),
    ("write", "wrote"),
];

impl Default for IrregularVerbs {
    fn default() -> Self {
        IrregularVerbs {
            entries: DEFAULT_IRREGULAR_VERBS
                .iter()
                .map(|&(root, past)| IrregularVerb {
                    root: root.to_string(),
                    past: past.to_string(),
                })
                .collect(),
        }
    }
}

impl IrregularVerbs {
    /// Parses `root<TAB>past` lines; `#` comments and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(root), Some(past), None) if !root.is_empty() && !past.is_empty() => entries.push(IrregularVerb {
                    root: root.trim().to_string(),
                    past: past.trim().to_string(),
                }),
                _ => return Err(Error::Malformed(format!("irregular verb list line {}: expected root<TAB>past", n + 1))),
            }
        }
        Ok(IrregularVerbs { entries })
    }

    /// Folded past forms; a target in this set is an irregular-verb prompt.
    pub fn past_forms(&self) -> BTreeSet<String> {
        self.entries.iter().map(|e| fold(&e.past)).collect()
    }

    /// True when `reading` is root + `d`/`ed` for an entry whose past form is `target`.
    pub fn is_regularized(&self, target: &str, reading: &str) -> bool {
        let (t, r) = (fold(target), fold(reading));
        self.entries.iter().any(|e| {
            fold(&e.past) == t && {
                let root = fold(&e.root);
                r.strip_prefix(root.as_str()).is_some_and(|rest| rest == "d" || rest == "ed")
            }
        })
    }
}

/// Classifies a misspelling.
///
/// Both strings are case-folded first; calling this on a correct reading is
/// a contract violation.
pub fn classify_error(target: &str, reading: &str, verbs: &IrregularVerbs) -> Result<(ErrorClass, BTreeSet<LexicalTag>)> {
    let (t, r) = (fold(target), fold(reading));
    let script = edit_script(&t, &r);
    let chars: Vec<char> = t.chars().collect();
    let class = class_of_script(&chars, &script).ok_or_else(|| {
        Error::Precondition(format!("classify_error called on a correct reading ({target:?} vs {reading:?})"))
    })?;
    let mut tags = BTreeSet::new();
    if verbs.is_regularized(&t, &r) {
        tags.insert(LexicalTag::RegularizedIrregular);
    }
    Ok((class, tags))
}
