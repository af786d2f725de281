//! Minimal Levenshtein edit scripts with a fixed traceback preference.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "op")]
pub enum EditOp {
    Match { ch: char },
    Substitute { from: char, to: char },
    Delete { ch: char },
    Insert { ch: char },
}

/// One script step. `target_pos` is the number of target characters consumed
/// before this step, so for an insertion it names the gap between
/// `target[target_pos - 1]` and `target[target_pos]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditStep {
    pub op: EditOp,
    pub target_pos: usize,
    pub reading_pos: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub steps: Vec<EditStep>,
}

impl EditScript {
    pub fn cost(&self) -> usize {
        self.steps.iter().filter(|s| !matches!(s.op, EditOp::Match { .. })).count()
    }

    pub fn counts(&self) -> EditCounts {
        let mut c = EditCounts::default();
        for s in &self.steps {
            match s.op {
                EditOp::Match { .. } => c.matches += 1,
                EditOp::Substitute { .. } => c.substitutions += 1,
                EditOp::Delete { .. } => c.deletions += 1,
                EditOp::Insert { .. } => c.insertions += 1,
            }
        }
        c
    }

    /// Applies the script to `target`, yielding the reading it describes.
    pub fn apply(&self) -> alloc::string::String {
        self.steps
            .iter()
            .filter_map(|s| match s.op {
                EditOp::Match { ch } | EditOp::Insert { ch } => Some(ch),
                EditOp::Substitute { to, .. } => Some(to),
                EditOp::Delete { .. } => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EditCounts {
    pub matches: usize,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
}

/// Minimal script turning `target` into `reading`, over Unicode scalar values.
///
/// Traceback runs from the end of both strings and, among moves that stay on
/// an optimal path, prefers match, then substitution, then deletion (a target
/// character missing from the reading), then insertion.
pub fn edit_script(target: &str, reading: &str) -> EditScript {
    let t: Vec<char> = target.chars().collect();
    let r: Vec<char> = reading.chars().collect();
    let (n, m) = (t.len(), r.len());
    let w = m + 1;
    let mut d = vec![0usize; (n + 1) * w];
    for i in 0..=n {
        d[i * w] = i;
    }
    for (j, cell) in d.iter_mut().take(w).enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = d[(i - 1) * w + j - 1] + usize::from(t[i - 1] != r[j - 1]);
            let del = d[(i - 1) * w + j] + 1;
            let ins = d[i * w + j - 1] + 1;
            d[i * w + j] = diag.min(del).min(ins);
        }
    }

    let mut steps = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 && t[i - 1] == r[j - 1] && d[(i - 1) * w + j - 1] == here {
            i -= 1;
            j -= 1;
            steps.push(EditStep { op: EditOp::Match { ch: t[i] }, target_pos: i, reading_pos: j });
        } else if i > 0 && j > 0 && d[(i - 1) * w + j - 1] + 1 == here {
            i -= 1;
            j -= 1;
            steps.push(EditStep { op: EditOp::Substitute { from: t[i], to: r[j] }, target_pos: i, reading_pos: j });
        } else if i > 0 && d[(i - 1) * w + j] + 1 == here {
            i -= 1;
            steps.push(EditStep { op: EditOp::Delete { ch: t[i] }, target_pos: i, reading_pos: j });
        } else {
            j -= 1;
            steps.push(EditStep { op: EditOp::Insert { ch: r[j] }, target_pos: i, reading_pos: j });
        }
    }
    steps.reverse();
    EditScript { steps }
}
