//! Brute-force reference for minimal edit scripts and their error class.
//!
//! Distances come from two separate tables, prefix-to-prefix and
//! suffix-to-suffix, so a move lies on some optimal path exactly when the
//! prefix cost before it, its own cost and the suffix cost after it add up
//! to the total distance. Walking those moves enumerates every minimal
//! script.

use spellbench_core::scoring::ErrorClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Ins,
    Del,
    Sub,
    Keep,
}

impl Move {
    /// Traceback rank: higher is preferred.
    fn rank(self) -> u8 {
        match self {
            Move::Ins => 0,
            Move::Del => 1,
            Move::Sub => 2,
            Move::Keep => 3,
        }
    }
}

pub struct Tables {
    t: Vec<char>,
    r: Vec<char>,
    pre: Vec<Vec<usize>>,
    suf: Vec<Vec<usize>>,
}

impl Tables {
    pub fn new(target: &str, reading: &str) -> Self {
        let t: Vec<char> = target.chars().collect();
        let r: Vec<char> = reading.chars().collect();
        let (n, m) = (t.len(), r.len());
        let mut pre = vec![vec![0usize; m + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=m {
                pre[i][j] = if i == 0 {
                    j
                } else if j == 0 {
                    i
                } else {
                    (pre[i - 1][j - 1] + usize::from(t[i - 1] != r[j - 1]))
                        .min(pre[i - 1][j] + 1)
                        .min(pre[i][j - 1] + 1)
                };
            }
        }
        let mut suf = vec![vec![0usize; m + 1]; n + 1];
        for i in (0..=n).rev() {
            for j in (0..=m).rev() {
                suf[i][j] = if i == n {
                    m - j
                } else if j == m {
                    n - i
                } else {
                    (suf[i + 1][j + 1] + usize::from(t[i] != r[j]))
                        .min(suf[i + 1][j] + 1)
                        .min(suf[i][j + 1] + 1)
                };
            }
        }
        Tables { t, r, pre, suf }
    }

    pub fn distance(&self) -> usize {
        self.suf[0][0]
    }

    /// Moves out of `(i, j)` that stay on an optimal path.
    fn moves(&self, i: usize, j: usize) -> impl Iterator<Item = (Move, usize, usize)> + '_ {
        let (n, m) = (self.t.len(), self.r.len());
        let total = self.distance();
        let here = self.pre[i][j];
        let mut out = Vec::with_capacity(3);
        if i < n && j < m {
            let same = self.t[i] == self.r[j];
            let mv = if same { Move::Keep } else { Move::Sub };
            if here + usize::from(!same) + self.suf[i + 1][j + 1] == total {
                out.push((mv, i + 1, j + 1));
            }
        }
        if i < n && here + 1 + self.suf[i + 1][j] == total {
            out.push((Move::Del, i + 1, j));
        }
        if j < m && here + 1 + self.suf[i][j + 1] == total {
            out.push((Move::Ins, i, j + 1));
        }
        out.into_iter()
    }

    /// Classes reachable by any minimal script (bitmask over `class_bit`).
    pub fn class_set(&self) -> u8 {
        let (n, m) = (self.t.len(), self.r.len());
        // state bits: 1 deletion, 2 substitution, 4 insertion, 8 non-repeat insertion
        let mut states = vec![vec![0u16; m + 1]; n + 1];
        states[0][0] = 1;
        for i in 0..=n {
            for j in 0..=m {
                let here = states[i][j];
                if here == 0 {
                    continue;
                }
                for (mv, ni, nj) in self.moves(i, j) {
                    let add = match mv {
                        Move::Keep => 0,
                        Move::Sub => 2,
                        Move::Del => 1,
                        Move::Ins => {
                            let ch = self.r[j];
                            let repeat = (i > 0 && self.t[i - 1] == ch) || (i < n && self.t[i] == ch);
                            if repeat {
                                4
                            } else {
                                12
                            }
                        }
                    };
                    let mut next = 0u16;
                    for s in 0..16 {
                        if here & (1 << s) != 0 {
                            next |= 1 << (s | add);
                        }
                    }
                    states[ni][nj] |= next;
                }
            }
        }
        let mut classes = 0u8;
        for s in 0..16 {
            if states[n][m] & (1 << s) != 0 {
                if let Some(c) = class_of_state(s) {
                    classes |= class_bit(c);
                }
            }
        }
        classes
    }

    /// Every minimal script as a list of (move, target chars consumed before it, char).
    pub fn all_scripts(&self) -> Vec<Vec<(Move, usize, char)>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk(0, 0, &mut path, &mut out);
        out
    }

    fn walk(&self, i: usize, j: usize, path: &mut Vec<(Move, usize, char)>, out: &mut Vec<Vec<(Move, usize, char)>>) {
        if i == self.t.len() && j == self.r.len() {
            out.push(path.clone());
            return;
        }
        for (mv, ni, nj) in self.moves(i, j).collect::<Vec<_>>() {
            let ch = if mv == Move::Del { self.t[i] } else { self.r[j] };
            path.push((mv, i, ch));
            self.walk(ni, nj, path, out);
            path.pop();
        }
    }

    /// The script a backward traceback with preference keep > substitute >
    /// delete > insert produces: the maximum over all minimal scripts when
    /// compared move by move from the end.
    pub fn preferred_script(&self) -> Vec<(Move, usize, char)> {
        let key = |s: &Vec<(Move, usize, char)>| s.iter().rev().map(|(m, _, _)| m.rank()).collect::<Vec<u8>>();
        self.all_scripts().into_iter().max_by(|a, b| key(a).cmp(&key(b))).unwrap()
    }

    pub fn class_of_script(&self, script: &[(Move, usize, char)]) -> Option<ErrorClass> {
        let mut state = 0u8;
        for &(mv, i, ch) in script {
            state |= match mv {
                Move::Keep => 0,
                Move::Sub => 2,
                Move::Del => 1,
                Move::Ins => {
                    let t = &self.t;
                    let repeat = (i > 0 && t[i - 1] == ch) || (i < t.len() && t[i] == ch);
                    if repeat {
                        4
                    } else {
                        12
                    }
                }
            };
        }
        class_of_state(state)
    }
}

fn class_of_state(s: u8) -> Option<ErrorClass> {
    let kinds = (s & 1 != 0) as u8 + (s & 2 != 0) as u8 + (s & 4 != 0) as u8;
    match kinds {
        0 => None,
        1 if s & 1 != 0 => Some(ErrorClass::DropOnly),
        1 if s & 2 != 0 => Some(ErrorClass::SubstitutionOnly),
        1 if s & 8 != 0 => Some(ErrorClass::AddInsertion),
        1 => Some(ErrorClass::RepeatInsertion),
        _ => Some(ErrorClass::Mixed),
    }
}

pub fn class_bit(c: ErrorClass) -> u8 {
    1 << ErrorClass::ALL.iter().position(|&x| x == c).unwrap()
}

/// All strings over `alphabet` with length at most `max_len`, shortest first.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * alphabet.len());
        for s in &frontier {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
