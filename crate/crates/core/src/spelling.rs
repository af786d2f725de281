use alloc::string::String;

use crate::{Error, Result};

/// Spells `word` out as its Unicode scalar values separated by single spaces.
///
/// ```
/// assert_eq!(spellbench_core::spelling::to_spelling("elephant").unwrap(), "e l e p h a n t");
/// ```
pub fn to_spelling(word: &str) -> Result<String> {
    if word.is_empty() {
        return Err(Error::Precondition("cannot spell an empty word".into()));
    }
    if word.chars().any(char::is_whitespace) {
        return Err(Error::Precondition(alloc::format!("word {word:?} contains whitespace")));
    }
    let mut out = String::with_capacity(word.len() * 2);
    for (i, c) in word.chars().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push(c);
    }
    Ok(out)
}
