//! Unicode helpers shared by the counting, filtering and scoring code.

use alloc::string::String;
use unicode_general_category::{get_general_category, GeneralCategory};

/// Simple (one-to-one) case fold of a single scalar value.
///
/// Maps through the uppercase form and back down so that variant lowercase
/// letters (final sigma, long s, micro sign, ...) fold together with their
/// ordinary forms. Characters whose case mapping expands to several scalars
/// (`ß` upper-casing to `SS`, dotted `İ` lower-casing to `i̇`) are left as they
/// are, which matches the "simple" half of the Unicode folding table.
pub fn fold_char(c: char) -> char {
    let upper = single(c.to_uppercase()).unwrap_or(c);
    single(upper.to_lowercase()).unwrap_or_else(|| single(c.to_lowercase()).unwrap_or(c))
}

fn single(mut it: impl Iterator<Item = char>) -> Option<char> {
    let first = it.next()?;
    match it.next() {
        None => Some(first),
        Some(_) => None,
    }
}

/// Case-folds every scalar value of `s`.
pub fn fold(s: &str) -> String {
    s.chars().map(fold_char).collect()
}

/// True when `c` belongs to a punctuation (`P*`) or symbol (`S*`) general category.
pub fn is_punct_or_symbol(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
            | MathSymbol
            | CurrencySymbol
            | ModifierSymbol
            | OtherSymbol
    )
}

/// Length in Unicode scalar values.
pub fn scalar_len(s: &str) -> usize {
    s.chars().count()
}
