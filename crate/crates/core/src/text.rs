//! Small text helpers shared by the parsers and the agent.

/// Collapses every whitespace run to a single space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercase word tokens with surrounding punctuation stripped.
///
/// Inner apostrophes and hyphens survive ("troll's", "half-open"), every
/// other non-alphanumeric character splits tokens.
pub fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\'' || c == '-'))
        .map(|t| t.trim_matches(|c: char| c == '\'' || c == '-'))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Splits `text` after every `.`, `!` or `?` that is followed by whitespace
/// or the end of the text. Pieces are trimmed; empty pieces are dropped.
pub fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') && chars.peek().is_none_or(|(_, n)| n.is_whitespace()) {
            let end = i + c.len_utf8();
            out.push(text[start..end].trim());
            start = end;
        }
    }
    out.push(text[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentences_split_on_terminators() {
        assert_eq!(sentences("A b. C d!  E? f"), ["A b.", "C d!", "E?", "f"]);
        assert_eq!(sentences("Version 1.5 here. Ok."), ["Version 1.5 here.", "Ok."]);
        assert!(sentences("  ").is_empty());
    }

    #[test]
    fn whitespace_runs_collapse() {
        assert_eq!(normalize_whitespace("  a \n\t b  c "), "a b c");
        assert_eq!(normalize_whitespace(""), "");
    }

    #[test]
    fn words_strip_punctuation() {
        let w: Vec<_> = words("To exit, go EAST. 'Troll's' -- axe").collect();
        assert_eq!(w, ["to", "exit", "go", "east", "troll's", "axe"]);
    }
}
