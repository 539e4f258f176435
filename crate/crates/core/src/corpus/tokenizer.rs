/// Identifier recorded in index metadata so persisted indexes can be
/// checked against the tokenizer that built them.
pub const TOKENIZER_ID: &str = "lowercase-unicode-alphanumeric-v1";

/// Lowercased runs of Unicode alphanumeric characters. Everything else
/// separates tokens. No stemming and no stopword removal.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_and_lowercases() {
        assert_eq!(tokenize("Tell me about defender"), ["tell", "me", "about", "defender"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("sore-throat 2x!"), ["sore", "throat", "2x"]);
    }

    #[test]
    fn unicode_letters_are_kept() {
        assert_eq!(tokenize("Crème brûlée, ÉCOLE"), ["crème", "brûlée", "école"]);
        assert!(tokenize(" \t--!!").is_empty());
    }
}
