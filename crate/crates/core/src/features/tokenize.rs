/// Whitespace tokenization with punctuation split off.
///
/// Hyphens and apostrophes between two alphanumerics stay inside the word
/// (`dee-lish`, `don't`), as do `.` and `,` between digits (`2.5`, `1,000`).
/// Any other non-alphanumeric character becomes its own token; a run of the
/// same character (`!!!`, `...`) stays together. Case is preserved.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        split_chunk(chunk, &mut out);
    }
    out
}

fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut word = String::new();
    // (character, token index) of the punctuation run currently open
    let mut run: Option<char> = None;
    for (i, &c) in chars.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| chars[j]);
        let next = chars.get(i + 1).copied();
        let joins = match c {
            '-' | '\'' | '\u{2019}' => {
                !word.is_empty() && prev.is_some_and(char::is_alphanumeric) && next.is_some_and(char::is_alphanumeric)
            }
            '.' | ',' => {
                !word.is_empty() && prev.is_some_and(|p| p.is_ascii_digit()) && next.is_some_and(|n| n.is_ascii_digit())
            }
            _ => false,
        };
        if c.is_alphanumeric() || joins {
            run = None;
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            out.push(std::mem::take(&mut word));
        }
        match run {
            Some(r) if r == c => out.last_mut().expect("open run").push(c),
            _ => {
                out.push(c.to_string());
                run = Some(c);
            }
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic() {
        assert_eq!(tokenize("So good!"), ["So", "good", "!"]);
        assert_eq!(tokenize("dee-lish,Super"), ["dee-lish", ",", "Super"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize(" \n\t").is_empty());
    }

    #[test]
    fn runs_and_joiners() {
        assert_eq!(tokenize("tasty!!!"), ["tasty", "!!!"]);
        assert_eq!(tokenize("rolls....oh"), ["rolls", "....", "oh"]);
        assert_eq!(tokenize("don't"), ["don't"]);
        assert_eq!(tokenize("(did"), ["(", "did"]);
        assert_eq!(tokenize("right?)"), ["right", "?", ")"]);
        assert_eq!(tokenize("$12.50,"), ["$", "12.50", ","]);
        assert_eq!(tokenize("-well-"), ["-", "well", "-"]);
        assert_eq!(tokenize("Robuchon.We"), ["Robuchon", ".", "We"]);
    }
}
