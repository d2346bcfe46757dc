//! Text formats: classifier files, diagram files, DOT export and CSV data.

mod classifier_file;
mod dataset;
mod odd_file;

pub use classifier_file::{dump_classifier, format_classifier, load_classifier, parse_classifier};
pub use dataset::{load_dataset, parse_dataset, DatasetOptions};
pub use odd_file::{
    deserialize_odd, deserialize_odd_into, load_odd, save_odd, serialize_odd, to_dot,
};

/// Probability text: rounded to 12 significant digits, then printed in the
/// shortest form that reads back to the rounded value.
pub fn format_prob(p: f64) -> String {
    let rounded: f64 = format!("{p:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Whitespace token with its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Non-blank, non-comment lines as `(line number, tokens)`.
fn tokenize(text: &str) -> Vec<(usize, Vec<Token<'_>>)> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in line
            .char_indices()
            .chain(std::iter::once((line.len(), ' ')))
        {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &line[s..pos],
                        column: line[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push((i + 1, tokens));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities_round_to_twelve_digits() {
        assert_eq!(format_prob(1.0 - 0.04), "0.96");
        assert_eq!(format_prob(0.3), "0.3");
        assert_eq!(format_prob(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_prob(1.0), "1");
    }

    #[test]
    fn tokens_carry_columns() {
        let lines = tokenize("# header\n  kind  naive_bayes # trailing\n\n");
        assert_eq!(lines.len(), 1);
        let (line, toks) = &lines[0];
        assert_eq!(*line, 2);
        assert_eq!((toks[1].text, toks[1].column), ("naive_bayes", 9));
    }
}
