//! Prompt construction for the LLM similarity judge and parsing of its
//! replies.

use serde::{Deserialize, Serialize};

use crate::error::{LectorError, Result};
use crate::types::Concept;

pub const PLACEHOLDER_A: &str = "{concept_a}";
pub const PLACEHOLDER_B: &str = "{concept_b}";

/// Template for the pairwise confusion-risk prompt. The template must
/// contain exactly one `{concept_a}` and one `{concept_b}` placeholder;
/// each is filled with the concept's term and gloss.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub template: String,
    /// Instruction appended after the filled template telling the model
    /// how to format its reply.
    pub response_schema: String,
}

impl Default for PromptSpec {
    fn default() -> Self {
        Self {
            template: "You are assessing confusion risk between two vocabulary concepts \
                       for exam preparation.\n\
                       Concept A: {concept_a}\n\
                       Concept B: {concept_b}\n\
                       Estimate how likely a learner studying both is to confuse them."
                .to_owned(),
            response_schema:
                "Respond with a single decimal between 0 and 1 and no other text.".to_owned(),
        }
    }
}

fn count_occurrences(haystack: &str, needle: &str) -> usize {
    haystack.matches(needle).count()
}

/// Renders the pairwise prompt. Deterministic in its inputs.
pub fn construct_prompt(a: &Concept, b: &Concept, spec: &PromptSpec) -> Result<String> {
    for placeholder in [PLACEHOLDER_A, PLACEHOLDER_B] {
        match count_occurrences(&spec.template, placeholder) {
            1 => {}
            0 => {
                return Err(LectorError::Config(format!(
                    "prompt template is missing the {placeholder} placeholder"
                )))
            }
            n => {
                return Err(LectorError::Config(format!(
                    "prompt template contains {placeholder} {n} times; expected exactly one"
                )))
            }
        }
    }
    let describe = |c: &Concept| format!("\"{}\" ({})", c.term, c.gloss);
    let filled = spec
        .template
        .replace(PLACEHOLDER_A, &describe(a))
        .replace(PLACEHOLDER_B, &describe(b));
    Ok(format!("{filled}\n{}", spec.response_schema))
}

/// Extracts the first decimal number from a reply and checks it lies in
/// [0, 1]. Out-of-range values are an error, not clamped: a reply of
/// e.g. "1.5" signals the model ignored the response schema.
pub fn parse_similarity_response(raw: &str) -> Result<f64> {
    let number = first_decimal(raw)
        .ok_or_else(|| LectorError::ParseResponse(raw.chars().take(80).collect()))?;
    if !(0.0..=1.0).contains(&number) {
        return Err(LectorError::OutOfRange { value: number });
    }
    Ok(number)
}

/// Scans for the first token of the form `-?digits[.digits]` or `-?.digits`.
fn first_decimal(text: &str) -> Option<f64> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let negative = bytes[i] == b'-';
        let start = if negative { i + 1 } else { i };
        if starts_number(bytes, start) {
            let mut end = start;
            let mut seen_dot = false;
            while end < bytes.len() {
                match bytes[end] {
                    b'0'..=b'9' => end += 1,
                    b'.' if !seen_dot && end + 1 < bytes.len() && bytes[end + 1].is_ascii_digit() =>
                    {
                        seen_dot = true;
                        end += 1;
                    }
                    _ => break,
                }
            }
            let token = &text[i..end];
            if let Ok(v) = token.parse::<f64>() {
                return Some(v);
            }
        }
        i += 1;
    }
    None
}

fn starts_number(bytes: &[u8], at: usize) -> bool {
    match bytes.get(at) {
        Some(b'0'..=b'9') => true,
        Some(b'.') => matches!(bytes.get(at + 1), Some(b'0'..=b'9')),
        _ => false,
    }
}
