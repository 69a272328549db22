use crate::codegen::ScriptText;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("response contains no fenced code block")]
    NoBlock,
    #[error("response contains {} fenced code blocks (lines {}); expected exactly one", .0.len(), spans(.0))]
    MultipleBlocks(Vec<(usize, usize)>),
    #[error("code fence opened on line {0} is never closed")]
    Unterminated(usize),
}

fn spans(s: &[(usize, usize)]) -> String {
    s.iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(", ")
}

fn fence_len(line: &str) -> usize {
    line.bytes().take_while(|&b| b == b'`').count()
}

/// Return the body of the single ``` fenced block in `response`, byte for byte.
///
/// A block opens with a line starting with three or more backticks (an info
/// string may follow) and closes with a line holding only at least as many
/// backticks. Block spans are reported as 1-based fence line numbers.
pub fn extract_code(response: &str) -> Result<ScriptText, ExtractError> {
    let mut blocks: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut open: Option<(usize, usize, usize)> = None;
    let mut offset = 0;
    for (idx, raw) in response.split_inclusive('\n').enumerate() {
        let line = raw.trim_end_matches(['\n', '\r']);
        let ticks = fence_len(line);
        match open {
            None if ticks >= 3 => open = Some((idx + 1, offset + raw.len(), ticks)),
            Some((start_line, body_start, n)) if ticks >= n && line[ticks..].trim().is_empty() => {
                blocks.push((start_line, idx + 1, body_start, offset));
                open = None;
            }
            _ => {}
        }
        offset += raw.len();
    }
    if let Some((line, _, _)) = open {
        return Err(ExtractError::Unterminated(line));
    }
    match blocks.as_slice() {
        [] => Err(ExtractError::NoBlock),
        [(_, _, start, end)] => Ok(ScriptText::llm(&response[*start..*end])),
        many => Err(ExtractError::MultipleBlocks(many.iter().map(|b| (b.0, b.1)).collect())),
    }
}
