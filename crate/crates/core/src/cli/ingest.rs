//! Transcript CSV files.
//!
//! ```text
//! # precinct: 218
//! # date: 2024-09-08
//! Anikeeva,Afonin,Bulkina
//! 1,0,1
//! 0,0,1
//! ```
//!
//! The header names the roster; each later row is one announced ballot with
//! a 0/1 cell per candidate. Leading `#` lines carry `key: value` metadata.
//! Rows failing the validity filter are dropped and their line numbers kept.

use std::path::Path;

use crate::error::{Error, Result};
use crate::flagseq::{validity_filter, Ballot, Transcript};

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedTranscript {
    pub transcript: Transcript,
    pub date: Option<String>,
    /// 1-based file line numbers of rows rejected as invalid ballots.
    pub invalid_rows: Vec<usize>,
}

fn metadata(text: &str) -> (Option<String>, Option<String>) {
    let (mut precinct, mut date) = (None, None);
    for line in text.lines() {
        let line = line.trim();
        let Some(comment) = line.strip_prefix('#') else {
            if line.is_empty() {
                continue;
            }
            break;
        };
        if let Some((key, value)) = comment.split_once(':') {
            let value = value.trim().to_string();
            match key.trim().to_ascii_lowercase().as_str() {
                "precinct" | "id" => precinct = Some(value),
                "date" => date = Some(value),
                _ => {}
            }
        }
    }
    (precinct, date)
}

/// Parses transcript CSV text. `default_precinct` is used when the file has
/// no `# precinct:` line.
pub fn read_transcript(
    text: &str,
    default_precinct: &str,
    max_marks: usize,
) -> Result<IngestedTranscript> {
    let (precinct, date) = metadata(text);
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::parse(1, "missing header row of candidate labels"));
    }
    let candidates: Vec<String> = header.iter().map(str::to_string).collect();
    let mut transcript = Transcript::new(
        precinct.unwrap_or_else(|| default_precinct.to_string()),
        candidates,
        max_marks,
    )
    .map_err(|e| Error::parse(1, e.to_string()))?;
    let mut invalid_rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != transcript.c() {
            return Err(Error::parse(
                line,
                format!("expected {} cells, found {}", transcript.c(), record.len()),
            ));
        }
        let mut marks = Vec::new();
        for (i, cell) in record.iter().enumerate() {
            match cell {
                "1" => marks.push(i),
                "0" => {}
                other => return Err(Error::parse(line, format!("cell `{other}` is not 0 or 1"))),
            }
        }
        if !validity_filter(marks.len(), max_marks) {
            invalid_rows.push(line);
        }
        transcript.push(Ballot::new(marks))?;
    }
    Ok(IngestedTranscript {
        transcript,
        date,
        invalid_rows,
    })
}

pub fn load_transcript(path: &Path, max_marks: usize) -> Result<IngestedTranscript> {
    let text = std::fs::read_to_string(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "precinct".into());
    read_transcript(&text, &stem, max_marks)
}

/// Serializes a transcript in the format [`read_transcript`] accepts.
pub fn write_transcript(transcript: &Transcript, date: Option<&str>) -> String {
    let mut out = format!("# precinct: {}\n", transcript.precinct_id());
    if let Some(date) = date {
        out.push_str(&format!("# date: {date}\n"));
    }
    out.push_str(&transcript.candidates().join(","));
    out.push('\n');
    for ballot in transcript.ballots() {
        let cells: Vec<&str> = (0..transcript.c())
            .map(|i| if ballot.contains(i) { "1" } else { "0" })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# precinct: 7\n# date: 2024-09-08\nA,B,C\n1,0,1\n0,0,0\n0,1,0\n1,1,1\n";

    #[test]
    fn parses_metadata_and_rows() {
        let t = read_transcript(SAMPLE, "x", 2).unwrap();
        assert_eq!(t.transcript.precinct_id(), "7");
        assert_eq!(t.date.as_deref(), Some("2024-09-08"));
        assert_eq!(t.transcript.n(), 2);
        assert_eq!(t.invalid_rows, vec![5, 7]);
        assert_eq!(t.transcript.invalid_count(), 2);
    }

    #[test]
    fn default_precinct_without_metadata() {
        let t = read_transcript("A,B\n1,0\n", "fallback", 5).unwrap();
        assert_eq!(t.transcript.precinct_id(), "fallback");
    }

    #[test]
    fn reports_line_numbers() {
        let err = read_transcript("# x\nA,B\n1,0\n1,2\n", "x", 5).unwrap_err();
        assert_eq!(err, Error::parse(4, "cell `2` is not 0 or 1"));
        let err = read_transcript("A,B\n1,0\n1\n", "x", 5).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(
            read_transcript("", "x", 5),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            read_transcript("# only comments\n", "x", 5),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn write_then_read() {
        let t = read_transcript(SAMPLE, "x", 2).unwrap();
        let text = write_transcript(&t.transcript, t.date.as_deref());
        let back = read_transcript(&text, "y", 2).unwrap();
        assert_eq!(back.transcript.ballots(), t.transcript.ballots());
        assert_eq!(back.transcript.precinct_id(), "7");
        assert!(back.invalid_rows.is_empty());
    }
}
