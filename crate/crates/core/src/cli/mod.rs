//! Pieces behind the `ballot-runs` binary: configuration, transcript input,
//! reports, table verification, plotting and simulation.

pub mod config;
pub mod ingest;
pub mod plot;
pub mod report;
pub mod simulate;
pub mod verify;

use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Parse { .. } | Error::Config(_) | Error::Scenario(_) | Error::Roster(_) => {
            EXIT_INPUT
        }
        Error::Domain(_)
        | Error::Numeric(_)
        | Error::InsufficientData(_)
        | Error::Degenerate(_)
        | Error::UnknownCandidate(_) => EXIT_COMPUTATION,
        _ => EXIT_FAILURE,
    }
}

/// Writes through a sibling temporary file and renames it into place, so a
/// failed run never leaves a truncated output.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces() {
        let dir = std::env::temp_dir().join(format!("ballot-runs-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.txt");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
        assert!(write_atomic(&dir.join("missing").join("x"), "a").is_err());
    }

    #[test]
    fn codes() {
        assert_eq!(exit_code(&Error::parse(3, "bad")), EXIT_INPUT);
        assert_eq!(exit_code(&Error::domain("bad")), EXIT_COMPUTATION);
        assert_eq!(exit_code(&Error::Io("x".into())), EXIT_FAILURE);
    }
}
