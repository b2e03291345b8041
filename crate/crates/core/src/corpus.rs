//! Plain-text tune files: integers separated by whitespace and/or commas,
//! `#` comment lines and blank lines ignored.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{Pitch, Tune};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusTune {
    pub id: String,
    pub tune: Tune,
    pub source_path: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    pub tunes: Vec<CorpusTune>,
    /// Files that held no notes and were skipped.
    pub skipped_empty: usize,
}

/// Parses tune text. `path` is only used in error messages. Token indices
/// in errors count from 1.
pub fn parse_tune(text: &str, path: &Path) -> Result<Tune> {
    let mut notes = Vec::new();
    let mut index = 0;
    for (ln, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut offset = 0;
        for piece in line.split(|c: char| c == ',' || c.is_whitespace()) {
            let column = offset + 1;
            offset += piece.len() + 1;
            if piece.is_empty() {
                continue;
            }
            index += 1;
            let note: Pitch = piece.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: ln + 1,
                column,
                index,
                token: piece.to_string(),
            })?;
            notes.push(note);
        }
    }
    Ok(Tune::new(notes))
}

/// Renders a tune in the format read by [`parse_tune`].
pub fn format_tune(t: &Tune) -> String {
    format!("{t}\n")
}

pub fn read_tune(path: &Path) -> Result<Tune> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tune(&text, path)
}

pub fn write_tune(t: &Tune, path: &Path) -> Result<()> {
    fs::write(path, format_tune(t)).map_err(|e| Error::io(path, e))
}

/// Loads one file, or every `.txt`/`.csv` file of a directory in name order.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    let files = if meta.is_dir() {
        let mut files = Vec::new();
        for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
            let p = entry.map_err(|e| Error::io(path, e))?.path();
            let ext = p.extension().and_then(|e| e.to_str());
            if p.is_file() && matches!(ext, Some("txt" | "csv")) {
                files.push(p);
            }
        }
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };

    let mut corpus = Corpus::default();
    let mut seen = HashSet::new();
    for file in files {
        let tune = read_tune(&file)?;
        if tune.is_empty() {
            corpus.skipped_empty += 1;
            continue;
        }
        let id = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateTuneId(id));
        }
        corpus.tunes.push(CorpusTune {
            id,
            tune,
            source_path: file,
        });
    }
    Ok(corpus)
}
