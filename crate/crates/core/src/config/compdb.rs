use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{ConfigError, PreprocessMode, SourceDescriptor};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    file: String,
    flags: Vec<String>,
}

/// Reads a compilation database: a JSON array of `{"file", "flags"}`
/// objects. Relative file paths are taken relative to the database's
/// directory. A file listed twice keeps only its last entry.
pub fn load_compilation_database(path: &Path) -> Result<Vec<SourceDescriptor>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_compilation_database(&text, path.parent().unwrap_or(Path::new("")))
        .map_err(|message| ConfigError::Compdb {
            path: path.to_path_buf(),
            message,
        })
}

pub(crate) fn parse_compilation_database(
    text: &str,
    base: &Path,
) -> Result<Vec<SourceDescriptor>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let entries: Vec<Entry> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut out: Vec<SourceDescriptor> = Vec::new();
    for e in entries {
        let path: PathBuf = base.join(&e.file);
        out.retain(|d| d.path != path);
        out.push(SourceDescriptor {
            path,
            preprocessor_flags: e.flags,
            preprocess_mode: PreprocessMode::None,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_and_empty_array() {
        assert!(parse_compilation_database("", Path::new("")).unwrap().is_empty());
        assert!(parse_compilation_database("[]", Path::new("")).unwrap().is_empty());
    }

    #[test]
    fn one_entry_keeps_flags() {
        let d = parse_compilation_database(r#"[{"file":"m.c","flags":["-DX=1"]}]"#, Path::new(""))
            .unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].path, PathBuf::from("m.c"));
        assert_eq!(d[0].preprocessor_flags, vec!["-DX=1"]);
    }

    #[test]
    fn last_entry_wins() {
        let d = parse_compilation_database(
            r#"[{"file":"m.c","flags":["-DA"]},{"file":"n.c","flags":[]},{"file":"m.c","flags":["-DB","-Iinc"]}]"#,
            Path::new("proj"),
        )
        .unwrap();
        assert_eq!(d.len(), 2);
        let m = d.iter().find(|s| s.path == Path::new("proj/m.c")).unwrap();
        assert_eq!(m.preprocessor_flags, vec!["-DB", "-Iinc"]);
    }

    #[test]
    fn malformed_entries() {
        assert!(parse_compilation_database(r#"[{"file":"m.c"}]"#, Path::new("")).is_err());
        assert!(parse_compilation_database(r#"[{"flags":[]}]"#, Path::new("")).is_err());
        assert!(parse_compilation_database(r#"{"file":"m.c","flags":[]}"#, Path::new("")).is_err());
    }
}
