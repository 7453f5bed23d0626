use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "A2GMIMO_OUTPUT_ROOT";

/// `out` if given, otherwise `<root>/<name>` with `root` defaulting to
/// `./a2gmimo-out`.
pub fn resolve_output(out: Option<PathBuf>, root: Option<PathBuf>, name: &str) -> PathBuf {
    out.unwrap_or_else(|| root.unwrap_or_else(|| PathBuf::from("a2gmimo-out")).join(name))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes through a temporary sibling and renames it over `path`, so readers
/// never see a partial file.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let result = (|| {
        let file = File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        let mut w = BufWriter::new(file);
        fill(&mut w)?;
        let file = w.into_inner().map_err(|e| CliError::io(&tmp, e.into_error()))?;
        file.sync_all().map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        write_atomic(&path, |w| w.write_all(b"x\n").map_err(|e| CliError::io(&path, e))).unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"x\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn failed_write_keeps_the_old_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        fs::write(&path, b"old").unwrap();
        let err = write_atomic(&path, |_| Err(CliError::data("test", "boom")));
        assert!(err.is_err());
        assert_eq!(fs::read(&path).unwrap(), b"old");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn output_resolution() {
        assert_eq!(resolve_output(Some("x".into()), Some("r".into()), "n"), PathBuf::from("x"));
        assert_eq!(resolve_output(None, Some("r".into()), "n"), PathBuf::from("r/n"));
        assert_eq!(resolve_output(None, None, "n"), PathBuf::from("a2gmimo-out/n"));
    }
}
