use std::fs;
use std::path::{Path, PathBuf};

use tempfile::TempDir;

use crate::{Error, Result};

/// Collects a run's files in a hidden sibling directory and moves them into place in
/// one rename, so an interrupted or failed run leaves nothing behind.
pub struct Staging {
    dir: TempDir,
    target: PathBuf,
    files: Vec<String>,
}

impl Staging {
    pub fn new(out_dir: &Path, name: &str) -> Result<Self> {
        fs::create_dir_all(out_dir)?;
        let dir = tempfile::Builder::new()
            .prefix(&format!(".{name}-"))
            .tempdir_in(out_dir)?;
        Ok(Self {
            dir,
            target: out_dir.join(name),
            files: Vec::new(),
        })
    }

    /// Final location of a staged file.
    pub fn final_path(&self, name: &str) -> PathBuf {
        self.target.join(name)
    }

    pub fn files(&self) -> Vec<PathBuf> {
        self.files.iter().map(|f| self.final_path(f)).collect()
    }

    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_path(self.dir.path().join(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn text(&mut self, name: &str, content: &str) -> Result<()> {
        fs::write(self.dir.path().join(name), content)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn commit(self) -> Result<PathBuf> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target)?;
        }
        let staged = self.dir.keep();
        fs::rename(&staged, &self.target).map_err(|e| {
            let _ = fs::remove_dir_all(&staged);
            Error::Io(e)
        })?;
        Ok(self.target)
    }
}

pub fn num(v: f64) -> String {
    v.to_string()
}

/// Gnuplot preamble for comma-separated files with a header row.
pub fn gnuplot(title: &str, xlabel: &str, ylabel: &str, body: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset title '{title}'\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\nset grid\n{body}\npause -1\n"
    )
}
