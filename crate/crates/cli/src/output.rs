//! Output files: a `#` comment header holding the resolved config, then the
//! payload, written to a temporary file and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::config::ExperimentConfig;
use crate::CliError;

/// Writes files of one experiment into its output directory.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    header: String,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(config: &ExperimentConfig) -> Result<Self, CliError> {
        fs::create_dir_all(&config.out)?;
        let mut header = format!("# qlandscape {}\n", config.experiment);
        for line in config.to_toml().lines() {
            header.push_str("# ");
            header.push_str(line);
            header.push('\n');
        }
        Ok(Self {
            dir: config.out.clone(),
            header,
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `name` with the header followed by whatever `body` emits.
    pub fn write<F>(&mut self, name: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<(), CliError>,
    {
        let mut buf = self.header.clone().into_bytes();
        body(&mut buf)?;
        let target = self.dir.join(name);
        let mut tmp = NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&buf)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&target).map_err(|e| CliError::Io(e.error))?;
        self.written.push(target.clone());
        Ok(target)
    }

    /// Two-column `key,value` table.
    pub fn write_summary(&mut self, name: &str, rows: &[(String, String)]) -> Result<PathBuf, CliError> {
        self.write(name, |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["key", "value"])?;
            for (k, v) in rows {
                w.write_record([k, v])?;
            }
            w.flush()?;
            Ok(())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;

    #[test]
    fn header_and_body() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::defaults_for(Experiment::GenData);
        config.out = dir.path().join("sub");
        let mut out = OutputDir::create(&config).unwrap();
        let path = out
            .write("a.csv", |b| {
                b.extend_from_slice(b"x\n1\n");
                Ok(())
            })
            .unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert!(text.starts_with("# qlandscape gen-data\n"));
        assert!(text.ends_with("x\n1\n"));
        let toml: String = text
            .lines()
            .skip(1)
            .filter_map(|l| l.strip_prefix("# ").or_else(|| l.strip_prefix('#')))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(ExperimentConfig::from_toml(&toml).unwrap(), config);
        assert_eq!(fs::read_dir(dir.path().join("sub")).unwrap().count(), 1);
    }
}
