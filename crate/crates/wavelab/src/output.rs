//! CSV emission. All floats are written with 17 significant digits so that
//! reruns are byte-comparable and no precision is lost round-tripping.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// One float, 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV destination: a file when a path is given, stdout otherwise.
pub enum Sink {
    File(BufWriter<File>, PathBuf),
    Stdout(io::Stdout),
}

impl Sink {
    pub fn open(out: Option<&Path>) -> Result<Sink> {
        match out {
            Some(path) => {
                if let Some(dir) = path.parent() {
                    if !dir.as_os_str().is_empty() {
                        std::fs::create_dir_all(dir)
                            .with_context(|| format!("creating output directory {}", dir.display()))?;
                    }
                }
                let file = File::create(path)
                    .with_context(|| format!("creating output file {}", path.display()))?;
                Ok(Sink::File(BufWriter::new(file), path.to_path_buf()))
            }
            None => Ok(Sink::Stdout(io::stdout())),
        }
    }

    fn writer(&mut self) -> &mut dyn Write {
        match self {
            Sink::File(w, _) => w,
            Sink::Stdout(w) => w,
        }
    }

    /// Writes one CSV line from preformatted cells.
    pub fn row(&mut self, cells: &[String]) -> Result<()> {
        let line = cells.join(",");
        writeln!(self.writer(), "{line}").context("writing CSV row")
    }

    /// Writes the header line verbatim.
    pub fn header(&mut self, header: &str) -> Result<()> {
        writeln!(self.writer(), "{header}").context("writing CSV header")
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer().flush().context("flushing CSV output")
    }
}

/// Writes a whole numeric table: header plus rows of floats.
pub fn write_table(out: Option<&Path>, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut sink = Sink::open(out)?;
    sink.header(header)?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        sink.row(&cells)?;
    }
    sink.finish()
}
