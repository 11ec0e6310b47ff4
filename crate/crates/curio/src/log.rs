//! JSON-lines rollout log: one rollout object per line.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use curio_core::store::RolloutSink;
use curio_core::Rollout;

use crate::error::{Error, Result};

pub struct JsonlSink<W: Write> {
    out: W,
    line: Vec<u8>,
}

impl<W: Write> JsonlSink<W> {
    pub fn new(out: W) -> Self {
        JsonlSink { out, line: Vec::with_capacity(512) }
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl JsonlSink<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(JsonlSink::new(BufWriter::new(f)))
    }
}

impl<W: Write> RolloutSink for JsonlSink<W> {
    type Error = io::Error;

    fn write(&mut self, rollout: &Rollout) -> io::Result<()> {
        self.line.clear();
        serde_json::to_writer(&mut self.line, rollout)?;
        self.line.push(b'\n');
        self.out.write_all(&self.line)
    }
}

/// Streams rollouts back from a log file.
pub struct LogReader {
    path: PathBuf,
    lines: io::Lines<BufReader<File>>,
    line_no: usize,
}

impl LogReader {
    pub fn open(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(LogReader { path: path.to_path_buf(), lines: BufReader::new(f).lines(), line_no: 0 })
    }
}

impl Iterator for LogReader {
    type Item = Result<Rollout>;

    fn next(&mut self) -> Option<Self::Item> {
        let line = self.lines.next()?;
        self.line_no += 1;
        Some(match line {
            Err(e) => Err(Error::io(&self.path, e)),
            Ok(l) => {
                serde_json::from_str(&l).map_err(|e| Error::parse(&self.path, format!("line {}: {e}", self.line_no)))
            }
        })
    }
}

pub fn read_log(path: &Path) -> Result<Vec<Rollout>> {
    LogReader::open(path)?.collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use curio_core::types::{ActionParams, Outcome, RolloutMeta};

    fn sample(tick: u64) -> Rollout {
        Rollout {
            tick,
            action: ActionParams::new(vec![0.1, -1.0, 1.0 / 3.0]).unwrap(),
            outcome: Outcome::new().with("hand", vec![0.7, 1e-17]).with("ball", vec![1.5, 1.5]),
            meta: (tick % 2 == 1).then(|| RolloutMeta {
                explorer: "imgep".into(),
                goal_space: "ball".into(),
                goal: vec![-0.3, std::f64::consts::PI],
            }),
        }
    }

    #[test]
    fn lines_round_trip_bit_exact() {
        let mut sink = JsonlSink::new(Vec::new());
        for t in 0..4 {
            sink.write(&sample(t)).unwrap();
        }
        let text = String::from_utf8(sink.into_inner()).unwrap();
        assert_eq!(text.lines().count(), 4);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["meta"], serde_json::Value::Null);
        assert_eq!(first["outcome"]["ball"], serde_json::json!([1.5, 1.5]));
        for (t, line) in text.lines().enumerate() {
            let back: Rollout = serde_json::from_str(line).unwrap();
            assert_eq!(back, sample(t as u64));
        }
    }

    #[test]
    fn reader_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("log.jsonl");
        let mut text = serde_json::to_string(&sample(0)).unwrap();
        text.push_str("\n{not json}\n");
        std::fs::write(&p, text).unwrap();
        let mut r = LogReader::open(&p).unwrap();
        assert!(r.next().unwrap().is_ok());
        let err = r.next().unwrap().unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }
}
