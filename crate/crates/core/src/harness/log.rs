use std::io::Write;

use crate::error::Result;
use crate::optim::TrainRecord;

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Column layout of a training log. Group columns are fixed when the writer
/// is created so every row has the same width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogSchema {
    pub criterion_groups: Vec<String>,
    pub off_groups: Vec<String>,
    pub wall_time: bool,
}

impl LogSchema {
    pub fn header(&self) -> Vec<String> {
        let mut cols: Vec<String> = [
            "step",
            "train_loss",
            "test_loss",
            "val_loss",
            "criterion",
            "smoothed_criterion",
            "off_fraction",
            "stop_event",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        cols.extend(
            self.criterion_groups
                .iter()
                .map(|g| format!("criterion_{g}")),
        );
        cols.extend(self.off_groups.iter().map(|g| format!("off_{g}")));
        if self.wall_time {
            cols.push("wall_time".into());
        }
        cols
    }

    /// One flattened record; absent values are empty fields.
    pub fn row(&self, r: &TrainRecord<f64>) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        let mut cols = vec![
            r.step.to_string(),
            format_float(r.train_loss),
            opt(r.test_loss),
            opt(r.val_loss),
            opt(r.criterion),
            opt(r.smoothed_criterion),
            opt(r.off_fraction),
            u8::from(r.stop_event).to_string(),
        ];
        cols.extend(
            (0..self.criterion_groups.len()).map(|i| opt(r.group_criteria.get(i).copied())),
        );
        cols.extend((0..self.off_groups.len()).map(|i| opt(r.group_off_fractions.get(i).copied())));
        if self.wall_time {
            cols.push(format_float(r.wall_time));
        }
        cols
    }
}

/// Comma-separated log with a header row.
pub struct LogWriter<W: Write> {
    out: W,
    schema: LogSchema,
}

impl<W: Write> LogWriter<W> {
    pub fn new(mut out: W, schema: LogSchema) -> Result<Self> {
        writeln!(out, "{}", schema.header().join(","))?;
        Ok(LogWriter { out, schema })
    }

    pub fn write(&mut self, record: &TrainRecord<f64>) -> Result<()> {
        writeln!(self.out, "{}", self.schema.row(record).join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
