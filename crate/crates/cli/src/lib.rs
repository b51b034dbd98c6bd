//! Batch commands behind the `vmlab` binary, kept free of process concerns
//! so they can be tested directly.

use std::fmt;
use std::io::Read;

use serde::Serialize;
use vmlab_core::{
    default_spec, format_value, geometry_template, grade, moving_transform, reading_text,
    revolution_transform, svg::render_svg, Exercise, ExerciseStream, GradeError, GradeOptions,
    InstrumentKind, MovingTransform, ScaleGeometry, Verdict,
};

pub const ANSWER_HEADER: [&str; 3] = ["kind", "target_ticks", "answer"];
pub const GEN_HEADER: [&str; 3] = ["kind", "target_ticks", "display_answer"];

/// `count` exercises from the seeded stream as CSV.
pub fn gen_csv(kind: InstrumentKind, count: u32, seed: u64) -> String {
    let spec = default_spec(kind);
    let mut stream = ExerciseStream::new(seed);
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(GEN_HEADER).expect("in-memory write");
    for _ in 0..count {
        let ex = stream.next_exercise(&spec);
        let answer = format_value(&spec, ex.target()).expect("targets are in range");
        out.write_record([kind.slug(), &ex.target().ticks().to_string(), &answer])
            .expect("in-memory write");
    }
    String::from_utf8(out.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// A structural problem in an answer file. `row` is the 1-based line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchError {
    pub row: u64,
    pub column: Option<&'static str>,
    pub message: String,
}

impl fmt::Display for BatchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.column {
            Some(c) => write!(f, "row {}, column {c}: {}", self.row, self.message),
            None => write!(f, "row {}: {}", self.row, self.message),
        }
    }
}

impl std::error::Error for BatchError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowOutcome {
    Graded(Verdict),
    /// The answer text is not a number; it counts against the total.
    Unreadable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedRow {
    pub row: u64,
    pub outcome: RowOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradeReport {
    pub rows: Vec<GradedRow>,
}

impl GradeReport {
    pub fn correct(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.outcome == RowOutcome::Graded(Verdict::Correct))
            .count()
    }

    pub fn total(&self) -> usize {
        self.rows.len()
    }

    pub fn all_correct(&self) -> bool {
        self.correct() == self.total()
    }
}

impl fmt::Display for GradeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            match &r.outcome {
                RowOutcome::Graded(v) => writeln!(f, "row {}: {}", r.row, v.message())?,
                RowOutcome::Unreadable(why) => writeln!(f, "row {}: not graded ({why})", r.row)?,
            }
        }
        writeln!(f, "{}/{}", self.correct(), self.total())
    }
}

fn err(row: u64, column: Option<&'static str>, message: impl Into<String>) -> BatchError {
    BatchError {
        row,
        column,
        message: message.into(),
    }
}

/// Grades every row of an answer file at zero tolerance.
pub fn grade_csv(input: impl Read) -> Result<GradeReport, BatchError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(err(1, None, e.to_string())),
        None => return Err(err(1, None, "empty file, expected header kind,target_ticks,answer")),
    };
    if header.iter().map(str::trim).ne(ANSWER_HEADER) {
        return Err(err(1, None, "missing header kind,target_ticks,answer"));
    }

    let mut report = GradeReport::default();
    for record in records {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            err(row, None, e.to_string())
        })?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(err(row, None, format!("expected 3 fields, found {}", record.len())));
        }
        let kind: InstrumentKind = record[0]
            .trim()
            .parse()
            .map_err(|e: vmlab_core::model::UnknownInstrument| err(row, Some("kind"), e.to_string()))?;
        let spec = default_spec(kind);
        let target = record[1]
            .trim()
            .parse::<u64>()
            .map_err(|_| err(row, Some("target_ticks"), format!("not a tick count: {:?}", &record[1])))
            .and_then(|t| spec.position(t).map_err(|e| err(row, Some("target_ticks"), e.to_string())))?;
        let mut ex = Exercise::new(format!("row-{row}"), kind, target, 0);
        let outcome = match grade(&spec, &mut ex, &record[2], GradeOptions::default()) {
            Ok(r) => RowOutcome::Graded(r.verdict),
            Err(GradeError::Malformed(e)) => RowOutcome::Unreadable(format!("could not read {:?}: {e}", &record[2])),
            Err(e) => return Err(err(row, Some("answer"), e.to_string())),
        };
        report.rows.push(GradedRow { row, outcome });
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RenderFormat {
    Geometry,
    Svg,
}

#[derive(Debug, Serialize)]
pub struct GeometryDoc {
    pub kind: InstrumentKind,
    pub ticks: u32,
    pub template: ScaleGeometry,
    pub transform: MovingTransform,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter_transform: Option<MovingTransform>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reading_text: Option<String>,
}

pub fn render(
    kind: InstrumentKind,
    ticks: u64,
    show_reading: bool,
    format: RenderFormat,
) -> Result<String, vmlab_core::Error> {
    let spec = default_spec(kind);
    let pos = spec.position(ticks)?;
    match format {
        RenderFormat::Svg => render_svg(&spec, pos, show_reading),
        RenderFormat::Geometry => {
            let doc = GeometryDoc {
                kind,
                ticks: pos.ticks(),
                template: geometry_template(&spec),
                transform: moving_transform(&spec, pos)?,
                counter_transform: revolution_transform(&spec, pos)?,
                reading_text: if show_reading {
                    Some(reading_text(&spec, pos)?)
                } else {
                    None
                },
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("geometry serializes");
            s.push('\n');
            Ok(s)
        }
    }
}
