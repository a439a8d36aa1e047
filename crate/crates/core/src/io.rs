use std::io::{Read, Write};

use crate::consensus::{Classification, ConsensusResult};
use crate::curve::{Curve, TimeSeriesPoint};
use crate::error::{Error, Result};
use crate::estimators::EstimatorReport;
use crate::measurement::Measurement;
use crate::survey::{RespondentVerdict, SurveyAnalysis, SurveyTable};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance block embedded as comment lines at the top of every output
/// file: tool version, subcommand, the full effective flag set, and the seed
/// (`-` for commands that use no randomness).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Metadata {
    pub subcommand: String,
    pub flags: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn new(subcommand: impl Into<String>) -> Metadata {
        Metadata {
            subcommand: subcommand.into(),
            ..Metadata::default()
        }
    }

    pub fn flag(mut self, name: &str, value: impl std::fmt::Display) -> Metadata {
        self.flags.push((name.to_string(), value.to_string()));
        self
    }

    pub fn seed(mut self, seed: u64) -> Metadata {
        self.seed = Some(seed);
        self
    }

    pub fn note(mut self, line: impl Into<String>) -> Metadata {
        self.notes.push(line.into());
        self
    }

    pub fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("{TOOL_NAME} {TOOL_VERSION}"),
            format!("subcommand: {}", self.subcommand),
        ];
        let flags = self
            .flags
            .iter()
            .map(|(name, value)| {
                if value.is_empty() {
                    format!("--{name}")
                } else {
                    format!("--{name} {value}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ");
        lines.push(format!("flags: {flags}"));
        match self.seed {
            Some(seed) => lines.push(format!("seed: {seed}")),
            None => lines.push("seed: -".to_string()),
        }
        lines.extend(self.notes.iter().cloned());
        lines
    }

    pub fn write_csv_header(&self, w: &mut dyn Write) -> Result<()> {
        for line in self.comment_lines() {
            writeln!(w, "# {line}")?;
        }
        Ok(())
    }

    pub fn svg_comments(&self) -> String {
        self.comment_lines()
            .iter()
            .map(|line| format!("<!-- {line} -->\n"))
            .collect()
    }
}

fn parse_error(line: u64, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    parse_error(line, e.to_string())
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn parse_f64(cell: &str, line: u64, what: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| parse_error(line, format!("{what} value {cell:?} is not a number")))
}

fn reader(r: impl Read) -> csv::Reader<impl Read> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r)
}

/// Quotes a field if it contains CSV syntax characters.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Reads a plain value list: header `x`, one real per row.
pub fn read_values_csv(r: impl Read) -> Result<Vec<f64>> {
    let mut rdr = reader(r);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.len() != 1 || &headers[0] != "x" {
        return Err(parse_error(
            1,
            format!("expected header `x`, got {:?}", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record_line(&record);
        values.push(parse_f64(&record[0], line, "x")?);
    }
    Ok(values)
}

/// Reads measurements: header `id,x[,y[,z]],e_x[,e_y[,e_z]]`. Error columns
/// are optional; blank or missing error cells fall back to `default_error`.
pub fn read_measurements_csv(
    r: impl Read,
    default_error: Option<f64>,
) -> Result<Vec<Measurement>> {
    let mut rdr = reader(r);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let (dim, has_errors) = match names.as_slice() {
        ["id", "x"] => (1, false),
        ["id", "x", "e_x"] => (1, true),
        ["id", "x", "y"] => (2, false),
        ["id", "x", "y", "e_x", "e_y"] => (2, true),
        ["id", "x", "y", "z"] => (3, false),
        ["id", "x", "y", "z", "e_x", "e_y", "e_z"] => (3, true),
        _ => {
            return Err(parse_error(
                1,
                format!(
                    "expected header `id,x[,y[,z]],e_x[,e_y[,e_z]]`, got {:?}",
                    names.join(",")
                ),
            ))
        }
    };

    let mut measurements = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record_line(&record);
        if record.len() != headers.len() {
            return Err(parse_error(
                line,
                format!("expected {} fields, got {}", headers.len(), record.len()),
            ));
        }
        let id = record[0].trim();
        if id.is_empty() {
            return Err(parse_error(line, "empty measurement id"));
        }
        let mut values = Vec::with_capacity(dim);
        for k in 0..dim {
            values.push(parse_f64(&record[1 + k], line, &headers[1 + k])?);
        }
        let mut errors = Vec::with_capacity(dim);
        for k in 0..dim {
            let cell = if has_errors { record[1 + dim + k].trim() } else { "" };
            if cell.is_empty() {
                match default_error {
                    Some(e) => errors.push(e),
                    None => {
                        return Err(parse_error(
                            line,
                            format!(
                                "measurement {id:?} has no {} and no global --error was given",
                                if has_errors { "error cell" } else { "error column" }
                            ),
                        ))
                    }
                }
            } else {
                errors.push(parse_f64(cell, line, &headers[1 + dim + k])?);
            }
        }
        measurements.push(Measurement::new(id.to_string(), values, errors, 1.0)?);
    }
    Ok(measurements)
}

/// Reads a monthly series: header `t,count`.
pub fn read_timeseries_csv(r: impl Read) -> Result<Vec<TimeSeriesPoint>> {
    let mut rdr = reader(r);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names != ["t", "count"] {
        return Err(parse_error(
            1,
            format!("expected header `t,count`, got {:?}", names.join(",")),
        ));
    }
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record_line(&record);
        points.push(TimeSeriesPoint {
            t: parse_f64(&record[0], line, "t")?,
            count: parse_f64(&record[1], line, "count")?,
        });
    }
    Ok(points)
}

/// Reads a survey grade matrix: first row `respondent,<q1>,<q2>,...`, one row
/// per respondent, integer grades or blank cells.
pub fn read_survey_csv(r: impl Read, scale_min: i64, scale_max: i64) -> Result<SurveyTable> {
    let mut rdr = reader(r);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.len() < 2 || &headers[0] != "respondent" {
        return Err(parse_error(
            1,
            "expected header `respondent,<question>,...`",
        ));
    }
    let questions: Vec<String> = headers.iter().skip(1).map(|s| s.to_string()).collect();

    let mut respondents = Vec::new();
    let mut grades = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record_line(&record);
        if record.len() != headers.len() {
            return Err(parse_error(
                line,
                format!("expected {} fields, got {}", headers.len(), record.len()),
            ));
        }
        let label = record[0].trim();
        if label.is_empty() {
            return Err(parse_error(line, "empty respondent label"));
        }
        let mut row = Vec::with_capacity(questions.len());
        for q in 0..questions.len() {
            let cell = record[1 + q].trim();
            if cell.is_empty() {
                row.push(None);
            } else {
                let grade = cell.parse::<i64>().map_err(|_| {
                    parse_error(
                        line,
                        format!(
                            "grade {:?} of respondent {:?} on {:?} is not an integer",
                            cell, label, questions[q]
                        ),
                    )
                })?;
                row.push(Some(grade));
            }
        }
        respondents.push(label.to_string());
        grades.push(row);
    }
    SurveyTable::new(respondents, questions, grades, scale_min, scale_max)
}

/// Writes a value list with header `x`.
pub fn write_values_csv(w: &mut dyn Write, meta: &Metadata, values: &[f64]) -> Result<()> {
    meta.write_csv_header(w)?;
    writeln!(w, "x")?;
    for v in values {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

/// Writes a curve with header `x,value`, one row per breakpoint. Spikes are
/// recorded as comment lines since they are not part of the linear graph.
pub fn write_curve_csv(w: &mut dyn Write, meta: &Metadata, curve: &Curve) -> Result<()> {
    meta.write_csv_header(w)?;
    for (loc, weight) in curve.spikes() {
        writeln!(w, "# spike: x={loc} weight={weight}")?;
    }
    writeln!(w, "x,value")?;
    for (x, value) in curve.breakpoints().iter().zip(curve.values()) {
        writeln!(w, "{x},{value}")?;
    }
    Ok(())
}

/// Writes a consensus run: summary comments (depth, zones, estimate,
/// no-consensus flag) followed by one `id,status` row per measurement in
/// input order.
pub fn write_consensus_csv(
    w: &mut dyn Write,
    meta: &Metadata,
    measurements: &[Measurement],
    result: &ConsensusResult,
    classification: &Classification,
) -> Result<()> {
    meta.write_csv_header(w)?;
    writeln!(w, "# depth: {}", result.depth)?;
    for zone in &result.zones {
        writeln!(w, "# zone: {zone}")?;
    }
    let estimate = result
        .point_estimate
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    writeln!(w, "# estimate: {estimate}")?;
    writeln!(w, "# no_consensus: {}", classification.no_consensus)?;
    writeln!(w, "id,status")?;
    for m in measurements {
        let status = if classification.erroneous.iter().any(|id| id == m.id()) {
            "outlier"
        } else {
            "member"
        };
        writeln!(w, "{},{status}", csv_field(m.id()))?;
    }
    Ok(())
}

/// Writes an estimator comparison: header `estimator,before,after,deviation`,
/// one block per variable introduced by a `# variable:` comment.
pub fn write_report_csv(w: &mut dyn Write, meta: &Metadata, report: &EstimatorReport) -> Result<()> {
    meta.write_csv_header(w)?;
    writeln!(w, "estimator,before,after,deviation")?;
    for variable in &report.variables {
        writeln!(w, "# variable: {}", variable.variable)?;
        for row in &variable.rows {
            writeln!(
                w,
                "{},{},{},{}",
                csv_field(&row.estimator),
                row.before,
                row.after,
                row.deviation
            )?;
        }
        for warning in &variable.warnings {
            writeln!(w, "# warning: {warning}")?;
        }
    }
    Ok(())
}

/// Writes respondent verdicts: `respondent,fraction,flagged`.
pub fn write_verdicts_csv(
    w: &mut dyn Write,
    meta: &Metadata,
    verdicts: &[RespondentVerdict],
) -> Result<()> {
    meta.write_csv_header(w)?;
    writeln!(w, "respondent,fraction,flagged")?;
    for v in verdicts {
        writeln!(
            w,
            "{},{},{}",
            csv_field(&v.respondent),
            v.out_of_consensus_fraction,
            v.flagged
        )?;
    }
    Ok(())
}

/// Writes the per-question consensus summary of a survey analysis, one row
/// per question and stage (before/after removal of flagged respondents).
pub fn write_survey_summary_csv(
    w: &mut dyn Write,
    meta: &Metadata,
    analysis: &SurveyAnalysis,
) -> Result<()> {
    meta.write_csv_header(w)?;
    writeln!(w, "question,stage,depth,zones,estimate,no_consensus")?;
    for (stage, questions) in [("before", &analysis.before), ("after", &analysis.after)] {
        for q in questions {
            match &q.result {
                Some(r) => {
                    let zones = r
                        .zones
                        .iter()
                        .map(|z| z.to_string())
                        .collect::<Vec<_>>()
                        .join("; ");
                    writeln!(
                        w,
                        "{},{stage},{},{},{},{}",
                        csv_field(&q.question),
                        r.depth,
                        csv_field(&zones),
                        r.point_estimate[0],
                        q.no_consensus
                    )?;
                }
                None => writeln!(w, "{},{stage},,,,true", csv_field(&q.question))?,
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consensus::{classify, consensus_crisp, DEFAULT_MIN_DEPTH};
    use crate::curve::build_curve;

    fn meta() -> Metadata {
        Metadata::new("test").flag("error", 0.2)
    }

    #[test]
    fn values_roundtrip() {
        let mut buf = Vec::new();
        write_values_csv(&mut buf, &meta(), &[1.5, -2.0, 0.25]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!("# {TOOL_NAME} {TOOL_VERSION}\n")));
        assert!(text.contains("# subcommand: test\n"));
        assert!(text.contains("# flags: --error 0.2\n"));
        assert!(text.contains("# seed: -\n"));
        let back = read_values_csv(buf.as_slice()).unwrap();
        assert_eq!(back, vec![1.5, -2.0, 0.25]);
    }

    #[test]
    fn values_rejects_bad_header_and_bad_cell() {
        assert!(matches!(
            read_values_csv("y\n1\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_values_csv("x\n1\nnope\n".as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(read_values_csv("".as_bytes()).is_err());
    }

    #[test]
    fn measurements_1d_with_default_error() {
        let csv = "id,x\nS1,1.9\nS2,2\n";
        let ms = read_measurements_csv(csv.as_bytes(), Some(0.2)).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].id(), "S1");
        assert_eq!(ms[0].value(0), 1.9);
        assert_eq!(ms[0].error(0), 0.2);
        assert!(read_measurements_csv(csv.as_bytes(), None).is_err());
    }

    #[test]
    fn measurements_blank_error_cell_falls_back() {
        let csv = "id,x,e_x\nS1,1.9,0.5\nS2,2,\n";
        let ms = read_measurements_csv(csv.as_bytes(), Some(0.2)).unwrap();
        assert_eq!(ms[0].error(0), 0.5);
        assert_eq!(ms[1].error(0), 0.2);
    }

    #[test]
    fn measurements_2d_and_header_check() {
        let csv = "id,x,y,e_x,e_y\nS1,1.9,0.9,0.2,0.2\n";
        let ms = read_measurements_csv(csv.as_bytes(), None).unwrap();
        assert_eq!(ms[0].dim(), 2);
        assert_eq!(ms[0].value(1), 0.9);
        assert!(matches!(
            read_measurements_csv("id,value\nS1,2\n".as_bytes(), None),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn measurements_3d() {
        let csv = "id,x,y,z\nm1,1,2,3\n";
        let ms = read_measurements_csv(csv.as_bytes(), Some(0.5)).unwrap();
        assert_eq!(ms[0].dim(), 3);
        assert_eq!(ms[0].value(2), 3.0);
        assert_eq!(ms[0].error(2), 0.5);
    }

    #[test]
    fn timeseries_roundtrip_and_header() {
        let pts = read_timeseries_csv("t,count\n0,12\n1,0\n2,7.5\n".as_bytes()).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[2].count, 7.5);
        assert!(read_timeseries_csv("month,count\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn survey_parse_good_and_bad() {
        let table =
            read_survey_csv("respondent,q1,q2\nr1,3,4\nr2,,7\n".as_bytes(), 1, 7).unwrap();
        assert_eq!(table.respondents(), ["r1", "r2"]);
        assert_eq!(table.grade(1, 0), None);
        assert_eq!(table.grade(1, 1), Some(7));

        let err = read_survey_csv("respondent,q1\nr1,9\n".as_bytes(), 1, 7).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("r1") && msg.contains("q1"), "{msg}");

        assert!(matches!(
            read_survey_csv("respondent,q1\nr1,3.5\n".as_bytes(), 1, 7),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn curve_csv_lists_breakpoints_and_spikes() {
        let ms = vec![
            Measurement::scalar("a", 1.0, 0.5).unwrap(),
            Measurement::scalar("b", 2.0, 0.0).unwrap(),
        ];
        let curve = build_curve(&ms).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &meta(), &curve).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# spike: x=2 weight=1\n"));
        assert!(text.contains("x,value\n"));
        assert!(text.contains("0.5,1\n"), "{text}");
    }

    #[test]
    fn consensus_csv_statuses_and_summary() {
        let ms = vec![
            Measurement::scalar("S1", 1.9, 0.2).unwrap(),
            Measurement::scalar("S2", 2.0, 0.2).unwrap(),
            Measurement::scalar("far away", 9.0, 0.2).unwrap(),
        ];
        let result = consensus_crisp(&ms).unwrap();
        let classification = classify(&ms, &result, DEFAULT_MIN_DEPTH);
        let mut buf = Vec::new();
        write_consensus_csv(&mut buf, &meta(), &ms, &result, &classification).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# depth: 2\n"));
        assert!(text.contains("# no_consensus: false\n"));
        assert!(text.contains("S1,member\n"));
        assert!(text.contains("far away,outlier\n"));
    }

    #[test]
    fn deterministic_bytes() {
        let ms = vec![
            Measurement::scalar("a", 1.0, 0.5).unwrap(),
            Measurement::scalar("b", 1.3, 0.5).unwrap(),
        ];
        let curve = build_curve(&ms).unwrap();
        let mut one = Vec::new();
        let mut two = Vec::new();
        write_curve_csv(&mut one, &meta(), &curve).unwrap();
        write_curve_csv(&mut two, &meta(), &curve).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn quoting_fields_with_commas() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
