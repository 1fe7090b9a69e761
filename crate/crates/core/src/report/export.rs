use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{ErrorTrace, Importance, TraceStep, Triage};
use crate::config::OutputFormat;
use crate::frontend::SourceLocation;

/// Renders traces in the requested format. JSON keys are sorted and the
/// output is pretty-printed with a trailing newline.
pub fn export(traces: &[ErrorTrace], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(traces),
        OutputFormat::Xml => to_xml(traces),
        OutputFormat::Console => to_console(traces),
    }
}

fn to_json(traces: &[ErrorTrace]) -> String {
    let doc: Vec<Value> = traces
        .iter()
        .map(|t| {
            json!({
                "id": t.id,
                "checker": t.checker,
                "importance": t.importance.as_str(),
                "message": t.message,
                "triage": t.triage.as_str(),
                "steps": t.steps.iter().map(|s| json!({
                    "file": &*s.location.file,
                    "line": s.location.line,
                    "column": s.location.column,
                    "description": s.description,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&doc).expect("values always serialize");
    out.push('\n');
    out
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed report: {0}")]
    Shape(String),
}

/// Reads back the output of JSON export.
pub fn parse_json(text: &str) -> Result<Vec<ErrorTrace>, ParseError> {
    let doc: Value = serde_json::from_str(text)?;
    let shape = |what: &str| ParseError::Shape(what.to_string());
    let items = doc.as_array().ok_or_else(|| shape("expected an array"))?;
    let str_field = |v: &Value, k: &str| -> Result<String, ParseError> {
        v.get(k)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| shape(&format!("missing string field `{k}`")))
    };
    let num_field = |v: &Value, k: &str| -> Result<u32, ParseError> {
        v.get(k)
            .and_then(Value::as_u64)
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| shape(&format!("missing number field `{k}`")))
    };
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let importance = match str_field(item, "importance")?.as_str() {
            "warning" => Importance::Warning,
            "error" => Importance::Error,
            other => return Err(shape(&format!("unknown importance `{other}`"))),
        };
        let triage: Triage = str_field(item, "triage")?
            .parse()
            .map_err(|e: super::UnknownStatus| shape(&e.to_string()))?;
        let mut steps = Vec::new();
        for s in item
            .get("steps")
            .and_then(Value::as_array)
            .ok_or_else(|| shape("missing steps"))?
        {
            steps.push(TraceStep::new(
                SourceLocation::new(str_field(s, "file")?, num_field(s, "line")?, num_field(s, "column")?),
                str_field(s, "description")?,
            ));
        }
        if steps.is_empty() {
            return Err(shape("trace without steps"));
        }
        out.push(ErrorTrace {
            id: str_field(item, "id")?,
            checker: str_field(item, "checker")?,
            importance,
            message: str_field(item, "message")?,
            steps,
            triage,
        });
    }
    Ok(out)
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn to_xml(traces: &[ErrorTrace]) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<errors version=\"1\">\n");
    for t in traces {
        let _ = writeln!(
            out,
            "  <error checker=\"{}\" importance=\"{}\" id=\"{}\" triage=\"{}\">",
            escape_xml(&t.checker),
            t.importance,
            t.id,
            t.triage
        );
        let _ = writeln!(out, "    <msg>{}</msg>", escape_xml(&t.message));
        for s in &t.steps {
            let _ = writeln!(
                out,
                "    <step file=\"{}\" line=\"{}\" col=\"{}\">{}</step>",
                escape_xml(&s.location.file),
                s.location.line,
                s.location.column,
                escape_xml(&s.description)
            );
        }
        out.push_str("  </error>\n");
    }
    out.push_str("</errors>\n");
    out
}

fn to_console(traces: &[ErrorTrace]) -> String {
    let mut out = String::new();
    for t in traces {
        let l = t.location();
        let _ = writeln!(
            out,
            "{} [{}] {} ({}:{})",
            t.importance.as_str().to_uppercase(),
            t.checker,
            t.message,
            l.file,
            l.line
        );
        let _ = writeln!(out, "  id {} ({})", t.id, t.triage);
        for s in &t.steps {
            let _ = writeln!(out, "    {}: {}", s.location, s.description);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ErrorTrace> {
        let mut t = ErrorTrace::new(
            "automaton",
            Importance::Error,
            "lock &m held at exit",
            vec![
                TraceStep::new(SourceLocation::new("a.c", 2, 5), "lock: U -> L"),
                TraceStep::new(SourceLocation::new("a.c", 4, 1), "exit in state L <&>"),
            ],
        );
        t.triage = Triage::FalsePositive;
        let w = ErrorTrace::new(
            "reach",
            Importance::Warning,
            "superfluous semicolon",
            vec![TraceStep::new(SourceLocation::new("b.c", 1, 9), ";")],
        );
        vec![t, w]
    }

    #[test]
    fn empty_exports() {
        assert_eq!(export(&[], OutputFormat::Json), "[]\n");
        assert_eq!(export(&[], OutputFormat::Console), "");
        assert!(export(&[], OutputFormat::Xml).contains("<errors version=\"1\">\n</errors>"));
    }

    #[test]
    fn console_header() {
        let text = export(&sample(), OutputFormat::Console);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "ERROR [automaton] lock &m held at exit (a.c:4)");
        assert!(lines.next().unwrap().starts_with("  id "));
        assert_eq!(lines.next().unwrap(), "    a.c:2:5: lock: U -> L");
        assert!(text.contains("WARNING [reach] superfluous semicolon (b.c:1)"));
    }

    #[test]
    fn json_round_trip() {
        let traces = sample();
        let text = export(&traces, OutputFormat::Json);
        assert_eq!(parse_json(&text).unwrap(), traces);
        let first = text.find("\"checker\"").unwrap();
        let id = text.find("\"id\"").unwrap();
        assert!(first < id, "keys are sorted");
    }

    #[test]
    fn xml_escapes() {
        let text = export(&sample(), OutputFormat::Xml);
        assert!(text.contains("<msg>lock &amp;m held at exit</msg>"));
        assert!(text.contains("exit in state L &lt;&amp;&gt;</step>"));
        assert!(text.contains("triage=\"false-positive\""));
        assert_eq!(text.matches("<error ").count(), 2);
        assert_eq!(text.matches("<step ").count(), 3);
    }

    #[test]
    fn malformed_json() {
        assert!(parse_json("{}").is_err());
        assert!(parse_json(r#"[{"id":"x"}]"#).is_err());
        assert!(parse_json("not json").is_err());
    }
}
