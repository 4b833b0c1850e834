//! Trial traces and their line-delimited JSON encoding.
//!
//! The first line is a header carrying the format name, version and an echo
//! of the configuration. Each following line is either a tick record
//!
//! ```text
//! {"t":0.1,"robot":0,"x":15.57,"y":15.57,"heading":0.785398163,"mode":"GoalSeek","g":0,"grad_dir":null}
//! ```
//!
//! or an event record `{"t":..,"event":"Stuck","robot":..,"x":..,"y":..}`.
//! Acoustic runs append `"v1"`..`"v6"` and `"v_ave"` to tick records. All
//! reals are written with nine significant digits; records are quantized to
//! that precision when created, so decoding an encoded trace is lossless.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde_json::{Map, Value};

use crate::agent::Mode;
use crate::error::{Error, Result};
use crate::geom::Vec2;

pub const TRACE_FORMAT: &str = "bycoms-trace";
pub const TRACE_VERSION: u64 = 1;

/// Rounds to nine significant digits.
pub fn quantize(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

fn fmt_num(out: &mut String, v: f64) {
    if v.is_finite() {
        let _ = write!(out, "{}", quantize(v));
    } else {
        out.push_str("null");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Deployed,
    Stuck,
    Reached,
    Timeout,
    /// The last permitted robot got stuck.
    Exhausted,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Deployed => "Deployed",
            EventKind::Stuck => "Stuck",
            EventKind::Reached => "Reached",
            EventKind::Timeout => "Timeout",
            EventKind::Exhausted => "Exhausted",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "Deployed" => EventKind::Deployed,
            "Stuck" => EventKind::Stuck,
            "Reached" => EventKind::Reached,
            "Timeout" => EventKind::Timeout,
            "Exhausted" => EventKind::Exhausted,
            _ => return None,
        })
    }

    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            EventKind::Reached | EventKind::Timeout | EventKind::Exhausted
        )
    }
}

/// Microphone readings attached to acoustic tick records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicReadings {
    pub v: [f64; 6],
    pub v_ave: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub t: f64,
    pub robot: usize,
    pub position: Vec2,
    pub heading: f64,
    pub mode: Mode,
    pub g: f64,
    pub grad_dir: Option<f64>,
    pub mics: Option<MicReadings>,
}

impl TickRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        t: f64,
        robot: usize,
        position: Vec2,
        heading: f64,
        mode: Mode,
        g: f64,
        grad_dir: Option<f64>,
        mics: Option<MicReadings>,
    ) -> Self {
        Self {
            t: quantize(t),
            robot,
            position: Vec2::new(quantize(position.x), quantize(position.y)),
            heading: quantize(heading),
            mode,
            g: quantize(g),
            grad_dir: grad_dir.map(quantize),
            mics: mics.map(|m| MicReadings {
                v: m.v.map(quantize),
                v_ave: quantize(m.v_ave),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub t: f64,
    pub kind: EventKind,
    pub robot: usize,
    pub position: Vec2,
}

impl EventRecord {
    pub fn new(t: f64, kind: EventKind, robot: usize, position: Vec2) -> Self {
        Self {
            t: quantize(t),
            kind,
            robot,
            position: Vec2::new(quantize(position.x), quantize(position.y)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Tick(TickRecord),
    Event(EventRecord),
}

impl Record {
    pub fn time(&self) -> f64 {
        match self {
            Record::Tick(r) => r.t,
            Record::Event(e) => e.t,
        }
    }
}

/// Records of one run in the order they happened.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    /// Configuration echo written into the header.
    pub config: Value,
    pub records: Vec<Record>,
}

impl SimTrace {
    pub fn new(config: Value) -> Self {
        Self {
            config,
            records: Vec::new(),
        }
    }

    pub fn push_tick(&mut self, r: TickRecord) {
        self.records.push(Record::Tick(r));
    }

    pub fn push_event(&mut self, e: EventRecord) {
        self.records.push(Record::Event(e));
    }

    pub fn ticks(&self) -> impl Iterator<Item = &TickRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::Tick(t) => Some(t),
            Record::Event(_) => None,
        })
    }

    pub fn events(&self) -> impl Iterator<Item = &EventRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::Event(e) => Some(e),
            Record::Tick(_) => None,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = Map::new();
        header.insert("format".into(), Value::from(TRACE_FORMAT));
        header.insert("version".into(), Value::from(TRACE_VERSION));
        header.insert("config".into(), self.config.clone());
        writeln!(w, "{}", Value::Object(header))?;
        let mut line = String::with_capacity(160);
        for r in &self.records {
            line.clear();
            encode_record(&mut line, r);
            w.write_all(line.as_bytes())?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::read_from(bytes)
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let header = match lines.next() {
            Some((_, l)) => l?,
            None => return Err(Error::parse(1, "missing trace header")),
        };
        let header: Value = serde_json::from_str(&header)
            .map_err(|e| Error::parse(1, format!("invalid header: {e}")))?;
        if header.get("format").and_then(Value::as_str) != Some(TRACE_FORMAT) {
            return Err(Error::parse(1, "not a trace document"));
        }
        if header.get("version").and_then(Value::as_u64) != Some(TRACE_VERSION) {
            return Err(Error::parse(1, "unsupported trace version"));
        }
        let mut trace = SimTrace::new(header.get("config").cloned().unwrap_or(Value::Null));
        for (i, line) in lines {
            let n = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            trace
                .records
                .push(decode_record(&line).map_err(|m| Error::parse(n, m))?);
        }
        Ok(trace)
    }
}

fn push_key_num(out: &mut String, key: &str, v: f64) {
    let _ = write!(out, ",\"{key}\":");
    fmt_num(out, v);
}

fn encode_record(out: &mut String, r: &Record) {
    match r {
        Record::Tick(k) => {
            out.push_str("{\"t\":");
            fmt_num(out, k.t);
            let _ = write!(out, ",\"robot\":{}", k.robot);
            push_key_num(out, "x", k.position.x);
            push_key_num(out, "y", k.position.y);
            push_key_num(out, "heading", k.heading);
            let _ = write!(out, ",\"mode\":\"{}\"", k.mode.as_str());
            push_key_num(out, "g", k.g);
            match k.grad_dir {
                Some(d) => push_key_num(out, "grad_dir", d),
                None => out.push_str(",\"grad_dir\":null"),
            }
            if let Some(m) = &k.mics {
                for (i, v) in m.v.iter().enumerate() {
                    push_key_num(out, &format!("v{}", i + 1), *v);
                }
                push_key_num(out, "v_ave", m.v_ave);
            }
            out.push('}');
        }
        Record::Event(e) => {
            out.push_str("{\"t\":");
            fmt_num(out, e.t);
            let _ = write!(
                out,
                ",\"event\":\"{}\",\"robot\":{}",
                e.kind.as_str(),
                e.robot
            );
            push_key_num(out, "x", e.position.x);
            push_key_num(out, "y", e.position.y);
            out.push('}');
        }
    }
}

fn decode_record(line: &str) -> std::result::Result<Record, String> {
    let v: Value = serde_json::from_str(line).map_err(|e| format!("invalid record: {e}"))?;
    let obj = v.as_object().ok_or("record is not an object")?;
    let num = |k: &str| {
        obj.get(k)
            .and_then(Value::as_f64)
            .ok_or_else(|| format!("missing number '{k}'"))
    };
    let robot = obj
        .get("robot")
        .and_then(Value::as_u64)
        .ok_or("missing integer 'robot'")? as usize;
    let t = num("t")?;
    let position = Vec2::new(num("x")?, num("y")?);

    if let Some(kind) = obj.get("event") {
        let kind = kind
            .as_str()
            .and_then(EventKind::parse)
            .ok_or_else(|| format!("unknown event {kind}"))?;
        return Ok(Record::Event(EventRecord {
            t,
            kind,
            robot,
            position,
        }));
    }

    let mode = obj
        .get("mode")
        .and_then(Value::as_str)
        .and_then(Mode::parse)
        .ok_or("missing or unknown 'mode'")?;
    let grad_dir = match obj.get("grad_dir") {
        Some(Value::Null) => None,
        Some(d) => Some(d.as_f64().ok_or("invalid 'grad_dir'")?),
        None => return Err("missing 'grad_dir'".into()),
    };
    let mics = if obj.contains_key("v_ave") {
        let mut v = [0.0; 6];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = num(&format!("v{}", i + 1))?;
        }
        Some(MicReadings {
            v,
            v_ave: num("v_ave")?,
        })
    } else {
        None
    };
    Ok(Record::Tick(TickRecord {
        t,
        robot,
        position,
        heading: num("heading")?,
        mode,
        g: num("g")?,
        grad_dir,
        mics,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_keeps_nine_digits() {
        assert_eq!(quantize(0.1), 0.1);
        assert_eq!(quantize(1.987654321987), 1.98765432);
        assert_eq!(quantize(1.234567891234e-7), 1.23456789e-7);
        assert_eq!(quantize(-2.0), -2.0);
    }

    #[test]
    fn empty_trace_is_header_only() {
        let tr = SimTrace::new(serde_json::json!({"seed": 1}));
        let text = String::from_utf8(tr.to_bytes()).unwrap();
        assert_eq!(
            text,
            "{\"config\":{\"seed\":1},\"format\":\"bycoms-trace\",\"version\":1}\n"
        );
        assert_eq!(SimTrace::from_bytes(text.as_bytes()).unwrap(), tr);
    }

    #[test]
    fn tick_and_event_encoding() {
        let mut tr = SimTrace::new(Value::Null);
        tr.push_event(EventRecord::new(
            0.0,
            EventKind::Deployed,
            0,
            Vec2::new(15.5, 15.5),
        ));
        tr.push_tick(TickRecord::new(
            0.1,
            0,
            Vec2::new(15.5707106781, 15.5707106781),
            std::f64::consts::FRAC_PI_4,
            Mode::GoalSeek,
            0.0,
            None,
            None,
        ));
        let text = String::from_utf8(tr.to_bytes()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[1],
            r#"{"t":0,"event":"Deployed","robot":0,"x":15.5,"y":15.5}"#
        );
        assert_eq!(
            lines[2],
            r#"{"t":0.1,"robot":0,"x":15.5707107,"y":15.5707107,"heading":0.785398163,"mode":"GoalSeek","g":0,"grad_dir":null}"#
        );
        assert_eq!(SimTrace::from_bytes(text.as_bytes()).unwrap(), tr);
    }

    #[test]
    fn malformed_line_is_reported() {
        let text = "{\"format\":\"bycoms-trace\",\"version\":1,\"config\":null}\n\
                    {\"t\":0,\"event\":\"Deployed\",\"robot\":0,\"x\":1,\"y\":1}\n\
                    {\"t\":0.1,\"robot\":0}\n";
        match SimTrace::from_bytes(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            SimTrace::from_bytes(b"not json\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(SimTrace::from_bytes(b"").is_err());
    }
}
