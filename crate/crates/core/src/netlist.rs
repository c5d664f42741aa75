//! Line-oriented netlist describing the photonic circuit.
//!
//! ```text
//! # sqzsim netlist v1
//! modes: sig
//! squeezer sig pump_mw=40 gain=0.070956 eta=0.87976
//! loss sig eta=0.85777 label=fresnel
//! homodyne sig eta_pd=0.88 eta_e=0.94752 ratio=0.5 sweep=0:6.283185307179586:400
//! ```
//!
//! One statement per line, `#` starts a comment, tokens are separated by
//! whitespace and parameters are written `key=value`. Statements:
//!
//! * `modes: <name>...` declares the optical modes, once, before anything else.
//! * `squeezer <mode> (r=<r> | pump_mw=<mW> gain=<g>) [phase=<rad>] [eta=<e>]`;
//!   `eta` is the efficiency of the generation stage itself (default 1).
//! * `phaseshift <mode> theta=<rad>`
//! * `coupler <mode> <mode> ratio=<R>`
//! * `loss <mode> eta=<e> [label=<name>]`
//! * `homodyne <mode> eta_pd=<e> eta_e=<e> ratio=<R> sweep=<a>:<b>:<n>
//!   [visibility=<v>] [center=<Hz>] [rbw=<Hz>] [vbw=<Hz>] [sweep_time=<s>]`,
//!   exactly once and last. The sweep takes `n` phases from `a` (included) to
//!   `b` (excluded).

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::budget::BudgetFactor;
use crate::error::{invalid, Result};
use crate::gaussian::{GaussianChannel, GaussianState};
use crate::homodyne::{
    effective_efficiency, HomodyneConfig, PhaseSweep, DEFAULT_CENTER_FREQ_HZ, DEFAULT_RBW_HZ,
    DEFAULT_SWEEP_TIME_S, DEFAULT_VBW_HZ,
};

pub const VERSION_HEADER: &str = "# sqzsim netlist v1";
pub const ANONYMOUS_LABEL: &str = "anonymous";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SqueezerDrive {
    Direct { r: f64 },
    Pumped { pump_mw: f64, gain: f64 },
}

impl SqueezerDrive {
    /// Squeezing parameter; a pumped squeezer follows `r = gain sqrt(P)`.
    pub fn r(&self) -> f64 {
        match *self {
            SqueezerDrive::Direct { r } => r,
            SqueezerDrive::Pumped { pump_mw, gain } => gain * libm::sqrt(pump_mw),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Squeezer {
        mode: String,
        drive: SqueezerDrive,
        phase: f64,
        eta: f64,
    },
    PhaseShift {
        mode: String,
        theta: f64,
    },
    Coupler {
        mode_a: String,
        mode_b: String,
        ratio: f64,
    },
    Loss {
        mode: String,
        eta: f64,
        label: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub mode: String,
    pub eta_pd: f64,
    pub eta_e: f64,
    pub ratio: f64,
    pub visibility: f64,
    pub sweep: PhaseSweep,
    pub center_freq_hz: f64,
    pub rbw_hz: f64,
    pub vbw_hz: f64,
    pub sweep_time_s: f64,
}

impl Measurement {
    pub fn config(&self) -> HomodyneConfig {
        HomodyneConfig {
            eta_pd: self.eta_pd,
            eta_e: self.eta_e,
            coupler_ratio: self.ratio,
            visibility: self.visibility,
            center_freq_hz: self.center_freq_hz,
            rbw_hz: self.rbw_hz,
            vbw_hz: self.vbw_hz,
            sweep_time_s: self.sweep_time_s,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    pub modes: Vec<String>,
    pub statements: Vec<Statement>,
    pub measurement: Measurement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownKeyword,
    UndeclaredMode,
    BadNumber,
    OutOfRange,
    DuplicateMeasurement,
    MissingMeasurement,
    /// Malformed statement structure: missing or repeated parameters,
    /// bad identifiers, statements after the measurement, invalid UTF-8.
    Syntax,
}

impl ParseErrorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParseErrorKind::UnknownKeyword => "unknown-keyword",
            ParseErrorKind::UndeclaredMode => "undeclared-mode",
            ParseErrorKind::BadNumber => "bad-number",
            ParseErrorKind::OutOfRange => "out-of-range",
            ParseErrorKind::DuplicateMeasurement => "duplicate-measurement",
            ParseErrorKind::MissingMeasurement => "missing-measurement",
            ParseErrorKind::Syntax => "syntax",
        }
    }
}

/// First problem found in a netlist; `line` and `column` are 1-based and
/// point at the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.line,
            self.column,
            self.kind.as_str(),
            self.message
        )
    }
}

impl core::error::Error for ParseError {}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, ch) in code
        .char_indices()
        .chain(core::iter::once((code.len(), ' ')))
    {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &code[s..idx],
                    column: code[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    tokens
}

fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Decimal float with optional sign, fraction and exponent.
fn is_decimal(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut i = 0;
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == bytes.len()
}

struct Param<'a> {
    key: &'a str,
    value: &'a str,
    column: usize,
    value_column: usize,
}

struct LineParser<'a> {
    line: usize,
    keyword: Token<'a>,
    positional: Vec<Token<'a>>,
    params: Vec<Param<'a>>,
}

impl<'a> LineParser<'a> {
    fn err(&self, column: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            kind,
            message: message.into(),
        }
    }

    fn new(
        line: usize,
        tokens: &[Token<'a>],
        allowed: &[&str],
    ) -> core::result::Result<Self, ParseError> {
        let keyword = tokens[0];
        let mut parser = Self {
            line,
            keyword,
            positional: Vec::new(),
            params: Vec::new(),
        };
        for tok in &tokens[1..] {
            match tok.text.split_once('=') {
                Some((key, value)) => {
                    if !allowed.contains(&key) {
                        return Err(parser.err(
                            tok.column,
                            ParseErrorKind::UnknownKeyword,
                            format!("unknown parameter `{key}` for `{}`", keyword.text),
                        ));
                    }
                    if parser.params.iter().any(|p| p.key == key) {
                        return Err(parser.err(
                            tok.column,
                            ParseErrorKind::Syntax,
                            format!("parameter `{key}` given twice"),
                        ));
                    }
                    let value_column = tok.column + key.chars().count() + 1;
                    parser.params.push(Param {
                        key,
                        value,
                        column: tok.column,
                        value_column,
                    });
                }
                None => {
                    if !parser.params.is_empty() {
                        return Err(parser.err(
                            tok.column,
                            ParseErrorKind::Syntax,
                            format!("unexpected token `{}` after parameters", tok.text),
                        ));
                    }
                    parser.positional.push(*tok);
                }
            }
        }
        Ok(parser)
    }

    fn expect_positional(&self, count: usize) -> core::result::Result<(), ParseError> {
        if self.positional.len() != count {
            let column = self
                .positional
                .get(count)
                .map_or(self.keyword.column, |t| t.column);
            return Err(self.err(
                column,
                ParseErrorKind::Syntax,
                format!(
                    "`{}` takes {count} mode name(s), got {}",
                    self.keyword.text,
                    self.positional.len()
                ),
            ));
        }
        for tok in &self.positional {
            if !is_identifier(tok.text) {
                return Err(self.err(
                    tok.column,
                    ParseErrorKind::Syntax,
                    format!("`{}` is not a valid mode name", tok.text),
                ));
            }
        }
        Ok(())
    }

    fn find(&self, key: &str) -> Option<&Param<'a>> {
        self.params.iter().find(|p| p.key == key)
    }

    fn number_at(&self, p: &Param<'a>) -> core::result::Result<f64, ParseError> {
        if !is_decimal(p.value) {
            return Err(self.err(
                p.value_column,
                ParseErrorKind::BadNumber,
                format!("`{}` is not a decimal number", p.value),
            ));
        }
        let value: f64 = p.value.parse().map_err(|_| {
            self.err(
                p.value_column,
                ParseErrorKind::BadNumber,
                format!("cannot parse `{}`", p.value),
            )
        })?;
        if !value.is_finite() {
            return Err(self.err(
                p.value_column,
                ParseErrorKind::OutOfRange,
                format!("`{}` overflows a double", p.value),
            ));
        }
        Ok(value)
    }

    fn optional(
        &self,
        key: &str,
        check: impl Fn(f64) -> bool,
        range: &str,
    ) -> core::result::Result<Option<f64>, ParseError> {
        let Some(p) = self.find(key) else {
            return Ok(None);
        };
        let value = self.number_at(p)?;
        if !check(value) {
            return Err(self.err(
                p.value_column,
                ParseErrorKind::OutOfRange,
                format!("{key} = {value} must be {range}"),
            ));
        }
        Ok(Some(value))
    }

    fn required(
        &self,
        key: &str,
        check: impl Fn(f64) -> bool,
        range: &str,
    ) -> core::result::Result<f64, ParseError> {
        self.optional(key, check, range)?.ok_or_else(|| {
            self.err(
                self.keyword.column,
                ParseErrorKind::Syntax,
                format!("`{}` requires `{key}=`", self.keyword.text),
            )
        })
    }
}

fn unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

fn non_negative(v: f64) -> bool {
    v >= 0.0
}

fn positive(v: f64) -> bool {
    v > 0.0
}

fn any(_: f64) -> bool {
    true
}

const UNIT: &str = "in [0, 1]";

fn parse_sweep(lp: &LineParser<'_>) -> core::result::Result<PhaseSweep, ParseError> {
    let p = lp.find("sweep").ok_or_else(|| {
        lp.err(
            lp.keyword.column,
            ParseErrorKind::Syntax,
            "`homodyne` requires `sweep=a:b:n`",
        )
    })?;
    let parts: Vec<&str> = p.value.split(':').collect();
    if parts.len() != 3 {
        return Err(lp.err(
            p.value_column,
            ParseErrorKind::Syntax,
            "sweep must be written a:b:n",
        ));
    }
    let mut offset = p.value_column;
    let mut bounds = [0.0; 2];
    for (i, part) in parts[..2].iter().enumerate() {
        let param = Param {
            key: "sweep",
            value: part,
            column: p.column,
            value_column: offset,
        };
        bounds[i] = lp.number_at(&param)?;
        offset += part.chars().count() + 1;
    }
    let count = parts[2];
    if count.is_empty() || !count.bytes().all(|b| b.is_ascii_digit()) {
        return Err(lp.err(
            offset,
            ParseErrorKind::BadNumber,
            format!("`{count}` is not a point count"),
        ));
    }
    let points: usize = count.parse().map_err(|_| {
        lp.err(
            offset,
            ParseErrorKind::OutOfRange,
            format!("point count `{count}` is too large"),
        )
    })?;
    if points < 2 {
        return Err(lp.err(
            offset,
            ParseErrorKind::OutOfRange,
            "a sweep needs at least 2 points",
        ));
    }
    Ok(PhaseSweep {
        start: bounds[0],
        stop: bounds[1],
        points,
    })
}

enum Parsed {
    Statement(Statement, Vec<(String, usize)>),
    Measurement(Measurement, Vec<(String, usize)>),
}

fn parse_statement(lp: &LineParser<'_>) -> core::result::Result<Parsed, ParseError> {
    let mode_refs = |lp: &LineParser<'_>| -> Vec<(String, usize)> {
        lp.positional
            .iter()
            .map(|t| (t.text.to_owned(), t.column))
            .collect()
    };
    let first = |lp: &LineParser<'_>| lp.positional[0].text.to_owned();
    match lp.keyword.text {
        "squeezer" => {
            lp.expect_positional(1)?;
            // values are validated left to right before structure checks
            for p in &lp.params {
                match p.key {
                    "r" | "pump_mw" | "gain" => {
                        lp.optional(p.key, non_negative, ">= 0")?;
                    }
                    "eta" => {
                        lp.optional("eta", unit, UNIT)?;
                    }
                    _ => {
                        lp.optional(p.key, any, "finite")?;
                    }
                }
            }
            let r = lp.optional("r", non_negative, ">= 0")?;
            let pump = lp.optional("pump_mw", non_negative, ">= 0")?;
            let gain = lp.optional("gain", non_negative, ">= 0")?;
            let drive = match (r, pump, gain) {
                (Some(r), None, None) => SqueezerDrive::Direct { r },
                (None, Some(pump_mw), Some(gain)) => SqueezerDrive::Pumped { pump_mw, gain },
                _ => {
                    return Err(lp.err(
                        lp.keyword.column,
                        ParseErrorKind::Syntax,
                        "squeezer needs either `r=` or both `pump_mw=` and `gain=`",
                    ))
                }
            };
            let phase = lp.optional("phase", any, "finite")?.unwrap_or(0.0);
            let eta = lp.optional("eta", unit, UNIT)?.unwrap_or(1.0);
            Ok(Parsed::Statement(
                Statement::Squeezer {
                    mode: first(lp),
                    drive,
                    phase,
                    eta,
                },
                mode_refs(lp),
            ))
        }
        "phaseshift" => {
            lp.expect_positional(1)?;
            let theta = lp.required("theta", any, "finite")?;
            Ok(Parsed::Statement(
                Statement::PhaseShift {
                    mode: first(lp),
                    theta,
                },
                mode_refs(lp),
            ))
        }
        "coupler" => {
            lp.expect_positional(2)?;
            let ratio = lp.required("ratio", unit, UNIT)?;
            let (a, b) = (lp.positional[0], lp.positional[1]);
            if a.text == b.text {
                return Err(lp.err(
                    b.column,
                    ParseErrorKind::Syntax,
                    "coupler needs two distinct modes",
                ));
            }
            Ok(Parsed::Statement(
                Statement::Coupler {
                    mode_a: a.text.to_owned(),
                    mode_b: b.text.to_owned(),
                    ratio,
                },
                mode_refs(lp),
            ))
        }
        "loss" => {
            lp.expect_positional(1)?;
            let eta = lp.required("eta", unit, UNIT)?;
            let label = match lp.find("label") {
                Some(p) if !is_identifier(p.value) => {
                    return Err(lp.err(
                        p.value_column,
                        ParseErrorKind::Syntax,
                        format!("`{}` is not a valid label", p.value),
                    ))
                }
                Some(p) => Some(p.value.to_owned()),
                None => None,
            };
            Ok(Parsed::Statement(
                Statement::Loss {
                    mode: first(lp),
                    eta,
                    label,
                },
                mode_refs(lp),
            ))
        }
        "homodyne" => {
            lp.expect_positional(1)?;
            for p in &lp.params {
                match p.key {
                    "sweep" => {
                        parse_sweep(lp)?;
                    }
                    "center" => {
                        lp.optional("center", non_negative, ">= 0")?;
                    }
                    "rbw" | "vbw" | "sweep_time" => {
                        lp.optional(p.key, positive, "> 0")?;
                    }
                    key => {
                        lp.optional(key, unit, UNIT)?;
                    }
                }
            }
            let eta_pd = lp.required("eta_pd", unit, UNIT)?;
            let eta_e = lp.required("eta_e", unit, UNIT)?;
            let ratio = lp.required("ratio", unit, UNIT)?;
            let sweep = parse_sweep(lp)?;
            let visibility = lp.optional("visibility", unit, UNIT)?.unwrap_or(1.0);
            let center_freq_hz = lp
                .optional("center", non_negative, ">= 0")?
                .unwrap_or(DEFAULT_CENTER_FREQ_HZ);
            let rbw_hz = lp
                .optional("rbw", positive, "> 0")?
                .unwrap_or(DEFAULT_RBW_HZ);
            let vbw_hz = lp
                .optional("vbw", positive, "> 0")?
                .unwrap_or(DEFAULT_VBW_HZ);
            let sweep_time_s = lp
                .optional("sweep_time", positive, "> 0")?
                .unwrap_or(DEFAULT_SWEEP_TIME_S);
            if vbw_hz > rbw_hz {
                let column = lp
                    .find("vbw")
                    .or(lp.find("rbw"))
                    .map_or(lp.keyword.column, |p| p.value_column);
                return Err(lp.err(
                    column,
                    ParseErrorKind::OutOfRange,
                    format!("vbw = {vbw_hz} Hz exceeds rbw = {rbw_hz} Hz"),
                ));
            }
            Ok(Parsed::Measurement(
                Measurement {
                    mode: first(lp),
                    eta_pd,
                    eta_e,
                    ratio,
                    visibility,
                    sweep,
                    center_freq_hz,
                    rbw_hz,
                    vbw_hz,
                    sweep_time_s,
                },
                mode_refs(lp),
            ))
        }
        other => Err(lp.err(
            lp.keyword.column,
            ParseErrorKind::UnknownKeyword,
            format!("unknown statement `{other}`"),
        )),
    }
}

fn allowed_keys(keyword: &str) -> &'static [&'static str] {
    match keyword {
        "squeezer" => &["r", "pump_mw", "gain", "phase", "eta"],
        "phaseshift" => &["theta"],
        "coupler" => &["ratio"],
        "loss" => &["eta", "label"],
        "homodyne" => &[
            "eta_pd",
            "eta_e",
            "ratio",
            "sweep",
            "visibility",
            "center",
            "rbw",
            "vbw",
            "sweep_time",
        ],
        _ => &[],
    }
}

/// Parses a netlist, reporting the first error with its position.
pub fn parse(source: &str) -> core::result::Result<CircuitSpec, ParseError> {
    let mut modes: Option<Vec<String>> = None;
    let mut statements = Vec::new();
    let mut measurement: Option<Measurement> = None;
    let mut last_line = 0;

    for (idx, raw_line) in source.split('\n').enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        let tokens = tokenize(line);
        let Some(head) = tokens.first() else { continue };
        let err = |column: usize, kind: ParseErrorKind, message: String| ParseError {
            line: line_no,
            column,
            kind,
            message,
        };

        if let Some(rest) = head.text.strip_prefix("modes:") {
            if modes.is_some() {
                return Err(err(
                    head.column,
                    ParseErrorKind::Syntax,
                    "modes declared twice".into(),
                ));
            }
            if !statements.is_empty() || measurement.is_some() {
                return Err(err(
                    head.column,
                    ParseErrorKind::Syntax,
                    "modes must be declared before any statement".into(),
                ));
            }
            let mut names: Vec<String> = Vec::new();
            let first = (!rest.is_empty()).then(|| Token {
                text: rest,
                column: head.column + 6,
            });
            for tok in first.into_iter().chain(tokens[1..].iter().copied()) {
                if !is_identifier(tok.text) {
                    return Err(err(
                        tok.column,
                        ParseErrorKind::Syntax,
                        format!("`{}` is not a valid mode name", tok.text),
                    ));
                }
                if names.iter().any(|n| n == tok.text) {
                    return Err(err(
                        tok.column,
                        ParseErrorKind::Syntax,
                        format!("mode `{}` declared twice", tok.text),
                    ));
                }
                names.push(tok.text.to_owned());
            }
            if names.is_empty() {
                return Err(err(
                    head.column,
                    ParseErrorKind::Syntax,
                    "no modes declared".into(),
                ));
            }
            modes = Some(names);
            continue;
        }

        let allowed = allowed_keys(head.text);
        if allowed.is_empty() {
            return Err(err(
                head.column,
                ParseErrorKind::UnknownKeyword,
                format!("unknown statement `{}`", head.text),
            ));
        }
        if measurement.is_some() {
            let kind = if head.text == "homodyne" {
                ParseErrorKind::DuplicateMeasurement
            } else {
                ParseErrorKind::Syntax
            };
            let message = if head.text == "homodyne" {
                "only one homodyne measurement is allowed".to_string()
            } else {
                "the homodyne measurement must be the last statement".to_string()
            };
            return Err(err(head.column, kind, message));
        }

        let lp = LineParser::new(line_no, &tokens, allowed)?;
        let parsed = parse_statement(&lp)?;
        let refs = match &parsed {
            Parsed::Statement(_, refs) | Parsed::Measurement(_, refs) => refs,
        };
        for (name, column) in refs {
            let declared = modes.as_ref().is_some_and(|m| m.iter().any(|d| d == name));
            if !declared {
                return Err(err(
                    *column,
                    ParseErrorKind::UndeclaredMode,
                    format!("mode `{name}` is not declared"),
                ));
            }
        }
        match parsed {
            Parsed::Statement(s, _) => statements.push(s),
            Parsed::Measurement(m, _) => measurement = Some(m),
        }
    }

    let Some(measurement) = measurement else {
        return Err(ParseError {
            line: last_line.max(1),
            column: 1,
            kind: ParseErrorKind::MissingMeasurement,
            message: "no homodyne measurement statement".to_string(),
        });
    };
    Ok(CircuitSpec {
        modes: modes.expect("a measurement implies declared modes"),
        statements,
        measurement,
    })
}

/// Like [`parse`] but accepts arbitrary bytes; invalid UTF-8 is a positioned error.
pub fn parse_bytes(bytes: &[u8]) -> core::result::Result<CircuitSpec, ParseError> {
    match core::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            let prefix = core::str::from_utf8(&valid[line_start..]).unwrap_or("");
            Err(ParseError {
                line,
                column: prefix.chars().count() + 1,
                kind: ParseErrorKind::Syntax,
                message: "invalid UTF-8".to_string(),
            })
        }
    }
}

impl fmt::Display for SqueezerDrive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqueezerDrive::Direct { r } => write!(f, "r={r}"),
            SqueezerDrive::Pumped { pump_mw, gain } => write!(f, "pump_mw={pump_mw} gain={gain}"),
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Squeezer {
                mode,
                drive,
                phase,
                eta,
            } => {
                write!(f, "squeezer {mode} {drive} phase={phase} eta={eta}")
            }
            Statement::PhaseShift { mode, theta } => write!(f, "phaseshift {mode} theta={theta}"),
            Statement::Coupler {
                mode_a,
                mode_b,
                ratio,
            } => {
                write!(f, "coupler {mode_a} {mode_b} ratio={ratio}")
            }
            Statement::Loss { mode, eta, label } => {
                write!(f, "loss {mode} eta={eta}")?;
                if let Some(label) = label {
                    write!(f, " label={label}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "homodyne {} eta_pd={} eta_e={} ratio={} sweep={}:{}:{} visibility={} center={} rbw={} vbw={} sweep_time={}",
            self.mode,
            self.eta_pd,
            self.eta_e,
            self.ratio,
            self.sweep.start,
            self.sweep.stop,
            self.sweep.points,
            self.visibility,
            self.center_freq_hz,
            self.rbw_hz,
            self.vbw_hz,
            self.sweep_time_s
        )
    }
}

/// Canonical text form; parsing it yields the same spec.
impl fmt::Display for CircuitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{VERSION_HEADER}")?;
        writeln!(f, "modes: {}", self.modes.join(" "))?;
        for statement in &self.statements {
            writeln!(f, "{statement}")?;
        }
        writeln!(f, "{}", self.measurement)
    }
}

/// What the homodyne detector reads and which losses it is corrected for.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    pub mode: usize,
    pub config: HomodyneConfig,
    pub sweep: PhaseSweep,
    /// `loss` statements acting on the measured mode, in order.
    pub losses: Vec<BudgetFactor>,
    pub eta_hd: f64,
}

impl MeasurementPlan {
    /// Explicit losses on the measured mode followed by the detector factors.
    pub fn detection_budget(&self) -> Vec<BudgetFactor> {
        let r = self.config.coupler_ratio;
        let mut factors = self.losses.clone();
        factors.push(BudgetFactor::new("coupler_imbalance", 4.0 * r * (1.0 - r)));
        factors.push(BudgetFactor::new(
            "visibility",
            self.config.visibility * self.config.visibility,
        ));
        factors.push(BudgetFactor::new("photodiode", self.config.eta_pd));
        factors.push(BudgetFactor::new("electronics", self.config.eta_e));
        factors
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCircuit {
    pub n_modes: usize,
    pub channels: Vec<GaussianChannel>,
    pub plan: MeasurementPlan,
}

impl CompiledCircuit {
    /// State arriving at the homodyne detector, starting from vacuum on every mode.
    pub fn simulate(&self) -> Result<GaussianState> {
        self.channels
            .iter()
            .try_fold(GaussianState::vacuum(self.n_modes)?, |state, ch| {
                state.apply(ch)
            })
    }

    /// All channels composed into one.
    pub fn total_channel(&self) -> Result<GaussianChannel> {
        self.channels
            .iter()
            .try_fold(GaussianChannel::identity(self.n_modes), |acc, ch| {
                acc.then(ch)
            })
    }
}

/// Lowers a spec to Gaussian channels in statement order. A squeezer with
/// `eta < 1` becomes a squeezer channel followed by a loss channel.
pub fn compile(spec: &CircuitSpec) -> Result<CompiledCircuit> {
    let n = spec.modes.len();
    let index = |name: &str| {
        spec.modes
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| invalid(format!("mode `{name}` is not declared")))
    };
    let measured = index(&spec.measurement.mode)?;
    let mut channels = Vec::with_capacity(spec.statements.len());
    let mut losses = Vec::new();
    for statement in &spec.statements {
        match statement {
            Statement::Squeezer {
                mode,
                drive,
                phase,
                eta,
            } => {
                let m = index(mode)?;
                channels.push(GaussianChannel::squeezer(n, m, drive.r(), *phase)?);
                if *eta < 1.0 {
                    channels.push(GaussianChannel::loss(n, m, *eta)?);
                }
            }
            Statement::PhaseShift { mode, theta } => {
                channels.push(GaussianChannel::phase_shift(n, index(mode)?, *theta)?);
            }
            Statement::Coupler {
                mode_a,
                mode_b,
                ratio,
            } => {
                channels.push(GaussianChannel::coupler(
                    n,
                    index(mode_a)?,
                    index(mode_b)?,
                    *ratio,
                )?);
            }
            Statement::Loss { mode, eta, label } => {
                let m = index(mode)?;
                channels.push(GaussianChannel::loss(n, m, *eta)?);
                if m == measured {
                    let name = label.as_deref().unwrap_or(ANONYMOUS_LABEL);
                    losses.push(BudgetFactor::new(name, *eta));
                }
            }
        }
    }
    let config = spec.measurement.config();
    config.validate()?;
    spec.measurement.sweep.validate()?;
    let plan = MeasurementPlan {
        mode: measured,
        config,
        sweep: spec.measurement.sweep,
        losses,
        eta_hd: effective_efficiency(&config),
    };
    Ok(CompiledCircuit {
        n_modes: n,
        channels,
        plan,
    })
}
