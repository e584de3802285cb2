//! Line-oriented circuit description format.
//!
//! ```text
//! # comment
//! paths a b                 declare spatial paths (once, before any step)
//! photon <path> <H|V|D|A|L|R>
//! spdc <path> <path>        three-case double-pair emission source (4 photons)
//! bs <p1> <p2> <t> <r>      path beam splitter; <p>.<pol> operands give a single-mode splitter
//! pbs <p1> <p2> <HV|DA|LR>
//! rot <path> <radians>
//! wp <path> <radians>
//! phase <path>.<H|V> <radians>
//! herald_none <path> [eta]  no detection; number-resolving when eta is omitted
//! herald_click <path>.<pol> <eta>
//! pnr <path>.<pol> <n>
//! ```
//!
//! Numbers accept `pi/4`-style fractions of pi. Tokens are separated by
//! whitespace, and `#` starts a comment anywhere on a line.

use std::fmt;

use thiserror::Error;

use crate::circuits::{spdc_source, CircuitResult, Runner};
use crate::detection::{condition_click, condition_no_detection, condition_pnr, DetectorModel};
use crate::error::Result;
use crate::fock::{validate_path, ModeId, Pol, PureState, Register, MAX_MODES, MAX_PHOTONS, TOLERANCE};
use crate::grid::parse_number;
use crate::optics::{beam_splitter, mode_beam_splitter, pbs, phase, rotator, waveplate, PbsBasis, PolState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown statement {0:?}")]
    UnknownStatement(String),
    #[error("`{statement}` expects {expected}")]
    MissingArgument { statement: &'static str, expected: &'static str },
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("invalid number {0:?}")]
    InvalidNumber(String),
    #[error("invalid path label {0:?}")]
    InvalidPath(String),
    #[error("invalid mode {0:?}, expected <path>.<H|V>")]
    InvalidMode(String),
    #[error("invalid polarization {0:?}")]
    InvalidPolarization(String),
    #[error("invalid PBS basis {0:?}, expected HV, DA or LR")]
    InvalidBasis(String),
    #[error("path {0:?} is not declared")]
    UndeclaredPath(String),
    #[error("path {0:?} declared twice")]
    DuplicatePath(String),
    #[error("`paths` may appear only once, before any step")]
    MisplacedPaths,
    #[error("step before `paths` declaration")]
    MissingPaths,
    #[error("operands must be distinct, got {0:?} twice")]
    IdenticalOperands(String),
    #[error("bs operands must both be paths or both be modes")]
    MixedOperands,
    #[error("{0}")]
    OutOfRange(String),
    #[error("{photons} photons exceed the cap of {MAX_PHOTONS}")]
    PhotonCap { photons: usize },
    #[error("{modes} modes exceed the cap of {MAX_MODES}")]
    ModeCap { modes: usize },
}

/// A script error with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// Beam splitter operand: a whole path or a single mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Port {
    Path(String),
    Mode(ModeId),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operation {
    Photon { path: String, pol: PolState },
    Spdc { a: String, b: String },
    BeamSplitter { a: Port, b: Port, t: f64, r: f64 },
    Pbs { a: String, b: String, basis: PbsBasis },
    Rotator { path: String, theta: f64 },
    Waveplate { path: String, retardance: f64 },
    Phase { mode: ModeId, phi: f64 },
    HeraldNone { path: String, eta: Option<f64> },
    HeraldClick { mode: ModeId, eta: f64 },
    Pnr { mode: ModeId, n: usize },
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let port = |p: &Port| match p {
            Port::Path(s) => s.clone(),
            Port::Mode(m) => m.to_string(),
        };
        match self {
            Operation::Photon { path, pol } => write!(f, "photon {path} {pol:?}"),
            Operation::Spdc { a, b } => write!(f, "spdc {a} {b}"),
            Operation::BeamSplitter { a, b, t, r } => write!(f, "bs {} {} {t} {r}", port(a), port(b)),
            Operation::Pbs { a, b, basis } => write!(f, "pbs {a} {b} {basis:?}"),
            Operation::Rotator { path, theta } => write!(f, "rot {path} {theta}"),
            Operation::Waveplate { path, retardance } => write!(f, "wp {path} {retardance}"),
            Operation::Phase { mode, phi } => write!(f, "phase {mode} {phi}"),
            Operation::HeraldNone { path, eta: None } => write!(f, "herald_none {path}"),
            Operation::HeraldNone { path, eta: Some(e) } => write!(f, "herald_none {path} {e}"),
            Operation::HeraldClick { mode, eta } => write!(f, "herald_click {mode} {eta}"),
            Operation::Pnr { mode, n } => write!(f, "pnr {mode} {n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub line: usize,
    pub op: Operation,
}

/// Parsed circuit: declared paths and ordered steps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircuitSpec {
    pub paths: Vec<String>,
    pub steps: Vec<Step>,
}

impl CircuitSpec {
    pub fn register(&self) -> Result<Register> {
        Register::from_paths(&self.paths)
    }

    /// Photons injected by the script.
    pub fn photon_count(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match s.op {
                Operation::Photon { .. } => 1,
                Operation::Spdc { .. } => 4,
                _ => 0,
            })
            .sum()
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in body.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((b0, c0)) = start.take() {
                out.push(Token { text: &body[b0..byte], column: c0 + 1 });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b0, c0)) = start {
        out.push(Token { text: &body[b0..], column: c0 + 1 });
    }
    out
}

struct LineParser<'a, 'p> {
    line: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    statement: &'static str,
    paths: &'p [String],
}

impl<'a> LineParser<'a, '_> {
    fn err_at(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column, kind }
    }

    fn end_column(&self) -> usize {
        self.tokens.last().map(|t| t.column + t.text.chars().count()).unwrap_or(1)
    }

    fn next(&mut self, expected: &'static str) -> std::result::Result<&Token<'a>, ParseError> {
        if self.pos >= self.tokens.len() {
            let kind = ParseErrorKind::MissingArgument { statement: self.statement, expected };
            return Err(self.err_at(self.end_column(), kind));
        }
        self.pos += 1;
        Ok(&self.tokens[self.pos - 1])
    }

    fn has_more(&self) -> bool {
        self.pos < self.tokens.len()
    }

    fn finish(&self) -> std::result::Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => Err(self.err_at(t.column, ParseErrorKind::UnexpectedToken(t.text.to_owned()))),
            None => Ok(()),
        }
    }

    fn declared(&self, path: &str, column: usize) -> std::result::Result<(), ParseError> {
        if validate_path(path).is_err() {
            return Err(self.err_at(column, ParseErrorKind::InvalidPath(path.to_owned())));
        }
        if !self.paths.iter().any(|p| p == path) {
            return Err(self.err_at(column, ParseErrorKind::UndeclaredPath(path.to_owned())));
        }
        Ok(())
    }

    fn path(&mut self) -> std::result::Result<(String, usize), ParseError> {
        let t = self.next("a path")?;
        let (text, column) = (t.text, t.column);
        self.declared(text, column)?;
        Ok((text.to_owned(), column))
    }

    fn mode(&mut self) -> std::result::Result<ModeId, ParseError> {
        let t = self.next("a mode <path>.<H|V>")?;
        let (text, column) = (t.text, t.column);
        self.parse_mode(text, column)
    }

    fn parse_mode(&self, text: &str, column: usize) -> std::result::Result<ModeId, ParseError> {
        let (path, pol) =
            text.rsplit_once('.').ok_or_else(|| self.err_at(column, ParseErrorKind::InvalidMode(text.to_owned())))?;
        let pol = match pol {
            "H" => Pol::H,
            "V" => Pol::V,
            _ => return Err(self.err_at(column, ParseErrorKind::InvalidMode(text.to_owned()))),
        };
        self.declared(path, column)?;
        Ok(ModeId { path: path.to_owned(), pol })
    }

    fn number(&mut self, expected: &'static str) -> std::result::Result<(f64, usize), ParseError> {
        let t = self.next(expected)?;
        let (text, column) = (t.text, t.column);
        parse_number(text)
            .map(|v| (v, column))
            .ok_or_else(|| self.err_at(column, ParseErrorKind::InvalidNumber(text.to_owned())))
    }

    fn eta(&mut self) -> std::result::Result<f64, ParseError> {
        let (eta, column) = self.number("a detector efficiency")?;
        if !(0.0..=1.0).contains(&eta) {
            let msg = format!("detector efficiency {eta} is outside [0, 1]");
            return Err(self.err_at(column, ParseErrorKind::OutOfRange(msg)));
        }
        Ok(eta)
    }

    fn distinct(&self, a: &str, b: &str, column: usize) -> std::result::Result<(), ParseError> {
        if a == b {
            Err(self.err_at(column, ParseErrorKind::IdenticalOperands(a.to_owned())))
        } else {
            Ok(())
        }
    }

    fn port(&mut self) -> std::result::Result<(Port, String, usize), ParseError> {
        let t = self.next("a path or mode")?;
        let (text, column) = (t.text, t.column);
        if text.contains('.') {
            Ok((Port::Mode(self.parse_mode(text, column)?), text.to_owned(), column))
        } else {
            self.declared(text, column)?;
            Ok((Port::Path(text.to_owned()), text.to_owned(), column))
        }
    }

    fn operation(&mut self, keyword: &str, column: usize) -> std::result::Result<Operation, ParseError> {
        let op = match keyword {
            "photon" => {
                self.statement = "photon";
                let (path, _) = self.path()?;
                let t = self.next("a polarization H, V, D, A, L or R")?;
                let pol = match t.text {
                    "H" => PolState::H,
                    "V" => PolState::V,
                    "D" => PolState::D,
                    "A" => PolState::A,
                    "L" => PolState::L,
                    "R" => PolState::R,
                    other => {
                        let (o, c) = (other.to_owned(), t.column);
                        return Err(self.err_at(c, ParseErrorKind::InvalidPolarization(o)));
                    }
                };
                Operation::Photon { path, pol }
            }
            "spdc" => {
                self.statement = "spdc";
                let (a, _) = self.path()?;
                let (b, cb) = self.path()?;
                self.distinct(&a, &b, cb)?;
                Operation::Spdc { a, b }
            }
            "bs" => {
                self.statement = "bs";
                let (a, ta, _) = self.port()?;
                let (b, tb, cb) = self.port()?;
                self.distinct(&ta, &tb, cb)?;
                if matches!((&a, &b), (Port::Path(_), Port::Mode(_)) | (Port::Mode(_), Port::Path(_))) {
                    return Err(self.err_at(cb, ParseErrorKind::MixedOperands));
                }
                let (t, ct) = self.number("transmission amplitude t")?;
                let (r, _) = self.number("reflection amplitude r")?;
                if ((t * t + r * r) - 1.0).abs() > TOLERANCE {
                    let msg = format!("beam splitter t = {t}, r = {r} violates t^2 + r^2 = 1");
                    return Err(self.err_at(ct, ParseErrorKind::OutOfRange(msg)));
                }
                Operation::BeamSplitter { a, b, t, r }
            }
            "pbs" => {
                self.statement = "pbs";
                let (a, _) = self.path()?;
                let (b, cb) = self.path()?;
                self.distinct(&a, &b, cb)?;
                let t = self.next("a basis HV, DA or LR")?;
                let basis = match t.text {
                    "HV" => PbsBasis::HV,
                    "DA" => PbsBasis::DA,
                    "LR" => PbsBasis::LR,
                    other => {
                        let (o, c) = (other.to_owned(), t.column);
                        return Err(self.err_at(c, ParseErrorKind::InvalidBasis(o)));
                    }
                };
                Operation::Pbs { a, b, basis }
            }
            "rot" => {
                self.statement = "rot";
                let (path, _) = self.path()?;
                let (theta, _) = self.number("an angle in radians")?;
                Operation::Rotator { path, theta }
            }
            "wp" => {
                self.statement = "wp";
                let (path, _) = self.path()?;
                let (retardance, _) = self.number("a retardance in radians")?;
                Operation::Waveplate { path, retardance }
            }
            "phase" => {
                self.statement = "phase";
                let mode = self.mode()?;
                let (phi, _) = self.number("a phase in radians")?;
                Operation::Phase { mode, phi }
            }
            "herald_none" => {
                self.statement = "herald_none";
                let (path, _) = self.path()?;
                let eta = if self.has_more() { Some(self.eta()?) } else { None };
                Operation::HeraldNone { path, eta }
            }
            "herald_click" => {
                self.statement = "herald_click";
                let mode = self.mode()?;
                let eta = self.eta()?;
                Operation::HeraldClick { mode, eta }
            }
            "pnr" => {
                self.statement = "pnr";
                let mode = self.mode()?;
                let t = self.next("a photon count")?;
                let (text, c) = (t.text, t.column);
                let n = match text.parse::<usize>() {
                    Ok(n) if n <= MAX_PHOTONS => n,
                    Ok(_) => {
                        let msg = format!("photon count {text} exceeds the cap of {MAX_PHOTONS}");
                        return Err(self.err_at(c, ParseErrorKind::OutOfRange(msg)));
                    }
                    Err(_) => return Err(self.err_at(c, ParseErrorKind::InvalidNumber(text.to_owned()))),
                };
                Operation::Pnr { mode, n }
            }
            other => return Err(self.err_at(column, ParseErrorKind::UnknownStatement(other.to_owned()))),
        };
        self.finish()?;
        Ok(op)
    }
}

/// Parses a circuit script. Never panics on malformed input.
pub fn parse_circuit(text: &str) -> std::result::Result<CircuitSpec, ParseError> {
    let mut spec = CircuitSpec::default();
    let mut declared = false;
    let mut photons = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens = tokenize(raw);
        let Some(first) = tokens.first() else { continue };
        let (keyword, column) = (first.text, first.column);
        if keyword == "paths" {
            if declared || !spec.steps.is_empty() {
                return Err(ParseError { line, column, kind: ParseErrorKind::MisplacedPaths });
            }
            if tokens.len() < 2 {
                let kind = ParseErrorKind::MissingArgument { statement: "paths", expected: "at least one path" };
                return Err(ParseError { line, column: column + keyword.len(), kind });
            }
            for t in &tokens[1..] {
                let err = |kind| ParseError { line, column: t.column, kind };
                if validate_path(t.text).is_err() {
                    return Err(err(ParseErrorKind::InvalidPath(t.text.to_owned())));
                }
                if spec.paths.iter().any(|p| p == t.text) {
                    return Err(err(ParseErrorKind::DuplicatePath(t.text.to_owned())));
                }
                spec.paths.push(t.text.to_owned());
                if 2 * spec.paths.len() > MAX_MODES {
                    return Err(err(ParseErrorKind::ModeCap { modes: 2 * spec.paths.len() }));
                }
            }
            declared = true;
            continue;
        }
        if !declared {
            return Err(ParseError { line, column, kind: ParseErrorKind::MissingPaths });
        }
        let mut parser = LineParser { line, tokens, pos: 1, statement: "", paths: &spec.paths };
        let op = parser.operation(keyword, column)?;
        photons += match op {
            Operation::Photon { .. } => 1,
            Operation::Spdc { .. } => 4,
            _ => 0,
        };
        if photons > MAX_PHOTONS {
            return Err(ParseError { line, column, kind: ParseErrorKind::PhotonCap { photons } });
        }
        spec.steps.push(Step { line, op });
    }
    Ok(spec)
}

/// Execution options for [`run_circuit`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    /// Replaces the detector of every `herald_none` step.
    pub herald_detector: Option<DetectorModel>,
}

fn modes_on_path(register: &Register, path: &str) -> Result<Vec<ModeId>> {
    let modes: Vec<ModeId> = register.modes().iter().filter(|m| m.path == path).cloned().collect();
    if modes.is_empty() {
        // the path was fully detected by an earlier step
        return Err(crate::error::Error::UnknownMode(ModeId::h(path)?));
    }
    Ok(modes)
}

/// Runs a parsed circuit from the vacuum of its declared paths.
pub fn run_circuit(spec: &CircuitSpec, options: &RunOptions) -> Result<CircuitResult> {
    let mut run = Runner::new(PureState::vacuum(spec.register()?).into());
    for step in &spec.steps {
        let label = format!("line {}: {}", step.line, step.op);
        match &step.op {
            Operation::Photon { path, pol } => run.inject(path, *pol)?,
            Operation::Spdc { a, b } => {
                let source = spdc_source(a, b)?;
                let updated = run.ensemble().map_states(|s| replace_vacuum(s, &source))?;
                run.replace(updated);
            }
            Operation::BeamSplitter { a, b, t, r } => {
                let tr = match (a, b) {
                    (Port::Mode(x), Port::Mode(y)) => mode_beam_splitter(x, y, *t, *r)?,
                    (Port::Path(x), Port::Path(y)) => beam_splitter(x, y, *t, *r)?,
                    _ => unreachable!("parser rejects mixed operands"),
                };
                run.apply(&tr)?
            }
            Operation::Pbs { a, b, basis } => run.apply(&pbs(a, b, *basis)?)?,
            Operation::Rotator { path, theta } => run.apply(&rotator(path, *theta)?)?,
            Operation::Waveplate { path, retardance } => run.apply(&waveplate(path, *retardance)?)?,
            Operation::Phase { mode, phi } => run.apply(&phase(mode, *phi)?)?,
            Operation::HeraldNone { path, eta } => {
                let modes = modes_on_path(run.ensemble().register(), path)?;
                let detector = match (options.herald_detector, eta) {
                    (Some(d), _) => d,
                    (None, Some(e)) => DetectorModel::on_off(*e)?,
                    (None, None) => DetectorModel::Pnr,
                };
                run.condition(label, |e| condition_no_detection(e, &modes, detector))?
            }
            Operation::HeraldClick { mode, eta } => {
                let modes = [mode.clone()];
                run.condition(label, |e| condition_click(e, &modes, *eta))?
            }
            Operation::Pnr { mode, n } => {
                let modes = [mode.clone()];
                run.condition(label, |e| condition_pnr(e, &modes, *n))?
            }
        }
    }
    Ok(run.finish())
}

/// Places the emission source on its two paths, which must be in vacuum.
fn replace_vacuum(state: &PureState, source: &PureState) -> Result<PureState> {
    let idx = state.register().indices_of(source.register().modes())?;
    let (_, parts) = state.split_by(&idx);
    let mut out = PureState::zero(state.register().clone());
    for (pattern, rest) in parts {
        if pattern.iter().any(|&n| n != 0) {
            return Err(crate::error::Error::InvalidParameter("spdc source paths must be in vacuum".to_owned()));
        }
        out = out.superpose(&rest.tensor(source)?)?;
    }
    Ok(out)
}
