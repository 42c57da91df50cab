use std::fmt;
use std::path::{Path, PathBuf};

use goeritz_core::diagram::{self, CheckerboardDiagram, RegionAction};
use goeritz_core::{family, GramLattice, KnotCertificate, Matrix};
use serde::Deserialize;

/// An input error, optionally anchored to a position in a file.
#[derive(Debug)]
pub struct InputError {
    pub file: Option<PathBuf>,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        InputError { file: None, line: None, column: None, message: message.into() }
    }

    fn in_file(path: &Path, message: impl Into<String>) -> Self {
        InputError { file: Some(path.to_path_buf()), ..InputError::new(message) }
    }

    fn from_json(path: &Path, e: serde_json::Error) -> Self {
        let (line, column) = if e.line() > 0 { (Some(e.line()), Some(e.column())) } else { (None, None) };
        // serde_json appends the position itself
        let msg = e.to_string();
        let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(head, _)| head).to_string();
        InputError { file: Some(path.to_path_buf()), line, column, message: msg }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{}:", file.display())?;
            if let (Some(l), Some(c)) = (self.line, self.column) {
                write!(f, "{}:{}:", l, c)?;
            }
            write!(f, " ")?;
        }
        f.write_str(&self.message)
    }
}

impl From<goeritz_core::Error> for InputError {
    fn from(e: goeritz_core::Error) -> Self {
        InputError::new(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    Kn(usize),
    Knot12a1019,
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        if lower == "12a1019" || lower == "12a_1019" {
            return Ok(Preset::Knot12a1019);
        }
        if let Some(n) = lower.strip_prefix("k_n:") {
            let n: usize = n.parse().map_err(|_| format!("bad summand count in preset '{}'", s))?;
            if n == 0 {
                return Err("k_n:N needs N >= 1".into());
            }
            return Ok(Preset::Kn(n));
        }
        Err(format!("unknown preset '{}' (expected k_n:N or 12a1019)", s))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramFile {
    regions: usize,
    crossings: Vec<(usize, usize, i8)>,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    action: Option<RegionAction>,
}

/// A loaded input, before the verb decides what it needs.
#[derive(Clone, Debug)]
pub enum Source {
    Matrix(GramLattice),
    Diagram { diagram: CheckerboardDiagram, action: Option<RegionAction> },
    Certificate(KnotCertificate),
    /// `K_n` for `n = 1`, which has no periodic certificate.
    Form { name: String, lattice: GramLattice },
}

impl Source {
    pub fn from_preset(p: &Preset) -> Result<Source, InputError> {
        Ok(match p {
            Preset::Kn(1) => Source::Form { name: "K_1".into(), lattice: family::goeritz_gn(1)? },
            Preset::Kn(n) => Source::Certificate(family::make_certificate_kn(*n)?),
            Preset::Knot12a1019 => Source::Certificate(family::fixture_12a1019()),
        })
    }

    pub fn from_file(path: &Path) -> Result<Source, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError::in_file(path, format!("cannot read: {}", e)))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| InputError::from_json(path, e))?;
        // Re-parse the text with the detected schema so errors carry positions.
        match &value {
            serde_json::Value::Array(_) => {
                let m: Matrix = serde_json::from_str(&text).map_err(|e| InputError::from_json(path, e))?;
                let l = GramLattice::new(m).map_err(|e| InputError::in_file(path, e.to_string()))?;
                Ok(Source::Matrix(l))
            }
            serde_json::Value::Object(map) if map.contains_key("goeritz_minus") || map.contains_key("goeritz_plus") => {
                let c: KnotCertificate =
                    serde_json::from_str(&text).map_err(|e| InputError::from_json(path, e))?;
                Ok(Source::Certificate(c))
            }
            serde_json::Value::Object(map) if map.contains_key("crossings") => {
                let f: DiagramFile =
                    serde_json::from_str(&text).map_err(|e| InputError::from_json(path, e))?;
                let diagram = CheckerboardDiagram::from_triples(f.regions, &f.crossings)
                    .map_err(|e| InputError::in_file(path, e.to_string()))?;
                let diagram = match f.label {
                    Some(l) => diagram.with_label(l),
                    None => diagram,
                };
                Ok(Source::Diagram { diagram, action: f.action })
            }
            _ => Err(InputError::in_file(
                path,
                "unrecognized input: expected a matrix, a diagram (with \"crossings\") or a certificate (with \"goeritz_minus\")",
            )),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Source::Matrix(_) => "matrix".into(),
            Source::Diagram { diagram, .. } => diagram.label().unwrap_or("diagram").to_string(),
            Source::Certificate(c) => c.name.clone(),
            Source::Form { name, .. } => name.clone(),
        }
    }

    /// The form to embed for the given target sign.
    pub fn lattice(&self, sign: i8) -> Result<GramLattice, InputError> {
        Ok(match self {
            Source::Matrix(l) | Source::Form { lattice: l, .. } => l.clone(),
            Source::Diagram { diagram, .. } => diagram::goeritz(diagram)?,
            Source::Certificate(c) => {
                if sign < 0 {
                    c.goeritz_minus.clone()
                } else {
                    c.goeritz_plus.clone()
                }
            }
        })
    }

    pub fn action(&self, sign: i8) -> Result<Matrix, InputError> {
        match self {
            Source::Certificate(c) => Ok(if sign < 0 { c.action_minus.clone() } else { c.action_plus.clone() }),
            Source::Diagram { diagram, action: Some(a) } => {
                let report = diagram::validate_action(diagram, a);
                if !report.passed() {
                    return Err(InputError::new(format!("invalid action: {:?}", report.failures)));
                }
                Ok(diagram::induced_action_matrix(diagram, a)?)
            }
            _ => Err(InputError::new("this input carries no symmetry; give a certificate or a diagram with \"action\"")),
        }
    }
}
