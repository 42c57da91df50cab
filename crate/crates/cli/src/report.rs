use std::fmt::Write;

use goeritz_core::diagram::ActionReport;
use goeritz_core::equivariance::EquivarianceVerdict;
use goeritz_core::obstruction::ClassVerdict;
use goeritz_core::{FamilyInstance, Matrix, ObstructionReport};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoeritzOutput {
    pub name: String,
    pub pre_goeritz: Matrix,
    pub goeritz: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionOutput>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionOutput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
    pub report: ActionReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedOutput {
    pub name: String,
    pub source: Matrix,
    pub corank: usize,
    pub sign: i8,
    pub count: usize,
    pub classes: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantOutput {
    pub name: String,
    pub source: Matrix,
    pub action: Matrix,
    pub corank: usize,
    pub sign: i8,
    pub equivariant_count: usize,
    pub classes: Vec<ClassVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncompleteOutput {
    pub status: String,
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Output {
    Goeritz(GoeritzOutput),
    Embed(EmbedOutput),
    Equivariant(EquivariantOutput),
    Obstruct(Box<ObstructionReport>),
    Family(Box<FamilyInstance>),
    Incomplete(IncompleteOutput),
}

fn indent(m: &Matrix, pad: &str) -> String {
    m.to_string().lines().map(|l| format!("{}{}\n", pad, l)).collect()
}

fn sign_str(s: i8) -> &'static str {
    if s < 0 {
        "-"
    } else {
        "+"
    }
}

impl Output {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Output::Goeritz(g) => {
                let _ = writeln!(out, "{:<14}{}", "diagram", g.name);
                let _ = writeln!(out, "pre-Goeritz");
                out += &indent(&g.pre_goeritz, "  ");
                let _ = writeln!(out, "Goeritz");
                out += &indent(&g.goeritz, "  ");
                if let Some(a) = &g.action {
                    if let Some(m) = &a.matrix {
                        let _ = writeln!(out, "action");
                        out += &indent(m, "  ");
                    }
                    let status = if a.report.passed() { "ok".to_string() } else { format!("{:?}", a.report.failures) };
                    let _ = writeln!(out, "{:<14}{}", "action check", status);
                }
            }
            Output::Embed(e) => {
                let _ = writeln!(out, "{:<14}{}", "input", e.name);
                let _ = writeln!(out, "{:<14}Z^{} with {}Id", "target", e.source.nrows() + e.corank, sign_str(e.sign));
                let _ = writeln!(out, "{:<14}{}", "classes", e.count);
                for (k, c) in e.classes.iter().enumerate() {
                    let _ = writeln!(out, "class {}", k + 1);
                    out += &indent(c, "  ");
                }
            }
            Output::Equivariant(e) => {
                let _ = writeln!(out, "{:<14}{}", "input", e.name);
                let _ = writeln!(out, "{:<14}Z^{} with {}Id", "target", e.source.nrows() + e.corank, sign_str(e.sign));
                let _ = writeln!(out, "{:<14}{}", "classes", e.classes.len());
                let _ = writeln!(out, "{:<14}{}", "equivariant", e.equivariant_count);
                for (k, c) in e.classes.iter().enumerate() {
                    let verdict = match &c.verdict {
                        EquivarianceVerdict::Witness { witness, .. } => {
                            let images: Vec<String> = witness
                                .perm()
                                .iter()
                                .zip(witness.signs())
                                .map(|(p, s)| format!("{}{}", if *s < 0 { "-" } else { "" }, p + 1))
                                .collect();
                            format!("witness [{}]", images.join(" "))
                        }
                        EquivarianceVerdict::RefutedRational { certificate } => {
                            let first = certificate
                                .entries
                                .first()
                                .map(|e| format!(" ({},{}) = {}", e.row + 1, e.col + 1, e.value))
                                .unwrap_or_default();
                            format!("refuted: non-integral induced map{}", first)
                        }
                        EquivarianceVerdict::RefutedSearch => "refuted: no signed permutation".to_string(),
                    };
                    let _ = writeln!(out, "class {:<8}{}", k + 1, verdict);
                    out += &indent(c.embedding.matrix(), "  ");
                }
            }
            Output::Obstruct(r) => out += &r.to_string(),
            Output::Family(f) => {
                let c = &f.certificate;
                let _ = writeln!(out, "{:<14}{}", "knot", c.name);
                let _ = writeln!(out, "{:<14}{}", "period", c.period);
                let _ = writeln!(out, "{:<14}{}", "signature", c.signature);
                let _ = writeln!(out, "{:<14}{}", "arf", c.arf);
                let known = c.known_gamma4.map_or_else(|| "-".to_string(), |g| g.to_string());
                let _ = writeln!(out, "{:<14}{}", "gamma_4", known);
                let _ = writeln!(out, "G-");
                out += &indent(c.goeritz_minus.matrix(), "  ");
                let _ = writeln!(out, "action");
                out += &indent(&c.action_minus, "  ");
                let _ = writeln!(out, "{:<14}{}", "closed forms", f.closed_form_embeddings.len());
                for (k, e) in f.closed_form_embeddings.iter().enumerate() {
                    let _ = writeln!(out, "embedding {}", k + 1);
                    out += &indent(e.matrix(), "  ");
                }
            }
            Output::Incomplete(i) => {
                let _ = writeln!(out, "search incomplete: node budget of {} exhausted", i.budget);
            }
        }
        out
    }
}
