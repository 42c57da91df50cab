//! Lower bounds on the equivariant non-orientable 4-genus.
//!
//! The mod-8 residue of `sigma + 4 Arf` decides which definite branched
//! covers can occur. For each relevant sign the Goeritz form of the matching
//! coloring must embed equivariantly into the standard lattice of corank 1
//! (Möbius band) or corank 2 (punctured Klein bottle); when no such embedding
//! exists the corresponding surface is ruled out.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equivariance::{self, EquivariantEmbedding, EquivarianceVerdict};
use crate::error::{Error, Result};
use crate::lattice::{GramLattice, LatticeEmbedding, SearchLimits};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CertificateJson", into = "CertificateJson")]
pub struct KnotCertificate {
    pub name: String,
    pub goeritz_minus: GramLattice,
    pub goeritz_plus: GramLattice,
    pub action_minus: Matrix,
    pub action_plus: Matrix,
    pub period: u32,
    pub signature: i64,
    pub arf: u8,
    pub known_gamma4: Option<u32>,
    /// Which action, if any, was copied from the other because it was
    /// omitted and `G_+ = -G_-`.
    pub defaulted_action: Option<FormChoice>,
}

impl KnotCertificate {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: String,
        goeritz_minus: GramLattice,
        goeritz_plus: GramLattice,
        action_minus: Matrix,
        action_plus: Matrix,
        period: u32,
        signature: i64,
        arf: u8,
        known_gamma4: Option<u32>,
    ) -> Result<Self> {
        let cert = KnotCertificate {
            name,
            goeritz_minus,
            goeritz_plus,
            action_minus,
            action_plus,
            period,
            signature,
            arf,
            known_gamma4,
            defaulted_action: None,
        };
        cert.validate()?;
        Ok(cert)
    }

    pub fn validate(&self) -> Result<()> {
        if self.period < 2 {
            return Err(Error::input(format!("period must be at least 2, got {}", self.period)));
        }
        if self.arf > 1 {
            return Err(Error::input(format!("Arf invariant must be 0 or 1, got {}", self.arf)));
        }
        if self.signature % 2 != 0 {
            return Err(Error::input(format!("knot signatures are even, got {}", self.signature)));
        }
        if !self.goeritz_minus.is_definite(-1) {
            return Err(Error::input("goeritz_minus is not negative definite"));
        }
        if !self.goeritz_plus.is_definite(1) {
            return Err(Error::input("goeritz_plus is not positive definite"));
        }
        for (label, f, g) in [
            ("action_minus", &self.action_minus, &self.goeritz_minus),
            ("action_plus", &self.action_plus, &self.goeritz_plus),
        ] {
            if f.as_permutation().is_none() {
                return Err(Error::input(format!("{} is not a permutation matrix", label)));
            }
            if !equivariance::is_isometry(f, g) {
                return Err(Error::input(format!("{} is not an isometry of its Goeritz form", label)));
            }
            let order = matrix_order(f, self.period);
            if order != Some(self.period) {
                return Err(Error::input(format!(
                    "{} has order {} but the period is {}",
                    label,
                    order.map_or_else(|| format!("> {}", self.period), |o| o.to_string()),
                    self.period
                )));
            }
        }
        Ok(())
    }

    pub fn form(&self, which: FormChoice) -> (&GramLattice, &Matrix) {
        match which {
            FormChoice::Minus => (&self.goeritz_minus, &self.action_minus),
            FormChoice::Plus => (&self.goeritz_plus, &self.action_plus),
        }
    }
}

/// Smallest `k <= limit` with `f^k = I`.
fn matrix_order(f: &Matrix, limit: u32) -> Option<u32> {
    let id = Matrix::identity(f.nrows());
    let mut p = f.clone();
    for k in 1..=limit {
        if p == id {
            return Some(k);
        }
        p = p.mul(f);
    }
    None
}

/// A permutation action written either as a matrix or as the list of
/// 1-based images `[f(1), ..., f(n)]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ActionJson {
    Matrix(Matrix),
    Images(Vec<usize>),
}

impl ActionJson {
    fn into_matrix(self) -> Result<Matrix> {
        match self {
            ActionJson::Matrix(m) => Ok(m),
            ActionJson::Images(images) => {
                let n = images.len();
                let mut f = Matrix::zeros(n, n);
                for (j, &i) in images.iter().enumerate() {
                    if i == 0 || i > n {
                        return Err(Error::input(format!(
                            "action image {} out of range 1..={}",
                            i, n
                        )));
                    }
                    f[(i - 1, j)] = 1;
                }
                Ok(f)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateJson {
    name: String,
    goeritz_minus: Matrix,
    goeritz_plus: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    action_minus: Option<ActionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    action_plus: Option<ActionJson>,
    period: u32,
    signature: i64,
    arf: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    known_gamma4: Option<u32>,
}

impl TryFrom<CertificateJson> for KnotCertificate {
    type Error = Error;

    fn try_from(j: CertificateJson) -> Result<Self> {
        let minus = GramLattice::new(j.goeritz_minus)?;
        let plus = GramLattice::new(j.goeritz_plus)?;
        let negation = plus.matrix() == &minus.matrix().neg();
        let action_minus = j.action_minus.map(ActionJson::into_matrix).transpose()?;
        let action_plus = j.action_plus.map(ActionJson::into_matrix).transpose()?;
        let (action_minus, action_plus, defaulted) = match (action_minus, action_plus) {
            (Some(a), Some(b)) => (a, b, None),
            (Some(a), None) if negation => (a.clone(), a, Some(FormChoice::Plus)),
            (None, Some(b)) if negation => (b.clone(), b, Some(FormChoice::Minus)),
            (None, None) => return Err(Error::input("certificate has no action")),
            _ => {
                return Err(Error::input(
                    "only one action given, but goeritz_plus is not -goeritz_minus",
                ))
            }
        };
        let mut cert = KnotCertificate::new(
            j.name,
            minus,
            plus,
            action_minus,
            action_plus,
            j.period,
            j.signature,
            j.arf,
            j.known_gamma4,
        )?;
        cert.defaulted_action = defaulted;
        Ok(cert)
    }
}

impl From<KnotCertificate> for CertificateJson {
    fn from(c: KnotCertificate) -> Self {
        let keep = |which| (c.defaulted_action != Some(which)).then_some(());
        CertificateJson {
            action_minus: keep(FormChoice::Minus).map(|_| ActionJson::Matrix(c.action_minus.clone())),
            action_plus: keep(FormChoice::Plus).map(|_| ActionJson::Matrix(c.action_plus.clone())),
            name: c.name,
            goeritz_minus: c.goeritz_minus.matrix().clone(),
            goeritz_plus: c.goeritz_plus.matrix().clone(),
            period: c.period,
            signature: c.signature,
            arf: c.arf,
            known_gamma4: c.known_gamma4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormChoice {
    Minus,
    Plus,
}

impl FormChoice {
    pub fn sign(self) -> i8 {
        match self {
            FormChoice::Minus => -1,
            FormChoice::Plus => 1,
        }
    }
}

impl fmt::Display for FormChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormChoice::Minus => "G-",
            FormChoice::Plus => "G+",
        })
    }
}

/// `(sigma + 4 Arf) mod 8`.
pub fn congruence_residue(sigma: i64, arf: u8) -> Result<u8> {
    if arf > 1 {
        return Err(Error::input(format!("Arf invariant must be 0 or 1, got {}", arf)));
    }
    if sigma % 2 != 0 {
        return Err(Error::input(format!("knot signatures are even, got {}", sigma)));
    }
    Ok((sigma + 4 * i64::from(arf)).rem_euclid(8) as u8)
}

/// What the residue says about the double cover of `D^4` branched along a
/// Möbius band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverSign {
    PositiveDefinite,
    NegativeDefinite,
    Indeterminate,
    MobiusImpossible,
}

pub fn mobius_cover_sign(residue: u8) -> Result<CoverSign> {
    match residue {
        2 => Ok(CoverSign::PositiveDefinite),
        6 => Ok(CoverSign::NegativeDefinite),
        0 => Ok(CoverSign::Indeterminate),
        4 => Ok(CoverSign::MobiusImpossible),
        r => Err(Error::input(format!("residue {} is not one of 0, 2, 4, 6", r))),
    }
}

/// Outcome of one embedding problem `(G, f) -> (Z^{n+corank}, sign Id)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ProblemResult {
    /// The enumeration finished. `classes` lists every embedding class with
    /// its equivariance verdict.
    Complete { classes: Vec<ClassVerdict> },
    Incomplete { budget: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub embedding: LatticeEmbedding,
    pub verdict: EquivarianceVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub form: FormChoice,
    pub sign: i8,
    pub corank: usize,
    #[serde(flatten)]
    pub result: ProblemResult,
}

impl ProblemRecord {
    fn classes(&self) -> Option<&[ClassVerdict]> {
        match &self.result {
            ProblemResult::Complete { classes } => Some(classes),
            ProblemResult::Incomplete { .. } => None,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.classes().is_some()
    }

    pub fn embedding_count(&self) -> Option<usize> {
        self.classes().map(<[ClassVerdict]>::len)
    }

    pub fn first_witness(&self) -> Option<EquivariantEmbedding> {
        self.classes()?.iter().find_map(|c| {
            c.verdict.witness().map(|w| EquivariantEmbedding { embedding: c.embedding.clone(), witness: w.clone() })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ObstructionVerdict {
    /// The surface is ruled out. `vacuous` when the residue alone forbids it.
    Obstructed { vacuous: bool, problems: Vec<ProblemRecord> },
    /// Some relevant problem has a solution, so nothing can be concluded.
    Inconclusive { problems: Vec<ProblemRecord>, witness: Option<EquivariantEmbedding> },
    /// A needed enumeration ran out of budget.
    NonCertifying { problems: Vec<ProblemRecord> },
    /// The residue is outside the obstruction's hypothesis.
    Inapplicable { residue: u8 },
}

impl ObstructionVerdict {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, ObstructionVerdict::Obstructed { .. })
    }

    pub fn is_non_certifying(&self) -> bool {
        matches!(self, ObstructionVerdict::NonCertifying { .. })
    }

    pub fn problems(&self) -> &[ProblemRecord] {
        match self {
            ObstructionVerdict::Obstructed { problems, .. }
            | ObstructionVerdict::Inconclusive { problems, .. }
            | ObstructionVerdict::NonCertifying { problems } => problems,
            ObstructionVerdict::Inapplicable { .. } => &[],
        }
    }

    pub fn witness(&self) -> Option<&EquivariantEmbedding> {
        match self {
            ObstructionVerdict::Inconclusive { witness, .. } => witness.as_ref(),
            _ => None,
        }
    }
}

pub fn solve_problem(
    cert: &KnotCertificate,
    form: FormChoice,
    corank: usize,
    limits: SearchLimits,
) -> Result<ProblemRecord> {
    let (g, f) = cert.form(form);
    let sign = form.sign();
    let result = match equivariance::survey_equivariant_embeddings(g, f, corank, sign, limits) {
        Ok(survey) => ProblemResult::Complete {
            classes: survey
                .classes
                .into_iter()
                .map(|(embedding, verdict)| ClassVerdict { embedding, verdict })
                .collect(),
        },
        Err(Error::Incomplete { budget }) => ProblemResult::Incomplete { budget },
        Err(e) => return Err(e),
    };
    Ok(ProblemRecord { form, sign, corank, result })
}

/// Combines problem records: obstructed iff every problem is complete and
/// `blocked` holds for each.
fn combine(problems: Vec<ProblemRecord>, equivariant: bool) -> ObstructionVerdict {
    let witness = problems.iter().find_map(ProblemRecord::first_witness);
    let any_embedding = problems.iter().any(|p| p.embedding_count().unwrap_or(0) > 0);
    let blocked = if equivariant { witness.is_none() } else { !any_embedding };
    if !blocked {
        let witness = if equivariant { witness } else { None };
        return ObstructionVerdict::Inconclusive { problems, witness };
    }
    if problems.iter().any(|p| !p.is_complete()) {
        return ObstructionVerdict::NonCertifying { problems };
    }
    ObstructionVerdict::Obstructed { vacuous: false, problems }
}

fn mobius_forms(cover: CoverSign) -> &'static [FormChoice] {
    match cover {
        CoverSign::PositiveDefinite => &[FormChoice::Minus],
        CoverSign::NegativeDefinite => &[FormChoice::Plus],
        CoverSign::Indeterminate => &[FormChoice::Minus, FormChoice::Plus],
        CoverSign::MobiusImpossible => &[],
    }
}

fn mobius_problems(cert: &KnotCertificate, cover: CoverSign, limits: SearchLimits) -> Result<Vec<ProblemRecord>> {
    mobius_forms(cover).iter().map(|&form| solve_problem(cert, form, 1, limits)).collect()
}

fn mobius_verdicts(
    cert: &KnotCertificate,
    limits: SearchLimits,
) -> Result<(ObstructionVerdict, ObstructionVerdict)> {
    let residue = congruence_residue(cert.signature, cert.arf)?;
    let cover = mobius_cover_sign(residue)?;
    if cover == CoverSign::MobiusImpossible {
        let v = ObstructionVerdict::Obstructed { vacuous: true, problems: Vec::new() };
        return Ok((v.clone(), v));
    }
    let problems = mobius_problems(cert, cover, limits)?;
    Ok((combine(problems.clone(), false), combine(problems, true)))
}

/// Equivariant Möbius band obstruction (`gamma_{4,p} >= 2` when obstructed).
pub fn obstruct_equivariant_mobius(cert: &KnotCertificate, limits: SearchLimits) -> Result<ObstructionVerdict> {
    Ok(mobius_verdicts(cert, limits)?.1)
}

/// Equivariant punctured Klein bottle obstruction (`gamma_{4,p} >= 3` when
/// obstructed); only applies when the residue is 4.
pub fn obstruct_equivariant_klein(cert: &KnotCertificate, limits: SearchLimits) -> Result<ObstructionVerdict> {
    let residue = congruence_residue(cert.signature, cert.arf)?;
    if residue != 4 {
        return Ok(ObstructionVerdict::Inapplicable { residue });
    }
    let problems = [FormChoice::Plus, FormChoice::Minus]
        .iter()
        .map(|&form| solve_problem(cert, form, 2, limits))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(problems, true))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub name: String,
    pub period: u32,
    pub signature: i64,
    pub arf: u8,
    pub residue: u8,
    pub cover_sign: CoverSign,
    pub mobius_nonequivariant: ObstructionVerdict,
    pub mobius_equivariant: ObstructionVerdict,
    pub klein_equivariant: Option<ObstructionVerdict>,
    pub gamma4p_lower_bound: u32,
    /// All bounds rest on complete enumerations.
    pub certifying: bool,
    pub known_gamma4: Option<u32>,
    pub gap_detected: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defaulted_action: Option<FormChoice>,
}

pub fn gamma4p_lower_bound(cert: &KnotCertificate, limits: SearchLimits) -> Result<ObstructionReport> {
    cert.validate()?;
    let residue = congruence_residue(cert.signature, cert.arf)?;
    let cover_sign = mobius_cover_sign(residue)?;
    let (mobius_nonequivariant, mobius_equivariant) = mobius_verdicts(cert, limits)?;
    let klein = obstruct_equivariant_klein(cert, limits)?;
    let klein_equivariant = (residue == 4).then_some(klein);

    let klein_fired = klein_equivariant.as_ref().is_some_and(ObstructionVerdict::is_obstructed);
    let mobius_fired = mobius_equivariant.is_obstructed();
    assert!(!klein_fired || mobius_fired, "Klein obstruction without Möbius support");
    let gamma4p_lower_bound = if klein_fired {
        3
    } else if mobius_fired {
        2
    } else {
        1
    };
    let certifying = !mobius_equivariant.is_non_certifying()
        && !mobius_nonequivariant.is_non_certifying()
        && !klein_equivariant.as_ref().is_some_and(ObstructionVerdict::is_non_certifying);
    let gap_detected = cert.known_gamma4.is_some_and(|g| g < gamma4p_lower_bound);
    Ok(ObstructionReport {
        name: cert.name.clone(),
        period: cert.period,
        signature: cert.signature,
        arf: cert.arf,
        residue,
        cover_sign,
        mobius_nonequivariant,
        mobius_equivariant,
        klein_equivariant,
        gamma4p_lower_bound,
        certifying,
        known_gamma4: cert.known_gamma4,
        gap_detected,
        defaulted_action: cert.defaulted_action,
    })
}

fn status_text(v: &ObstructionVerdict) -> &'static str {
    match v {
        ObstructionVerdict::Obstructed { vacuous: true, .. } => "obstructed (residue)",
        ObstructionVerdict::Obstructed { vacuous: false, .. } => "obstructed",
        ObstructionVerdict::Inconclusive { .. } => "inconclusive",
        ObstructionVerdict::NonCertifying { .. } => "non-certifying",
        ObstructionVerdict::Inapplicable { .. } => "inapplicable",
    }
}

fn problem_text(p: &ProblemRecord) -> String {
    let sign = if p.sign < 0 { "-" } else { "+" };
    let outcome = match &p.result {
        ProblemResult::Incomplete { budget } => format!("incomplete (budget {})", budget),
        ProblemResult::Complete { classes } => {
            let eq = classes.iter().filter(|c| c.verdict.witness().is_some()).count();
            format!("{} classes, {} equivariant", classes.len(), eq)
        }
    };
    format!("{} -> Z^(n+{}), {}Id: {}", p.form, p.corank, sign, outcome)
}

impl fmt::Display for ObstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |f: &mut fmt::Formatter<'_>, k: &str, v: &dyn fmt::Display| writeln!(f, "{:<26}{}", k, v);
        row(f, "knot", &self.name)?;
        row(f, "period", &self.period)?;
        row(f, "signature", &self.signature)?;
        row(f, "arf", &self.arf)?;
        row(f, "sigma + 4 arf mod 8", &self.residue)?;
        row(f, "mobius cover", &format!("{:?}", self.cover_sign))?;
        row(f, "mobius (non-equivariant)", &status_text(&self.mobius_nonequivariant))?;
        row(f, "mobius (equivariant)", &status_text(&self.mobius_equivariant))?;
        for p in self.mobius_equivariant.problems() {
            row(f, "", &problem_text(p))?;
        }
        match &self.klein_equivariant {
            Some(k) => {
                row(f, "klein (equivariant)", &status_text(k))?;
                for p in k.problems() {
                    row(f, "", &problem_text(p))?;
                }
            }
            None => row(f, "klein (equivariant)", &"inapplicable")?,
        }
        row(f, "gamma_4,p lower bound", &self.gamma4p_lower_bound)?;
        row(f, "certifying", &self.certifying)?;
        row(f, "known gamma_4", &self.known_gamma4.map_or_else(|| "-".to_string(), |g| g.to_string()))?;
        row(f, "gap detected", &self.gap_detected)?;
        if let Some(d) = self.defaulted_action {
            row(f, "note", &format!("action on {} copied from the other coloring", d))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;

    #[test]
    fn residues() {
        assert_eq!(congruence_residue(0, 1).unwrap(), 4);
        assert_eq!(congruence_residue(0, 0).unwrap(), 0);
        assert_eq!(congruence_residue(-2, 1).unwrap(), 2);
        assert_eq!(congruence_residue(-2, 0).unwrap(), 6);
        assert!(congruence_residue(1, 0).is_err());
        assert!(congruence_residue(0, 2).is_err());
    }

    #[test]
    fn cover_signs() {
        assert_eq!(mobius_cover_sign(2).unwrap(), CoverSign::PositiveDefinite);
        assert_eq!(mobius_cover_sign(6).unwrap(), CoverSign::NegativeDefinite);
        assert_eq!(mobius_cover_sign(0).unwrap(), CoverSign::Indeterminate);
        assert_eq!(mobius_cover_sign(4).unwrap(), CoverSign::MobiusImpossible);
        assert!(mobius_cover_sign(3).is_err());
    }

    #[test]
    fn residue_four_makes_mobius_vacuous() {
        let mut cert = family::fixture_12a1019();
        cert.arf = 1;
        let v = obstruct_equivariant_mobius(&cert, SearchLimits::default()).unwrap();
        assert_eq!(v, ObstructionVerdict::Obstructed { vacuous: true, problems: vec![] });
    }

    #[test]
    fn klein_inapplicable_off_residue_four() {
        let cert = family::make_certificate_kn(2).unwrap();
        assert_eq!(
            obstruct_equivariant_klein(&cert, SearchLimits::default()).unwrap(),
            ObstructionVerdict::Inapplicable { residue: 0 }
        );
    }

    #[test]
    fn certificate_validation() {
        let good = family::make_certificate_kn(2).unwrap();
        let mut bad = good.clone();
        bad.period = 3;
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.goeritz_plus = bad.goeritz_minus.clone();
        assert!(bad.validate().is_err());
        let mut bad = good;
        bad.signature = 1;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_action_defaults_when_forms_are_negatives() {
        let json = r#"{
            "name": "K_2",
            "goeritz_minus": [[-3,1,0,0],[1,-2,0,0],[0,0,-3,1],[0,0,1,-2]],
            "goeritz_plus": [[3,-1,0,0],[-1,2,0,0],[0,0,3,-1],[0,0,-1,2]],
            "action_minus": [3, 4, 1, 2],
            "period": 2, "signature": 0, "arf": 0, "known_gamma4": 1
        }"#;
        let cert: KnotCertificate = serde_json::from_str(json).unwrap();
        assert_eq!(cert.defaulted_action, Some(FormChoice::Plus));
        assert_eq!(cert.action_plus, cert.action_minus);
        assert_eq!(cert.action_minus, family::action_fn(2).unwrap());
        let back: KnotCertificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn certificate_schema_errors() {
        let no_action = r#"{"name":"x","goeritz_minus":[[-1]],"goeritz_plus":[[1]],"period":2,"signature":0,"arf":0}"#;
        assert!(serde_json::from_str::<KnotCertificate>(no_action).is_err());
        let extra = r#"{"name":"x","goeritz_minus":[[-1]],"goeritz_plus":[[1]],"action_minus":[1],"period":2,"signature":0,"arf":0,"bogus":1}"#;
        assert!(serde_json::from_str::<KnotCertificate>(extra).is_err());
    }
}
