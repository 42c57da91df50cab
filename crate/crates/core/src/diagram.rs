//! Checkerboard diagrams and their Goeritz forms.
//!
//! A diagram is reduced to the data the Goeritz form needs: the number of
//! white regions and a multiset of weighted crossings between pairs of them.
//! Region 0 is the one deleted when passing from the pre-Goeritz matrix to
//! the Goeritz matrix; any symmetry must fix it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::GramLattice;
use crate::matrix::Matrix;

/// One double point incident to white regions `i` and `j`, with weight `eta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Crossing {
    pub i: usize,
    pub j: usize,
    pub eta: i8,
}

impl Serialize for Crossing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.i, self.j, self.eta).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Crossing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (i, j, eta) = <(usize, usize, i8)>::deserialize(d)?;
        Ok(Crossing { i, j, eta })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerboardDiagram {
    #[serde(rename = "regions")]
    region_count: usize,
    crossings: Vec<Crossing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl CheckerboardDiagram {
    pub fn new(
        region_count: usize,
        crossings: Vec<Crossing>,
        label: Option<String>,
    ) -> Result<Self> {
        let d = CheckerboardDiagram { region_count, crossings, label };
        d.validate()?;
        Ok(d)
    }

    /// Convenience constructor from `(i, j, eta)` triples.
    pub fn from_triples(region_count: usize, triples: &[(usize, usize, i8)]) -> Result<Self> {
        let crossings = triples.iter().map(|&(i, j, eta)| Crossing { i, j, eta }).collect();
        Self::new(region_count, crossings, None)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Checks the structural invariants. Deserialized diagrams must pass this
    /// before use.
    pub fn validate(&self) -> Result<()> {
        if self.region_count < 2 {
            return Err(Error::input(format!(
                "diagram needs at least 2 white regions, got {}",
                self.region_count
            )));
        }
        if self.crossings.is_empty() {
            return Err(Error::input("diagram has no crossings"));
        }
        for (k, c) in self.crossings.iter().enumerate() {
            if c.i >= self.region_count || c.j >= self.region_count {
                return Err(Error::input(format!(
                    "crossing {} references region {} but only {} regions exist",
                    k,
                    c.i.max(c.j),
                    self.region_count
                )));
            }
            if c.i == c.j {
                return Err(Error::input(format!("crossing {} joins region {} to itself", k, c.i)));
            }
            if c.eta != 1 && c.eta != -1 {
                return Err(Error::input(format!("crossing {} has weight {}, expected +1 or -1", k, c.eta)));
            }
        }
        Ok(())
    }

    pub fn region_count(&self) -> usize {
        self.region_count
    }

    /// Rank of the Goeritz form.
    pub fn rank(&self) -> usize {
        self.region_count - 1
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// True when the region-adjacency graph is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.region_count;
        let mut adj = vec![Vec::new(); n];
        for c in &self.crossings {
            adj[c.i].push(c.j);
            adj[c.j].push(c.i);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Symmetry of a periodic diagram acting on the white regions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionAction {
    #[serde(rename = "perm")]
    pub permutation: Vec<usize>,
    pub period: u32,
}

impl RegionAction {
    pub fn new(permutation: Vec<usize>, period: u32) -> Self {
        RegionAction { permutation, period }
    }

    /// Order of the permutation, or `None` if it is not a bijection.
    pub fn order(&self) -> Option<u64> {
        let n = self.permutation.len();
        let mut seen = vec![false; n];
        if self.permutation.iter().any(|&p| p >= n) {
            return None;
        }
        {
            let mut hit = vec![false; n];
            for &p in &self.permutation {
                if std::mem::replace(&mut hit[p], true) {
                    return None;
                }
            }
        }
        let mut order = 1u64;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                v = self.permutation[v];
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        Some(order)
    }
}

pub fn pre_goeritz(d: &CheckerboardDiagram) -> Result<Matrix> {
    d.validate()?;
    let n = d.region_count;
    let mut pg = Matrix::zeros(n, n);
    for c in &d.crossings {
        pg[(c.i, c.j)] -= i64::from(c.eta);
        pg[(c.j, c.i)] -= i64::from(c.eta);
    }
    for i in 0..n {
        let off: i64 = (0..n).filter(|&k| k != i).map(|k| pg[(i, k)]).sum();
        pg[(i, i)] = -off;
    }
    Ok(pg)
}

pub fn goeritz(d: &CheckerboardDiagram) -> Result<GramLattice> {
    let pg = pre_goeritz(d)?;
    GramLattice::new(pg.minor(0, 0))
}

/// Permutation matrix of the action on `X_1..X_n`; column `j` holds the image
/// of `X_{j+1}`.
pub fn induced_action_matrix(d: &CheckerboardDiagram, a: &RegionAction) -> Result<Matrix> {
    if a.permutation.len() != d.region_count {
        return Err(Error::input(format!(
            "action permutes {} regions but the diagram has {}",
            a.permutation.len(),
            d.region_count
        )));
    }
    if a.order().is_none() {
        return Err(Error::input("action is not a permutation of the regions"));
    }
    if a.permutation[0] != 0 {
        return Err(Error::input(format!(
            "action sends the deleted region 0 to region {}; relabel the regions so that \
             a region fixed by the symmetry is region 0",
            a.permutation[0]
        )));
    }
    let n = d.rank();
    let mut f = Matrix::zeros(n, n);
    for j in 1..=n {
        f[(a.permutation[j] - 1, j - 1)] = 1;
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionCheck {
    /// The permutation's order differs from the declared period.
    Order { declared: u32, actual: Option<u64> },
    /// The induced map does not preserve the Goeritz form.
    NotIsometry,
    /// Region 0 is moved.
    MovesDeletedRegion { image: usize },
    /// The action does not fit the diagram at all.
    Malformed(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionReport {
    pub failures: Vec<ActionCheck>,
}

impl ActionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn validate_action(d: &CheckerboardDiagram, a: &RegionAction) -> ActionReport {
    let mut failures = Vec::new();
    if let Err(e) = d.validate() {
        failures.push(ActionCheck::Malformed(e.to_string()));
        return ActionReport { failures };
    }
    if a.permutation.len() != d.region_count {
        failures.push(ActionCheck::Malformed(format!(
            "action permutes {} regions but the diagram has {}",
            a.permutation.len(),
            d.region_count
        )));
        return ActionReport { failures };
    }
    let order = a.order();
    if order != Some(u64::from(a.period)) {
        failures.push(ActionCheck::Order { declared: a.period, actual: order });
    }
    if order.is_none() {
        return ActionReport { failures };
    }
    if a.permutation[0] != 0 {
        failures.push(ActionCheck::MovesDeletedRegion { image: a.permutation[0] });
        return ActionReport { failures };
    }
    let g = goeritz(d).expect("validated diagram");
    let f = induced_action_matrix(d, a).expect("checked above");
    if !crate::equivariance::is_isometry(&f, &g) {
        failures.push(ActionCheck::NotIsometry);
    }
    ActionReport { failures }
}
