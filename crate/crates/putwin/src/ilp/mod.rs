//! Feasibility ILP models: binary variables, named linear constraints,
//! a solver-portable LP text emitter, and an exact assignment checker
//! used to validate the formulations against the search solvers.

mod rp;
mod stv;

pub use rp::{build_rp_ilp, ranking_to_assignment};
pub use stv::{build_stv_ilp, elimination_to_assignment};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
        }
    }
}

/// How the LP emitter writes a constraint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    #[default]
    General,
    /// `y - 0.5 a - 0.5 b <= 0`, equivalent over binaries to the pair
    /// `y - a <= 0`, `y - b <= 0`; the emitter writes the pair so the
    /// file stays integer-coefficient for picky solver front ends.
    HalfBoundPair,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    /// (coefficient, variable id) pairs.
    pub terms: Vec<(f64, usize)>,
    pub op: CmpOp,
    pub rhs: f64,
    #[serde(default)]
    pub kind: ConstraintKind,
}

/// A pure feasibility model over binary variables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IlpModel {
    pub name: String,
    vars: Vec<String>,
    #[serde(skip)]
    var_index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
}

impl IlpModel {
    pub fn new(name: impl Into<String>) -> Self {
        IlpModel {
            name: name.into(),
            vars: Vec::new(),
            var_index: HashMap::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: String) -> Result<usize> {
        if self.var_index.contains_key(&name) {
            return Err(Error::Validation(format!("duplicate variable {name}")));
        }
        let id = self.vars.len();
        self.var_index.insert(name.clone(), id);
        self.vars.push(name);
        Ok(id)
    }

    pub fn var_id(&self, name: &str) -> Option<usize> {
        self.var_index.get(name).copied()
    }

    pub fn var_name(&self, id: usize) -> &str {
        &self.vars[id]
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add_constraint(
        &mut self,
        name: String,
        terms: Vec<(f64, usize)>,
        op: CmpOp,
        rhs: f64,
    ) -> Result<()> {
        self.add_constraint_kind(name, terms, op, rhs, ConstraintKind::General)
    }

    pub fn add_constraint_kind(
        &mut self,
        name: String,
        terms: Vec<(f64, usize)>,
        op: CmpOp,
        rhs: f64,
        kind: ConstraintKind,
    ) -> Result<()> {
        for &(_, id) in &terms {
            if id >= self.vars.len() {
                return Err(Error::Validation(format!(
                    "constraint {name} references undeclared variable id {id}"
                )));
            }
        }
        self.constraints.push(Constraint {
            name,
            terms,
            op,
            rhs,
            kind,
        });
        Ok(())
    }

    /// Structural checks: unique constraint names, declared variables.
    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for c in &self.constraints {
            if !names.insert(&c.name) {
                return Err(Error::Validation(format!(
                    "duplicate constraint name {}",
                    c.name
                )));
            }
        }
        Ok(())
    }

    /// Machine-readable sidecar (JSON) carrying the full model for the
    /// assignment checker.
    pub fn to_meta_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn from_meta_json(text: &str) -> Result<Self> {
        let mut model: IlpModel =
            serde_json::from_str(text).map_err(|e| Error::parse(0, e.to_string()))?;
        model.var_index = model
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Ok(model)
    }
}

/// A total 0/1 assignment, keyed by variable name.
pub type Assignment = BTreeMap<String, bool>;

/// Parse an assignment file: one `name 0|1` pair per line, `#`
/// comments and blank lines ignored.
pub fn parse_assignment(text: &str) -> Result<Assignment> {
    let mut asg = Assignment::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let name = parts.next().unwrap();
        let value = parts
            .next()
            .ok_or_else(|| Error::parse(i + 1, "expected `name 0|1`"))?;
        let value = match value {
            "0" => false,
            "1" => true,
            other => return Err(Error::parse(i + 1, format!("bad value {other:?}"))),
        };
        if asg.insert(name.to_string(), value).is_some() {
            return Err(Error::parse(i + 1, format!("variable {name} assigned twice")));
        }
    }
    Ok(asg)
}

pub fn serialize_assignment(asg: &Assignment) -> String {
    let mut out = String::new();
    for (name, value) in asg {
        out.push_str(&format!("{} {}\n", name, u8::from(*value)));
    }
    out
}

/// Evaluate every constraint exactly; returns the names of all
/// violated constraints (empty means satisfied). The assignment must
/// cover every model variable.
pub fn check_assignment(model: &IlpModel, asg: &Assignment) -> Result<Vec<String>> {
    let mut values = Vec::with_capacity(model.vars.len());
    for name in &model.vars {
        match asg.get(name) {
            Some(&v) => values.push(v),
            None => {
                return Err(Error::Validation(format!(
                    "assignment is not total: missing {name}"
                )))
            }
        }
    }
    let mut violated = Vec::new();
    for c in &model.constraints {
        let lhs: f64 = c
            .terms
            .iter()
            .map(|&(coef, id)| if values[id] { coef } else { 0.0 })
            .sum();
        let ok = match c.op {
            CmpOp::Le => lhs <= c.rhs + 1e-9,
            CmpOp::Ge => lhs >= c.rhs - 1e-9,
            CmpOp::Eq => (lhs - c.rhs).abs() <= 1e-9,
        };
        if !ok {
            violated.push(c.name.clone());
        }
    }
    Ok(violated)
}

fn format_coef(c: f64) -> String {
    if c.fract() == 0.0 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

fn format_terms(model: &IlpModel, terms: &[(f64, usize)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, &(coef, id)) in terms.iter().enumerate() {
        let mag = coef.abs();
        if i == 0 {
            if coef < 0.0 {
                out.push_str("- ");
            }
        } else if coef < 0.0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if mag != 1.0 {
            out.push_str(&format_coef(mag));
            out.push(' ');
        }
        out.push_str(model.var_name(id));
    }
    out
}

/// Emit solver-portable LP text: an empty objective, a `Subject To`
/// section with one named row per constraint, a `Binary` section
/// declaring every variable, and the `End` terminator. Deterministic:
/// the same model yields identical bytes.
pub fn emit_lp_text(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("\\ model: {}\n", model.name));
    out.push_str("Minimize\n obj:\nSubject To\n");
    for c in &model.constraints {
        match c.kind {
            ConstraintKind::General => {
                out.push_str(&format!(
                    " {}: {} {} {}\n",
                    c.name,
                    format_terms(model, &c.terms),
                    c.op.symbol(),
                    format_coef(c.rhs)
                ));
            }
            ConstraintKind::HalfBoundPair => {
                // y - 0.5 a - 0.5 b <= 0 becomes y - a <= 0, y - b <= 0.
                let pos: Vec<(f64, usize)> =
                    c.terms.iter().copied().filter(|&(w, _)| w > 0.0).collect();
                let halves: Vec<usize> = c
                    .terms
                    .iter()
                    .filter(|&&(w, _)| w < 0.0)
                    .map(|&(_, id)| id)
                    .collect();
                for (suffix, half) in ["a", "b"].iter().zip(&halves) {
                    let mut terms = pos.clone();
                    terms.push((-1.0, *half));
                    out.push_str(&format!(
                        " {}_{}: {} {} {}\n",
                        c.name,
                        suffix,
                        format_terms(model, &terms),
                        c.op.symbol(),
                        format_coef(c.rhs)
                    ));
                }
            }
        }
    }
    out.push_str("Binary\n");
    for v in &model.vars {
        out.push_str(&format!(" {v}\n"));
    }
    out.push_str("End\n");
    out
}
