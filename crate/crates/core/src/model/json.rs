//! On-disk JSON schema for instances.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::committee::Committee;
use crate::constraints::{Constraint, Row};
use crate::error::{Error, Result};
use crate::model::instance::{AxiomPolicy, Instance, Mode};
use crate::model::utility::{Coverage, UtilityFunction};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    pub n: usize,
    pub candidates: Vec<String>,
    pub utilities: Vec<UtilityJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default = "cardinality")]
    pub constraint: ConstraintJson,
}

fn cardinality() -> ConstraintJson {
    ConstraintJson::Cardinality
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum UtilityJson {
    Approval {
        approved: Vec<usize>,
    },
    Additive {
        weights: Vec<Q>,
    },
    Coverage {
        /// Per candidate, the element ids it covers.
        elements: Vec<Vec<usize>>,
        /// Per element, its weight.
        weights: Vec<Q>,
    },
    Xos {
        clauses: Vec<Vec<Q>>,
    },
    Table {
        entries: Vec<TableEntryJson>,
    },
    Lb00 {
        beta: u32,
        r: u32,
        primary: usize,
        secondary: usize,
        parties: Vec<Option<usize>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntryJson {
    pub set: Vec<usize>,
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConstraintJson {
    Cardinality,
    Explicit { sets: Vec<Vec<usize>> },
    Partition { groups: Vec<Vec<usize>>, caps: Vec<usize> },
    Packing { rows: Vec<RowJson> },
    Covering { rows: Vec<RowJson> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowJson {
    pub set: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<usize>,
}

impl UtilityJson {
    pub fn into_utility(self) -> Result<UtilityFunction> {
        Ok(match self {
            UtilityJson::Approval { approved } => UtilityFunction::Approval(approved.into()),
            UtilityJson::Additive { weights } => {
                UtilityFunction::Additive(weights.into_iter().map(|q| q.0).collect())
            }
            UtilityJson::Coverage { elements, weights } => UtilityFunction::Coverage(Coverage {
                covers: elements,
                weights: weights.into_iter().map(|q| q.0).collect(),
            }),
            UtilityJson::Xos { clauses } => UtilityFunction::Xos(
                clauses
                    .into_iter()
                    .map(|c| c.into_iter().map(|q| q.0).collect())
                    .collect(),
            ),
            UtilityJson::Table { entries } => {
                let mut map = BTreeMap::new();
                for e in entries {
                    let key = Committee::from(e.set);
                    if map.insert(key.clone(), e.value.0).is_some() {
                        return Err(Error::MalformedUtility(format!(
                            "table lists {key} twice"
                        )));
                    }
                }
                UtilityFunction::Table(map)
            }
            UtilityJson::Lb00 {
                beta,
                r,
                primary,
                secondary,
                parties,
            } => UtilityFunction::lb00(beta, r, primary, secondary, parties)?,
        })
    }

    pub fn from_utility(u: &UtilityFunction) -> Self {
        let qs = |v: &[crate::rational::Rational]| v.iter().cloned().map(Q).collect();
        match u {
            UtilityFunction::Approval(a) => UtilityJson::Approval {
                approved: a.as_slice().to_vec(),
            },
            UtilityFunction::Additive(w) => UtilityJson::Additive { weights: qs(w) },
            UtilityFunction::Coverage(c) => UtilityJson::Coverage {
                elements: c.covers.clone(),
                weights: qs(&c.weights),
            },
            UtilityFunction::Xos(cl) => UtilityJson::Xos {
                clauses: cl.iter().map(|c| qs(c)).collect(),
            },
            UtilityFunction::Table(map) => UtilityJson::Table {
                entries: map
                    .iter()
                    .map(|(k, v)| TableEntryJson {
                        set: k.as_slice().to_vec(),
                        value: Q(v.clone()),
                    })
                    .collect(),
            },
            UtilityFunction::Lb00(l) => UtilityJson::Lb00 {
                beta: l.beta(),
                r: l.r(),
                primary: l.primary(),
                secondary: l.secondary(),
                parties: l.parties().to_vec(),
            },
        }
    }
}

impl ConstraintJson {
    pub fn into_constraint(self) -> Result<Constraint> {
        let row = |r: RowJson, packing: bool| -> Result<Row> {
            let bound = match (packing, r.cap, r.min) {
                (true, Some(c), None) => c,
                (false, None, Some(m)) => m,
                _ => {
                    return Err(Error::MalformedInstance(format!(
                        "{} rows need exactly the {:?} field",
                        if packing { "packing" } else { "covering" },
                        if packing { "cap" } else { "min" }
                    )))
                }
            };
            Ok(Row {
                set: r.set.into(),
                bound,
            })
        };
        Ok(match self {
            ConstraintJson::Cardinality => Constraint::Cardinality,
            ConstraintJson::Explicit { sets } => {
                Constraint::Explicit(sets.into_iter().map(Committee::from).collect::<BTreeSet<_>>())
            }
            ConstraintJson::Partition { groups, caps } => Constraint::Partition {
                groups: groups.into_iter().map(Committee::from).collect(),
                caps,
            },
            ConstraintJson::Packing { rows } => Constraint::Packing(
                rows.into_iter()
                    .map(|r| row(r, true))
                    .collect::<Result<_>>()?,
            ),
            ConstraintJson::Covering { rows } => Constraint::Covering(
                rows.into_iter()
                    .map(|r| row(r, false))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    pub fn from_constraint(c: &Constraint) -> Result<Self> {
        let rows = |rs: &[Row], packing: bool| -> Vec<RowJson> {
            rs.iter()
                .map(|r| RowJson {
                    set: r.set.as_slice().to_vec(),
                    cap: packing.then_some(r.bound),
                    min: (!packing).then_some(r.bound),
                })
                .collect()
        };
        Ok(match c {
            Constraint::Cardinality => ConstraintJson::Cardinality,
            Constraint::Explicit(sets) => ConstraintJson::Explicit {
                sets: sets.iter().map(|s| s.as_slice().to_vec()).collect(),
            },
            Constraint::Partition { groups, caps } => ConstraintJson::Partition {
                groups: groups.iter().map(|g| g.as_slice().to_vec()).collect(),
                caps: caps.clone(),
            },
            Constraint::Packing(rs) => ConstraintJson::Packing {
                rows: rows(rs, true),
            },
            Constraint::Covering(rs) => ConstraintJson::Covering {
                rows: rows(rs, false),
            },
            Constraint::Matroid { name, .. } => {
                return Err(Error::UnsupportedConstraint(format!(
                    "matroid oracle {name:?} has no JSON form"
                )))
            }
        })
    }
}

impl InstanceJson {
    pub fn into_instance(self, policy: AxiomPolicy) -> Result<Instance> {
        if self.n != self.utilities.len() {
            return Err(Error::MalformedInstance(format!(
                "n = {} but {} utilities are listed",
                self.n,
                self.utilities.len()
            )));
        }
        let mode = match (self.k, self.sizes, self.budget) {
            (Some(k), None, None) => Mode::Committee { k },
            (None, Some(sizes), Some(budget)) => Mode::Budget { sizes, budget },
            _ => {
                return Err(Error::MalformedInstance(
                    "set exactly one of \"k\" or {\"sizes\", \"budget\"}".into(),
                ))
            }
        };
        let utilities = self
            .utilities
            .into_iter()
            .enumerate()
            .map(|(i, u)| {
                u.into_utility()
                    .map_err(|e| Error::MalformedUtility(format!("voter {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(
            self.candidates,
            utilities,
            mode,
            self.constraint.into_constraint()?,
            policy,
        )
    }

    pub fn from_instance(inst: &Instance) -> Result<Self> {
        let (k, sizes, budget) = match inst.mode() {
            Mode::Committee { k } => (Some(*k), None, None),
            Mode::Budget { sizes, budget } => (None, Some(sizes.clone()), Some(*budget)),
        };
        Ok(InstanceJson {
            n: inst.n(),
            candidates: inst.candidates().to_vec(),
            utilities: inst.utilities().iter().map(UtilityJson::from_utility).collect(),
            k,
            sizes,
            budget,
            constraint: ConstraintJson::from_constraint(inst.family().constraint())?,
        })
    }
}

impl Instance {
    pub fn from_json_str(s: &str, policy: AxiomPolicy) -> Result<Instance> {
        let parsed: InstanceJson = serde_json::from_str(s)?;
        parsed.into_instance(policy)
    }

    pub fn to_json(&self) -> Result<InstanceJson> {
        InstanceJson::from_instance(self)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json()?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "n": 2,
        "candidates": ["x", "y", "z"],
        "utilities": [
            {"kind": "approval", "approved": [0, 2]},
            {"kind": "additive", "weights": [1, "1/2", 0]}
        ],
        "k": 2,
        "constraint": {"kind": "packing", "rows": [{"set": [0, 1], "cap": 1}]}
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let inst = Instance::from_json_str(SAMPLE, AxiomPolicy::Check).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.k(), Some(2));
        let text = inst.to_json_string().unwrap();
        let again = Instance::from_json_str(&text, AxiomPolicy::Check).unwrap();
        assert_eq!(again.to_json().unwrap(), inst.to_json().unwrap());
    }

    #[test]
    fn rejects_both_modes_and_float_weights() {
        let both = SAMPLE.replace("\"k\": 2,", "\"k\": 2, \"sizes\": [1,1,1], \"budget\": 2,");
        assert!(Instance::from_json_str(&both, AxiomPolicy::Check).is_err());
        let float = SAMPLE.replace("\"1/2\"", "0.5");
        assert!(Instance::from_json_str(&float, AxiomPolicy::Check).is_err());
        let unknown = SAMPLE.replace("\"k\": 2,", "\"k\": 2, \"extra\": 1,");
        assert!(Instance::from_json_str(&unknown, AxiomPolicy::Check).is_err());
    }

    #[test]
    fn missing_constraint_defaults_to_cardinality() {
        let text = r#"{"n":1,"candidates":["a"],"utilities":[{"kind":"approval","approved":[0]}],"k":1}"#;
        let inst = Instance::from_json_str(text, AxiomPolicy::Check).unwrap();
        assert_eq!(inst.family().constraint().kind_name(), "cardinality");
    }

    #[test]
    fn table_must_be_monotone_under_checking() {
        let text = r#"{"n":1,"candidates":["a","b"],"k":2,"utilities":[{"kind":"table","entries":[
            {"set":[0],"value":1},{"set":[1],"value":0},{"set":[0,1],"value":"1/2"}]}]}"#;
        assert!(matches!(
            Instance::from_json_str(text, AxiomPolicy::Check),
            Err(Error::MalformedUtility(_))
        ));
        assert!(Instance::from_json_str(text, AxiomPolicy::Trust).is_ok());
    }
}
