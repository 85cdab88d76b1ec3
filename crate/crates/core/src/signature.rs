//! Generator objects: finitely many named operations, each with a profile.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graded::{Arity, Profile, ProfileDoc, Sort, SortSet};

/// Index of an operation inside a [`Signature`].
pub type OpId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Operation {
    pub name: String,
    pub profile: Profile,
}

/// A finite generator object over a sort set. Operation names are unique.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    sorts: SortSet,
    ops: Vec<Operation>,
}

impl Signature {
    pub fn new(sorts: SortSet, ops: Vec<Operation>) -> Result<Self> {
        for (i, op) in ops.iter().enumerate() {
            op.profile.validate(&sorts)?;
            if op.name.is_empty() {
                return Err(invalid("operation names must be non-empty"));
            }
            if ops[..i].iter().any(|o| o.name == op.name) {
                return Err(invalid(format!("duplicate operation name `{}`", op.name)));
            }
        }
        Ok(Self { sorts, ops })
    }

    pub fn empty(sorts: &SortSet) -> Self {
        Self {
            sorts: sorts.clone(),
            ops: Vec::new(),
        }
    }

    /// Single-sorted signature from `(name, arity)` pairs.
    pub fn single_sorted(ops: &[(&str, usize)]) -> Self {
        let sorts = SortSet::single();
        let ops = ops
            .iter()
            .map(|&(n, k)| Operation {
                name: n.to_string(),
                profile: Profile::new(Sort(0), Arity::uniform(Sort(0), k)),
            })
            .collect();
        Self::new(sorts, ops).expect("single-sorted fixture is valid")
    }

    /// Builds a signature from `(name, "out<-(in,...)")` pairs.
    pub fn parse(sorts: &SortSet, ops: &[(&str, &str)]) -> Result<Self> {
        let ops = ops
            .iter()
            .map(|&(n, p)| {
                Ok(Operation {
                    name: n.to_string(),
                    profile: Profile::parse(p, sorts)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sorts.clone(), ops)
    }

    pub fn sorts(&self) -> &SortSet {
        &self.sorts
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn op(&self, id: OpId) -> &Operation {
        &self.ops[id]
    }

    pub fn find(&self, name: &str) -> Option<OpId> {
        self.ops.iter().position(|o| o.name == name)
    }

    /// Operations with exactly this profile, in signature order.
    pub fn at(&self, p: &Profile) -> Vec<OpId> {
        (0..self.ops.len()).filter(|&i| &self.ops[i].profile == p).collect()
    }

    pub fn with_output(&self, s: Sort) -> impl Iterator<Item = OpId> + '_ {
        (0..self.ops.len()).filter(move |&i| self.ops[i].profile.output == s)
    }

    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(|o| o.profile.inputs.len()).max().unwrap_or(0)
    }

    /// True when every operation is nullary, so that every free value is finite.
    pub fn is_nullary(&self) -> bool {
        self.ops.iter().all(|o| o.profile.inputs.is_empty())
    }

    /// `self ⊔ other`: the operations of `other` follow those of `self`.
    /// Clashing names from `other` are primed.
    pub fn disjoint_union(&self, other: &Signature) -> Result<Signature> {
        if self.sorts != other.sorts {
            return Err(invalid("signatures over different sorts"));
        }
        let mut ops = self.ops.clone();
        for op in &other.ops {
            let mut name = op.name.clone();
            while ops.iter().any(|o| o.name == name) {
                name.push('\'');
            }
            ops.push(Operation {
                name,
                profile: op.profile.clone(),
            });
        }
        Signature::new(self.sorts.clone(), ops)
    }

    pub fn to_doc(&self) -> SignatureDoc {
        SignatureDoc {
            sorts: self.sorts.names().to_vec(),
            ops: self
                .ops
                .iter()
                .map(|o| OperationDoc {
                    name: o.name.clone(),
                    output: self.sorts.name(o.profile.output).to_string(),
                    inputs: o.profile.inputs.0.iter().map(|&s| self.sorts.name(s).to_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &SignatureDoc) -> Result<Self> {
        let sorts = SortSet::new(doc.sorts.iter().cloned())?;
        let ops = doc
            .ops
            .iter()
            .map(|o| {
                let p = ProfileDoc {
                    output: o.output.clone(),
                    inputs: o.inputs.clone(),
                };
                Ok(Operation {
                    name: o.name.clone(),
                    profile: p.to_profile(&sorts)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Signature::new(sorts, ops)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("signature serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SignatureDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }
}

/// Signature file schema: `{sorts, ops: [{name, output, inputs}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureDoc {
    pub sorts: Vec<String>,
    pub ops: Vec<OperationDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationDoc {
    pub name: String,
    pub output: String,
    pub inputs: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_rejected() {
        let s = SortSet::single();
        let p = Profile::new(Sort(0), Arity::empty());
        let op = Operation {
            name: "c".into(),
            profile: p,
        };
        assert!(Signature::new(s, vec![op.clone(), op]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let sorts = SortSet::new(["v", "e"]).unwrap();
        let sig = Signature::parse(&sorts, &[("src", "v<-(e)"), ("edge", "e<-(v,v)")]).unwrap();
        let text = sig.to_json();
        assert!(text.contains("\"output\": \"e\""));
        let back = Signature::from_json(&text).unwrap();
        assert_eq!(back, sig);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn union_primes_clashes() {
        let a = Signature::single_sorted(&[("m", 2)]);
        let u = a.disjoint_union(&a).unwrap();
        assert_eq!(u.op(1).name, "m'");
        assert_eq!(u.len(), 2);
    }
}
