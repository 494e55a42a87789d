//! JSON descriptors for instances and their conversion to library values.
//!
//! Quantale elements are written as strings (`"1/2"`, `"inf"`, table labels).
//! A descriptor may omit its quantale, in which case a caller-supplied default
//! is used.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;
use thiserror::Error;

use crate::group::{FiniteGroup, GroupAction, GroupError, GroupSpec, TableEntry};
use crate::quantale::{Quantale, QuantaleError, QuantaleSpec};
use crate::vgroup::{VGroup, VGroupError, VGroupHom};
use crate::vrel::{VCategory, VRel, VRelError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Shape(String),
    #[error("no quantale given (add a \"quantale\" field or pass one explicitly)")]
    MissingQuantale,
    #[error("{path}: {source}")]
    Entry { path: String, source: QuantaleError },
    #[error(transparent)]
    Quantale(#[from] QuantaleError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    VRel(#[from] VRelError),
    #[error(transparent)]
    VGroup(#[from] VGroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VCategoryDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantale: Option<QuantaleSpec>,
    pub carrier: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VGroupDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantale: Option<QuantaleSpec>,
    pub delta: Vec<String>,
}

/// `phi[y][x] = φ_y(x)` for `by` acting on `on`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDesc {
    pub on: GroupSpec,
    pub by: GroupSpec,
    pub phi: Vec<Vec<usize>>,
}

/// Kernel and quotient default to the groups of the action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantale: Option<QuantaleSpec>,
    pub action: ActionDesc,
    pub kernel: VGroupDesc,
    pub quotient: VGroupDesc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDesc {
    pub source: VGroupDesc,
    pub target: VGroupDesc,
    pub map: Vec<usize>,
}

/// Any instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Descriptor {
    Quantale(QuantaleSpec),
    VCategory(VCategoryDesc),
    VGroup(VGroupDesc),
    Split(SplitDesc),
    Hom(HomDesc),
}

impl Descriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            Descriptor::Quantale(_) => "quantale",
            Descriptor::VCategory(_) => "vcategory",
            Descriptor::VGroup(_) => "vgroup",
            Descriptor::Split(_) => "split_extension",
            Descriptor::Hom(_) => "hom",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptors serialize")
    }
}

/// Parses any descriptor, dispatching on its keys.
pub fn parse_descriptor(text: &str) -> Result<Descriptor, IoError> {
    let json: Json = serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Json::Object(map) = &json else {
        return Err(IoError::Shape("expected a JSON object".into()));
    };
    let has = |k: &str| map.contains_key(k);
    let shape = |kind: &str, e: serde_json::Error| {
        IoError::Shape(format!("invalid {kind} descriptor: {e}"))
    };
    Ok(if has("action") {
        Descriptor::Split(serde_json::from_value(json).map_err(|e| shape("split extension", e))?)
    } else if has("map") {
        Descriptor::Hom(serde_json::from_value(json).map_err(|e| shape("hom", e))?)
    } else if has("delta") {
        Descriptor::VGroup(serde_json::from_value(json).map_err(|e| shape("V-group", e))?)
    } else if has("matrix") {
        Descriptor::VCategory(serde_json::from_value(json).map_err(|e| shape("V-category", e))?)
    } else if has("kind") {
        Descriptor::Quantale(serde_json::from_value(json).map_err(|e| shape("quantale", e))?)
    } else {
        return Err(IoError::Shape(
            "unrecognized descriptor: expected one of the keys kind, matrix, delta, action, map"
                .into(),
        ));
    })
}

fn quantale(
    own: Option<&QuantaleSpec>,
    default: Option<&QuantaleSpec>,
) -> Result<Arc<Quantale>, IoError> {
    Ok(own.or(default).ok_or(IoError::MissingQuantale)?.build()?)
}

/// A descriptor for `g`: its catalog name when that rebuilds `g`, otherwise
/// its Cayley table.
pub fn group_spec(g: &FiniteGroup) -> GroupSpec {
    if let Ok(spec) = g.name().parse::<GroupSpec>() {
        if spec.build().is_ok_and(|h| h == *g) {
            return spec;
        }
    }
    GroupSpec::Table {
        labels: g.labels().to_vec(),
        add: g
            .table()
            .into_iter()
            .map(|r| r.into_iter().map(TableEntry::Index).collect())
            .collect(),
    }
}

impl VCategoryDesc {
    pub fn build(&self, default: Option<&QuantaleSpec>) -> Result<VRel, IoError> {
        let q = quantale(self.quantale.as_ref(), default)?;
        let n = self.carrier.len();
        if self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(IoError::Shape(format!(
                "matrix must be {n}x{n} for a carrier of {n} points"
            )));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                q.parse_value(s).map_err(|source| IoError::Entry {
                    path: format!("matrix[{i}][{j}]"),
                    source,
                })?;
            }
        }
        Ok(VRel::parse(
            q,
            self.carrier.clone(),
            self.carrier.clone(),
            &self.matrix,
        )?)
    }

    pub fn from_rel(a: &VRel) -> Self {
        VCategoryDesc {
            quantale: Some(a.quantale().spec().clone()),
            carrier: a.source().to_vec(),
            matrix: a.to_strings(),
        }
    }

    pub fn from_category(a: &VCategory) -> Self {
        Self::from_rel(a.rel())
    }
}

impl VGroupDesc {
    /// Builds and validates the V-group. `group` and `quantale` fall back to
    /// the given defaults.
    pub fn build(
        &self,
        group: Option<&Arc<FiniteGroup>>,
        default: Option<&QuantaleSpec>,
    ) -> Result<VGroup, IoError> {
        let q = quantale(self.quantale.as_ref(), default)?;
        let g = match (&self.group, group) {
            (Some(spec), _) => Arc::new(spec.build()?),
            (None, Some(g)) => g.clone(),
            (None, None) => {
                return Err(IoError::Shape(
                    "V-group descriptor needs a \"group\"".into(),
                ))
            }
        };
        if self.delta.len() != g.order() {
            return Err(IoError::Shape(format!(
                "delta has {} entries but {} has order {}",
                self.delta.len(),
                g.name(),
                g.order()
            )));
        }
        for (i, s) in self.delta.iter().enumerate() {
            q.parse_value(s).map_err(|source| IoError::Entry {
                path: format!("delta[{i}]"),
                source,
            })?;
        }
        let delta: Vec<&str> = self.delta.iter().map(String::as_str).collect();
        Ok(VGroup::parse(g, q, &delta)?)
    }

    pub fn from_vgroup(x: &VGroup) -> Self {
        VGroupDesc {
            group: Some(group_spec(x.group())),
            quantale: Some(x.quantale().spec().clone()),
            delta: x.delta().iter().map(|v| x.quantale().format(v)).collect(),
        }
    }
}

impl ActionDesc {
    pub fn build(&self) -> Result<GroupAction, IoError> {
        let on = Arc::new(self.on.build()?);
        let by = Arc::new(self.by.build()?);
        Ok(GroupAction::new(by, on, self.phi.clone())?)
    }

    pub fn from_action(a: &GroupAction) -> Self {
        ActionDesc {
            on: group_spec(&a.on),
            by: group_spec(&a.acting),
            phi: a.phi.clone(),
        }
    }
}

/// A parsed split-extension instance.
#[derive(Debug, Clone)]
pub struct SplitInput {
    pub action: GroupAction,
    pub kernel: VGroup,
    pub quotient: VGroup,
}

impl SplitDesc {
    pub fn build(&self, default: Option<&QuantaleSpec>) -> Result<SplitInput, IoError> {
        let action = self.action.build()?;
        let q = self.quantale.as_ref().or(default);
        Ok(SplitInput {
            kernel: self.kernel.build(Some(&action.on), q)?,
            quotient: self.quotient.build(Some(&action.acting), q)?,
            action,
        })
    }

    pub fn from_parts(action: &GroupAction, kernel: &VGroup, quotient: &VGroup) -> Self {
        SplitDesc {
            quantale: None,
            action: ActionDesc::from_action(action),
            kernel: VGroupDesc::from_vgroup(kernel),
            quotient: VGroupDesc::from_vgroup(quotient),
        }
    }
}

impl HomDesc {
    pub fn build(&self, default: Option<&QuantaleSpec>) -> Result<VGroupHom, IoError> {
        let source = self.source.build(None, default)?;
        let target = self.target.build(None, default)?;
        Ok(VGroupHom::new(source, target, self.map.clone())?)
    }

    pub fn from_hom(f: &VGroupHom) -> Self {
        HomDesc {
            source: VGroupDesc::from_vgroup(&f.source),
            target: VGroupDesc::from_vgroup(&f.target),
            map: f.map.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatches_on_keys() {
        let q = parse_descriptor(r#"{"kind":"chain","n":3}"#).unwrap();
        assert_eq!(q, Descriptor::Quantale(QuantaleSpec::Chain { n: 3 }));
        let c =
            parse_descriptor(r#"{"carrier":["x","y"],"matrix":[["1","1/2"],["0","1"]]}"#).unwrap();
        let Descriptor::VCategory(c) = c else {
            panic!()
        };
        let chain3 = QuantaleSpec::Chain { n: 3 };
        let rel = c.build(Some(&chain3)).unwrap();
        assert_eq!(rel.format_entry(0, 1), "1/2");
        assert!(matches!(c.build(None), Err(IoError::MissingQuantale)));
    }

    #[test]
    fn vgroup_round_trip() {
        let text = r#"{"group":{"kind":"cyclic","n":3},"quantale":{"kind":"pplus"},"delta":["0","1","2"]}"#;
        let Descriptor::VGroup(d) = parse_descriptor(text).unwrap() else {
            panic!()
        };
        let x = d.build(None, None).unwrap();
        let back = VGroupDesc::from_vgroup(&x);
        assert_eq!(back, d);
        assert_eq!(
            parse_descriptor(&Descriptor::VGroup(back.clone()).to_json()).unwrap(),
            Descriptor::VGroup(back)
        );
    }

    #[test]
    fn table_groups_round_trip() {
        let g = FiniteGroup::symmetric(3).with_name("perm");
        let spec = group_spec(&g);
        assert!(matches!(spec, GroupSpec::Table { .. }));
        let h = spec.build().unwrap();
        assert_eq!(h.table(), g.table());
        assert_eq!(group_spec(&FiniteGroup::klein()), GroupSpec::Klein);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_descriptor("{\"kind\": \n  \"chain\",").unwrap_err();
        assert!(matches!(err, IoError::Syntax { line: 2, .. }), "{err}");
        let text = r#"{"group":{"kind":"cyclic","n":2},"quantale":{"kind":"chain","n":3},"delta":["1","x/2"]}"#;
        let Descriptor::VGroup(d) = parse_descriptor(text).unwrap() else {
            panic!()
        };
        let err = d.build(None, None).unwrap_err();
        assert!(err.to_string().starts_with("delta[1]:"), "{err}");
        let text = r#"{"group":{"kind":"cyclic","n":2},"quantale":{"kind":"chain","n":3},"delta":["1/2","1"]}"#;
        let Descriptor::VGroup(d) = parse_descriptor(text).unwrap() else {
            panic!()
        };
        assert!(d
            .build(None, None)
            .unwrap_err()
            .to_string()
            .contains("k = ⊤"));
    }

    #[test]
    fn split_defaults_to_action_groups() {
        let text = r#"{"quantale":{"kind":"lukasiewicz_chain","n":3},
            "action":{"on":{"kind":"cyclic","n":2},"by":{"kind":"cyclic","n":2},"phi":[[0,1],[0,1]]},
            "kernel":{"delta":["1","1/2"]},"quotient":{"delta":["1","1/2"]}}"#;
        let Descriptor::Split(d) = parse_descriptor(text).unwrap() else {
            panic!()
        };
        let s = d.build(None).unwrap();
        assert_eq!(s.kernel.group().order(), 2);
        assert!(s.action.is_trivial());
    }
}
