//! JSON documents read and written by the command line tool.
//!
//! Rationals are always strings (`p/q`, `p` or `inf`). Opens are referred to
//! by their index in the canonical sorted open list printed by `space info`;
//! documents that do so carry the checksum of that list.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use powerdomain::{ContinuousMap, Ext, FiniteSpace, QLowerSemiFn, QValuation};

use crate::error::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opens: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preorder: Option<Vec<(String, String)>>,
}

/// A space given inline or as a path to a space document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(String),
    Inline(SpaceDocument),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuationDocument {
    pub schema: u32,
    pub space: SpaceRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, Ext>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Ext>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checksum: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDocument {
    pub schema: u32,
    /// Point values; missing points are 0.
    pub values: BTreeMap<String, Ext>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub schema: u32,
    pub target: SpaceRef,
    pub assignment: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDocument {
    pub coefficient: Ext,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, Ext>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Ext>>,
}

/// `Σⱼ cⱼ·δ_{νⱼ}` over one space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureDocument {
    pub schema: u32,
    pub space: SpaceRef,
    pub atoms: Vec<AtomDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checksum: Option<String>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn check_schema(schema: u32) -> Result<(), CliError> {
    if schema != SCHEMA {
        return Err(CliError::Malformed(format!("unsupported schema version {schema}")));
    }
    Ok(())
}

impl SpaceDocument {
    pub fn build(&self) -> Result<FiniteSpace, CliError> {
        check_schema(self.schema)?;
        match (&self.opens, &self.preorder) {
            (Some(opens), None) => Ok(FiniteSpace::from_opens(&self.points, opens)?),
            (None, Some(pairs)) => {
                // Reflexive pairs may be left out; transitivity is still checked.
                let mut pairs = pairs.clone();
                pairs.extend(self.points.iter().map(|p| (p.clone(), p.clone())));
                Ok(FiniteSpace::from_preorder(&self.points, &pairs)?)
            }
            _ => Err(CliError::Malformed("a space needs exactly one of \"opens\" and \"preorder\"".into())),
        }
    }

    /// The preorder form, listing every related pair including reflexive ones.
    pub fn of(space: &FiniteSpace, name: Option<String>) -> Self {
        let preorder = space
            .specialization()
            .into_iter()
            .map(|(x, y)| (space.name(x).to_owned(), space.name(y).to_owned()))
            .collect();
        SpaceDocument { schema: SCHEMA, name, points: space.names().to_vec(), opens: None, preorder: Some(preorder) }
    }
}

impl SpaceRef {
    /// Resolves a path relative to the directory of the referring document.
    pub fn load(&self, base: &Path) -> Result<FiniteSpace, CliError> {
        match self {
            SpaceRef::Inline(doc) => doc.build(),
            SpaceRef::Path(p) => {
                let path = resolve(base, p);
                read_json::<SpaceDocument>(&path)?.build()
            }
        }
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_owned()
    } else {
        base.parent().unwrap_or_else(|| Path::new("")).join(path)
    }
}

pub fn load_space(path: &Path) -> Result<FiniteSpace, CliError> {
    read_json::<SpaceDocument>(path)?.build()
}

/// The canonical open list as point names.
pub fn open_list(space: &FiniteSpace) -> Vec<Vec<String>> {
    space.opens().iter().map(|u| space.render(u)).collect()
}

pub fn checksum(space: &FiniteSpace) -> String {
    let text = serde_json::to_string(&open_list(space)).expect("strings serialize");
    let digest = Sha256::digest(text.as_bytes());
    format!("sha256:{digest:x}")
}

fn point_index(space: &FiniteSpace, name: &str) -> Result<usize, CliError> {
    space.index_of(name).ok_or_else(|| CliError::Malformed(format!("unknown point {name:?}")))
}

/// Per-point values with missing points read as 0.
pub fn point_values(space: &FiniteSpace, map: &BTreeMap<String, Ext>) -> Result<Vec<Ext>, CliError> {
    let mut out = vec![Ext::zero(); space.len()];
    for (name, v) in map {
        out[point_index(space, name)?] = v.clone();
    }
    Ok(out)
}

fn valuation_from(
    space: &FiniteSpace,
    weights: &Option<BTreeMap<String, Ext>>,
    table: &Option<BTreeMap<String, Ext>>,
    sum: &Option<String>,
) -> Result<QValuation, CliError> {
    match (weights, table) {
        (Some(w), None) => Ok(QValuation::from_weights(space, &point_values(space, w)?)?),
        (None, Some(t)) => {
            let expected = checksum(space);
            match sum {
                Some(s) if *s == expected => {}
                Some(s) => {
                    return Err(CliError::Malformed(format!("open-list checksum {s} does not match {expected}")))
                }
                None => return Err(CliError::Malformed("a table needs the checksum of the open list".into())),
            }
            let n = space.opens().len();
            let mut values: Vec<Option<Ext>> = vec![None; n];
            for (key, v) in t {
                let i: usize = key.parse().map_err(|_| CliError::Malformed(format!("open index {key:?}")))?;
                let slot = values.get_mut(i).ok_or_else(|| CliError::Malformed(format!("open index {i} ≥ {n}")))?;
                *slot = Some(v.clone());
            }
            let values = values
                .into_iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| CliError::Malformed(format!("no value for open {i}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(QValuation::validate(space, values)?)
        }
        _ => Err(CliError::Malformed("a valuation needs exactly one of \"weights\" and \"table\"".into())),
    }
}

impl ValuationDocument {
    pub fn load(path: &Path) -> Result<QValuation, CliError> {
        let doc: ValuationDocument = read_json(path)?;
        check_schema(doc.schema)?;
        let space = doc.space.load(path)?;
        valuation_from(&space, &doc.weights, &doc.table, &doc.checksum)
    }

    /// Table form with the space inline.
    pub fn of(nu: &QValuation) -> Self {
        let space = nu.space();
        let table = nu.table().iter().enumerate().map(|(i, v)| (i.to_string(), v.clone())).collect();
        ValuationDocument {
            schema: SCHEMA,
            space: SpaceRef::Inline(SpaceDocument::of(space, None)),
            weights: None,
            table: Some(table),
            checksum: Some(checksum(space)),
        }
    }
}

impl FunctionDocument {
    pub fn load(path: &Path, space: &FiniteSpace) -> Result<QLowerSemiFn, CliError> {
        let doc: FunctionDocument = read_json(path)?;
        check_schema(doc.schema)?;
        Ok(QLowerSemiFn::new(space, point_values(space, &doc.values)?)?)
    }
}

impl MapDocument {
    pub fn load(path: &Path, source: &FiniteSpace) -> Result<ContinuousMap, CliError> {
        let doc: MapDocument = read_json(path)?;
        check_schema(doc.schema)?;
        let target = doc.target.load(path)?;
        let mut assignment = vec![None; source.len()];
        for (x, y) in &doc.assignment {
            assignment[point_index(source, x)?] = Some(point_index(&target, y)?);
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| CliError::Malformed(format!("point {:?} is not mapped", source.name(x)))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ContinuousMap::new(source.clone(), target, assignment)?)
    }
}

impl MixtureDocument {
    pub fn load(path: &Path) -> Result<powerdomain::valuation::SimpleSecondOrder<powerdomain::Rational>, CliError> {
        let doc: MixtureDocument = read_json(path)?;
        check_schema(doc.schema)?;
        let space = doc.space.load(path)?;
        let atoms = doc
            .atoms
            .iter()
            .map(|a| Ok((a.coefficient.clone(), valuation_from(&space, &a.weights, &a.table, &doc.checksum)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(powerdomain::valuation::SimpleSecondOrder::new(&space, atoms)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_documents_round_trip() {
        let s = FiniteSpace::sierpinski();
        let doc = SpaceDocument::of(&s, Some("S".into()));
        let text = serde_json::to_string(&doc).unwrap();
        let back: SpaceDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.build().unwrap(), s);
    }

    #[test]
    fn both_or_neither_topology_is_malformed() {
        let doc = SpaceDocument { schema: 1, name: None, points: vec!["a".into()], opens: None, preorder: None };
        assert!(matches!(doc.build(), Err(CliError::Malformed(_))));
    }

    #[test]
    fn checksum_tracks_the_open_list() {
        let again = FiniteSpace::from_preorder(&["0", "1"], &[("0", "0"), ("0", "1"), ("1", "1")]).unwrap();
        assert_eq!(checksum(&FiniteSpace::sierpinski()), checksum(&again));
        assert_ne!(checksum(&FiniteSpace::sierpinski()), checksum(&FiniteSpace::discrete(2)));
    }
}
