//! JSON formats for polytopes, models, valuations and sweep specs, and CSV tables.
//!
//! Rationals are written as `"p/q"` strings. Integers are accepted on input.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{AffineFunctional, ConcavePL, ConvexBody, HalfSpace, Point};
use crate::lattice::PointCloud;
use crate::rational::{fmt_rat, serde_rat, Rat};
use crate::series::{Backend, CanonicalCurve, GapRule, GradedSeriesModel, Levels, Synthetic};
use crate::thresholds::{MRule, ValuationModel};
use crate::{Error, Result};

/// A rational serialized as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JsonRat(#[serde(with = "serde_rat")] pub Rat);

fn wrap(v: &[Rat]) -> Vec<JsonRat> {
    v.iter().cloned().map(JsonRat).collect()
}

fn unwrap(v: Vec<JsonRat>) -> Vec<Rat> {
    v.into_iter().map(|r| r.0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpaceSpec {
    pub normal: Vec<JsonRat>,
    pub offset: JsonRat,
}

/// `{"dim": n, "vertices": [[..]], "halfspaces": [{"normal": [..], "offset": ..}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeSpec {
    pub dim: usize,
    #[serde(default)]
    pub vertices: Vec<Vec<JsonRat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<HalfSpaceSpec>>,
}

impl PolytopeSpec {
    pub fn from_body(b: &ConvexBody) -> Self {
        PolytopeSpec {
            dim: b.dim(),
            vertices: b.vertices().iter().map(|p| wrap(&p.0)).collect(),
            halfspaces: Some(
                b.halfspaces()
                    .iter()
                    .map(|h| HalfSpaceSpec { normal: wrap(&h.normal), offset: JsonRat(h.offset.clone()) })
                    .collect(),
            ),
        }
    }

    /// Builds the body. When both representations are given they must agree.
    pub fn to_body(&self) -> Result<ConvexBody> {
        let hs = self
            .halfspaces
            .as_ref()
            .map(|hs| {
                hs.iter()
                    .map(|h| HalfSpace::new(unwrap(h.normal.clone()), h.offset.0.clone()))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let from_v = if self.vertices.is_empty() {
            None
        } else {
            let pts: Vec<Point> = self.vertices.iter().map(|v| Point::new(unwrap(v.clone()))).collect();
            if let Some(bad) = pts.iter().find(|p| p.dim() != self.dim) {
                return Err(Error::DimensionMismatch { expected: self.dim, found: bad.dim() });
            }
            Some(ConvexBody::hull(&pts)?)
        };
        match (from_v, hs) {
            (Some(b), None) => Ok(b),
            (None, Some(hs)) => ConvexBody::from_halfspaces(self.dim, &hs),
            (Some(b), Some(hs)) => {
                let h = ConvexBody::from_halfspaces(self.dim, &hs)?;
                if h != b {
                    return Err(Error::Input("vertices and halfspaces describe different bodies".into()));
                }
                Ok(b)
            }
            (None, None) => Err(Error::Input("polytope needs vertices or halfspaces".into())),
        }
    }
}

pub fn polytope_from_json(s: &str) -> Result<ConvexBody> {
    serde_json::from_str::<PolytopeSpec>(s)?.to_body()
}

pub fn polytope_to_json(b: &ConvexBody) -> String {
    serde_json::to_string_pretty(&PolytopeSpec::from_body(b)).expect("polytope serializes")
}

pub fn pointcloud_to_json(c: &PointCloud) -> String {
    serde_json::to_string(c).expect("point cloud serializes")
}

pub fn pointcloud_from_json(s: &str) -> Result<PointCloud> {
    let c: PointCloud = serde_json::from_str(s)?;
    // Re-normalize order and duplicates.
    PointCloud::new(c.denominator(), c.points().to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendTag {
    Toric,
    Curve,
    Canonical,
    Synthetic,
}

/// `{"backend": "toric|curve|canonical|synthetic", "polytope": .., "genus": g,
/// "gaps": [..], "per_k_gaps": {..}, "per_k_points": {..}, "rule": .., "levels": [..]}`.
///
/// For `canonical`, `per_k_gaps` maps `k` to gap sets `{0..k(2g-2)} \ kΔ_k` and
/// `per_k_points` to `kΔ_k`. For `synthetic`, `per_k_gaps` maps `k` to lists of
/// integer numerators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub backend: BackendTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolytopeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_k_gaps: Option<BTreeMap<u64, serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_k_points: Option<BTreeMap<u64, Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<GapRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<BTreeSet<u64>>,
}

fn missing(field: &str, backend: &str) -> Error {
    Error::Input(format!("{backend} model needs {field:?}"))
}

fn from_value<T: serde::de::DeserializeOwned>(v: &serde_json::Value) -> Result<T> {
    Ok(serde_json::from_value(v.clone())?)
}

impl ModelSpec {
    pub fn to_model(&self) -> Result<GradedSeriesModel> {
        match self.backend {
            BackendTag::Toric => {
                let p = self.polytope.as_ref().ok_or_else(|| missing("polytope", "toric"))?;
                GradedSeriesModel::toric(p.to_body()?)
            }
            BackendTag::Curve => {
                GradedSeriesModel::curve_divisor(self.gaps.clone().ok_or_else(|| missing("gaps", "curve"))?)
            }
            BackendTag::Canonical => {
                let g = self.genus.ok_or_else(|| missing("genus", "canonical"))?;
                let c = match (&self.per_k_gaps, &self.per_k_points) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Input("give per_k_gaps or per_k_points, not both".into()))
                    }
                    (Some(gaps), None) => {
                        let gaps = gaps.iter().map(|(k, v)| Ok((*k, from_value(v)?))).collect::<Result<_>>()?;
                        CanonicalCurve::from_gap_sets(g, gaps)?
                    }
                    (None, pts) => CanonicalCurve::new(g, pts.clone().unwrap_or_default())?,
                };
                GradedSeriesModel::canonical_curve(c)
            }
            BackendTag::Synthetic => {
                let p = self.polytope.as_ref().ok_or_else(|| missing("polytope", "synthetic"))?;
                let mut gaps = BTreeMap::new();
                for (k, v) in self.per_k_gaps.iter().flatten() {
                    gaps.insert(*k, PointCloud::new(*k, from_value(v)?)?);
                }
                let levels = self.levels.clone().map_or(Levels::All, Levels::Finite);
                GradedSeriesModel::synthetic(p.to_body()?, Synthetic::new(gaps, self.rule)?, levels)
            }
        }
    }

    pub fn from_model(m: &GradedSeriesModel) -> Self {
        let mut spec = ModelSpec {
            backend: BackendTag::Toric,
            polytope: None,
            genus: None,
            gaps: None,
            per_k_gaps: None,
            per_k_points: None,
            rule: None,
            levels: match m.levels() {
                Levels::All => None,
                Levels::Finite(s) => Some(s.clone()),
            },
        };
        match m.backend() {
            Backend::Toric => spec.polytope = Some(PolytopeSpec::from_body(m.ambient())),
            Backend::CurveDivisor(c) => {
                spec.backend = BackendTag::Curve;
                spec.gaps = Some(c.gaps().to_vec());
            }
            Backend::CanonicalCurve(c) => {
                spec.backend = BackendTag::Canonical;
                spec.genus = Some(c.genus());
                if !c.patterns().is_empty() {
                    spec.per_k_points = Some(c.patterns().clone());
                }
            }
            Backend::Synthetic(s) => {
                spec.backend = BackendTag::Synthetic;
                spec.polytope = Some(PolytopeSpec::from_body(m.ambient()));
                spec.rule = s.rule();
                if !s.gaps().is_empty() {
                    spec.per_k_gaps = Some(
                        s.gaps().iter().map(|(k, c)| (*k, serde_json::json!(c.points()))).collect(),
                    );
                }
            }
        }
        spec
    }
}

pub fn model_from_json(s: &str) -> Result<GradedSeriesModel> {
    serde_json::from_str::<ModelSpec>(s)?.to_model()
}

pub fn model_to_json(m: &GradedSeriesModel) -> String {
    serde_json::to_string_pretty(&ModelSpec::from_model(m)).expect("model serializes")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub grad: Vec<JsonRat>,
    #[serde(rename = "const")]
    pub constant: JsonRat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcaveSpec {
    pub pieces: Vec<PieceSpec>,
}

/// `{"label": .., "A": "p/q", "G": {"pieces": [{"grad": [..], "const": "p/q"}]}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationSpec {
    pub label: String,
    #[serde(rename = "A")]
    pub a: JsonRat,
    #[serde(rename = "G")]
    pub g: ConcaveSpec,
}

impl ValuationSpec {
    pub fn to_valuation(&self) -> Result<ValuationModel> {
        let pieces = self
            .g
            .pieces
            .iter()
            .map(|p| AffineFunctional::new(unwrap(p.grad.clone()), p.constant.0.clone()))
            .collect();
        ValuationModel::new(self.label.clone(), self.a.0.clone(), ConcavePL::new(pieces)?)
    }

    pub fn from_valuation(v: &ValuationModel) -> Self {
        ValuationSpec {
            label: v.label.clone(),
            a: JsonRat(v.a.clone()),
            g: ConcaveSpec {
                pieces: v
                    .g
                    .pieces()
                    .iter()
                    .map(|p| PieceSpec { grad: wrap(&p.gradient), constant: JsonRat(p.constant.clone()) })
                    .collect(),
            },
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FamilyRepr {
    Many(Vec<ValuationSpec>),
    Wrapped { valuations: Vec<ValuationSpec> },
    One(ValuationSpec),
}

/// A valuation family: a JSON array, `{"valuations": [..]}` or a single valuation.
/// An empty family is an input error.
pub fn family_from_json(s: &str) -> Result<Vec<ValuationModel>> {
    let specs = match serde_json::from_str::<FamilyRepr>(s)? {
        FamilyRepr::Many(v) | FamilyRepr::Wrapped { valuations: v } => v,
        FamilyRepr::One(v) => vec![v],
    };
    if specs.is_empty() {
        return Err(Error::Input("valuation family is empty".into()));
    }
    specs.iter().map(ValuationSpec::to_valuation).collect()
}

pub fn family_to_json(family: &[ValuationModel]) -> String {
    let specs: Vec<ValuationSpec> = family.iter().map(ValuationSpec::from_valuation).collect();
    serde_json::to_string_pretty(&specs).expect("family serializes")
}

/// `{"tau": "p/q", "m_rule": "ceil_tau", "k_range": [k0, k1], "tol": "p/q"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub tau: JsonRat,
    pub m_rule: String,
    pub k_range: (u64, u64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<JsonRat>,
}

impl SweepSpec {
    pub fn rule(&self) -> Result<MRule> {
        MRule::parse(&self.m_rule)
    }

    pub fn validate(&self) -> Result<()> {
        let (k0, k1) = self.k_range;
        if k0 == 0 || k0 > k1 {
            return Err(Error::Input(format!("invalid k_range [{k0}, {k1}]")));
        }
        let tau = &self.tau.0;
        if *tau < Rat::from_integer(0.into()) || *tau > Rat::from_integer(1.into()) {
            return Err(Error::Input(format!("tau = {} outside [0, 1]", fmt_rat(tau))));
        }
        self.rule().map(|_| ())
    }
}

pub fn sweep_from_json(s: &str) -> Result<SweepSpec> {
    let spec: SweepSpec = serde_json::from_str(s)?;
    spec.validate()?;
    Ok(spec)
}

/// A table with named columns, rendered as CSV.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn polytope_round_trip() {
        let b = polytope_from_json(r#"{"dim":2,"vertices":[["0","0"],["1","0"],["0","1"],["1/4","1/4"]]}"#).unwrap();
        assert_eq!(b.vertices().len(), 3);
        assert_eq!(b.volume(), rat(1, 2));
        assert_eq!(polytope_from_json(&polytope_to_json(&b)).unwrap(), b);
        let h = polytope_from_json(
            r#"{"dim":1,"halfspaces":[{"normal":["1"],"offset":"3/2"},{"normal":[-1],"offset":0}]}"#,
        )
        .unwrap();
        assert_eq!(h.volume(), rat(3, 2));
        let e = polytope_from_json(r#"{"dim":1,"vertices":[["1/0"]]}"#).unwrap_err();
        assert!(e.is_input_error());
        let e = polytope_from_json(
            r#"{"dim":1,"vertices":[["0"],["1"]],"halfspaces":[{"normal":["1"],"offset":"2"},{"normal":["-1"],"offset":"0"}]}"#,
        )
        .unwrap_err();
        assert!(e.is_input_error());
    }

    #[test]
    fn models() {
        let m = model_from_json(r#"{"backend":"curve","gaps":[1,2,5]}"#).unwrap();
        assert_eq!(m.d_k(5).unwrap(), 3);
        let bad = model_from_json(r#"{"backend":"curve","gaps":[2,3]}"#).unwrap_err();
        assert!(!bad.is_input_error());
        let c = model_from_json(r#"{"backend":"canonical","genus":3,"per_k_gaps":{"1":[1,3],"2":[1,2,3]}}"#).unwrap();
        assert_eq!(c.discrete_body(1).unwrap().points(), &[vec![0], vec![2], vec![4]]);
        let back = model_from_json(&model_to_json(&c)).unwrap();
        assert_eq!(back.discrete_body(2).unwrap(), c.discrete_body(2).unwrap());
        let s = model_from_json(
            r#"{"backend":"synthetic","polytope":{"dim":2,"vertices":[[0,0],[1,0],[0,1],[1,1]]},"rule":"remove_top_face"}"#,
        )
        .unwrap();
        assert_eq!(s.d_k(3).unwrap(), 12);
        let back = model_from_json(&model_to_json(&s)).unwrap();
        assert_eq!(back.d_k(3).unwrap(), 12);
        assert!(model_from_json(r#"{"backend":"toric"}"#).unwrap_err().is_input_error());
    }

    #[test]
    fn valuations_and_sweeps() {
        let f = family_from_json(r#"[{"label":"x","A":"1","G":{"pieces":[{"grad":["1","0"],"const":"0"}]}}]"#).unwrap();
        assert_eq!(f[0].a, int(1));
        assert_eq!(family_from_json(&family_to_json(&f)).unwrap(), f);
        assert!(family_from_json("[]").unwrap_err().is_input_error());
        let s = sweep_from_json(r#"{"tau":"1/2","m_rule":"ceil_tau","k_range":[1,50]}"#).unwrap();
        assert_eq!(s.rule().unwrap(), MRule::CeilTau);
        assert!(sweep_from_json(r#"{"tau":"3/2","m_rule":"ceil_tau","k_range":[1,50]}"#).is_err());
    }

    #[test]
    fn csv_quotes_cells() {
        let mut t = Table::new(["k", "point"]);
        t.push(vec!["1".into(), "[1,2]".into()]);
        assert_eq!(t.to_csv(), "k,point\n1,\"[1,2]\"\n");
    }
}
