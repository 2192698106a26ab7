//! JSON formats for models, gauges, datasets and verdicts.
//!
//! Matrices are `{"re": [[..]], "im": [[..]]}` in row order; `im` may be
//! omitted for real matrices.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gauge::{GaugeTransform, FMax};
use crate::linalg::{c, ComplexMatrix};
use crate::model::{DensityMatrix, Effect, ModelRepresentation, PhysicalityReport};
use crate::superop::{map_from_kraus, map_from_unitary, QuantumMap};
use crate::tomography::{DatasetKind, ExtraVector, GstDataset, LabeledGram};
use crate::uniqueness::UniquenessVerdict;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&crate::C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| f(&m[(r, k)])).collect()).collect()
        };
        Self { re: rows(|z| z.re), im: Some(rows(|z| z.im)) }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let r = self.re.len();
        let cols = self.re.first().map_or(0, |x| x.len());
        if r == 0 || self.re.iter().any(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch("ragged or empty matrix".into()));
        }
        if let Some(im) = &self.im {
            if im.len() != r || im.iter().any(|row| row.len() != cols) {
                return Err(Error::DimensionMismatch("re and im shapes differ".into()));
            }
        }
        Ok(ComplexMatrix::from_fn(r, cols, |i, j| {
            c(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    #[serde(default)]
    label: String,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

impl ElementJson {
    fn matrix(&self) -> Result<ComplexMatrix> {
        MatrixJson { re: self.re.clone(), im: self.im.clone() }.to_matrix()
    }

    fn new(label: &str, m: &ComplexMatrix) -> Self {
        let mj = MatrixJson::from_matrix(m);
        Self { label: label.to_string(), re: mj.re, im: mj.im }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapJson {
    #[serde(default)]
    label: String,
    #[serde(default = "default_kind")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kraus: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "is_false")]
    extra: bool,
}

fn default_kind() -> String {
    "superop".into()
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    dim: usize,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    label: String,
    #[serde(default)]
    unitary_complete: bool,
    states: Vec<ElementJson>,
    maps: Vec<MapJson>,
    effects: Vec<ElementJson>,
}

impl MapJson {
    fn to_map(&self) -> Result<QuantumMap> {
        let matrix = || -> Result<ComplexMatrix> {
            let re = self.re.clone().ok_or_else(|| Error::InvalidArgument(format!("map '{}' needs re", self.label)))?;
            MatrixJson { re, im: self.im.clone() }.to_matrix()
        };
        let map = match self.kind.as_str() {
            "superop" => QuantumMap::from_superop(matrix()?, ""),
            "choi" => QuantumMap::from_choi(matrix()?, ""),
            "unitary" => map_from_unitary(&matrix()?),
            "kraus" => {
                let ks = self
                    .kraus
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument(format!("map '{}' of kind kraus needs a kraus list", self.label)))?;
                let ks = ks.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
                map_from_kraus(&ks)
            }
            other => return Err(Error::InvalidArgument(format!("unknown map kind '{other}'"))),
        }?;
        Ok(map.with_label(self.label.clone()).with_extra(self.extra))
    }
}

pub fn model_to_value(rep: &ModelRepresentation) -> Value {
    let m = ModelJson {
        dim: rep.dim,
        label: rep.label.clone(),
        unitary_complete: rep.unitary_complete,
        states: rep.states.iter().map(|s| ElementJson::new(&s.label, &s.mat)).collect(),
        maps: rep
            .maps
            .iter()
            .map(|q| {
                let mj = MatrixJson::from_matrix(q.superop());
                MapJson {
                    label: q.label.clone(),
                    kind: default_kind(),
                    re: Some(mj.re),
                    im: mj.im,
                    kraus: None,
                    extra: q.extra,
                }
            })
            .collect(),
        effects: rep.effects.iter().map(|e| ElementJson::new(&e.label, &e.mat)).collect(),
    };
    serde_json::to_value(m).expect("model serializes")
}

pub fn model_to_json(rep: &ModelRepresentation) -> String {
    pretty(&model_to_value(rep))
}

pub fn model_from_value(v: Value) -> Result<ModelRepresentation> {
    let m: ModelJson = serde_json::from_value(v)?;
    if m.dim == 0 {
        return Err(Error::InvalidArgument("dim must be positive".into()));
    }
    let states = m
        .states
        .iter()
        .map(|s| Ok(DensityMatrix::new(s.matrix()?, s.label.clone())))
        .collect::<Result<Vec<_>>>()?;
    let maps = m.maps.iter().map(MapJson::to_map).collect::<Result<Vec<_>>>()?;
    let effects = m
        .effects
        .iter()
        .map(|e| Ok(Effect::new(e.matrix()?, e.label.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelRepresentation::new(m.dim, states, maps, effects)?
        .with_label(m.label)
        .with_unitary_complete(m.unitary_complete))
}

pub fn model_from_json(s: &str) -> Result<ModelRepresentation> {
    model_from_value(serde_json::from_str(s)?)
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

/// Gauge file: `kind` is `superop`, `unitary`, `antiunitary` (matrix in
/// `re`/`im`) or `depolarizing` (with `f` and `dim`).
pub fn gauge_from_json(s: &str) -> Result<GaugeTransform> {
    let g: GaugeJson = serde_json::from_str(s)?;
    let matrix = || -> Result<ComplexMatrix> {
        let re = g.re.clone().ok_or_else(|| Error::InvalidArgument(format!("gauge of kind {} needs re", g.kind)))?;
        MatrixJson { re, im: g.im.clone() }.to_matrix()
    };
    match g.kind.as_str() {
        "superop" => GaugeTransform::from_superop(matrix()?, "superop"),
        "unitary" => GaugeTransform::unitary(&matrix()?),
        "antiunitary" => GaugeTransform::antiunitary(&matrix()?),
        "depolarizing" => {
            let f = g.f.ok_or_else(|| Error::InvalidArgument("depolarizing gauge needs f".into()))?;
            let d = g.dim.ok_or_else(|| Error::InvalidArgument("depolarizing gauge needs dim".into()))?;
            GaugeTransform::depolarizing(f, d)
        }
        other => Err(Error::InvalidArgument(format!("unknown gauge kind '{other}'"))),
    }
}

pub fn gauge_to_value(t: &GaugeTransform) -> Value {
    let m = MatrixJson::from_matrix(t.superop());
    serde_json::to_value(GaugeJson { kind: "superop".into(), dim: Some(t.dim()), f: None, re: Some(m.re), im: m.im })
        .expect("gauge serializes")
}

pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixJson::from_matrix(m)).expect("matrix serializes")
}

pub fn f_max_to_value(f: FMax) -> Value {
    serde_json::to_value(f).expect("F_max serializes")
}

pub fn physicality_to_value(r: &PhysicalityReport) -> Value {
    let mut v = serde_json::to_value(r).expect("report serializes");
    if !r.worst_margin.is_finite() {
        v["worst_margin"] = Value::Null;
    }
    v
}

pub fn verdict_to_value(v: &UniquenessVerdict) -> Value {
    let mut out = Map::new();
    out.insert("status".into(), json!(v.status.as_str()));
    out.insert("lambda_min".into(), json!(v.lambda_min));
    out.insert("f_max".into(), v.f_max.map_or(Value::Null, f_max_to_value));
    out.insert("f".into(), json!(v.f));
    out.insert("state_det_product".into(), json!(v.state_det_product));
    out.insert("choi_det_product".into(), json!(v.choi_det_product));
    out.insert("spectral_shift".into(), json!(v.spectral_shift));
    out.insert("matched_projections".into(), json!(v.matched_projections));
    out.insert("singular_states".into(), json!(v.singular_states));
    out.insert("singular_effects".into(), json!(v.singular_effects));
    out.insert("counterexample".into(), v.counterexample.as_ref().map_or(Value::Null, model_to_value));
    Value::Object(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtraJson {
    index: usize,
    p: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetJson {
    dim: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    fiducial_states: Vec<usize>,
    fiducial_effects: Vec<usize>,
    #[serde(default)]
    fiducial_state_labels: Vec<String>,
    #[serde(default)]
    fiducial_effect_labels: Vec<String>,
    g: Vec<Vec<f64>>,
    maps: Map<String, Value>,
    #[serde(default)]
    extra_states: Map<String, Value>,
    #[serde(default)]
    extra_effects: Map<String, Value>,
}

fn unique_key(map: &Map<String, Value>, label: &str, fallback: String) -> String {
    let base = if label.is_empty() { fallback } else { label.to_string() };
    let mut key = base.clone();
    let mut n = 1;
    while map.contains_key(&key) {
        key = format!("{base}#{n}");
        n += 1;
    }
    key
}

pub fn dataset_to_value(ds: &GstDataset) -> Value {
    let (kind, shots, seed) = match ds.kind {
        DatasetKind::Exact => ("exact", None, None),
        DatasetKind::Sampled { shots, seed } => ("sampled", Some(shots), Some(seed)),
    };
    let mut maps = Map::new();
    for (j, m) in ds.maps.iter().enumerate() {
        let key = unique_key(&maps, &m.label, format!("M{j}"));
        maps.insert(key, json!(m.values));
    }
    let extras = |list: &[ExtraVector], prefix: &str| {
        let mut out = Map::new();
        for e in list {
            let key = unique_key(&out, &e.label, format!("{prefix}{}", e.index));
            out.insert(key, serde_json::to_value(ExtraJson { index: e.index, p: e.values.clone() }).expect("extra"));
        }
        out
    };
    let d = DatasetJson {
        dim: ds.dim,
        kind: kind.into(),
        shots,
        seed,
        fiducial_states: ds.fiducial_states.clone(),
        fiducial_effects: ds.fiducial_effects.clone(),
        fiducial_state_labels: ds.fiducial_state_labels.clone(),
        fiducial_effect_labels: ds.fiducial_effect_labels.clone(),
        g: ds.g.clone(),
        maps,
        extra_states: extras(&ds.extra_states, "rho"),
        extra_effects: extras(&ds.extra_effects, "E"),
    };
    serde_json::to_value(d).expect("dataset serializes")
}

pub fn dataset_from_json(s: &str) -> Result<GstDataset> {
    let d: DatasetJson = serde_json::from_str(s)?;
    let kind = match (d.kind.as_str(), d.shots, d.seed) {
        ("exact", None, None) => DatasetKind::Exact,
        ("sampled", Some(shots), Some(seed)) => DatasetKind::Sampled { shots, seed },
        (k, _, _) => return Err(Error::InvalidArgument(format!("dataset kind '{k}' with inconsistent shots/seed"))),
    };
    let maps = d
        .maps
        .into_iter()
        .map(|(label, v)| Ok(LabeledGram { label, values: serde_json::from_value(v)? }))
        .collect::<Result<Vec<_>>>()?;
    let extras = |m: Map<String, Value>| -> Result<Vec<ExtraVector>> {
        m.into_iter()
            .map(|(label, v)| {
                let e: ExtraJson = serde_json::from_value(v)?;
                Ok(ExtraVector { index: e.index, label, values: e.p })
            })
            .collect()
    };
    let ds = GstDataset {
        dim: d.dim,
        kind,
        fiducial_states: d.fiducial_states,
        fiducial_effects: d.fiducial_effects,
        fiducial_state_labels: d.fiducial_state_labels,
        fiducial_effect_labels: d.fiducial_effect_labels,
        g: d.g,
        maps,
        extra_states: extras(d.extra_states)?,
        extra_effects: extras(d.extra_effects)?,
    };
    ds.validate()?;
    Ok(ds)
}

pub fn dataset_to_json(ds: &GstDataset) -> String {
    pretty(&dataset_to_value(ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_model, RandomModelOptions};
    use crate::tomography::{collect_dataset, sample_dataset};

    #[test]
    fn model_round_trip() {
        let mut rep = random_model(3, 2, 2, 2, 1, &RandomModelOptions::default()).unwrap().with_unitary_complete(true);
        rep.maps[1] = rep.maps[1].clone().with_extra(true);
        let text = model_to_json(&rep);
        let back = model_from_json(&text).unwrap();
        assert_eq!(back, rep);
        assert!(back.maps[1].extra);
        assert_eq!(model_to_json(&back), text);
    }

    #[test]
    fn map_kinds() {
        let text = r#"{
            "dim": 2,
            "states": [{"label": "zero", "re": [[1, 0], [0, 0]]}],
            "maps": [
                {"label": "x", "kind": "unitary", "re": [[0, 1], [1, 0]]},
                {"label": "k", "kind": "kraus", "kraus": [{"re": [[1, 0], [0, 1]]}]},
                {"label": "c", "kind": "choi", "re": [[1,0,0,1],[0,0,0,0],[0,0,0,0],[1,0,0,1]]}
            ],
            "effects": [{"re": [[1, 0], [0, 0]]}]
        }"#;
        let rep = model_from_json(text).unwrap();
        assert_eq!(rep.maps[1], QuantumMap::identity(2));
        assert_eq!(rep.maps[2], QuantumMap::identity(2));
        assert!(crate::model::check_physical(&rep).pass);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(model_from_json(r#"{"dim": 2, "states": [], "maps": [], "effects": [], "bogus": 1}"#).is_err());
        assert!(model_from_json(r#"{"dim": 2, "states": [{"re": [[1, 0]]}], "maps": [], "effects": []}"#).is_err());
        assert!(model_from_json(r#"{"dim": 2, "states": [], "maps": [{"kind": "weird", "re": [[1]]}], "effects": []}"#).is_err());
    }

    #[test]
    fn gauge_kinds() {
        let g = gauge_from_json(r#"{"kind": "depolarizing", "f": 0.5, "dim": 2}"#).unwrap();
        assert!((g.superop()[(0, 0)].re - 0.75).abs() < 1e-15);
        let back = gauge_from_json(&pretty(&gauge_to_value(&g))).unwrap();
        assert_eq!(back.superop(), g.superop());
        assert!(gauge_from_json(r#"{"kind": "unitary", "re": [[1, 1], [0, 1]]}"#).is_err());
    }

    #[test]
    fn dataset_round_trip() {
        let rep = random_model(2, 5, 2, 6, 2, &RandomModelOptions::default()).unwrap();
        let ds = collect_dataset(&rep, &[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap();
        assert_eq!(dataset_from_json(&dataset_to_json(&ds)).unwrap(), ds);
        let s = sample_dataset(&rep, &[0, 1, 2, 3], &[0, 1, 2, 3], 100, 3).unwrap();
        let text = dataset_to_json(&s);
        assert!(text.contains("\"shots\": 100"));
        assert_eq!(dataset_from_json(&text).unwrap(), s);
    }
}
