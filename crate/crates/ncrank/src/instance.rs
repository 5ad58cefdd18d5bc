//! Instance files: a single JSON document holding the field, the quiver, the
//! representation (matrices as row-major integer lists), and optionally a
//! weight and a dimension vector. Parsing normalizes everything (default
//! field, entries reduced into the field) so that serialize-then-parse is the
//! identity and digests are stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec, PrimeField, Rationals};
use crate::matrix::Matrix;
use crate::quiver::{DimensionVector, Quiver, Weight};
use crate::rep::Representation;

/// Modulus used when an instance file does not name a field.
pub const DEFAULT_PRIME: u64 = 1_000_003;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowFile {
    pub name: String,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverFile {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationFile {
    pub dims: BTreeMap<String, usize>,
    pub maps: BTreeMap<String, Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub quiver: QuiverFile,
    pub representation: RepresentationFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<BTreeMap<String, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<BTreeMap<String, usize>>,
}

/// A fully validated instance over a concrete field.
#[derive(Debug, Clone)]
pub struct Instance<F: Field> {
    pub field: F,
    pub rep: Representation<F>,
    pub weight: Option<Weight>,
    pub alpha: Option<DimensionVector>,
    /// SHA-256 of the normalized instance serialization.
    pub digest: String,
    /// The normalized file (explicit field, canonical entries).
    pub normalized: InstanceFile,
}

/// Instance dispatched on its field kind.
#[derive(Debug, Clone)]
pub enum LoadedInstance {
    Prime(Instance<PrimeField>),
    Rational(Instance<Rationals>),
}

impl LoadedInstance {
    pub fn digest(&self) -> &str {
        match self {
            LoadedInstance::Prime(i) => &i.digest,
            LoadedInstance::Rational(i) => &i.digest,
        }
    }
}

pub fn parse_instance(json: &str) -> Result<(LoadedInstance, Vec<String>)> {
    let file: InstanceFile = serde_json::from_str(json)
        .map_err(|e| Error::validation(format!("invalid instance JSON: {e}")))?;
    load_instance_file(file)
}

pub fn load_instance_file(file: InstanceFile) -> Result<(LoadedInstance, Vec<String>)> {
    let mut warnings = Vec::new();
    let spec = match &file.field {
        Some(s) => {
            s.validate()?;
            s.clone()
        }
        None => {
            warnings.push(format!(
                "no field specified; defaulting to the prime field mod {DEFAULT_PRIME}"
            ));
            FieldSpec::PrimeField { p: DEFAULT_PRIME }
        }
    };
    match spec {
        FieldSpec::PrimeField { p } => {
            let field = PrimeField::new(p)?;
            let inst = build_instance(field, &file, &spec, &mut warnings)?;
            Ok((LoadedInstance::Prime(inst), warnings))
        }
        FieldSpec::Rationals => {
            let field = Rationals;
            let inst = build_instance(field, &file, &spec, &mut warnings)?;
            Ok((LoadedInstance::Rational(inst), warnings))
        }
    }
}

fn build_instance<F: Field>(
    field: F,
    file: &InstanceFile,
    spec: &FieldSpec,
    warnings: &mut Vec<String>,
) -> Result<Instance<F>> {
    let quiver = Quiver::new(
        file.quiver.vertices.clone(),
        file.quiver
            .arrows
            .iter()
            .map(|a| (a.name.clone(), a.tail.clone(), a.head.clone()))
            .collect(),
    )?;
    if !quiver.is_acyclic() {
        return Err(Error::CyclicQuiver);
    }

    check_keys(
        "representation.dims",
        file.representation.dims.keys(),
        quiver.vertex_names(),
    )?;
    let dims = DimensionVector::new(
        quiver
            .vertex_names()
            .iter()
            .map(|v| file.representation.dims[v])
            .collect(),
    );

    let arrow_names: Vec<String> = quiver.arrows().iter().map(|a| a.name.clone()).collect();
    check_keys(
        "representation.maps",
        file.representation.maps.keys(),
        &arrow_names,
    )?;

    let mut maps = Vec::with_capacity(quiver.arrows().len());
    for a in quiver.arrows() {
        let rows = dims.get(a.head);
        let cols = dims.get(a.tail);
        let raw = &file.representation.maps[&a.name];
        if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
            return Err(Error::validation(format!(
                "map for arrow {:?} must be {}x{} (row-major rows)",
                a.name, rows, cols
            )));
        }
        let mut reduced = 0usize;
        let mut data = Vec::with_capacity(rows * cols);
        for row in raw {
            for &v in row {
                if out_of_range(spec, v) {
                    reduced += 1;
                }
                data.push(field.from_i64(v));
            }
        }
        if reduced > 0 {
            warnings.push(format!(
                "{} entries of map {:?} were outside [0, p) and have been reduced",
                reduced, a.name
            ));
        }
        maps.push(Matrix::new(field.clone(), rows, cols, data));
    }
    let rep = Representation::new(field.clone(), quiver.clone(), dims, maps)?;

    let weight = match &file.weight {
        Some(w) => {
            check_keys("weight", w.keys(), quiver.vertex_names())?;
            Some(Weight::new(
                quiver.vertex_names().iter().map(|v| w[v]).collect(),
            ))
        }
        None => None,
    };
    let alpha = match &file.alpha {
        Some(a) => {
            check_keys("alpha", a.keys(), quiver.vertex_names())?;
            Some(DimensionVector::new(
                quiver.vertex_names().iter().map(|v| a[v]).collect(),
            ))
        }
        None => None,
    };

    let normalized = normalize_file(&field, spec, file, &rep);
    let digest = digest_of(&normalized);
    Ok(Instance {
        field,
        rep,
        weight,
        alpha,
        digest,
        normalized,
    })
}

fn out_of_range(spec: &FieldSpec, v: i64) -> bool {
    match spec {
        FieldSpec::PrimeField { p } => v < 0 || (*p <= i64::MAX as u64 && v >= *p as i64),
        FieldSpec::Rationals => false,
    }
}

fn check_keys<'a>(
    what: &str,
    got: impl Iterator<Item = &'a String>,
    want: &[String],
) -> Result<()> {
    let got: Vec<&String> = got.collect();
    let mut want_sorted: Vec<&String> = want.iter().collect();
    want_sorted.sort();
    // BTreeMap keys are already sorted.
    if got != want_sorted {
        return Err(Error::validation(format!(
            "{what} keys must be exactly {want_sorted:?}, got {got:?}"
        )));
    }
    Ok(())
}

/// Rewrite the file with the field made explicit and entries in canonical
/// form, so the serialization round-trips bit for bit.
fn normalize_file<F: Field>(
    field: &F,
    spec: &FieldSpec,
    file: &InstanceFile,
    rep: &Representation<F>,
) -> InstanceFile {
    let mut maps = BTreeMap::new();
    for (i, a) in rep.quiver().arrows().iter().enumerate() {
        let m = rep.map(i);
        let rows: Vec<Vec<i64>> = (0..m.rows())
            .map(|r| {
                (0..m.cols())
                    .map(|c| {
                        // Prime-field residues fit in i64; rational inputs
                        // were integers and stay what they were.
                        field
                            .format(&m[(r, c)])
                            .parse::<i64>()
                            .expect("canonical entries are integers")
                    })
                    .collect()
            })
            .collect();
        maps.insert(a.name.clone(), rows);
    }
    InstanceFile {
        field: Some(spec.clone()),
        quiver: file.quiver.clone(),
        representation: RepresentationFile {
            dims: file.representation.dims.clone(),
            maps,
        },
        weight: file.weight.clone(),
        alpha: file.alpha.clone(),
    }
}

pub fn canonical_json(file: &InstanceFile) -> String {
    serde_json::to_string(file).expect("instance files always serialize")
}

fn digest_of(file: &InstanceFile) -> String {
    hex::encode(Sha256::digest(canonical_json(file).as_bytes()))
}

/// The span of the arrow matrices of a generalized Kronecker instance
/// (two vertices, every arrow from the first to the second).
pub fn kronecker_space<F: Field>(inst: &Instance<F>) -> Result<crate::matspace::MatrixSpace<F>> {
    let q = inst.rep.quiver();
    if q.vertex_count() != 2 {
        return Err(Error::validation(
            "this command needs a generalized Kronecker instance (exactly two vertices)",
        ));
    }
    for a in q.arrows() {
        if a.tail != 0 || a.head != 1 {
            return Err(Error::validation(
                "this command needs all arrows oriented from the first vertex to the second",
            ));
        }
    }
    let rows = inst.rep.dims().get(1);
    let cols = inst.rep.dims().get(0);
    let basis = (0..q.arrows().len())
        .map(|i| inst.rep.map(i).clone())
        .collect();
    crate::matspace::MatrixSpace::new(inst.field.clone(), rows, cols, basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EQ1_JSON: &str = r#"{
        "field": {"kind": "prime-field", "p": 101},
        "quiver": {
            "vertices": ["x", "y"],
            "arrows": [
                {"name": "a1", "tail": "x", "head": "y"},
                {"name": "a2", "tail": "x", "head": "y"},
                {"name": "a3", "tail": "x", "head": "y"}
            ]
        },
        "representation": {
            "dims": {"x": 3, "y": 3},
            "maps": {
                "a1": [[0, 1, 0], [-1, 0, 0], [0, 0, 0]],
                "a2": [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
                "a3": [[0, 0, 0], [0, 0, 1], [0, -1, 0]]
            }
        },
        "weight": {"x": 1, "y": -1},
        "alpha": {"x": 1, "y": 1}
    }"#;

    #[test]
    fn parse_and_normalize_eq1() {
        let (inst, warnings) = parse_instance(EQ1_JSON).unwrap();
        // Negative entries get reduced, with a warning per affected map.
        assert_eq!(warnings.len(), 3);
        let LoadedInstance::Prime(inst) = inst else {
            panic!("expected a prime-field instance");
        };
        assert_eq!(inst.rep.dims().as_slice(), &[3, 3]);
        assert_eq!(inst.rep.map(0)[(1, 0)], 100); // -1 mod 101
        assert_eq!(inst.weight.as_ref().unwrap().as_slice(), &[1, -1]);
        assert_eq!(inst.alpha.as_ref().unwrap().as_slice(), &[1, 1]);
    }

    #[test]
    fn round_trip_is_identity() {
        let (inst, _) = parse_instance(EQ1_JSON).unwrap();
        let LoadedInstance::Prime(inst) = inst else {
            panic!();
        };
        let json = canonical_json(&inst.normalized);
        let (inst2, warnings2) = parse_instance(&json).unwrap();
        // Normalized input produces no warnings and the same normal form.
        assert!(warnings2.is_empty());
        let LoadedInstance::Prime(inst2) = inst2 else {
            panic!();
        };
        assert_eq!(inst.normalized, inst2.normalized);
        assert_eq!(inst.digest, inst2.digest);
    }

    #[test]
    fn missing_field_defaults_with_warning() {
        let json = r#"{
            "quiver": {"vertices": ["x"], "arrows": []},
            "representation": {"dims": {"x": 1}, "maps": {}}
        }"#;
        let (inst, warnings) = parse_instance(json).unwrap();
        assert!(warnings[0].contains("1000003"));
        let LoadedInstance::Prime(inst) = inst else {
            panic!();
        };
        assert_eq!(inst.field.modulus(), DEFAULT_PRIME);
    }

    #[test]
    fn validation_errors() {
        // Cyclic quiver.
        let json = r#"{
            "field": {"kind": "prime-field", "p": 5},
            "quiver": {"vertices": ["x", "y"], "arrows": [
                {"name": "a", "tail": "x", "head": "y"},
                {"name": "b", "tail": "y", "head": "x"}
            ]},
            "representation": {"dims": {"x": 1, "y": 1},
                               "maps": {"a": [[1]], "b": [[1]]}}
        }"#;
        assert!(matches!(parse_instance(json), Err(Error::CyclicQuiver)));

        // Wrong matrix shape.
        let json = r#"{
            "field": {"kind": "prime-field", "p": 5},
            "quiver": {"vertices": ["x", "y"],
                       "arrows": [{"name": "a", "tail": "x", "head": "y"}]},
            "representation": {"dims": {"x": 2, "y": 1}, "maps": {"a": [[1]]}}
        }"#;
        assert!(parse_instance(json).is_err());

        // dims keys must match the vertex set.
        let json = r#"{
            "field": {"kind": "prime-field", "p": 5},
            "quiver": {"vertices": ["x"], "arrows": []},
            "representation": {"dims": {"z": 1}, "maps": {}}
        }"#;
        assert!(parse_instance(json).is_err());

        // Composite modulus.
        let json = r#"{
            "field": {"kind": "prime-field", "p": 6},
            "quiver": {"vertices": ["x"], "arrows": []},
            "representation": {"dims": {"x": 1}, "maps": {}}
        }"#;
        assert!(parse_instance(json).is_err());
    }

    #[test]
    fn rationals_instances_load() {
        let json = r#"{
            "field": {"kind": "rationals"},
            "quiver": {"vertices": ["x", "y"],
                       "arrows": [{"name": "a", "tail": "x", "head": "y"}]},
            "representation": {"dims": {"x": 1, "y": 1}, "maps": {"a": [[-7]]}}
        }"#;
        let (inst, warnings) = parse_instance(json).unwrap();
        assert!(warnings.is_empty());
        let LoadedInstance::Rational(inst) = inst else {
            panic!("expected rationals");
        };
        assert_eq!(inst.field.format(&inst.rep.map(0)[(0, 0)]), "-7");
    }

    #[test]
    fn kronecker_space_extraction() {
        let (inst, _) = parse_instance(EQ1_JSON).unwrap();
        let LoadedInstance::Prime(inst) = inst else {
            panic!();
        };
        let s = kronecker_space(&inst).unwrap();
        assert_eq!((s.rows(), s.cols()), (3, 3));
        assert_eq!(s.basis().len(), 3);
    }
}
