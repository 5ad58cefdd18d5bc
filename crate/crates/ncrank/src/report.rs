//! Report payloads emitted by the CLI and the C API. Field order and map
//! ordering are fixed, so a report is a deterministic function of
//! (instance, flags, seed). Every numeric claim travels with its
//! certificate: witness bases and shrunk subspaces are embedded as RREF
//! rows of formatted scalars.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::field::Field;
use crate::matrix::Matrix;
use crate::matspace::ShrunkCertificate;
use crate::rep::{Representation, Subrep};
use crate::subspace::Subspace;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub instance_digest: String,
    pub version: String,
    pub result: ResultPayload,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificatePayload>,
    pub trace: TracePayload,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ResultPayload {
    Ncrk {
        ncrk: usize,
        max_c: usize,
    },
    Witness {
        discrepancy: i64,
        semistable: bool,
        minimal: bool,
        algorithms: Vec<String>,
        witness: BTreeMap<String, SubspacePayload>,
    },
    Semistable {
        semistable: bool,
        sigma_alpha: i64,
        discrepancy: i64,
    },
    HomExt {
        orientation: String,
        value: i64,
        nchom: i64,
        ncext: i64,
        witness_dims: BTreeMap<String, usize>,
    },
    Oracle {
        op: String,
        value: i64,
        #[serde(skip_serializing_if = "Option::is_none")]
        minimal_u: Option<SubspacePayload>,
    },
    Verify {
        valid: bool,
        checks: Vec<CheckPayload>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckPayload {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspacePayload {
    pub ambient: usize,
    pub dim: usize,
    pub basis: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixPayload {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificatePayload {
    pub u: SubspacePayload,
    pub image: SubspacePayload,
    pub c: usize,
    pub minimal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_spaces: Option<BTreeMap<String, SubspacePayload>>,
    /// Maximal-rank blow-up element backing the lower bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup_element: Option<MatrixPayload>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TracePayload {
    pub mode: String,
    pub seed: u64,
    pub retries: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attempts: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algo: Option<String>,
}

pub fn subspace_payload<F: Field>(s: &Subspace<F>) -> SubspacePayload {
    let f = s.field();
    SubspacePayload {
        ambient: s.ambient_dim(),
        dim: s.dim(),
        basis: (0..s.dim())
            .map(|r| s.basis().row(r).iter().map(|e| f.format(e)).collect())
            .collect(),
    }
}

pub fn matrix_payload<F: Field>(m: &Matrix<F>) -> MatrixPayload {
    let f = m.field();
    MatrixPayload {
        rows: m.rows(),
        cols: m.cols(),
        entries: (0..m.rows())
            .map(|r| m.row(r).iter().map(|e| f.format(e)).collect())
            .collect(),
    }
}

pub fn certificate_payload<F: Field>(cert: &ShrunkCertificate<F>) -> CertificatePayload {
    CertificatePayload {
        u: subspace_payload(&cert.u),
        image: subspace_payload(&cert.image),
        c: cert.c,
        minimal: cert.minimal,
        witness_spaces: None,
        blowup_element: None,
    }
}

pub fn witness_spaces_payload<F: Field>(
    rep: &Representation<F>,
    sub: &Subrep<F>,
) -> BTreeMap<String, SubspacePayload> {
    (0..rep.quiver().vertex_count())
        .map(|v| {
            (
                rep.quiver().vertex_name(v).to_string(),
                subspace_payload(sub.space(v)),
            )
        })
        .collect()
}

pub fn dims_payload<F: Field>(
    rep: &Representation<F>,
    dims: &crate::quiver::DimensionVector,
) -> BTreeMap<String, usize> {
    (0..rep.quiver().vertex_count())
        .map(|v| (rep.quiver().vertex_name(v).to_string(), dims.get(v)))
        .collect()
}

/// Parse a subspace payload back into a checked canonical subspace.
pub fn subspace_from_payload<F: Field>(
    field: &F,
    p: &SubspacePayload,
) -> crate::error::Result<Subspace<F>> {
    let mut rows = Vec::with_capacity(p.basis.len());
    for row in &p.basis {
        if row.len() != p.ambient {
            return Err(crate::error::Error::validation(
                "subspace basis row has the wrong length",
            ));
        }
        let mut out = Vec::with_capacity(row.len());
        for s in row {
            out.push(field.parse(s)?);
        }
        rows.push(out);
    }
    let sub = Subspace::from_row_vecs(field.clone(), p.ambient, rows);
    if sub.dim() != p.dim {
        return Err(crate::error::Error::validation(
            "subspace payload dimension disagrees with its basis",
        ));
    }
    Ok(sub)
}

pub fn render(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports always serialize")
}
