use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::json::{matrix_json, vector_json};
use crate::linalg::{self, CMat, CVec};
use crate::linmap::MapRep;

/// Levels of the positivity hierarchy and the neighbouring properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    /// n-positivity (`P_1` is plain positivity).
    P(usize),
    /// n-generalized Schwarz.
    S(usize),
    Cp,
    CoCp,
    Decomposable,
    TensorStable(usize),
    Contractive(usize),
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::P(n) => write!(f, "P_{n}"),
            Property::S(n) => write!(f, "S_{n}"),
            Property::Cp => f.write_str("CP"),
            Property::CoCp => f.write_str("coCP"),
            Property::Decomposable => f.write_str("decomposable"),
            Property::TensorStable(n) => write!(f, "tensor_stable_{n}"),
            Property::Contractive(n) => write!(f, "contractive_{n}"),
        }
    }
}

impl Serialize for Property {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Certified,
    Refuted,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessPayload {
    /// `v = Σ_k x_k ⊗ y_k` with the ancilla factor first.
    SchmidtVector { xs: Vec<CVec>, ys: Vec<CVec> },
    /// Test operator `X` of the Schwarz block inequality at ampliation `n`.
    SchwarzOperator { n: usize, x: CMat },
    /// Hermitian operator on the ampliated space whose trace norm grows.
    HermitianTestOperator { x: CMat },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub payload: WitnessPayload,
    /// Violation value; negative for a genuine violation.
    pub value: f64,
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self.payload {
            WitnessPayload::SchmidtVector { .. } => "schmidt_vector",
            WitnessPayload::SchwarzOperator { .. } => "schwarz_operator",
            WitnessPayload::HermitianTestOperator { .. } => "hermitian_test_operator",
        }
    }

    /// Schmidt-vector witness built from a single bipartite vector.
    pub fn from_vector(v: &CVec, d_anc: usize, d_sys: usize, value: f64) -> Witness {
        let (xs, ys) = schmidt_components(v, d_anc, d_sys);
        Witness {
            payload: WitnessPayload::SchmidtVector { xs, ys },
            value,
        }
    }

    /// `Σ_k x_k ⊗ y_k`, or `None` for operator witnesses.
    pub fn assemble(&self) -> Option<CVec> {
        match &self.payload {
            WitnessPayload::SchmidtVector { xs, ys } => Some(assemble(xs, ys)),
            _ => None,
        }
    }

    pub fn schmidt_rank_bound(&self) -> Option<usize> {
        match &self.payload {
            WitnessPayload::SchmidtVector { xs, .. } => Some(xs.len()),
            _ => None,
        }
    }

    /// Recomputes the violation against `map` from scratch: a fresh Choi
    /// assembly for vector witnesses, a fresh block matrix for Schwarz
    /// witnesses, fresh trace norms for contractivity witnesses.
    pub fn reevaluate(&self, map: &MapRep) -> f64 {
        match &self.payload {
            WitnessPayload::SchmidtVector { xs, ys } => {
                let v = assemble(xs, ys);
                let choi = fresh_choi(map);
                let num = (v.adjoint() * &choi * &v)[(0, 0)].re;
                num / v.norm_squared()
            }
            WitnessPayload::SchwarzOperator { n, x } => {
                super::schwarz::schwarz_block_min_eig(map, *n, x)
            }
            WitnessPayload::HermitianTestOperator { x } => {
                let d = map.dim();
                let anc = x.nrows() / d;
                let amp = crate::linmap::ampliate(map, anc).expect("positive ampliation");
                let y = amp.apply(x).expect("matching size");
                linalg::trace_norm(x) - linalg::trace_norm(&y)
            }
        }
    }
}

pub(crate) fn assemble(xs: &[CVec], ys: &[CVec]) -> CVec {
    let da = xs.first().map_or(0, |x| x.len());
    let db = ys.first().map_or(0, |y| y.len());
    let mut v = CVec::zeros(da * db);
    for (x, y) in xs.iter().zip(ys) {
        v += x.kronecker(y);
    }
    v
}

fn fresh_choi(map: &MapRep) -> CMat {
    let d = map.dim();
    let mut choi = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let out = map.apply_unchecked(&linalg::matrix_unit(d, i, j));
            choi.view_mut((i * d, j * d), (d, d)).copy_from(&out);
        }
    }
    choi
}

/// Schmidt components `x_k = s_k u_k`, `y_k = v_k` of a bipartite vector.
pub(crate) fn schmidt_components(v: &CVec, da: usize, db: usize) -> (Vec<CVec>, Vec<CVec>) {
    let coeff = CMat::from_fn(da, db, |a, b| v[a * db + b]);
    let svd = coeff.svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..svd.singular_values.len() {
        let s = svd.singular_values[k];
        if s <= 1e-14 * smax && !xs.is_empty() {
            continue;
        }
        xs.push(u.column(k).into_owned() * linalg::c(s, 0.0));
        ys.push(vt.row(k).transpose());
    }
    (xs, ys)
}

/// Spectral or decomposition certificate attached to a verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    MinEigenvalue { value: f64, index: usize },
    Decomposition { a: CMat, b: CMat, residual: f64 },
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Violation threshold: refuted only below `-tol`.
    pub tol: f64,
    pub rel_decrease: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityVerdict {
    pub property: Property,
    pub status: Status,
    /// Best objective value found (minimum eigenvalue, quadratic form, ...).
    pub value: f64,
    pub witness: Option<Witness>,
    pub certificate: Option<Certificate>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub restarts_used: usize,
    /// Set when the status was propagated along the hierarchy.
    pub inherited_from: Option<Property>,
}

impl PositivityVerdict {
    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub(crate) fn inherit(&self, property: Property) -> PositivityVerdict {
        PositivityVerdict {
            property,
            status: self.status,
            value: self.value,
            witness: None,
            certificate: None,
            tolerances: self.tolerances,
            seed: self.seed,
            restarts_used: 0,
            inherited_from: Some(self.property),
        }
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("kind", self.kind())?;
        m.serialize_entry("value", &self.value)?;
        match &self.payload {
            WitnessPayload::SchmidtVector { xs, ys } => {
                let xs: Vec<_> = xs.iter().map(vector_json).collect();
                let ys: Vec<_> = ys.iter().map(vector_json).collect();
                m.serialize_entry("x", &xs)?;
                m.serialize_entry("y", &ys)?;
            }
            WitnessPayload::SchwarzOperator { n, x } => {
                m.serialize_entry("n", n)?;
                m.serialize_entry("X", &matrix_json(x))?;
            }
            WitnessPayload::HermitianTestOperator { x } => {
                m.serialize_entry("X", &matrix_json(x))?;
            }
        }
        m.end()
    }
}

impl Serialize for PositivityVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("property", &self.property)?;
        m.serialize_entry("status", &self.status)?;
        m.serialize_entry("value", &finite_or_null(self.value))?;
        if let Some(w) = &self.witness {
            m.serialize_entry("witness", w)?;
        }
        match &self.certificate {
            Some(Certificate::MinEigenvalue { value, index }) => {
                m.serialize_entry(
                    "certificate",
                    &serde_json::json!({"kind": "min_eigenvalue", "value": value, "index": index}),
                )?;
            }
            Some(Certificate::Decomposition { residual, .. }) => {
                m.serialize_entry(
                    "certificate",
                    &serde_json::json!({"kind": "decomposition", "residual": residual}),
                )?;
            }
            Some(Certificate::ClosedForm) => {
                m.serialize_entry("certificate", &serde_json::json!({"kind": "closed_form"}))?;
            }
            None => {}
        }
        m.serialize_entry("tolerances", &self.tolerances)?;
        m.serialize_entry("seed", &self.seed)?;
        m.serialize_entry("restarts_used", &self.restarts_used)?;
        if let Some(p) = &self.inherited_from {
            m.serialize_entry("inherited_from", p)?;
        }
        m.end()
    }
}

fn finite_or_null(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
