//! Shared JSON interchange formats.
//!
//! * matrix: `{"d": n, "re": [[..]], "im": [[..]]}` with rows listed in order
//! * map: `{"d": d, "superop" | "choi": matrix}` or `{"d": d, "kraus": [matrix, ..]}`
//! * state: a matrix with an optional `"dims": [dA, dB]`
//! * probability vector: a bare array
//! * stochastic matrix: `{"d": d, "rows": [[..]]}`
//! * generator: `{"W": matrix}` (classical rates) or `{"H": matrix, "jumps": [matrix, ..]}`

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bridge::{KolmogorovGenerator, ProbabilityVector, StochasticMatrix, STOCHASTIC_TOL};
use crate::dynamics::{Generator, GklsGenerator};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, CVec, RMat};
use crate::linmap::{kraus_from_choi, DensityMatrix, KrausSet, MapRep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub d: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<CMat> {
        let d = self.d;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !shape_ok(&self.re) || !(self.im.is_empty() || shape_ok(&self.im)) {
            return Err(Error::DimensionMismatch(format!(
                "matrix rows do not match d = {d}"
            )));
        }
        let m = CMat::from_fn(d, d, |i, j| {
            let im = if self.im.is_empty() {
                0.0
            } else {
                self.im[i][j]
            };
            c(self.re[i][j], im)
        });
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        Ok(m)
    }

    pub fn to_real(&self) -> Result<RMat> {
        let m = self.to_matrix()?;
        if m.iter().any(|z| z.im != 0.0) {
            return Err(Error::Parse("expected a real matrix".into()));
        }
        Ok(m.map(|z| z.re))
    }
}

pub fn matrix_json(m: &CMat) -> MatrixJson {
    let rows = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
            .collect()
    };
    MatrixJson {
        d: m.nrows(),
        re: rows(|z| z.re),
        im: rows(|z| z.im),
    }
}

pub fn real_matrix_json(m: &RMat) -> MatrixJson {
    let rows = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect();
    MatrixJson {
        d: m.nrows(),
        re: rows,
        im: Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

pub fn vector_json(v: &CVec) -> VectorJson {
    VectorJson {
        re: v.iter().map(|z| z.re).collect(),
        im: v.iter().map(|z| z.im).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Superop,
    Choi,
    Kraus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub superop: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
}

impl MapJson {
    pub fn to_map(&self) -> Result<MapRep> {
        let d = self.d;
        let square = |m: &MatrixJson| -> Result<CMat> {
            if m.d != d * d {
                return Err(Error::DimensionMismatch(format!(
                    "expected a {0}x{0} matrix for d = {d}",
                    d * d
                )));
            }
            m.to_matrix()
        };
        match (&self.superop, &self.choi, &self.kraus) {
            (Some(s), None, None) => MapRep::from_superop(d, square(s)?),
            (None, Some(ch), None) => MapRep::from_choi(d, square(ch)?),
            (None, None, Some(ks)) => {
                let ops = ks
                    .iter()
                    .map(|k| {
                        if k.d != d {
                            return Err(Error::DimensionMismatch(format!(
                                "Kraus operator of size {} for d = {d}",
                                k.d
                            )));
                        }
                        k.to_matrix()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(KrausSet::new(d, ops)?.to_map())
            }
            _ => Err(Error::Parse(
                "a map needs exactly one of superop, choi, kraus".into(),
            )),
        }
    }
}

pub fn map_to_json(map: &MapRep, format: MapFormat, tol: f64) -> Result<MapJson> {
    let mut out = MapJson {
        d: map.dim(),
        superop: None,
        choi: None,
        kraus: None,
    };
    match format {
        MapFormat::Superop => out.superop = Some(matrix_json(map.superop())),
        MapFormat::Choi => out.choi = Some(matrix_json(map.choi())),
        MapFormat::Kraus => {
            let ks = kraus_from_choi(map.dim(), map.choi(), tol)?;
            out.kraus = Some(ks.operators().iter().map(matrix_json).collect());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    #[serde(flatten)]
    pub matrix: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

pub fn state_json(rho: &CMat, dims: Option<(usize, usize)>) -> StateJson {
    StateJson {
        matrix: matrix_json(rho),
        dims: dims.map(|(a, b)| [a, b]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticJson {
    pub d: usize,
    pub rows: Vec<Vec<f64>>,
}

impl StochasticJson {
    pub fn to_matrix(&self) -> Result<StochasticMatrix> {
        let d = self.d;
        if self.rows.len() != d || self.rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "stochastic rows do not match d = {d}"
            )));
        }
        let m = RMat::from_fn(d, d, |i, j| self.rows[i][j]);
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite stochastic entry".into()));
        }
        Ok(StochasticMatrix::classified(m, STOCHASTIC_TOL))
    }
}

pub fn stochastic_json(m: &RMat) -> StochasticJson {
    StochasticJson {
        d: m.nrows(),
        rows: real_matrix_json(m).re,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorJson {
    Kolmogorov {
        #[serde(rename = "W")]
        w: MatrixJson,
    },
    Gkls {
        #[serde(rename = "H")]
        h: MatrixJson,
        #[serde(default)]
        jumps: Vec<MatrixJson>,
    },
}

impl GeneratorJson {
    pub fn to_generator(&self) -> Result<Generator> {
        match self {
            GeneratorJson::Kolmogorov { w } => Ok(Generator::Kolmogorov(
                KolmogorovGenerator::from_rates(w.to_real()?)?,
            )),
            GeneratorJson::Gkls { h, jumps } => {
                let jumps = jumps
                    .iter()
                    .map(MatrixJson::to_matrix)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Generator::Gkls(GklsGenerator::new(h.to_matrix()?, jumps)?))
            }
        }
    }
}

/// Any of the interchange objects, recognized by shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Map(MapRep),
    State {
        rho: DensityMatrix,
        dims: Option<(usize, usize)>,
    },
    Probability(ProbabilityVector),
    Stochastic(StochasticMatrix),
    Generator(Generator),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Map(_) => "map",
            Document::State { .. } => "state",
            Document::Probability(_) => "probability vector",
            Document::Stochastic(_) => "stochastic matrix",
            Document::Generator(_) => "generator",
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text)?;
    let has = |k: &str| value.get(k).is_some();
    if value.is_array() {
        let p: Vec<f64> = serde_json::from_value(value)?;
        return Ok(Document::Probability(ProbabilityVector::new(p)?));
    }
    if !value.is_object() {
        return Err(Error::Parse("expected a JSON object or array".into()));
    }
    if has("superop") || has("choi") || has("kraus") {
        let m: MapJson = serde_json::from_value(value)?;
        return Ok(Document::Map(m.to_map()?));
    }
    if has("rows") {
        let s: StochasticJson = serde_json::from_value(value)?;
        return Ok(Document::Stochastic(s.to_matrix()?));
    }
    if has("W") || has("H") {
        let g: GeneratorJson = serde_json::from_value(value)?;
        return Ok(Document::Generator(g.to_generator()?));
    }
    if has("re") {
        let s: StateJson = serde_json::from_value(value)?;
        let m = s.matrix.to_matrix()?;
        let dims = s.dims.map(|[a, b]| (a, b));
        if let Some((a, b)) = dims {
            if a * b != m.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "dims {a}x{b} for a state of size {}",
                    m.nrows()
                )));
            }
        }
        return Ok(Document::State {
            rho: DensityMatrix::new(m)?,
            dims,
        });
    }
    Err(Error::Parse("unrecognized document".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::linmap::{gallery, GalleryMap};
    use crate::rng;

    #[test]
    fn matrix_round_trip() {
        let mut r = rng::seeded(1);
        let m = linalg::ginibre(&mut r, 3, 3);
        let text = serde_json::to_string(&matrix_json(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn map_formats_round_trip() {
        let m = gallery(&GalleryMap::PhiA { d: 2, a: 0.3 }).unwrap();
        for fmt in [MapFormat::Superop, MapFormat::Choi, MapFormat::Kraus] {
            let j = map_to_json(&m, fmt, 1e-10).unwrap();
            let text = serde_json::to_string(&j).unwrap();
            let Document::Map(back) = parse_document(&text).unwrap() else {
                panic!("not a map")
            };
            assert!(linalg::frobenius(&(back.superop() - m.superop())) < 1e-12);
        }
    }

    #[test]
    fn kraus_of_non_cp_map_is_domain_error() {
        let t = gallery(&GalleryMap::Transposition { d: 2 }).unwrap();
        assert!(matches!(
            map_to_json(&t, MapFormat::Kraus, 1e-10),
            Err(Error::NotCompletelyPositive { .. })
        ));
    }

    #[test]
    fn documents_recognized() {
        assert!(matches!(
            parse_document("[0.25, 0.75]").unwrap(),
            Document::Probability(_)
        ));
        let s = parse_document(r#"{"d": 2, "rows": [[0.5, 0.5], [0.5, 0.5]]}"#).unwrap();
        let Document::Stochastic(s) = s else { panic!() };
        assert!(s.is_column_stochastic());
        let g = parse_document(r#"{"W": {"d": 2, "re": [[0, 1], [1, 0]]}}"#).unwrap();
        assert!(matches!(g, Document::Generator(Generator::Kolmogorov(_))));
        let g = parse_document(r#"{"H": {"d": 1, "re": [[1]]}, "jumps": []}"#).unwrap();
        assert!(matches!(g, Document::Generator(Generator::Gkls(_))));
        let st = parse_document(r#"{"d": 2, "re": [[0.5, 0], [0, 0.5]], "dims": [1, 2]}"#).unwrap();
        assert!(matches!(
            st,
            Document::State {
                dims: Some((1, 2)),
                ..
            }
        ));
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(parse_document("{"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_document(r#"{"d": 3, "re": [[1]]}"#),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            parse_document(r#"{"foo": 1}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_document("[0.5, 0.6]"),
            Err(Error::NotInSimplex(_))
        ));
    }
}
