//! Discrete and continuous semigroups, classical and quantum.

use rayon::prelude::*;
use serde::Serialize;

use crate::bridge::{KolmogorovGenerator, ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::json::{matrix_json, MatrixJson};
use crate::linalg::{self, c, CMat, RMat, I};
use crate::linmap::{self, DensityMatrix, MapRep, DEFAULT_STRUCT_TOL};
use crate::positivity::DEFAULT_CP_TOL;

/// Tolerance used to flag trajectory points as valid states.
pub const TRAJECTORY_TOL: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-10;

/// `𝓛(X) = −i[H, X] + Σ_k (L_k X L_k* − ½{L_k* L_k, X})`
#[derive(Debug, Clone, PartialEq)]
pub struct GklsGenerator {
    h: CMat,
    jumps: Vec<CMat>,
}

impl GklsGenerator {
    pub fn new(h: CMat, jumps: Vec<CMat>) -> Result<Self> {
        let d = linalg::check_square(&h, "Hamiltonian")?;
        let defect = linalg::hermiticity_defect(&h);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(format!(
                "Hamiltonian defect {defect:.3e}"
            )));
        }
        for (k, l) in jumps.iter().enumerate() {
            if l.nrows() != d || l.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "jump {k} is {}x{}, Hamiltonian is {d}x{d}",
                    l.nrows(),
                    l.ncols()
                )));
            }
        }
        Ok(GklsGenerator { h, jumps })
    }

    pub fn zero(d: usize) -> Self {
        GklsGenerator {
            h: CMat::zeros(d, d),
            jumps: Vec::new(),
        }
    }

    /// Random generator with a GUE Hamiltonian and Ginibre jumps.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, d: usize, n_jumps: usize) -> Self {
        let h = linalg::random_hermitian(rng, d);
        let jumps = (0..n_jumps).map(|_| linalg::ginibre(rng, d, d)).collect();
        GklsGenerator { h, jumps }
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h
    }

    pub fn jumps(&self) -> &[CMat] {
        &self.jumps
    }

    pub fn superop(&self) -> MapRep {
        gkls_superop(self)
    }
}

/// Column-stacking superoperator of the generator.
pub fn gkls_superop(g: &GklsGenerator) -> MapRep {
    let d = g.dim();
    let id = linalg::identity(d);
    let mut s = (linalg::kron(&id, &g.h) - linalg::kron(&g.h.transpose(), &id)) * (-I);
    for l in &g.jumps {
        let ll = l.adjoint() * l;
        s += linalg::kron(&l.conjugate(), l);
        s -= (linalg::kron(&id, &ll) + linalg::kron(&ll.transpose(), &id)) * c(0.5, 0.0);
    }
    MapRep::from_superop(d, s).expect("square superoperator")
}

/// `exp(t 𝓛)` as a map.
pub fn semigroup_map(generator: &MapRep, t: f64) -> MapRep {
    let e = (generator.superop() * c(t, 0.0)).exp();
    MapRep::from_superop(generator.dim(), e).expect("square superoperator")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Gkls(GklsGenerator),
    Kolmogorov(KolmogorovGenerator),
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Quantum(DensityMatrix),
    Classical(ProbabilityVector),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepMap {
    Channel(MapRep),
    Stochastic(StochasticMatrix),
}

/// Raw trajectory value; kept unvalidated so drift can be reported.
#[derive(Debug, Clone, PartialEq)]
pub enum StateValue {
    Quantum(CMat),
    Classical(Vec<f64>),
}

impl StateValue {
    fn is_valid(&self) -> bool {
        match self {
            StateValue::Quantum(m) => DensityMatrix::validate(m, TRAJECTORY_TOL).is_ok(),
            StateValue::Classical(p) => {
                p.iter().all(|x| x.is_finite() && *x >= -TRAJECTORY_TOL)
                    && (p.iter().sum::<f64>() - 1.0).abs() <= TRAJECTORY_TOL
            }
        }
    }

    /// Trace for quantum states, total probability for classical ones.
    pub fn total(&self) -> f64 {
        match self {
            StateValue::Quantum(m) => linalg::trace(m).re,
            StateValue::Classical(p) => p.iter().sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    /// Time, or step index for discrete evolutions.
    pub t: f64,
    pub state: StateValue,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum StateRecord {
    Matrix(MatrixJson),
    Vector(Vec<f64>),
}

#[derive(Serialize)]
struct PointRecord {
    t: f64,
    state: StateRecord,
    valid: bool,
}

impl Trajectory {
    pub fn all_valid(&self) -> bool {
        self.points.iter().all(|p| p.valid)
    }

    /// One JSON object per line: `{"t", "state", "valid"}`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let state = match &p.state {
                StateValue::Quantum(m) => StateRecord::Matrix(matrix_json(m)),
                StateValue::Classical(v) => StateRecord::Vector(v.clone()),
            };
            let rec = PointRecord {
                t: p.t,
                state,
                valid: p.valid,
            };
            out.push_str(&serde_json::to_string(&rec).expect("serializable record"));
            out.push('\n');
        }
        out
    }
}

fn point(t: f64, state: StateValue) -> TrajectoryPoint {
    let valid = state.is_valid();
    TrajectoryPoint { t, state, valid }
}

fn mismatch(what: &str) -> Error {
    Error::KindMismatch(what.to_string())
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch(format!(
            "generator on dimension {expected}, state of dimension {got}"
        )));
    }
    Ok(())
}

pub fn evolve_continuous(generator: &Generator, x0: &State, times: &[f64]) -> Result<Trajectory> {
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::BadParameter(format!("time {t} is not finite")));
    }
    let points = match (generator, x0) {
        (Generator::Gkls(g), State::Quantum(rho)) => {
            check_dim(g.dim(), rho.dim())?;
            let sup = gkls_superop(g);
            let v0 = linalg::vectorize(rho.matrix());
            let d = g.dim();
            times
                .par_iter()
                .map(|&t| {
                    let e = (sup.superop() * c(t, 0.0)).exp();
                    let v = e * &v0;
                    point(t, StateValue::Quantum(linalg::unvectorize(&v, d, d)))
                })
                .collect()
        }
        (Generator::Kolmogorov(l), State::Classical(p)) => {
            check_dim(l.dim(), p.dim())?;
            let p0 = nalgebra::DVector::from_column_slice(p.entries());
            times
                .par_iter()
                .map(|&t| {
                    let e = (l.matrix() * t).exp();
                    let v = e * &p0;
                    point(t, StateValue::Classical(v.iter().copied().collect()))
                })
                .collect()
        }
        (Generator::Gkls(_), State::Classical(_)) => {
            return Err(mismatch("GKLS generator with a probability vector"));
        }
        (Generator::Kolmogorov(_), State::Quantum(_)) => {
            return Err(mismatch("Kolmogorov generator with a density matrix"));
        }
    };
    Ok(Trajectory { points })
}

/// Iterates `step` `n_steps` times, recording the initial state at `t = 0`.
pub fn evolve_discrete(
    step: &StepMap,
    x0: &State,
    n_steps: usize,
    validate: bool,
) -> Result<Trajectory> {
    let mut points = Vec::with_capacity(n_steps + 1);
    match (step, x0) {
        (StepMap::Channel(map), State::Quantum(rho)) => {
            check_dim(map.dim(), rho.dim())?;
            if validate {
                validate_channel(map)?;
            }
            let mut x = rho.matrix().clone();
            points.push(point(0.0, StateValue::Quantum(x.clone())));
            for k in 1..=n_steps {
                x = map.apply(&x)?;
                points.push(point(k as f64, StateValue::Quantum(x.clone())));
            }
        }
        (StepMap::Stochastic(s), State::Classical(p)) => {
            check_dim(s.dim(), p.dim())?;
            if validate && !s.is_column_stochastic() {
                return Err(Error::InvalidStepMap(
                    "matrix is not column-stochastic".into(),
                ));
            }
            let mut x = nalgebra::DVector::from_column_slice(p.entries());
            points.push(point(
                0.0,
                StateValue::Classical(x.iter().copied().collect()),
            ));
            for k in 1..=n_steps {
                x = s.matrix() * x;
                points.push(point(
                    k as f64,
                    StateValue::Classical(x.iter().copied().collect()),
                ));
            }
        }
        (StepMap::Channel(_), State::Classical(_)) => {
            return Err(mismatch("channel with a probability vector"))
        }
        (StepMap::Stochastic(_), State::Quantum(_)) => {
            return Err(mismatch("stochastic matrix with a density matrix"))
        }
    }
    Ok(Trajectory { points })
}

fn validate_channel(map: &MapRep) -> Result<()> {
    if !linmap::is_trace_preserving(map, DEFAULT_STRUCT_TOL) {
        return Err(Error::InvalidStepMap("map is not trace-preserving".into()));
    }
    if !linmap::is_hermiticity_preserving(map, DEFAULT_STRUCT_TOL) {
        return Err(Error::InvalidStepMap(
            "map is not Hermiticity-preserving".into(),
        ));
    }
    let min = linalg::min_eigenvalue(&linalg::hermitian_part(map.choi()));
    if min < -DEFAULT_CP_TOL {
        return Err(Error::InvalidStepMap(format!("Choi eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// `exp(tL)` for a real generator matrix.
pub fn classical_semigroup(l: &RMat, t: f64) -> RMat {
    (l * t).exp()
}
