use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{BasisChoice, ProbabilityVector};
use crate::dynamics::{classical_semigroup, semigroup_map, GklsGenerator};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat};
use crate::linmap::MapRep;
use crate::positivity::Status;
use crate::rng;

/// `L_ij = W_ij − δ_ij Σ_k W_kj`
#[derive(Debug, Clone, PartialEq)]
pub struct KolmogorovGenerator {
    w: RMat,
    l: RMat,
}

impl KolmogorovGenerator {
    /// Diagonal rates are dropped: they cancel in `L`.
    pub fn from_rates(w: RMat) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} rate matrix",
                w.nrows(),
                w.ncols()
            )));
        }
        let d = w.nrows();
        let mut w = w;
        for j in 0..d {
            for i in 0..d {
                let rate = w[(i, j)];
                if !rate.is_finite() {
                    return Err(Error::BadParameter(format!("rate at ({i}, {j}) is {rate}")));
                }
                if i != j && rate < 0.0 {
                    return Err(Error::NegativeRate {
                        row: i,
                        col: j,
                        rate,
                    });
                }
            }
            w[(j, j)] = 0.0;
        }
        let mut l = w.clone();
        for j in 0..d {
            l[(j, j)] = -w.column(j).sum();
        }
        Ok(KolmogorovGenerator { w, l })
    }

    /// Reads the rates off a generator matrix, after checking its shape.
    pub fn from_matrix(l: RMat, tol: f64) -> Result<Self> {
        if l.nrows() != l.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} generator",
                l.nrows(),
                l.ncols()
            )));
        }
        if let Some((j, s)) = l
            .column_iter()
            .map(|col| col.sum())
            .enumerate()
            .find(|(_, s)| s.abs() > tol)
        {
            return Err(Error::BadParameter(format!(
                "column {j} of the generator sums to {s}"
            )));
        }
        let mut w = l;
        for j in 0..w.ncols() {
            for i in 0..w.nrows() {
                if i != j && w[(i, j)] < 0.0 {
                    if w[(i, j)] < -tol {
                        return Err(Error::NegativeRate {
                            row: i,
                            col: j,
                            rate: w[(i, j)],
                        });
                    }
                    w[(i, j)] = 0.0;
                }
            }
        }
        Self::from_rates(w)
    }

    /// Rates drawn uniformly from `[0, 1)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        let w = RMat::from_fn(d, d, |i, j| if i == j { 0.0 } else { rng.random::<f64>() });
        Self::from_rates(w).expect("nonnegative rates")
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn rates(&self) -> &RMat {
        &self.w
    }

    pub fn matrix(&self) -> &RMat {
        &self.l
    }
}

pub fn is_kolmogorov(l: &RMat, tol: f64) -> bool {
    l.nrows() == l.ncols()
        && l.iter().all(|x| x.is_finite())
        && l.column_iter().all(|col| col.sum().abs() <= tol)
        && (0..l.ncols()).all(|j| (0..l.nrows()).all(|i| i == j || l[(i, j)] >= -tol))
}

/// Normalized null vector of `L`.
pub fn stationary_distribution(l: &KolmogorovGenerator) -> Result<ProbabilityVector> {
    let svd = l.matrix().clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("nonempty generator");
    let v: Vec<f64> = v_t.row(k).iter().copied().collect();
    let s: f64 = v.iter().sum();
    if s.abs() < 1e-300 {
        return Err(Error::BadParameter(
            "null vector has zero total weight".into(),
        ));
    }
    ProbabilityVector::renormalized(v.into_iter().map(|x| x / s).collect(), 1e-9)
}

/// Purely dissipative generator with jumps `√W_ij |i⟩⟨j|`.
pub fn gkls_from_kolmogorov(l: &KolmogorovGenerator) -> GklsGenerator {
    let d = l.dim();
    let mut jumps = Vec::new();
    for j in 0..d {
        for i in 0..d {
            let w = l.w[(i, j)];
            if i != j && w > 0.0 {
                jumps.push(linalg::matrix_unit(d, i, j) * c(w.sqrt(), 0.0));
            }
        }
    }
    GklsGenerator::new(CMat::zeros(d, d), jumps).expect("zero Hamiltonian")
}

/// `L_ij = ⟨b_i|𝓛(|b_j⟩⟨b_j|)|b_i⟩` for any generator superoperator.
pub fn kolmogorov_from_generator(generator: &MapRep, basis: &BasisChoice) -> Result<RMat> {
    let d = generator.dim();
    if basis.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "basis of size {} for a generator on M_{d}",
            basis.dim()
        )));
    }
    Ok(RMat::from_fn(d, d, |i, j| {
        let out = generator.apply_unchecked(&basis.unit(j, j));
        let b = basis.vector(i);
        (b.adjoint() * out * &b)[(0, 0)].re
    }))
}

pub fn kolmogorov_from_gkls(g: &GklsGenerator, basis: &BasisChoice) -> Result<RMat> {
    kolmogorov_from_generator(&g.superop(), basis)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KossakowskiReport {
    pub status: Status,
    pub bases_checked: usize,
    /// Smallest off-diagonal entry over all reductions.
    pub worst_off_diagonal: f64,
    /// Largest column-sum magnitude over all reductions.
    pub worst_column_sum: f64,
    /// Lowest-index basis whose reduction failed.
    pub failing_basis_index: Option<usize>,
    #[serde(skip)]
    pub failing_basis: Option<CMat>,
    pub seed: u64,
}

/// Reduces `generator` in `n_bases` Haar-random bases and refutes if any
/// reduction is not a Kolmogorov generator.
pub fn kossakowski_sample_check(
    generator: &MapRep,
    n_bases: usize,
    seed: u64,
    tol: f64,
) -> KossakowskiReport {
    let d = generator.dim();
    let per_basis: Vec<(f64, f64, BasisChoice)> = (0..n_bases)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            let basis = BasisChoice::haar(&mut r, d);
            let l = kolmogorov_from_generator(generator, &basis).expect("matching basis");
            let off = (0..d)
                .flat_map(|j| (0..d).filter(move |&i| i != j).map(move |i| (i, j)))
                .map(|ij| l[ij])
                .fold(f64::INFINITY, f64::min);
            let sums = l
                .column_iter()
                .map(|col| col.sum().abs())
                .fold(0.0, f64::max);
            (off, sums, basis)
        })
        .collect();
    let fails = |off: f64, sums: f64| off < -tol || sums > tol;
    let failing = per_basis
        .iter()
        .position(|(off, sums, _)| fails(*off, *sums));
    KossakowskiReport {
        status: if failing.is_some() {
            Status::Refuted
        } else {
            Status::Undetermined
        },
        bases_checked: n_bases,
        worst_off_diagonal: per_basis.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        worst_column_sum: per_basis.iter().map(|p| p.1).fold(0.0, f64::max),
        failing_basis_index: failing,
        failing_basis: failing.map(|k| per_basis[k].2.unitary().clone()),
        seed,
    }
}

/// Reducing the generator and then exponentiating, against exponentiating
/// and then reducing each map; the two need not agree.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionComparison {
    pub reduced_then_exp: RMat,
    pub exp_then_reduced: RMat,
    pub max_difference: f64,
}

pub fn compare_reductions(
    generator: &MapRep,
    basis: &BasisChoice,
    t: f64,
) -> Result<ReductionComparison> {
    let l = kolmogorov_from_generator(generator, basis)?;
    let reduced_then_exp = classical_semigroup(&l, t);
    let map = semigroup_map(generator, t);
    let exp_then_reduced = super::stochastic_from_map(&map, basis)?.matrix().clone();
    let max_difference = (&reduced_then_exp - &exp_then_reduced).amax();
    Ok(ReductionComparison {
        reduced_then_exp,
        exp_then_reduced,
        max_difference,
    })
}
