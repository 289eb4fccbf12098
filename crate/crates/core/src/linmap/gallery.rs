use super::MapRep;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};

/// Named maps used throughout the crate and the CLI.
#[derive(Debug, Clone)]
pub enum GalleryMap {
    Identity {
        d: usize,
    },
    Transposition {
        d: usize,
    },
    /// `X ↦ Σ_i <b_i|X|b_i> |b_i><b_i|`; the columns of `basis` are the
    /// `|b_i>` (computational basis when `None`).
    Pinching {
        d: usize,
        basis: Option<CMat>,
    },
    UnitaryConjugation {
        u: CMat,
    },
    /// `X ↦ Tr(X) 𝕀 / d`.
    DepolarizingContraction {
        d: usize,
    },
    /// `Φ_a(X) = (Tr(X) 𝕀 − a X) / (d − a)`.
    PhiA {
        d: usize,
        a: f64,
    },
    /// `Φ_{a,T}(X) = (Tr(X) 𝕀 − a Xᵀ) / (d − a)`.
    PhiAT {
        d: usize,
        a: f64,
    },
    /// `Ψ_λ(X) = λ Tr(X) 𝕀 / d + (1 − λ) Φ(X)`.
    SpaMix {
        map: Box<MapRep>,
        lambda: f64,
    },
}

pub fn gallery(name: &GalleryMap) -> Result<MapRep> {
    match name {
        GalleryMap::Identity { d } => Ok(MapRep::identity(positive(*d)?)),
        GalleryMap::Transposition { d } => Ok(transposition(positive(*d)?)),
        GalleryMap::Pinching { d, basis } => pinching(positive(*d)?, basis.as_ref()),
        GalleryMap::UnitaryConjugation { u } => unitary_conjugation(u),
        GalleryMap::DepolarizingContraction { d } => Ok(depolarizing(positive(*d)?)),
        GalleryMap::PhiA { d, a } => phi_family(positive(*d)?, *a, false),
        GalleryMap::PhiAT { d, a } => phi_family(positive(*d)?, *a, true),
        GalleryMap::SpaMix { map, lambda } => spa_mix(map, *lambda),
    }
}

fn positive(d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::BadParameter("dimension must be positive".into()));
    }
    Ok(d)
}

pub(crate) fn transposition(d: usize) -> MapRep {
    let n = d * d;
    let mut s = CMat::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            // E_ij ↦ E_ji
            s[(j + i * d, i + j * d)] = linalg::ONE;
        }
    }
    MapRep::from_superop(d, s).expect("transposition shape")
}

pub(crate) fn depolarizing(d: usize) -> MapRep {
    let n = d * d;
    let mut s = CMat::zeros(n, n);
    let w = c(1.0 / d as f64, 0.0);
    for i in 0..d {
        for k in 0..d {
            s[(k + k * d, i + i * d)] = w;
        }
    }
    MapRep::from_superop(d, s).expect("depolarizing shape")
}

fn pinching(d: usize, basis: Option<&CMat>) -> Result<MapRep> {
    match basis {
        None => {
            let n = d * d;
            let mut s = CMat::zeros(n, n);
            for i in 0..d {
                s[(i + i * d, i + i * d)] = linalg::ONE;
            }
            MapRep::from_superop(d, s)
        }
        Some(u) => {
            if u.shape() != (d, d) {
                return Err(Error::DimensionMismatch(
                    "pinching basis must be d x d".into(),
                ));
            }
            check_unitary(u)?;
            let projectors: Vec<CMat> = (0..d)
                .map(|i| {
                    let col = u.column(i).into_owned();
                    linalg::outer(&col, &col)
                })
                .collect();
            MapRep::from_fn(d, |x| {
                projectors
                    .iter()
                    .fold(CMat::zeros(d, d), |acc, p| acc + p * x * p)
            })
        }
    }
}

fn check_unitary(u: &CMat) -> Result<()> {
    let d = linalg::check_square(u, "unitary")?;
    let defect = linalg::frobenius(&(u.adjoint() * u - linalg::identity(d)));
    if defect > 1e-10 {
        return Err(Error::BadParameter(format!(
            "matrix is not unitary (defect {defect:.3e})"
        )));
    }
    Ok(())
}

fn unitary_conjugation(u: &CMat) -> Result<MapRep> {
    let d = linalg::check_square(u, "unitary")?;
    if d == 0 {
        return Err(Error::BadParameter("dimension must be positive".into()));
    }
    check_unitary(u)?;
    MapRep::from_superop(d, linalg::kron(&u.conjugate(), u))
}

fn phi_family(d: usize, a: f64, transposed: bool) -> Result<MapRep> {
    if !a.is_finite() {
        return Err(Error::BadParameter(format!("a must be finite, got {a}")));
    }
    if a == d as f64 {
        return Err(Error::BadParameter(format!(
            "a = d = {d} makes the normalization singular"
        )));
    }
    let scale = 1.0 / (d as f64 - a);
    let base = if transposed {
        transposition(d)
    } else {
        MapRep::identity(d)
    };
    let trace_part = depolarizing(d).scale(d as f64);
    let s = (trace_part.superop() - base.superop().scale(a)).scale(scale);
    MapRep::from_superop(d, s)
}

fn spa_mix(map: &MapRep, lambda: f64) -> Result<MapRep> {
    if !lambda.is_finite() {
        return Err(Error::BadParameter("lambda must be finite".into()));
    }
    let d = map.dim();
    let s = depolarizing(d).superop().scale(lambda) + map.superop().scale(1.0 - lambda);
    MapRep::from_superop(d, s)
}

/// Normalized discrete Fourier unitary, `F_jk = ω^{jk} / √d`.
pub fn fourier_unitary(d: usize) -> CMat {
    let w = 2.0 * std::f64::consts::PI / d as f64;
    let s = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, d, |j, k| {
        let phase = w * (j * k) as f64;
        c(phase.cos() * s, phase.sin() * s)
    })
}
