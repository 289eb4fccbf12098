//! Maps and bases constructible from command-line flags.

use clap::ValueEnum;

use posmap::bridge::BasisChoice;
use posmap::linalg::{self, c, CMat};
use posmap::linmap::{fourier_unitary, gallery, GalleryMap, MapRep};
use posmap::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum GalleryName {
    Identity,
    Transposition,
    Pinching,
    Depolarizing,
    PhiA,
    PhiAt,
    Hadamard,
    Fourier,
    /// Random non-Hermiticity-preserving map drawn from `--seed`.
    Ginibre,
}

pub fn build(name: GalleryName, d: usize, a: Option<f64>, seed: u64) -> Result<MapRep> {
    if d < 1 {
        return Err(Error::BadParameter("--d must be at least 1".into()));
    }
    let need_a = || a.ok_or_else(|| Error::BadParameter(format!("gallery map {name:?} needs --a")));
    let spec = match name {
        GalleryName::Identity => GalleryMap::Identity { d },
        GalleryName::Transposition => GalleryMap::Transposition { d },
        GalleryName::Pinching => GalleryMap::Pinching { d, basis: None },
        GalleryName::Depolarizing => GalleryMap::DepolarizingContraction { d },
        GalleryName::PhiA => GalleryMap::PhiA { d, a: need_a()? },
        GalleryName::PhiAt => GalleryMap::PhiAT { d, a: need_a()? },
        GalleryName::Hadamard => GalleryMap::UnitaryConjugation { u: hadamard(d)? },
        GalleryName::Fourier => GalleryMap::UnitaryConjugation {
            u: fourier_unitary(d),
        },
        GalleryName::Ginibre => {
            let mut r = rng::seeded(seed);
            return MapRep::from_superop(d, linalg::ginibre(&mut r, d * d, d * d));
        }
    };
    gallery(&spec)
}

/// Normalized Sylvester Hadamard matrix; `d` must be a power of two.
fn hadamard(d: usize) -> Result<CMat> {
    if !d.is_power_of_two() {
        return Err(Error::BadParameter(format!(
            "hadamard needs a power-of-two d, got {d}"
        )));
    }
    let s = 1.0 / (d as f64).sqrt();
    Ok(CMat::from_fn(d, d, |i, j| {
        let sign = if (i & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        c(sign * s, 0.0)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisName {
    Canonical,
    Fourier,
    /// Haar-random, drawn from `--seed`.
    Haar,
}

pub fn basis(name: BasisName, d: usize, seed: u64) -> Result<BasisChoice> {
    match name {
        BasisName::Canonical => Ok(BasisChoice::canonical(d)),
        BasisName::Fourier => BasisChoice::from_unitary(fourier_unitary(d)),
        BasisName::Haar => Ok(BasisChoice::haar(&mut rng::seeded(seed), d)),
    }
}
