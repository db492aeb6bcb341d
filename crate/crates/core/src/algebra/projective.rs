//! Points of projective spaces over finite fields.

use serde::{Deserialize, Serialize};

use super::field::{Field, FiniteField};
use crate::error::{GeomError, Result};

/// A nonzero vector scaled so its first nonzero coordinate is one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectivePoint<F> {
    coords: Vec<F>,
}

impl<F: Field> ProjectivePoint<F> {
    /// `None` for the zero vector.
    pub fn new(v: &[F]) -> Option<Self> {
        let lead = v.iter().find(|x| !x.is_zero())?;
        let inv = lead.checked_inv().expect("nonzero");
        Some(ProjectivePoint {
            coords: v.iter().map(|&x| x * inv).collect(),
        })
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl<F: FiniteField> ProjectivePoint<F> {
    pub fn to_u32s(&self) -> Vec<u32> {
        self.coords.iter().map(|x| x.to_u32()).collect()
    }
}

impl<F: FiniteField> Serialize for ProjectivePoint<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_u32s().serialize(s)
    }
}

impl<'de, F: FiniteField> Deserialize<'de> for ProjectivePoint<F> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<u32>::deserialize(d)?;
        let v: Vec<F> = raw.into_iter().map(F::from_u32).collect();
        ProjectivePoint::new(&v).ok_or_else(|| serde::de::Error::custom("zero vector"))
    }
}

/// All vectors of `F^dim` in lexicographic order of coordinates.
pub fn all_vectors<F: FiniteField>(dim: usize) -> impl Iterator<Item = Vec<F>> {
    let q = F::ORDER as u64;
    let total = q.pow(dim as u32);
    (0..total).map(move |mut i| {
        let mut v = vec![F::zero(); dim];
        for slot in v.iter_mut().rev() {
            *slot = F::from_u32((i % q) as u32);
            i /= q;
        }
        v
    })
}

/// All points of `PG(dim-1, q)`, sorted by normalized coordinates.
pub fn projective_points<F: FiniteField>(dim: usize) -> Result<Vec<ProjectivePoint<F>>> {
    if dim == 0 {
        return Err(GeomError::Invalid(
            "vector space dimension must be positive".into(),
        ));
    }
    Ok(all_vectors::<F>(dim)
        .filter(|v| v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_one()))
        .map(|coords| ProjectivePoint { coords })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Fp;

    type F3 = Fp<3>;

    #[test]
    fn normalization_is_canonical() {
        let a = ProjectivePoint::new(&[F3::new(0), F3::new(2), F3::new(1)]).unwrap();
        let b = ProjectivePoint::new(&[F3::new(0), F3::new(1), F3::new(2)]).unwrap();
        assert_eq!(a, b);
        assert!(ProjectivePoint::<F3>::new(&[F3::new(0); 3]).is_none());
    }

    #[test]
    fn point_counts() {
        assert_eq!(projective_points::<F3>(2).unwrap().len(), 4);
        assert_eq!(projective_points::<F3>(4).unwrap().len(), 40);
        assert_eq!(projective_points::<Fp<2>>(3).unwrap().len(), 7);
    }
}
