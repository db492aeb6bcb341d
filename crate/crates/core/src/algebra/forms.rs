//! Bilinear, quadratic and alternating multilinear forms.

use std::collections::BTreeMap;

use itertools::Itertools;

use super::field::{Field, FiniteField};
use super::linalg;
use super::projective::{projective_points, ProjectivePoint};
use crate::error::{GeomError, Result};

/// `ξ(u, v) = uᵀ A v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearForm<F> {
    matrix: Vec<Vec<F>>,
}

impl<F: Field> BilinearForm<F> {
    pub fn new(matrix: Vec<Vec<F>>) -> Result<Self> {
        let rows = matrix.len();
        if let Some(bad) = matrix.iter().find(|r| r.len() != rows) {
            return Err(GeomError::NotSquare {
                rows,
                cols: bad.len(),
            });
        }
        Ok(BilinearForm { matrix })
    }

    /// The standard alternating form with matrix `[[0, I], [-I, 0]]`.
    pub fn standard_symplectic(dim: usize) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(GeomError::Invalid(format!(
                "symplectic forms need even positive dimension, got {dim}"
            )));
        }
        let h = dim / 2;
        let mut m = vec![vec![F::zero(); dim]; dim];
        for i in 0..h {
            m[i][i + h] = F::one();
            m[i + h][i] = -F::one();
        }
        Ok(BilinearForm { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<F>] {
        &self.matrix
    }

    pub fn eval(&self, u: &[F], v: &[F]) -> F {
        let av = linalg::mat_vec(&self.matrix, v);
        u.iter().zip(&av).fold(F::zero(), |s, (&a, &b)| s + a * b)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|x| x.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.matrix[i][j] == self.matrix[j][i]))
    }

    /// Zero diagonal and `Aᵀ = -A`, i.e. `ξ(v, v) = 0` for every `v`.
    pub fn is_alternating(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            self.matrix[i][i].is_zero() && (0..n).all(|j| self.matrix[i][j] == -self.matrix[j][i])
        })
    }

    /// Classification by matrix shape, valid in odd characteristic.
    pub fn is_reflexive(&self) -> bool {
        self.is_symmetric() || self.is_alternating()
    }

    pub fn is_symplectic(&self) -> bool {
        self.is_alternating()
    }

    /// Basis of `{v : ξ(u, v) = 0 for all u}`.
    pub fn radical(&self) -> Vec<Vec<F>> {
        linalg::null_space(&self.matrix, self.dim())
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical().is_empty()
    }

    pub fn perp(&self, u: &ProjectivePoint<F>, v: &ProjectivePoint<F>) -> bool {
        self.eval(u.coords(), v.coords()).is_zero()
    }

    /// Indices (into `points`) of the points `⟨u⟩` with `ξ(u, q) = 0`.
    pub fn quasi_correlation_indices(
        &self,
        q: &ProjectivePoint<F>,
        points: &[ProjectivePoint<F>],
    ) -> Result<Vec<usize>> {
        if self.is_zero() {
            return Err(GeomError::ZeroForm);
        }
        if q.dim() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                got: q.dim(),
            });
        }
        Ok(points
            .iter()
            .enumerate()
            .filter(|(_, u)| self.perp(u, q))
            .map(|(i, _)| i)
            .collect())
    }
}

impl<F: FiniteField> BilinearForm<F> {
    /// `κ(q)` as a list of projective points.
    pub fn quasi_correlation(&self, q: &ProjectivePoint<F>) -> Result<Vec<ProjectivePoint<F>>> {
        let pts = projective_points::<F>(self.dim())?;
        let idx = self.quasi_correlation_indices(q, &pts)?;
        Ok(idx.into_iter().map(|i| pts[i].clone()).collect())
    }

    pub fn to_u32_matrix(&self) -> Vec<Vec<u32>> {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|x| x.to_u32()).collect())
            .collect()
    }
}

/// `Q(v) = Σ_{i≤j} a_ij v_i v_j`, stored upper-triangular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm<F> {
    upper: Vec<Vec<F>>,
}

impl<F: Field> QuadraticForm<F> {
    /// Accepts any square matrix; `a_ij + a_ji` is folded onto `i < j`.
    pub fn new(matrix: Vec<Vec<F>>) -> Result<Self> {
        let n = matrix.len();
        if let Some(bad) = matrix.iter().find(|r| r.len() != n) {
            return Err(GeomError::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        let mut upper = vec![vec![F::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                upper[a][b] += matrix[i][j];
            }
        }
        Ok(QuadraticForm { upper })
    }

    /// `v₁v₂ + v₃v₄ + …` on an even-dimensional space.
    pub fn hyperbolic(dim: usize) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(GeomError::Invalid(format!(
                "hyperbolic forms need even positive dimension, got {dim}"
            )));
        }
        let mut m = vec![vec![F::zero(); dim]; dim];
        for i in (0..dim).step_by(2) {
            m[i][i + 1] = F::one();
        }
        QuadraticForm::new(m)
    }

    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn upper(&self) -> &[Vec<F>] {
        &self.upper
    }

    pub fn eval(&self, v: &[F]) -> F {
        let n = self.dim();
        let mut s = F::zero();
        for i in 0..n {
            for j in i..n {
                s += self.upper[i][j] * v[i] * v[j];
            }
        }
        s
    }

    /// The polar form `Q(u+v) − Q(u) − Q(v)`.
    pub fn polar(&self, u: &[F], v: &[F]) -> F {
        let w: Vec<F> = u.iter().zip(v).map(|(&a, &b)| a + b).collect();
        self.eval(&w) - self.eval(u) - self.eval(v)
    }

    pub fn is_singular(&self, p: &ProjectivePoint<F>) -> bool {
        self.eval(p.coords()).is_zero()
    }
}

impl<F: FiniteField> QuadraticForm<F> {
    /// `x₀² + x₁x₂ + x₃x₄ + …` on an odd-dimensional space.
    pub fn parabolic(dim: usize) -> Result<Self> {
        if dim % 2 == 0 {
            return Err(GeomError::Invalid(format!(
                "parabolic forms need odd dimension, got {dim}"
            )));
        }
        let mut m = vec![vec![F::zero(); dim]; dim];
        m[0][0] = F::one();
        for i in (1..dim).step_by(2) {
            m[i][i + 1] = F::one();
        }
        QuadraticForm::new(m)
    }

    /// `x₀² + x₀x₁ + c·x₁²` with `t² + t + c` irreducible, plus hyperbolic
    /// pairs, on an even-dimensional space.
    pub fn elliptic(dim: usize) -> Result<Self> {
        if dim < 2 || dim % 2 != 0 {
            return Err(GeomError::Invalid(format!(
                "elliptic forms need even dimension at least 2, got {dim}"
            )));
        }
        let c = F::elements()
            .find(|&c| F::elements().all(|t| !(t * t + t + c).is_zero()))
            .expect("every finite field has an irreducible quadratic");
        let mut m = vec![vec![F::zero(); dim]; dim];
        m[0][0] = F::one();
        m[0][1] = F::one();
        m[1][1] = c;
        for i in (2..dim).step_by(2) {
            m[i][i + 1] = F::one();
        }
        QuadraticForm::new(m)
    }

    pub fn quadric_points(&self) -> Result<Vec<ProjectivePoint<F>>> {
        Ok(projective_points::<F>(self.dim())?
            .into_iter()
            .filter(|p| self.is_singular(p))
            .collect())
    }

    /// Largest dimension of a totally singular vector subspace (the Witt
    /// index), found by depth-first extension of singular points.
    pub fn witt_index(&self) -> Result<usize> {
        let singular = self.quadric_points()?;
        let cap = self.dim() / 2;
        let mut best = 0;
        let mut basis: Vec<Vec<F>> = Vec::new();
        self.extend_singular(&singular, 0, &mut basis, &mut best, cap);
        Ok(best)
    }

    fn extend_singular(
        &self,
        singular: &[ProjectivePoint<F>],
        from: usize,
        basis: &mut Vec<Vec<F>>,
        best: &mut usize,
        cap: usize,
    ) {
        *best = (*best).max(basis.len());
        if *best >= cap {
            return;
        }
        for (i, p) in singular.iter().enumerate().skip(from) {
            let v = p.coords();
            if !basis.iter().all(|b| self.polar(b, v).is_zero()) {
                continue;
            }
            let mut probe = basis.clone();
            probe.push(v.to_vec());
            if linalg::rank(&probe) <= basis.len() {
                continue;
            }
            basis.push(v.to_vec());
            self.extend_singular(singular, i + 1, basis, best, cap);
            basis.pop();
            if *best >= cap {
                return;
            }
        }
    }

    /// True when a totally singular line exists (Witt index at least 2).
    pub fn isotropic_index_at_least_2(&self) -> Result<bool> {
        Ok(self.witt_index()? >= 2)
    }
}

/// A `k`-linear alternating form
/// `η(v₁,…,v_k) = Σ_I c_I · det[v_j(I_i)]` over increasing index tuples `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingMultiForm<F> {
    arity: usize,
    dim: usize,
    coeffs: BTreeMap<Vec<usize>, F>,
}

impl<F: Field> AlternatingMultiForm<F> {
    pub fn new(arity: usize, dim: usize, coeffs: BTreeMap<Vec<usize>, F>) -> Result<Self> {
        if arity == 0 || arity > dim {
            return Err(GeomError::Invalid(format!(
                "arity {arity} must lie in 1..={dim}"
            )));
        }
        for idx in coeffs.keys() {
            if idx.len() != arity {
                return Err(GeomError::ArityMismatch {
                    expected: arity,
                    got: idx.len(),
                });
            }
            if !idx.windows(2).all(|w| w[0] < w[1]) || idx[arity - 1] >= dim {
                return Err(GeomError::Invalid(format!(
                    "coefficient index {idx:?} must be strictly increasing below {dim}"
                )));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(AlternatingMultiForm { arity, dim, coeffs })
    }

    /// The determinant on `F^dim` (arity = dim).
    pub fn determinant(dim: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((0..dim).collect(), F::one());
        AlternatingMultiForm {
            arity: dim,
            dim,
            coeffs,
        }
    }

    /// The arity-2 form with the same values as an alternating bilinear form.
    pub fn from_bilinear(xi: &BilinearForm<F>) -> Result<Self> {
        if !xi.is_alternating() {
            return Err(GeomError::NotSymplectic);
        }
        let n = xi.dim();
        let mut coeffs = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                coeffs.insert(vec![i, j], xi.matrix()[i][j]);
            }
        }
        AlternatingMultiForm::new(2, n, coeffs)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<usize>, F> {
        &self.coeffs
    }

    pub fn eval(&self, vs: &[&[F]]) -> Result<F> {
        if vs.len() != self.arity {
            return Err(GeomError::ArityMismatch {
                expected: self.arity,
                got: vs.len(),
            });
        }
        if let Some(v) = vs.iter().find(|v| v.len() != self.dim) {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let k = self.arity;
        let perms: Vec<(Vec<usize>, bool)> = (0..k)
            .permutations(k)
            .map(|p| {
                let odd = inversions(&p) % 2 == 1;
                (p, odd)
            })
            .collect();
        let mut total = F::zero();
        for (idx, &c) in &self.coeffs {
            let mut minor = F::zero();
            for (p, odd) in &perms {
                let term = (0..k).fold(F::one(), |acc, j| acc * vs[j][idx[p[j]]]);
                if *odd {
                    minor -= term;
                } else {
                    minor += term;
                }
            }
            total += c * minor;
        }
        Ok(total)
    }

    /// `⊥_η(q₁,…,q_k)`: the form vanishes on representatives.
    pub fn perp(&self, qs: &[&ProjectivePoint<F>]) -> Result<bool> {
        let vs: Vec<&[F]> = qs.iter().map(|q| q.coords()).collect();
        Ok(self.eval(&vs)?.is_zero())
    }
}

impl<F: FiniteField> AlternatingMultiForm<F> {
    /// Every point `q` admits `q₂,…,q_k` with `⊥_η(q, q₂, …)` false.
    pub fn is_nondegenerate(&self) -> Result<bool> {
        let pts = projective_points::<F>(self.dim)?;
        for q in &pts {
            let found = std::iter::repeat_n(pts.iter(), self.arity - 1)
                .multi_cartesian_product()
                .any(|rest| {
                    let mut args = vec![q];
                    args.extend(rest);
                    !self.perp(&args).expect("arity checked")
                });
            if !found {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn inversions(p: &[usize]) -> usize {
    (0..p.len())
        .map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Fp;
    use crate::algebra::projective::all_vectors;
    use num_traits::{One, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type F3 = Fp<3>;
    type F5 = Fp<5>;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<F3>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| F3::from_i64(v)).collect())
            .collect()
    }

    #[test]
    fn standard_symplectic_is_nondegenerate() {
        let j = BilinearForm::<F3>::standard_symplectic(4).unwrap();
        assert!(j.is_symplectic() && j.is_reflexive() && j.is_nondegenerate());
    }

    #[test]
    fn identity_is_reflexive_not_symplectic() {
        let id = BilinearForm::new(mat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap();
        assert!(id.is_reflexive());
        assert!(!id.is_symplectic());
    }

    #[test]
    fn rank_deficient_alternating_has_line_radical() {
        let a = BilinearForm::new(mat(&[&[0, 1, 2], &[-1, 0, 1], &[-2, -1, 0]])).unwrap();
        assert!(a.is_symplectic());
        let rad = a.radical();
        assert_eq!(rad.len(), 1);
        // oracle: the radical vector is orthogonal to every basis vector
        for i in 0..3 {
            let mut e = vec![F3::zero(); 3];
            e[i] = F3::one();
            assert!(a.eval(&e, &rad[0]).is_zero());
        }
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            BilinearForm::new(vec![vec![F3::one(), F3::zero()]]),
            Err(GeomError::NotSquare { .. })
        ));
    }

    #[test]
    fn quasi_correlation_examples() {
        let j = BilinearForm::<F3>::standard_symplectic(4).unwrap();
        let pts = projective_points::<F3>(4).unwrap();
        for q in &pts {
            let k = j.quasi_correlation(q).unwrap();
            assert_eq!(k.len(), 13);
            assert!(k.contains(q));
        }
        let j2 = BilinearForm::<F3>::standard_symplectic(2).unwrap();
        for q in projective_points::<F3>(2).unwrap() {
            assert_eq!(j2.quasi_correlation(&q).unwrap(), vec![q.clone()]);
        }
        let zero = BilinearForm::new(vec![vec![F3::zero(); 2]; 2]).unwrap();
        assert_eq!(
            zero.quasi_correlation(&pts[0].clone()).unwrap_err(),
            GeomError::ZeroForm
        );
    }

    #[test]
    fn quasi_correlation_symmetric_for_reflexive() {
        let forms = [
            BilinearForm::<F3>::standard_symplectic(4).unwrap(),
            BilinearForm::new(
                (0..4)
                    .map(|i| (0..4).map(|j| F3::new((i == j) as u32)).collect())
                    .collect(),
            )
            .unwrap(),
        ];
        let pts = projective_points::<F3>(4).unwrap();
        for f in &forms {
            for u in &pts {
                for v in &pts {
                    assert_eq!(f.perp(u, v), f.perp(v, u));
                }
            }
        }
    }

    #[test]
    fn determinant_form_values() {
        let det = AlternatingMultiForm::<F3>::determinant(3);
        let e: Vec<Vec<F3>> = (0..3)
            .map(|i| (0..3).map(|j| F3::new((i == j) as u32)).collect())
            .collect();
        let args: Vec<&[F3]> = e.iter().map(|v| v.as_slice()).collect();
        assert_eq!(det.eval(&args).unwrap(), F3::one());
        assert!(matches!(
            det.eval(&args[..2]),
            Err(GeomError::ArityMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    fn random_vec<F: FiniteField>(rng: &mut ChaCha8Rng, n: usize) -> Vec<F> {
        (0..n)
            .map(|_| F::from_u32(rng.gen_range(0..F::ORDER)))
            .collect()
    }

    fn agrees_with_determinant<F: FiniteField>() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eta = AlternatingMultiForm::<F>::determinant(3);
        for _ in 0..100 {
            let rows: Vec<Vec<F>> = (0..3).map(|_| random_vec(&mut rng, 3)).collect();
            let args: Vec<&[F]> = rows.iter().map(|v| v.as_slice()).collect();
            assert_eq!(eta.eval(&args).unwrap(), linalg::determinant(&rows));
        }
    }

    #[test]
    fn alternating_matches_determinant_gf3_gf5() {
        agrees_with_determinant::<F3>();
        agrees_with_determinant::<F5>();
    }

    #[test]
    fn perp_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let eta = AlternatingMultiForm::<F3>::determinant(3);
        let pts = projective_points::<F3>(3).unwrap();
        for _ in 0..20 {
            let t: Vec<&ProjectivePoint<F3>> =
                (0..3).map(|_| &pts[rng.gen_range(0..pts.len())]).collect();
            let base = eta.perp(&t).unwrap();
            for p in (0..3).permutations(3) {
                let permuted: Vec<_> = p.iter().map(|&i| t[i]).collect();
                assert_eq!(eta.perp(&permuted).unwrap(), base);
            }
            let rep = [t[0], t[0], t[1]];
            assert!(eta.perp(&rep).unwrap());
            let scaled: Vec<F3> = t[0].coords().iter().map(|&x| x * F3::new(2)).collect();
            let args: Vec<&[F3]> = vec![&scaled, t[1].coords(), t[2].coords()];
            assert_eq!(eta.eval(&args).unwrap().is_zero(), base);
        }
    }

    #[test]
    fn from_bilinear_agrees() {
        let j = BilinearForm::<F3>::standard_symplectic(4).unwrap();
        let eta = AlternatingMultiForm::from_bilinear(&j).unwrap();
        let vs: Vec<Vec<F3>> = all_vectors::<F3>(4).step_by(7).collect();
        for u in &vs {
            for v in &vs {
                assert_eq!(eta.eval(&[u, v]).unwrap(), j.eval(u, v));
            }
        }
    }

    #[test]
    fn quadric_examples() {
        let hyp = QuadraticForm::<F3>::hyperbolic(4).unwrap();
        assert_eq!(hyp.quadric_points().unwrap().len(), 16);
        assert_eq!(hyp.witt_index().unwrap(), 2);
        let squares = QuadraticForm::new(mat(&[&[1, 0], &[0, 1]])).unwrap();
        assert!(squares.quadric_points().unwrap().is_empty());
        assert_eq!(squares.witt_index().unwrap(), 0);
        let zero = QuadraticForm::new(vec![vec![F3::zero(); 3]; 3]).unwrap();
        assert_eq!(zero.quadric_points().unwrap().len(), 13);
    }

    #[test]
    fn determinant_form_is_nondegenerate() {
        assert!(AlternatingMultiForm::<F3>::determinant(3)
            .is_nondegenerate()
            .unwrap());
    }

    #[test]
    fn quadric_types() {
        use crate::Gf2;
        // |Q(4,3)| = 40, |Q⁻(3,3)| = 10, |Q⁻(5,2)| = 27
        assert_eq!(
            QuadraticForm::<F3>::parabolic(5)
                .unwrap()
                .quadric_points()
                .unwrap()
                .len(),
            40
        );
        assert_eq!(
            QuadraticForm::<F3>::elliptic(4)
                .unwrap()
                .quadric_points()
                .unwrap()
                .len(),
            10
        );
        assert_eq!(
            QuadraticForm::<Gf2>::elliptic(6)
                .unwrap()
                .quadric_points()
                .unwrap()
                .len(),
            27
        );
        assert_eq!(
            QuadraticForm::<F3>::elliptic(4)
                .unwrap()
                .witt_index()
                .unwrap(),
            1
        );
        assert!(QuadraticForm::<F3>::parabolic(4).is_err());
    }
}
