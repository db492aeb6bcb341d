//! Concrete geometries: projective and affine spaces over prime fields,
//! symplectic and quadratic polar spaces, restrictions, affine polar spaces.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::algebra::{
    all_vectors, projective_points, BilinearForm, FiniteField, ProjectivePoint, QuadraticForm,
};
use crate::error::{GeomError, Result};
use crate::incidence::{IncidenceStructure, Label, LINE_FLOOR};
use crate::pointset::PointSet;

/// `PG(n, q)`: points are the normalized 1-spaces of `F^(n+1)`.
#[derive(Debug, Clone)]
pub struct ProjectiveSpace<F: FiniteField> {
    points: Vec<ProjectivePoint<F>>,
    index: HashMap<ProjectivePoint<F>, usize>,
    structure: IncidenceStructure,
}

impl<F: FiniteField> ProjectiveSpace<F> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GeomError::Invalid(
                "projective dimension must be at least 1".into(),
            ));
        }
        let points = projective_points::<F>(n + 1)?;
        let index: HashMap<_, _> = points
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let mut covered = vec![PointSet::empty(points.len()); points.len()];
        let mut lines = Vec::new();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if covered[i].contains(j) {
                    continue;
                }
                let line = span_indices(&index, &[points[i].coords(), points[j].coords()]);
                for &a in &line {
                    for &b in &line {
                        covered[a].insert(b);
                    }
                }
                lines.push(line);
            }
        }
        let labels = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, Label::Coords(p.to_u32s())))
            .collect();
        let structure = IncidenceStructure::new(points.len(), lines)?.with_labels(labels);
        Ok(ProjectiveSpace {
            points,
            index,
            structure,
        })
    }

    /// Dimension of the underlying vector space.
    pub fn vector_dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn structure(&self) -> &IncidenceStructure {
        &self.structure
    }

    pub fn points(&self) -> &[ProjectivePoint<F>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &ProjectivePoint<F> {
        &self.points[i]
    }

    pub fn index_of(&self, v: &[F]) -> Option<usize> {
        ProjectivePoint::new(v).and_then(|p| self.index.get(&p).copied())
    }

    /// Points of the subspace spanned by the given vectors.
    pub fn span(&self, vectors: &[&[F]]) -> PointSet {
        PointSet::from_indices(self.points.len(), span_indices(&self.index, vectors))
    }

    /// Points `⟨v⟩` with `f · v = 0`.
    pub fn hyperplane_of_functional(&self, f: &[F]) -> PointSet {
        PointSet::from_indices(
            self.points.len(),
            self.points.iter().enumerate().filter_map(|(i, p)| {
                let s = p
                    .coords()
                    .iter()
                    .zip(f)
                    .fold(F::zero(), |s, (&a, &b)| s + a * b);
                s.is_zero().then_some(i)
            }),
        )
    }

    /// `κ(q)` for a bilinear form, as a point set.
    pub fn quasi_correlation(&self, xi: &BilinearForm<F>, q: usize) -> Result<PointSet> {
        let idx = xi.quasi_correlation_indices(&self.points[q], &self.points)?;
        Ok(PointSet::from_indices(self.points.len(), idx))
    }

    /// All projective planes (3-dimensional vector subspaces).
    pub fn planes(&self) -> Vec<PointSet> {
        if self.vector_dim() < 3 {
            return Vec::new();
        }
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for (li, line) in self.structure.lines().iter().enumerate() {
            let (a, b) = (line[0], line[1]);
            // planes through a line partition the points off it
            let mut covered = self.structure.line_set(li);
            for c in 0..self.points.len() {
                if covered.contains(c) {
                    continue;
                }
                let plane = span_indices(
                    &self.index,
                    &[
                        self.points[a].coords(),
                        self.points[b].coords(),
                        self.points[c].coords(),
                    ],
                );
                for &x in &plane {
                    covered.insert(x);
                }
                seen.insert(plane);
            }
        }
        seen.into_iter()
            .map(|v| PointSet::from_indices(self.points.len(), v))
            .collect()
    }
}

fn span_indices<F: FiniteField>(
    index: &HashMap<ProjectivePoint<F>, usize>,
    vectors: &[&[F]],
) -> Vec<usize> {
    let dim = vectors[0].len();
    let mut out: BTreeSet<usize> = BTreeSet::new();
    for coeffs in all_vectors::<F>(vectors.len()) {
        let mut v = vec![F::zero(); dim];
        for (c, b) in coeffs.iter().zip(vectors) {
            for (slot, &x) in v.iter_mut().zip(b.iter()) {
                *slot += *c * x;
            }
        }
        if let Some(p) = ProjectivePoint::new(&v) {
            out.insert(index[&p]);
        }
    }
    out.into_iter().collect()
}

/// An incidence structure with a (pre)parallelism on some of its lines.
#[derive(Debug, Clone)]
pub struct ParallelStructure {
    pub base: IncidenceStructure,
    pub classes: Vec<Vec<usize>>,
    class_of: Vec<Option<usize>>,
}

impl ParallelStructure {
    /// Validates that classes are nonempty, pairwise disjoint as sets of
    /// lines, and consist of pairwise disjoint lines.
    pub fn new(base: IncidenceStructure, classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut class_of = vec![None; base.line_count()];
        for (ci, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(GeomError::Invalid(format!("parallel class {ci} is empty")));
            }
            for &l in class {
                if l >= base.line_count() {
                    return Err(GeomError::Invalid(format!("line {l} out of range")));
                }
                if class_of[l].replace(ci).is_some() {
                    return Err(GeomError::Invalid(format!("line {l} lies in two classes")));
                }
            }
        }
        Ok(ParallelStructure {
            base,
            classes,
            class_of,
        })
    }

    pub fn class_of(&self, line: usize) -> Option<usize> {
        self.class_of[line]
    }

    pub fn parallel(&self, l1: usize, l2: usize) -> bool {
        l1 == l2 || (self.class_of[l1].is_some() && self.class_of[l1] == self.class_of[l2])
    }

    /// First pair of distinct intersecting lines in one class.
    pub fn preparallelism_violation(&self) -> Option<(usize, usize)> {
        for class in &self.classes {
            for (i, &a) in class.iter().enumerate() {
                for &b in &class[i + 1..] {
                    if self.base.lines_meet(a, b) {
                        return Some((a, b));
                    }
                }
            }
        }
        None
    }

    /// Euclid axiom: every class covers the point set.
    pub fn uncovering_class(&self) -> Option<usize> {
        self.classes.iter().position(|class| {
            let mut cover = PointSet::empty(self.base.point_count());
            for &l in class {
                cover.union_with(&self.base.line_set(l));
            }
            !cover.is_full()
        })
    }

    pub fn is_affine(&self) -> bool {
        self.preparallelism_violation().is_none()
            && self.uncovering_class().is_none()
            && self.class_of.iter().all(Option::is_some)
    }
}

/// `AG(n, q)` with its natural parallelism and plane family.
#[derive(Debug, Clone)]
pub struct AffineSpace<F: FiniteField> {
    pub vectors: Vec<Vec<F>>,
    pub parallel: ParallelStructure,
    pub planes: Vec<PointSet>,
}

impl<F: FiniteField> AffineSpace<F> {
    pub fn structure(&self) -> &IncidenceStructure {
        &self.parallel.base
    }

    pub fn index_of(&self, v: &[F]) -> usize {
        v.iter().fold(0usize, |acc, x| {
            acc * F::ORDER as usize + x.to_u32() as usize
        })
    }
}

pub fn affine_space<F: FiniteField>(n: usize) -> Result<AffineSpace<F>> {
    if n == 0 {
        return Err(GeomError::Invalid(
            "affine dimension must be at least 1".into(),
        ));
    }
    if (F::ORDER as usize) < LINE_FLOOR {
        return Err(GeomError::LineFloor {
            line: 0,
            size: F::ORDER as usize,
            floor: LINE_FLOOR,
        });
    }
    let vectors: Vec<Vec<F>> = all_vectors::<F>(n).collect();
    let q = F::ORDER as usize;
    let idx = |v: &[F]| {
        v.iter()
            .fold(0usize, |acc, x| acc * q + x.to_u32() as usize)
    };
    let directions = projective_points::<F>(n)?;
    let mut lines = Vec::new();
    let mut classes = Vec::new();
    for d in &directions {
        let mut covered = PointSet::empty(vectors.len());
        let mut class = Vec::new();
        for x in &vectors {
            if covered.contains(idx(x)) {
                continue;
            }
            let mut line: Vec<usize> = F::elements()
                .map(|t| {
                    let p: Vec<F> = x.iter().zip(d.coords()).map(|(&a, &b)| a + t * b).collect();
                    idx(&p)
                })
                .collect();
            line.sort_unstable();
            for &p in &line {
                covered.insert(p);
            }
            class.push(lines.len());
            lines.push(line);
        }
        classes.push(class);
    }
    let mut plane_sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (i, d1) in directions.iter().enumerate() {
        for d2 in &directions[i + 1..] {
            for x in &vectors {
                let mut plane: Vec<usize> = Vec::new();
                for s in F::elements() {
                    for t in F::elements() {
                        let p: Vec<F> = x
                            .iter()
                            .zip(d1.coords().iter().zip(d2.coords()))
                            .map(|(&a, (&b, &c))| a + s * b + t * c)
                            .collect();
                        plane.push(idx(&p));
                    }
                }
                plane.sort_unstable();
                plane.dedup();
                plane_sets.insert(plane);
            }
        }
    }
    let labels = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (i, Label::Coords(v.iter().map(|x| x.to_u32()).collect())))
        .collect();
    let base = IncidenceStructure::new(vectors.len(), lines)?.with_labels(labels);
    let planes = plane_sets
        .into_iter()
        .map(|v| PointSet::from_indices(vectors.len(), v))
        .collect();
    Ok(AffineSpace {
        vectors,
        parallel: ParallelStructure::new(base, classes)?,
        planes,
    })
}

/// A polar space embedded in a projective space.
#[derive(Debug, Clone)]
pub struct PolarSpace {
    pub structure: IncidenceStructure,
    /// Index in the ambient projective space of each polar point.
    pub ambient_index: Vec<usize>,
    /// Totally isotropic (singular) planes, in polar point indices.
    pub planes: Vec<PointSet>,
}

/// `W(n, q)`: all points of the projective space, totally isotropic lines.
pub fn polar_space_symplectic<F: FiniteField>(
    pg: &ProjectiveSpace<F>,
    xi: &BilinearForm<F>,
) -> Result<PolarSpace> {
    if xi.dim() != pg.vector_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: pg.vector_dim(),
            got: xi.dim(),
        });
    }
    if !xi.is_symplectic() {
        return Err(GeomError::NotSymplectic);
    }
    if !xi.is_nondegenerate() {
        return Err(GeomError::Degenerate);
    }
    let g = pg.structure();
    let isotropic = |pts: &[usize]| {
        pts.iter()
            .all(|&a| pts.iter().all(|&b| xi.perp(pg.point(a), pg.point(b))))
    };
    let lines: Vec<Vec<usize>> = g
        .lines()
        .iter()
        .filter(|l| isotropic(&l[..2]))
        .cloned()
        .collect();
    let planes = pg
        .planes()
        .into_iter()
        .filter(|p| isotropic(&p.to_vec()))
        .collect();
    let mut structure = IncidenceStructure::new(g.point_count(), lines)?;
    if let Some(labels) = g.labels() {
        structure = structure.with_labels(labels.clone());
    }
    Ok(PolarSpace {
        structure,
        ambient_index: (0..g.point_count()).collect(),
        planes,
    })
}

/// The quadric of `q` with all projective lines inside it.
pub fn polar_space_quadratic<F: FiniteField>(
    pg: &ProjectiveSpace<F>,
    q: &QuadraticForm<F>,
) -> Result<PolarSpace> {
    if q.dim() != pg.vector_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: pg.vector_dim(),
            got: q.dim(),
        });
    }
    if !q.isotropic_index_at_least_2()? {
        return Err(GeomError::NotPolarSpace(
            "the quadric contains no totally singular line".into(),
        ));
    }
    let singular = PointSet::from_indices(
        pg.points().len(),
        (0..pg.points().len()).filter(|&i| q.is_singular(pg.point(i))),
    );
    let r = restriction(pg.structure(), &singular);
    let mut new_index = vec![usize::MAX; pg.points().len()];
    for (i, &p) in r.old_index.iter().enumerate() {
        new_index[p] = i;
    }
    let planes = pg
        .planes()
        .into_iter()
        .filter(|p| p.is_subset(&singular))
        .map(|p| PointSet::from_indices(r.old_index.len(), p.iter().map(|x| new_index[x])))
        .collect();
    Ok(PolarSpace {
        structure: r.structure,
        ambient_index: r.old_index,
        planes,
    })
}

/// `G[S₀]`: the points of `S₀` and the lines contained in it.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub structure: IncidenceStructure,
    pub old_index: Vec<usize>,
    /// No lines survived.
    pub degenerate: bool,
}

pub fn restriction(g: &IncidenceStructure, s0: &PointSet) -> Restriction {
    let (structure, old_index) = g.restrict(s0);
    let degenerate = structure.line_count() == 0;
    Restriction {
        structure,
        old_index,
        degenerate,
    }
}

/// A polar space with a hyperplane removed.
#[derive(Debug, Clone)]
pub struct AffinePolarSpace {
    pub structure: IncidenceStructure,
    /// Polar-space index of each remaining point.
    pub kept: Vec<usize>,
    /// Some truncated line has exactly two points.
    pub sub_floor: bool,
}

pub fn affine_polar_space(
    polar: &IncidenceStructure,
    trace: &PointSet,
) -> Result<AffinePolarSpace> {
    if let Some(f) = polar.hyperplane_failure(trace) {
        return Err(GeomError::NotHyperplane(format!("{f:?}")));
    }
    for (li, line) in polar.lines().iter().enumerate() {
        let c = trace.count_in(line);
        if c != 1 && c != line.len() {
            return Err(GeomError::NotHyperplane(format!(
                "line {li} meets the trace in {c} points"
            )));
        }
    }
    let kept: Vec<usize> = trace.complement().iter().collect();
    let mut new_index = vec![usize::MAX; polar.point_count()];
    for (i, &p) in kept.iter().enumerate() {
        new_index[p] = i;
    }
    let lines: Vec<Vec<usize>> = polar
        .lines()
        .iter()
        .filter(|l| trace.count_in(l) == 1)
        .map(|l| {
            l.iter()
                .filter(|&&p| !trace.contains(p))
                .map(|&p| new_index[p])
                .collect()
        })
        .collect();
    let sub_floor = lines.iter().any(|l: &Vec<usize>| l.len() < LINE_FLOOR);
    let mut structure = IncidenceStructure::new(kept.len(), lines)?;
    if let Some(labels) = polar.labels() {
        let relabeled: BTreeMap<usize, Label> = kept
            .iter()
            .enumerate()
            .filter_map(|(i, p)| labels.get(p).map(|l| (i, l.clone())))
            .collect();
        structure = structure.with_labels(relabeled);
    }
    Ok(AffinePolarSpace {
        structure,
        kept,
        sub_floor,
    })
}

/// Classes of the relation "joined by a chain of planes, consecutive planes
/// sharing a line". Points on no plane form singleton classes. Classes are
/// sorted by their least point.
pub fn plane_chain_classes(g: &IncidenceStructure, planes: &[PointSet]) -> Result<Vec<PointSet>> {
    if planes.is_empty() {
        return Err(GeomError::Indeterminate(
            "no planes: the plane-chain relation is undefined".into(),
        ));
    }
    let n = planes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    // planes sharing a line are linked through that line
    let mut by_line: HashMap<usize, usize> = HashMap::new();
    for (pi, plane) in planes.iter().enumerate() {
        let inner: BTreeSet<usize> = plane
            .iter()
            .flat_map(|p| g.lines_through(p).iter().copied())
            .filter(|&l| g.line(l).iter().all(|&p| plane.contains(p)))
            .collect();
        for li in inner {
            {
                if let Some(&other) = by_line.get(&li) {
                    let (a, b) = (find(&mut parent, pi), find(&mut parent, other));
                    parent[a] = b;
                } else {
                    by_line.insert(li, pi);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, PointSet> = BTreeMap::new();
    for (pi, plane) in planes.iter().enumerate() {
        let root = find(&mut parent, pi);
        groups
            .entry(root)
            .or_insert_with(|| PointSet::empty(g.point_count()))
            .union_with(plane);
    }
    let mut classes: Vec<PointSet> = groups.into_values().collect();
    let mut covered = PointSet::empty(g.point_count());
    for c in &classes {
        covered.union_with(c);
    }
    for p in covered.complement().iter() {
        classes.push(PointSet::from_indices(g.point_count(), [p]));
    }
    classes.sort_by_key(|c| c.iter().next());
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Gf2, Gf3, Gf5};

    #[test]
    fn projective_counts() {
        let fano = ProjectiveSpace::<Gf2>::new(2).unwrap();
        assert_eq!(
            (
                fano.structure().point_count(),
                fano.structure().line_count()
            ),
            (7, 7)
        );
        assert!(fano.structure().is_partial_linear());
        let line = ProjectiveSpace::<Gf3>::new(1).unwrap();
        assert_eq!(
            (
                line.structure().point_count(),
                line.structure().line_count()
            ),
            (4, 1)
        );
        let pg33 = ProjectiveSpace::<Gf3>::new(3).unwrap();
        assert_eq!(pg33.structure().line_count(), 130);
        assert_eq!(pg33.planes().len(), 40);
    }

    #[test]
    fn projective_spaces_are_linear() {
        for (n, pg) in [
            (2, ProjectiveSpace::<Gf3>::new(2).unwrap()),
            (3, ProjectiveSpace::<Gf3>::new(3).unwrap()),
        ] {
            let g = pg.structure();
            for a in 0..g.point_count() {
                for b in a + 1..g.point_count() {
                    let count = g
                        .lines()
                        .iter()
                        .filter(|l| l.contains(&a) && l.contains(&b))
                        .count();
                    assert_eq!(count, 1, "PG({n},3) pair {a},{b}");
                }
            }
        }
        let g = ProjectiveSpace::<Gf5>::new(2).unwrap();
        assert_eq!(g.structure().line_count(), 31);
        assert!(g.structure().is_partial_linear());
    }

    #[test]
    fn functional_hyperplane_is_hyperplane() {
        let pg = ProjectiveSpace::<Gf3>::new(3).unwrap();
        let f = [Gf3::new(1), Gf3::new(0), Gf3::new(2), Gf3::new(1)];
        let h = pg.hyperplane_of_functional(&f);
        assert_eq!(h.len(), 13);
        assert!(pg.structure().is_hyperplane(&h));
    }

    #[test]
    fn affine_counts() {
        let ag = affine_space::<Gf3>(2).unwrap();
        assert_eq!(ag.structure().point_count(), 9);
        assert_eq!(ag.structure().line_count(), 12);
        assert_eq!(ag.parallel.classes.len(), 4);
        assert!(ag.parallel.classes.iter().all(|c| c.len() == 3));
        assert!(ag.parallel.is_affine());
        let ag1 = affine_space::<Gf3>(1).unwrap();
        assert_eq!(
            (ag1.structure().point_count(), ag1.structure().line_count()),
            (3, 1)
        );
        assert!(matches!(
            affine_space::<Gf2>(2),
            Err(GeomError::LineFloor { .. })
        ));
        let ag3 = affine_space::<Gf3>(3).unwrap();
        assert_eq!(ag3.planes.len(), 39);
    }

    #[test]
    fn symplectic_polar_w33() {
        let pg = ProjectiveSpace::<Gf3>::new(3).unwrap();
        let j = BilinearForm::standard_symplectic(4).unwrap();
        let w = polar_space_symplectic(&pg, &j).unwrap();
        let g = &w.structure;
        assert_eq!((g.point_count(), g.line_count()), (40, 40));
        assert!(g.is_partial_linear());
        for p in 0..40 {
            assert_eq!(g.lines_through(p).len(), 4);
        }
        for l in g.lines() {
            assert!(pg.structure().find_line(l).is_some());
        }
        assert!(w.planes.is_empty());
        let id = BilinearForm::new(
            (0..4)
                .map(|i| (0..4).map(|k| Gf3::new((i == k) as u32)).collect())
                .collect(),
        )
        .unwrap();
        assert_eq!(
            polar_space_symplectic(&pg, &id).unwrap_err(),
            GeomError::NotSymplectic
        );
    }

    #[test]
    fn hyperbolic_quadric_polar() {
        let pg = ProjectiveSpace::<Gf3>::new(3).unwrap();
        let q = QuadraticForm::hyperbolic(4).unwrap();
        let polar = polar_space_quadratic(&pg, &q).unwrap();
        assert_eq!(polar.structure.point_count(), 16);
        assert_eq!(polar.structure.line_count(), 8);
        let elliptic_line = ProjectiveSpace::<Gf3>::new(1).unwrap();
        let squares = QuadraticForm::new(vec![
            vec![Gf3::new(1), Gf3::new(0)],
            vec![Gf3::new(0), Gf3::new(1)],
        ])
        .unwrap();
        assert!(matches!(
            polar_space_quadratic(&elliptic_line, &squares),
            Err(GeomError::NotPolarSpace(_))
        ));
    }

    #[test]
    fn restrictions() {
        let pg = ProjectiveSpace::<Gf3>::new(2).unwrap();
        let line = pg.structure().line_set(0);
        let r = restriction(pg.structure(), &line);
        assert_eq!(
            (r.structure.point_count(), r.structure.line_count()),
            (4, 1)
        );
        let e = restriction(pg.structure(), &PointSet::empty(13));
        assert!(e.degenerate && e.structure.point_count() == 0);
    }

    #[test]
    fn affine_polar_w33() {
        let pg = ProjectiveSpace::<Gf3>::new(3).unwrap();
        let j = BilinearForm::standard_symplectic(4).unwrap();
        let w = polar_space_symplectic(&pg, &j).unwrap();
        let trace =
            pg.hyperplane_of_functional(&[Gf3::new(1), Gf3::new(0), Gf3::new(0), Gf3::new(0)]);
        let ap = affine_polar_space(&w.structure, &trace).unwrap();
        assert_eq!(ap.structure.point_count(), 40 - trace.len());
        assert!(ap.structure.is_connected());
        assert!(!ap.sub_floor);
        // maximal strong subspaces are affine subspaces of PG(3,3) minus the trace
        for x in ap.structure.maximal_strong_subspaces() {
            let ambient = PointSet::from_indices(40, x.iter().map(|p| ap.kept[p]));
            let mut span = pg.structure().subspace_closure(&ambient);
            span.difference_with(&trace);
            assert_eq!(span, ambient);
        }
        let not_hyp = PointSet::from_indices(40, [0]);
        assert!(affine_polar_space(&w.structure, &not_hyp).is_err());
    }

    #[test]
    fn plane_chains_need_planes() {
        let pg = ProjectiveSpace::<Gf3>::new(3).unwrap();
        let classes = plane_chain_classes(pg.structure(), &pg.planes()).unwrap();
        assert_eq!(classes.len(), 1);
        assert!(classes[0].is_full());
        assert!(plane_chain_classes(pg.structure(), &[]).is_err());
    }
}
