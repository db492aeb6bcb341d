//! Affine reducts `M \ H` of Veronese spaces: truncated lines, the induced
//! parallelism `∥_H` (common point at infinity), Veblen parallelism `∥°`,
//! direction types and the plane formula.

mod recover;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;

pub use crate::configs::VeblenClasses;
use crate::configs::{veblen_classes, veblen_parallel, MeetTable};
use crate::error::{GeomError, Result};
use crate::incidence::{IncidenceStructure, Label};
use crate::pointset::PointSet;
use crate::veronese::VeroneseSpace;

pub use recover::{
    definable_parallel, gamma_leaf_recovery, net_violation_witness, recover_horizon_2s_lines,
    recover_horizon_leaf_lines, recover_veronese, reduct_planes, reduct_tops,
    verify_parallel_definability, GammaReport, HorizonLines, NetViolation, ParallelDefinability,
    Recovery,
};

/// `M \ H` with the bookkeeping needed to put `H` back.
#[derive(Debug, Clone)]
pub struct AffineReduct {
    ambient: VeroneseSpace,
    hyperplane: PointSet,
    structure: IncidenceStructure,
    ambient_point: Vec<usize>,
    reduct_point: Vec<Option<usize>>,
    parent: Vec<usize>,
    infinite: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    meets: OnceLock<MeetTable>,
}

impl AffineReduct {
    pub fn build(ambient: &VeroneseSpace, hyperplane: &PointSet) -> Result<Self> {
        let g = ambient.structure();
        if let Some(f) = g.hyperplane_failure(hyperplane) {
            return Err(GeomError::NotHyperplane(format!("{f:?}")));
        }
        let mut ambient_point = Vec::new();
        let mut reduct_point = vec![None; g.point_count()];
        for p in 0..g.point_count() {
            if !hyperplane.contains(p) {
                reduct_point[p] = Some(ambient_point.len());
                ambient_point.push(p);
            }
        }
        let mut lines = Vec::new();
        let mut parent = Vec::new();
        let mut infinite = Vec::new();
        for (b, block) in g.lines().iter().enumerate() {
            let trace: Vec<usize> = block.iter().filter_map(|&p| reduct_point[p]).collect();
            if trace.is_empty() {
                continue;
            }
            if trace.len() < 2 {
                return Err(GeomError::LineFloor {
                    line: b,
                    size: trace.len(),
                    floor: 2,
                });
            }
            let at_infinity: Vec<usize> = block
                .iter()
                .copied()
                .filter(|&p| hyperplane.contains(p))
                .collect();
            debug_assert_eq!(at_infinity.len(), 1);
            lines.push(trace);
            parent.push(b);
            infinite.push(at_infinity[0]);
        }
        let labels: BTreeMap<usize, Label> = ambient_point
            .iter()
            .enumerate()
            .map(|(i, &p)| (i, Label::Multiset(ambient.point(p).clone())))
            .collect();
        let structure = IncidenceStructure::new(ambient_point.len(), lines)?.with_labels(labels);
        let mut by_point: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (l, &e) in infinite.iter().enumerate() {
            by_point.entry(e).or_default().push(l);
        }
        let classes: Vec<Vec<usize>> = by_point.into_values().collect();
        let mut class_of = vec![0; parent.len()];
        for (c, members) in classes.iter().enumerate() {
            for &l in members {
                class_of[l] = c;
            }
        }
        Ok(AffineReduct {
            ambient: ambient.clone(),
            hyperplane: hyperplane.clone(),
            structure,
            ambient_point,
            reduct_point,
            parent,
            infinite,
            classes,
            class_of,
            meets: OnceLock::new(),
        })
    }

    pub fn ambient(&self) -> &VeroneseSpace {
        &self.ambient
    }

    pub fn hyperplane(&self) -> &PointSet {
        &self.hyperplane
    }

    pub fn structure(&self) -> &IncidenceStructure {
        &self.structure
    }

    pub fn point_count(&self) -> usize {
        self.structure.point_count()
    }

    pub fn line_count(&self) -> usize {
        self.structure.line_count()
    }

    pub fn ambient_point(&self, p: usize) -> usize {
        self.ambient_point[p]
    }

    pub fn reduct_point(&self, ambient: usize) -> Option<usize> {
        self.reduct_point[ambient]
    }

    /// The ambient block a truncated line comes from.
    pub fn parent(&self, l: usize) -> usize {
        self.parent[l]
    }

    /// The unique point of `parent(l) ∩ H`.
    pub fn infinite_point(&self, l: usize) -> usize {
        self.infinite[l]
    }

    /// `∥_H` classes, ordered by their infinite point.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, l: usize) -> usize {
        self.class_of[l]
    }

    pub fn class_vector(&self) -> &[usize] {
        &self.class_of
    }

    pub fn class_point(&self, c: usize) -> usize {
        self.infinite[self.classes[c][0]]
    }

    pub fn parallel(&self, l1: usize, l2: usize) -> bool {
        self.class_of[l1] == self.class_of[l2]
    }

    /// The leaf of the parent block.
    pub fn top(&self, l: usize) -> usize {
        self.ambient.block_leaf(self.parent[l])
    }

    /// Built on first use; large reducts that only need local searches
    /// never pay for it.
    pub fn meets(&self) -> &MeetTable {
        self.meets.get_or_init(|| MeetTable::new(&self.structure))
    }

    /// Some leaf `x + S` other than `2S` lies inside `H` (radical points).
    pub fn is_degenerate(&self) -> bool {
        (0..self.ambient.leaf_count()).any(|l| {
            !self.ambient.leaf_root(l).is_empty()
                && self.ambient.leaves()[l].is_subset(&self.hyperplane)
        })
    }

    fn require_nondegenerate_level2(&self) -> Result<()> {
        if self.ambient.level() != 2 {
            return Err(GeomError::Invalid("level 2 required".into()));
        }
        if self.is_degenerate() {
            return Err(GeomError::Degenerate);
        }
        Ok(())
    }

    /// `∥_H` classes consist of pairwise disjoint traces with one common
    /// infinite point.
    pub fn classes_are_disjoint(&self) -> bool {
        self.classes.iter().all(|c| {
            c.iter()
                .enumerate()
                .all(|(i, &a)| c[i + 1..].iter().all(|&b| !self.meets().meet(a, b)))
        })
    }

    /// `L₁ ∥° L₂` in the reduct.
    pub fn veblen_parallel(&self, l1: usize, l2: usize) -> bool {
        veblen_parallel(&self.structure, self.meets(), l1, l2)
    }

    /// The whole relation `∥°` with its classes.
    pub fn veblen_classes(&self) -> VeblenClasses {
        veblen_classes(&self.structure, self.meets())
    }

    /// Splits every `∥_H` class by `∥°` and compares the split with the type
    /// of its infinite point (`2x` or `x + y`).
    pub fn classify_directions(&self, veblen: &VeblenClasses) -> Result<Vec<Direction>> {
        self.require_nondegenerate_level2()?;
        let mut out = Vec::with_capacity(self.classes.len());
        for (c, members) in self.classes.iter().enumerate() {
            let e = self.class_point(c);
            let kind = if self.ambient.point(e).support_len() == 1 {
                DirectionType::OneLeaf
            } else {
                DirectionType::TwoLeaf
            };
            let mut sub: Vec<usize> = members.iter().map(|&l| veblen.class_of[l]).collect();
            sub.sort_unstable();
            sub.dedup();
            let subclasses_inside = sub
                .iter()
                .all(|&s| veblen.classes[s].iter().all(|&l| self.class_of[l] == c));
            let mut leaves: Vec<usize> = members.iter().map(|&l| self.top(l)).collect();
            leaves.sort_unstable();
            leaves.dedup();
            let subclass_leaves_single = sub.iter().all(|&s| {
                let t = self.top(veblen.classes[s][0]);
                veblen.classes[s].iter().all(|&l| self.top(l) == t)
            });
            let definable = match sub.len() {
                1 => Some(DirectionType::OneLeaf),
                2 => Some(DirectionType::TwoLeaf),
                _ => None,
            };
            out.push(Direction {
                class: c,
                infinite_point: e,
                kind,
                definable,
                veblen_subclasses: sub.len(),
                subclasses_inside,
                leaves,
                subclass_leaves_single,
            });
        }
        Ok(out)
    }

    /// `π(L₁, L₂, L₃) = ⋃{L : L ∥ L₁, L ∼ L₂, L₃}`. Only triangles with the
    /// side condition `e₁ ∼ e₀ ∈ L₁`, `e₀ ≠ e₂, e₃` can give a plane; the
    /// others (three sides in three leaves over one base line) come back
    /// `Degenerate`.
    pub fn plane_from_triangle(&self, l1: usize, l2: usize, l3: usize) -> Result<PlaneOutcome> {
        let g = &self.structure;
        let (Some(e1), Some(e2), Some(e3)) = (g.meet(l2, l3), g.meet(l1, l3), g.meet(l1, l2))
        else {
            return Err(GeomError::NotATriangle("sides do not pairwise meet".into()));
        };
        if l1 == l2 || l2 == l3 || l1 == l3 || e1 == e2 || e2 == e3 || e1 == e3 || g.on_line(e1, l1)
        {
            return Err(GeomError::NotATriangle(
                "sides are concurrent or repeated".into(),
            ));
        }
        let adj = g.adjacency();
        let side_condition = g
            .line(l1)
            .iter()
            .any(|&e0| e0 != e2 && e0 != e3 && adj[e1].contains(e0));
        let mut union = PointSet::empty(g.point_count());
        for &l in &self.classes[self.class_of[l1]] {
            if self.meets().meet(l, l2) && self.meets().meet(l, l3) {
                for &p in g.line(l) {
                    union.insert(p);
                }
            }
        }
        let outcome = self.judge_plane(union);
        // Without the side condition the formula is evaluated but never
        // accepted as a plane.
        Ok(match outcome {
            PlaneOutcome::Plane(set) if !side_condition => PlaneOutcome::NonPlane(set),
            other => other,
        })
    }

    fn judge_plane(&self, set: PointSet) -> PlaneOutcome {
        let base = self.ambient.base();
        let support: std::collections::BTreeSet<usize> = set
            .iter()
            .flat_map(|p| self.ambient.point(self.ambient_point[p]).support())
            .collect();
        let pts: Vec<usize> = support.into_iter().collect();
        if pts.len() >= 2 {
            if let Some(m) = base.line_through(pts[0], pts[1]) {
                if pts.iter().all(|&x| base.on_line(x, m)) {
                    return PlaneOutcome::Degenerate(set);
                }
            }
        }
        let g = &self.structure;
        let in_one_line = set.iter().next().is_some_and(|p| {
            g.lines_through(p)
                .iter()
                .any(|&l| set.iter().all(|q| g.on_line(q, l)))
        });
        if g.is_subspace(&set) && g.is_strong(&set) && !in_one_line {
            PlaneOutcome::Plane(set)
        } else {
            PlaneOutcome::NonPlane(set)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DirectionType {
    /// Infinite point `2x`; the class lies in the single leaf `x + S`.
    OneLeaf,
    /// Infinite point `x + y`, `x ≠ y`; the class meets `x + S` and `y + S`.
    TwoLeaf,
}

#[derive(Debug, Clone, Serialize)]
pub struct Direction {
    pub class: usize,
    pub infinite_point: usize,
    /// From the infinite point.
    pub kind: DirectionType,
    /// From the number of `∥°` subclasses alone.
    pub definable: Option<DirectionType>,
    pub veblen_subclasses: usize,
    /// No `∥°` subclass leaks out of the `∥_H` class.
    pub subclasses_inside: bool,
    pub leaves: Vec<usize>,
    /// Each `∥°` subclass lies in one leaf.
    pub subclass_leaves_single: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlaneOutcome {
    Plane(PointSet),
    /// The union lies in `m₂(m)` for a base line `m`.
    Degenerate(PointSet),
    NonPlane(PointSet),
}

impl PlaneOutcome {
    pub fn points(&self) -> &PointSet {
        match self {
            PlaneOutcome::Plane(s) | PlaneOutcome::Degenerate(s) | PlaneOutcome::NonPlane(s) => s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BilinearForm;
    use crate::hyperplanes::hyperplane_from_symplectic;
    use crate::spaces::ProjectiveSpace;
    use crate::Gf3;

    #[test]
    fn projective_line_reduct() {
        let pg = ProjectiveSpace::<Gf3>::new(1).unwrap();
        let v = VeroneseSpace::build(pg.structure(), 2).unwrap();
        let h = hyperplane_from_symplectic(&v, &pg, &BilinearForm::standard_symplectic(2).unwrap())
            .unwrap();
        let a = AffineReduct::build(&v, &h.points).unwrap();
        assert_eq!(a.point_count(), 6);
        assert_eq!(a.line_count(), 4);
        assert!(a.structure().lines().iter().all(|l| l.len() == 3));
        assert_eq!(a.classes().len(), 4);
        assert!(a.classes_are_disjoint());
        assert!((0..6).all(|p| v.point(a.ambient_point(p)).support_len() == 2));
    }

    #[test]
    fn rejects_non_hyperplane() {
        let pg = ProjectiveSpace::<Gf3>::new(1).unwrap();
        let v = VeroneseSpace::build(pg.structure(), 2).unwrap();
        assert!(matches!(
            AffineReduct::build(&v, &PointSet::from_indices(10, [0])),
            Err(GeomError::NotHyperplane(_))
        ));
    }
}
