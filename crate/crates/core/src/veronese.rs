//! Veronese spaces `V(k, M)`: points are degree-`k` multisets over the base
//! points, blocks are `e + r·B` for base lines `B`, `0 < r ≤ k`, `|e| = k − r`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::incidence::{IncidenceStructure, Label, LeafTraceData};
use crate::multiset::{enumerate_lower_multisets, enumerate_multisets, Multiset};
use crate::pointset::PointSet;

/// One presentation `e + r·B` of a block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockOrigin {
    pub e: Multiset,
    pub r: usize,
    pub base_line: usize,
}

#[derive(Debug, Clone)]
pub struct VeroneseSpace {
    base: IncidenceStructure,
    level: usize,
    points: Vec<Multiset>,
    index: HashMap<Multiset, usize>,
    structure: IncidenceStructure,
    leaf_roots: Vec<Multiset>,
    leaf_index: HashMap<Multiset, usize>,
    leaves: Vec<PointSet>,
    origins: Vec<Vec<BlockOrigin>>,
    block_leaf: Vec<usize>,
}

impl VeroneseSpace {
    pub fn build(base: &IncidenceStructure, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(GeomError::Invalid(
                "Veronese level must be at least 1".into(),
            ));
        }
        if let Some(v) = base.pls_violation() {
            return Err(GeomError::NotPartialLinear(format!("{v:?}")));
        }
        let n = base.point_count();
        let points = enumerate_multisets(n, k)?;
        let index: HashMap<Multiset, usize> = points
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();

        let mut block_ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut origins: Vec<Vec<BlockOrigin>> = Vec::new();
        for r in 1..=k {
            for e in enumerate_multisets(n, k - r)? {
                for (li, line) in base.lines().iter().enumerate() {
                    let mut pts: Vec<usize> =
                        line.iter().map(|&x| index[&e.plus_scaled(r, x)]).collect();
                    pts.sort_unstable();
                    let origin = BlockOrigin {
                        e: e.clone(),
                        r,
                        base_line: li,
                    };
                    match block_ids.get(&pts) {
                        Some(&b) => origins[b].push(origin),
                        None => {
                            block_ids.insert(pts.clone(), blocks.len());
                            blocks.push(pts);
                            origins.push(vec![origin]);
                        }
                    }
                }
            }
        }

        let leaf_roots = enumerate_lower_multisets(n, k)?;
        let leaf_index: HashMap<Multiset, usize> = leaf_roots
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let leaves: Vec<PointSet> = leaf_roots
            .iter()
            .map(|e| {
                let r = k - e.degree();
                PointSet::from_indices(points.len(), (0..n).map(|x| index[&e.plus_scaled(r, x)]))
            })
            .collect();
        let block_leaf = origins.iter().map(|o| leaf_index[&o[0].e]).collect();

        let labels = points
            .iter()
            .enumerate()
            .map(|(i, m)| (i, Label::Multiset(m.clone())))
            .collect();
        let structure = IncidenceStructure::new(points.len(), blocks)?.with_labels(labels);
        Ok(VeroneseSpace {
            base: base.clone(),
            level: k,
            points,
            index,
            structure,
            leaf_roots,
            leaf_index,
            leaves,
            origins,
            block_leaf,
        })
    }

    pub fn base(&self) -> &IncidenceStructure {
        &self.base
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn structure(&self) -> &IncidenceStructure {
        &self.structure
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Multiset] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Multiset {
        &self.points[i]
    }

    pub fn index_of(&self, m: &Multiset) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Index of `e + r·x`.
    pub fn sum_point(&self, e: &Multiset, r: usize, x: usize) -> usize {
        self.index[&e.plus_scaled(r, x)]
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaves(&self) -> &[PointSet] {
        &self.leaves
    }

    /// The `e` of the leaf `e + (k − |e|)S`.
    pub fn leaf_root(&self, leaf: usize) -> &Multiset {
        &self.leaf_roots[leaf]
    }

    pub fn leaf_of_root(&self, e: &Multiset) -> Option<usize> {
        self.leaf_index.get(e).copied()
    }

    /// The point `e + (k − |e|)·x` of a leaf.
    pub fn leaf_point(&self, leaf: usize, x: usize) -> usize {
        let e = &self.leaf_roots[leaf];
        self.sum_point(e, self.level - e.degree(), x)
    }

    /// The leaves containing a point, sorted.
    pub fn leaves_through(&self, p: usize) -> Vec<usize> {
        let f = &self.points[p];
        let mut out = BTreeSet::new();
        for &(x, m) in f.entries() {
            for j in 1..=m {
                let e = f
                    .checked_sub(&Multiset::scale_point(j, x).expect("j ≥ 1"))
                    .expect("j ≤ multiplicity");
                out.insert(self.leaf_index[&e]);
            }
        }
        out.into_iter().collect()
    }

    pub fn block_origins(&self, b: usize) -> &[BlockOrigin] {
        &self.origins[b]
    }

    /// `T(B)` for a block index.
    pub fn block_leaf(&self, b: usize) -> usize {
        self.block_leaf[b]
    }

    /// `T(B)` for a block given as a point set.
    pub fn top_of_block(&self, block: &[usize]) -> Result<usize> {
        self.structure
            .find_line(block)
            .map(|b| self.block_leaf[b])
            .ok_or(GeomError::NotABlock)
    }

    /// If `e` is adjacent to at least three points of block `b`, then `e`
    /// lies in `T(b)`. Returns whether the implication holds for this pair.
    pub fn leaf_adjacency_holds(&self, e: usize, b: usize) -> bool {
        let adj = &self.structure.adjacency()[e];
        let hits = self
            .structure
            .line(b)
            .iter()
            .filter(|&&p| adj.contains(p))
            .count();
        hits < 3 || self.leaves[self.block_leaf[b]].contains(e)
    }

    /// Images of a family of base point sets in every leaf.
    pub fn leaf_images(&self, family: &[PointSet]) -> Vec<PointSet> {
        let mut out = Vec::with_capacity(family.len() * self.leaves.len());
        for leaf in 0..self.leaves.len() {
            for s in family {
                out.push(PointSet::from_indices(
                    self.points.len(),
                    s.iter().map(|x| self.leaf_point(leaf, x)),
                ));
            }
        }
        out
    }

    /// Leaf decomposition used by the leaf-trace hyperplane search.
    pub fn leaf_trace_data(&self) -> Result<LeafTraceData> {
        if self.level != 2 {
            return Err(GeomError::Invalid(format!(
                "leaf traces need level 2, got {}",
                self.level
            )));
        }
        let n = self.base.point_count();
        let pair_point = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| self.index[&Multiset::from_points([x, y])])
                    .collect()
            })
            .collect();
        Ok(LeafTraceData {
            base: self.base.clone(),
            pair_point,
        })
    }

    /// Every block of `self` is a block of `other` (compared as multiset sets).
    pub fn lines_contained_in(&self, other: &VeroneseSpace) -> bool {
        self.structure.lines().iter().all(|line| {
            let mapped: Option<Vec<usize>> = line
                .iter()
                .map(|&p| other.index_of(&self.points[p]))
                .collect();
            mapped.is_some_and(|m| other.structure.find_line(&m).is_some())
        })
    }
}

/// `(v, b, r, κ)` of `V(k, M₀)` from those of `M₀`.
pub fn parameters(v0: u64, b0: u64, r0: u64, kappa0: u64, k: u64) -> (u64, u64, u64, u64) {
    (
        binomial(v0 + k - 1, k),
        binomial(v0 + k - 1, k - 1) * b0,
        k * r0,
        kappa0,
    )
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as u64
}

/// Checks that `map` is injective and carries every line of `src` onto a
/// line of `tgt`.
pub fn check_embedding(
    src: &IncidenceStructure,
    tgt: &IncidenceStructure,
    map: &[usize],
) -> Result<()> {
    let distinct: BTreeSet<usize> = map.iter().copied().collect();
    if distinct.len() != map.len() {
        return Err(GeomError::Falsified("point map is not injective".into()));
    }
    for (li, line) in src.lines().iter().enumerate() {
        let image: Vec<usize> = line.iter().map(|&p| map[p]).collect();
        if tgt.find_line(&image).is_none() {
            return Err(GeomError::Falsified(format!(
                "line {li} is not mapped onto a line"
            )));
        }
    }
    Ok(())
}

/// `μ_r : f ↦ r·f` from `V(k, M)` into `V(rk, M)`, verified.
pub fn mu_embedding(src: &VeroneseSpace, r: usize, tgt: &VeroneseSpace) -> Result<Vec<usize>> {
    if r == 0 {
        return Err(GeomError::ZeroMultiplicity);
    }
    if tgt.level != r * src.level || tgt.base.point_count() != src.base.point_count() {
        return Err(GeomError::MismatchedAmbient(format!(
            "μ_{r} needs a level-{} space over the same base",
            r * src.level
        )));
    }
    let map: Vec<usize> = src.points.iter().map(|f| tgt.index[&f.scaled(r)]).collect();
    check_embedding(&src.structure, &tgt.structure, &map)?;
    Ok(map)
}

/// `τ_e : f ↦ f + e` from `V(k, M)` into `V(k + |e|, M)`, verified.
pub fn tau_embedding(src: &VeroneseSpace, e: &Multiset, tgt: &VeroneseSpace) -> Result<Vec<usize>> {
    if tgt.level != src.level + e.degree() || tgt.base.point_count() != src.base.point_count() {
        return Err(GeomError::MismatchedAmbient(format!(
            "τ_e needs a level-{} space over the same base",
            src.level + e.degree()
        )));
    }
    let map: Vec<usize> = src.points.iter().map(|f| tgt.index[&f.add(e)]).collect();
    check_embedding(&src.structure, &tgt.structure, &map)?;
    Ok(map)
}

/// `V(k, M₀[S₀′]) = V(k, M₀)[m_k(S₀′)]`, compared as structures on
/// multisets over the original point indices.
pub fn verify_restriction_facts(
    base: &IncidenceStructure,
    s0: &PointSet,
    k: usize,
) -> Result<bool> {
    let (sub, old) = base.restrict(s0);
    if sub.point_count() == 0 {
        return Ok(true);
    }
    let left = VeroneseSpace::build(&sub, k)?;
    let left_lines: BTreeSet<Vec<Multiset>> = left
        .structure
        .lines()
        .iter()
        .map(|l| {
            let mut v: Vec<Multiset> = l
                .iter()
                .map(|&p| left.points[p].map_points(|x| old[x]))
                .collect();
            v.sort();
            v
        })
        .collect();
    let left_points: BTreeSet<Multiset> = left
        .points
        .iter()
        .map(|m| m.map_points(|x| old[x]))
        .collect();

    let full = VeroneseSpace::build(base, k)?;
    let inside = PointSet::from_indices(
        full.point_count(),
        (0..full.point_count())
            .filter(|&i| full.points[i].support().iter().all(|&x| s0.contains(x))),
    );
    let (right, right_old) = full.structure.restrict(&inside);
    let right_points: BTreeSet<Multiset> =
        right_old.iter().map(|&p| full.points[p].clone()).collect();
    let right_lines: BTreeSet<Vec<Multiset>> = right
        .lines()
        .iter()
        .map(|l| {
            let mut v: Vec<Multiset> = l
                .iter()
                .map(|&p| full.points[right_old[p]].clone())
                .collect();
            v.sort();
            v
        })
        .collect();
    Ok(left_points == right_points && left_lines == right_lines)
}
