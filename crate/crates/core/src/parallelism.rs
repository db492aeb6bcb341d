//! Parallelisms on Veronese spaces over partial affine bases: the relation
//! induced by base directions, why it breaks the Euclid axiom, the search
//! for leaf-closed parallelisms, and `∥°` in Veronese spaces of affine
//! spaces.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::configs::{veblen_parallel, MeetTable};
use crate::error::{GeomError, Result};
use crate::pointset::PointSet;
use crate::spaces::ParallelStructure;
use crate::veronese::{binomial, VeroneseSpace};

fn check_base(v: &VeroneseSpace, base: &ParallelStructure) -> Result<()> {
    if v.base().point_count() != base.base.point_count() || v.base().lines() != base.base.lines() {
        return Err(GeomError::MismatchedAmbient(
            "the parallel structure is not on the Veronese base".into(),
        ));
    }
    Ok(())
}

/// Key of a base line under the base parallelism; unclassed lines are
/// only parallel to themselves.
fn direction_key(base: &ParallelStructure, line: usize) -> usize {
    match base.class_of(line) {
        Some(c) => c,
        None => base.classes.len() + line,
    }
}

/// `B₁ ∥ B₂` iff `B₁ = e₁ + r₁L₁`, `B₂ = e₂ + r₂L₂` with `L₁ ∥ L₂`.
#[derive(Debug, Clone, Serialize)]
pub struct InducedRelation {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    /// The base direction key behind each class.
    pub direction: Vec<usize>,
    /// Checked pair by pair against the defining formula.
    pub equivalence: bool,
}

impl InducedRelation {
    pub fn related(&self, b1: usize, b2: usize) -> bool {
        self.class_of[b1] == self.class_of[b2]
    }
}

pub fn induced_relation(v: &VeroneseSpace, base: &ParallelStructure) -> Result<InducedRelation> {
    check_base(v, base)?;
    let b = v.structure().line_count();
    let keys: Vec<Vec<usize>> = (0..b)
        .map(|l| {
            let mut k: Vec<usize> = v
                .block_origins(l)
                .iter()
                .map(|o| direction_key(base, o.base_line))
                .collect();
            k.sort_unstable();
            k.dedup();
            k
        })
        .collect();
    if let Some(l) = keys.iter().position(|k| k.len() != 1) {
        return Err(GeomError::Falsified(format!(
            "block {l} has presentations over {} base directions",
            keys[l].len()
        )));
    }
    let mut direction: Vec<usize> = keys.iter().map(|k| k[0]).collect();
    direction.sort_unstable();
    direction.dedup();
    let class_of: Vec<usize> = keys
        .iter()
        .map(|k| direction.binary_search(&k[0]).expect("collected"))
        .collect();
    let mut classes = vec![Vec::new(); direction.len()];
    for (l, &c) in class_of.iter().enumerate() {
        classes[c].push(l);
    }
    let formula = |b1: usize, b2: usize| {
        v.block_origins(b1).iter().any(|o1| {
            v.block_origins(b2)
                .iter()
                .any(|o2| base.parallel(o1.base_line, o2.base_line))
        })
    };
    let equivalence =
        (0..b).all(|b1| (0..b).all(|b2| formula(b1, b2) == (class_of[b1] == class_of[b2])));
    Ok(InducedRelation {
        class_of,
        classes,
        direction,
        equivalence,
    })
}

/// Two distinct related blocks through one point.
#[derive(Debug, Clone, Serialize)]
pub struct EuclidWitness {
    pub point: usize,
    pub blocks: (usize, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct EuclidReport {
    pub level: usize,
    /// Every class covers the point set.
    pub classes_cover: bool,
    /// Through every point each class has exactly one block per leaf
    /// through that point.
    pub one_per_leaf: bool,
    /// Blocks of one class through one point, when constant.
    pub blocks_per_point: Option<usize>,
    pub witness: Option<EuclidWitness>,
}

impl EuclidReport {
    /// The relation is not a parallelism.
    pub fn fails(&self) -> bool {
        self.witness.is_some()
    }
}

pub fn check_euclid_failure(v: &VeroneseSpace, rel: &InducedRelation) -> EuclidReport {
    let g = v.structure();
    let mut classes_cover = true;
    let mut one_per_leaf = true;
    let mut counts = std::collections::BTreeSet::new();
    let mut witness = None;
    for class in &rel.classes {
        let mut through: Vec<Vec<usize>> = vec![Vec::new(); g.point_count()];
        for &l in class {
            for &p in g.line(l) {
                through[p].push(l);
            }
        }
        for (p, ls) in through.iter().enumerate() {
            if ls.is_empty() {
                classes_cover = false;
            }
            counts.insert(ls.len());
            let mut leaves: Vec<usize> = ls.iter().map(|&l| v.block_leaf(l)).collect();
            leaves.sort_unstable();
            leaves.dedup();
            let mut expected = v.leaves_through(p);
            expected.sort_unstable();
            if leaves.len() != ls.len() || leaves != expected {
                one_per_leaf = false;
            }
            if witness.is_none() && ls.len() >= 2 {
                witness = Some(EuclidWitness {
                    point: p,
                    blocks: (ls[0], ls[1]),
                });
            }
        }
    }
    EuclidReport {
        level: v.level(),
        classes_cover,
        one_per_leaf,
        blocks_per_point: (counts.len() == 1).then(|| *counts.iter().next().expect("one")),
        witness,
    }
}

// ------------------------------------------------------ leaf-closed search

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchOutcome {
    None,
    /// Classes of blocks; would contradict the nonexistence result.
    Found(Vec<Vec<usize>>),
    /// Partial search only, never a proof.
    BudgetExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchCertificate {
    /// Leaf directions the search partitions.
    pub units: usize,
    pub nodes: u64,
    pub budget: u64,
    pub exhausted: bool,
    /// SHA-256 over the decision trail.
    pub trail_sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeafClosedSearch {
    pub outcome: SearchOutcome,
    pub certificate: SearchCertificate,
}

struct Search<'a> {
    units: &'a [(PointSet, Vec<usize>)],
    used: Vec<bool>,
    classes: Vec<Vec<usize>>,
    nodes: u64,
    budget: u64,
    hasher: Sha256,
}

enum Step {
    Found,
    Dead,
    OutOfBudget,
}

impl Search<'_> {
    fn log(&mut self, tag: u8, x: usize) {
        self.hasher.update([tag]);
        self.hasher.update((x as u64).to_le_bytes());
    }

    fn run(&mut self, covered: &PointSet) -> Step {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::OutOfBudget;
        }
        if covered.is_full() {
            self.log(b'c', self.classes.len());
            return self.open();
        }
        let p = covered.complement().iter().next().expect("not full");
        let candidates: Vec<usize> = (0..self.units.len())
            .filter(|&u| {
                !self.used[u] && self.units[u].0.contains(p) && self.units[u].0.is_disjoint(covered)
            })
            .collect();
        if candidates.is_empty() {
            self.log(b'x', p);
            return Step::Dead;
        }
        for u in candidates {
            self.log(b'a', u);
            self.used[u] = true;
            self.classes.last_mut().expect("open class").push(u);
            let mut next = covered.clone();
            next.union_with(&self.units[u].0);
            match self.run(&next) {
                Step::Dead => {}
                other => return other,
            }
            self.classes.last_mut().expect("open class").pop();
            self.used[u] = false;
        }
        Step::Dead
    }

    /// Starts a class at the least unused unit, so classes come in a
    /// canonical order.
    fn open(&mut self) -> Step {
        let Some(u0) = self.used.iter().position(|&x| !x) else {
            return Step::Found;
        };
        self.log(b'o', u0);
        self.used[u0] = true;
        self.classes.push(vec![u0]);
        let step = self.run(&self.units[u0].0.clone());
        if matches!(step, Step::Dead) {
            self.classes.pop();
            self.used[u0] = false;
        }
        step
    }
}

/// Partitions the blocks into point-covering classes, each a union of
/// per-leaf copies of base directions, by exhaustive backtracking.
pub fn search_leaf_closed_parallelism(
    v: &VeroneseSpace,
    base: &ParallelStructure,
    budget: u64,
) -> Result<LeafClosedSearch> {
    check_base(v, base)?;
    if !base.is_affine() {
        return Err(GeomError::Invalid(
            "the base parallelism is not affine".into(),
        ));
    }
    let sizes: std::collections::BTreeSet<usize> = base.base.lines().iter().map(Vec::len).collect();
    let dirs: std::collections::BTreeSet<usize> = base.classes.iter().map(Vec::len).collect();
    if sizes.len() != 1 || dirs.len() != 1 {
        return Err(GeomError::Invalid(
            "line sizes and direction sizes of the base must be constant".into(),
        ));
    }
    let g = v.structure();
    let mut unit_of: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for l in 0..g.line_count() {
        let origin = &v.block_origins(l)[0];
        let c = base.class_of(origin.base_line).expect("affine");
        unit_of.entry((v.block_leaf(l), c)).or_default().push(l);
    }
    let units: Vec<(PointSet, Vec<usize>)> = unit_of
        .into_values()
        .map(|blocks| {
            let mut pts = PointSet::empty(g.point_count());
            for &l in &blocks {
                pts.union_with(&g.line_set(l));
            }
            (pts, blocks)
        })
        .collect();
    let mut s = Search {
        units: &units,
        used: vec![false; units.len()],
        classes: Vec::new(),
        nodes: 0,
        budget,
        hasher: Sha256::new(),
    };
    let step = s.open();
    let outcome = match step {
        Step::Found => SearchOutcome::Found(
            s.classes
                .iter()
                .map(|c| {
                    let mut blocks: Vec<usize> =
                        c.iter().flat_map(|&u| units[u].1.iter().copied()).collect();
                    blocks.sort_unstable();
                    blocks
                })
                .collect(),
        ),
        Step::Dead => SearchOutcome::None,
        Step::OutOfBudget => SearchOutcome::BudgetExceeded,
    };
    let digest = s.hasher.finalize();
    Ok(LeafClosedSearch {
        certificate: SearchCertificate {
            units: units.len(),
            nodes: s.nodes.min(budget),
            budget,
            exhausted: outcome != SearchOutcome::BudgetExceeded,
            trail_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        },
        outcome,
    })
}

/// Pairs `(n, k)` with `C(n+k−1, k) = n·C(n+k−1, k−1)`: the count a
/// leaf-closed parallelism with constant direction sizes would force.
pub fn counting_identity_solutions(
    ns: std::ops::Range<u64>,
    ks: std::ops::Range<u64>,
) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for n in ns {
        for k in ks.clone() {
            let lhs = binomial(n + k - 1, k) as u128;
            let rhs = n as u128 * binomial(n + k - 1, k - 1) as u128;
            if lhs == rhs {
                out.push((n, k));
            }
        }
    }
    out
}

// ------------------------------------------- Veblen parallels over AG

/// `B₁ = e + r·l₁`, `B₂ = e + r·l₂` with `l₁ ∥ l₂` in the base.
pub fn leafwise_parallel(
    v: &VeroneseSpace,
    base: &ParallelStructure,
    b1: usize,
    b2: usize,
) -> bool {
    v.block_origins(b1).iter().any(|o1| {
        v.block_origins(b2)
            .iter()
            .any(|o2| o1.e == o2.e && o1.r == o2.r && base.parallel(o1.base_line, o2.base_line))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VeblenCrossCheck {
    pub pairs: usize,
    pub parallel_pairs: usize,
    pub mismatches: Vec<(usize, usize)>,
}

impl VeblenCrossCheck {
    pub fn agree(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// `∥°` from incidence against [`leafwise_parallel`], over all block pairs.
pub fn cross_check_veblen_parallel(
    v: &VeroneseSpace,
    base: &ParallelStructure,
) -> Result<VeblenCrossCheck> {
    check_base(v, base)?;
    if !base.is_affine() {
        return Err(GeomError::Invalid(
            "the base parallelism is not affine".into(),
        ));
    }
    let g = v.structure();
    let meets = MeetTable::new(g);
    let mut out = VeblenCrossCheck {
        pairs: 0,
        parallel_pairs: 0,
        mismatches: Vec::new(),
    };
    for b1 in 0..g.line_count() {
        for b2 in b1..g.line_count() {
            out.pairs += 1;
            let by_incidence = veblen_parallel(g, &meets, b1, b2);
            if by_incidence {
                out.parallel_pairs += 1;
            }
            if by_incidence != leafwise_parallel(v, base, b1, b2) {
                out.mismatches.push((b1, b2));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiset::Multiset;
    use crate::spaces::affine_space;
    use crate::Gf3;

    fn ag(n: usize, k: usize) -> (VeroneseSpace, ParallelStructure) {
        let a = affine_space::<Gf3>(n).unwrap();
        let v = VeroneseSpace::build(a.structure(), k).unwrap();
        (v, a.parallel)
    }

    #[test]
    fn induced_relation_on_ag23() {
        let (v, base) = ag(2, 2);
        let rel = induced_relation(&v, &base).unwrap();
        assert!(rel.equivalence);
        assert_eq!(rel.classes.len(), 4);
        assert!(rel.classes.iter().all(|c| c.len() == 30));
        // a + L and 2L for a ∈ L
        let line = base.base.line(0);
        let a = line[0];
        let l_a = v
            .structure()
            .find_line(
                &line
                    .iter()
                    .map(|&x| v.index_of(&Multiset::from_points([a, x])).unwrap())
                    .collect::<Vec<_>>(),
            )
            .unwrap();
        let l_2 = v
            .structure()
            .find_line(
                &line
                    .iter()
                    .map(|&x| v.index_of(&Multiset::from_points([x, x])).unwrap())
                    .collect::<Vec<_>>(),
            )
            .unwrap();
        assert_ne!(l_a, l_2);
        assert!(rel.related(l_a, l_2));
        let two_a = v.index_of(&Multiset::from_points([a, a])).unwrap();
        assert!(v.structure().on_line(two_a, l_a) && v.structure().on_line(two_a, l_2));
    }

    #[test]
    fn class_sizes_match_leaf_count() {
        for (n, k) in [(2, 2), (1, 2), (1, 3)] {
            let (v, base) = ag(n, k);
            let rel = induced_relation(&v, &base).unwrap();
            let leaves =
                binomial(base.base.point_count() as u64 + k as u64 - 1, k as u64 - 1) as usize;
            for (c, class) in rel.classes.iter().enumerate() {
                assert_eq!(class.len(), leaves * base.classes[rel.direction[c]].len());
            }
        }
    }

    #[test]
    fn euclid_fails_for_k2_not_k1() {
        let (v, base) = ag(2, 2);
        let r = check_euclid_failure(&v, &induced_relation(&v, &base).unwrap());
        assert!(r.classes_cover && r.one_per_leaf);
        assert_eq!(r.blocks_per_point, Some(2));
        assert!(r.fails());
        let (v1, base1) = ag(2, 1);
        let r1 = check_euclid_failure(&v1, &induced_relation(&v1, &base1).unwrap());
        assert!(!r1.fails() && r1.classes_cover);
        assert_eq!(r1.blocks_per_point, Some(1));
    }

    #[test]
    fn leaf_closed_search() {
        let (v, base) = ag(1, 2);
        assert_eq!((v.point_count(), v.structure().line_count()), (6, 4));
        let s = search_leaf_closed_parallelism(&v, &base, 10_000).unwrap();
        assert_eq!(s.outcome, SearchOutcome::None);
        assert!(s.certificate.exhausted);
        assert_eq!(s.certificate.units, 4);
        let again = search_leaf_closed_parallelism(&v, &base, 10_000).unwrap();
        assert_eq!(s.certificate.trail_sha256, again.certificate.trail_sha256);
        let (v, base) = ag(2, 2);
        assert_eq!(
            search_leaf_closed_parallelism(&v, &base, 100_000)
                .unwrap()
                .outcome,
            SearchOutcome::None
        );
        // level 1 is the base itself, which is resolvable
        let (v, base) = ag(2, 1);
        let s = search_leaf_closed_parallelism(&v, &base, 100_000).unwrap();
        assert!(matches!(s.outcome, SearchOutcome::Found(ref c) if c.len() == 4));
    }

    #[test]
    fn budget_is_reported_not_proved() {
        let (v, base) = ag(2, 1);
        let s = search_leaf_closed_parallelism(&v, &base, 3).unwrap();
        assert_eq!(s.outcome, SearchOutcome::BudgetExceeded);
        assert!(!s.certificate.exhausted);
    }

    #[test]
    fn counting_identity() {
        assert!(counting_identity_solutions(2..51, 2..7).is_empty());
        assert!(counting_identity_solutions(2..10, 1..2).len() == 8);
    }

    #[test]
    fn veblen_parallels_over_ag23() {
        let (v, base) = ag(2, 2);
        let c = cross_check_veblen_parallel(&v, &base).unwrap();
        assert!(
            c.agree(),
            "{:?}",
            &c.mismatches[..c.mismatches.len().min(4)]
        );
        // 10 leaves × 4 directions × C(3,2) unordered pairs + 120 reflexive
        assert_eq!(c.parallel_pairs, 10 * 4 * 3 + 120);
    }
}
