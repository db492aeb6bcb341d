//! Putting the hyperplane back: planes and tops from reduct incidence,
//! horizon lines inside the leaves `x + S` and inside `2S`, the full
//! reconstruction, the Net-axiom counterexample, the definability of `∥_H`,
//! and γ-chains of planes in polar Veronesians.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AffineReduct, PlaneOutcome, VeblenClasses};
use crate::configs::{is_proper, quadrangles_at, NetWitness, Quadrangle};
use crate::error::{GeomError, Result};
use crate::incidence::IncidenceStructure;
use crate::pointset::PointSet;

/// Maximal strong subspaces of the reduct and, for every line, the one
/// containing it.
pub fn reduct_tops(a: &AffineReduct) -> Result<(Vec<PointSet>, Vec<usize>)> {
    let g = a.structure();
    let tops = g.maximal_strong_subspaces();
    let mut top_of = vec![usize::MAX; g.line_count()];
    for (l, line) in g.lines().iter().enumerate() {
        let owners: Vec<usize> = (0..tops.len())
            .filter(|&t| line.iter().all(|&p| tops[t].contains(p)))
            .collect();
        match owners.as_slice() {
            [t] => top_of[l] = *t,
            _ => {
                return Err(GeomError::Falsified(format!(
                    "line {l} lies in {} maximal strong subspaces",
                    owners.len()
                )))
            }
        }
    }
    Ok((tops, top_of))
}

/// Every plane `π(L₁, L₂, L₃)` over all triangles and all choices of `L₁`.
pub fn reduct_planes(a: &AffineReduct) -> Vec<PointSet> {
    let g = a.structure();
    let adj = g.adjacency();
    let mut planes = BTreeSet::new();
    for e1 in 0..g.point_count() {
        for e2 in adj[e1].iter().filter(|&x| x > e1) {
            for e3 in adj[e1].iter().filter(|&x| x > e2 && adj[e2].contains(x)) {
                let s12 = g.line_through(e1, e2).expect("adjacent");
                let s13 = g.line_through(e1, e3).expect("adjacent");
                let s23 = g.line_through(e2, e3).expect("adjacent");
                if s12 == s13 {
                    continue;
                }
                for (l1, l2, l3) in [(s23, s13, s12), (s13, s12, s23), (s12, s23, s13)] {
                    if let Ok(PlaneOutcome::Plane(p)) = a.plane_from_triangle(l1, l2, l3) {
                        planes.insert(p);
                    }
                }
            }
        }
    }
    planes.into_iter().collect()
}

/// Recovered horizon lines, each a set of `∥_H` class indices.
#[derive(Debug, Clone, Serialize)]
pub struct HorizonLines {
    pub lines: Vec<Vec<usize>>,
}

impl HorizonLines {
    /// Lines as sets of ambient points (infinite points of the classes).
    pub fn ambient(&self, a: &AffineReduct) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .lines
            .iter()
            .map(|l| {
                let mut v: Vec<usize> = l.iter().map(|&c| a.class_point(c)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        out.sort();
        out
    }
}

/// Lines of the horizon inside leaves `x + S`: the direction sets of planes.
pub fn recover_horizon_leaf_lines(a: &AffineReduct, planes: &[PointSet]) -> HorizonLines {
    let g = a.structure();
    let mut lines = BTreeSet::new();
    for plane in planes {
        let mut dirs = BTreeSet::new();
        for p in plane.iter() {
            for &l in g.lines_through(p) {
                if g.line(l).iter().all(|&q| plane.contains(q)) {
                    dirs.insert(a.class_of(l));
                }
            }
        }
        if dirs.len() >= 2 {
            lines.insert(dirs.into_iter().collect::<Vec<_>>());
        }
    }
    HorizonLines {
        lines: lines.into_iter().collect(),
    }
}

/// Lines of the horizon inside `2S`: one-leaf directions `a₁, a₂, a₃` are
/// collinear when lines in their tops all cross both opposite sides of one
/// proper quadrangle.
pub fn recover_horizon_2s_lines(
    a: &AffineReduct,
    veblen: &VeblenClasses,
    top_of: &[usize],
    tops: usize,
) -> HorizonLines {
    let g = a.structure();
    // One-leaf directions: a single ∥° subclass.
    let one_leaf: Vec<bool> = a
        .classes()
        .iter()
        .map(|c| {
            c.iter()
                .all(|&l| veblen.class_of[l] == veblen.class_of[c[0]])
        })
        .collect();
    let mut dir_of_top: Vec<Option<usize>> = vec![None; tops];
    for l in 0..g.line_count() {
        let c = a.class_of(l);
        if one_leaf[c] {
            dir_of_top[top_of[l]] = Some(c);
        }
    }
    let ids: Vec<usize> = (0..one_leaf.len()).filter(|&c| one_leaf[c]).collect();
    let pos: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let n = ids.len();
    let mut triples = PointSet::empty(n * n * n);
    let top = |l: usize| top_of[l];
    for p in 0..g.point_count() {
        for q in quadrangles_at(g, p) {
            if !is_proper(&q, &top) {
                continue;
            }
            for (s, t) in [(q.sides[0], q.sides[2]), (q.sides[1], q.sides[3])] {
                let ks = a.meets().common_crossers(s, t);
                let d: BTreeSet<usize> = ks
                    .iter()
                    .filter_map(|&k| dir_of_top[top_of[k]])
                    .map(|c| pos[&c])
                    .collect();
                let d: Vec<usize> = d.into_iter().collect();
                if d.len() < 3 {
                    continue;
                }
                for &x in &d {
                    for &y in &d {
                        for &z in &d {
                            if x != y && y != z && x != z {
                                triples.insert((x * n + y) * n + z);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut lines = BTreeSet::new();
    for x in 0..n {
        for y in x + 1..n {
            let mut line: Vec<usize> = (0..n)
                .filter(|&z| triples.contains((x * n + y) * n + z))
                .collect();
            if line.is_empty() {
                continue;
            }
            line.push(x);
            line.push(y);
            let mut line: Vec<usize> = line.into_iter().map(|i| ids[i]).collect();
            line.sort_unstable();
            lines.insert(line);
        }
    }
    HorizonLines {
        lines: lines.into_iter().collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Recovery {
    #[serde(skip)]
    pub structure: IncidenceStructure,
    /// Recovered point index to ambient point index.
    pub to_ambient: Vec<usize>,
    pub proper_lines: usize,
    pub leaf_horizon_lines: usize,
    pub two_s_horizon_lines: usize,
    pub bijective: bool,
    pub missing: Vec<Vec<usize>>,
    pub spurious: Vec<Vec<usize>>,
}

impl Recovery {
    pub fn is_isomorphism(&self) -> bool {
        self.bijective && self.missing.is_empty() && self.spurious.is_empty()
    }
}

/// Rebuilds the ambient Veronese space from reduct incidence and `∥_H`:
/// proper points plus one point per direction; completed truncated lines
/// plus both kinds of recovered horizon lines. The obvious map back is
/// compared line by line with the ambient.
pub fn recover_veronese(a: &AffineReduct) -> Result<Recovery> {
    a.require_nondegenerate_level2()?;
    let veblen = a.veblen_classes();
    let (tops, top_of) = reduct_tops(a)?;
    let planes = reduct_planes(a);
    let leaf = recover_horizon_leaf_lines(a, &planes);
    let two_s = recover_horizon_2s_lines(a, &veblen, &top_of, tops.len());
    let n = a.point_count();
    let mut lines: Vec<Vec<usize>> = Vec::new();
    for (l, line) in a.structure().lines().iter().enumerate() {
        let mut v = line.clone();
        v.push(n + a.class_of(l));
        lines.push(v);
    }
    let proper_lines = lines.len();
    for h in leaf.lines.iter().chain(&two_s.lines) {
        lines.push(h.iter().map(|&c| n + c).collect());
    }
    let mut to_ambient: Vec<usize> = (0..n).map(|p| a.ambient_point(p)).collect();
    to_ambient.extend((0..a.classes().len()).map(|c| a.class_point(c)));
    let structure = IncidenceStructure::new(to_ambient.len(), lines)?;
    let total = a.ambient().point_count();
    let bijective = to_ambient.len() == total && {
        let mut s = to_ambient.clone();
        s.sort_unstable();
        s.dedup();
        s.len() == total
    };
    let mapped: BTreeSet<Vec<usize>> = structure
        .lines()
        .iter()
        .map(|l| {
            let mut v: Vec<usize> = l.iter().map(|&p| to_ambient[p]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let target: BTreeSet<Vec<usize>> = a.ambient().structure().lines().iter().cloned().collect();
    Ok(Recovery {
        proper_lines,
        leaf_horizon_lines: leaf.lines.len(),
        two_s_horizon_lines: two_s.lines.len(),
        missing: target.difference(&mapped).cloned().collect(),
        spurious: mapped.difference(&target).cloned().collect(),
        bijective,
        to_ambient,
        structure,
    })
}

/// A proper quadrangle `L₁, K₁, L₂, K₂` (sides 0..3) with `l3` crossing
/// `K₁, K₂` and `k3` crossing `L₁, L₂`, all tops distinct where required.
fn complete_to_net(
    a: &AffineReduct,
    top: &dyn Fn(usize) -> usize,
    l3: usize,
    k3: usize,
) -> Option<Quadrangle> {
    let g = a.structure();
    let adj = g.adjacency();
    let crossers = |l: usize| -> Vec<usize> {
        let mut v: Vec<usize> = g
            .line(l)
            .iter()
            .flat_map(|&p| g.lines_through(p).iter().copied())
            .filter(|&m| m != l && top(m) != top(l))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let ks = crossers(l3);
    let ls = crossers(k3);
    for (i, &k1) in ks.iter().enumerate() {
        let near_k1: Vec<usize> = ls
            .iter()
            .copied()
            .filter(|&l| g.lines_meet(l, k1))
            .collect();
        if near_k1.len() < 2 {
            continue;
        }
        for &k2 in &ks[i + 1..] {
            let both: Vec<usize> = near_k1
                .iter()
                .copied()
                .filter(|&l| g.lines_meet(l, k2))
                .collect();
            for (j, &l1) in both.iter().enumerate() {
                for &l2 in &both[j + 1..] {
                    let sides = [l1, k1, l2, k2];
                    if sides.iter().any(|&s| s == l3 || s == k3) {
                        continue;
                    }
                    let vs = [
                        g.meet(k2, l1),
                        g.meet(l1, k1),
                        g.meet(k1, l2),
                        g.meet(l2, k2),
                    ];
                    let [Some(v0), Some(v1), Some(v2), Some(v3)] = vs else {
                        continue;
                    };
                    let verts = [v0, v1, v2, v3];
                    let distinct = (0..4).all(|x| (x + 1..4).all(|y| verts[x] != verts[y]));
                    if !distinct || adj[v0].contains(v2) || adj[v1].contains(v3) {
                        continue;
                    }
                    let q = Quadrangle {
                        vertices: verts,
                        sides,
                    };
                    if is_proper(&q, top) {
                        return Some(q);
                    }
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct NetViolation {
    pub witness: NetWitness,
    /// The ambient point `x + y ∈ H` where the parents of `l3` and `k3` meet.
    pub deleted_point: usize,
}

/// Two reduct lines through the deleted point `x + y`, one in `x + S` and
/// one in `y + S`, completed to a proper net on proper points. They are
/// disjoint in the reduct, so the Net axiom fails there.
pub fn net_violation_witness(a: &AffineReduct) -> Result<Option<NetViolation>> {
    a.require_nondegenerate_level2()?;
    let top = |l: usize| a.top(l);
    for (c, members) in a.classes().iter().enumerate() {
        let e = a.class_point(c);
        if a.ambient().point(e).support_len() != 2 {
            continue;
        }
        for &l3 in members {
            for &k3 in members {
                if top(l3) >= top(k3) {
                    continue;
                }
                if let Some(q) = complete_to_net(a, &top, l3, k3) {
                    let amb = a.ambient().structure();
                    let meet = amb.meet(a.parent(l3), a.parent(k3));
                    if a.structure().lines_meet(l3, k3) || meet != Some(e) {
                        return Err(GeomError::Falsified(
                            "witness lines are not disjoint through H".into(),
                        ));
                    }
                    return Ok(Some(NetViolation {
                        witness: NetWitness {
                            quadrangle: q,
                            l3,
                            k3,
                        },
                        deleted_point: e,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// `∥_H` from reduct incidence alone: inside one top it is `∥°`; across
/// tops, disjoint lines are parallel when they complete to a proper net.
pub fn definable_parallel(a: &AffineReduct, top_of: &[usize], l1: usize, l2: usize) -> bool {
    if l1 == l2 {
        return true;
    }
    if a.meets().meet(l1, l2) {
        return false;
    }
    if top_of[l1] == top_of[l2] {
        return a.veblen_parallel(l1, l2);
    }
    let top = |l: usize| top_of[l];
    complete_to_net(a, &top, l1, l2).is_some()
}

#[derive(Debug, Clone, Serialize)]
pub struct ParallelDefinability {
    pub parallel_pairs: usize,
    pub non_parallel_pairs: usize,
    pub mismatches: Vec<(usize, usize)>,
    pub seed: u64,
}

/// Compares [`definable_parallel`] with `∥_H` on every parallel pair and on
/// a seeded sample of disjoint non-parallel pairs.
pub fn verify_parallel_definability(
    a: &AffineReduct,
    sample: usize,
    seed: u64,
) -> Result<ParallelDefinability> {
    a.require_nondegenerate_level2()?;
    let (_, top_of) = reduct_tops(a)?;
    let mut mismatches = Vec::new();
    let mut parallel_pairs = 0;
    for c in a.classes() {
        for (i, &l1) in c.iter().enumerate() {
            for &l2 in &c[i + 1..] {
                parallel_pairs += 1;
                if !definable_parallel(a, &top_of, l1, l2) {
                    mismatches.push((l1, l2));
                }
            }
        }
    }
    let b = a.line_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines: Vec<usize> = (0..b).collect();
    let mut non_parallel_pairs = 0;
    let mut attempts = 0;
    while non_parallel_pairs < sample && attempts < sample * 50 {
        attempts += 1;
        let (l1, l2) = match lines.choose_multiple(&mut rng, 2).collect::<Vec<_>>()[..] {
            [&x, &y] => (x, y),
            _ => break,
        };
        if a.parallel(l1, l2) || a.meets().meet(l1, l2) {
            continue;
        }
        non_parallel_pairs += 1;
        if definable_parallel(a, &top_of, l1, l2) {
            mismatches.push((l1, l2));
        }
    }
    Ok(ParallelDefinability {
        parallel_pairs,
        non_parallel_pairs,
        mismatches,
        seed,
    })
}

#[derive(Debug, Clone)]
pub struct GammaReport {
    pub classes: Vec<PointSet>,
    pub expected: Vec<PointSet>,
    pub equal: bool,
}

/// γ-classes (planes chained through shared lines, as point unions)
/// compared with the expected leaves. Points on no plane are left out of
/// the comparison.
pub fn gamma_leaf_recovery(
    g: &IncidenceStructure,
    planes: &[PointSet],
    leaves: &[PointSet],
) -> Result<GammaReport> {
    let mut classes: Vec<PointSet> = crate::spaces::plane_chain_classes(g, planes)?
        .into_iter()
        .filter(|c| c.len() > 1 || planes.iter().any(|p| p.is_subset(c)))
        .collect();
    classes.sort();
    let mut expected: Vec<PointSet> = leaves.iter().filter(|l| !l.is_empty()).cloned().collect();
    expected.sort();
    expected.dedup();
    let equal = classes == expected;
    Ok(GammaReport {
        classes,
        expected,
        equal,
    })
}
