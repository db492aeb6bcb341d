//! Veblen and Net configurations, their classification inside level-2
//! Veronese spaces, and the affine closure conditions (Tamaschke,
//! parallelogram completion).
//!
//! Meeting and crossing are always computed on point sets. Block
//! provenance is only consulted by the classifiers.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::incidence::IncidenceStructure;
use crate::pointset::PointSet;
use crate::veronese::{BlockOrigin, VeroneseSpace};

/// Scans are exhaustive up to `exhaustive_limit` points; above that only
/// apex points drawn per stratum (points grouped by line degree and
/// neighbourhood size) are used.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanBudget {
    pub exhaustive_limit: usize,
    pub per_stratum: usize,
    pub seed: u64,
}

impl Default for ScanBudget {
    fn default() -> Self {
        ScanBudget {
            exhaustive_limit: 200,
            per_stratum: 12,
            seed: 0x5eed,
        }
    }
}

impl ScanBudget {
    pub fn exhaustive() -> Self {
        ScanBudget {
            exhaustive_limit: usize::MAX,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub lines_through: usize,
    pub neighbours: usize,
    pub size: usize,
    pub sampled: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanPlan {
    pub exhaustive: bool,
    pub seed: u64,
    pub strata: Vec<Stratum>,
}

impl ScanPlan {
    pub fn new(g: &IncidenceStructure, budget: ScanBudget) -> Self {
        let n = g.point_count();
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for p in 0..n {
            groups
                .entry((g.lines_through(p).len(), g.adjacency()[p].len()))
                .or_default()
                .push(p);
        }
        let exhaustive = n <= budget.exhaustive_limit;
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let strata = groups
            .into_iter()
            .map(|((lines_through, neighbours), pts)| {
                let size = pts.len();
                let sampled = if exhaustive {
                    pts
                } else {
                    let mut s: Vec<usize> = pts
                        .choose_multiple(&mut rng, budget.per_stratum.min(size))
                        .copied()
                        .collect();
                    s.sort_unstable();
                    s
                };
                Stratum {
                    lines_through,
                    neighbours,
                    size,
                    sampled,
                }
            })
            .collect();
        ScanPlan {
            exhaustive,
            seed: budget.seed,
            strata,
        }
    }

    pub fn apexes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .strata
            .iter()
            .flat_map(|s| s.sampled.iter().copied())
            .collect();
        v.sort_unstable();
        v
    }
}

/// For every line, the sorted list of other lines it meets.
#[derive(Debug, Clone)]
pub struct MeetTable(Vec<Vec<usize>>);

impl MeetTable {
    pub fn new(g: &IncidenceStructure) -> Self {
        let sets = (0..g.line_count())
            .map(|l| {
                let mut v: Vec<usize> = g
                    .line(l)
                    .iter()
                    .flat_map(|&p| g.lines_through(p).iter().copied())
                    .filter(|&m| m != l)
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        MeetTable(sets)
    }

    /// Lines `l` and `m` are equal or share a point.
    pub fn meet(&self, l: usize, m: usize) -> bool {
        l == m || self.0[l].binary_search(&m).is_ok()
    }

    /// Lines distinct from `l` that meet it.
    pub fn crossers(&self, l: usize) -> &[usize] {
        &self.0[l]
    }

    /// Lines distinct from both that meet both.
    pub fn common_crossers(&self, l: usize, m: usize) -> Vec<usize> {
        let (a, b) = (&self.0[l], &self.0[m]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if a[i] != l && a[i] != m {
                        out.push(a[i]);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------- Veblen

/// Apex `p`, lines `L₁ ∋ a₁, a₂` and `L₂ ∋ b₁, b₂` through `p`, and
/// `M₁ = a₁b₁`, `M₂ = a₂b₂`. Canonical when `l1 < l2` and `(a1,b1) < (a2,b2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VeblenFigure {
    pub apex: usize,
    pub l1: usize,
    pub l2: usize,
    pub m1: usize,
    pub m2: usize,
    pub a1: usize,
    pub b1: usize,
    pub a2: usize,
    pub b2: usize,
    pub complete: bool,
}

/// All canonical Veblen figures with the given apex.
pub fn veblen_figures_at(g: &IncidenceStructure, apex: usize) -> Vec<VeblenFigure> {
    let mut out = Vec::new();
    let through = g.lines_through(apex);
    for (i, &l1) in through.iter().enumerate() {
        for &l2 in &through[i + 1..] {
            let xs: Vec<usize> = g.line(l1).iter().copied().filter(|&x| x != apex).collect();
            let ys: Vec<usize> = g.line(l2).iter().copied().filter(|&y| y != apex).collect();
            let mut joins = Vec::new();
            for &a in &xs {
                for &b in &ys {
                    if let Some(m) = g.line_through(a, b) {
                        joins.push((a, b, m));
                    }
                }
            }
            for (s, &(a1, b1, m1)) in joins.iter().enumerate() {
                for &(a2, b2, m2) in &joins[s + 1..] {
                    if a1 == a2 || b1 == b2 {
                        continue;
                    }
                    out.push(VeblenFigure {
                        apex,
                        l1,
                        l2,
                        m1,
                        m2,
                        a1,
                        b1,
                        a2,
                        b2,
                        complete: g.lines_meet(m1, m2),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct VeblenReport {
    pub figures: u64,
    pub incomplete: u64,
    pub witness: Option<VeblenFigure>,
    pub plan: ScanPlan,
}

impl VeblenReport {
    pub fn holds(&self) -> bool {
        self.incomplete == 0
    }
}

/// The Veblen condition: every figure has `M₁ ∼ M₂`.
pub fn check_veblen_axiom(g: &IncidenceStructure, budget: ScanBudget) -> VeblenReport {
    let plan = ScanPlan::new(g, budget);
    let mut figures = 0;
    let mut incomplete = 0;
    let mut witness = None;
    for p in plan.apexes() {
        for f in veblen_figures_at(g, p) {
            figures += 1;
            if !f.complete {
                incomplete += 1;
                witness.get_or_insert(f);
            }
        }
    }
    VeblenReport {
        figures,
        incomplete,
        witness,
        plan,
    }
}

pub fn find_incomplete_veblen(g: &IncidenceStructure, budget: ScanBudget) -> Vec<VeblenFigure> {
    ScanPlan::new(g, budget)
        .apexes()
        .into_iter()
        .flat_map(|p| veblen_figures_at(g, p))
        .filter(|f| !f.complete)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VeblenType {
    /// All four lines in one leaf: image of a base configuration.
    BaseEmbedded,
    /// `{a + m : a ∈ A}`, `A` a 4-subset of the line `m`.
    FourPointTranslate,
    /// `{a + m : a ∈ A} ∪ {2m}`, `A` a 3-subset of `m`.
    ThreePointWith2m,
    Unclassifiable,
}

fn origin(v: &VeroneseSpace, b: usize) -> &BlockOrigin {
    &v.block_origins(b)[0]
}

fn single_point(o: &BlockOrigin) -> Option<usize> {
    match o.e.entries() {
        [(x, 1)] => Some(*x),
        _ => None,
    }
}

/// Classifies a complete Veblen figure of a level-2 Veronese space by the
/// provenance of its four blocks.
pub fn classify_veblen_in_veronese(v: &VeroneseSpace, f: &VeblenFigure) -> VeblenType {
    let lines = [f.l1, f.l2, f.m1, f.m2];
    let leaf = v.block_leaf(lines[0]);
    if lines.iter().all(|&l| v.block_leaf(l) == leaf) {
        return VeblenType::BaseEmbedded;
    }
    let os: Vec<&BlockOrigin> = lines.iter().map(|&l| origin(v, l)).collect();
    let m = os[0].base_line;
    if os.iter().any(|o| o.base_line != m) {
        return VeblenType::Unclassifiable;
    }
    let on_m = |x: usize| v.base().on_line(x, m);
    let translates: Vec<usize> = os
        .iter()
        .filter(|o| o.r == 1)
        .filter_map(|o| single_point(o))
        .collect();
    let doubles = os.iter().filter(|o| o.r == 2 && o.e.is_empty()).count();
    let distinct = {
        let mut t = translates.clone();
        t.sort_unstable();
        t.dedup();
        t.len() == translates.len()
    };
    if !distinct || !translates.iter().all(|&x| on_m(x)) {
        return VeblenType::Unclassifiable;
    }
    match (translates.len(), doubles) {
        (4, 0) => VeblenType::FourPointTranslate,
        (3, 1) => VeblenType::ThreePointWith2m,
        _ => VeblenType::Unclassifiable,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VeblenCensus {
    pub figures: u64,
    pub incomplete: u64,
    pub by_type: BTreeMap<VeblenType, u64>,
    pub plan: ScanPlan,
}

impl VeblenCensus {
    pub fn count(&self, t: VeblenType) -> u64 {
        self.by_type.get(&t).copied().unwrap_or(0)
    }
}

/// Classifies every complete Veblen figure of a level-2 Veronese space.
pub fn veblen_census(v: &VeroneseSpace, budget: ScanBudget) -> VeblenCensus {
    let g = v.structure();
    let plan = ScanPlan::new(g, budget);
    let mut by_type = BTreeMap::new();
    let mut figures = 0;
    let mut incomplete = 0;
    for p in plan.apexes() {
        for f in veblen_figures_at(g, p) {
            figures += 1;
            if f.complete {
                *by_type
                    .entry(classify_veblen_in_veronese(v, &f))
                    .or_insert(0) += 1;
            } else {
                incomplete += 1;
            }
        }
    }
    VeblenCensus {
        figures,
        incomplete,
        by_type,
        plan,
    }
}

// ------------------------------------------------- Veblen parallelism

/// Transversals `(T, T ∩ l1, T ∩ l2)` of two disjoint lines.
fn transversals(
    g: &IncidenceStructure,
    meets: &MeetTable,
    l1: usize,
    l2: usize,
) -> Vec<(usize, usize, usize)> {
    meets
        .common_crossers(l1, l2)
        .into_iter()
        .map(|t| {
            (
                t,
                g.meet(t, l1).expect("crosser"),
                g.meet(t, l2).expect("crosser"),
            )
        })
        .collect()
}

fn veblen_from_records(g: &IncidenceStructure, recs: &[(usize, usize, usize)]) -> bool {
    let adj = g.adjacency();
    for (i, &(t1, u1, w1)) in recs.iter().enumerate() {
        for &(t2, u2, w2) in &recs[i + 1..] {
            if t1 == t2 {
                continue;
            }
            let Some(p) = g.meet(t1, t2) else { continue };
            if p == u1 || p == w1 || p == u2 || p == w2 {
                continue;
            }
            if adj[u1].contains(w2) || adj[u2].contains(w1) {
                return true;
            }
        }
    }
    false
}

/// `L₁ ∥° L₂`: equal, or disjoint with two lines `L′, L″` through a point
/// off both, each crossing both, and collinear `a₁ ∈ L₁ ∩ L′`, `a₂ ∈ L₂ ∩ L″`.
pub fn veblen_parallel(g: &IncidenceStructure, meets: &MeetTable, l1: usize, l2: usize) -> bool {
    if l1 == l2 {
        return true;
    }
    if meets.meet(l1, l2) {
        return false;
    }
    veblen_from_records(g, &transversals(g, meets, l1, l2))
}

/// The whole relation `∥°`, computed line by line from transversal
/// records, with its classes and a transitivity check.
pub fn veblen_classes(g: &IncidenceStructure, meets: &MeetTable) -> VeblenClasses {
    let b = g.line_count();
    let mut related: Vec<Vec<usize>> = vec![Vec::new(); b];
    for l1 in 0..b {
        let mut recs: HashMap<usize, Vec<(usize, usize, usize)>> = HashMap::new();
        for &t in meets.crossers(l1) {
            let u = g.meet(t, l1).expect("crosser");
            for &w in g.line(t).iter().filter(|&&w| w != u) {
                for &l2 in g.lines_through(w) {
                    if l2 != t && l2 > l1 && !meets.meet(l1, l2) {
                        recs.entry(l2).or_default().push((t, u, w));
                    }
                }
            }
        }
        let mut hits: Vec<usize> = recs
            .into_iter()
            .filter(|(_, r)| r.len() >= 2 && veblen_from_records(g, r))
            .map(|(l2, _)| l2)
            .collect();
        hits.sort_unstable();
        for l2 in hits {
            related[l1].push(l2);
            related[l2].push(l1);
        }
    }
    let mut class_of = vec![usize::MAX; b];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for s in 0..b {
        if class_of[s] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut comp = vec![s];
        class_of[s] = id;
        let mut i = 0;
        while i < comp.len() {
            for &m in &related[comp[i]] {
                if class_of[m] == usize::MAX {
                    class_of[m] = id;
                    comp.push(m);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        classes.push(comp);
    }
    let transitive = classes
        .iter()
        .all(|c| c.iter().all(|&l| related[l].len() + 1 == c.len()));
    VeblenClasses {
        class_of,
        classes,
        transitive,
    }
}

#[derive(Debug, Clone)]
pub struct VeblenClasses {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    /// Every two members of a class are related (the relation is an equivalence).
    pub transitive: bool,
}

// ---------------------------------------------------------- quadrangles

/// Vertices `v₀..v₃` with `vᵢ ∼ vᵢ₊₁`, `vᵢ ≁ vᵢ₊₂`; `sides[i]` joins
/// `vᵢ` and `vᵢ₊₁`. Canonical when `v₀` is the least vertex and `v₁ < v₃`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Quadrangle {
    pub vertices: [usize; 4],
    pub sides: [usize; 4],
}

/// Canonical quadrangles (no diagonals) whose least vertex is `v0`.
pub fn quadrangles_at(g: &IncidenceStructure, v0: usize) -> Vec<Quadrangle> {
    let adj = g.adjacency();
    let mut out = Vec::new();
    let nb: Vec<usize> = adj[v0].iter().filter(|&x| x > v0).collect();
    for (i, &v1) in nb.iter().enumerate() {
        for &v3 in &nb[i + 1..] {
            if adj[v1].contains(v3) {
                continue;
            }
            for v2 in adj[v1].iter() {
                if v2 <= v0 || v2 == v3 || !adj[v3].contains(v2) || adj[v0].contains(v2) {
                    continue;
                }
                let vs = [v0, v1, v2, v3];
                let sides =
                    [0, 1, 2, 3].map(|k| g.line_through(vs[k], vs[(k + 1) % 4]).expect("adjacent"));
                out.push(Quadrangle {
                    vertices: vs,
                    sides,
                });
            }
        }
    }
    out
}

/// The four sides lie in pairwise distinct leaves (tops).
pub fn is_proper(q: &Quadrangle, top: &dyn Fn(usize) -> usize) -> bool {
    let t = q.sides.map(top);
    (0..4).all(|i| (i + 1..4).all(|j| t[i] != t[j]))
}

pub fn proper_quadrangles(v: &VeroneseSpace) -> Vec<Quadrangle> {
    let top = |b: usize| v.block_leaf(b);
    (0..v.point_count())
        .flat_map(|p| quadrangles_at(v.structure(), p))
        .filter(|q| is_proper(q, &top))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QuadrangleType {
    /// `a₁+m, b₁+m` opposite `a₂+n, b₂+n`.
    TwoLine,
    /// `2n, c+n` opposite `a+m, b+l`.
    ThreeLine,
    Unclassifiable,
}

fn pair(v: &VeroneseSpace, x: usize, y: usize) -> usize {
    v.index_of(&crate::Multiset::from_points([x, y]))
        .expect("level 2")
}

fn same_vertices(v: &VeroneseSpace, q: &Quadrangle, expected: [(usize, usize); 4]) -> bool {
    let mut want: Vec<usize> = expected.iter().map(|&(x, y)| pair(v, x, y)).collect();
    let mut got = q.vertices.to_vec();
    want.sort_unstable();
    got.sort_unstable();
    want == got
}

/// Classifies a proper quadrangle of a level-2 Veronese space over a linear
/// space and checks its vertices against the expected lists.
pub fn classify_proper_quadrangle(v: &VeroneseSpace, q: &Quadrangle) -> QuadrangleType {
    if v.level() != 2 {
        return QuadrangleType::Unclassifiable;
    }
    let base = v.base();
    let os = q.sides.map(|s| origin(v, s).clone());
    // Try both choices of which opposite pair plays (L₁, L₂).
    for shift in [0, 1] {
        let (l1, k1, l2, k2) = (
            &os[shift],
            &os[shift + 1],
            &os[shift + 2],
            &os[(shift + 3) % 4],
        );
        if [l1, k1, l2, k2].iter().all(|o| o.r == 1)
            && l1.base_line == l2.base_line
            && k1.base_line == k2.base_line
        {
            let (m, n) = (l1.base_line, k1.base_line);
            let pts = [l1, l2, k1, k2].map(|o| single_point(o));
            if let [Some(a1), Some(b1), Some(a2), Some(b2)] = pts {
                if base.on_line(a1, n)
                    && base.on_line(b1, n)
                    && base.on_line(a2, m)
                    && base.on_line(b2, m)
                    && same_vertices(v, q, [(a1, a2), (a1, b2), (a2, b1), (b1, b2)])
                {
                    return QuadrangleType::TwoLine;
                }
            }
        }
    }
    for (ki, _) in os.iter().enumerate().filter(|(_, o)| o.r == 2) {
        let k1 = &os[ki];
        let k2 = &os[(ki + 2) % 4];
        let (la, lb) = (&os[(ki + 1) % 4], &os[(ki + 3) % 4]);
        let n = k1.base_line;
        let (Some(c), Some(x), Some(y)) = (single_point(k2), single_point(la), single_point(lb))
        else {
            continue;
        };
        if k2.r != 1 || k2.base_line != n || la.r != 1 || lb.r != 1 {
            continue;
        }
        // `a + m` with a, c ∈ m and `b + l` with b, c ∈ l.
        let (m, l) = (la.base_line, lb.base_line);
        if base.on_line(x, n)
            && base.on_line(y, n)
            && base.on_line(x, m)
            && base.on_line(c, m)
            && base.on_line(y, l)
            && base.on_line(c, l)
            && same_vertices(v, q, [(x, x), (x, c), (y, y), (y, c)])
        {
            return QuadrangleType::ThreeLine;
        }
    }
    QuadrangleType::Unclassifiable
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CrossingCase {
    /// `L₁ = a+m`, `L₂ = b+m`; `K = x + L(a,b)` with `x ∈ m`, or `K = 2m`.
    SameBase,
    /// `L₁ = 2n`, `L₂ = c+n`; `K = x + L(x,c)` with `x ∈ n \ {c}`.
    DoubleAndTranslate,
    /// `L₁ = a+m₁`, `L₂ = b+m₂`, `m₁ ∩ m₂ = {c}`; `K = 2L(a,b)` or `c + L(a,b)`.
    DistinctBases,
    Unclassifiable,
}

/// Classifies a block `K` crossing the opposite sides `l1`, `l2` of a proper
/// quadrangle, by provenance.
pub fn classify_crossing_line(v: &VeroneseSpace, l1: usize, l2: usize, k: usize) -> CrossingCase {
    let base = v.base();
    let (o1, o2, ok) = (origin(v, l1), origin(v, l2), origin(v, k));
    let k_single = single_point(ok);
    // Case (2), either order.
    for (d, t) in [(o1, o2), (o2, o1)] {
        if d.r == 2 && t.r == 1 && d.base_line == t.base_line {
            let n = d.base_line;
            if let (Some(c), Some(x)) = (single_point(t), k_single) {
                if ok.r == 1
                    && x != c
                    && base.on_line(x, n)
                    && base.line_through(x, c) == Some(ok.base_line)
                {
                    return CrossingCase::DoubleAndTranslate;
                }
            }
            return CrossingCase::Unclassifiable;
        }
    }
    let (Some(a), Some(b)) = (single_point(o1), single_point(o2)) else {
        return CrossingCase::Unclassifiable;
    };
    if o1.r != 1 || o2.r != 1 || a == b {
        return CrossingCase::Unclassifiable;
    }
    let ab = base.line_through(a, b);
    if o1.base_line == o2.base_line {
        let m = o1.base_line;
        let translate =
            ok.r == 1 && Some(ok.base_line) == ab && k_single.is_some_and(|x| base.on_line(x, m));
        let double = ok.r == 2 && ok.base_line == m && base.on_line(a, m) && base.on_line(b, m);
        if translate || double {
            return CrossingCase::SameBase;
        }
        return CrossingCase::Unclassifiable;
    }
    let Some(c) = base.meet(o1.base_line, o2.base_line) else {
        return CrossingCase::Unclassifiable;
    };
    let on_ab = Some(ok.base_line) == ab;
    if on_ab && ((ok.r == 2) || (ok.r == 1 && k_single == Some(c))) {
        CrossingCase::DistinctBases
    } else {
        CrossingCase::Unclassifiable
    }
}

// ------------------------------------------------------------ Net axiom

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NetVariant {
    /// Every crosser of the opposite sides.
    Literal,
    /// Only crossers whose top differs from the tops of the sides they cross.
    DistinctTops,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetWitness {
    pub quadrangle: Quadrangle,
    /// Crosses sides 1 and 3.
    pub l3: usize,
    /// Crosses sides 0 and 2.
    pub k3: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NetReport {
    pub quadrangles: u64,
    pub pairs_checked: u64,
    pub witness: Option<NetWitness>,
    pub plan: ScanPlan,
}

impl NetReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks the Net axiom over proper quadrangles `L₁,K₁,L₂,K₂` (sides 0..3):
/// every `L₃` crossing `K₁, K₂` meets every `K₃` crossing `L₁, L₂`.
/// `top` assigns each line its leaf. Stops at the first violation.
pub fn check_net_axiom(
    g: &IncidenceStructure,
    top: &dyn Fn(usize) -> usize,
    variant: NetVariant,
    budget: ScanBudget,
) -> NetReport {
    let plan = ScanPlan::new(g, budget);
    let meets = MeetTable::new(g);
    let mut quadrangles = 0;
    let mut pairs_checked = 0;
    let crossers = |a: usize, b: usize| -> Vec<usize> {
        meets
            .common_crossers(a, b)
            .into_iter()
            .filter(|&x| variant == NetVariant::Literal || (top(x) != top(a) && top(x) != top(b)))
            .collect()
    };
    for p in plan.apexes() {
        for q in quadrangles_at(g, p) {
            if !is_proper(&q, top) {
                continue;
            }
            quadrangles += 1;
            let [l1, k1, l2, k2] = q.sides;
            let ls = crossers(k1, k2);
            let ks = crossers(l1, l2);
            for &l3 in &ls {
                for &k3 in &ks {
                    pairs_checked += 1;
                    if !meets.meet(l3, k3) {
                        return NetReport {
                            quadrangles,
                            pairs_checked,
                            witness: Some(NetWitness {
                                quadrangle: q,
                                l3,
                                k3,
                            }),
                            plan,
                        };
                    }
                }
            }
        }
    }
    NetReport {
        quadrangles,
        pairs_checked,
        witness: None,
        plan,
    }
}

// ------------------------------------------------- affine closure checks

/// A triangle `a, b, c` with a line `L ∥ ab`, `L ≠ ab`, meeting `bc` but not `ca`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TamaschkeWitness {
    pub triangle: [usize; 3],
    pub parallel: usize,
}

/// `L₁ ∥ L₂`, `K₁ ∥ K₂`, with `L₁K₁`, `L₁K₂`, `L₂K₁` meeting and `L₂K₂` disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParallelogramWitness {
    pub l1: usize,
    pub l2: usize,
    pub k1: usize,
    pub k2: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport<W> {
    pub instances: u64,
    pub witness: Option<W>,
    pub plan: ScanPlan,
}

impl<W> ClosureReport<W> {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

fn class_members(class_of: &[usize]) -> Vec<Vec<usize>> {
    let k = class_of.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); k];
    for (l, &c) in class_of.iter().enumerate() {
        out[c].push(l);
    }
    out
}

/// If a line parallel to one side of a triangle crosses a second side, it
/// crosses the third. Triangles are scanned by the vertex shared by the
/// first two sides.
pub fn check_tamaschke(
    g: &IncidenceStructure,
    class_of: &[usize],
    budget: ScanBudget,
) -> ClosureReport<TamaschkeWitness> {
    let plan = ScanPlan::new(g, budget);
    let meets = MeetTable::new(g);
    let members = class_members(class_of);
    let mut instances = 0;
    for b in plan.apexes() {
        for &s1 in g.lines_through(b) {
            for &s2 in g.lines_through(b) {
                if s1 == s2 {
                    continue;
                }
                for &a in g.line(s1).iter().filter(|&&a| a != b) {
                    for &c in g.line(s2).iter().filter(|&&c| c != b) {
                        let Some(s3) = g.line_through(a, c) else {
                            continue;
                        };
                        for &l in &members[class_of[s1]] {
                            if l == s1 || !meets.meet(l, s2) {
                                continue;
                            }
                            instances += 1;
                            if !meets.meet(l, s3) {
                                return ClosureReport {
                                    instances,
                                    witness: Some(TamaschkeWitness {
                                        triangle: [a, b, c],
                                        parallel: l,
                                    }),
                                    plan,
                                };
                            }
                        }
                    }
                }
            }
        }
    }
    ClosureReport {
        instances,
        witness: None,
        plan,
    }
}

/// Of two pairs of parallel lines, if three of the four cross intersections
/// exist then so does the fourth. `L₁` ranges over lines through the
/// planned apexes.
pub fn check_parallelogram_completion(
    g: &IncidenceStructure,
    class_of: &[usize],
    budget: ScanBudget,
) -> ClosureReport<ParallelogramWitness> {
    let plan = ScanPlan::new(g, budget);
    let meets = MeetTable::new(g);
    let members = class_members(class_of);
    let mut first = PointSet::empty(g.line_count());
    for p in plan.apexes() {
        for &l in g.lines_through(p) {
            first.insert(l);
        }
    }
    let mut instances = 0;
    for l1 in first.iter() {
        for &k1 in meets.crossers(l1) {
            if class_of[k1] == class_of[l1] {
                continue;
            }
            for &k2 in &members[class_of[k1]] {
                if k2 == k1 || !meets.meet(l1, k2) {
                    continue;
                }
                for &l2 in &members[class_of[l1]] {
                    if l2 == l1 || !meets.meet(l2, k1) {
                        continue;
                    }
                    instances += 1;
                    if !meets.meet(l2, k2) {
                        return ClosureReport {
                            instances,
                            witness: Some(ParallelogramWitness { l1, l2, k1, k2 }),
                            plan,
                        };
                    }
                }
            }
        }
    }
    ClosureReport {
        instances,
        witness: None,
        plan,
    }
}
