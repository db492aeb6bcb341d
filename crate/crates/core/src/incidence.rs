//! Incidence structures and partial linear spaces.
//!
//! Lines are stored as sorted point-index lists. Derived tables (lines through
//! each point, the line joining a pair, adjacency sets) are built on first use
//! and cached; a structure is immutable after construction.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::multiset::Multiset;
use crate::pointset::PointSet;

/// Minimum number of points on a line of a partial linear space.
pub const LINE_FLOOR: usize = 3;

/// Opaque point label: a multiset (Veronese points) or a coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Coords(Vec<u32>),
    Multiset(Multiset),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StructureFile {
    point_count: usize,
    lines: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<BTreeMap<usize, Label>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "StructureFile", into = "StructureFile")]
pub struct IncidenceStructure {
    point_count: usize,
    lines: Vec<Vec<usize>>,
    labels: Option<BTreeMap<usize, Label>>,
    point_lines: Vec<Vec<usize>>,
    pair_line: OnceLock<HashMap<(usize, usize), usize>>,
    adjacency: OnceLock<Vec<PointSet>>,
}

impl TryFrom<StructureFile> for IncidenceStructure {
    type Error = GeomError;

    fn try_from(f: StructureFile) -> Result<Self> {
        let mut s = IncidenceStructure::new(f.point_count, f.lines)?;
        s.labels = f.labels;
        Ok(s)
    }
}

impl From<IncidenceStructure> for StructureFile {
    fn from(s: IncidenceStructure) -> Self {
        StructureFile {
            point_count: s.point_count,
            lines: s.lines,
            labels: s.labels,
        }
    }
}

/// First violation of the partial-linear-space axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlsViolation {
    UndersizedLine {
        line: usize,
        size: usize,
    },
    TwoLinesThroughPair {
        points: (usize, usize),
        lines: (usize, usize),
    },
}

/// Why a point set fails to be a hyperplane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HyperplaneFailure {
    MissesLine(usize),
    NotSubspace(usize),
    Improper,
}

/// Enumeration strategy for [`IncidenceStructure::enumerate_hyperplanes`].
pub enum HyperplaneSearch<'a> {
    /// Every subset of the point set; at most 24 points.
    SubsetScan,
    /// Level-2 Veronese spaces: search over leaf traces.
    LeafTraces(&'a LeafTraceData),
}

/// Leaf decomposition of a level-2 Veronese space, used to drive the
/// leaf-trace hyperplane search.
#[derive(Debug, Clone)]
pub struct LeafTraceData {
    pub base: IncidenceStructure,
    /// `pair_point[x][y]` is the index of the point `x + y`.
    pub pair_point: Vec<Vec<usize>>,
}

pub const SUBSET_SCAN_LIMIT: usize = 24;

impl IncidenceStructure {
    /// Builds a structure; points inside each line are sorted and
    /// deduplicated. No axioms are enforced here.
    pub fn new(point_count: usize, lines: Vec<Vec<usize>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(lines.len());
        let mut point_lines = vec![Vec::new(); point_count];
        for (li, mut line) in lines.into_iter().enumerate() {
            line.sort_unstable();
            line.dedup();
            for &p in &line {
                if p >= point_count {
                    return Err(GeomError::PointOutOfRange {
                        index: p,
                        count: point_count,
                    });
                }
                point_lines[p].push(li);
            }
            clean.push(line);
        }
        Ok(IncidenceStructure {
            point_count,
            lines: clean,
            labels: None,
            point_lines,
            pair_line: OnceLock::new(),
            adjacency: OnceLock::new(),
        })
    }

    pub fn with_labels(mut self, labels: BTreeMap<usize, Label>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &[usize] {
        &self.lines[i]
    }

    pub fn labels(&self) -> Option<&BTreeMap<usize, Label>> {
        self.labels.as_ref()
    }

    pub fn label(&self, p: usize) -> Option<&Label> {
        self.labels.as_ref().and_then(|m| m.get(&p))
    }

    /// Indices of the lines through `p`.
    pub fn lines_through(&self, p: usize) -> &[usize] {
        &self.point_lines[p]
    }

    pub fn line_set(&self, i: usize) -> PointSet {
        PointSet::from_indices(self.point_count, self.lines[i].iter().copied())
    }

    pub fn all_points(&self) -> PointSet {
        PointSet::full(self.point_count)
    }

    fn pair_table(&self) -> &HashMap<(usize, usize), usize> {
        self.pair_line.get_or_init(|| {
            let mut map = HashMap::new();
            for (li, line) in self.lines.iter().enumerate() {
                for (i, &a) in line.iter().enumerate() {
                    for &b in &line[i + 1..] {
                        map.entry((a, b)).or_insert(li);
                    }
                }
            }
            map
        })
    }

    /// The (first) line containing both points.
    pub fn line_through(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return None;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        self.pair_table().get(&key).copied()
    }

    /// A common point of two lines (the smallest one).
    pub fn meet(&self, l1: usize, l2: usize) -> Option<usize> {
        let (a, b) = (&self.lines[l1], &self.lines[l2]);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(a[i]),
            }
        }
        None
    }

    pub fn lines_meet(&self, l1: usize, l2: usize) -> bool {
        self.meet(l1, l2).is_some()
    }

    pub fn on_line(&self, p: usize, l: usize) -> bool {
        self.lines[l].binary_search(&p).is_ok()
    }

    /// Index of the line with exactly this point set, if any.
    pub fn find_line(&self, points: &[usize]) -> Option<usize> {
        let mut sorted = points.to_vec();
        sorted.sort_unstable();
        if sorted.len() < 2 {
            return None;
        }
        let l = self.line_through(sorted[0], sorted[1])?;
        (self.lines[l] == sorted).then_some(l)
    }

    /// Checks both partial-linear-space conditions; returns the first violation
    /// (undersized lines by index, then the lexicographically first point pair
    /// covered by two lines).
    pub fn pls_violation(&self) -> Option<PlsViolation> {
        for (li, line) in self.lines.iter().enumerate() {
            if line.len() < LINE_FLOOR {
                return Some(PlsViolation::UndersizedLine {
                    line: li,
                    size: line.len(),
                });
            }
        }
        let mut first: HashMap<(usize, usize), usize> = HashMap::new();
        let mut worst: Option<((usize, usize), (usize, usize))> = None;
        for (li, line) in self.lines.iter().enumerate() {
            for (i, &a) in line.iter().enumerate() {
                for &b in &line[i + 1..] {
                    if let Some(&prev) = first.get(&(a, b)) {
                        let cand = ((a, b), (prev, li));
                        if worst.is_none_or(|w| cand < w) {
                            worst = Some(cand);
                        }
                    } else {
                        first.insert((a, b), li);
                    }
                }
            }
        }
        worst.map(|(points, lines)| PlsViolation::TwoLinesThroughPair { points, lines })
    }

    pub fn is_partial_linear(&self) -> bool {
        self.pls_violation().is_none()
    }

    /// `adjacency()[p]` is the set of points joined to `p` by a line (excluding `p`).
    pub fn adjacency(&self) -> &[PointSet] {
        self.adjacency.get_or_init(|| {
            let mut adj = vec![PointSet::empty(self.point_count); self.point_count];
            for line in &self.lines {
                for &a in line {
                    for &b in line {
                        if a != b {
                            adj[a].insert(b);
                        }
                    }
                }
            }
            adj
        })
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.line_through(a, b).is_some()
    }

    pub fn is_connected(&self) -> bool {
        if self.point_count <= 1 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = PointSet::empty(self.point_count);
        let mut queue = VecDeque::from([0usize]);
        seen.insert(0);
        while let Some(p) = queue.pop_front() {
            for q in adj[p].iter() {
                if seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        seen.is_full()
    }

    /// Least subspace containing `x`: repeatedly adds every line that meets
    /// the current set in at least two points.
    pub fn subspace_closure(&self, x: &PointSet) -> PointSet {
        let mut out = x.clone();
        let mut queue: VecDeque<usize> = x.iter().collect();
        while let Some(p) = queue.pop_front() {
            for &l in &self.point_lines[p] {
                let line = &self.lines[l];
                if out.count_in(line) >= 2 {
                    for &q in line {
                        if out.insert(q) {
                            queue.push_back(q);
                        }
                    }
                }
            }
        }
        out
    }

    /// First line meeting `x` in at least two but not all of its points.
    pub fn subspace_violation(&self, x: &PointSet) -> Option<usize> {
        self.lines.iter().position(|line| {
            let c = x.count_in(line);
            c >= 2 && c < line.len()
        })
    }

    pub fn is_subspace(&self, x: &PointSet) -> bool {
        self.subspace_violation(x).is_none()
    }

    fn is_clique(&self, x: &PointSet) -> bool {
        let adj = self.adjacency();
        x.iter().all(|p| {
            let mut rest = x.clone();
            rest.remove(p);
            rest.is_subset(&adj[p])
        })
    }

    pub fn is_strong(&self, x: &PointSet) -> bool {
        self.is_subspace(x) && self.is_clique(x)
    }

    /// All inclusion-maximal strong subspaces that contain at least one line,
    /// sorted by their smallest points.
    pub fn maximal_strong_subspaces(&self) -> Vec<PointSet> {
        let adj = self.adjacency();
        let mut seen: HashSet<PointSet> = HashSet::new();
        let mut maximal: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut stack: Vec<PointSet> = (0..self.lines.len())
            .rev()
            .map(|l| self.subspace_closure(&self.line_set(l)))
            .collect();
        while let Some(x) = stack.pop() {
            if seen.contains(&x) || !self.is_clique(&x) {
                continue;
            }
            seen.insert(x.clone());
            let mut candidates = PointSet::full(self.point_count);
            for p in x.iter() {
                candidates.intersect_with(&adj[p]);
            }
            candidates.difference_with(&x);
            let mut extended = false;
            let mut covered = PointSet::empty(self.point_count);
            for p in candidates.iter() {
                if covered.contains(p) {
                    extended = true;
                    continue;
                }
                let mut y = x.clone();
                y.insert(p);
                let y = self.subspace_closure(&y);
                if self.is_clique(&y) {
                    extended = true;
                    covered.union_with(&y);
                    if !seen.contains(&y) {
                        stack.push(y);
                    }
                }
            }
            if !extended {
                maximal.insert(x.to_vec());
            }
        }
        maximal
            .into_iter()
            .map(|v| PointSet::from_indices(self.point_count, v))
            .collect()
    }

    /// First line disjoint from `x`.
    pub fn transversal_violation(&self, x: &PointSet) -> Option<usize> {
        self.lines
            .iter()
            .position(|line| line.iter().all(|&p| !x.contains(p)))
    }

    pub fn is_l_transversal(&self, x: &PointSet) -> bool {
        self.transversal_violation(x).is_none()
    }

    pub fn hyperplane_failure(&self, x: &PointSet) -> Option<HyperplaneFailure> {
        if let Some(l) = self.transversal_violation(x) {
            return Some(HyperplaneFailure::MissesLine(l));
        }
        if let Some(l) = self.subspace_violation(x) {
            return Some(HyperplaneFailure::NotSubspace(l));
        }
        if x.len() == self.point_count {
            return Some(HyperplaneFailure::Improper);
        }
        None
    }

    pub fn is_hyperplane(&self, x: &PointSet) -> bool {
        self.hyperplane_failure(x).is_none()
    }

    /// `Ok(())` when every point of `x` lies on a line not contained in `x`;
    /// otherwise the first point for which this fails.
    pub fn spiky_witness(&self, x: &PointSet) -> Option<usize> {
        x.iter().find(|&p| {
            self.point_lines[p]
                .iter()
                .all(|&l| self.lines[l].iter().all(|&q| x.contains(q)))
        })
    }

    pub fn is_spiky(&self, x: &PointSet) -> bool {
        self.spiky_witness(x).is_none()
    }

    /// Flappiness relative to a supplied plane family. Returns `Ok(None)` when
    /// every line inside `x` lies in a plane not contained in `x`, or
    /// `Ok(Some(line))` naming the first line for which no such plane exists.
    pub fn flappy_witness(&self, x: &PointSet, planes: &[PointSet]) -> Result<Option<usize>> {
        let inner: Vec<usize> = (0..self.lines.len())
            .filter(|&l| self.lines[l].iter().all(|&q| x.contains(q)))
            .collect();
        if inner.is_empty() {
            return Ok(None);
        }
        if planes.is_empty() {
            return Err(GeomError::Indeterminate(
                "flappiness needs a non-empty plane family".into(),
            ));
        }
        for l in inner {
            let line = self.line_set(l);
            let ok = planes
                .iter()
                .any(|pl| line.is_subset(pl) && !pl.is_subset(x));
            if !ok {
                return Ok(Some(l));
            }
        }
        Ok(None)
    }

    pub fn is_flappy(&self, x: &PointSet, planes: &[PointSet]) -> Result<bool> {
        Ok(self.flappy_witness(x, planes)?.is_none())
    }

    /// The substructure on `points`, keeping exactly the lines fully inside.
    /// Returns the structure and the old index of each new point.
    pub fn restrict(&self, points: &PointSet) -> (IncidenceStructure, Vec<usize>) {
        let old: Vec<usize> = points.iter().collect();
        let mut new_index = vec![usize::MAX; self.point_count];
        for (i, &p) in old.iter().enumerate() {
            new_index[p] = i;
        }
        let lines: Vec<Vec<usize>> = self
            .lines
            .iter()
            .filter(|line| line.iter().all(|&p| points.contains(p)))
            .map(|line| line.iter().map(|&p| new_index[p]).collect())
            .collect();
        let mut s = IncidenceStructure::new(old.len(), lines).expect("indices remapped in range");
        if let Some(labels) = &self.labels {
            let relabeled = old
                .iter()
                .enumerate()
                .filter_map(|(i, p)| labels.get(p).map(|l| (i, l.clone())))
                .collect();
            s.labels = Some(relabeled);
        }
        (s, old)
    }

    /// All hyperplanes, in a deterministic order (sorted point lists).
    pub fn enumerate_hyperplanes(&self, mode: HyperplaneSearch<'_>) -> Result<Vec<PointSet>> {
        match mode {
            HyperplaneSearch::SubsetScan => {
                let masks = self.subset_scan_masks()?;
                Ok(masks
                    .into_iter()
                    .map(|m| PointSet::from_indices(self.point_count, bits(m)))
                    .collect())
            }
            HyperplaneSearch::LeafTraces(data) => leaf_trace_search(self, data),
        }
    }

    fn subset_scan_masks(&self) -> Result<Vec<u32>> {
        let n = self.point_count;
        if n > SUBSET_SCAN_LIMIT {
            return Err(GeomError::Capacity(format!(
                "subset scan limited to {SUBSET_SCAN_LIMIT} points, structure has {n}"
            )));
        }
        let line_masks: Vec<u32> = self
            .lines
            .iter()
            .map(|l| l.iter().fold(0u32, |m, &p| m | (1 << p)))
            .collect();
        let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut out = Vec::new();
        for x in 0..full {
            let ok = line_masks.iter().all(|&lm| {
                let inter = x & lm;
                inter != 0 && (inter.count_ones() < 2 || inter == lm)
            });
            if ok {
                out.push(x);
            }
        }
        out.sort_by_key(|&m| bits(m).collect::<Vec<_>>());
        Ok(out)
    }
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

/// Backtracking over `h(x)` for every base point `x`, each either the full
/// base or a base hyperplane, subject to the symmetry `y ∈ h(x) ⇔ x ∈ h(y)`.
fn leaf_trace_search(space: &IncidenceStructure, data: &LeafTraceData) -> Result<Vec<PointSet>> {
    let base = &data.base;
    let n = base.point_count();
    let mut options: Vec<u32> = base.subset_scan_masks()?;
    let full: u32 = (1u32 << n) - 1;
    options.insert(0, full);
    let base_subspaces: HashSet<u32> = options.iter().copied().collect();

    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut choice = vec![0u32; n];

    fn rec(
        i: usize,
        n: usize,
        options: &[u32],
        choice: &mut Vec<u32>,
        base_subspaces: &HashSet<u32>,
        space: &IncidenceStructure,
        data: &LeafTraceData,
        found: &mut Vec<Vec<usize>>,
    ) {
        if i == n {
            let diagonal = (0..n).fold(0u32, |m, x| {
                if choice[x] & (1 << x) != 0 {
                    m | (1 << x)
                } else {
                    m
                }
            });
            if !base_subspaces.contains(&diagonal) {
                return;
            }
            let mut h = PointSet::empty(space.point_count());
            for x in 0..n {
                for y in x..n {
                    if choice[x] & (1 << y) != 0 {
                        h.insert(data.pair_point[x][y]);
                    }
                }
            }
            if space.is_hyperplane(&h) {
                found.push(h.to_vec());
            }
            return;
        }
        let low: u32 = (1u32 << i) - 1;
        let required = (0..i).fold(0u32, |m, j| {
            if choice[j] & (1 << i) != 0 {
                m | (1 << j)
            } else {
                m
            }
        });
        for &opt in options {
            if opt & low == required {
                choice[i] = opt;
                rec(
                    i + 1,
                    n,
                    options,
                    choice,
                    base_subspaces,
                    space,
                    data,
                    found,
                );
            }
        }
    }

    rec(
        0,
        n,
        &options,
        &mut choice,
        &base_subspaces,
        space,
        data,
        &mut found,
    );
    found.sort();
    Ok(found
        .into_iter()
        .map(|v| PointSet::from_indices(space.point_count(), v))
        .collect())
}
