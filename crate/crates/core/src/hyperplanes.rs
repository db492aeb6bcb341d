//! Hyperplanes of Veronese spaces: leaf traces (h-functions), the
//! symplectic construction at level 2, the alternating-form construction at
//! level k, intersections with polar Veronesians, and the exhaustive
//! comparison of enumerated and constructed hyperplanes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlternatingMultiForm, BilinearForm, FiniteField, ProjectivePoint};
use crate::error::{GeomError, Result};
use crate::incidence::HyperplaneSearch;
use crate::pointset::PointSet;
use crate::spaces::{PolarSpace, ProjectiveSpace};
use crate::veronese::VeroneseSpace;

/// A leaf trace: the whole base (`Full`) or a proper subset of base points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trace {
    #[serde(rename = "FULL")]
    Full,
    #[serde(untagged)]
    Points(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct VeroneseHyperplane {
    pub points: PointSet,
    /// `h[leaf]` = base points `x` with `e + (k − |e|)x` in the hyperplane.
    pub h: Vec<PointSet>,
    /// Built from a form with nontrivial radical.
    pub degenerate: bool,
}

impl VeroneseHyperplane {
    pub fn traces(&self) -> Vec<Trace> {
        self.h
            .iter()
            .map(|t| {
                if t.is_full() {
                    Trace::Full
                } else {
                    Trace::Points(t.to_vec())
                }
            })
            .collect()
    }
}

/// `h(e) = {x : e + (k − |e|)x ∈ H}` for every leaf.
pub fn extract_h_function(v: &VeroneseSpace, h: &PointSet) -> Vec<PointSet> {
    let n = v.base().point_count();
    (0..v.leaf_count())
        .map(|leaf| {
            PointSet::from_indices(n, (0..n).filter(|&x| h.contains(v.leaf_point(leaf, x))))
        })
        .collect()
}

/// `⋃ e + (k − |e|)·h(e)` without any validation of the traces.
pub fn union_of_traces(v: &VeroneseSpace, traces: &[PointSet]) -> PointSet {
    let mut out = PointSet::empty(v.point_count());
    for (leaf, t) in traces.iter().enumerate() {
        for x in t.iter() {
            out.insert(v.leaf_point(leaf, x));
        }
    }
    out
}

/// The union of an h-function whose traces are all full or base
/// hyperplanes; the result is checked to meet every line.
pub fn l_transversal_from_h(v: &VeroneseSpace, traces: &[PointSet]) -> Result<PointSet> {
    if traces.len() != v.leaf_count() {
        return Err(GeomError::DimensionMismatch {
            expected: v.leaf_count(),
            got: traces.len(),
        });
    }
    for (leaf, t) in traces.iter().enumerate() {
        if !t.is_full() && !v.base().is_hyperplane(t) {
            return Err(GeomError::MalformedTrace(format!(
                "leaf {}",
                v.leaf_root(leaf)
            )));
        }
    }
    let h = union_of_traces(v, traces);
    if let Some(l) = v.structure().transversal_violation(&h) {
        return Err(GeomError::Falsified(format!(
            "union of traces misses line {l}"
        )));
    }
    Ok(h)
}

fn check_projective_base<F: FiniteField>(v: &VeroneseSpace, pg: &ProjectiveSpace<F>) -> Result<()> {
    if v.base().lines() != pg.structure().lines() {
        return Err(GeomError::MismatchedAmbient(
            "the Veronese base is not this projective space".into(),
        ));
    }
    Ok(())
}

fn require_odd<F: FiniteField>() -> Result<()> {
    if F::CHARACTERISTIC == 2 {
        return Err(GeomError::EvenCharacteristic(2));
    }
    Ok(())
}

fn verified(v: &VeroneseSpace, points: PointSet, degenerate: bool) -> Result<VeroneseHyperplane> {
    if let Some(f) = v.structure().hyperplane_failure(&points) {
        return Err(GeomError::Falsified(format!(
            "constructed set is not a hyperplane: {f:?}"
        )));
    }
    let h = extract_h_function(v, &points);
    Ok(VeroneseHyperplane {
        points,
        h,
        degenerate,
    })
}

/// `H = ⋃ {x + κ(x)} ∪ 2S` on `V(2, PG)` for a symplectic form.
pub fn hyperplane_from_symplectic<F: FiniteField>(
    v: &VeroneseSpace,
    pg: &ProjectiveSpace<F>,
    xi: &BilinearForm<F>,
) -> Result<VeroneseHyperplane> {
    require_odd::<F>()?;
    if v.level() != 2 {
        return Err(GeomError::Invalid(format!(
            "symplectic hyperplanes need level 2, got {}",
            v.level()
        )));
    }
    check_projective_base(v, pg)?;
    if xi.dim() != pg.vector_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: pg.vector_dim(),
            got: xi.dim(),
        });
    }
    if xi.is_zero() {
        return Err(GeomError::ZeroForm);
    }
    if !xi.is_symplectic() {
        return Err(GeomError::NotSymplectic);
    }
    let n = pg.points().len();
    let mut h = PointSet::empty(v.point_count());
    let two_s = v
        .leaf_of_root(&crate::Multiset::empty())
        .expect("level 2 has the leaf 2S");
    for x in 0..n {
        h.insert(v.leaf_point(two_s, x));
        for y in pg.quasi_correlation(xi, x)?.iter() {
            h.insert(
                v.index_of(&crate::Multiset::from_points([x, y]))
                    .expect("pair point"),
            );
        }
    }
    verified(v, h, !xi.is_nondegenerate())
}

/// Witness that the h-function with `h(0) = h₀` does not give a subspace:
/// the block `a + L(a, q)` holds `2a` and `a + q` in the set but is not inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonSubspaceWitness {
    pub a: usize,
    pub q: usize,
    pub block: usize,
    pub inside: Vec<usize>,
}

/// The set from `h(x) = κ(x)` and `h(0) = h₀`, with the failure witness
/// `a ∈ h₀ \ κ(a)`, `q ∈ κ(a) \ h₀`.
pub fn variant_with_base_hyperplane<F: FiniteField>(
    v: &VeroneseSpace,
    pg: &ProjectiveSpace<F>,
    xi: &BilinearForm<F>,
    h0: &PointSet,
) -> Result<(PointSet, Option<NonSubspaceWitness>)> {
    require_odd::<F>()?;
    check_projective_base(v, pg)?;
    if v.level() != 2 {
        return Err(GeomError::Invalid("level 2 required".into()));
    }
    if !v.base().is_hyperplane(h0) {
        return Err(GeomError::NotHyperplane(
            "h₀ is not a hyperplane of the base".into(),
        ));
    }
    let n = pg.points().len();
    let mut traces = Vec::with_capacity(v.leaf_count());
    for leaf in 0..v.leaf_count() {
        let e = v.leaf_root(leaf);
        if e.is_empty() {
            traces.push(h0.clone());
        } else {
            let x = e.entries()[0].0;
            traces.push(pg.quasi_correlation(xi, x)?);
        }
    }
    let set = union_of_traces(v, &traces);
    let mut witness = None;
    'outer: for a in h0.iter() {
        let ka = pg.quasi_correlation(xi, a)?;
        if ka.contains(a) {
            continue;
        }
        for q in ka.iter().filter(|&q| !h0.contains(q)) {
            let line = pg.structure().line_through(a, q).expect("distinct points");
            let block: Vec<usize> = pg
                .structure()
                .line(line)
                .iter()
                .map(|&z| {
                    v.index_of(&crate::Multiset::from_points([a, z]))
                        .expect("pair point")
                })
                .collect();
            let b = v.structure().find_line(&block).expect("a + L is a block");
            let inside: Vec<usize> = block.iter().copied().filter(|&p| set.contains(p)).collect();
            if inside.len() >= 2 && inside.len() < block.len() {
                witness = Some(NonSubspaceWitness {
                    a,
                    q,
                    block: b,
                    inside,
                });
                break 'outer;
            }
        }
    }
    debug_assert!(n > 0);
    Ok((set, witness))
}

/// `H = {q₁ + … + q_k : ⊥_η(q₁, …, q_k)}` on `V(k, PG)`.
pub fn hyperplane_from_alternating<F: FiniteField>(
    v: &VeroneseSpace,
    pg: &ProjectiveSpace<F>,
    eta: &AlternatingMultiForm<F>,
) -> Result<VeroneseHyperplane> {
    if eta.arity() != v.level() {
        return Err(GeomError::ArityMismatch {
            expected: v.level(),
            got: eta.arity(),
        });
    }
    check_projective_base(v, pg)?;
    if eta.dim() != pg.vector_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: pg.vector_dim(),
            got: eta.dim(),
        });
    }
    let mut h = PointSet::empty(v.point_count());
    for (i, f) in v.points().iter().enumerate() {
        let args: Vec<&ProjectivePoint<F>> =
            f.expansion().into_iter().map(|x| pg.point(x)).collect();
        if eta.perp(&args)? {
            h.insert(i);
        }
    }
    verified(v, h, false)
}

/// `H ∩ m_k(Q₀)` transported into the Veronese space of the polar space.
pub fn polar_hyperplane(
    v_polar: &VeroneseSpace,
    polar: &PolarSpace,
    v_proj: &VeroneseSpace,
    h_proj: &PointSet,
) -> Result<PointSet> {
    if v_polar.level() != v_proj.level() {
        return Err(GeomError::MismatchedAmbient("levels differ".into()));
    }
    if polar.structure.line_count() == 0 {
        return Err(GeomError::NotPartialLinear(
            "the polar space has no lines".into(),
        ));
    }
    if polar.ambient_index.len() != v_polar.base().point_count()
        || polar
            .ambient_index
            .iter()
            .any(|&p| p >= v_proj.base().point_count())
    {
        return Err(GeomError::MismatchedAmbient(
            "polar points do not embed in the projective base".into(),
        ));
    }
    let mut out = PointSet::empty(v_polar.point_count());
    for (i, f) in v_polar.points().iter().enumerate() {
        let g = f.map_points(|x| polar.ambient_index[x]);
        let j = v_proj.index_of(&g).expect("same level, embedded support");
        if h_proj.contains(j) {
            out.insert(i);
        }
    }
    if let Some(f) = v_polar.structure().hyperplane_failure(&out) {
        return Err(GeomError::Falsified(format!(
            "intersection is not a hyperplane: {f:?}"
        )));
    }
    Ok(out)
}

/// `{f : supp f ∩ h₀ ≠ ∅}` for a base hyperplane `h₀`. Each block `e + rB`
/// either lies inside (when `e` meets `h₀`) or meets it in `e + r(B ∩ h₀)`.
/// At level 2 its relation `x ⊥ y` comes from the rank-one symmetric form
/// `f(u)f(v)`, not from a symplectic one.
pub fn meeting_hyperplane(v: &VeroneseSpace, h0: &PointSet) -> Result<VeroneseHyperplane> {
    if !v.base().is_hyperplane(h0) {
        return Err(GeomError::NotHyperplane(
            "h₀ is not a hyperplane of the base".into(),
        ));
    }
    let points = PointSet::from_indices(
        v.point_count(),
        (0..v.point_count()).filter(|&i| v.point(i).entries().iter().any(|&(x, _)| h0.contains(x))),
    );
    verified(v, points, false)
}

/// Nonzero alternating forms on `F^dim`, one per scalar class.
pub fn alternating_forms_up_to_scalar<F: FiniteField>(dim: usize) -> Result<Vec<BilinearForm<F>>> {
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
        .collect();
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    crate::algebra::projective_points::<F>(pairs.len())?
        .into_iter()
        .map(|c| {
            let mut m = vec![vec![F::zero(); dim]; dim];
            for (&(i, j), &x) in pairs.iter().zip(c.coords()) {
                m[i][j] = x;
                m[j][i] = -x;
            }
            BilinearForm::new(m)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CharacterizationReport {
    pub enumerated: Vec<PointSet>,
    pub constructed: Vec<PointSet>,
    pub equal: bool,
    /// Enumerated hyperplanes with no symplectic construction.
    pub unmatched: Vec<PointSet>,
    /// Every unmatched hyperplane is a [`meeting_hyperplane`].
    pub unmatched_are_meeting: bool,
    /// Every enumerated hyperplane has full-or-hyperplane leaf traces and a
    /// symmetric relation `x ⊥ y ⇔ x + y ∈ H`.
    pub traces_well_formed: bool,
}

/// Enumerates all hyperplanes of `V(2, PG)` and compares them with the
/// symplectic constructions over all alternating forms.
pub fn verify_characterization<F: FiniteField>(
    v: &VeroneseSpace,
    pg: &ProjectiveSpace<F>,
) -> Result<CharacterizationReport> {
    require_odd::<F>()?;
    check_projective_base(v, pg)?;
    if v.level() != 2 {
        return Err(GeomError::Invalid(
            "the characterization concerns level 2".into(),
        ));
    }
    let g = v.structure();
    let enumerated = if g.point_count() <= crate::incidence::SUBSET_SCAN_LIMIT {
        g.enumerate_hyperplanes(HyperplaneSearch::SubsetScan)?
    } else {
        let data = v.leaf_trace_data()?;
        g.enumerate_hyperplanes(HyperplaneSearch::LeafTraces(&data))?
    };
    let mut constructed: BTreeSet<Vec<usize>> = BTreeSet::new();
    for xi in alternating_forms_up_to_scalar::<F>(pg.vector_dim())? {
        constructed.insert(hyperplane_from_symplectic(v, pg, &xi)?.points.to_vec());
    }
    let enumerated_set: BTreeSet<Vec<usize>> = enumerated.iter().map(|h| h.to_vec()).collect();
    let n = v.base().point_count();
    let traces_well_formed = enumerated.iter().all(|h| {
        let traces = extract_h_function(v, h);
        let shapes_ok = traces
            .iter()
            .all(|t| t.is_full() || v.base().is_hyperplane(t));
        let pair = |x: usize, y: usize| {
            v.index_of(&crate::Multiset::from_points([x, y]))
                .expect("pair")
        };
        let symmetric =
            (0..n).all(|x| (0..n).all(|y| h.contains(pair(x, y)) == h.contains(pair(y, x))));
        shapes_ok && symmetric
    });
    let equal = enumerated_set == constructed;
    let unmatched: Vec<PointSet> = enumerated
        .iter()
        .filter(|h| !constructed.contains(&h.to_vec()))
        .cloned()
        .collect();
    let meeting: Vec<PointSet> = v
        .base()
        .enumerate_hyperplanes(HyperplaneSearch::SubsetScan)
        .unwrap_or_default()
        .iter()
        .filter_map(|h0| meeting_hyperplane(v, h0).ok().map(|h| h.points))
        .collect();
    let unmatched_are_meeting = unmatched.iter().all(|h| meeting.contains(h));
    Ok(CharacterizationReport {
        enumerated,
        constructed: constructed
            .into_iter()
            .map(|p| PointSet::from_indices(v.point_count(), p))
            .collect(),
        equal,
        unmatched,
        unmatched_are_meeting,
        traces_well_formed,
    })
}
