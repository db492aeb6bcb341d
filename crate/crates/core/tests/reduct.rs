use std::collections::BTreeSet;
use std::sync::OnceLock;

use vgeom::algebra::{BilinearForm, QuadraticForm};
use vgeom::configs::{
    check_net_axiom, check_parallelogram_completion, check_tamaschke, NetVariant, ScanBudget,
};
use vgeom::hyperplanes::{hyperplane_from_symplectic, polar_hyperplane};
use vgeom::reduct::*;
use vgeom::spaces::{polar_space_quadratic, polar_space_symplectic, ProjectiveSpace};
use vgeom::veronese::VeroneseSpace;
use vgeom::{GeomError, Gf2, Gf3, Gf5, PointSet};

struct Fixture {
    pg: ProjectiveSpace<Gf3>,
    v: VeroneseSpace,
    a: AffineReduct,
}

fn pg33() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let pg = ProjectiveSpace::<Gf3>::new(3).unwrap();
        let v = VeroneseSpace::build(pg.structure(), 2).unwrap();
        let h = hyperplane_from_symplectic(&v, &pg, &BilinearForm::standard_symplectic(4).unwrap())
            .unwrap();
        let a = AffineReduct::build(&v, &h.points).unwrap();
        Fixture { pg, v, a }
    })
}

/// Ambient subsets pulled into reduct indices.
fn truncate(a: &AffineReduct, s: &PointSet) -> PointSet {
    PointSet::from_indices(a.point_count(), s.iter().filter_map(|p| a.reduct_point(p)))
}

#[test]
fn pg33_reduct_counts() {
    let Fixture { v, a, .. } = pg33();
    assert_eq!(v.point_count(), 820);
    assert_eq!(a.hyperplane().len(), 280);
    assert_eq!(a.point_count(), 540);
    // every ambient block outside H keeps q = 3 of its 4 points
    let outside = v
        .structure()
        .lines()
        .iter()
        .filter(|l| !l.iter().all(|&p| a.hyperplane().contains(p)))
        .count();
    assert_eq!(a.line_count(), outside);
    assert!(a.structure().lines().iter().all(|l| l.len() == 3));
    assert_eq!(a.classes().len(), 280);
    assert!(a.classes_are_disjoint());
    assert!(!a.is_degenerate());
    for l in 0..a.line_count() {
        let parent = v.structure().line(a.parent(l));
        assert!(parent.contains(&a.infinite_point(l)));
        assert!(a
            .structure()
            .line(l)
            .iter()
            .all(|&p| parent.contains(&a.ambient_point(p))));
    }
}

#[test]
fn direction_taxonomy() {
    let Fixture { v, a, .. } = pg33();
    let vc = a.veblen_classes();
    assert!(vc.transitive);
    let dirs = a.classify_directions(&vc).unwrap();
    let one = dirs
        .iter()
        .filter(|d| d.kind == DirectionType::OneLeaf)
        .count();
    let two = dirs
        .iter()
        .filter(|d| d.kind == DirectionType::TwoLeaf)
        .count();
    assert_eq!((one, two), (40, 240));
    for d in &dirs {
        assert_eq!(d.definable, Some(d.kind));
        assert!(d.subclasses_inside && d.subclass_leaves_single);
        match d.kind {
            DirectionType::OneLeaf => {
                assert_eq!(d.veblen_subclasses, 1);
                assert_eq!(d.leaves.len(), 1);
                assert_eq!(v.point(d.infinite_point).support_len(), 1);
            }
            DirectionType::TwoLeaf => {
                assert_eq!(d.veblen_subclasses, 2);
                assert_eq!(d.leaves.len(), 2);
            }
        }
    }
    assert_eq!(vc.classes.len(), 40 + 2 * 240);
}

#[test]
fn veblen_parallel_examples() {
    let Fixture { a, .. } = pg33();
    let g = a.structure();
    assert!(a.veblen_parallel(0, 0));
    // lines through one proper point in distinct leaves
    let p = 0;
    let through = g.lines_through(p);
    let (l, m) = through
        .iter()
        .flat_map(|&l| through.iter().map(move |&m| (l, m)))
        .find(|&(l, m)| a.top(l) != a.top(m))
        .unwrap();
    assert!(!a.veblen_parallel(l, m));
    // disjoint coplanar lines inside one leaf: two lines of one ∥_H class
    // sharing a top
    let c = a
        .classes()
        .iter()
        .find(|c| c.len() > 1 && a.top(c[0]) == a.top(c[1]))
        .unwrap();
    assert!(a.veblen_parallel(c[0], c[1]));
}

#[test]
fn planes_are_truncated_leaf_planes() {
    let Fixture { pg, v, a } = pg33();
    let planes = reduct_planes(a);
    assert_eq!(planes.len(), 1560);
    assert!(planes.iter().all(|p| p.len() == 9));
    let expected: BTreeSet<PointSet> = v
        .leaf_images(&pg.planes())
        .iter()
        .map(|p| truncate(a, p))
        .filter(|p| !p.is_empty())
        .collect();
    let got: BTreeSet<PointSet> = planes.into_iter().collect();
    assert_eq!(got, expected);
}

#[test]
fn three_leaf_triangles_are_degenerate() {
    let Fixture { pg, v, a } = pg33();
    let g = a.structure();
    // x, y, z on a base line m; sides x+m, y+m, z+m minus H
    let base = pg.structure();
    let m = (0..base.line_count())
        .find(|&m| {
            let pts = base.line(m);
            pts.iter().all(|&x| {
                pts.iter().filter(|&&y| y != x).all(|&y| {
                    let f = v.index_of(&vgeom::Multiset::from_points([x, y])).unwrap();
                    !a.hyperplane().contains(f)
                })
            })
        })
        .unwrap();
    let pts = base.line(m);
    let side = |x: usize| {
        let pts_xm: Vec<usize> = pts
            .iter()
            .filter(|&&y| y != x)
            .map(|&y| {
                a.reduct_point(v.index_of(&vgeom::Multiset::from_points([x, y])).unwrap())
                    .unwrap()
            })
            .collect();
        g.find_line(&pts_xm).unwrap()
    };
    let (l1, l2, l3) = (side(pts[0]), side(pts[1]), side(pts[2]));
    let out = a.plane_from_triangle(l1, l2, l3).unwrap();
    let PlaneOutcome::Degenerate(set) = out else {
        panic!("expected DEGENERATE, got {out:?}")
    };
    for p in set.iter() {
        assert!(v
            .point(a.ambient_point(p))
            .support()
            .iter()
            .all(|&x| base.on_line(x, m)));
    }
    assert!(matches!(
        a.plane_from_triangle(l1, l1, l3),
        Err(GeomError::NotATriangle(_))
    ));
}

#[test]
fn recovery_is_an_isomorphism() {
    let Fixture { v, a, .. } = pg33();
    let r = recover_veronese(a).unwrap();
    assert!(r.bijective);
    assert!(
        r.missing.is_empty(),
        "missing {:?}",
        &r.missing[..r.missing.len().min(3)]
    );
    assert!(
        r.spurious.is_empty(),
        "spurious {:?}",
        &r.spurious[..r.spurious.len().min(3)]
    );
    assert_eq!(r.structure.point_count(), 820);
    assert_eq!(r.structure.line_count(), v.structure().line_count());
    assert_eq!(r.proper_lines, a.line_count());
    // H ∩ (x+S) holds 13 lines for each of 40 leaves; 2S holds 130
    assert_eq!(r.leaf_horizon_lines, 520);
    assert_eq!(r.two_s_horizon_lines, 130);
    assert!(r.is_isomorphism());
}

#[test]
fn affine_closure_with_veblen_parallelism() {
    let Fixture { a, .. } = pg33();
    let vc = a.veblen_classes();
    let t = check_tamaschke(a.structure(), &vc.class_of, ScanBudget::exhaustive());
    assert!(t.holds(), "{:?}", t.witness);
    assert!(t.instances > 0);
    let p = check_parallelogram_completion(a.structure(), &vc.class_of, ScanBudget::exhaustive());
    assert!(p.holds(), "{:?}", p.witness);
    assert!(p.instances > 0);
}

#[test]
fn net_axiom_at_q3_and_q5() {
    let Fixture { a, .. } = pg33();
    let top = |l: usize| a.top(l);
    // at q = 3 no crosser pair completes: the scan finds nothing
    let r = check_net_axiom(
        a.structure(),
        &top,
        NetVariant::DistinctTops,
        ScanBudget::exhaustive(),
    );
    assert!(r.holds());
    assert!(r.quadrangles > 0);
    assert!(net_violation_witness(a).unwrap().is_none());

    let pg = ProjectiveSpace::<Gf5>::new(3).unwrap();
    let v = VeroneseSpace::build(pg.structure(), 2).unwrap();
    let h = hyperplane_from_symplectic(&v, &pg, &BilinearForm::standard_symplectic(4).unwrap())
        .unwrap();
    let a5 = AffineReduct::build(&v, &h.points).unwrap();
    let w = net_violation_witness(&a5)
        .unwrap()
        .expect("a witness at q = 5");
    let g = a5.structure();
    let (l3, k3) = (w.witness.l3, w.witness.k3);
    assert!(!g.lines_meet(l3, k3));
    assert_eq!(
        v.structure().meet(a5.parent(l3), a5.parent(k3)),
        Some(w.deleted_point)
    );
    assert!(h.points.contains(w.deleted_point));
    assert_eq!(v.point(w.deleted_point).support_len(), 2);
    let [s0, s1, s2, s3] = w.witness.quadrangle.sides;
    assert!(g.lines_meet(l3, s1) && g.lines_meet(l3, s3));
    assert!(g.lines_meet(k3, s0) && g.lines_meet(k3, s2));
    let tops: BTreeSet<usize> = w
        .witness
        .quadrangle
        .sides
        .iter()
        .map(|&s| a5.top(s))
        .collect();
    assert_eq!(tops.len(), 4);
}

#[test]
fn definability_mismatches_are_cross_top() {
    let Fixture { a, .. } = pg33();
    let (_, top_of) = reduct_tops(a).unwrap();
    let d = verify_parallel_definability(a, 200, 7).unwrap();
    assert!(d.non_parallel_pairs > 0);
    for &(l1, l2) in &d.mismatches {
        // inside one top ∥° decides correctly; only completions across tops fail
        assert_ne!(top_of[l1], top_of[l2]);
        assert!(a.parallel(l1, l2));
    }
}

#[test]
fn gamma_on_rank_three_quadrics() {
    let pg = ProjectiveSpace::<Gf2>::new(5).unwrap();
    let q = polar_space_quadratic(&pg, &QuadraticForm::hyperbolic(6).unwrap()).unwrap();
    assert_eq!(
        (
            q.structure.point_count(),
            q.structure.line_count(),
            q.planes.len()
        ),
        (35, 105, 30)
    );
    let v = VeroneseSpace::build(&q.structure, 2).unwrap();
    let r = gamma_leaf_recovery(v.structure(), &v.leaf_images(&q.planes), v.leaves()).unwrap();
    assert!(r.equal);
    assert_eq!(r.classes.len(), 36);

    // reduct of V(2, Q⁺(5,3)) by a symplectic hyperplane: truncated leaves
    let pg = ProjectiveSpace::<Gf3>::new(5).unwrap();
    let q = polar_space_quadratic(&pg, &QuadraticForm::hyperbolic(6).unwrap()).unwrap();
    let v = VeroneseSpace::build(&q.structure, 2).unwrap();
    let vp = VeroneseSpace::build(pg.structure(), 2).unwrap();
    let h = hyperplane_from_symplectic(&vp, &pg, &BilinearForm::standard_symplectic(6).unwrap())
        .unwrap();
    let hq = polar_hyperplane(&v, &q, &vp, &h.points).unwrap();
    let a = AffineReduct::build(&v, &hq).unwrap();
    let planes = v.leaf_images(&q.planes);
    let full = planes[0].len();
    let rp: Vec<PointSet> = planes
        .iter()
        .map(|p| truncate(&a, p))
        .filter(|p| !p.is_empty() && p.len() < full)
        .collect();
    let leaves: Vec<PointSet> = v.leaves().iter().map(|l| truncate(&a, l)).collect();
    let r = gamma_leaf_recovery(a.structure(), &rp, &leaves).unwrap();
    assert!(r.equal);
    assert_eq!(r.classes.len(), 130);
}

#[test]
fn gamma_on_w33_is_indeterminate() {
    let pg = ProjectiveSpace::<Gf3>::new(3).unwrap();
    let w = polar_space_symplectic(&pg, &BilinearForm::standard_symplectic(4).unwrap()).unwrap();
    let v = VeroneseSpace::build(&w.structure, 2).unwrap();
    let r = gamma_leaf_recovery(v.structure(), &v.leaf_images(&w.planes), v.leaves());
    assert!(matches!(r, Err(GeomError::Indeterminate(_))));
}

#[test]
fn degenerate_hyperplanes_are_refused() {
    let pg = ProjectiveSpace::<Gf3>::new(2).unwrap();
    let v = VeroneseSpace::build(pg.structure(), 2).unwrap();
    // every alternating form on GF(3)^3 has a radical
    let mut m = vec![vec![Gf3::new(0); 3]; 3];
    m[0][1] = Gf3::new(1);
    m[1][0] = Gf3::new(2);
    let h = hyperplane_from_symplectic(&v, &pg, &BilinearForm::new(m).unwrap()).unwrap();
    assert!(h.degenerate);
    let a = AffineReduct::build(&v, &h.points).unwrap();
    assert!(a.is_degenerate());
    assert!(matches!(recover_veronese(&a), Err(GeomError::Degenerate)));
    assert!(matches!(
        net_violation_witness(&a),
        Err(GeomError::Degenerate)
    ));
}
