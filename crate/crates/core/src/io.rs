//! JSON documents used by the command line: spaces with their construction,
//! Veronese spaces, forms, hyperplanes and affine reducts. Documents that
//! carry a construction are rebuilt on load and compared with the stored
//! lines, so files never have to be trusted.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{is_prime, AlternatingMultiForm, BilinearForm, FiniteField, QuadraticForm};
use crate::error::{GeomError, Result};
use crate::hyperplanes::{
    extract_h_function, hyperplane_from_alternating, hyperplane_from_symplectic, polar_hyperplane,
    Trace, VeroneseHyperplane,
};
use crate::incidence::{IncidenceStructure, Label};
use crate::pointset::PointSet;
use crate::reduct::AffineReduct;
use crate::spaces::{
    affine_space, polar_space_quadratic, polar_space_symplectic, PolarSpace, ProjectiveSpace,
};
use crate::veronese::VeroneseSpace;
use crate::{Gf2, Gf3, Gf5, Gf7};

/// Runs `$body` with `$F` bound to the field of order `$p`.
macro_rules! with_field {
    ($p:expr, $F:ident => $body:expr) => {
        match $p {
            2 => {
                type $F = Gf2;
                $body
            }
            3 => {
                type $F = Gf3;
                $body
            }
            5 => {
                type $F = Gf5;
                $body
            }
            7 => {
                type $F = Gf7;
                $body
            }
            other if is_prime(other) => Err(GeomError::UnsupportedPrime(other)),
            other => Err(GeomError::NotPrime(other)),
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadricType {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

impl FromStr for QuadricType {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" | "+" => Ok(QuadricType::Hyperbolic),
            "parabolic" | "0" => Ok(QuadricType::Parabolic),
            "elliptic" | "-" => Ok(QuadricType::Elliptic),
            _ => Err(GeomError::Invalid(format!("unknown quadric type {s:?}"))),
        }
    }
}

/// A named space: `pg(n,p)`, `ag(n,p)`, `w(n,p)` or `quadric(n,p,type)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Construction {
    Pg {
        n: usize,
        p: u32,
    },
    Ag {
        n: usize,
        p: u32,
    },
    W {
        n: usize,
        p: u32,
    },
    Quadric {
        n: usize,
        p: u32,
        #[serde(rename = "type")]
        kind: QuadricType,
    },
}

impl Construction {
    pub fn from_parts(family: &str, n: usize, p: u32, kind: Option<&str>) -> Result<Self> {
        match (family, kind) {
            ("pg", None) => Ok(Construction::Pg { n, p }),
            ("ag", None) => Ok(Construction::Ag { n, p }),
            ("w", None) => Ok(Construction::W { n, p }),
            ("quadric", Some(k)) => Ok(Construction::Quadric {
                n,
                p,
                kind: k.parse()?,
            }),
            ("quadric", None) => Err(GeomError::Invalid("quadric needs a type".into())),
            _ => Err(GeomError::Invalid(format!("unknown family {family:?}"))),
        }
    }

    pub fn prime(&self) -> u32 {
        match *self {
            Construction::Pg { p, .. }
            | Construction::Ag { p, .. }
            | Construction::W { p, .. }
            | Construction::Quadric { p, .. } => p,
        }
    }
}

impl FromStr for Construction {
    type Err = GeomError;

    /// `pg(2,3)`, `ag(1,3)`, `w(3,3)`, `quadric(5,2,hyperbolic)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || GeomError::Invalid(format!("cannot parse space name {s:?}"));
        let (family, rest) = s.trim().split_once('(').ok_or_else(bad)?;
        let args: Vec<&str> = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .split(',')
            .map(str::trim)
            .collect();
        if args.len() < 2 || args.len() > 3 {
            return Err(bad());
        }
        let n = args[0].parse().map_err(|_| bad())?;
        let p = args[1].parse().map_err(|_| bad())?;
        Construction::from_parts(&family.to_lowercase(), n, p, args.get(2).copied())
    }
}

/// A space in the shared structure format, optionally with the recipe it
/// came from, its parallel classes (affine spaces) and its planes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
    pub point_count: usize,
    pub lines: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<usize, Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel_classes: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planes: Option<Vec<Vec<usize>>>,
}

impl SpaceDoc {
    pub fn from_structure(g: &IncidenceStructure) -> Self {
        SpaceDoc {
            construction: None,
            point_count: g.point_count(),
            lines: g.lines().to_vec(),
            labels: g.labels().cloned(),
            parallel_classes: None,
            planes: None,
        }
    }

    pub fn structure(&self) -> Result<IncidenceStructure> {
        let g = IncidenceStructure::new(self.point_count, self.lines.clone())?;
        Ok(match &self.labels {
            Some(l) => g.with_labels(l.clone()),
            None => g,
        })
    }

    /// Rebuilds from the construction when there is one and checks the
    /// stored lines against it.
    pub fn verified(&self) -> Result<SpaceDoc> {
        match self.construction {
            None => {
                self.structure()?;
                Ok(self.clone())
            }
            Some(c) => {
                let fresh = build_space(&c)?;
                if fresh.point_count != self.point_count || fresh.lines != self.lines {
                    return Err(GeomError::MismatchedAmbient(
                        "stored lines differ from the construction".into(),
                    ));
                }
                Ok(fresh)
            }
        }
    }

    pub fn plane_sets(&self) -> Vec<PointSet> {
        self.planes
            .iter()
            .flatten()
            .map(|p| PointSet::from_indices(self.point_count, p.iter().copied()))
            .collect()
    }
}

fn polar_of<F: FiniteField>(pg: &ProjectiveSpace<F>, c: &Construction) -> Result<PolarSpace> {
    match *c {
        Construction::W { n, .. } => {
            polar_space_symplectic(pg, &BilinearForm::standard_symplectic(n + 1)?)
        }
        Construction::Quadric { n, kind, .. } => {
            let q = match kind {
                QuadricType::Hyperbolic => QuadraticForm::hyperbolic(n + 1)?,
                QuadricType::Parabolic => QuadraticForm::parabolic(n + 1)?,
                QuadricType::Elliptic => QuadraticForm::elliptic(n + 1)?,
            };
            polar_space_quadratic(pg, &q)
        }
        _ => Err(GeomError::Invalid("not a polar space".into())),
    }
}

fn sets(v: &[PointSet]) -> Vec<Vec<usize>> {
    v.iter().map(PointSet::to_vec).collect()
}

pub fn build_space(c: &Construction) -> Result<SpaceDoc> {
    with_field!(c.prime(), F => {
        let mut doc = match *c {
            Construction::Pg { n, .. } => {
                let pg = ProjectiveSpace::<F>::new(n)?;
                let mut d = SpaceDoc::from_structure(pg.structure());
                d.planes = Some(sets(&pg.planes()));
                d
            }
            Construction::Ag { n, .. } => {
                let ag = affine_space::<F>(n)?;
                let mut d = SpaceDoc::from_structure(ag.structure());
                d.parallel_classes = Some(ag.parallel.classes.clone());
                d.planes = Some(sets(&ag.planes));
                d
            }
            Construction::W { n, .. } | Construction::Quadric { n, .. } => {
                let pg = ProjectiveSpace::<F>::new(n)?;
                let polar = polar_of(&pg, c)?;
                let mut d = SpaceDoc::from_structure(&polar.structure);
                d.planes = Some(sets(&polar.planes));
                d
            }
        };
        doc.construction = Some(*c);
        Ok(doc)
    })
}

/// A Veronese space: its base document and level, with the built lines and
/// multiset labels written out for other tools.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VeroneseDoc {
    pub level: usize,
    pub base: SpaceDoc,
    pub point_count: usize,
    pub lines: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<usize, Label>>,
}

impl VeroneseDoc {
    pub fn new(base: SpaceDoc, level: usize) -> Result<(Self, VeroneseSpace)> {
        let base = base.verified()?;
        let v = VeroneseSpace::build(&base.structure()?, level)?;
        let g = v.structure();
        let doc = VeroneseDoc {
            level,
            base,
            point_count: g.point_count(),
            lines: g.lines().to_vec(),
            labels: g.labels().cloned(),
        };
        Ok((doc, v))
    }

    pub fn load(&self) -> Result<VeroneseSpace> {
        let (fresh, v) = VeroneseDoc::new(self.base.clone(), self.level)?;
        if fresh.point_count != self.point_count || fresh.lines != self.lines {
            return Err(GeomError::MismatchedAmbient(
                "stored Veronese lines differ from the rebuilt space".into(),
            ));
        }
        Ok(v)
    }

    /// Leaf images of the base planes.
    pub fn planes(&self, v: &VeroneseSpace) -> Vec<PointSet> {
        v.leaf_images(&self.base.plane_sets())
    }
}

/// A form: `{"p", "matrix"}` (bilinear) or `{"p", "arity", "coeffs"}` with
/// keys `"i<j<…"` and an optional `"dim"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormDoc {
    Bilinear {
        p: u32,
        matrix: Vec<Vec<i64>>,
    },
    Multi {
        p: u32,
        arity: usize,
        coeffs: BTreeMap<String, i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
}

impl FormDoc {
    pub fn prime(&self) -> u32 {
        match self {
            FormDoc::Bilinear { p, .. } | FormDoc::Multi { p, .. } => *p,
        }
    }
}

fn to_field<F: FiniteField>(x: i64) -> F {
    F::from_u32(x.rem_euclid(F::ORDER as i64) as u32)
}

fn parse_index(key: &str) -> Result<Vec<usize>> {
    key.split('<')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| GeomError::Invalid(format!("bad coefficient key {key:?}")))
        })
        .collect()
}

fn bilinear<F: FiniteField>(matrix: &[Vec<i64>]) -> Result<BilinearForm<F>> {
    BilinearForm::new(
        matrix
            .iter()
            .map(|r| r.iter().map(|&x| to_field(x)).collect())
            .collect(),
    )
}

fn multi<F: FiniteField>(
    arity: usize,
    coeffs: &BTreeMap<String, i64>,
    dim: Option<usize>,
    default_dim: usize,
) -> Result<AlternatingMultiForm<F>> {
    let mut map = BTreeMap::new();
    for (k, &c) in coeffs {
        map.insert(parse_index(k)?, to_field::<F>(c));
    }
    AlternatingMultiForm::new(arity, dim.unwrap_or(default_dim), map)
}

/// The hyperplane of `V(k, base)` a form determines. Projective bases use
/// the form directly; polar bases intersect the projective hyperplane.
pub fn hyperplane_from_form(
    doc: &VeroneseDoc,
    v: &VeroneseSpace,
    form: &FormDoc,
) -> Result<VeroneseHyperplane> {
    let c = doc.base.construction.ok_or_else(|| {
        GeomError::Invalid("the base has no construction, so forms have no coordinates".into())
    })?;
    if c.prime() != form.prime() {
        return Err(GeomError::MismatchedAmbient(format!(
            "form over GF({}) on a space over GF({})",
            form.prime(),
            c.prime()
        )));
    }
    let n = match c {
        Construction::Pg { n, .. }
        | Construction::W { n, .. }
        | Construction::Quadric { n, .. } => n,
        Construction::Ag { .. } => {
            return Err(GeomError::Invalid(
                "forms need a projective or polar base".into(),
            ))
        }
    };
    with_field!(c.prime(), F => {
        let pg = ProjectiveSpace::<F>::new(n)?;
        let on_pg = |vp: &VeroneseSpace| -> Result<VeroneseHyperplane> {
            match form {
                FormDoc::Bilinear { matrix, .. } => hyperplane_from_symplectic(vp, &pg, &bilinear::<F>(matrix)?),
                FormDoc::Multi { arity, coeffs, dim, .. } => {
                    hyperplane_from_alternating(vp, &pg, &multi::<F>(*arity, coeffs, *dim, n + 1)?)
                }
            }
        };
        match c {
            Construction::Pg { .. } => on_pg(v),
            _ => {
                let polar = polar_of(&pg, &c)?;
                let vp = VeroneseSpace::build(pg.structure(), v.level())?;
                let hp = on_pg(&vp)?;
                let points = polar_hyperplane(v, &polar, &vp, &hp.points)?;
                Ok(VeroneseHyperplane {
                    h: extract_h_function(v, &points),
                    points,
                    degenerate: hp.degenerate,
                })
            }
        }
    })
}

/// `{"points": [...], "h": {leaf root: trace}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperplaneDoc {
    pub points: Vec<usize>,
    pub h: BTreeMap<String, Trace>,
    #[serde(default)]
    pub degenerate: bool,
}

impl HyperplaneDoc {
    pub fn new(v: &VeroneseSpace, h: &VeroneseHyperplane) -> Self {
        let h_map = h
            .traces()
            .into_iter()
            .enumerate()
            .map(|(leaf, t)| {
                (
                    serde_json::to_string(v.leaf_root(leaf)).expect("multiset json"),
                    t,
                )
            })
            .collect();
        HyperplaneDoc {
            points: h.points.to_vec(),
            h: h_map,
            degenerate: h.degenerate,
        }
    }

    pub fn point_set(&self, v: &VeroneseSpace) -> Result<PointSet> {
        if let Some(&bad) = self.points.iter().find(|&&p| p >= v.point_count()) {
            return Err(GeomError::PointOutOfRange {
                index: bad,
                count: v.point_count(),
            });
        }
        Ok(PointSet::from_indices(
            v.point_count(),
            self.points.iter().copied(),
        ))
    }
}

/// An affine reduct: the Veronese document, the deleted hyperplane, the
/// truncated lines and the `∥_H` classes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductDoc {
    pub veronese: VeroneseDoc,
    pub hyperplane: Vec<usize>,
    pub point_count: usize,
    pub lines: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<usize, Label>>,
    pub parallel_classes: Vec<Vec<usize>>,
}

impl ReductDoc {
    pub fn new(veronese: VeroneseDoc, a: &AffineReduct) -> Self {
        let g = a.structure();
        ReductDoc {
            veronese,
            hyperplane: a.hyperplane().to_vec(),
            point_count: g.point_count(),
            lines: g.lines().to_vec(),
            labels: g.labels().cloned(),
            parallel_classes: a.classes().to_vec(),
        }
    }

    pub fn load(&self) -> Result<(VeroneseSpace, AffineReduct)> {
        let v = self.veronese.load()?;
        let h = PointSet::from_indices(v.point_count(), self.hyperplane.iter().copied());
        let a = AffineReduct::build(&v, &h)?;
        if a.point_count() != self.point_count || a.structure().lines() != self.lines.as_slice() {
            return Err(GeomError::MismatchedAmbient(
                "stored reduct lines differ from the rebuilt reduct".into(),
            ));
        }
        Ok((v, a))
    }
}

/// Any document the command line reads.
#[derive(Debug, Clone)]
pub enum Document {
    Reduct(Box<ReductDoc>),
    Veronese(Box<VeroneseDoc>),
    Space(SpaceDoc),
}

/// Picks the document kind from its top-level keys. Untagged serde enums
/// cannot be used here: they buffer maps and lose integer label keys.
pub fn parse_document(json: &str) -> Result<Document> {
    let bad = |e: serde_json::Error| GeomError::Invalid(format!("unreadable document: {e}"));
    let value: serde_json::Value = serde_json::from_str(json).map_err(bad)?;
    let has = |k: &str| value.get(k).is_some();
    Ok(if has("veronese") {
        Document::Reduct(Box::new(serde_json::from_str(json).map_err(bad)?))
    } else if has("level") && has("base") {
        Document::Veronese(Box::new(serde_json::from_str(json).map_err(bad)?))
    } else {
        Document::Space(serde_json::from_str(json).map_err(bad)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        assert_eq!(
            "pg(2,3)".parse::<Construction>().unwrap(),
            Construction::Pg { n: 2, p: 3 }
        );
        assert_eq!(
            "quadric(5, 2, hyperbolic)".parse::<Construction>().unwrap(),
            Construction::Quadric {
                n: 5,
                p: 2,
                kind: QuadricType::Hyperbolic
            }
        );
        assert!("pg(2)".parse::<Construction>().is_err());
        assert!("xx(2,3)".parse::<Construction>().is_err());
    }

    #[test]
    fn prime_dispatch() {
        assert_eq!(
            build_space(&Construction::Pg { n: 2, p: 11 }).unwrap_err(),
            GeomError::UnsupportedPrime(11)
        );
        assert_eq!(
            build_space(&Construction::Pg { n: 2, p: 4 }).unwrap_err(),
            GeomError::NotPrime(4)
        );
        for p in [2, 3, 5, 7] {
            let d = build_space(&Construction::Pg { n: 2, p }).unwrap();
            assert_eq!(d.point_count as u32, p * p + p + 1);
        }
    }

    #[test]
    fn space_round_trip() {
        let d = build_space(&Construction::Pg { n: 3, p: 3 }).unwrap();
        assert_eq!(d.point_count, 40);
        let json = serde_json::to_string(&d).unwrap();
        let Document::Space(back) = parse_document(&json).unwrap() else {
            panic!("space expected")
        };
        assert_eq!(back.verified().unwrap().lines, d.lines);
        let mut tampered = back.clone();
        tampered.lines.swap(0, 1);
        assert!(tampered.verified().is_err());
        // a bare structure file is a space without a construction
        let bare = r#"{"point_count": 3, "lines": [[0,1,2]]}"#;
        let Document::Space(s) = parse_document(bare).unwrap() else {
            panic!("space expected")
        };
        assert_eq!(s.structure().unwrap().line_count(), 1);
    }

    #[test]
    fn veronese_and_hyperplane_docs() {
        let base = build_space(&Construction::Pg { n: 3, p: 3 }).unwrap();
        let (doc, v) = VeroneseDoc::new(base, 2).unwrap();
        assert_eq!(doc.point_count, 820);
        let json = serde_json::to_string(&doc).unwrap();
        let Document::Veronese(back) = parse_document(&json).unwrap() else {
            panic!("veronese expected")
        };
        back.load().unwrap();
        let form: FormDoc = serde_json::from_str(
            r#"{"p": 3, "matrix": [[0,1,0,0],[-1,0,0,0],[0,0,0,1],[0,0,-1,0]]}"#,
        )
        .unwrap();
        let h = hyperplane_from_form(&doc, &v, &form).unwrap();
        assert_eq!(h.points.len(), 280);
        let hd = HyperplaneDoc::new(&v, &h);
        assert_eq!(hd.h.len(), 41);
        assert_eq!(hd.h["[]"], Trace::Full);
        let a = AffineReduct::build(&v, &hd.point_set(&v).unwrap()).unwrap();
        let rd = ReductDoc::new(doc, &a);
        let json = serde_json::to_string(&rd).unwrap();
        let Document::Reduct(back) = parse_document(&json).unwrap() else {
            panic!("reduct expected")
        };
        assert_eq!(back.load().unwrap().1.point_count(), 540);
    }

    #[test]
    fn multilinear_form_doc() {
        let base = build_space(&Construction::Pg { n: 2, p: 3 }).unwrap();
        let (doc, v) = VeroneseDoc::new(base, 3).unwrap();
        let form: FormDoc =
            serde_json::from_str(r#"{"p": 3, "arity": 3, "coeffs": {"0<1<2": 1}}"#).unwrap();
        let h = hyperplane_from_form(&doc, &v, &form).unwrap();
        assert_eq!(v.point_count() - h.points.len(), 234);
        let wrong: FormDoc =
            serde_json::from_str(r#"{"p": 5, "arity": 3, "coeffs": {"0<1<2": 1}}"#).unwrap();
        assert!(matches!(
            hyperplane_from_form(&doc, &v, &wrong),
            Err(GeomError::MismatchedAmbient(_))
        ));
    }

    #[test]
    fn polar_hyperplane_doc() {
        let base = build_space(&"w(3,3)".parse().unwrap()).unwrap();
        assert_eq!((base.point_count, base.lines.len()), (40, 40));
        let (doc, v) = VeroneseDoc::new(base, 2).unwrap();
        let form: FormDoc = serde_json::from_str(
            r#"{"p": 3, "matrix": [[0,1,0,0],[2,0,0,0],[0,0,0,1],[0,0,2,0]]}"#,
        )
        .unwrap();
        let h = hyperplane_from_form(&doc, &v, &form).unwrap();
        assert!(v.structure().is_hyperplane(&h.points));
    }
}
