//! Exact vertex enumeration and the checks built on it.
//!
//! `dd_vertices` runs the double description method on the homogenized cone
//! `{(t, x) : t ≥ 0, b t - A x ≥ 0}` with integer rays and combinatorial
//! adjacency. Lineality is carried explicitly until a constraint breaks it.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::descriptions::{InequalitySystem, LinearConstraint, Relation};
use crate::exactnum::{affine_dimension, NumError, Rational};
use crate::families::VRep;

/// Ambient dimension accepted by `dd_vertices` without an explicit cap.
pub const DEFAULT_DIM_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyError {
    /// The polyhedron contains a ray or a line.
    Unbounded,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    TooLarge {
        limit: usize,
        found: usize,
    },
    /// The constraint is violated by the point with this index.
    InvalidConstraint {
        point: usize,
    },
    /// Irredundancy was requested for a description that is not complete.
    Incomplete(CompletenessReport),
    Num(NumError),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::Unbounded => f.write_str("polyhedron is unbounded"),
            VerifyError::DimensionMismatch { expected, found } => {
                write!(f, "variable index mismatch: expected {expected}, found {found}")
            }
            VerifyError::TooLarge { limit, found } => write!(f, "{found} variables exceed the cap {limit}"),
            VerifyError::InvalidConstraint { point } => write!(f, "constraint is violated by point {point}"),
            VerifyError::Incomplete(r) => write!(
                f,
                "description is not complete ({} violations, {} extra, {} missing vertices)",
                r.violations.len(),
                r.extra_vertices.len(),
                r.missing_vertices.len()
            ),
            VerifyError::Num(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for VerifyError {}

impl From<NumError> for VerifyError {
    fn from(e: NumError) -> Self {
        VerifyError::Num(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains_all(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| b & !a == 0)
    }
}

#[derive(Clone, Debug)]
struct Ray {
    v: Vec<BigInt>,
    zeros: Bits,
}

fn normalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `ca * a + cb * b`, gcd-normalized.
fn combine(ca: &BigInt, a: &[BigInt], cb: &BigInt, b: &[BigInt]) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| ca * x + cb * y).collect();
    normalize(&mut v);
    v
}

/// Rows `h` with `h · (t, x) ≥ 0`; equations give two rows.
fn homogeneous_rows(c: &LinearConstraint) -> Vec<Vec<BigInt>> {
    let lcm = c.coef.iter().chain(core::iter::once(&c.rhs)).fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let scale = |r: &Rational| -> BigInt { r.numer() * (&lcm / r.denom()) };
    let mut le: Vec<BigInt> = core::iter::once(scale(&c.rhs)).chain(c.coef.iter().map(|a| -scale(a))).collect();
    normalize(&mut le);
    let neg: Vec<BigInt> = le.iter().map(|x| -x).collect();
    match c.rel {
        Relation::Le => vec![le],
        Relation::Ge => vec![neg],
        Relation::Eq => vec![le, neg],
    }
}

/// Insertion order: constraint tag, then coefficients.
fn insertion_order(sys: &InequalitySystem) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..sys.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ca, cb) = (&sys.constraints[a], &sys.constraints[b]);
        (&ca.tag, &ca.coef, ca.rel, &ca.rhs).cmp(&(&cb.tag, &cb.coef, cb.rel, &cb.rhs))
    });
    idx
}

pub fn dd_vertices(sys: &InequalitySystem) -> Result<VRep, VerifyError> {
    dd_vertices_with_cap(sys, DEFAULT_DIM_CAP)
}

pub fn dd_vertices_with_cap(sys: &InequalitySystem, cap: usize) -> Result<VRep, VerifyError> {
    let d = sys.dim();
    if d > cap {
        return Err(VerifyError::TooLarge { limit: cap, found: d });
    }
    for c in &sys.constraints {
        if c.coef.len() != d {
            return Err(VerifyError::DimensionMismatch { expected: d, found: c.coef.len() });
        }
    }
    let dim = d + 1;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut t_row = vec![BigInt::zero(); dim];
    t_row[0] = BigInt::one();
    rows.push(t_row);
    for i in insertion_order(sys) {
        rows.extend(homogeneous_rows(&sys.constraints[i]));
    }

    let m = rows.len();
    let mut lineality: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| {
            let mut e = vec![BigInt::zero(); dim];
            e[i] = BigInt::one();
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, h) in rows.iter().enumerate() {
        if let Some(pos) = lineality.iter().position(|l| !idot(h, l).is_zero()) {
            let mut l = lineality.swap_remove(pos);
            let mut hl = idot(h, &l);
            if hl.is_negative() {
                l.iter_mut().for_each(|x| *x = -&*x);
                hl = -hl;
            }
            for other in lineality.iter_mut() {
                let ho = idot(h, other);
                if !ho.is_zero() {
                    *other = combine(&hl, other, &-ho, &l);
                }
            }
            for r in rays.iter_mut() {
                let hr = idot(h, &r.v);
                if !hr.is_zero() {
                    r.v = combine(&hl, &r.v, &-hr, &l);
                }
                r.zeros.set(k);
            }
            // tight on every earlier row, like all lineality directions
            let mut zeros = Bits::new(m);
            (0..k).for_each(|j| zeros.set(j));
            rays.push(Ray { v: l, zeros });
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|r| idot(h, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zeros.set(k);
                }
            }
            continue;
        }
        let threshold = (dim - lineality.len()).saturating_sub(2);
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.count() < threshold {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(i, r)| i == p || i == n || !r.zeros.contains_all(&common));
                if !adjacent {
                    continue;
                }
                let v = combine(&values[p], &rays[n].v, &-&values[n], &rays[p].v);
                let mut zeros = common;
                zeros.set(k);
                fresh.push(Ray { v, zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (mut r, v) in rays.into_iter().zip(values) {
            if v.is_zero() {
                r.zeros.set(k);
                kept.push(r);
            } else if v.is_positive() {
                kept.push(r);
            }
        }
        kept.extend(fresh);
        rays = kept;
    }

    let has_point = rays.iter().any(|r| r.v[0].is_positive());
    if !has_point {
        return Ok(VRep::new(sys.vars.clone(), []).expect("empty"));
    }
    if !lineality.is_empty() || rays.iter().any(|r| r.v[0].is_zero()) {
        return Err(VerifyError::Unbounded);
    }
    let points: BTreeSet<Vec<Rational>> = rays
        .iter()
        .map(|r| r.v[1..].iter().map(|x| Rational::from_bigints(x.clone(), r.v[0].clone()).expect("t > 0")).collect())
        .collect();
    Ok(VRep::new(sys.vars.clone(), points).expect("dimension"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub point: Vec<Rational>,
    pub constraint: usize,
    pub tag: String,
}

fn check_index(sys: &InequalitySystem, v: &VRep) -> Result<(), VerifyError> {
    if sys.vars != v.vars {
        return Err(VerifyError::DimensionMismatch { expected: sys.dim(), found: v.dim() });
    }
    Ok(())
}

/// Every `(point, constraint)` pair where the point violates the constraint.
pub fn check_validity(sys: &InequalitySystem, v: &VRep) -> Result<Vec<Violation>, VerifyError> {
    check_index(sys, v)?;
    let mut out = Vec::new();
    for p in v.points() {
        for (i, c) in sys.constraints.iter().enumerate() {
            if !c.is_satisfied_by(p) {
                out.push(Violation { point: p.clone(), constraint: i, tag: c.tag.clone() });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessReport {
    pub violations: Vec<Violation>,
    /// Vertices of the described polytope that are not in the expected set.
    pub extra_vertices: Vec<Vec<Rational>>,
    /// Expected points that are not vertices of the described polytope.
    pub missing_vertices: Vec<Vec<Rational>>,
}

impl CompletenessReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn vertex_match(&self) -> bool {
        self.extra_vertices.is_empty() && self.missing_vertices.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.valid() && self.vertex_match()
    }
}

pub fn check_completeness(sys: &InequalitySystem, v: &VRep) -> Result<CompletenessReport, VerifyError> {
    check_completeness_with_cap(sys, v, DEFAULT_DIM_CAP)
}

pub fn check_completeness_with_cap(
    sys: &InequalitySystem,
    v: &VRep,
    cap: usize,
) -> Result<CompletenessReport, VerifyError> {
    let violations = check_validity(sys, v)?;
    let found = dd_vertices_with_cap(sys, cap)?;
    let extra_vertices = found.points().iter().filter(|p| !v.contains(p)).cloned().collect();
    let missing_vertices = v.points().iter().filter(|p| !found.contains(p)).cloned().collect();
    Ok(CompletenessReport { violations, extra_vertices, missing_vertices })
}

/// Affine dimension of the points of `v` at which `c` is tight.
pub fn facet_dimension(c: &LinearConstraint, v: &VRep) -> Result<isize, VerifyError> {
    if c.coef.len() != v.dim() {
        return Err(VerifyError::DimensionMismatch { expected: v.dim(), found: c.coef.len() });
    }
    if let Some(point) = v.points().iter().position(|p| !c.is_satisfied_by(p)) {
        return Err(VerifyError::InvalidConstraint { point });
    }
    let tight: Vec<Vec<Rational>> = v.points().iter().filter(|p| c.is_tight_at(p)).cloned().collect();
    Ok(affine_dimension(&tight)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintClass {
    Facet,
    ImplicitEquation,
    Redundant,
}

impl ConstraintClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintClass::Facet => "facet",
            ConstraintClass::ImplicitEquation => "implicit-equation",
            ConstraintClass::Redundant => "redundant",
        }
    }
}

/// Classifies each constraint; the description must be complete for `v`.
pub fn check_irredundancy(sys: &InequalitySystem, v: &VRep) -> Result<Vec<ConstraintClass>, VerifyError> {
    check_irredundancy_with_cap(sys, v, DEFAULT_DIM_CAP)
}

pub fn check_irredundancy_with_cap(
    sys: &InequalitySystem,
    v: &VRep,
    cap: usize,
) -> Result<Vec<ConstraintClass>, VerifyError> {
    let report = check_completeness_with_cap(sys, v, cap)?;
    if !report.is_complete() {
        return Err(VerifyError::Incomplete(report));
    }
    classify_constraints(sys, v)
}

/// Classification from tight vertices alone, without the completeness check.
pub fn classify_constraints(sys: &InequalitySystem, v: &VRep) -> Result<Vec<ConstraintClass>, VerifyError> {
    check_index(sys, v)?;
    let dim_p = affine_dimension(v.points())?;
    sys.constraints
        .iter()
        .map(|c| {
            if v.points().iter().all(|p| c.is_tight_at(p)) {
                return Ok(ConstraintClass::ImplicitEquation);
            }
            let f = facet_dimension(c, v)?;
            Ok(if f == dim_p - 1 { ConstraintClass::Facet } else { ConstraintClass::Redundant })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptions::{
        blossom_system, edge_polytope_system, qxy_system, qxyz_system, small_clique_system, vande_vate_system,
    };
    use crate::exactnum::rat_vec;
    use crate::families::{enum_edge_vertices, enum_matchings, enum_path_sets, enum_small_cliques, node_vars};
    use crate::graphcore::{Digraph, Graph};
    use crate::orbisack::{enum_orbisack_vertices, lifted_xy_vertices, lifted_xyz_vertices, orbisack_system};
    use alloc::format;
    use alloc::string::ToString;

    fn square() -> InequalitySystem {
        let mut s = InequalitySystem::new(node_vars(2));
        for v in 0..2 {
            let mut c = rat_vec(&[0, 0]);
            c[v] = Rational::one();
            s.push(LinearConstraint::new(c.clone(), Relation::Ge, Rational::zero(), format!("lo {v}"))).unwrap();
            s.push(LinearConstraint::new(c, Relation::Le, Rational::one(), format!("hi {v}"))).unwrap();
        }
        s
    }

    #[test]
    fn unit_square() {
        let v = dd_vertices(&square()).unwrap();
        assert_eq!(v.points(), &[rat_vec(&[0, 0]), rat_vec(&[0, 1]), rat_vec(&[1, 0]), rat_vec(&[1, 1])]);
    }

    #[test]
    fn unbounded_and_empty() {
        let mut s = InequalitySystem::new(node_vars(2));
        s.push(LinearConstraint::new(rat_vec(&[1, 0]), Relation::Ge, Rational::zero(), "a")).unwrap();
        assert_eq!(dd_vertices(&s), Err(VerifyError::Unbounded));

        let mut e = square();
        e.push(LinearConstraint::new(rat_vec(&[1, 1]), Relation::Ge, Rational::from_int(3), "far")).unwrap();
        assert!(dd_vertices(&e).unwrap().is_empty());

        // a line: x_0 = 0 only
        let mut l = InequalitySystem::new(node_vars(2));
        l.push(LinearConstraint::new(rat_vec(&[1, 0]), Relation::Eq, Rational::zero(), "eq")).unwrap();
        assert_eq!(dd_vertices(&l), Err(VerifyError::Unbounded));
    }

    #[test]
    fn fractional_vertex() {
        // triangle x,y ≥ 0, 2x + 3y ≤ 1
        let mut s = InequalitySystem::new(node_vars(2));
        s.push(LinearConstraint::new(rat_vec(&[1, 0]), Relation::Ge, Rational::zero(), "a")).unwrap();
        s.push(LinearConstraint::new(rat_vec(&[0, 1]), Relation::Ge, Rational::zero(), "b")).unwrap();
        s.push(LinearConstraint::new(rat_vec(&[2, 3]), Relation::Le, Rational::one(), "c")).unwrap();
        let v = dd_vertices(&s).unwrap();
        let third: Rational = "1/3".parse().unwrap();
        let half: Rational = "1/2".parse().unwrap();
        assert_eq!(v.points(), &[rat_vec(&[0, 0]), vec![Rational::zero(), third], vec![half, Rational::zero()]]);
    }

    #[test]
    fn blossom_k3_is_complete() {
        let g = Graph::complete(3);
        let sys = blossom_system(&g).unwrap();
        let m = enum_matchings(&g).unwrap();
        assert_eq!(dd_vertices(&sys).unwrap(), m);
        assert!(check_completeness(&sys, &m).unwrap().is_complete());

        let bad = check_validity(&sys, &VRep::new(m.vars.clone(), [rat_vec(&[1, 1, 0])]).unwrap()).unwrap();
        assert!(bad.iter().any(|v| v.tag == "degree 0"));

        let degree_only = sys.without_tag_prefix("odd-set");
        let r = check_completeness(&degree_only, &m).unwrap();
        let half: Rational = "1/2".parse().unwrap();
        assert_eq!(r.extra_vertices, vec![vec![half.clone(), half.clone(), half]]);
        assert!(r.valid() && !r.vertex_match());
    }

    #[test]
    fn other_families_small() {
        let d = Digraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(check_completeness(&vande_vate_system(&d, 0, 2).unwrap(), &enum_path_sets(&d, 0, 2).unwrap())
            .unwrap()
            .is_complete());
        let k2 = Graph::complete(2);
        assert!(check_completeness(&small_clique_system(&k2, true).unwrap(), &enum_small_cliques(&k2))
            .unwrap()
            .is_complete());
        for g in [Graph::complete(3), Graph::complete(4), Graph::new(4, [(0, 1), (2, 3)]).unwrap()] {
            assert!(check_completeness(&edge_polytope_system(&g).unwrap(), &enum_edge_vertices(&g))
                .unwrap()
                .is_complete());
        }
    }

    #[test]
    fn orbisack_complete_and_redundancy() {
        let sys2 = orbisack_system(2, false).unwrap();
        assert_eq!(dd_vertices(&sys2).unwrap(), enum_orbisack_vertices(2).unwrap());
        let v3 = enum_orbisack_vertices(3).unwrap();
        let sys3 = orbisack_system(3, false).unwrap();
        assert!(check_validity(&sys3, &v3).unwrap().is_empty());
        let classes = check_irredundancy(&sys3, &v3).unwrap();
        let redundant: Vec<&str> = sys3
            .constraints
            .iter()
            .zip(&classes)
            .filter(|(_, c)| **c == ConstraintClass::Redundant)
            .map(|(c, _)| c.tag.as_str())
            .collect();
        assert_eq!(redundant, ["lower x_1_1", "upper x_1_2"]);
        assert!(classes.iter().all(|c| *c != ConstraintClass::ImplicitEquation));

        let lower = sys3.constraints.iter().find(|c| c.tag == "lower x_1_1").unwrap();
        assert!(facet_dimension(lower, &v3).unwrap() < 5);
    }

    #[test]
    fn extended_orbisack_systems() {
        for p in 1..=3 {
            assert_eq!(dd_vertices(&qxy_system(p).unwrap()).unwrap(), lifted_xy_vertices(p).unwrap());
            assert_eq!(dd_vertices(&qxyz_system(p).unwrap()).unwrap(), lifted_xyz_vertices(p).unwrap());
        }
    }

    #[test]
    fn facet_dimension_examples() {
        let k2 = Graph::complete(2);
        let sys = small_clique_system(&k2, false).unwrap();
        let v = enum_small_cliques(&k2);
        let c = sys.constraints.iter().find(|c| c.tag == "stable T={0}").unwrap();
        assert_eq!(facet_dimension(c, &v).unwrap(), 1);

        let g = Graph::new(6, [(1, 2), (1, 3), (2, 3), (4, 5)]).unwrap();
        let sys = small_clique_system(&g, false).unwrap();
        let v = enum_small_cliques(&g);
        let c = sys.constraints.iter().find(|c| c.tag == "stable T={0}").unwrap();
        assert!(facet_dimension(c, &v).unwrap() < 5);

        let bad = LinearConstraint::new(rat_vec(&[1, 1]), Relation::Le, Rational::one(), "x");
        assert!(matches!(facet_dimension(&bad, &enum_small_cliques(&k2)), Err(VerifyError::InvalidConstraint { .. })));
    }

    #[test]
    fn edge_polytope_k2_implicit_equations() {
        let k2 = Graph::complete(2);
        let sys = edge_polytope_system(&k2).unwrap();
        let classes = check_irredundancy(&sys, &enum_edge_vertices(&k2)).unwrap();
        for (c, class) in sys.constraints.iter().zip(&classes) {
            if c.rel == Relation::Eq {
                assert_eq!(*class, ConstraintClass::ImplicitEquation, "{}", c.tag);
            }
        }
        assert_eq!(ConstraintClass::Facet.as_str().to_string(), "facet");
    }

    #[test]
    fn incomplete_rejected() {
        let g = Graph::complete(3);
        let sys = blossom_system(&g).unwrap().without_tag_prefix("odd-set");
        assert!(matches!(check_irredundancy(&sys, &enum_matchings(&g).unwrap()), Err(VerifyError::Incomplete(_))));
    }
}
