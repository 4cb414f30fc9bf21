//! Orbisacks: vertices, lifted vertex maps, block inequalities and their separation.
//!
//! Rows and columns are 1-based throughout the public API (`x_{i,j}`,
//! `i ∈ [1, p]`, `j ∈ {1, 2}`); flat vectors are row-major.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::descriptions::{orbisack_vars, qxy_vars, qxyz_vars, InequalitySystem, LinearConstraint, Relation};
use crate::exactnum::Rational;
use crate::families::VRep;

pub const DEFAULT_VERTEX_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbisackError {
    EmptyOrder,
    TooLarge {
        limit: usize,
        found: usize,
    },
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    NonBinary,
    /// Column 1 is lexicographically smaller than column 2.
    LexViolation,
    OutOfBox {
        row: usize,
        col: usize,
    },
    InfeasibleTau(String),
    /// No label applies at this row; cannot happen for inputs in the box.
    Unlabelled(usize),
}

impl fmt::Display for OrbisackError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbisackError::EmptyOrder => f.write_str("p must be at least 1"),
            OrbisackError::TooLarge { limit, found } => write!(f, "p = {found} exceeds the cap {limit}"),
            OrbisackError::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} entries, found {found}")
            }
            OrbisackError::NonBinary => f.write_str("matrix entries must be 0 or 1"),
            OrbisackError::LexViolation => f.write_str("first column is lexicographically smaller than the second"),
            OrbisackError::OutOfBox { row, col } => write!(f, "entry x_{row}_{col} lies outside [0, 1]"),
            OrbisackError::InfeasibleTau(msg) => write!(f, "infeasible tau: {msg}"),
            OrbisackError::Unlabelled(i) => write!(f, "no tau label applies at row {i}"),
        }
    }
}

impl core::error::Error for OrbisackError {}

/// A `p × 2` rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbMatrix {
    rows: Vec<[Rational; 2]>,
}

impl OrbMatrix {
    pub fn zeros(p: usize) -> Self {
        OrbMatrix { rows: vec![[Rational::zero(), Rational::zero()]; p] }
    }

    pub fn from_rows(rows: Vec<[Rational; 2]>) -> Self {
        OrbMatrix { rows }
    }

    pub fn from_i64_rows(rows: &[[i64; 2]]) -> Self {
        OrbMatrix { rows: rows.iter().map(|r| [Rational::from_int(r[0]), Rational::from_int(r[1])]).collect() }
    }

    /// Row-major `(x_{1,1}, x_{1,2}, x_{2,1}, ...)`.
    pub fn from_flat(values: &[Rational]) -> Result<Self, OrbisackError> {
        if !values.len().is_multiple_of(2) || values.is_empty() {
            let expected = (values.len() / 2).max(1) * 2;
            return Err(OrbisackError::LengthMismatch { expected, found: values.len() });
        }
        Ok(OrbMatrix { rows: values.chunks(2).map(|c| [c[0].clone(), c[1].clone()]).collect() })
    }

    pub fn to_flat(&self) -> Vec<Rational> {
        self.rows.iter().flat_map(|r| r.iter().cloned()).collect()
    }

    pub fn p(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i - 1][j - 1]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.rows[i - 1][j - 1] = v;
    }

    pub fn is_binary(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_zero() || v.is_one())
    }

    pub fn check_box(&self) -> Result<(), OrbisackError> {
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                if v.is_negative() || *v > Rational::one() {
                    return Err(OrbisackError::OutOfBox { row: i + 1, col: j + 1 });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for OrbMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", r[0], r[1])?;
        }
        f.write_str(")")
    }
}

/// First row equal to `(1, 0)`, or `p + 1`.
pub fn critical_row(x: &OrbMatrix) -> Result<usize, OrbisackError> {
    if !x.is_binary() {
        return Err(OrbisackError::NonBinary);
    }
    Ok((1..=x.p()).find(|&i| x.get(i, 1).is_one() && x.get(i, 2).is_zero()).unwrap_or(x.p() + 1))
}

/// Critical row of a vertex, after checking the lex condition.
fn vertex_crit(x: &OrbMatrix) -> Result<usize, OrbisackError> {
    let c = critical_row(x)?;
    if (1..c).any(|i| x.get(i, 1) != x.get(i, 2)) {
        return Err(OrbisackError::LexViolation);
    }
    Ok(c)
}

pub fn is_orbisack_vertex(x: &OrbMatrix) -> bool {
    vertex_crit(x).is_ok()
}

pub fn enum_orbisack_vertices(p: usize) -> Result<VRep, OrbisackError> {
    enum_orbisack_vertices_with_cap(p, DEFAULT_VERTEX_CAP)
}

pub fn enum_orbisack_vertices_with_cap(p: usize, cap: usize) -> Result<VRep, OrbisackError> {
    Ok(VRep::new(orbisack_vars(p), orbisack_vertex_matrices(p, cap)?.iter().map(OrbMatrix::to_flat))
        .expect("row-major length"))
}

/// Vertices as matrices, in row-major lexicographic order.
pub fn orbisack_vertex_matrices(p: usize, cap: usize) -> Result<Vec<OrbMatrix>, OrbisackError> {
    if p == 0 {
        return Err(OrbisackError::EmptyOrder);
    }
    if p > cap {
        return Err(OrbisackError::TooLarge { limit: cap, found: p });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << (2 * p)) {
        // bit 2p-1 is x_{1,1} so masks ascend in row-major lex order
        let bits: Vec<[i64; 2]> = (0..p)
            .map(|i| {
                let b = |k: usize| (mask >> (2 * p - 1 - k) & 1) as i64;
                [b(2 * i), b(2 * i + 1)]
            })
            .collect();
        let x = OrbMatrix::from_i64_rows(&bits);
        if is_orbisack_vertex(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// `(x, y(x))` with `y(x) = e_crit` or `0`.
pub fn lift_xy(x: &OrbMatrix) -> Result<Vec<Rational>, OrbisackError> {
    let c = vertex_crit(x)?;
    let mut out = x.to_flat();
    out.extend((1..=x.p()).map(|i| if i == c { Rational::one() } else { Rational::zero() }));
    Ok(out)
}

/// `(x̃, y, z)` for a vertex, flattened as `x̃` row-major, then `y`, then `z`.
pub fn lift_xyz(x: &OrbMatrix) -> Result<Vec<Rational>, OrbisackError> {
    let c = vertex_crit(x)?;
    let p = x.p();
    let mut xt = Vec::with_capacity(2 * p);
    for i in 1..=p {
        for j in 1..=2 {
            xt.push(if i > c { x.get(i, j).clone() } else { Rational::zero() });
        }
    }
    let y = (1..=p).map(|i| if i == c { Rational::one() } else { Rational::zero() });
    let z: Vec<Rational> = (1..=p).map(|i| if i < c { x.get(i, 1).clone() } else { Rational::zero() }).collect();
    xt.extend(y);
    xt.extend(z);
    Ok(xt)
}

/// Recovers `x` from a flattened `(x̃, y, z)` point.
pub fn project_xyz(p: usize, point: &[Rational]) -> Result<OrbMatrix, OrbisackError> {
    if point.len() != 4 * p {
        return Err(OrbisackError::LengthMismatch { expected: 4 * p, found: point.len() });
    }
    let (y, z) = (&point[2 * p..3 * p], &point[3 * p..]);
    let rows = (0..p).map(|i| [&(&point[2 * i] + &y[i]) + &z[i], &point[2 * i + 1] + &z[i]]).collect();
    Ok(OrbMatrix::from_rows(rows))
}

pub fn lifted_xy_vertices(p: usize) -> Result<VRep, OrbisackError> {
    let pts = orbisack_vertex_matrices(p, DEFAULT_VERTEX_CAP)?.iter().map(lift_xy).collect::<Result<Vec<_>, _>>()?;
    Ok(VRep::new(qxy_vars(p), pts).expect("lift length"))
}

pub fn lifted_xyz_vertices(p: usize) -> Result<VRep, OrbisackError> {
    let pts = orbisack_vertex_matrices(p, DEFAULT_VERTEX_CAP)?.iter().map(lift_xyz).collect::<Result<Vec<_>, _>>()?;
    Ok(VRep::new(qxyz_vars(p), pts).expect("lift length"))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeasibleTau {
    tau: Vec<u8>,
    i_max: usize,
}

impl FeasibleTau {
    pub fn new(tau: Vec<u8>) -> Result<Self, OrbisackError> {
        let bad = |m: &str| Err(OrbisackError::InfeasibleTau(format!("{m}: {tau:?}")));
        if tau.is_empty() {
            return bad("empty");
        }
        if tau.iter().any(|&t| t > 3) {
            return bad("labels must lie in 0..=3");
        }
        if tau[0] != 3 {
            return bad("first entry must be 3");
        }
        let i_max = tau.iter().rposition(|&t| t != 0).expect("tau[0] = 3") + 1;
        if tau[i_max - 1] != 3 {
            return bad("last nonzero entry must be 3");
        }
        if tau[..i_max].contains(&0) {
            return bad("zero before the last nonzero entry");
        }
        Ok(FeasibleTau { tau, i_max })
    }

    pub fn p(&self) -> usize {
        self.tau.len()
    }

    /// 1-based entry.
    pub fn get(&self, i: usize) -> u8 {
        self.tau[i - 1]
    }

    pub fn i_max(&self) -> usize {
        self.i_max
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.tau
    }
}

impl fmt::Display for FeasibleTau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.tau.iter().map(|t| format!("{t}")).collect();
        write!(f, "({})", items.join(","))
    }
}

/// All feasible τ, grouped by `i_max`, middle entries in lexicographic order.
pub fn enum_feasible_tau(p: usize) -> Result<Vec<FeasibleTau>, OrbisackError> {
    if p == 0 {
        return Err(OrbisackError::EmptyOrder);
    }
    let mut out = Vec::new();
    let mut first = vec![0u8; p];
    first[0] = 3;
    out.push(FeasibleTau { tau: first, i_max: 1 });
    for k in 2..=p {
        let middle = k - 2;
        let total = 3usize.pow(middle as u32);
        for code in 0..total {
            let mut tau = vec![0u8; p];
            tau[0] = 3;
            tau[k - 1] = 3;
            let mut c = code;
            for pos in (1..=middle).rev() {
                tau[pos] = (c % 3) as u8 + 1;
                c /= 3;
            }
            out.push(FeasibleTau { tau, i_max: k });
        }
    }
    Ok(out)
}

/// `⟨-a, x⟩ ≤ β` for a feasible τ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockIneq {
    pub tau: FeasibleTau,
    pub alpha: Vec<u64>,
    pub a: OrbMatrix,
    pub beta: Rational,
}

impl BlockIneq {
    /// `⟨-a, x⟩`.
    pub fn lhs(&self, x: &OrbMatrix) -> Rational {
        let mut s = Rational::zero();
        for i in 1..=x.p() {
            for j in 1..=2 {
                s -= &(self.a.get(i, j) * x.get(i, j));
            }
        }
        s
    }

    pub fn is_violated_by(&self, x: &OrbMatrix) -> bool {
        self.lhs(x) > self.beta
    }

    pub fn to_constraint(&self) -> LinearConstraint {
        let coef = self.a.to_flat().iter().map(|c| -c).collect();
        LinearConstraint::new(coef, Relation::Le, self.beta.clone(), format!("block tau={}", self.tau))
    }
}

pub fn build_block(tau: &FeasibleTau) -> BlockIneq {
    let p = tau.p();
    let i_star = tau.i_max();
    let mut alpha = vec![0u64; p + 1];
    for i in (1..=i_star).rev() {
        alpha[i - 1] = if i + 1 >= i_star {
            1
        } else if tau.get(i + 1) == 3 {
            2 * alpha[i]
        } else {
            alpha[i]
        };
    }
    alpha.truncate(p);
    let mut a = OrbMatrix::zeros(p);
    let mut beta = Rational::zero();
    for i in 1..=p {
        let al = Rational::from_int(alpha[i - 1] as i64);
        match tau.get(i) {
            1 => a.set(i, 1, al),
            2 => {
                a.set(i, 2, -&al);
                beta += &al;
            }
            3 => {
                a.set(i, 1, al.clone());
                a.set(i, 2, -al);
            }
            _ => {}
        }
    }
    BlockIneq { tau: tau.clone(), alpha, a, beta }
}

/// Block inequalities for every feasible τ, then the `4p` bounds.
pub fn orbisack_system(p: usize, drop_redundant: bool) -> Result<InequalitySystem, OrbisackError> {
    let taus = enum_feasible_tau(p)?;
    let mut sys = InequalitySystem::new(orbisack_vars(p));
    let push = |sys: &mut InequalitySystem, c: LinearConstraint| sys.push(c).expect("row-major length");
    for t in &taus {
        push(&mut sys, build_block(t).to_constraint());
    }
    for i in 1..=p {
        for j in 1..=2 {
            let mut coef = vec![Rational::zero(); 2 * p];
            coef[2 * (i - 1) + (j - 1)] = Rational::one();
            if !(drop_redundant && i == 1 && j == 1) {
                push(
                    &mut sys,
                    LinearConstraint::new(coef.clone(), Relation::Ge, Rational::zero(), format!("lower x_{i}_{j}")),
                );
            }
            if !(drop_redundant && i == 1 && j == 2) {
                push(&mut sys, LinearConstraint::new(coef, Relation::Le, Rational::one(), format!("upper x_{i}_{j}")));
            }
        }
    }
    Ok(sys)
}

/// The `y` recursion; `attained[i-1][k]` records whether argument `k+1` of the minimum is attained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YLift {
    pub y: Vec<Rational>,
    pub attained: Vec<[bool; 4]>,
}

pub fn lift_y(x: &OrbMatrix) -> Result<YLift, OrbisackError> {
    x.check_box()?;
    let mut y: Vec<Rational> = Vec::with_capacity(x.p());
    let mut attained = Vec::with_capacity(x.p());
    let mut prefix = Rational::zero();
    for i in 1..=x.p() {
        let args = [
            x.get(i, 1).clone(),
            Rational::one() - x.get(i, 2),
            &(x.get(i, 1) - x.get(i, 2)) + &prefix,
            Rational::one() - &prefix,
        ];
        let m = args.iter().min().expect("four arguments").clone();
        attained.push([args[0] == m, args[1] == m, args[2] == m, args[3] == m]);
        prefix += &m;
        y.push(m);
    }
    Ok(YLift { y, attained })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZLift {
    /// `(lower, upper)` per row.
    pub intervals: Vec<(Rational, Rational)>,
    /// Lower bounds, or the first (1-based) row with an empty interval.
    pub z: Result<Vec<Rational>, usize>,
}

pub fn lift_z(x: &OrbMatrix, y: &[Rational]) -> Result<ZLift, OrbisackError> {
    if y.len() != x.p() {
        return Err(OrbisackError::LengthMismatch { expected: x.p(), found: y.len() });
    }
    let mut intervals = Vec::with_capacity(x.p());
    let mut before = Rational::zero();
    for i in 1..=x.p() {
        let through = &before + &y[i - 1];
        let lo = [x.get(i, 1) - &through, x.get(i, 2) - &before, Rational::zero()].into_iter().max().expect("nonempty");
        let hi = [Rational::one() - &through, x.get(i, 1) - &y[i - 1], x.get(i, 2).clone()]
            .into_iter()
            .min()
            .expect("nonempty");
        intervals.push((lo, hi));
        before = through;
    }
    let z = match intervals.iter().position(|(lo, hi)| lo > hi) {
        Some(i) => Err(i + 1),
        None => Ok(intervals.iter().map(|(lo, _)| lo.clone()).collect()),
    };
    Ok(ZLift { intervals, z })
}

/// First (1-based) row where `y_i ≥ 0` or `y_i ≥ x_{i,1} - x_{i,2} - Σ_{k<i} y_k` fails.
pub fn first_violation(x: &OrbMatrix, y: &[Rational]) -> Option<usize> {
    let mut prefix = Rational::zero();
    for i in 1..=x.p() {
        let yi = &y[i - 1];
        if yi.is_negative() || *yi < &(x.get(i, 1) - x.get(i, 2)) - &prefix {
            return Some(i);
        }
        prefix += yi;
    }
    None
}

/// Labels rows `1..=i_star` by the attained argument, preferring label 3 at rows 1 and `i_star`.
pub fn tau_of(lift: &YLift, i_star: usize) -> Result<FeasibleTau, OrbisackError> {
    let p = lift.y.len();
    let mut tau = vec![0u8; p];
    for i in 1..=i_star {
        let att = &lift.attained[i - 1];
        tau[i - 1] = if (i == 1 || i == i_star) && att[2] {
            3
        } else if att[0] {
            1
        } else if att[1] {
            2
        } else if att[2] {
            3
        } else {
            return Err(OrbisackError::Unlabelled(i));
        };
    }
    FeasibleTau::new(tau)
}

/// A block inequality violated by `x`, or `None` if `x` satisfies all of them.
pub fn separate_block(x: &OrbMatrix) -> Result<Option<BlockIneq>, OrbisackError> {
    let lift = lift_y(x)?;
    let Some(i_star) = first_violation(x, &lift.y) else {
        return Ok(None);
    };
    let block = build_block(&tau_of(&lift, i_star)?);
    debug_assert!(block.is_violated_by(x));
    Ok(Some(block))
}

/// Reference separation by trying every feasible τ.
pub fn separate_block_brute(x: &OrbMatrix) -> Result<Option<BlockIneq>, OrbisackError> {
    Ok(enum_feasible_tau(x.p())?.iter().map(build_block).find(|b| b.is_violated_by(x)))
}
