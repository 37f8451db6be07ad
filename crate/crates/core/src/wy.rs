//! Wigner-Yanase information and the half-anticommutator product
//! `a ⋆ b = ½{a^½, b^½}` with depth-indexed nested evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{check_same_dim, Error, Result};
use crate::operator::{
    anticommutator, commutator, relative_commutator, trace, CMatrix, DensityOperator, HermitianMatrix,
    PositiveOperator, C64,
};

/// Measured constant `s` in `T1 = s·T2`, fixed from the trace-expansion oracle.
pub const QUASI_DISTRIBUTIVITY_SIGN: f64 = -1.0;

/// Imaginary part tolerated in traces that are real in exact arithmetic.
const IMAGINARY_RESIDUE: f64 = 1e-10;

fn real_trace(m: &CMatrix, what: &str) -> Result<f64> {
    let t = trace(m);
    if t.im.abs() > IMAGINARY_RESIDUE * f64::max(1.0, t.re.abs()) {
        return Err(Error::Numerical(format!("{what}: imaginary residue {:e}", t.im)));
    }
    Ok(t.re)
}

/// `½ tr([ρ^½, k][ρ^½, l])`.
pub fn wy_cross(k: &HermitianMatrix, l: &HermitianMatrix, rho: &DensityOperator) -> Result<f64> {
    check_same_dim(k.dim(), rho.dim())?;
    check_same_dim(l.dim(), rho.dim())?;
    let r = rho.sqrt();
    let ck = commutator(r.matrix(), k.matrix())?;
    let cl = commutator(r.matrix(), l.matrix())?;
    Ok(0.5 * real_trace(&(ck * cl), "skew information")?)
}

/// `S_WY(k|ρ) = ½ tr([ρ^½, k]²)`, never positive.
pub fn wy_information(k: &HermitianMatrix, rho: &DensityOperator) -> Result<f64> {
    wy_cross(k, k, rho)
}

/// `½{a^½, b^½}`; Hermitian but not always positive.
pub fn half_anticommutator_star(a: &PositiveOperator, b: &PositiveOperator) -> Result<HermitianMatrix> {
    check_same_dim(a.dim(), b.dim())?;
    let ac = anticommutator(a.sqrt().matrix(), b.sqrt().matrix())?;
    Ok(HermitianMatrix::symmetrized(&(ac * C64::new(0.5, 0.0))))
}

/// A `⋆` word. Leaves index into an operand list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarExpression {
    Leaf(usize),
    Node(Box<StarExpression>, Box<StarExpression>),
}

impl StarExpression {
    pub fn node(l: StarExpression, r: StarExpression) -> Self {
        StarExpression::Node(Box::new(l), Box::new(r))
    }

    /// Number of `⋆` nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            StarExpression::Leaf(_) => 0,
            StarExpression::Node(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Parses words like `a*(b*c)` or `(a*b)*(a*c)`; letter `a` is operand 0, `b` is 1, ...
    ///
    /// `⋆` may stand for `*`. Chains such as `a*b*c` are rejected since the product is not
    /// associative.
    pub fn parse(text: &str) -> Result<Self> {
        let tokens: Vec<char> = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == '⋆' { '*' } else { c })
            .collect();
        let mut pos = 0;
        let e = parse_expr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Structure(format!("unexpected '{}' at {pos}", tokens[pos])));
        }
        if e.depth() == 0 {
            return Err(Error::Structure("expression needs at least one product".into()));
        }
        Ok(e)
    }
}

fn parse_expr(t: &[char], pos: &mut usize) -> Result<StarExpression> {
    let lhs = parse_atom(t, pos)?;
    if t.get(*pos) == Some(&'*') {
        *pos += 1;
        let rhs = parse_atom(t, pos)?;
        if t.get(*pos) == Some(&'*') {
            return Err(Error::Structure("ambiguous chain; add parentheses".into()));
        }
        return Ok(StarExpression::node(lhs, rhs));
    }
    Ok(lhs)
}

fn parse_atom(t: &[char], pos: &mut usize) -> Result<StarExpression> {
    match t.get(*pos) {
        Some('(') => {
            *pos += 1;
            let e = parse_expr(t, pos)?;
            if t.get(*pos) != Some(&')') {
                return Err(Error::Structure(format!("missing ')' at {}", *pos)));
            }
            *pos += 1;
            Ok(e)
        }
        Some(&c) if c.is_ascii_lowercase() => {
            *pos += 1;
            Ok(StarExpression::Leaf((c as u8 - b'a') as usize))
        }
        Some(&c) => Err(Error::Structure(format!("unexpected '{c}' at {}", *pos))),
        None => Err(Error::Structure("unexpected end of expression".into())),
    }
}

/// Each node is `½{left, right}`; a leaf under `d` nodes contributes `operand^(2^-d)`.
pub fn eval_star_expression(e: &StarExpression, operands: &[PositiveOperator]) -> Result<HermitianMatrix> {
    if e.depth() == 0 {
        return Err(Error::Structure("expression needs at least one product".into()));
    }
    let dim = operands.first().map(|p| p.dim()).unwrap_or(0);
    for p in operands {
        check_same_dim(dim, p.dim())?;
    }
    Ok(HermitianMatrix::symmetrized(&eval_at(e, operands, 0)?))
}

fn eval_at(e: &StarExpression, operands: &[PositiveOperator], depth: i32) -> Result<CMatrix> {
    match e {
        StarExpression::Leaf(i) => {
            let op = operands
                .get(*i)
                .ok_or_else(|| Error::Structure(format!("leaf {i} has no operand")))?;
            Ok(op.power(0.5f64.powi(depth))?.matrix().clone())
        }
        StarExpression::Node(l, r) => {
            let x = eval_at(l, operands, depth + 1)?;
            let y = eval_at(r, operands, depth + 1)?;
            Ok(anticommutator(&x, &y)? * C64::new(0.5, 0.0))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiDistributivity {
    /// `tr(a⋆(b⋆c) - (a⋆b)⋆(a⋆c))`.
    #[serde(rename = "T1")]
    pub t1: f64,
    /// `¼ tr([a^¼, b^¼][a^¼, c^¼])`.
    #[serde(rename = "T2")]
    pub t2: f64,
    /// `½ S_WY(b^¼, c^¼ | ρ)` with `ρ = a^½ / tr(a^½)`.
    #[serde(rename = "T3")]
    pub t3: f64,
    /// `tr(a^½)`, so that `T2 = scale·T3`.
    pub scale: f64,
    /// Sign of `T1/T2`, or 0 when `T2` vanishes.
    pub sign: f64,
    /// Relative commutator norms of `(a,b)`, `(a,c)`, `(b,c)`.
    pub commutator_norms: [f64; 3],
    pub seed: Option<u64>,
}

pub fn quasi_distributivity_report(
    a: &PositiveOperator,
    b: &PositiveOperator,
    c: &PositiveOperator,
) -> Result<QuasiDistributivity> {
    check_same_dim(a.dim(), b.dim())?;
    check_same_dim(a.dim(), c.dim())?;
    let ops = [a.clone(), b.clone(), c.clone()];
    let lhs = eval_star_expression(&StarExpression::parse("a*(b*c)")?, &ops)?;
    let rhs = eval_star_expression(&StarExpression::parse("(a*b)*(a*c)")?, &ops)?;
    let t1 = real_trace(&(lhs.matrix() - rhs.matrix()), "T1")?;

    let (qa, qb, qc) = (a.power(0.25)?, b.power(0.25)?, c.power(0.25)?);
    let cab = commutator(qa.matrix(), qb.matrix())?;
    let cac = commutator(qa.matrix(), qc.matrix())?;
    let t2 = 0.25 * real_trace(&(cab * cac), "T2")?;

    let root = a.sqrt();
    let scale = root.trace();
    let t3 = if scale > 0.0 {
        let rho = DensityOperator::normalized(&root)?;
        0.5 * wy_cross(qb.as_hermitian(), qc.as_hermitian(), &rho)?
    } else {
        0.0
    };
    let sign = if t2.abs() > 1e-14 { (t1 / t2).signum() } else { 0.0 };
    Ok(QuasiDistributivity {
        t1,
        t2,
        t3,
        scale,
        sign,
        commutator_norms: [
            relative_commutator(a.matrix(), b.matrix())?,
            relative_commutator(a.matrix(), c.matrix())?,
            relative_commutator(b.matrix(), c.matrix())?,
        ],
        seed: None,
    })
}
