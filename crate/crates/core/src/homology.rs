//! Finite binary systems given by multiplication tables, the rack chain complex with
//! integer coefficients, real cochains, and the trace cocycle on operator families.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bures::gamma;
use crate::error::{Error, Result};
use crate::fidelity::{star, ORTHOGONALITY_FLOOR};
use crate::operator::random::Sampler;
use crate::operator::{relative_commutator, relative_defect, DensityOperator, PositiveOperator};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableFlags {
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
    pub r3_prime: bool,
}

impl TableFlags {
    pub fn is_quandle(&self) -> bool {
        self.r1 && self.r2 && (self.r3 || self.r3_prime)
    }
}

/// `table[i][j] = i*j` on `{0, …, n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBinarySystem {
    table: Vec<Vec<usize>>,
    flags: TableFlags,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    n: usize,
    table: Vec<Vec<usize>>,
}

impl FiniteBinarySystem {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Shape("a binary system needs at least one element".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(Error::Structure(format!("entry {bad} in row {i} is outside 0..{n}")));
            }
        }
        let flags = table_axiom_flags(&table);
        Ok(Self { table, flags })
    }

    pub fn n(&self) -> usize {
        self.table.len()
    }

    pub fn op(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn flags(&self) -> TableFlags {
        self.flags
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TableFile {
            n: self.n(),
            table: self.table.clone(),
        })
        .expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: TableFile = serde_json::from_str(text)?;
        if f.table.len() != f.n {
            return Err(Error::Shape(format!("declared n = {} but table has {} rows", f.n, f.table.len())));
        }
        Self::new(f.table)
    }
}

/// Exhaustive, exact axiom check. R2 asks every left translation `j ↦ i*j` to be a bijection.
pub fn table_axiom_flags(table: &[Vec<usize>]) -> TableFlags {
    let n = table.len();
    let op = |i: usize, j: usize| table[i][j];
    let r1 = (0..n).all(|i| op(i, i) == i);
    let r2 = (0..n).all(|i| {
        let mut seen = vec![false; n];
        (0..n).all(|j| !std::mem::replace(&mut seen[op(i, j)], true))
    });
    let mut r3 = true;
    let mut r3_prime = true;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                r3 &= op(x, op(y, z)) == op(op(x, y), op(x, z));
                r3_prime &= op(op(y, z), x) == op(op(y, x), op(z, x));
            }
        }
    }
    TableFlags { r1, r2, r3, r3_prime }
}

/// `i*j = (2j - i) mod n`.
pub fn dihedral_system(n: usize) -> Result<FiniteBinarySystem> {
    if n == 0 {
        return Err(Error::Shape("dihedral system needs n >= 1".into()));
    }
    FiniteBinarySystem::new((0..n).map(|i| (0..n).map(|j| (2 * j + n - i) % n).collect()).collect())
}

/// `i*j = i`.
pub fn trivial_system(n: usize) -> Result<FiniteBinarySystem> {
    if n == 0 {
        return Err(Error::Shape("trivial system needs n >= 1".into()));
    }
    FiniteBinarySystem::new((0..n).map(|i| vec![i; n]).collect())
}

/// Cyclic Latin square `(i + j) mod n` with rows, columns and symbols shuffled.
pub fn random_latin_square(n: usize, seed: u64) -> Result<FiniteBinarySystem> {
    if n == 0 {
        return Err(Error::Shape("Latin square needs n >= 1".into()));
    }
    let mut s = Sampler::new(seed);
    let mut perm = || {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            p.swap(i, s.index(i + 1));
        }
        p
    };
    let (rows, cols, syms) = (perm(), perm(), perm());
    FiniteBinarySystem::new((0..n).map(|i| (0..n).map(|j| syms[(rows[i] + cols[j]) % n]).collect()).collect())
}

/// Finitely supported integer combination of `degree`-tuples.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub degree: usize,
    terms: BTreeMap<Vec<usize>, i64>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn generator(tuple: Vec<usize>) -> Self {
        let mut c = Self::zero(tuple.len());
        c.add_term(tuple, 1);
        c
    }

    pub fn add_term(&mut self, tuple: Vec<usize>, coeff: i64) {
        assert_eq!(tuple.len(), self.degree, "tuple length must equal the chain degree");
        match self.terms.entry(tuple) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if coeff != 0 {
                    v.insert(coeff);
                }
            }
        }
    }

    pub fn coeff(&self, tuple: &[usize]) -> i64 {
        self.terms.get(tuple).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, i64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn scaled(&self, k: i64) -> Self {
        let mut out = Self::zero(self.degree);
        if k != 0 {
            for (t, v) in self.terms() {
                out.add_term(t.clone(), k * v);
            }
        }
        out
    }

    pub fn plus(&self, other: &Chain) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::Shape(format!("chain degrees {} and {} differ", self.degree, other.degree)));
        }
        let mut out = self.clone();
        for (t, v) in other.terms() {
            out.add_term(t.clone(), v);
        }
        Ok(out)
    }
}

/// `∂ₙ(x₁,…,xₙ) = Σ_{i=2..n} (-1)^i [(…, x̂ᵢ, …) - (x₁*xᵢ, …, x_{i-1}*xᵢ, x_{i+1}, …, xₙ)]`,
/// with `∂ₙ = 0` for `n <= 1`.
pub fn boundary(c: &Chain, s: &FiniteBinarySystem) -> Result<Chain> {
    let n = c.degree;
    let mut out = Chain::zero(n.saturating_sub(1));
    if n <= 1 {
        return Ok(out);
    }
    for (t, v) in c.terms() {
        if let Some(&bad) = t.iter().find(|&&x| x >= s.n()) {
            return Err(Error::Structure(format!("element {bad} is outside the system")));
        }
        for i in 2..=n {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let k = i - 1;
            let face: Vec<usize> = t.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &x)| x).collect();
            let acted: Vec<usize> = t
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(j, &x)| if j < k { s.op(x, t[k]) } else { x })
                .collect();
            out.add_term(face, sign * v);
            out.add_term(acted, -sign * v);
        }
    }
    Ok(out)
}

/// Calls `f` on every tuple of `{0..n}^degree` in lexicographic order.
pub fn for_each_tuple(n: usize, degree: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0usize; degree];
    if n == 0 && degree > 0 {
        return;
    }
    loop {
        f(&t);
        let mut pos = degree;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            t[pos] += 1;
            if t[pos] < n {
                break;
            }
            t[pos] = 0;
        }
    }
}

/// Every generator tuple of degree `degree` whose `∂∂` is nonzero.
pub fn boundary_squared_failures(s: &FiniteBinarySystem, degree: usize) -> Result<Vec<Vec<usize>>> {
    let mut bad = Vec::new();
    let mut err = None;
    for_each_tuple(s.n(), degree, |t| {
        if err.is_some() {
            return;
        }
        match boundary(&Chain::generator(t.to_vec()), s).and_then(|b| boundary(&b, s)) {
            Ok(bb) if !bb.is_zero() => bad.push(t.to_vec()),
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(bad),
    }
}

/// Real function on `{0..n}^degree`, stored densely in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub n: usize,
    values: Vec<f64>,
}

impl Cochain {
    pub fn zero(n: usize, degree: usize) -> Self {
        Self {
            degree,
            n,
            values: vec![0.0; n.pow(degree as u32)],
        }
    }

    pub fn from_fn(n: usize, degree: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut values = Vec::with_capacity(n.pow(degree as u32));
        for_each_tuple(n, degree, |t| values.push(f(t)));
        Self { degree, n, values }
    }

    fn index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.n + x)
    }

    pub fn get(&self, t: &[usize]) -> f64 {
        self.values[self.index(t)]
    }

    pub fn set(&mut self, t: &[usize], v: f64) {
        let i = self.index(t);
        self.values[i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `φ(Σ cᵢ tᵢ) = Σ cᵢ φ(tᵢ)`.
    pub fn evaluate(&self, c: &Chain) -> Result<f64> {
        if c.degree != self.degree {
            return Err(Error::Shape(format!("chain degree {} vs cochain degree {}", c.degree, self.degree)));
        }
        Ok(c.terms().map(|(t, v)| v as f64 * self.get(t)).sum())
    }

    /// JSON object mapping `"i,j,…"` to values.
    pub fn to_json(&self) -> String {
        let mut map = BTreeMap::new();
        for_each_tuple(self.n, self.degree, |t| {
            let key = t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            map.insert(key, self.get(t));
        });
        serde_json::to_string(&map).expect("cochain serializes")
    }

    /// Reads the [`Cochain::to_json`] format; missing tuples are an error, since cochains are total.
    pub fn from_json(text: &str, n: usize, degree: usize) -> Result<Self> {
        let map: BTreeMap<String, f64> = serde_json::from_str(text)?;
        let mut c = Self::zero(n, degree);
        let mut seen = vec![false; c.values.len()];
        for (k, v) in map {
            let t: Vec<usize> = k
                .split(',')
                .map(|p| p.trim().parse::<usize>().map_err(|e| Error::Parse(format!("key {k:?}: {e}"))))
                .collect::<Result<_>>()?;
            if t.len() != degree || t.iter().any(|&x| x >= n) {
                return Err(Error::Structure(format!("key {k:?} is not a {degree}-tuple over 0..{n}")));
            }
            let i = c.index(&t);
            c.values[i] = v;
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(Error::Structure(format!("cochain misses tuple number {i}")));
        }
        Ok(c)
    }
}

/// `(δφ)(t) = φ(∂t)`.
pub fn coboundary(phi: &Cochain, s: &FiniteBinarySystem) -> Result<Cochain> {
    if phi.n != s.n() {
        return Err(Error::Shape("cochain and system sizes differ".into()));
    }
    let mut out = Cochain::zero(s.n(), phi.degree + 1);
    let mut err = None;
    for_each_tuple(s.n(), phi.degree + 1, |t| {
        if err.is_some() {
            return;
        }
        match boundary(&Chain::generator(t.to_vec()), s).and_then(|b| {
            if b.degree != phi.degree {
                return Ok(0.0);
            }
            phi.evaluate(&b)
        }) {
            Ok(v) => out.set(t, v),
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleCheck {
    pub holds: bool,
    pub worst_defect: f64,
    pub witness: Option<[usize; 3]>,
}

/// `φ(x₁,x₃) + φ(x₁*x₃, x₂*x₃) = φ(x₁,x₂) + φ(x₁*x₂, x₃)` on all triples; `tol = 0` is exact.
pub fn is_2cocycle(phi: &Cochain, s: &FiniteBinarySystem, tol: f64) -> Result<CocycleCheck> {
    if phi.degree != 2 || phi.n != s.n() {
        return Err(Error::Shape("2-cocycle check needs a degree-2 cochain on the same system".into()));
    }
    let mut worst = 0.0f64;
    let mut witness = None;
    let mut holds = true;
    for_each_tuple(s.n(), 3, |t| {
        let (a, b, c) = (t[0], t[1], t[2]);
        let d = phi.get(&[a, c]) + phi.get(&[s.op(a, c), s.op(b, c)]) - phi.get(&[a, b]) - phi.get(&[s.op(a, b), c]);
        let d = d.abs();
        if d > tol {
            holds = false;
        }
        if d > worst || (witness.is_none() && d > tol) {
            worst = worst.max(d);
            witness = Some([a, b, c]);
        }
    });
    Ok(CocycleCheck {
        holds,
        worst_defect: worst,
        witness: if holds { None } else { witness },
    })
}

/// `*`-table of an operator family, extended by products up to a closure depth.
#[derive(Clone, Debug)]
pub struct OperatorTable {
    elements: Vec<PositiveOperator>,
    /// `table[i][j]` is the index of `elements[i] * elements[j]`, if that product was matched.
    table: Vec<Vec<Option<usize>>>,
    base_len: usize,
    pub closure_depth: usize,
    /// Products that were not matched to any element.
    pub out_of_family: usize,
}

/// Relative distance under which two products are the same element.
pub const MATCH_TOL: f64 = 1e-9;
/// Cap on the closed family.
pub const MAX_ELEMENTS: usize = 512;

impl OperatorTable {
    pub fn build(base: &[PositiveOperator], closure_depth: usize) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::Shape("operator table needs at least one member".into()));
        }
        let dim = base[0].dim();
        for b in base {
            crate::error::check_same_dim(dim, b.dim())?;
        }
        let mut elements = base.to_vec();
        let mut computed = 0; // elements[..computed] have all their pairwise products
        for _ in 0..closure_depth {
            let n = elements.len();
            let mut fresh = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i < computed && j < computed {
                        continue;
                    }
                    let p = star(&elements[i], &elements[j])?;
                    let known = elements.iter().chain(fresh.iter()).any(|e: &PositiveOperator| {
                        relative_defect(e.matrix(), p.matrix()) < MATCH_TOL
                    });
                    if !known {
                        fresh.push(p);
                    }
                }
            }
            computed = n;
            elements.extend(fresh);
            if elements.len() > MAX_ELEMENTS {
                return Err(Error::Precondition(format!(
                    "closure exceeded {MAX_ELEMENTS} elements; lower the closure depth"
                )));
            }
        }
        let m = elements.len();
        let mut table = vec![vec![None; m]; m];
        let mut out_of_family = 0;
        for i in 0..m {
            for j in 0..m {
                let p = star(&elements[i], &elements[j])?;
                let hit = elements.iter().position(|e| relative_defect(e.matrix(), p.matrix()) < MATCH_TOL);
                if hit.is_none() {
                    out_of_family += 1;
                }
                table[i][j] = hit;
            }
        }
        Ok(Self {
            elements,
            table,
            base_len: base.len(),
            closure_depth,
            out_of_family,
        })
    }

    pub fn elements(&self) -> &[PositiveOperator] {
        &self.elements
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }

    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        self.table[i][j]
    }

    /// The table as a finite binary system, when every product was matched.
    pub fn to_binary_system(&self) -> Option<FiniteBinarySystem> {
        let rows: Option<Vec<Vec<usize>>> = self.table.iter().map(|r| r.iter().copied().collect()).collect();
        FiniteBinarySystem::new(rows?).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleRecord {
    pub triple: [usize; 3],
    /// `φ(x₁,x₃) + φ(x₁*x₃, x₂*x₃) - φ(x₁,x₂) - φ(x₁*x₂, x₃)` with `φ(x,y) = tr x + tr y`.
    pub d: f64,
    /// `Γ(x₃; x₁, x₂)`.
    pub gamma: f64,
    pub concordant: bool,
    /// Some product in the triple has trace below the orthogonality floor.
    pub orthogonal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceCocycleReport {
    pub triples: Vec<TripleRecord>,
    pub discordant: usize,
    pub tol: f64,
    pub closure_depth: usize,
    pub family_size: usize,
    pub closed_size: usize,
    pub out_of_family: usize,
}

/// Evaluates the trace cocycle defect and `Γ` on every ordered triple of `family`.
pub fn trace_cocycle_vs_gamma(family: &[DensityOperator], tol: f64, closure_depth: usize) -> Result<TraceCocycleReport> {
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let c = relative_commutator(family[i].matrix(), family[j].matrix())?;
            if !(c < 1e-10) {
                return Err(Error::Precondition(format!(
                    "members {i} and {j} do not commute (relative commutator {c:e})"
                )));
            }
        }
    }
    let base: Vec<PositiveOperator> = family.iter().map(|d| d.as_positive().clone()).collect();
    let table = OperatorTable::build(&base, closure_depth.max(1))?;
    let el = table.elements();
    let tr_prod = |i: usize, j: usize| -> Result<f64> {
        match table.product(i, j) {
            Some(k) => Ok(el[k].trace()),
            None => Ok(star(&el[i], &el[j])?.trace()),
        }
    };
    let phi = |x: f64, y: f64| x + y;
    let n = family.len();
    let mut triples = Vec::with_capacity(n * n * n);
    let mut discordant = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (ta, tb, tc) = (el[a].trace(), el[b].trace(), el[c].trace());
                let (f13, f23, f12) = (tr_prod(a, c)?, tr_prod(b, c)?, tr_prod(a, b)?);
                let d = phi(ta, tc) + phi(f13, f23) - phi(ta, tb) - phi(f12, tc);
                let g = gamma(&family[c], &family[a], &family[b])?;
                let concordant = (d.abs() < tol) == (g.abs() < tol);
                if !concordant {
                    discordant += 1;
                }
                triples.push(TripleRecord {
                    triple: [a, b, c],
                    d,
                    gamma: g,
                    concordant,
                    orthogonal: [f13, f23, f12].iter().any(|&f| f < ORTHOGONALITY_FLOOR),
                });
            }
        }
    }
    Ok(TraceCocycleReport {
        triples,
        discordant,
        tol,
        closure_depth: table.closure_depth,
        family_size: n,
        closed_size: el.len(),
        out_of_family: table.out_of_family,
    })
}
