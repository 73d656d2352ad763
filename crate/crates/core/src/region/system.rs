use std::fmt;

use serde::{Deserialize, Serialize};

use super::{RegionError, Result};
use crate::scalar::Scalar;

/// `coeffs · x >= constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality<S> {
    pub coeffs: Vec<S>,
    pub constant: S,
}

impl<S: Scalar> Inequality<S> {
    pub fn slack(&self, point: &[S]) -> S {
        let lhs = self
            .coeffs
            .iter()
            .zip(point)
            .fold(S::zero(), |acc, (a, x)| acc + a.clone() * x.clone());
        lhs - self.constant.clone()
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible())
    }

    /// Scales so the largest coefficient magnitude is one.
    fn normalized(mut self) -> Self {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.abs())
            .fold(S::zero(), |a, b| if b > a { b } else { a });
        if !scale.is_negligible() {
            for c in &mut self.coeffs {
                *c = c.clone() / scale.clone();
            }
            self.constant = self.constant.clone() / scale;
        }
        self
    }

    fn same_direction(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| (a.clone() - b.clone()).is_negligible())
    }
}

/// A polyhedron `{x : A x >= b}` over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequalitySystem<S> {
    vars: Vec<String>,
    rows: Vec<Inequality<S>>,
}

impl<S: Scalar> LinearInequalitySystem<S> {
    pub fn new<I: Into<String>>(vars: impl IntoIterator<Item = I>) -> Self {
        LinearInequalitySystem {
            vars: vars.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Inequality<S>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| RegionError::UnknownVariable(name.to_string()))
    }

    fn check_arity(&self, coeffs: &[S]) -> Result<()> {
        if coeffs.len() != self.vars.len() {
            return Err(RegionError::Invalid(format!(
                "row has {} coefficients for {} variables",
                coeffs.len(),
                self.vars.len()
            )));
        }
        Ok(())
    }

    pub fn add_geq(&mut self, coeffs: Vec<S>, constant: S) -> Result<()> {
        self.check_arity(&coeffs)?;
        self.rows.push(Inequality { coeffs, constant });
        Ok(())
    }

    pub fn add_leq(&mut self, coeffs: Vec<S>, constant: S) -> Result<()> {
        self.add_geq(coeffs.into_iter().map(|c| -c).collect(), -constant)
    }

    /// Stored as the pair `a x >= b`, `-a x >= -b`.
    pub fn add_eq(&mut self, coeffs: Vec<S>, constant: S) -> Result<()> {
        self.add_geq(coeffs.clone(), constant.clone())?;
        self.add_leq(coeffs, constant)
    }

    /// Adds `Σ terms >= constant` where terms name variables with coefficients.
    pub fn add_named(&mut self, terms: &[(&str, f64)], constant: S) -> Result<()> {
        let mut coeffs = vec![S::zero(); self.vars.len()];
        for (name, c) in terms {
            let i = self.var_index(name)?;
            coeffs[i] = coeffs[i].clone() + S::from_real(*c);
        }
        self.add_geq(coeffs, constant)
    }

    /// Membership with the scalar type's default tolerance.
    pub fn contains(&self, point: &[S]) -> bool {
        self.contains_tol(point, &S::tolerance())
    }

    pub fn contains_tol(&self, point: &[S], tol: &S) -> bool {
        point.len() == self.vars.len() && self.rows.iter().all(|r| r.slack(point) >= -tol.clone())
    }

    pub fn convert<T: Scalar>(&self) -> LinearInequalitySystem<T> {
        LinearInequalitySystem {
            vars: self.vars.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| Inequality {
                    coeffs: r.coeffs.iter().map(|c| T::from_real(c.to_real())).collect(),
                    constant: T::from_real(r.constant.to_real()),
                })
                .collect(),
        }
    }

    /// A serializable float copy.
    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            vars: self.vars.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| RowFile {
                    coeffs: r.coeffs.iter().map(|c| c.to_real()).collect(),
                    constant: r.constant.to_real(),
                })
                .collect(),
        }
    }

    /// Projects out one variable by Fourier-Motzkin elimination.
    pub fn eliminate(&self, var: usize) -> Self {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut keep = Vec::new();
        for r in &self.rows {
            let c = &r.coeffs[var];
            if c.is_negligible() {
                keep.push(drop_coord(r, var));
            } else if c.is_positive() {
                pos.push(r);
            } else {
                neg.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                let a = p.coeffs[var].clone();
                let b = -n.coeffs[var].clone();
                let coeffs: Vec<S> = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .enumerate()
                    .filter(|&(i, _)| i != var)
                    .map(|(_, (x, y))| b.clone() * x.clone() + a.clone() * y.clone())
                    .collect();
                let constant = b.clone() * p.constant.clone() + a.clone() * n.constant.clone();
                keep.push(Inequality { coeffs, constant });
            }
        }
        let mut vars = self.vars.clone();
        vars.remove(var);
        LinearInequalitySystem {
            vars,
            rows: prune(keep),
        }
    }

    /// Removes rows implied by a parallel row with a larger constant, and
    /// satisfied constant rows.
    pub fn pruned(&self) -> Self {
        LinearInequalitySystem {
            vars: self.vars.clone(),
            rows: prune(self.rows.clone()),
        }
    }

    /// Minimum of `objective · x` and a vertex attaining it.
    pub fn minimize(&self, objective: &[S]) -> Result<(S, Vec<S>)> {
        if objective.len() != self.vars.len() {
            return Err(RegionError::Invalid("objective arity".into()));
        }
        lp_minimize(self, objective)
    }
}

fn drop_coord<S: Scalar>(r: &Inequality<S>, var: usize) -> Inequality<S> {
    let mut coeffs = r.coeffs.clone();
    coeffs.remove(var);
    Inequality {
        coeffs,
        constant: r.constant.clone(),
    }
}

fn prune<S: Scalar>(rows: Vec<Inequality<S>>) -> Vec<Inequality<S>> {
    let mut out: Vec<Inequality<S>> = Vec::with_capacity(rows.len());
    let mut contradiction = None;
    for r in rows.into_iter().map(Inequality::normalized) {
        if r.is_trivial() {
            // 0 >= c: drop when satisfied, keep one witness otherwise
            if r.constant > S::tolerance() {
                contradiction.get_or_insert(r);
            }
            continue;
        }
        match out.iter_mut().find(|o| o.same_direction(&r)) {
            Some(o) => {
                if r.constant > o.constant {
                    o.constant = r.constant;
                }
            }
            None => out.push(r),
        }
    }
    out.extend(contradiction);
    out
}

/// Projects away the named variables, in order.
pub fn fme_eliminate<S: Scalar>(system: &LinearInequalitySystem<S>, drop: &[&str]) -> Result<LinearInequalitySystem<S>> {
    let mut out = system.clone();
    for name in drop {
        let i = out.var_index(name)?;
        out = out.eliminate(i);
    }
    Ok(out)
}

/// Solves the square system `M x = rhs` by Gaussian elimination with
/// partial pivoting; `None` when singular.
pub(crate) fn solve<S: Scalar>(mut m: Vec<Vec<S>>, mut rhs: Vec<S>) -> Option<Vec<S>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot][col].is_negligible() {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / m[col][col].clone();
            for c in col..n {
                let v = m[col][c].clone();
                m[r][c] = m[r][c].clone() - f.clone() * v;
            }
            let v = rhs[col].clone();
            rhs[r] = rhs[r].clone() - f * v;
        }
    }
    Some((0..n).map(|i| rhs[i].clone() / m[i][i].clone()).collect())
}

fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).max_by(|&a, &b| {
            m[a][c]
                .abs()
                .partial_cmp(&m[b][c].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        }) else {
            break;
        };
        if m[p][c].is_negligible() {
            continue;
        }
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone() / m[r][c].clone();
                for j in c..cols {
                    let v = m[r][j].clone();
                    m[i][j] = m[i][j].clone() - f.clone() * v;
                }
            }
        }
        r += 1;
    }
    r
}

fn combinations(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Null vector of an `(n-1) x n` matrix of rank `n-1`, by cofactors.
fn null_vector<S: Scalar>(rows: &[&Vec<S>], n: usize) -> Option<Vec<S>> {
    let mut d = Vec::with_capacity(n);
    for j in 0..n {
        let minor: Vec<Vec<S>> = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let det = determinant(minor);
        d.push(if j % 2 == 0 { det } else { -det });
    }
    if d.iter().all(|v| v.is_negligible()) {
        None
    } else {
        Some(d)
    }
}

fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut det = S::one();
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&a, &b| {
            m[a][c]
                .abs()
                .partial_cmp(&m[b][c].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        }) else {
            return S::one();
        };
        if m[p][c].is_zero() {
            return S::zero();
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det = det * m[c][c].clone();
        for r in c + 1..n {
            let f = m[r][c].clone() / m[c][c].clone();
            for j in c..n {
                let v = m[c][j].clone();
                m[r][j] = m[r][j].clone() - f.clone() * v;
            }
        }
    }
    det
}

/// Vertex enumeration: every `n`-subset of rows is solved as equalities and
/// kept when feasible. Unboundedness is detected on the recession cone's
/// extreme rays, each the null vector of `n-1` rows.
fn lp_minimize<S: Scalar>(sys: &LinearInequalitySystem<S>, objective: &[S]) -> Result<(S, Vec<S>)> {
    let n = sys.vars.len();
    let tol = S::tolerance();
    let normals: Vec<Vec<S>> = sys.rows.iter().map(|r| r.coeffs.clone()).collect();
    if n == 0 {
        return if sys.rows.iter().all(|r| r.constant <= tol) {
            Ok((S::zero(), Vec::new()))
        } else {
            Err(RegionError::Infeasible)
        };
    }
    if normals.is_empty() || rank(&normals) < n {
        return Err(RegionError::Unbounded);
    }
    let mut best: Option<(S, Vec<S>)> = None;
    combinations(sys.rows.len(), n, |subset| {
        let m: Vec<Vec<S>> = subset.iter().map(|&i| normals[i].clone()).collect();
        let rhs: Vec<S> = subset.iter().map(|&i| sys.rows[i].constant.clone()).collect();
        if let Some(x) = solve(m, rhs) {
            if sys.contains_tol(&x, &tol) {
                let v = dot(objective, &x);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, x));
                }
            }
        }
    });
    let Some(best) = best else {
        return Err(RegionError::Infeasible);
    };
    let mut unbounded = false;
    combinations(sys.rows.len(), n - 1, |subset| {
        if unbounded {
            return;
        }
        let rows: Vec<&Vec<S>> = subset.iter().map(|&i| &normals[i]).collect();
        if let Some(d) = null_vector(&rows, n) {
            for sign in [S::one(), -S::one()] {
                let d: Vec<S> = d.iter().map(|v| v.clone() * sign.clone()).collect();
                let scale = d.iter().map(|v| v.abs()).fold(S::zero(), |a, b| if b > a { b } else { a });
                let rec = normals.iter().all(|a| dot(a, &d) / scale.clone() >= -tol.clone());
                if rec && dot(objective, &d) / scale.clone() < -tol.clone() {
                    unbounded = true;
                }
            }
        }
    });
    if unbounded {
        return Err(RegionError::Unbounded);
    }
    Ok(best)
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

impl<S: Scalar + fmt::Display> fmt::Display for LinearInequalitySystem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let terms: Vec<String> = r
                .coeffs
                .iter()
                .zip(&self.vars)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, v)| format!("{c}*{v}"))
                .collect();
            let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            writeln!(f, "{lhs} >= {}", r.constant)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFile {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub vars: Vec<String>,
    pub rows: Vec<RowFile>,
}
