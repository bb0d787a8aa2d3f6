//! Nonnegative integer matrices: strongly connected components, spectral
//! radius, period and Perron analysis.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Successive power-iteration quotients closer than this count as converged.
pub const POWER_TOLERANCE: f64 = 1e-13;
/// Iteration cap for power iteration on a single component.
pub const POWER_MAX_ITERATIONS: usize = 500_000;
/// Required gap between the spectral radius and every other root modulus.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

/// Square matrix with nonnegative integer entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<u64>>")]
pub struct IntMatrix {
    dim: usize,
    data: Vec<u64>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 0 {
                    return Err(Error::InvalidMatrix(format!("entry ({i}, {j}) is negative")));
                }
                data.push(v as u64);
            }
        }
        Ok(IntMatrix { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        IntMatrix {
            dim,
            data: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = IntMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.row(i).iter().sum()
    }

    pub fn max_row_sum(&self) -> u64 {
        (0..self.dim).map(|i| self.row_sum(i)).max().unwrap_or(0)
    }

    pub fn min_row_sum(&self) -> u64 {
        (0..self.dim).map(|i| self.row_sum(i)).min().unwrap_or(0)
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> IntMatrix {
        let dim = indices.len();
        let mut data = Vec::with_capacity(dim * dim);
        for &i in indices {
            for &j in indices {
                data.push(self.get(i, j));
            }
        }
        IntMatrix { dim, data }
    }

    /// `self^p` with overflow checking.
    pub fn checked_pow(&self, p: u32) -> Option<IntMatrix> {
        let mut result = IntMatrix::identity(self.dim);
        for _ in 0..p {
            result = result.checked_mul(self)?;
        }
        Some(result)
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Option<IntMatrix> {
        let n = self.dim;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(l, j);
                    if b != 0 {
                        let v = out.get(i, j).checked_add(a.checked_mul(b)?)?;
                        out.set(i, j, v);
                    }
                }
            }
        }
        Some(out)
    }

    /// Successors of `i` in the digraph with an edge `i -> j` whenever `M(i, j) > 0`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(j, _)| j)
    }

    /// Vertices with a path (possibly empty) to some vertex in `targets`.
    pub fn can_reach(&self, targets: &[usize]) -> Vec<bool> {
        let n = self.dim;
        let mut reach = vec![false; n];
        let mut stack = Vec::new();
        for &t in targets {
            if !reach[t] {
                reach[t] = true;
                stack.push(t);
            }
        }
        while let Some(j) = stack.pop() {
            for i in 0..n {
                if !reach[i] && self.get(i, j) > 0 {
                    reach[i] = true;
                    stack.push(i);
                }
            }
        }
        reach
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        IntMatrix::from_rows(rows)
    }
}

impl From<IntMatrix> for Vec<Vec<u64>> {
    fn from(m: IntMatrix) -> Self {
        m.rows()
    }
}

/// One strongly connected component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    /// A single vertex with no self-loop.
    pub trivial: bool,
}

/// SCC partition with the condensation DAG in topological order: every edge
/// between components goes from a lower to a higher component index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condensation {
    pub components: Vec<Component>,
    /// Component index of each vertex.
    pub component_of: Vec<usize>,
    /// Distinct condensation edges `(from, to)`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl Condensation {
    pub fn nontrivial(&self) -> impl Iterator<Item = (usize, &Component)> {
        self.components.iter().enumerate().filter(|(_, c)| !c.trivial)
    }
}

/// Tarjan's algorithm.
pub fn scc_decompose(m: &IntMatrix) -> Condensation {
    struct State {
        counter: usize,
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        found: Vec<Vec<usize>>,
    }

    fn visit(v: usize, m: &IntMatrix, st: &mut State) {
        st.index[v] = Some(st.counter);
        st.low[v] = st.counter;
        st.counter += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for w in m.successors(v) {
            match st.index[w] {
                None => {
                    visit(w, m, st);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("tarjan stack underflow");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            st.found.push(comp);
        }
    }

    let n = m.dim();
    let mut st = State {
        counter: 0,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        found: Vec::new(),
    };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(v, m, &mut st);
        }
    }
    // Tarjan emits sinks first.
    st.found.reverse();
    let mut component_of = vec![0; n];
    for (c, verts) in st.found.iter().enumerate() {
        for &v in verts {
            component_of[v] = c;
        }
    }
    let components = st
        .found
        .into_iter()
        .map(|vertices| {
            let trivial = vertices.len() == 1 && m.get(vertices[0], vertices[0]) == 0;
            Component { vertices, trivial }
        })
        .collect();
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| m.successors(i).map(move |j| (i, j)))
        .map(|(i, j)| (component_of[i], component_of[j]))
        .filter(|(a, b)| a != b)
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Condensation {
        components,
        component_of,
        edges,
    }
}

/// Spectral radius of the principal submatrix on a strongly connected
/// vertex set with at least one edge.
///
/// Runs power iteration on `I + M_C`, which is primitive whenever `M_C` is
/// irreducible, until the Collatz-Wielandt bounds meet.
pub fn component_spectral_radius(m: &IntMatrix, vertices: &[usize]) -> Result<f64> {
    let sub = m.submatrix(vertices);
    let n = sub.dim();
    // Constant row sums give the radius exactly.
    if sub.min_row_sum() == sub.max_row_sum() {
        return Ok(sub.max_row_sum() as f64);
    }
    let a: Vec<f64> = sub.data.iter().map(|&v| v as f64).collect();
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    for _ in 0..POWER_MAX_ITERATIONS {
        for i in 0..n {
            let row = &a[i * n..(i + 1) * n];
            y[i] = x[i] + row.iter().zip(&x).map(|(r, v)| r * v).sum::<f64>();
        }
        // Collatz-Wielandt: min and max of y_i / x_i bracket rho(I + M_C).
        let (lo, hi) = x.iter().zip(&y).fold((f64::INFINITY, 0.0f64), |(lo, hi), (xi, yi)| {
            let r = yi / xi;
            (lo.min(r), hi.max(r))
        });
        if hi - lo < POWER_TOLERANCE * hi {
            return Ok(0.5 * (lo + hi) - 1.0);
        }
        let norm: f64 = y.iter().sum();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    Err(Error::NonConvergence {
        iterations: POWER_MAX_ITERATIONS,
    })
}

/// `rho(M)`: the maximum over nontrivial components; 0 if the digraph is acyclic.
pub fn spectral_radius(m: &IntMatrix) -> Result<f64> {
    let cond = scc_decompose(m);
    let mut best = 0.0f64;
    for (_, comp) in cond.nontrivial() {
        best = best.max(component_spectral_radius(m, &comp.vertices)?);
    }
    Ok(best)
}

/// BFS depths from the smallest vertex of `vertices`, restricted to them.
fn bfs_levels(m: &IntMatrix, vertices: &[usize]) -> Vec<Option<usize>> {
    let mut inside = vec![false; m.dim()];
    for &v in vertices {
        inside[v] = true;
    }
    let mut level = vec![None; m.dim()];
    let start = vertices[0];
    level[start] = Some(0);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let lu = level[u].unwrap();
        for w in m.successors(u) {
            if inside[w] && level[w].is_none() {
                level[w] = Some(lu + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

/// Gcd of closed-walk lengths in a strongly connected vertex set.
pub fn period(m: &IntMatrix, vertices: &[usize]) -> Result<u64> {
    if vertices.is_empty() || (vertices.len() == 1 && m.get(vertices[0], vertices[0]) == 0) {
        return Err(Error::TrivialComponent);
    }
    let level = bfs_levels(m, vertices);
    let mut g: u64 = 0;
    for &u in vertices {
        let lu = level[u].ok_or_else(|| {
            Error::InvalidMatrix("vertex set is not strongly connected".into())
        })? as i64;
        for w in m.successors(u) {
            if let Some(lw) = level[w] {
                if vertices.binary_search(&w).is_ok() {
                    g = g.gcd(&((lu + 1 - lw as i64).unsigned_abs()));
                }
            }
        }
    }
    if g == 0 {
        return Err(Error::TrivialComponent);
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerronVerdict {
    /// Primitive dominant block and `rho > 1` strictly dominates the other roots.
    Perron,
    /// Period `p > 1`; `rho^p` passes the dominance test on one cyclic class.
    PerronPower,
    /// No cycle: `rho = 0`.
    Zero,
    /// Dominance could not be certified within tolerance, or `rho = 1`
    /// with period 1.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronAnalysis {
    pub spectral_radius: f64,
    /// Vertices of the component attaining the radius (empty when acyclic).
    pub dominant_component: Vec<usize>,
    pub period: u64,
    pub verdict: PerronVerdict,
    /// `det(xI - M)`, leading coefficient first.
    #[serde(serialize_with = "decimal_strings")]
    pub char_poly: Vec<BigInt>,
    /// Polynomial on which dominance was tested.
    #[serde(serialize_with = "decimal_strings")]
    pub dominance_poly: Vec<BigInt>,
    /// `rho^p` minus the largest other root modulus of `dominance_poly`.
    pub dominance_gap: Option<f64>,
    /// `rho^p` equals 1, the boundary case excluded from the Perron numbers.
    pub unit_radius: bool,
}

fn decimal_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

/// Spectral radius, dominant component, its period, and a numeric check that
/// `rho^p` is a Perron number.
///
/// For period `p > 1` the test runs on `M_C^p` restricted to one cyclic
/// class of the dominant component, where `rho^p` is a simple dominant root.
pub fn perron_analysis(m: &IntMatrix) -> Result<PerronAnalysis> {
    let char_poly = poly::char_poly(m)?;
    let cond = scc_decompose(m);
    let mut best: Option<(f64, &Component)> = None;
    for (_, comp) in cond.nontrivial() {
        let rho = component_spectral_radius(m, &comp.vertices)?;
        let better = best.map_or(true, |(b, cur): (f64, &Component)| {
            rho > b + DOMINANCE_TOLERANCE
                || (rho >= b - DOMINANCE_TOLERANCE && comp.vertices[0] < cur.vertices[0])
        });
        if better {
            best = Some((rho, comp));
        }
    }
    let Some((rho, comp)) = best else {
        return Ok(PerronAnalysis {
            spectral_radius: 0.0,
            dominant_component: Vec::new(),
            period: 1,
            verdict: PerronVerdict::Zero,
            char_poly,
            dominance_poly: Vec::new(),
            dominance_gap: None,
            unit_radius: false,
        });
    };
    let p = period(m, &comp.vertices)?;
    let block = if p == 1 {
        Some(m.submatrix(&comp.vertices))
    } else {
        cyclic_class_power(m, &comp.vertices, p)
    };
    let target = rho.powi(p as i32);
    let unit_radius = (target - 1.0).abs() <= DOMINANCE_TOLERANCE;
    let (dominance_poly, gap) = match block {
        Some(b) => {
            let cp = poly::char_poly(&b)?;
            let gap = dominance_gap(&cp, target);
            (cp, gap)
        }
        None => (Vec::new(), None),
    };
    let dominant = gap.is_some_and(|g| g > DOMINANCE_TOLERANCE);
    let verdict = if !dominant {
        PerronVerdict::Undetermined
    } else if p > 1 {
        PerronVerdict::PerronPower
    } else if target > 1.0 + DOMINANCE_TOLERANCE {
        PerronVerdict::Perron
    } else {
        PerronVerdict::Undetermined
    };
    Ok(PerronAnalysis {
        spectral_radius: rho,
        dominant_component: comp.vertices.clone(),
        period: p,
        verdict,
        char_poly,
        dominance_poly,
        dominance_gap: gap,
        unit_radius,
    })
}

/// `M_C^p` restricted to the vertices at BFS depth divisible by `p`.
fn cyclic_class_power(m: &IntMatrix, vertices: &[usize], p: u64) -> Option<IntMatrix> {
    let level = bfs_levels(m, vertices);
    let class: Vec<usize> = vertices
        .iter()
        .copied()
        .filter(|&v| level[v].is_some_and(|l| l as u64 % p == 0))
        .collect();
    let sub = m.submatrix(vertices);
    let power = sub.checked_pow(u32::try_from(p).ok()?)?;
    let local: Vec<usize> = class
        .iter()
        .map(|v| vertices.binary_search(v).unwrap())
        .collect();
    Some(power.submatrix(&local))
}

/// `target` minus the largest modulus among the other roots; `+inf` when
/// `target` is the only root.
fn dominance_gap(cp: &[BigInt], target: f64) -> Option<f64> {
    let sf = poly::square_free_part(cp);
    let roots = poly::complex_roots(&sf);
    if roots.is_empty() {
        return None;
    }
    let closest = roots
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - target)
                .norm()
                .total_cmp(&(b.1 - target).norm())
        })
        .map(|(i, _)| i)?;
    if (roots[closest] - target).norm() > 1e-6 * target.max(1.0) {
        return None;
    }
    let other = roots
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != closest)
        .map(|(_, z)| z.norm())
        .fold(f64::NEG_INFINITY, f64::max);
    Some(target - other)
}
