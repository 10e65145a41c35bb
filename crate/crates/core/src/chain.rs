//! Finite Markov chains over machine states: decomposition into recurrent
//! classes, absorption probabilities and stationary distributions.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic needed by the solvers, for `f64` and exact rationals.
pub trait Field: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// Used for pivot selection and convergence tests only.
    fn magnitude(&self) -> f64;
    const EXACT: bool;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    const EXACT: bool = false;
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::MAX)
    }
    const EXACT: bool = true;
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Markov chain with a per-node expected shift.
#[derive(Clone, Debug, PartialEq)]
pub struct StateChain<F> {
    pub initial: Vec<F>,
    /// Sparse rows, sorted by column, without zero entries.
    pub rows: Vec<Vec<(usize, F)>>,
    pub expected_shift: Vec<F>,
    /// Closed strongly connected components, each sorted, ordered by first node.
    pub classes: Vec<Vec<usize>>,
    pub transient: Vec<usize>,
    /// Probability of ending in each class, from the initial distribution.
    pub absorption: Vec<F>,
}

impl<F: Field> StateChain<F> {
    pub fn new(initial: Vec<F>, rows: Vec<Vec<(usize, F)>>, expected_shift: Vec<F>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, F)> = Vec::with_capacity(r.len());
                for (j, p) in r {
                    match merged.last_mut() {
                        Some(last) if last.0 == j => last.1 = last.1.add(&p),
                        _ => merged.push((j, p)),
                    }
                }
                merged.retain(|e| !e.1.is_zero());
                merged
            })
            .collect();
        StateChain { initial, rows, expected_shift, classes: Vec::new(), transient: Vec::new(), absorption: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_sum(&self, i: usize) -> F {
        self.rows[i].iter().fold(F::zero(), |s, e| s.add(&e.1))
    }

    /// Dense transition probability.
    pub fn prob(&self, i: usize, j: usize) -> F {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| F::zero())
    }

    /// Fills `classes`, `transient` and `absorption`.
    pub fn decompose(&mut self) -> Result<()> {
        let n = self.len();
        let comp = scc(n, |i| self.rows[i].iter().map(|e| e.0));
        let ncomp = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut closed = vec![true; ncomp];
        for i in 0..n {
            if self.rows[i].iter().any(|e| comp[e.0] != comp[i]) {
                closed[comp[i]] = false;
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
        for (i, &c) in comp.iter().enumerate() {
            members[c].push(i);
        }
        let mut classes: Vec<Vec<usize>> =
            (0..ncomp).filter(|&c| closed[c]).map(|c| std::mem::take(&mut members[c])).collect();
        classes.sort_by_key(|c| c[0]);
        let mut class_of = vec![usize::MAX; n];
        for (k, c) in classes.iter().enumerate() {
            for &i in c {
                class_of[i] = k;
            }
        }
        let transient: Vec<usize> = (0..n).filter(|&i| class_of[i] == usize::MAX).collect();
        let visits = self.expected_visits(&transient)?;
        let mut absorption = vec![F::zero(); classes.len()];
        for i in 0..n {
            if class_of[i] != usize::MAX {
                absorption[class_of[i]] = absorption[class_of[i]].add(&self.initial[i]);
            }
        }
        for (t, &i) in transient.iter().enumerate() {
            if visits[t].is_zero() {
                continue;
            }
            for (j, p) in &self.rows[i] {
                if class_of[*j] != usize::MAX {
                    absorption[class_of[*j]] = absorption[class_of[*j]].add(&visits[t].mul(p));
                }
            }
        }
        self.classes = classes;
        self.transient = transient;
        self.absorption = absorption;
        Ok(())
    }

    /// Expected number of visits of each transient node: v (I - P_TT) = init_T.
    fn expected_visits(&self, transient: &[usize]) -> Result<Vec<F>> {
        let m = transient.len();
        if m == 0 {
            return Ok(Vec::new());
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &i) in transient.iter().enumerate() {
            pos[i] = k;
        }
        if m <= DENSE_LIMIT || F::EXACT {
            // Transposed system: (I - P_TT)^T v^T = init_T^T.
            let mut a = vec![vec![F::zero(); m]; m];
            for (k, &i) in transient.iter().enumerate() {
                a[k][k] = F::one();
                for (j, p) in &self.rows[i] {
                    if pos[*j] != usize::MAX {
                        let c = pos[*j];
                        a[c][k] = a[c][k].sub(p);
                    }
                }
            }
            let b: Vec<F> = transient.iter().map(|&i| self.initial[i].clone()).collect();
            return solve_dense(a, b);
        }
        // Propagate the remaining transient mass until it vanishes.
        let mut mass: Vec<F> = transient.iter().map(|&i| self.initial[i].clone()).collect();
        let mut visits = mass.clone();
        for _ in 0..ITER_CAP {
            let mut nxt = vec![F::zero(); m];
            for (k, &i) in transient.iter().enumerate() {
                if mass[k].is_zero() {
                    continue;
                }
                for (j, p) in &self.rows[i] {
                    if pos[*j] != usize::MAX {
                        nxt[pos[*j]] = nxt[pos[*j]].add(&mass[k].mul(p));
                    }
                }
            }
            let left: f64 = nxt.iter().map(|x| x.magnitude()).sum();
            for k in 0..m {
                visits[k] = visits[k].add(&nxt[k]);
            }
            mass = nxt;
            if left < 1e-15 {
                return Ok(visits);
            }
        }
        Err(Error::Numeric("absorption iteration did not converge".into()))
    }

    /// Stationary distribution of a recurrent class, in the class's order.
    pub fn stationary(&self, class: &[usize]) -> Result<Vec<F>> {
        let c = class.len();
        if c == 1 {
            return Ok(vec![F::one()]);
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &i) in class.iter().enumerate() {
            pos[i] = k;
        }
        if c <= DENSE_LIMIT || F::EXACT {
            // (P^T - I) alpha = 0 with the last equation replaced by sum = 1.
            let mut a = vec![vec![F::zero(); c]; c];
            for (k, &i) in class.iter().enumerate() {
                a[k][k] = a[k][k].sub(&F::one());
                for (j, p) in &self.rows[i] {
                    a[pos[*j]][k] = a[pos[*j]][k].add(p);
                }
            }
            a[c - 1] = vec![F::one(); c];
            let mut b = vec![F::zero(); c];
            b[c - 1] = F::one();
            let alpha = solve_dense(a, b)?;
            if F::EXACT || self.stationary_residual(class, &alpha) <= 1e-10 {
                return Ok(alpha);
            }
        }
        self.stationary_power(class, &pos)
    }

    fn stationary_residual(&self, class: &[usize], alpha: &[F]) -> f64 {
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &i) in class.iter().enumerate() {
            pos[i] = k;
        }
        let mut next = vec![F::zero(); class.len()];
        for (k, &i) in class.iter().enumerate() {
            for (j, p) in &self.rows[i] {
                next[pos[*j]] = next[pos[*j]].add(&alpha[k].mul(p));
            }
        }
        let sum: f64 = alpha.iter().map(|x| x.magnitude()).sum();
        let r = next.iter().zip(alpha).map(|(x, y)| x.sub(y).magnitude()).fold(0.0, f64::max);
        r.max((sum - 1.0).abs())
    }

    /// Lazy power iteration, used when the direct solve is too large or
    /// badly conditioned.
    fn stationary_power(&self, class: &[usize], pos: &[usize]) -> Result<Vec<F>> {
        let c = class.len();
        let half = F::one().div(&F::one().add(&F::one()));
        let mut alpha = vec![F::one().div(&ratio_of::<F>(c)); c];
        for _ in 0..ITER_CAP {
            let mut next: Vec<F> = alpha.iter().map(|x| x.mul(&half)).collect();
            for (k, &i) in class.iter().enumerate() {
                let m = alpha[k].mul(&half);
                for (j, p) in &self.rows[i] {
                    next[pos[*j]] = next[pos[*j]].add(&m.mul(p));
                }
            }
            let diff = next.iter().zip(&alpha).map(|(x, y)| x.sub(y).magnitude()).fold(0.0, f64::max);
            alpha = next;
            if diff < 1e-12 {
                return Ok(alpha);
            }
        }
        Err(Error::Numeric("stationary distribution did not converge".into()))
    }

    /// Sum over classes of absorption times the class's mean expected shift.
    pub fn speed(&self) -> Result<F> {
        let mut total = F::zero();
        for (c, h) in self.classes.iter().zip(&self.absorption) {
            if h.is_zero() {
                continue;
            }
            let alpha = self.stationary(c)?;
            let class_speed = c
                .iter()
                .zip(&alpha)
                .fold(F::zero(), |s, (&q, a)| s.add(&a.mul(&self.expected_shift[q])));
            total = total.add(&h.mul(&class_speed));
        }
        Ok(total)
    }
}

fn ratio_of<F: Field>(n: usize) -> F {
    (0..n).fold(F::zero(), |s, _| s.add(&F::one()))
}

pub const DENSE_LIMIT: usize = 1000;
const ITER_CAP: usize = 1_000_000;

/// Fills the decomposition of a chain and returns it.
pub fn decompose<F: Field>(mut chain: StateChain<F>) -> Result<StateChain<F>> {
    chain.decompose()?;
    Ok(chain)
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense<F: Field>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Result<Vec<F>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r, &s| a[r][col].magnitude().total_cmp(&a[s][col].magnitude()))
            .ok_or_else(|| Error::Numeric("singular linear system".into()))?;
        if !F::EXACT && a[piv][col].magnitude() < 1e-300 {
            return Err(Error::Numeric("singular linear system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].div(&d);
            for k in col..n {
                let v = a[col][k].mul(&f);
                a[r][k] = a[r][k].sub(&v);
            }
            let v = b[col].mul(&f);
            b[r] = b[r].sub(&v);
        }
    }
    let mut x = vec![F::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r].clone();
        for k in r + 1..n {
            if !a[r][k].is_zero() {
                s = s.sub(&a[r][k].mul(&x[k]));
            }
        }
        x[r] = s.div(&a[r][r]);
    }
    Ok(x)
}

/// Iterative Tarjan; returns the component index of each node.
pub fn scc<I, E>(n: usize, edges: E) -> Vec<usize>
where
    E: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        work.push((root, edges(root).collect(), 0));
        while let Some((v, succ, k)) = work.last_mut() {
            let v = *v;
            if *k < succ.len() {
                let u = succ[*k];
                *k += 1;
                if index[u] == usize::MAX {
                    index[u] = counter;
                    low[u] = counter;
                    counter += 1;
                    stack.push(u);
                    on_stack[u] = true;
                    work.push((u, edges(u).collect(), 0));
                } else if on_stack[u] {
                    low[v] = low[v].min(index[u]);
                }
                continue;
            }
            work.pop();
            if let Some((parent, _, _)) = work.last() {
                low[*parent] = low[*parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let u = stack.pop().expect("tarjan stack");
                    on_stack[u] = false;
                    comp[u] = ncomp;
                    if u == v {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    comp
}
