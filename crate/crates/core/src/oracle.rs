//! Ground truth for the Extension Property: the counterexample construction from a
//! null vector of `W0`, and exhaustive search over small codes.

use crate::linalg;
use crate::orthogonality::{MatrixKind, OrthError, OrthMatrix, OrthogonalityContext};
use crate::rational::{self, Rational};
use crate::ring::{Elem, FiniteRing, OrbitKind};
use crate::weight::Weight;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

pub const DEFAULT_EXTENSION_BUDGET: u64 = 100_000_000;
pub const DEFAULT_ORACLE_BUDGET: u64 = 5_000_000_000;
/// Largest `|R|^n` whose submodules are enumerated.
pub const MAX_AMBIENT: usize = 1024;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Orth(#[from] OrthError),
    #[error("W0 is invertible; there is no counterexample")]
    Invertible,
    #[error("vector is not in the kernel of W0")]
    NotInKernel,
    #[error("null vector has {got} entries, W0 has {expected} columns")]
    WrongLength { expected: usize, got: usize },
    #[error("counterexample construction assumes w(0) = 0")]
    NonzeroW0,
    #[error("D(a) = {value} != 0 at a = {a}")]
    DefectNonzero { a: String, value: String },
    #[error("map is not well defined: {0} has two images")]
    NotWellDefined(String),
    #[error("map is not injective: {0} is a nonzero codeword mapped to zero")]
    NotInjective(String),
    #[error("search needs {needed} checks, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64, partial: Option<Box<OracleReport>> },
    #[error("{0}")]
    Input(String),
}

/// `x -> (x_{perm[0]} u_0, ..., x_{perm[n-1]} u_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialMap {
    pub perm: Vec<usize>,
    pub units: Vec<Elem>,
}

impl MonomialMap {
    pub fn identity(ring: &FiniteRing, n: usize) -> Self {
        MonomialMap { perm: (0..n).collect(), units: vec![ring.one(); n] }
    }

    pub fn apply(&self, ring: &FiniteRing, x: &[Elem]) -> Vec<Elem> {
        self.perm.iter().zip(&self.units).map(|(&p, &u)| ring.mul(x[p], u)).collect()
    }
}

/// A left submodule of `R^n`.
#[derive(Debug, Clone)]
pub struct LinearCode {
    ring: Arc<FiniteRing>,
    length: usize,
    generators: Vec<Vec<Elem>>,
    elements: Vec<Vec<Elem>>,
}

impl LinearCode {
    pub fn generated_by(ring: &Arc<FiniteRing>, length: usize, generators: Vec<Vec<Elem>>) -> LinearCode {
        assert!(generators.iter().all(|g| g.len() == length), "generator length");
        let mut set: std::collections::BTreeSet<Vec<Elem>> = std::collections::BTreeSet::new();
        set.insert(vec![ring.zero(); length]);
        for g in &generators {
            let multiples: Vec<Vec<Elem>> = ring.elements().map(|r| g.iter().map(|&x| ring.mul(r, x)).collect()).collect();
            let current: Vec<Vec<Elem>> = set.iter().cloned().collect();
            for c in &current {
                for m in &multiples {
                    set.insert(c.iter().zip(m).map(|(&a, &b)| ring.add(a, b)).collect());
                }
            }
        }
        LinearCode { ring: ring.clone(), length, generators, elements: set.into_iter().collect() }
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn generators(&self) -> &[Vec<Elem>] {
        &self.generators
    }

    /// Sorted codewords.
    pub fn elements(&self) -> &[Vec<Elem>] {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }
}

/// A left-linear map on a code, given by the images of the code's generators.
#[derive(Debug, Clone)]
pub struct CodeMap {
    pub code: LinearCode,
    pub images: Vec<Vec<Elem>>,
}

impl CodeMap {
    /// Codeword to image, checking well-definedness.
    pub fn table(&self) -> Result<BTreeMap<Vec<Elem>, Vec<Elem>>, OracleError> {
        let ring = &self.code.ring;
        let n = self.code.length;
        let mut table: BTreeMap<Vec<Elem>, Vec<Elem>> = BTreeMap::new();
        table.insert(vec![ring.zero(); n], vec![ring.zero(); n]);
        for (g, h) in self.code.generators.iter().zip(&self.images) {
            let current: Vec<(Vec<Elem>, Vec<Elem>)> = table.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
            for r in ring.elements() {
                for (x, y) in &current {
                    let x2: Vec<Elem> = x.iter().zip(g).map(|(&a, &b)| ring.add(a, ring.mul(r, b))).collect();
                    let y2: Vec<Elem> = y.iter().zip(h).map(|(&a, &b)| ring.add(a, ring.mul(r, b))).collect();
                    match table.get(&x2) {
                        Some(prev) if prev != &y2 => return Err(OracleError::NotWellDefined(tuple_label(ring, &x2))),
                        Some(_) => {}
                        None => {
                            table.insert(x2, y2);
                        }
                    }
                }
            }
        }
        Ok(table)
    }

    pub fn check_injective(&self) -> Result<BTreeMap<Vec<Elem>, Vec<Elem>>, OracleError> {
        let table = self.table()?;
        let ring = &self.code.ring;
        if let Some((x, _)) = table.iter().find(|(x, y)| y.iter().all(|&e| e == ring.zero()) && x.iter().any(|&e| e != ring.zero())) {
            return Err(OracleError::NotInjective(tuple_label(ring, x)));
        }
        Ok(table)
    }

    pub fn is_isometry(&self, w: &Weight) -> Result<bool, OracleError> {
        let table = self.table()?;
        Ok(table.iter().all(|(x, y)| tuple_weight(w, x) == tuple_weight(w, y)))
    }
}

pub fn tuple_label(ring: &FiniteRing, x: &[Elem]) -> String {
    format!("({})", x.iter().map(|&e| ring.label(e)).collect::<Vec<_>>().join(","))
}

/// `sum_i w(x_i)`.
pub fn tuple_weight(w: &Weight, x: &[Elem]) -> Rational {
    x.iter().map(|&e| w.value(e).clone()).sum()
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out.sort();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Extendability {
    pub extendable: bool,
    pub witness: Option<MonomialMap>,
    /// Monomial maps tried; equals `n! |G_rt|^n` when no extension exists.
    pub maps_searched: u64,
}

/// Exhaustive search for a `G_rt(w)`-monomial map agreeing with `phi` on its code.
pub fn is_extendable(phi: &CodeMap, w: &Weight, budget: u64) -> Result<Extendability, OracleError> {
    let ring = phi.code.ring.clone();
    phi.check_injective()?;
    let n = phi.code.length;
    let g_rt = &w.symmetry().g_rt;
    let needed = factorial(n).saturating_mul((g_rt.len() as u128).saturating_pow(n as u32));
    if needed > budget as u128 {
        return Err(OracleError::BudgetExceeded { needed: needed.to_string(), budget, partial: None });
    }
    let mut searched = 0u64;
    for perm in permutations(n) {
        let mut idx = vec![0usize; n];
        loop {
            searched += 1;
            let map = MonomialMap { perm: perm.clone(), units: idx.iter().map(|&i| g_rt[i]).collect() };
            if phi.code.generators.iter().zip(&phi.images).all(|(g, h)| &map.apply(&ring, g) == h) {
                return Ok(Extendability { extendable: true, witness: Some(map), maps_searched: searched });
            }
            // odometer over unit tuples
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < g_rt.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    Ok(Extendability { extendable: false, witness: None, maps_searched: searched })
}

/// Primitive integer kernel vector of `W0` (first free column), or `None` when invertible.
pub fn null_vector_integer(w0: &OrthMatrix) -> Option<Vec<i64>> {
    let v = linalg::first_kernel_vector(&w0.entries)?;
    Some(linalg::primitive_integer_vector(&v).iter().map(|x| x.to_i64().expect("kernel entry fits i64")).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexamplePair {
    pub ring: String,
    /// Nonzero right principal ideals indexing the null vector.
    pub columns: Vec<String>,
    pub null_vector: Vec<i64>,
    pub length: usize,
    pub g_plus: Vec<String>,
    pub g_minus: Vec<String>,
    #[serde(skip)]
    pub g_plus_elems: Vec<Elem>,
    #[serde(skip)]
    pub g_minus_elems: Vec<Elem>,
    /// `D(a) = w(a g+) - w(a g-)` vanished for every `a`.
    pub defect_zero: bool,
    /// Multisets of coordinate right orbits differ.
    pub orbit_multisets_differ: bool,
}

impl CounterexamplePair {
    /// `a g+ -> a g-` on the code generated by `g+`.
    pub fn map(&self, ring: &Arc<FiniteRing>) -> CodeMap {
        CodeMap {
            code: LinearCode::generated_by(ring, self.length, vec![self.g_plus_elems.clone()]),
            images: vec![self.g_minus_elems.clone()],
        }
    }
}

pub fn build_counterexample(ctx: &OrthogonalityContext, w: &Weight, v: &[i64]) -> Result<CounterexamplePair, OracleError> {
    if !w.w0().is_zero() {
        return Err(OracleError::NonzeroW0);
    }
    let ring = ctx.ring().clone();
    let w0 = ctx.build_matrix(w, MatrixKind::W0)?;
    if v.len() != w0.cols.len() {
        return Err(OracleError::WrongLength { expected: w0.cols.len(), got: v.len() });
    }
    if v.iter().all(|&x| x == 0) {
        return Err(OracleError::NotInKernel);
    }
    let in_kernel = w0.entries.iter().all(|row| {
        row.iter().zip(v).fold(Rational::zero(), |acc, (a, &b)| acc + a * rational::int(b)).is_zero()
    });
    if !in_kernel {
        return Err(OracleError::NotInKernel);
    }
    let gens: Vec<Elem> = w0.col_ids.iter().map(|&id| ctx.right().ideal(id).canonical_generator().unwrap()).collect();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (&c, &k) in gens.iter().zip(v) {
        let side = if k > 0 { &mut plus } else { &mut minus };
        side.extend(std::iter::repeat(c).take(k.unsigned_abs() as usize));
    }
    plus.push(ring.one());
    minus.push(ring.one());
    let length = plus.len().max(minus.len());
    plus.resize(length, ring.zero());
    minus.resize(length, ring.zero());
    for a in ring.elements() {
        let ap: Vec<Elem> = plus.iter().map(|&x| ring.mul(a, x)).collect();
        let am: Vec<Elem> = minus.iter().map(|&x| ring.mul(a, x)).collect();
        let d = tuple_weight(w, &ap) - tuple_weight(w, &am);
        if !d.is_zero() {
            return Err(OracleError::DefectNonzero { a: ring.label(a), value: rational::format_rational(&d) });
        }
    }
    let right = ring.orbits(OrbitKind::Right);
    let multiset = |g: &[Elem]| {
        let mut m: Vec<usize> = g.iter().map(|&x| right.class_of(x)).collect();
        m.sort_unstable();
        m
    };
    Ok(CounterexamplePair {
        ring: ring.spec().to_string(),
        columns: w0.cols.clone(),
        null_vector: v.to_vec(),
        length,
        g_plus: plus.iter().map(|&x| ring.label(x)).collect(),
        g_minus: minus.iter().map(|&x| ring.label(x)).collect(),
        orbit_multisets_differ: multiset(&plus) != multiset(&minus),
        g_plus_elems: plus,
        g_minus_elems: minus,
        defect_zero: true,
    })
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub n_max: usize,
    pub max_ring_order: usize,
    pub max_length: usize,
    /// Elementary checks (coefficient-tuple evaluations) allowed in total.
    pub budget: u64,
    pub stop_at_first_failure: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_max: 2,
            max_ring_order: 16,
            max_length: 3,
            budget: DEFAULT_ORACLE_BUDGET,
            stop_at_first_failure: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleWitness {
    pub length: usize,
    pub generators: Vec<String>,
    pub images: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub ring: String,
    pub n_max: usize,
    pub extension_property: bool,
    /// Submodules of `R^n` per length, before and after monomial reduction.
    pub submodules: Vec<usize>,
    pub codes_examined: Vec<usize>,
    pub isometries_checked: u64,
    pub failures: u64,
    pub witness: Option<OracleWitness>,
    pub checks: u64,
    pub complete: bool,
}

/// Tuples of `R^n` encoded base `|R|`, coordinate 0 least significant.
struct Ambient {
    ring: Arc<FiniteRing>,
    n: usize,
    size: usize,
    coords: Vec<Vec<Elem>>,
}

impl Ambient {
    fn new(ring: &Arc<FiniteRing>, n: usize) -> Ambient {
        let q = ring.order();
        let size = q.pow(n as u32);
        let coords = (0..size)
            .map(|mut t| {
                (0..n)
                    .map(|_| {
                        let c = (t % q) as Elem;
                        t /= q;
                        c
                    })
                    .collect()
            })
            .collect();
        Ambient { ring: ring.clone(), n, size, coords }
    }

    fn encode(&self, v: &[Elem]) -> usize {
        let q = self.ring.order();
        v.iter().rev().fold(0, |acc, &x| acc * q + x as usize)
    }

    fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (&self.coords[a], &self.coords[b]);
        let q = self.ring.order();
        (0..self.n).rev().fold(0, |acc, i| acc * q + self.ring.add(x[i], y[i]) as usize)
    }

    fn lmul(&self, r: Elem, a: usize) -> usize {
        let x = &self.coords[a];
        let q = self.ring.order();
        (0..self.n).rev().fold(0, |acc, i| acc * q + self.ring.mul(r, x[i]) as usize)
    }

    fn label(&self, t: usize) -> String {
        tuple_label(&self.ring, &self.coords[t])
    }
}

/// Weight values scaled to a common integer denominator.
fn integer_weights(w: &Weight) -> Vec<i64> {
    let f = w.as_function();
    let l = f.iter().fold(num_bigint::BigInt::from(1), |acc, q| acc.lcm(q.denom()));
    f.iter()
        .map(|q| (q * Rational::from_integer(l.clone())).to_integer().to_i64().expect("weight values fit i64"))
        .collect()
}

struct Searcher {
    amb: Ambient,
    wt: Vec<i64>,
    g_rt: Vec<Elem>,
    profile_of: Vec<usize>,
    by_profile: Vec<Vec<usize>>,
    mono_rep: Vec<usize>,
    monomials: Vec<MonomialMap>,
}

impl Searcher {
    fn new(ring: &Arc<FiniteRing>, w: &Weight, n: usize) -> Searcher {
        let amb = Ambient::new(ring, n);
        let ew = integer_weights(w);
        let wt: Vec<i64> = amb.coords.iter().map(|c| c.iter().map(|&e| ew[e as usize]).sum()).collect();
        let mut profiles: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut by_profile: Vec<Vec<usize>> = Vec::new();
        let profile_of = (0..amb.size)
            .map(|t| {
                let p: Vec<i64> = ring.elements().map(|r| wt[amb.lmul(r, t)]).collect();
                let id = *profiles.entry(p).or_insert_with(|| {
                    by_profile.push(Vec::new());
                    by_profile.len() - 1
                });
                by_profile[id].push(t);
                id
            })
            .collect();
        let g_rt = w.symmetry().g_rt.clone();
        let mut monomials = Vec::new();
        for perm in permutations(n) {
            let mut idx = vec![0usize; n];
            'units: loop {
                monomials.push(MonomialMap { perm: perm.clone(), units: idx.iter().map(|&i| g_rt[i]).collect() });
                for k in 0..n {
                    idx[k] += 1;
                    if idx[k] < g_rt.len() {
                        continue 'units;
                    }
                    idx[k] = 0;
                }
                break;
            }
        }
        let mono_rep = (0..amb.size)
            .map(|t| monomials.iter().map(|m| amb.encode(&m.apply(ring, &amb.coords[t]))).min().unwrap())
            .collect();
        Searcher { amb, wt, g_rt, profile_of, by_profile, mono_rep, monomials }
    }

    fn cyclic(&self, x: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.amb.ring.elements().map(|r| self.amb.lmul(r, x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// All submodules of `R^n` as sorted element lists, canonical order.
    fn submodules(&self) -> Vec<Vec<usize>> {
        let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
        let mut mods: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.amb.size {
            let c = self.cyclic(x);
            if seen.insert(c.clone(), ()).is_none() {
                mods.push(c);
            }
        }
        let mut i = 0;
        while i < mods.len() {
            for j in 0..i {
                let sum = self.sum(&mods[i], &mods[j]);
                if seen.insert(sum.clone(), ()).is_none() {
                    mods.push(sum);
                }
            }
            i += 1;
        }
        mods.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        mods
    }

    fn sum(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut mark = vec![false; self.amb.size];
        for &x in a {
            for &y in b {
                mark[self.amb.add(x, y)] = true;
            }
        }
        (0..self.amb.size).filter(|&t| mark[t]).collect()
    }

    fn canonical_key(&self, code: &[usize]) -> Vec<usize> {
        self.monomials
            .iter()
            .map(|m| {
                let mut v: Vec<usize> =
                    code.iter().map(|&t| self.amb.encode(&m.apply(&self.amb.ring, &self.amb.coords[t]))).collect();
                v.sort_unstable();
                v
            })
            .min()
            .unwrap()
    }

    /// Largest cyclic submodule first, until the code is spanned.
    fn generators(&self, code: &[usize]) -> Vec<usize> {
        let mut span = vec![0usize];
        let mut gens = Vec::new();
        let mut in_span = vec![false; self.amb.size];
        in_span[0] = true;
        while span.len() < code.len() {
            let g = code
                .iter()
                .copied()
                .filter(|&x| !in_span[x])
                .max_by(|&a, &b| self.cyclic(a).len().cmp(&self.cyclic(b).len()).then(b.cmp(&a)))
                .unwrap();
            gens.push(g);
            span = self.sum(&span, &self.cyclic(g));
            for &x in &span {
                in_span[x] = true;
            }
        }
        gens
    }

    fn extends(&self, gens: &[usize], images: &[usize]) -> bool {
        let n = self.amb.n;
        let ring = &self.amb.ring;
        let compat = |i: usize, j: usize| {
            self.g_rt.iter().any(|&u| {
                gens.iter().zip(images).all(|(&g, &h)| ring.mul(self.amb.coords[g][j], u) == self.amb.coords[h][i])
            })
        };
        let table: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| compat(i, j)).collect()).collect();
        permutations(n).iter().any(|p| (0..n).all(|i| table[i][p[i]]))
    }

    /// Depth-first search over generator images. Calls `visit` on every injective
    /// isometry; `visit` returns `true` to stop.
    fn search(
        &self,
        gens: &[usize],
        first_reps_only: bool,
        checks: &AtomicU64,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let mut img = vec![usize::MAX; self.amb.size];
        img[0] = 0;
        let mut images = Vec::with_capacity(gens.len());
        self.dfs(gens, first_reps_only, &img, &[0], &mut images, checks, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        gens: &[usize],
        first_reps_only: bool,
        img: &[usize],
        span: &[usize],
        images: &mut Vec<usize>,
        checks: &AtomicU64,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let j = images.len();
        if j == gens.len() {
            let zero_images = span.iter().filter(|&&x| img[x] == 0).count();
            if zero_images == 1 {
                return visit(images);
            }
            return false;
        }
        let g = gens[j];
        let ring = &self.amb.ring;
        for &h in &self.by_profile[self.profile_of[g]] {
            if j == 0 && first_reps_only && self.mono_rep[h] != h {
                continue;
            }
            checks.fetch_add((span.len() * ring.order()) as u64, Ordering::Relaxed);
            let mut next = img.to_vec();
            let mut new_span = span.to_vec();
            let mut ok = true;
            'outer: for r in ring.elements() {
                let (rg, rh) = (self.amb.lmul(r, g), self.amb.lmul(r, h));
                for &x in span {
                    let x2 = self.amb.add(x, rg);
                    let y2 = self.amb.add(img[x], rh);
                    if next[x2] == usize::MAX {
                        if self.wt[x2] != self.wt[y2] {
                            ok = false;
                            break 'outer;
                        }
                        next[x2] = y2;
                        new_span.push(x2);
                    } else if next[x2] != y2 {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            if !ok {
                continue;
            }
            new_span.sort_unstable();
            images.push(h);
            let stop = self.dfs(gens, first_reps_only, &next, &new_span, images, checks, visit);
            images.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

struct CodeOutcome {
    isometries: u64,
    failures: u64,
    witness: Option<OracleWitness>,
}

/// Checks the Extension Property directly on every code of length `1..=n_max`.
pub fn oracle_extension_property(ring: &Arc<FiniteRing>, w: &Weight, config: &OracleConfig) -> Result<OracleReport, OracleError> {
    if ring.order() > config.max_ring_order {
        return Err(OracleError::Input(format!(
            "oracle is limited to rings of order <= {} ({} has {})",
            config.max_ring_order,
            ring.spec(),
            ring.order()
        )));
    }
    if config.n_max == 0 || config.n_max > config.max_length {
        return Err(OracleError::Input(format!("n_max must lie in 1..={}", config.max_length)));
    }
    if ring.order().checked_pow(config.n_max as u32).map_or(true, |s| s > MAX_AMBIENT) {
        return Err(OracleError::Input(format!(
            "|R|^n_max exceeds {MAX_AMBIENT}; lower n_max for {}",
            ring.spec()
        )));
    }
    let checks = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let mut report = OracleReport {
        ring: ring.spec().to_string(),
        n_max: config.n_max,
        extension_property: true,
        submodules: Vec::new(),
        codes_examined: Vec::new(),
        isometries_checked: 0,
        failures: 0,
        witness: None,
        checks: 0,
        complete: true,
    };
    for n in 1..=config.n_max {
        let s = Searcher::new(ring, w, n);
        let mods = s.submodules();
        report.submodules.push(mods.len());
        let mut reps: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut keys: HashMap<Vec<usize>, ()> = HashMap::new();
        for m in mods {
            let key = s.canonical_key(&m);
            if keys.insert(key, ()).is_none() {
                reps.push((m.clone(), Vec::new()));
            }
        }
        report.codes_examined.push(reps.len());
        let outcomes: Vec<CodeOutcome> = reps
            .par_iter()
            .map(|(code, _)| {
                let mut out = CodeOutcome { isometries: 0, failures: 0, witness: None };
                if stop.load(Ordering::Relaxed) || code.len() == 1 {
                    return out;
                }
                let gens = s.generators(code);
                s.search(&gens, true, &checks, &mut |images| {
                    out.isometries += 1;
                    if !s.extends(&gens, images) {
                        out.failures += 1;
                        if out.witness.is_none() {
                            out.witness = Some(OracleWitness {
                                length: n,
                                generators: gens.iter().map(|&g| s.amb.label(g)).collect(),
                                images: images.iter().map(|&h| s.amb.label(h)).collect(),
                            });
                        }
                        if config.stop_at_first_failure {
                            stop.store(true, Ordering::Relaxed);
                            return true;
                        }
                    }
                    checks.load(Ordering::Relaxed) > config.budget
                });
                out
            })
            .collect();
        for o in outcomes {
            report.isometries_checked += o.isometries;
            report.failures += o.failures;
            if report.witness.is_none() {
                report.witness = o.witness;
            }
        }
        report.checks = checks.load(Ordering::Relaxed);
        if report.checks > config.budget {
            report.complete = false;
            report.extension_property = report.failures == 0;
            return Err(OracleError::BudgetExceeded {
                needed: format!("> {}", report.checks),
                budget: config.budget,
                partial: Some(Box::new(report)),
            });
        }
        if report.failures > 0 && config.stop_at_first_failure {
            report.complete = false;
            break;
        }
    }
    report.extension_property = report.failures == 0;
    Ok(report)
}

/// Every injective `w`-isometry out of `code` (generator images in search order).
pub fn enumerate_isometries(code: &LinearCode, w: &Weight, limit: usize) -> Vec<CodeMap> {
    let s = Searcher::new(code.ring(), w, code.length());
    let mut elems: Vec<usize> = code.elements().iter().map(|c| s.amb.encode(c)).collect();
    elems.sort_unstable();
    let gens = s.generators(&elems);
    let gen_code = LinearCode::generated_by(code.ring(), code.length(), gens.iter().map(|&g| s.amb.coords[g].clone()).collect());
    let checks = AtomicU64::new(0);
    let mut out = Vec::new();
    s.search(&gens, false, &checks, &mut |images| {
        out.push(CodeMap {
            code: gen_code.clone(),
            images: images.iter().map(|&h| s.amb.coords[h].clone()).collect(),
        });
        out.len() >= limit
    });
    out
}
