//! Small finite rings with identity, addressed by dense element indices.
//!
//! Built-in constructors keep structural arithmetic (residues, polynomial
//! coefficient vectors, row-major matrices, tuples); `Table` rings carry
//! materialized operation tables. Rings up to [`TABLE_CACHE_MAX`] elements
//! cache their tables either way.

mod orbit;
mod spec;
mod validate;

pub use orbit::{OrbitKind, OrbitPartition};
pub use spec::RingSpec;
pub use validate::{check_axioms, validate_table_ring, Axiom, AxiomViolation, ValidationReport};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Deserialize;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

/// Element index within its ring.
pub type Elem = u32;

pub const DEFAULT_MAX_ORDER: usize = 4096;
pub const TABLE_CACHE_MAX: usize = 1024;
const MAX_DIGITS: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum RingError {
    #[error("malformed ring spec {spec:?} at byte {pos}: {msg}")]
    Parse { spec: String, pos: usize, msg: String },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid ring parameter: {0}")]
    InvalidParameter(String),
    #[error("ring {spec} has order {order}, above the cap {cap}")]
    OrderCap { spec: String, order: String, cap: usize },
    #[error("table file {path}: {msg}")]
    TableFile { path: String, msg: String },
    #[error("table ring {path} violates ring axioms: {report}")]
    Axioms { path: String, report: ValidationReport },
    #[error("operands belong to different rings ({0} vs {1})")]
    RingMismatch(String, String),
    #[error("unknown element {label:?} in {ring}")]
    UnknownElement { ring: String, label: String },
    #[error("element index {index} out of range for {ring}")]
    IndexOutOfRange { ring: String, index: usize },
}

#[derive(Debug, Clone)]
pub struct RingConfig {
    pub max_order: usize,
    /// Directory `Table(...)` paths are resolved against; the working directory if unset.
    pub base_dir: Option<PathBuf>,
}

impl Default for RingConfig {
    fn default() -> Self {
        RingConfig { max_order: DEFAULT_MAX_ORDER, base_dir: None }
    }
}

impl RingConfig {
    pub fn with_max_order(max_order: usize) -> Self {
        RingConfig { max_order, ..Default::default() }
    }
}

enum Arith {
    Zmod { m: u32 },
    /// GF(p^k), coefficients low degree first, reduced modulo a monic `modulus` of degree k.
    Galois { p: u32, k: usize, modulus: Vec<u32> },
    /// F_q[x]/(x^k); coefficient of x^i is digit i (least significant first).
    TruncPoly { base: Arc<FiniteRing>, k: usize },
    /// Row-major entries, first entry most significant.
    Matrix { base: Arc<FiniteRing>, n: usize },
    /// Tuples, first component most significant.
    Product { factors: Vec<Arc<FiniteRing>> },
    Table { add: Vec<Elem>, mul: Vec<Elem>, labels: Option<Vec<String>> },
}

struct Tables {
    add: Vec<Elem>,
    mul: Vec<Elem>,
}

/// Span of an additive subgroup: membership set, element list and the seeds that were needed.
#[derive(Debug, Clone)]
pub struct Span {
    pub set: FixedBitSet,
    pub elements: Vec<Elem>,
    pub generators: Vec<Elem>,
}

pub struct FiniteRing {
    spec: String,
    order: usize,
    arith: Arith,
    tables: Option<Tables>,
    neg: Vec<Elem>,
    zero: Elem,
    one: Elem,
    is_unit: Vec<bool>,
    units: Vec<Elem>,
    additive_gens: Vec<Elem>,
    commutative: bool,
    inverses: OnceLock<Vec<Option<Elem>>>,
    labels: OnceLock<Vec<String>>,
    label_index: OnceLock<HashMap<String, Elem>>,
    orbits: [OnceLock<OrbitPartition>; 3],
}

impl std::fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteRing")
            .field("spec", &self.spec)
            .field("order", &self.order)
            .field("units", &self.units.len())
            .finish()
    }
}

/// Parses and builds a ring from a spec expression.
pub fn build_ring(spec: &str, config: &RingConfig) -> Result<Arc<FiniteRing>, RingError> {
    let parsed = RingSpec::parse(spec)?;
    build_from_spec(&parsed, config)
}

pub fn build_from_spec(spec: &RingSpec, config: &RingConfig) -> Result<Arc<FiniteRing>, RingError> {
    if let RingSpec::Table(_) = spec {
    } else {
        match spec.order() {
            Some(order) if order <= config.max_order as u128 => {}
            order => {
                return Err(RingError::OrderCap {
                    spec: spec.to_string(),
                    order: order.map_or_else(|| "overflow".to_string(), |o| o.to_string()),
                    cap: config.max_order,
                })
            }
        }
    }
    let name = spec.to_string();
    let ring = match spec {
        RingSpec::Z(m) => {
            if *m < 2 {
                return Err(RingError::InvalidParameter(format!("Z({m}) needs m >= 2")));
            }
            FiniteRing::assemble(name, *m as usize, Arith::Zmod { m: *m as u32 })
        }
        RingSpec::ZChain(p, k) => {
            if !is_prime(*p) {
                return Err(RingError::NotPrime(*p));
            }
            if *k == 0 {
                return Err(RingError::InvalidParameter("ZChain needs k >= 1".into()));
            }
            let m = p.pow(*k);
            FiniteRing::assemble(name, m as usize, Arith::Zmod { m: m as u32 })
        }
        RingSpec::GF(q) => galois_field(name, *q)?,
        RingSpec::PChain(q, k) => {
            if *k == 0 {
                return Err(RingError::InvalidParameter("PChain needs k >= 1".into()));
            }
            let base = build_from_spec(&RingSpec::GF(*q), config)?;
            let order = (*q as usize).pow(*k);
            FiniteRing::assemble(name, order, Arith::TruncPoly { base, k: *k as usize })
        }
        RingSpec::Mat(n, s) => {
            if *n == 0 {
                return Err(RingError::InvalidParameter("Mat needs n >= 1".into()));
            }
            let base = build_from_spec(s, config)?;
            let order = base.order.pow((n * n) as u32);
            FiniteRing::assemble(name, order, Arith::Matrix { base, n: *n })
        }
        RingSpec::Prod(parts) => {
            let factors = parts
                .iter()
                .map(|s| build_from_spec(s, config))
                .collect::<Result<Vec<_>, _>>()?;
            let order = factors.iter().map(|f| f.order).product();
            FiniteRing::assemble(name, order, Arith::Product { factors })
        }
        RingSpec::Table(path) => load_table_ring(path, config)?,
    };
    Ok(Arc::new(ring))
}

#[derive(Deserialize)]
struct TableFile {
    order: usize,
    add: Vec<Vec<usize>>,
    mul: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

fn load_table_ring(path: &str, config: &RingConfig) -> Result<FiniteRing, RingError> {
    let full: PathBuf = match &config.base_dir {
        Some(dir) if Path::new(path).is_relative() => dir.join(path),
        _ => PathBuf::from(path),
    };
    let err = |msg: String| RingError::TableFile { path: path.to_string(), msg };
    let text = std::fs::read_to_string(&full).map_err(|e| err(e.to_string()))?;
    let file: TableFile = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
    if file.order > config.max_order {
        return Err(RingError::OrderCap {
            spec: format!("Table({path})"),
            order: file.order.to_string(),
            cap: config.max_order,
        });
    }
    let report = validate_table_ring(file.order, &file.add, &file.mul);
    if !report.is_valid() {
        return Err(RingError::Axioms { path: path.to_string(), report });
    }
    if let Some(labels) = &file.labels {
        if labels.len() != file.order {
            return Err(err(format!("{} labels for {} elements", labels.len(), file.order)));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(normalize_label(l))) {
            return Err(err(format!("duplicate label {dup:?}")));
        }
    }
    let flat = |t: &[Vec<usize>]| t.iter().flatten().map(|&e| e as Elem).collect::<Vec<_>>();
    Ok(FiniteRing::assemble(
        format!("Table({path})"),
        file.order,
        Arith::Table { add: flat(&file.add), mul: flat(&file.mul), labels: file.labels },
    ))
}

fn galois_field(name: String, q: u64) -> Result<FiniteRing, RingError> {
    let (p, k) = prime_power(q).ok_or(RingError::NotPrimePower(q))?;
    if k == 1 {
        return Ok(FiniteRing::assemble(name, q as usize, Arith::Zmod { m: q as u32 }));
    }
    let modulus = first_irreducible(p as u32, k as usize);
    Ok(FiniteRing::assemble(name, q as usize, Arith::Galois { p: p as u32, k: k as usize, modulus }))
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `q = p^k` with p prime.
pub(crate) fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Polynomials over F_p as coefficient vectors, low degree first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = mod_inverse(m[dm], p);
    while r.len() > dm {
        let top = *r.last().unwrap();
        if top != 0 {
            let f = top * lead_inv % p;
            let shift = r.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - f * c % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    (1..p).find(|&x| a * x % p == 1).expect("invertible coefficient")
}

/// The monic irreducible of degree k over F_p with the smallest coefficient index.
fn first_irreducible(p: u32, k: usize) -> Vec<u32> {
    let digits = |mut idx: u64, len: usize| -> Vec<u32> {
        (0..len)
            .map(|_| {
                let d = (idx % p as u64) as u32;
                idx /= p as u64;
                d
            })
            .collect()
    };
    let irreducible = |f: &[u32]| {
        (1..=k / 2).all(|d| {
            (0..(p as u64).pow(d as u32)).all(|idx| {
                let mut g = digits(idx, d);
                g.push(1);
                poly_rem(f, &g, p).iter().any(|&c| c != 0)
            })
        })
    };
    (0..(p as u64).pow(k as u32))
        .map(|idx| {
            let mut f = digits(idx, k);
            f.push(1);
            f
        })
        .find(|f| irreducible(f))
        .expect("irreducible polynomials exist in every degree")
}

pub(crate) fn normalize_label(label: &str) -> String {
    label.chars().filter(|c| !c.is_whitespace()).collect()
}

impl FiniteRing {
    fn assemble(spec: String, order: usize, arith: Arith) -> FiniteRing {
        let mut ring = FiniteRing {
            spec,
            order,
            arith,
            tables: None,
            neg: Vec::new(),
            zero: 0,
            one: 0,
            is_unit: Vec::new(),
            units: Vec::new(),
            additive_gens: Vec::new(),
            commutative: false,
            inverses: OnceLock::new(),
            labels: OnceLock::new(),
            label_index: OnceLock::new(),
            orbits: Default::default(),
        };
        ring.zero = ring.structural_zero();
        ring.one = ring.structural_one();
        if order <= TABLE_CACHE_MAX && !matches!(ring.arith, Arith::Table { .. }) {
            let n = order as Elem;
            let add = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| ring.raw_add(a, b)).collect();
            let mul = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| ring.raw_mul(a, b)).collect();
            ring.tables = Some(Tables { add, mul });
        }
        ring.neg = ring.compute_negatives();
        ring.is_unit = ring.compute_units();
        ring.units = (0..order as Elem).filter(|&x| ring.is_unit[x as usize]).collect();
        ring.additive_gens = ring.compute_additive_gens();
        ring.commutative = ring.compute_commutative();
        ring
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order as Elem
    }

    pub fn units(&self) -> &[Elem] {
        &self.units
    }

    pub fn is_unit(&self, x: Elem) -> bool {
        self.is_unit[x as usize]
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    /// A generating set of the additive group.
    pub fn additive_generators(&self) -> &[Elem] {
        &self.additive_gens
    }

    pub fn same_ring(&self, other: &FiniteRing) -> bool {
        std::ptr::eq(self, other) || self.spec == other.spec
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.tables {
            Some(t) => t.add[a as usize * self.order + b as usize],
            None => self.raw_add(a, b),
        }
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.tables {
            Some(t) => t.mul[a as usize * self.order + b as usize],
            None => self.raw_mul(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    /// Two-sided inverse of a unit.
    pub fn inverse(&self, x: Elem) -> Option<Elem> {
        if !self.is_unit(x) {
            return None;
        }
        if self.order <= DEFAULT_MAX_ORDER {
            let table = self.inverses.get_or_init(|| {
                self.elements()
                    .map(|a| {
                        self.is_unit(a)
                            .then(|| *self.units.iter().find(|&&b| self.mul(a, b) == self.one).unwrap())
                    })
                    .collect()
            });
            return table[x as usize];
        }
        self.units.iter().copied().find(|&b| self.mul(x, b) == self.one)
    }

    pub fn is_field(&self) -> bool {
        self.commutative && self.units.len() + 1 == self.order
    }

    /// Residue modulus when the ring is `Z(m)` (also `ZChain`, prime `GF`).
    pub fn zmod_modulus(&self) -> Option<u32> {
        match self.arith {
            Arith::Zmod { m } => Some(m),
            _ => None,
        }
    }

    /// `(n, base)` when the ring is `Mat(n, base)`.
    pub fn matrix_structure(&self) -> Option<(usize, &Arc<FiniteRing>)> {
        match &self.arith {
            Arith::Matrix { base, n } => Some((*n, base)),
            _ => None,
        }
    }

    /// Factor rings when the ring is `Prod(...)`.
    pub fn product_factors(&self) -> Option<&[Arc<FiniteRing>]> {
        match &self.arith {
            Arith::Product { factors } => Some(factors),
            _ => None,
        }
    }

    /// Rank of a matrix over a field base; `None` for other rings.
    pub fn matrix_rank(&self, x: Elem) -> Option<usize> {
        let (n, base) = self.matrix_structure()?;
        if !base.is_field() {
            return None;
        }
        let mut m = [0 as Elem; MAX_DIGITS];
        decode_msb(x, base.order as u32, &mut m[..n * n]);
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| m[r * n + col] != base.zero) else { continue };
            for j in 0..n {
                m.swap(rank * n + j, pivot * n + j);
            }
            let inv = base.inverse(m[rank * n + col]).unwrap();
            for r in 0..n {
                if r == rank || m[r * n + col] == base.zero {
                    continue;
                }
                let f = base.mul(m[r * n + col], inv);
                for j in 0..n {
                    let t = base.mul(f, m[rank * n + j]);
                    m[r * n + j] = base.sub(m[r * n + j], t);
                }
            }
            rank += 1;
        }
        Some(rank)
    }

    /// Component indices of a product-ring element.
    pub fn components(&self, x: Elem) -> Option<Vec<Elem>> {
        let factors = self.product_factors()?;
        let mut out = vec![0; factors.len()];
        let mut rest = x;
        for (i, f) in factors.iter().enumerate().rev() {
            out[i] = rest % f.order as Elem;
            rest /= f.order as Elem;
        }
        Some(out)
    }

    pub fn label(&self, x: Elem) -> String {
        match &self.arith {
            Arith::Zmod { .. } => x.to_string(),
            Arith::Galois { p, k, .. } => {
                let mut d = [0; MAX_DIGITS];
                decode_lsb(x, *p, &mut d[..*k]);
                poly_label(&d[..*k], "a", |c| c.to_string(), |c| c == 0, |c| c == 1)
            }
            Arith::TruncPoly { base, k } => {
                let mut d = [0; MAX_DIGITS];
                decode_lsb(x, base.order as u32, &mut d[..*k]);
                let coeff = |c: Elem| {
                    let l = base.label(c);
                    if l.chars().all(|ch| ch.is_ascii_digit()) {
                        l
                    } else {
                        format!("({l})")
                    }
                };
                poly_label(&d[..*k], "x", coeff, |c| c == base.zero, |c| c == base.one)
            }
            Arith::Matrix { base, n } => {
                let mut d = [0; MAX_DIGITS];
                decode_msb(x, base.order as u32, &mut d[..n * n]);
                let rows: Vec<String> = (0..*n)
                    .map(|r| {
                        let cells: Vec<String> = (0..*n).map(|c| base.label(d[r * n + c])).collect();
                        format!("[{}]", cells.join(","))
                    })
                    .collect();
                format!("[{}]", rows.join(","))
            }
            Arith::Product { factors } => {
                let comps = self.components(x).unwrap();
                let parts: Vec<String> = factors.iter().zip(comps).map(|(f, c)| f.label(c)).collect();
                format!("({})", parts.join(","))
            }
            Arith::Table { labels, .. } => match labels {
                Some(l) => l[x as usize].clone(),
                None => x.to_string(),
            },
        }
    }

    pub fn labels(&self) -> &[String] {
        self.labels.get_or_init(|| self.elements().map(|x| self.label(x)).collect())
    }

    /// Looks up an element by its canonical label (whitespace-insensitive).
    pub fn parse_element(&self, label: &str) -> Result<Elem, RingError> {
        let index = self.label_index.get_or_init(|| {
            self.labels().iter().enumerate().map(|(i, l)| (normalize_label(l), i as Elem)).collect()
        });
        index.get(&normalize_label(label)).copied().ok_or_else(|| RingError::UnknownElement {
            ring: self.spec.clone(),
            label: label.to_string(),
        })
    }

    pub fn orbits(&self, kind: OrbitKind) -> &OrbitPartition {
        let slot = match kind {
            OrbitKind::Left => 0,
            OrbitKind::Right => 1,
            OrbitKind::Double => 2,
        };
        self.orbits[slot].get_or_init(|| match kind {
            OrbitKind::Double => OrbitPartition::double(self, self.orbits(OrbitKind::Right)),
            _ => OrbitPartition::one_sided(self, kind),
        })
    }

    /// Exhaustive axiom scan over the ring's own operations.
    pub fn validate(&self) -> ValidationReport {
        ValidationReport {
            order: self.order,
            violations: check_axioms(self.order, &|a, b| self.add(a, b), &|a, b| self.mul(a, b)),
        }
    }

    /// Additive subgroup generated by `seeds`.
    pub fn additive_span(&self, seeds: impl IntoIterator<Item = Elem>) -> Span {
        let mut set = FixedBitSet::with_capacity(self.order);
        set.insert(self.zero as usize);
        let mut elements = vec![self.zero];
        let mut generators = Vec::new();
        for s in seeds {
            if set.contains(s as usize) {
                continue;
            }
            generators.push(s);
            let base_len = elements.len();
            let mut shift = s;
            // cosets H + k*s are new until k*s falls back into H
            while !set.contains(shift as usize) {
                for i in 0..base_len {
                    let y = self.add(elements[i], shift);
                    set.insert(y as usize);
                    elements.push(y);
                }
                shift = self.add(shift, s);
            }
        }
        Span { set, elements, generators }
    }

    /// The right principal ideal `xR`.
    pub fn right_principal(&self, x: Elem) -> Span {
        self.additive_span(self.additive_gens.iter().map(|&b| self.mul(x, b)))
    }

    /// The left principal ideal `Rx`.
    pub fn left_principal(&self, x: Elem) -> Span {
        self.additive_span(self.additive_gens.iter().map(|&b| self.mul(b, x)))
    }

    fn structural_zero(&self) -> Elem {
        match &self.arith {
            Arith::Table { add, .. } => {
                let n = self.order;
                (0..n)
                    .find(|&z| (0..n).all(|a| add[z * n + a] as usize == a && add[a * n + z] as usize == a))
                    .expect("validated table has a zero") as Elem
            }
            _ => 0,
        }
    }

    fn structural_one(&self) -> Elem {
        match &self.arith {
            Arith::Zmod { .. } | Arith::Galois { .. } => 1,
            Arith::TruncPoly { base, .. } => base.one,
            Arith::Matrix { base, n } => {
                let mut d = [base.zero; MAX_DIGITS];
                for i in 0..*n {
                    d[i * n + i] = base.one;
                }
                encode_msb(&d[..n * n], base.order as u32)
            }
            Arith::Product { factors } => {
                let ones: Vec<Elem> = factors.iter().map(|f| f.one).collect();
                self.encode_components(&ones)
            }
            Arith::Table { mul, .. } => {
                let n = self.order;
                (0..n)
                    .find(|&e| (0..n).all(|a| mul[e * n + a] as usize == a && mul[a * n + e] as usize == a))
                    .expect("validated table has an identity") as Elem
            }
        }
    }

    fn encode_components(&self, comps: &[Elem]) -> Elem {
        let factors = self.product_factors().unwrap();
        comps.iter().zip(factors).fold(0, |acc, (&c, f)| acc * f.order as Elem + c)
    }

    fn raw_add(&self, a: Elem, b: Elem) -> Elem {
        match &self.arith {
            Arith::Zmod { m } => ((a as u64 + b as u64) % *m as u64) as Elem,
            Arith::Galois { p, k, .. } => {
                let (mut x, mut y) = ([0; MAX_DIGITS], [0; MAX_DIGITS]);
                decode_lsb(a, *p, &mut x[..*k]);
                decode_lsb(b, *p, &mut y[..*k]);
                for i in 0..*k {
                    x[i] = (x[i] + y[i]) % p;
                }
                encode_lsb(&x[..*k], *p)
            }
            Arith::TruncPoly { base, k } => digitwise(a, b, base.order as u32, *k, |x, y| base.add(x, y)),
            Arith::Matrix { base, n } => digitwise(a, b, base.order as u32, n * n, |x, y| base.add(x, y)),
            Arith::Product { factors } => {
                let (x, y) = (self.components(a).unwrap(), self.components(b).unwrap());
                let z: Vec<Elem> = factors.iter().enumerate().map(|(i, f)| f.add(x[i], y[i])).collect();
                self.encode_components(&z)
            }
            Arith::Table { add, .. } => add[a as usize * self.order + b as usize],
        }
    }

    fn raw_mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.arith {
            Arith::Zmod { m } => ((a as u64 * b as u64) % *m as u64) as Elem,
            Arith::Galois { p, k, modulus } => {
                let (mut x, mut y) = ([0; MAX_DIGITS], [0; MAX_DIGITS]);
                decode_lsb(a, *p, &mut x[..*k]);
                decode_lsb(b, *p, &mut y[..*k]);
                let mut prod = vec![0u32; 2 * k - 1];
                for i in 0..*k {
                    for j in 0..*k {
                        prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
                    }
                }
                let mut r = poly_rem(&prod, modulus, *p);
                r.resize(*k, 0);
                encode_lsb(&r, *p)
            }
            Arith::TruncPoly { base, k } => {
                let q = base.order as u32;
                let (mut x, mut y) = ([0; MAX_DIGITS], [0; MAX_DIGITS]);
                decode_lsb(a, q, &mut x[..*k]);
                decode_lsb(b, q, &mut y[..*k]);
                let mut z = [base.zero; MAX_DIGITS];
                for i in 0..*k {
                    for j in 0..(*k - i) {
                        z[i + j] = base.add(z[i + j], base.mul(x[i], y[j]));
                    }
                }
                encode_lsb(&z[..*k], q)
            }
            Arith::Matrix { base, n } => {
                let q = base.order as u32;
                let n = *n;
                let (mut x, mut y) = ([0; MAX_DIGITS], [0; MAX_DIGITS]);
                decode_msb(a, q, &mut x[..n * n]);
                decode_msb(b, q, &mut y[..n * n]);
                let mut z = [base.zero; MAX_DIGITS];
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = base.zero;
                        for l in 0..n {
                            acc = base.add(acc, base.mul(x[i * n + l], y[l * n + j]));
                        }
                        z[i * n + j] = acc;
                    }
                }
                encode_msb(&z[..n * n], q)
            }
            Arith::Product { factors } => {
                let (x, y) = (self.components(a).unwrap(), self.components(b).unwrap());
                let z: Vec<Elem> = factors.iter().enumerate().map(|(i, f)| f.mul(x[i], y[i])).collect();
                self.encode_components(&z)
            }
            Arith::Table { mul, .. } => mul[a as usize * self.order + b as usize],
        }
    }

    fn compute_negatives(&self) -> Vec<Elem> {
        match &self.arith {
            Arith::Zmod { m } => self.elements().map(|x| (m - x) % m).collect(),
            Arith::Table { .. } => self
                .elements()
                .map(|x| self.elements().find(|&y| self.add(x, y) == self.zero).unwrap())
                .collect(),
            Arith::Galois { p, k, .. } => self
                .elements()
                .map(|x| {
                    let mut d = [0; MAX_DIGITS];
                    decode_lsb(x, *p, &mut d[..*k]);
                    for c in d[..*k].iter_mut() {
                        *c = (p - *c) % p;
                    }
                    encode_lsb(&d[..*k], *p)
                })
                .collect(),
            Arith::TruncPoly { base, k } => {
                self.elements().map(|x| digitwise(x, 0, base.order as u32, *k, |a, _| base.neg(a))).collect()
            }
            Arith::Matrix { base, n } => self
                .elements()
                .map(|x| digitwise(x, 0, base.order as u32, n * n, |a, _| base.neg(a)))
                .collect(),
            Arith::Product { factors } => self
                .elements()
                .map(|x| {
                    let c: Vec<Elem> =
                        factors.iter().zip(self.components(x).unwrap()).map(|(f, c)| f.neg(c)).collect();
                    self.encode_components(&c)
                })
                .collect(),
        }
    }

    fn compute_units(&self) -> Vec<bool> {
        let brute = |x: Elem| {
            self.elements().any(|y| self.mul(x, y) == self.one && self.mul(y, x) == self.one)
        };
        self.elements()
            .into_par_iter()
            .map(|x| match &self.arith {
                Arith::Zmod { m } => num_integer::gcd(x, *m) == 1,
                Arith::Galois { .. } => x != 0,
                Arith::TruncPoly { base, .. } => base.is_unit(x % base.order as Elem),
                Arith::Matrix { base, n } if base.commutative => {
                    let mut d = [0; MAX_DIGITS];
                    decode_msb(x, base.order as u32, &mut d[..n * n]);
                    base.is_unit(determinant(base, &d[..n * n], *n))
                }
                Arith::Product { factors } => {
                    let comps = self.components(x).unwrap();
                    factors.iter().zip(comps).all(|(f, c)| f.is_unit(c))
                }
                _ => brute(x),
            })
            .collect()
    }

    fn compute_additive_gens(&self) -> Vec<Elem> {
        let gens: Vec<Elem> = match &self.arith {
            Arith::Zmod { .. } => vec![1],
            Arith::Galois { p, k, .. } => (0..*k).map(|i| p.pow(i as u32)).collect(),
            Arith::TruncPoly { base, k } => {
                let q = base.order as u32;
                (0..*k)
                    .flat_map(|i| base.additive_gens.iter().map(move |&g| g * q.pow(i as u32)))
                    .collect()
            }
            Arith::Matrix { base, n } => {
                let q = base.order as u32;
                let cells = n * n;
                (0..cells)
                    .flat_map(|j| base.additive_gens.iter().map(move |&g| g * q.pow((cells - 1 - j) as u32)))
                    .collect()
            }
            Arith::Product { factors } => {
                let mut out = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    for &g in &f.additive_gens {
                        let mut comps: Vec<Elem> = factors.iter().map(|h| h.zero).collect();
                        comps[i] = g;
                        out.push(self.encode_components(&comps));
                    }
                }
                out
            }
            Arith::Table { .. } => self.elements().collect(),
        };
        // trims redundant seeds (always for tables)
        self.additive_span(gens).generators
    }

    fn compute_commutative(&self) -> bool {
        match &self.arith {
            Arith::Zmod { .. } | Arith::Galois { .. } | Arith::TruncPoly { .. } => true,
            Arith::Product { factors } => factors.iter().all(|f| f.commutative),
            Arith::Matrix { base, n } if self.order > TABLE_CACHE_MAX => *n == 1 && base.commutative,
            _ => self
                .elements()
                .into_par_iter()
                .all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a))),
        }
    }
}

fn poly_label(
    digits: &[Elem],
    var: &str,
    coeff: impl Fn(Elem) -> String,
    is_zero: impl Fn(Elem) -> bool,
    is_one: impl Fn(Elem) -> bool,
) -> String {
    let mut terms = Vec::new();
    for (deg, &c) in digits.iter().enumerate().rev() {
        if is_zero(c) {
            continue;
        }
        let mono = match deg {
            0 => String::new(),
            1 => var.to_string(),
            d => format!("{var}^{d}"),
        };
        terms.push(if deg == 0 {
            coeff(c)
        } else if is_one(c) {
            mono
        } else {
            format!("{}{mono}", coeff(c))
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

fn digitwise(a: Elem, b: Elem, q: u32, len: usize, op: impl Fn(Elem, Elem) -> Elem) -> Elem {
    let (mut x, mut y) = ([0; MAX_DIGITS], [0; MAX_DIGITS]);
    decode_lsb(a, q, &mut x[..len]);
    decode_lsb(b, q, &mut y[..len]);
    for i in 0..len {
        x[i] = op(x[i], y[i]);
    }
    encode_lsb(&x[..len], q)
}

fn decode_lsb(mut x: Elem, q: u32, out: &mut [Elem]) {
    for d in out.iter_mut() {
        *d = x % q;
        x /= q;
    }
}

fn encode_lsb(digits: &[Elem], q: u32) -> Elem {
    digits.iter().rev().fold(0, |acc, &d| acc * q + d)
}

fn decode_msb(mut x: Elem, q: u32, out: &mut [Elem]) {
    for d in out.iter_mut().rev() {
        *d = x % q;
        x /= q;
    }
}

fn encode_msb(digits: &[Elem], q: u32) -> Elem {
    digits.iter().fold(0, |acc, &d| acc * q + d)
}

/// Leibniz determinant over a commutative base ring.
fn determinant(base: &FiniteRing, m: &[Elem], n: usize) -> Elem {
    fn rec(base: &FiniteRing, m: &[Elem], n: usize, row: usize, used: &mut [bool], acc: Elem, sign: bool) -> Elem {
        if row == n {
            return if sign { base.neg(acc) } else { acc };
        }
        let mut total = base.zero;
        let mut inversions_before = 0;
        for col in 0..n {
            if used[col] {
                continue;
            }
            // parity of the permutation tracked by counting unused columns to the left
            let next_sign = sign ^ (inversions_before % 2 == 1);
            inversions_before += 1;
            let entry = m[row * n + col];
            if entry == base.zero {
                continue;
            }
            used[col] = true;
            let term = rec(base, m, n, row + 1, used, base.mul(acc, entry), next_sign);
            used[col] = false;
            total = base.add(total, term);
        }
        total
    }
    let mut used = [false; MAX_DIGITS];
    rec(base, m, n, 0, &mut used[..n], base.one, false)
}

/// An element together with its ring.
#[derive(Clone)]
pub struct RingElement {
    ring: Arc<FiniteRing>,
    index: Elem,
}

impl std::fmt::Debug for RingElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{}", self.ring.label(self.index), self.ring.spec)
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.ring.same_ring(&other.ring)
    }
}

impl RingElement {
    pub fn new(ring: &Arc<FiniteRing>, index: Elem) -> Result<Self, RingError> {
        if index as usize >= ring.order {
            return Err(RingError::IndexOutOfRange { ring: ring.spec.clone(), index: index as usize });
        }
        Ok(RingElement { ring: ring.clone(), index })
    }

    pub fn parse(ring: &Arc<FiniteRing>, label: &str) -> Result<Self, RingError> {
        Ok(RingElement { ring: ring.clone(), index: ring.parse_element(label)? })
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn index(&self) -> Elem {
        self.index
    }

    pub fn label(&self) -> String {
        self.ring.label(self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
}

pub fn element_arith(op: ArithOp, a: &RingElement, b: Option<&RingElement>) -> Result<RingElement, RingError> {
    let ring = &a.ring;
    let operand = |b: Option<&RingElement>| -> Result<Elem, RingError> {
        let b = b.ok_or_else(|| RingError::InvalidParameter(format!("{op:?} needs two operands")))?;
        if !ring.same_ring(&b.ring) {
            return Err(RingError::RingMismatch(ring.spec.clone(), b.ring.spec.clone()));
        }
        Ok(b.index)
    };
    let index = match op {
        ArithOp::Add => ring.add(a.index, operand(b)?),
        ArithOp::Mul => ring.mul(a.index, operand(b)?),
        ArithOp::Neg => ring.neg(a.index),
    };
    Ok(RingElement { ring: ring.clone(), index })
}
