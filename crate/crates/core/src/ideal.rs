//! One-sided ideal lattices, annihilators, socles and the Möbius function.
//!
//! Ideals are listed in a fixed canonical order: by cardinality, then by the
//! lexicographic order of their sorted element lists. Every matrix built
//! downstream inherits this order, so determinant signs are reproducible.

use crate::ring::{Elem, FiniteRing, OrbitKind};
use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

pub const DEFAULT_MAX_IDEALS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    fn orbit_kind(self) -> OrbitKind {
        match self {
            Side::Left => OrbitKind::Left,
            Side::Right => OrbitKind::Right,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IdealError {
    #[error("ideal enumeration exceeded {cap} ideals")]
    TooManyIdeals { cap: usize },
    #[error("expected a {expected:?} ideal lattice, got {got:?}")]
    SideMismatch { expected: Side, got: Side },
    #[error("ideal is missing from the {side:?} lattice of {ring} (lattice holds principal ideals only)")]
    NotInLattice { ring: String, side: Side },
}

#[derive(Debug, Clone)]
pub struct Ideal {
    id: usize,
    side: Side,
    set: FixedBitSet,
    elements: Vec<Elem>,
    generators: Vec<Elem>,
    additive_gens: Vec<Elem>,
    label: String,
}

impl Ideal {
    /// Builds the ideal with element set `set`, detecting principal generators.
    pub fn from_set(ring: &FiniteRing, side: Side, set: FixedBitSet) -> Ideal {
        let elements: Vec<Elem> = set.ones().map(|x| x as Elem).collect();
        let orbits = ring.orbits(side.orbit_kind());
        let generators = orbits
            .classes()
            .iter()
            .find(|class| {
                set.contains(class[0] as usize) && principal_span(ring, side, class[0]).elements.len() == elements.len()
            })
            .map(|c| c.clone())
            .unwrap_or_default();
        let additive_gens = ring.additive_span(elements.iter().copied()).generators;
        let mut ideal = Ideal { id: 0, side, set, elements, generators, additive_gens, label: String::new() };
        ideal.label = principal_label(ring, &ideal).unwrap_or_default();
        ideal
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn element_set(&self) -> &FixedBitSet {
        &self.set
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.set.contains(x as usize)
    }

    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.set.is_subset(&other.set)
    }

    /// All elements generating this ideal on its side; empty when not principal.
    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn is_principal(&self) -> bool {
        !self.generators.is_empty()
    }

    /// Minimal-index generator.
    pub fn canonical_generator(&self) -> Option<Elem> {
        self.generators.first().copied()
    }

    pub fn additive_generators(&self) -> &[Elem] {
        &self.additive_gens
    }

    /// `"R"`, `"0"`, `"gR"` (right), `"Rg"` (left), or a sum of principal labels.
    pub fn label(&self) -> &str {
        &self.label
    }
}

fn principal_span(ring: &FiniteRing, side: Side, x: Elem) -> crate::ring::Span {
    match side {
        Side::Left => ring.left_principal(x),
        Side::Right => ring.right_principal(x),
    }
}

fn principal_label(ring: &FiniteRing, ideal: &Ideal) -> Option<String> {
    if ideal.size() == 1 {
        return Some("0".into());
    }
    if ideal.size() == ring.order() {
        return Some("R".into());
    }
    let g = ring.label(ideal.canonical_generator()?);
    Some(match ideal.side {
        Side::Left => format!("R{g}"),
        Side::Right => format!("{g}R"),
    })
}

fn canonical_cmp(a: &Ideal, b: &Ideal) -> std::cmp::Ordering {
    a.size().cmp(&b.size()).then_with(|| a.elements.cmp(&b.elements))
}

/// One ideal per unit-orbit class of the matching side (`Rx` for left, `xR` for right).
pub fn principal_ideals(ring: &FiniteRing, side: Side) -> Vec<Ideal> {
    let mut by_set: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut ideals: Vec<Ideal> = Vec::new();
    for class in ring.orbits(side.orbit_kind()).classes() {
        let span = principal_span(ring, side, class[0]);
        if let Some(&i) = by_set.get(&span.set) {
            ideals[i].generators.extend_from_slice(class);
            ideals[i].generators.sort_unstable();
            continue;
        }
        let mut elements = span.elements;
        elements.sort_unstable();
        by_set.insert(span.set.clone(), ideals.len());
        ideals.push(Ideal {
            id: 0,
            side,
            set: span.set,
            elements,
            generators: class.clone(),
            additive_gens: span.generators,
            label: String::new(),
        });
    }
    ideals.sort_by(canonical_cmp);
    for (i, ideal) in ideals.iter_mut().enumerate() {
        ideal.id = i;
        ideal.label = principal_label(ring, ideal).unwrap();
    }
    ideals
}

/// Ideals of one side with containment, principal flags and a memoized Möbius function.
pub struct IdealLattice {
    ring: Arc<FiniteRing>,
    side: Side,
    ideals: Vec<Ideal>,
    /// `above[i]` holds every `j` with `ideals[i] <= ideals[j]`.
    above: Vec<FixedBitSet>,
    index: HashMap<FixedBitSet, usize>,
    complete: bool,
    mobius_rows: Vec<OnceLock<Vec<i64>>>,
}

impl std::fmt::Debug for IdealLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdealLattice")
            .field("ring", &self.ring.spec())
            .field("side", &self.side)
            .field("ideals", &self.ideals.len())
            .field("complete", &self.complete)
            .finish()
    }
}

/// The full lattice of `side` ideals: join-closure of the principal ideals.
pub fn all_ideals(ring: &Arc<FiniteRing>, side: Side, max_ideals: usize) -> Result<IdealLattice, IdealError> {
    let mut ideals = principal_ideals(ring, side);
    let mut index: HashMap<FixedBitSet, usize> =
        ideals.iter().enumerate().map(|(i, ideal)| (ideal.set.clone(), i)).collect();
    let mut by_size: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, ideal) in ideals.iter().enumerate() {
        by_size.entry(ideal.size()).or_default().push(i);
    }
    let mut i = 0;
    while i < ideals.len() {
        for j in 0..i {
            let (a, b) = (&ideals[i], &ideals[j]);
            if a.set.is_subset(&b.set) || b.set.is_subset(&a.set) {
                continue;
            }
            let meet = a.set.intersection_count(&b.set);
            let join_size = a.size() * b.size() / meet;
            let known = by_size.get(&join_size).is_some_and(|ids| {
                ids.iter().any(|&k| a.set.is_subset(&ideals[k].set) && b.set.is_subset(&ideals[k].set))
            });
            if known {
                continue;
            }
            let span = ring.additive_span(a.additive_gens.iter().chain(&b.additive_gens).copied());
            if index.contains_key(&span.set) {
                continue;
            }
            if ideals.len() >= max_ideals {
                return Err(IdealError::TooManyIdeals { cap: max_ideals });
            }
            let mut elements = span.elements;
            elements.sort_unstable();
            let id = ideals.len();
            by_size.entry(elements.len()).or_default().push(id);
            index.insert(span.set.clone(), id);
            ideals.push(Ideal {
                id,
                side,
                set: span.set,
                elements,
                generators: Vec::new(),
                additive_gens: span.generators,
                label: String::new(),
            });
        }
        i += 1;
    }
    Ok(IdealLattice::assemble(ring.clone(), side, ideals, true))
}

impl IdealLattice {
    /// Only the principal ideals; not closed under joins in general.
    pub fn principal(ring: &Arc<FiniteRing>, side: Side) -> IdealLattice {
        IdealLattice::assemble(ring.clone(), side, principal_ideals(ring, side), false)
    }

    fn assemble(ring: Arc<FiniteRing>, side: Side, mut ideals: Vec<Ideal>, complete: bool) -> IdealLattice {
        ideals.sort_by(canonical_cmp);
        for (i, ideal) in ideals.iter_mut().enumerate() {
            ideal.id = i;
        }
        let n = ideals.len();
        let above: Vec<FixedBitSet> = (0..n)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(n);
                for j in i..n {
                    if ideals[i].set.is_subset(&ideals[j].set) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        let index = ideals.iter().map(|ideal| (ideal.set.clone(), ideal.id)).collect();
        // principal labels first; sums are labelled from them
        for ideal in ideals.iter_mut() {
            if let Some(l) = principal_label(&ring, ideal) {
                ideal.label = l;
            }
        }
        let sum_labels: Vec<(usize, String)> = (0..n)
            .filter(|&i| !ideals[i].is_principal() && ideals[i].size() > 1)
            .map(|i| (i, sum_label(&ring, &ideals, i)))
            .collect();
        for (i, l) in sum_labels {
            ideals[i].label = l;
        }
        IdealLattice {
            ring,
            side,
            mobius_rows: (0..n).map(|_| OnceLock::new()).collect(),
            ideals,
            above,
            index,
            complete,
        }
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    /// Whether the lattice holds every ideal of its side.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn ideals(&self) -> &[Ideal] {
        &self.ideals
    }

    pub fn ideal(&self, id: usize) -> &Ideal {
        &self.ideals[id]
    }

    pub fn zero_id(&self) -> usize {
        0
    }

    pub fn top_id(&self) -> usize {
        self.ideals.len() - 1
    }

    pub fn principal_ids(&self) -> Vec<usize> {
        self.ideals.iter().filter(|ideal| ideal.is_principal()).map(|ideal| ideal.id).collect()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.above[i].contains(j)
    }

    pub fn find(&self, set: &FixedBitSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    /// Id of the principal ideal generated by `x` on this lattice's side.
    pub fn principal_id_of(&self, x: Elem) -> Option<usize> {
        self.find(&principal_span(&self.ring, self.side, x).set)
    }

    /// Hasse diagram edges `(lower, upper)`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in self.above[i].ones().filter(|&j| j != i) {
                let between = self.above[i].ones().any(|k| k != i && k != j && self.leq(k, j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Möbius function of the lattice; zero when `lower` is not below `upper`.
    pub fn mobius(&self, lower: usize, upper: usize) -> i64 {
        self.mobius_row(lower)[upper]
    }

    /// `mu(lower, j)` for every `j`, memoized per lower bound.
    pub fn mobius_row(&self, lower: usize) -> &[i64] {
        self.mobius_rows[lower].get_or_init(|| {
            let n = self.len();
            let mut mu = vec![0i64; n];
            // canonical order lists every strict sub-ideal of an ideal before it
            for j in self.above[lower].ones() {
                mu[j] = if j == lower {
                    1
                } else {
                    let below: i64 = self.above[lower]
                        .ones()
                        .take_while(|&t| t < j)
                        .filter(|&t| self.leq(t, j))
                        .map(|t| mu[t])
                        .sum();
                    -below
                };
            }
            mu
        })
    }

    /// Sum of all minimal nonzero ideals. Needs a complete lattice.
    pub fn socle_id(&self) -> Result<usize, IdealError> {
        let atoms = self
            .covers()
            .into_iter()
            .filter(|&(lo, _)| lo == self.zero_id())
            .map(|(_, hi)| hi)
            .collect::<Vec<_>>();
        let seeds = atoms.iter().flat_map(|&a| self.ideals[a].additive_gens.iter().copied());
        let span = self.ring.additive_span(seeds);
        self.find(&span.set)
            .ok_or(IdealError::NotInLattice { ring: self.ring.spec().to_string(), side: self.side })
    }

    /// Annihilator of ideal `id`, located in `target` (a lattice of the opposite side).
    pub fn annihilator_in(&self, id: usize, target: &IdealLattice) -> Result<usize, IdealError> {
        if target.side != self.side.opposite() {
            return Err(IdealError::SideMismatch { expected: self.side.opposite(), got: target.side });
        }
        let set = annihilator_set(&self.ring, &self.ideals[id]);
        target
            .find(&set)
            .ok_or(IdealError::NotInLattice { ring: self.ring.spec().to_string(), side: target.side })
    }
}

fn sum_label(ring: &FiniteRing, ideals: &[Ideal], i: usize) -> String {
    let target = &ideals[i];
    let mut parts: Vec<&Ideal> = ideals
        .iter()
        .filter(|j| j.is_principal() && j.size() > 1 && j.set.is_subset(&target.set))
        .collect();
    parts.sort_by(|a, b| b.size().cmp(&a.size()).then(a.id.cmp(&b.id)));
    let mut acc = ring.additive_span(std::iter::empty());
    let mut labels = Vec::new();
    for part in parts {
        if part.set.is_subset(&acc.set) {
            continue;
        }
        labels.push(part.label.clone());
        acc = ring.additive_span(acc.generators.iter().chain(&part.additive_gens).copied());
        if acc.set == target.set {
            break;
        }
    }
    labels.join("+")
}

/// `{x : Ix = 0}` for a left ideal, `{x : xI = 0}` for a right ideal.
pub fn annihilator_set(ring: &FiniteRing, ideal: &Ideal) -> FixedBitSet {
    let zero = ring.zero();
    let mut set = FixedBitSet::with_capacity(ring.order());
    // a principal ideal is killed exactly when its generator is
    let gens: &[Elem] = match ideal.generators.first() {
        Some(g) => std::slice::from_ref(g),
        None => &ideal.additive_gens,
    };
    for x in ring.elements() {
        let kills = gens.iter().all(|&g| match ideal.side {
            Side::Left => ring.mul(g, x) == zero,
            Side::Right => ring.mul(x, g) == zero,
        });
        if kills {
            set.insert(x as usize);
        }
    }
    set
}

/// The annihilator as an ideal of the opposite side.
pub fn annihilator(ring: &FiniteRing, ideal: &Ideal) -> Ideal {
    Ideal::from_set(ring, ideal.side.opposite(), annihilator_set(ring, ideal))
}

/// Sum of all minimal `side` ideals.
pub fn socle(ring: &Arc<FiniteRing>, side: Side) -> Result<Ideal, IdealError> {
    let lattice = all_ideals(ring, side, DEFAULT_MAX_IDEALS)?;
    let id = lattice.socle_id()?;
    Ok(lattice.ideal(id).clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub is_frobenius: bool,
    pub is_pir: bool,
    pub socles_coincide: bool,
    pub left_ideals: usize,
    pub right_ideals: usize,
    pub left_principal: usize,
    pub right_principal: usize,
}

pub fn classify_lattices(left: &IdealLattice, right: &IdealLattice) -> Result<Classification, IdealError> {
    let (ls, rs) = (left.socle_id()?, right.socle_id()?);
    let (left_principal, right_principal) = (left.principal_ids().len(), right.principal_ids().len());
    Ok(Classification {
        is_frobenius: left.ideal(ls).is_principal() && right.ideal(rs).is_principal(),
        is_pir: left_principal == left.len() && right_principal == right.len(),
        socles_coincide: left.ideal(ls).set == right.ideal(rs).set,
        left_ideals: left.len(),
        right_ideals: right.len(),
        left_principal,
        right_principal,
    })
}

pub fn classify_ring(ring: &Arc<FiniteRing>) -> Result<Classification, IdealError> {
    let left = all_ideals(ring, Side::Left, DEFAULT_MAX_IDEALS)?;
    let right = all_ideals(ring, Side::Right, DEFAULT_MAX_IDEALS)?;
    classify_lattices(&left, &right)
}
