//! Bi-invariant rational weights, built-in weights, symmetry groups and correlation.

use crate::ideal::{all_ideals, Side, DEFAULT_MAX_IDEALS};
use crate::rational::{self, serde_rational, serde_rational_vec, Rational};
use crate::ring::{Elem, FiniteRing, OrbitKind, RingElement, RingError};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

#[derive(Debug, thiserror::Error)]
pub enum WeightError {
    #[error("weight is not bi-invariant: w({x}) = {wx} but w({y}) = {wy}")]
    NotBiInvariant { x: String, y: String, wx: String, wy: String },
    #[error("weight table has no value for the orbit of {0}")]
    Missing(String),
    #[error("invalid rational {0:?}")]
    BadRational(String),
    #[error("{kind} weight is not available on {ring}: {reason}")]
    Unsupported { kind: String, ring: String, reason: String },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("weight JSON: {0}")]
    Json(String),
}

/// Left and right symmetry groups, as sorted unit lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryGroups {
    pub g_lt: Vec<Elem>,
    pub g_rt: Vec<Elem>,
}

/// A weight constant on double unit orbits. The value at zero is kept apart as `w0`.
#[derive(Clone)]
pub struct Weight {
    ring: Arc<FiniteRing>,
    /// Indexed by double-orbit class id; the entry of the zero class is unused.
    values: Vec<Rational>,
    w0: Rational,
    symmetry: OnceLock<SymmetryGroups>,
}

impl std::fmt::Debug for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let table: BTreeMap<String, String> =
            self.orbit_table().into_iter().map(|(x, q)| (self.ring.label(x), rational::format_rational(&q))).collect();
        f.debug_struct("Weight").field("ring", &self.ring.spec()).field("values", &table).finish()
    }
}

impl Weight {
    /// From one value per double orbit (indexed by class id).
    pub fn from_orbit_values(ring: &Arc<FiniteRing>, mut values: Vec<Rational>, w0: Rational) -> Weight {
        let double = ring.orbits(OrbitKind::Double);
        assert_eq!(values.len(), double.len(), "one value per double orbit");
        values[double.class_of(ring.zero())] = w0.clone();
        Weight { ring: ring.clone(), values, w0, symmetry: OnceLock::new() }
    }

    /// From a function on all elements, checking constancy on double orbits.
    pub fn from_element_values(ring: &Arc<FiniteRing>, f: &[Rational]) -> Result<Weight, WeightError> {
        let double = ring.orbits(OrbitKind::Double);
        let mut values = Vec::with_capacity(double.len());
        for class in double.classes() {
            let x = class[0];
            if let Some(&y) = class.iter().find(|&&y| f[y as usize] != f[x as usize]) {
                return Err(not_bi_invariant(ring, x, y, &f[x as usize], &f[y as usize]));
            }
            values.push(f[x as usize].clone());
        }
        let w0 = f[ring.zero() as usize].clone();
        Ok(Weight::from_orbit_values(ring, values, w0))
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn value(&self, x: Elem) -> &Rational {
        &self.values[self.ring.orbits(OrbitKind::Double).class_of(x)]
    }

    pub fn w0(&self) -> &Rational {
        &self.w0
    }

    pub fn with_w0(&self, w0: Rational) -> Weight {
        Weight::from_orbit_values(&self.ring, self.values.clone(), w0)
    }

    /// Values per double-orbit class id.
    pub fn orbit_values(&self) -> &[Rational] {
        &self.values
    }

    /// `(representative, value)` per double orbit, in class order.
    pub fn orbit_table(&self) -> Vec<(Elem, Rational)> {
        let double = self.ring.orbits(OrbitKind::Double);
        double.representatives().zip(self.values.iter().cloned()).collect()
    }

    /// The weight as a function on every element.
    pub fn as_function(&self) -> Vec<Rational> {
        self.ring.elements().map(|x| self.value(x).clone()).collect()
    }

    pub fn symmetry(&self) -> &SymmetryGroups {
        self.symmetry.get_or_init(|| symmetry_groups(&self.ring, &self.as_function()))
    }

    pub fn is_positive(&self) -> bool {
        let zero = self.ring.zero();
        self.ring.elements().filter(|&x| x != zero).all(|x| self.value(x) > &Rational::zero())
    }

    /// Labels of the double-orbit representatives mapped to formatted values.
    pub fn to_table(&self) -> BTreeMap<String, String> {
        self.orbit_table()
            .into_iter()
            .map(|(x, q)| (self.ring.label(x), rational::format_rational(&q)))
            .collect()
    }
}

fn not_bi_invariant(ring: &FiniteRing, x: Elem, y: Elem, wx: &Rational, wy: &Rational) -> WeightError {
    WeightError::NotBiInvariant {
        x: ring.label(x),
        y: ring.label(y),
        wx: rational::format_rational(wx),
        wy: rational::format_rational(wy),
    }
}

/// Builds a weight from element-labelled values. Keys may cover every element or
/// only some element of each double orbit; given keys must agree on their orbit.
/// A missing zero entry means `w0 = 0`.
pub fn make_weight(ring: &Arc<FiniteRing>, table: &BTreeMap<String, Rational>) -> Result<Weight, WeightError> {
    let double = ring.orbits(OrbitKind::Double);
    let mut values: Vec<Option<(Elem, Rational)>> = vec![None; double.len()];
    for (label, q) in table {
        let x = ring.parse_element(label)?;
        let c = double.class_of(x);
        match &values[c] {
            Some((y, prev)) if prev != q => return Err(not_bi_invariant(ring, *y, x, prev, q)),
            Some(_) => {}
            None => values[c] = Some((x, q.clone())),
        }
    }
    let zero_class = double.class_of(ring.zero());
    if values[zero_class].is_none() {
        values[zero_class] = Some((ring.zero(), Rational::zero()));
    }
    let mut out = Vec::with_capacity(values.len());
    for (c, v) in values.into_iter().enumerate() {
        match v {
            Some((_, q)) => out.push(q),
            None => return Err(WeightError::Missing(ring.label(double.class(c)[0]))),
        }
    }
    let w0 = out[zero_class].clone();
    Ok(Weight::from_orbit_values(ring, out, w0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinWeight {
    Hamming,
    Homogeneous(Rational),
    Lee,
    /// `values[k]` is the weight of rank-`k` matrices; a list of length `n` starts at rank 1.
    Rank(Option<Vec<Rational>>),
}

impl BuiltinWeight {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinWeight::Hamming => "hamming",
            BuiltinWeight::Homogeneous(_) => "homogeneous",
            BuiltinWeight::Lee => "lee",
            BuiltinWeight::Rank(_) => "rank",
        }
    }
}

pub fn builtin_weight(ring: &Arc<FiniteRing>, kind: &BuiltinWeight) -> Result<Weight, WeightError> {
    let unsupported = |reason: &str| WeightError::Unsupported {
        kind: kind.name().into(),
        ring: ring.spec().into(),
        reason: reason.into(),
    };
    let zero = ring.zero();
    let f: Vec<Rational> = match kind {
        BuiltinWeight::Hamming => ring.elements().map(|x| rational::int(i64::from(x != zero))).collect(),
        BuiltinWeight::Homogeneous(gamma) => homogeneous_values(ring, gamma).map_err(|e| unsupported(&e.to_string()))?,
        BuiltinWeight::Lee => match ring.zmod_modulus() {
            Some(m) if [2, 3, 4, 6].contains(&m) => lee_values(ring).unwrap(),
            Some(_) => return Err(unsupported("the Lee weight is bi-invariant only for m in {2, 3, 4, 6}")),
            None => return Err(unsupported("the Lee weight is defined on Z(m) only")),
        },
        BuiltinWeight::Rank(values) => {
            let (n, base) = ring.matrix_structure().ok_or_else(|| unsupported("not a matrix ring"))?;
            if !base.is_field() {
                return Err(unsupported("matrix entries must lie in a field"));
            }
            let table: Vec<Rational> = match values {
                None => (0..=n as i64).map(rational::int).collect(),
                Some(v) if v.len() == n + 1 => v.clone(),
                Some(v) if v.len() == n => std::iter::once(Rational::zero()).chain(v.iter().cloned()).collect(),
                Some(v) => return Err(unsupported(&format!("expected {} or {} rank values, got {}", n, n + 1, v.len()))),
            };
            ring.elements().map(|x| table[ring.matrix_rank(x).unwrap()].clone()).collect()
        }
    };
    Weight::from_element_values(ring, &f)
}

/// `gamma * (1 - mu(0, Rx) / |Ux|)` over the left-ideal lattice.
fn homogeneous_values(ring: &Arc<FiniteRing>, gamma: &Rational) -> Result<Vec<Rational>, crate::ideal::IdealError> {
    let lattice = all_ideals(ring, Side::Left, DEFAULT_MAX_IDEALS)?;
    let left = ring.orbits(OrbitKind::Left);
    Ok(ring
        .elements()
        .map(|x| {
            let id = lattice.principal_id_of(x).expect("principal ideal present");
            let mu = rational::int(lattice.mobius(lattice.zero_id(), id));
            let orbit = rational::int(left.class(left.class_of(x)).len() as i64);
            gamma * (rational::one() - mu / orbit)
        })
        .collect())
}

/// `min(x, m - x)` on `Z(m)` for any `m`, as a raw element function.
pub fn lee_values(ring: &FiniteRing) -> Option<Vec<Rational>> {
    let m = ring.zmod_modulus()? as i64;
    Some((0..m).map(|x| rational::int(x.min(m - x))).collect())
}

/// Units fixing `f` under left and right multiplication.
pub fn symmetry_groups(ring: &FiniteRing, f: &[Rational]) -> SymmetryGroups {
    let fixes = |act: &dyn Fn(Elem) -> Elem| ring.elements().all(|x| f[act(x) as usize] == f[x as usize]);
    let g_lt = ring.units().iter().copied().filter(|&u| fixes(&|x| ring.mul(u, x))).collect();
    let g_rt = ring.units().iter().copied().filter(|&v| fixes(&|x| ring.mul(x, v))).collect();
    SymmetryGroups { g_lt, g_rt }
}

/// `(wf)(x) = sum_r w(rx) f(r)`.
pub fn correlate(ring: &FiniteRing, w: &[Rational], f: &[Rational]) -> Vec<Rational> {
    let support: Vec<(Elem, &Rational)> =
        ring.elements().zip(f).filter(|(_, c)| !c.is_zero()).collect();
    ring.elements()
        .map(|x| {
            support
                .iter()
                .fold(Rational::zero(), |acc, &(r, c)| acc + &w[ring.mul(r, x) as usize] * c)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// `|Ur|^-1` on the left orbit `Ur`.
    EpsLeftOrbit,
    /// Indicator of the right orbit `sU`.
    ERightOrbit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisFunction {
    pub kind: BasisKind,
    pub generator: Elem,
}

impl BasisFunction {
    pub fn eps(r: Elem) -> Self {
        BasisFunction { kind: BasisKind::EpsLeftOrbit, generator: r }
    }

    pub fn e(s: Elem) -> Self {
        BasisFunction { kind: BasisKind::ERightOrbit, generator: s }
    }

    pub fn values(&self, ring: &FiniteRing) -> Vec<Rational> {
        let orbits = ring.orbits(match self.kind {
            BasisKind::EpsLeftOrbit => OrbitKind::Left,
            BasisKind::ERightOrbit => OrbitKind::Right,
        });
        let class = orbits.class(orbits.class_of(self.generator));
        let c = match self.kind {
            BasisKind::EpsLeftOrbit => Rational::new(1.into(), (class.len() as i64).into()),
            BasisKind::ERightOrbit => rational::one(),
        };
        let mut out = vec![Rational::zero(); ring.order()];
        for &x in class {
            out[x as usize] = c.clone();
        }
        out
    }
}

/// `sum_i w(v_i)`.
pub fn extend_to_tuples(w: &Weight, v: &[RingElement]) -> Result<Rational, WeightError> {
    let mut total = Rational::zero();
    for x in v {
        if !x.ring().same_ring(&w.ring) {
            return Err(RingError::RingMismatch(w.ring.spec().into(), x.ring().spec().into()).into());
        }
        total += w.value(x.index());
    }
    Ok(total)
}

/// Weight file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightSpec {
    Table {
        #[serde(with = "serde_rational_map")]
        values: BTreeMap<String, Rational>,
    },
    Hamming,
    Homogeneous {
        #[serde(default = "rational::one", with = "serde_rational")]
        gamma: Rational,
    },
    Lee,
    Rank {
        #[serde(default, with = "serde_opt_rational_vec", skip_serializing_if = "Option::is_none")]
        ranks: Option<Vec<Rational>>,
    },
}

impl WeightSpec {
    pub fn from_json(text: &str) -> Result<WeightSpec, WeightError> {
        serde_json::from_str(text).map_err(|e| WeightError::Json(e.to_string()))
    }

    /// Shorthand accepted on the command line: `hamming`, `lee`, `rank`, `homogeneous[:gamma]`.
    pub fn from_name(name: &str) -> Option<WeightSpec> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        match (head, arg) {
            ("hamming", None) => Some(WeightSpec::Hamming),
            ("lee", None) => Some(WeightSpec::Lee),
            ("rank", None) => Some(WeightSpec::Rank { ranks: None }),
            ("homogeneous", None) => Some(WeightSpec::Homogeneous { gamma: rational::one() }),
            ("homogeneous", Some(g)) => rational::parse_rational(g).ok().map(|gamma| WeightSpec::Homogeneous { gamma }),
            _ => None,
        }
    }

    pub fn build(&self, ring: &Arc<FiniteRing>) -> Result<Weight, WeightError> {
        match self {
            WeightSpec::Table { values } => make_weight(ring, values),
            WeightSpec::Hamming => builtin_weight(ring, &BuiltinWeight::Hamming),
            WeightSpec::Homogeneous { gamma } => builtin_weight(ring, &BuiltinWeight::Homogeneous(gamma.clone())),
            WeightSpec::Lee => builtin_weight(ring, &BuiltinWeight::Lee),
            WeightSpec::Rank { ranks } => builtin_weight(ring, &BuiltinWeight::Rank(ranks.clone())),
        }
    }
}

mod serde_rational_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Q(#[serde(with = "serde_rational")] Rational);

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Rational>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k, rational::format_rational(v))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Rational>, D::Error> {
        let raw: BTreeMap<String, Q> = BTreeMap::deserialize(d)?;
        Ok(raw.into_iter().map(|(k, Q(v))| (k, v)).collect())
    }
}

mod serde_opt_rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct V(#[serde(with = "serde_rational_vec")] Vec<Rational>);

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|v| V(v.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        Ok(Option::<V>::deserialize(d)?.map(|V(v)| v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, RingConfig};
    use proptest::prelude::*;

    fn ring(spec: &str) -> Arc<FiniteRing> {
        build_ring(spec, &RingConfig::default()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rational::int(x)).collect()
    }

    fn table(pairs: &[(&str, i64)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|&(k, v)| (k.to_string(), rational::int(v))).collect()
    }

    #[test]
    fn lee_table_on_z4_is_bi_invariant() {
        let r = ring("Z(4)");
        let w = make_weight(&r, &table(&[("0", 0), ("1", 1), ("2", 2), ("3", 1)])).unwrap();
        assert_eq!(w.as_function(), ints(&[0, 1, 2, 1]));
        assert_eq!(w.symmetry(), &SymmetryGroups { g_lt: vec![1, 3], g_rt: vec![1, 3] });
        // orbit-level table
        let w2 = make_weight(&r, &table(&[("1", 1), ("2", 2)])).unwrap();
        assert_eq!(w2.as_function(), w.as_function());
    }

    #[test]
    fn lee_table_on_z8_is_rejected_with_witness() {
        let r = ring("Z(8)");
        let t: BTreeMap<String, Rational> =
            [0, 1, 2, 3, 4, 3, 2, 1].iter().enumerate().map(|(i, &v)| (i.to_string(), rational::int(v))).collect();
        match make_weight(&r, &t) {
            Err(WeightError::NotBiInvariant { x, y, wx, wy }) => {
                let (x, y): (i64, i64) = (x.parse().unwrap(), y.parse().unwrap());
                assert_eq!(x % 2, 1);
                assert_eq!(y % 2, 1);
                assert_ne!(wx, wy);
            }
            other => panic!("expected a bi-invariance error, got {other:?}"),
        }
        assert!(matches!(builtin_weight(&r, &BuiltinWeight::Lee), Err(WeightError::Unsupported { .. })));
        let g = symmetry_groups(&r, &lee_values(&r).unwrap());
        assert_eq!(g, SymmetryGroups { g_lt: vec![1, 7], g_rt: vec![1, 7] });
    }

    #[test]
    fn missing_orbit_is_reported() {
        let r = ring("Z(4)");
        assert!(matches!(make_weight(&r, &table(&[("1", 1)])), Err(WeightError::Missing(l)) if l == "2"));
    }

    #[test]
    fn homogeneous_on_z4_is_lee() {
        let r = ring("Z(4)");
        let w = builtin_weight(&r, &BuiltinWeight::Homogeneous(rational::one())).unwrap();
        assert_eq!(w.as_function(), ints(&[0, 1, 2, 1]));
        assert_eq!(builtin_weight(&r, &BuiltinWeight::Lee).unwrap().as_function(), w.as_function());
    }

    #[test]
    fn homogeneous_average_is_constant_on_nonzero_ideals() {
        // defining property: the average over every nonzero principal left ideal equals gamma
        for spec in ["Z(12)", "Mat(2,GF(2))", "PChain(2,3)", "Prod(Z(4),GF(3))"] {
            let r = ring(spec);
            let w = builtin_weight(&r, &BuiltinWeight::Homogeneous(rational::int(3))).unwrap();
            for x in r.elements().filter(|&x| x != r.zero()) {
                let ideal = r.left_principal(x);
                let sum = ideal.elements.iter().fold(Rational::zero(), |a, &y| a + w.value(y));
                assert_eq!(sum / rational::int(ideal.elements.len() as i64), rational::int(3), "{spec}");
            }
        }
    }

    #[test]
    fn rank_and_hamming() {
        let r = ring("Mat(2,GF(2))");
        let h = builtin_weight(&r, &BuiltinWeight::Hamming).unwrap();
        assert!(r.elements().skip(1).all(|x| h.value(x) == &rational::one()));
        let rk = builtin_weight(&r, &BuiltinWeight::Rank(None)).unwrap();
        let one = r.parse_element("[[1,0],[0,1]]").unwrap();
        let e11 = r.parse_element("[[1,0],[0,0]]").unwrap();
        assert_eq!(rk.value(one), &rational::int(2));
        let v: Vec<RingElement> =
            [one, r.zero(), e11].iter().map(|&x| RingElement::new(&r, x).unwrap()).collect();
        assert_eq!(extend_to_tuples(&rk, &v).unwrap(), rational::int(3));
        let r3 = ring("Mat(3,GF(2))");
        let rk3 = builtin_weight(&r3, &BuiltinWeight::Rank(None)).unwrap();
        assert!(r3.elements().all(|x| rk3.value(x) == &rational::int(r3.matrix_rank(x).unwrap() as i64)));
        let custom = builtin_weight(&r, &BuiltinWeight::Rank(Some(ints(&[5, 7])))).unwrap();
        assert_eq!(custom.value(one), &rational::int(7));
        assert!(matches!(builtin_weight(&ring("Z(4)"), &BuiltinWeight::Rank(None)), Err(WeightError::Unsupported { .. })));
    }

    #[test]
    fn extend_to_tuples_examples() {
        let r = ring("Z(4)");
        let lee = builtin_weight(&r, &BuiltinWeight::Lee).unwrap();
        let v: Vec<RingElement> = [1, 2, 3].iter().map(|&x| RingElement::new(&r, x).unwrap()).collect();
        assert_eq!(extend_to_tuples(&lee, &v).unwrap(), rational::int(4));
        let other = ring("Z(5)");
        let bad = vec![RingElement::new(&other, 1).unwrap()];
        assert!(extend_to_tuples(&lee, &bad).is_err());
    }

    #[test]
    fn correlation_examples() {
        let r = ring("Z(4)");
        let lee = builtin_weight(&r, &BuiltinWeight::Lee).unwrap().as_function();
        // identity basis element acts trivially
        let mut e1 = vec![Rational::zero(); 4];
        e1[1] = rational::one();
        assert_eq!(correlate(&r, &lee, &e1), lee);
        assert_eq!(correlate(&r, &lee, &BasisFunction::eps(2).values(&r))[1], rational::int(2));
    }

    #[test]
    fn basis_functions() {
        let r = ring("Mat(2,GF(2))");
        for x in r.elements() {
            let eps = BasisFunction::eps(x).values(&r);
            assert_eq!(eps.iter().sum::<Rational>(), rational::one());
            let e = BasisFunction::e(x).values(&r);
            assert!(e.iter().all(|q| q.is_zero() || q == &rational::one()));
        }
    }

    #[test]
    fn weight_spec_json() {
        let spec = WeightSpec::from_json(r#"{"kind":"table","values":{"1":"1","2":2,"3":"1"}}"#).unwrap();
        let w = spec.build(&ring("Z(4)")).unwrap();
        assert_eq!(w.as_function(), ints(&[0, 1, 2, 1]));
        let h = WeightSpec::from_json(r#"{"kind":"homogeneous","gamma":"3/2"}"#).unwrap();
        assert_eq!(h, WeightSpec::Homogeneous { gamma: rational::parse_rational("3/2").unwrap() });
        let back: WeightSpec = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
        assert_eq!(back, h);
        assert!(WeightSpec::from_json(r#"{"kind":"table","values":{"1":"x"}}"#).is_err());
        assert!(WeightSpec::from_json(r#"{"kind":"fancy"}"#).is_err());
        assert_eq!(WeightSpec::from_name("homogeneous:2"), Some(WeightSpec::Homogeneous { gamma: rational::int(2) }));
    }

    fn random_weight(r: &Arc<FiniteRing>, seed: &[i64]) -> Weight {
        let n = r.orbits(OrbitKind::Double).len();
        let values = (0..n).map(|i| rational::int(seed[i % seed.len()])).collect();
        Weight::from_orbit_values(r, values, Rational::zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn per_orbit_weights_are_bi_invariant(seed in proptest::collection::vec(-9i64..10, 1..8), which in 0usize..4) {
            let spec = ["Z(12)", "Mat(2,GF(2))", "Mat(2,ZChain(2,2))", "Prod(Z(4),GF(3))"][which];
            let r = ring(spec);
            let w = random_weight(&r, &seed);
            for &u in r.units() {
                for &v in r.units().iter().step_by(3) {
                    for x in r.elements() {
                        prop_assert_eq!(w.value(r.mul(r.mul(u, x), v)), w.value(x));
                    }
                }
            }
            let g = w.symmetry();
            prop_assert_eq!(&g.g_lt[..], r.units());
            prop_assert_eq!(&g.g_rt[..], r.units());
        }

        #[test]
        fn correlation_with_point_mass_is_left_multiplication(seed in proptest::collection::vec(-9i64..10, 1..8), which in 0usize..3) {
            let spec = ["Z(12)", "Mat(2,GF(2))", "PChain(2,3)"][which];
            let r = ring(spec);
            let w = random_weight(&r, &seed).as_function();
            for a in r.elements() {
                let mut e = vec![Rational::zero(); r.order()];
                e[a as usize] = rational::one();
                let we = correlate(&r, &w, &e);
                for x in r.elements() {
                    prop_assert_eq!(&we[x as usize], &w[r.mul(a, x) as usize]);
                }
            }
        }

        #[test]
        fn eps_correlation_expands_in_right_orbit_indicators(seed in proptest::collection::vec(-9i64..10, 1..8), which in 0usize..4) {
            // w eps_{Rr} = sum over nonzero sR of w(rs) e_{sR}
            let spec = ["Z(12)", "Mat(2,GF(2))", "Mat(2,ZChain(2,2))", "Prod(Z(4),GF(2))"][which];
            let r = ring(spec);
            let w = random_weight(&r, &seed);
            let wf = w.as_function();
            let right = r.orbits(OrbitKind::Right);
            for rr in r.orbits(OrbitKind::Left).representatives().filter(|&x| x != r.zero()) {
                let lhs = correlate(&r, &wf, &BasisFunction::eps(rr).values(&r));
                let mut rhs = vec![Rational::zero(); r.order()];
                for s in right.representatives().filter(|&x| x != r.zero()) {
                    let c = w.value(r.mul(rr, s));
                    for (i, q) in BasisFunction::e(s).values(&r).iter().enumerate() {
                        rhs[i] += c * q;
                    }
                }
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn correlation_preserves_right_invariance(seed in proptest::collection::vec(-9i64..10, 1..8), f in proptest::collection::vec(-3i64..4, 16)) {
            let r = ring("Mat(2,GF(2))");
            let w = random_weight(&r, &seed).as_function();
            let f: Vec<Rational> = f.iter().map(|&x| rational::int(x)).collect();
            let wf = correlate(&r, &w, &f);
            prop_assert!(wf[r.zero() as usize].is_zero());
            let g = symmetry_groups(&r, &wf);
            prop_assert_eq!(&g.g_rt[..], r.units());
        }
    }
}
