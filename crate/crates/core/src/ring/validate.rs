//! Exhaustive ring-axiom checks over raw operation tables.

use super::Elem;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    TableShape,
    AdditiveAssociativity,
    AdditiveCommutativity,
    AdditiveIdentity,
    AdditiveInverse,
    MultiplicativeAssociativity,
    MultiplicativeIdentity,
    LeftDistributivity,
    RightDistributivity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    /// Offending element indices (a triple for associativity/distributivity).
    pub witness: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub order: usize,
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, axiom: Axiom) -> Option<&AxiomViolation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "all ring axioms hold (order {})", self.order);
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{:?} at {:?}: {}", v.axiom, v.witness, v.detail)?;
        }
        Ok(())
    }
}

/// Checks raw `order x order` tables. Every violated axiom is reported once,
/// with the first witness in lexicographic order.
pub fn validate_table_ring(order: usize, add: &[Vec<usize>], mul: &[Vec<usize>]) -> ValidationReport {
    let mut report = ValidationReport { order, violations: Vec::new() };
    let shape_ok = order > 0
        && add.len() == order
        && mul.len() == order
        && add.iter().chain(mul.iter()).all(|row| row.len() == order && row.iter().all(|&e| e < order));
    if !shape_ok {
        report.violations.push(AxiomViolation {
            axiom: Axiom::TableShape,
            witness: vec![],
            detail: format!("tables must be {order}x{order} with entries in 0..{order}"),
        });
        return report;
    }
    let add_f = |a: Elem, b: Elem| add[a as usize][b as usize] as Elem;
    let mul_f = |a: Elem, b: Elem| mul[a as usize][b as usize] as Elem;
    report.violations = check_axioms(order, &add_f, &mul_f);
    report
}

/// Axiom scan over arbitrary operation closures.
pub fn check_axioms<A, M>(order: usize, add: &A, mul: &M) -> Vec<AxiomViolation>
where
    A: Fn(Elem, Elem) -> Elem + Sync,
    M: Fn(Elem, Elem) -> Elem + Sync,
{
    let n = order as Elem;
    let mut out = Vec::new();
    let triple = |axiom: Axiom, pred: &(dyn Fn(Elem, Elem, Elem) -> bool + Sync), detail: &str| {
        (0..n).into_par_iter().find_map_first(|a| {
            for b in 0..n {
                for c in 0..n {
                    if !pred(a, b, c) {
                        return Some(AxiomViolation {
                            axiom,
                            witness: vec![a as usize, b as usize, c as usize],
                            detail: detail.to_string(),
                        });
                    }
                }
            }
            None
        })
    };
    let pair = |axiom: Axiom, pred: &(dyn Fn(Elem, Elem) -> bool + Sync), detail: &str| {
        (0..n).into_par_iter().find_map_first(|a| {
            (0..n).find(|&b| !pred(a, b)).map(|b| AxiomViolation {
                axiom,
                witness: vec![a as usize, b as usize],
                detail: detail.to_string(),
            })
        })
    };

    out.extend(triple(
        Axiom::AdditiveAssociativity,
        &|a, b, c| add(add(a, b), c) == add(a, add(b, c)),
        "(a+b)+c != a+(b+c)",
    ));
    out.extend(pair(Axiom::AdditiveCommutativity, &|a, b| add(a, b) == add(b, a), "a+b != b+a"));
    let zero = (0..n).find(|&z| (0..n).all(|a| add(z, a) == a && add(a, z) == a));
    match zero {
        None => out.push(AxiomViolation {
            axiom: Axiom::AdditiveIdentity,
            witness: vec![],
            detail: "no two-sided additive identity".into(),
        }),
        Some(z) => {
            if let Some(a) = (0..n).find(|&a| !(0..n).any(|b| add(a, b) == z && add(b, a) == z)) {
                out.push(AxiomViolation {
                    axiom: Axiom::AdditiveInverse,
                    witness: vec![a as usize],
                    detail: "element without additive inverse".into(),
                });
            }
        }
    }
    out.extend(triple(
        Axiom::MultiplicativeAssociativity,
        &|a, b, c| mul(mul(a, b), c) == mul(a, mul(b, c)),
        "(ab)c != a(bc)",
    ));
    if !(0..n).any(|e| (0..n).all(|a| mul(e, a) == a && mul(a, e) == a)) {
        out.push(AxiomViolation {
            axiom: Axiom::MultiplicativeIdentity,
            witness: vec![],
            detail: "no two-sided multiplicative identity".into(),
        });
    }
    out.extend(triple(
        Axiom::LeftDistributivity,
        &|a, b, c| mul(a, add(b, c)) == add(mul(a, b), mul(a, c)),
        "a(b+c) != ab+ac",
    ));
    out.extend(triple(
        Axiom::RightDistributivity,
        &|a, b, c| mul(add(a, b), c) == add(mul(a, c), mul(b, c)),
        "(a+b)c != ac+bc",
    ));
    out
}
