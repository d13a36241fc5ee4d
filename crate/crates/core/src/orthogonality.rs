//! Orthogonality matrices `W0`, `W`, `Q`, `T`, `WQ`, their determinants and the
//! Extension Property criterion for principal ideal rings.
//!
//! Rows of `W` are left principal ideals `Rr`, columns are right principal ideals
//! `sR`, both in canonical ideal order with the zero ideal first. `Q` is indexed by
//! right principal ideals (rows) and left principal ideals (columns), so `WQ` and
//! `TQ` are square over left principal ideals.

use crate::ideal::{all_ideals, classify_lattices, Classification, IdealError, IdealLattice, Side, DEFAULT_MAX_IDEALS};
use crate::linalg::{self, RatMatrix};
use crate::rational::{self, serde_rational, Rational};
use crate::ring::{Elem, FiniteRing};
use crate::weight::Weight;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const ORDERING: &str = "ideals by cardinality, then lexicographic sorted element indices; zero ideal first";

#[derive(Debug, thiserror::Error)]
pub enum OrthError {
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("{kind:?} is {rows}x{cols}, not square")]
    NotSquare { kind: MatrixKind, rows: usize, cols: usize },
    #[error("{0} is not a principal ideal ring")]
    NotPir(String),
    #[error("the criterion assumes w(0) = 0, got w(0) = {0}")]
    NonzeroW0(String),
    #[error("weight belongs to {weight}, context to {context}")]
    RingMismatch { weight: String, context: String },
    #[error("interpolation of det W in w0 is inconsistent: {0}")]
    Interpolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixKind {
    W0,
    W,
    Q,
    T,
    WQ,
}

impl std::str::FromStr for MatrixKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "W0" => Ok(MatrixKind::W0),
            "W" => Ok(MatrixKind::W),
            "Q" => Ok(MatrixKind::Q),
            "T" => Ok(MatrixKind::T),
            "WQ" => Ok(MatrixKind::WQ),
            _ => Err(format!("unknown matrix {s:?}; expected W0, W, Q, T or WQ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthMatrix {
    pub kind: MatrixKind,
    pub ring: String,
    pub ordering: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    /// Lattice ids of the row ideals (left lattice for `W`, `W0`, `T`, `WQ`; right for `Q`).
    pub row_ids: Vec<usize>,
    pub col_ids: Vec<usize>,
    #[serde(with = "serde_rational_matrix")]
    pub entries: RatMatrix,
}

impl OrthMatrix {
    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }

    pub fn det(&self) -> Result<Rational, OrthError> {
        if !self.is_square() {
            return Err(OrthError::NotSquare { kind: self.kind, rows: self.rows.len(), cols: self.cols.len() });
        }
        Ok(linalg::det(&self.entries))
    }
}

mod serde_rational_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Row(#[serde(with = "crate::rational::serde_rational_vec")] Vec<Rational>);

    pub fn serialize<S: Serializer>(m: &RatMatrix, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|r| Row(r.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RatMatrix, D::Error> {
        Ok(Vec::<Row>::deserialize(d)?.into_iter().map(|Row(r)| r).collect())
    }
}

/// Ideal lattices and annihilators shared by every matrix of one ring.
pub struct OrthogonalityContext {
    ring: Arc<FiniteRing>,
    left: IdealLattice,
    right: IdealLattice,
    rows: Vec<usize>,
    cols: Vec<usize>,
    /// Right-lattice id of `(Rr)^perp` for each row.
    row_perp: Vec<usize>,
    classification: Classification,
}

impl OrthogonalityContext {
    pub fn new(ring: &Arc<FiniteRing>) -> Result<Self, OrthError> {
        let left = all_ideals(ring, Side::Left, DEFAULT_MAX_IDEALS)?;
        let right = all_ideals(ring, Side::Right, DEFAULT_MAX_IDEALS)?;
        let classification = classify_lattices(&left, &right)?;
        let rows = left.principal_ids();
        let cols = right.principal_ids();
        let row_perp = rows
            .par_iter()
            .map(|&i| left.annihilator_in(i, &right))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OrthogonalityContext { ring: ring.clone(), left, right, rows, cols, row_perp, classification })
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn left(&self) -> &IdealLattice {
        &self.left
    }

    pub fn right(&self) -> &IdealLattice {
        &self.right
    }

    pub fn classification(&self) -> &Classification {
        &self.classification
    }

    /// Left principal ideal ids, canonical order, zero first.
    pub fn row_ids(&self) -> &[usize] {
        &self.rows
    }

    /// Right principal ideal ids, canonical order, zero first.
    pub fn col_ids(&self) -> &[usize] {
        &self.cols
    }

    fn row_gen(&self, i: usize) -> Elem {
        self.left.ideal(self.rows[i]).canonical_generator().unwrap()
    }

    fn col_gen(&self, j: usize) -> Elem {
        self.right.ideal(self.cols[j]).canonical_generator().unwrap()
    }

    fn check_ring(&self, w: &Weight) -> Result<(), OrthError> {
        if w.ring().same_ring(&self.ring) {
            Ok(())
        } else {
            Err(OrthError::RingMismatch { weight: w.ring().spec().into(), context: self.ring.spec().into() })
        }
    }

    fn labels(lattice: &IdealLattice, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&i| lattice.ideal(i).label().to_string()).collect()
    }

    fn matrix(&self, kind: MatrixKind, row_side: Side, row_ids: Vec<usize>, col_ids: Vec<usize>, entries: RatMatrix) -> OrthMatrix {
        let (rl, cl) = match row_side {
            Side::Left => (&self.left, &self.right),
            Side::Right => (&self.right, &self.left),
        };
        let cl = if kind == MatrixKind::WQ { &self.left } else { cl };
        OrthMatrix {
            kind,
            ring: self.ring.spec().to_string(),
            ordering: ORDERING.to_string(),
            rows: Self::labels(rl, &row_ids),
            cols: Self::labels(cl, &col_ids),
            row_ids,
            col_ids,
            entries,
        }
    }

    fn w_entries(&self, w: &Weight) -> RatMatrix {
        (0..self.rows.len())
            .into_par_iter()
            .map(|i| {
                let r = self.row_gen(i);
                (0..self.cols.len())
                    .map(|j| {
                        let x = self.ring.mul(r, self.col_gen(j));
                        if x == self.ring.zero() {
                            w.w0().clone()
                        } else {
                            w.value(x).clone()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn q_entries(&self) -> RatMatrix {
        // Q[cR][Rx] = mu((Rx)^perp, cR)
        (0..self.cols.len())
            .map(|c| (0..self.rows.len()).map(|x| rational::int(self.right.mobius(self.row_perp[x], self.cols[c]))).collect())
            .collect()
    }

    fn t_entries(&self) -> RatMatrix {
        // T[Ra][bR] = zeta(bR, (Ra)^perp)
        (0..self.rows.len())
            .map(|a| {
                (0..self.cols.len())
                    .map(|b| rational::int(i64::from(self.right.leq(self.cols[b], self.row_perp[a]))))
                    .collect()
            })
            .collect()
    }

    pub fn build_matrix(&self, w: &Weight, kind: MatrixKind) -> Result<OrthMatrix, OrthError> {
        self.check_ring(w)?;
        Ok(match kind {
            MatrixKind::W => self.matrix(kind, Side::Left, self.rows.clone(), self.cols.clone(), self.w_entries(w)),
            MatrixKind::W0 => {
                let full = self.w_entries(w);
                let entries = full[1..].iter().map(|r| r[1..].to_vec()).collect();
                self.matrix(kind, Side::Left, self.rows[1..].to_vec(), self.cols[1..].to_vec(), entries)
            }
            MatrixKind::Q => self.matrix(kind, Side::Right, self.cols.clone(), self.rows.clone(), self.q_entries()),
            MatrixKind::T => self.matrix(kind, Side::Left, self.rows.clone(), self.cols.clone(), self.t_entries()),
            MatrixKind::WQ => {
                let entries = linalg::mul(&self.w_entries(w), &self.q_entries());
                self.matrix(kind, Side::Left, self.rows.clone(), self.rows.clone(), entries)
            }
        })
    }

    /// Weight-free matrices (`Q`, `T`).
    pub fn structure_matrix(&self, kind: MatrixKind) -> OrthMatrix {
        match kind {
            MatrixKind::Q => self.matrix(kind, Side::Right, self.cols.clone(), self.rows.clone(), self.q_entries()),
            MatrixKind::T => self.matrix(kind, Side::Left, self.rows.clone(), self.cols.clone(), self.t_entries()),
            _ => panic!("{kind:?} depends on a weight"),
        }
    }

    /// `T * Q == I`.
    pub fn tq_is_identity(&self) -> bool {
        self.rows.len() == self.cols.len() && linalg::mul(&self.t_entries(), &self.q_entries()) == linalg::identity(self.rows.len())
    }

    /// `sum over principal dR <= aR of w(d) mu(0, dR)`, optionally skipping `dR = 0`.
    pub fn factor(&self, w: &Weight, right_id: usize, include_zero: bool) -> Rational {
        let zero_id = self.right.zero_id();
        let mu = self.right.mobius_row(zero_id);
        let mut total = Rational::zero();
        for d in 0..=right_id {
            if !self.right.leq(d, right_id) || mu[d] == 0 {
                continue;
            }
            let value = if d == zero_id {
                if !include_zero {
                    continue;
                }
                w.w0().clone()
            } else {
                match self.right.ideal(d).canonical_generator() {
                    Some(g) => w.value(g).clone(),
                    None => continue,
                }
            };
            total += value * rational::int(mu[d]);
        }
        total
    }

    /// One entry per left principal ideal `Ra` (WQ diagonal order), with `aR` for the canonical `a`.
    pub fn diagonal_factors(&self, w: &Weight) -> Result<Vec<DiagonalFactor>, OrthError> {
        self.check_ring(w)?;
        if !self.classification.is_pir {
            return Err(OrthError::NotPir(self.ring.spec().into()));
        }
        Ok(self.diagonal_factors_unchecked(w))
    }

    fn diagonal_factors_unchecked(&self, w: &Weight) -> Vec<DiagonalFactor> {
        (0..self.rows.len())
            .map(|i| {
                let a = self.row_gen(i);
                let right_id = self.right.principal_id_of(a).expect("principal right ideal");
                DiagonalFactor {
                    left_ideal: self.left.ideal(self.rows[i]).label().to_string(),
                    generator: self.ring.label(a),
                    right_ideal: self.right.ideal(right_id).label().to_string(),
                    right_id,
                    value: self.factor(w, right_id, true),
                    nonzero: self.factor(w, right_id, false),
                }
            })
            .collect()
    }

    pub fn det_w0(&self, w: &Weight) -> Result<Rational, OrthError> {
        self.build_matrix(&w.with_w0(Rational::zero()), MatrixKind::W0)?.det()
    }

    /// `prod over nonzero Ra of sum_{0 != dR <= aR} w(d) mu(0, dR)`.
    pub fn det_factorized(&self, w: &Weight) -> Result<Rational, OrthError> {
        Ok(self.diagonal_factors(w)?.iter().skip(1).map(|f| f.nonzero.clone()).product())
    }

    /// `det W` as a polynomial in `w0`, with the checks relating it to `det W0`.
    pub fn det_poly_in_w0(&self, w: &Weight) -> Result<W0Polynomial, OrthError> {
        self.check_ring(w)?;
        let dim = self.rows.len();
        if dim != self.cols.len() {
            return Err(OrthError::NotSquare { kind: MatrixKind::W, rows: dim, cols: self.cols.len() });
        }
        let xs: Vec<Rational> = (0..=dim as i64 + 1).map(rational::int).collect();
        let ys: Vec<Rational> = xs
            .par_iter()
            .map(|t| linalg::det(&self.w_entries(&w.with_w0(t.clone()))))
            .collect();
        let coefficients = linalg::interpolate(&xs[..=dim], &ys[..=dim]);
        if linalg::eval_poly(&coefficients, &xs[dim + 1]) != ys[dim + 1] {
            return Err(OrthError::Interpolation(format!("degree exceeds {dim}")));
        }
        let det_w0 = self.det_w0(w)?;
        let linear = coefficients.get(1).cloned().unwrap_or_else(Rational::zero);
        Ok(W0Polynomial {
            divisible_by_w0: coefficients[0].is_zero(),
            quotient_matches_det_w0: linear == det_w0,
            det_w0,
            coefficients,
        })
    }

    /// Lower triangularity of `WQ` in the ideal order and the diagonal formula.
    pub fn triangularity(&self, w: &Weight) -> Result<TriangularityReport, OrthError> {
        let wq = self.build_matrix(w, MatrixKind::WQ)?;
        let mut violations = Vec::new();
        for (a, row) in wq.entries.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                if !x.is_zero() && !self.left.leq(self.rows[b], self.rows[a]) {
                    violations.push((wq.rows[a].clone(), wq.cols[b].clone()));
                }
            }
        }
        let diagonal: Vec<Rational> = (0..wq.rows.len()).map(|i| wq.entries[i][i].clone()).collect();
        let expected: Vec<Rational> = self.diagonal_factors_unchecked(w).into_iter().map(|f| f.value).collect();
        Ok(TriangularityReport {
            lower_triangular: violations.is_empty(),
            diagonal_matches: diagonal == expected,
            violations,
            diagonal,
            expected,
        })
    }

    /// The Extension Property criterion. On rings that are not principal ideal rings
    /// the verdict is withheld and only `det W0` is reported.
    pub fn criterion(&self, w: &Weight, use_socle_reduction: bool) -> Result<CriterionVerdict, OrthError> {
        self.check_ring(w)?;
        if !w.w0().is_zero() {
            return Err(OrthError::NonzeroW0(rational::format_rational(w.w0())));
        }
        let c = &self.classification;
        let square = self.rows.len() == self.cols.len();
        let det_w0 = if square { Some(self.det_w0(w)?) } else { None };
        let mut verdict = CriterionVerdict {
            ring: self.ring.spec().to_string(),
            ordering: ORDERING.to_string(),
            is_pir: c.is_pir,
            is_frobenius: c.is_frobenius,
            refused: None,
            passes: None,
            socle_reduced: use_socle_reduction,
            factors: Vec::new(),
            decisive: Vec::new(),
            failing: Vec::new(),
            w0_invertible: det_w0.as_ref().map(|d| !d.is_zero()),
            det_w0,
            det_via_factorization: None,
        };
        if !c.is_pir {
            verdict.refused = Some(format!(
                "{} is not a principal ideal ring ({} of {} right ideals principal); W0 invertibility is the applicable test",
                self.ring.spec(),
                c.right_principal,
                c.right_ideals
            ));
            return Ok(verdict);
        }
        let socle = self.right.socle_id()?;
        for &a in self.cols.iter().skip(1) {
            let f = self.factor(w, a, false);
            let label = self.right.ideal(a).label().to_string();
            if !use_socle_reduction || self.right.leq(a, socle) {
                if f.is_zero() {
                    verdict.failing.push(label.clone());
                }
                verdict.decisive.push(label.clone());
            }
            verdict.factors.push((label, f));
        }
        verdict.passes = Some(verdict.failing.is_empty());
        verdict.det_via_factorization = Some(self.det_factorized(w)?);
        Ok(verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalFactor {
    pub left_ideal: String,
    pub generator: String,
    pub right_ideal: String,
    #[serde(skip)]
    pub right_id: usize,
    /// `sum_{dR <= aR} w(d) mu(0, dR)`, including `w0` at `dR = 0`.
    #[serde(with = "serde_rational")]
    pub value: Rational,
    /// Same sum over nonzero `dR`.
    #[serde(with = "serde_rational")]
    pub nonzero: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct W0Polynomial {
    /// Coefficients of `det W` in `w0`, constant term first.
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub coefficients: Vec<Rational>,
    pub divisible_by_w0: bool,
    #[serde(with = "serde_rational")]
    pub det_w0: Rational,
    /// Coefficient of `w0` equals `det W0`.
    pub quotient_matches_det_w0: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangularityReport {
    pub lower_triangular: bool,
    pub diagonal_matches: bool,
    /// `(Ra, Rb)` with `Rb` not below `Ra` and a nonzero entry.
    pub violations: Vec<(String, String)>,
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub diagonal: Vec<Rational>,
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub expected: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionVerdict {
    pub ring: String,
    pub ordering: String,
    pub is_pir: bool,
    pub is_frobenius: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refused: Option<String>,
    pub passes: Option<bool>,
    pub socle_reduced: bool,
    /// Every nonzero right principal ideal and its factor, canonical order.
    #[serde(serialize_with = "serialize_factors")]
    pub factors: Vec<(String, Rational)>,
    /// Ideals whose factors decide the verdict: those below the socle under reduction, else all.
    pub decisive: Vec<String>,
    pub failing: Vec<String>,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub det_w0: Option<Rational>,
    pub w0_invertible: Option<bool>,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub det_via_factorization: Option<Rational>,
}

impl CriterionVerdict {
    pub fn factor(&self, label: &str) -> Option<&Rational> {
        self.factors.iter().find(|(l, _)| l == label).map(|(_, q)| q)
    }
}

fn serialize_factors<S: serde::Serializer>(f: &[(String, Rational)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(f.iter().map(|(k, v)| (k, rational::format_rational(v))))
}

fn serialize_opt_rational<S: serde::Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    q.as_ref().map(rational::format_rational).serialize(s)
}

/// `|a| == |b|`.
pub fn equal_up_to_sign(a: &Rational, b: &Rational) -> bool {
    a == b || a == &-b.clone()
}

/// Whether every entry of `m` is an integer and `m` is the identity.
pub fn is_identity(m: &RatMatrix) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
    })
}
