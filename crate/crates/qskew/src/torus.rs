//! Exact arithmetic in a quantum torus `P(Lambda)` on `n` generators,
//! together with the center lattice and the constructive splitting of a
//! derivation into an inner part plus a central derivation.
//!
//! The generators satisfy `T_i T_j = q^{M[i][j]} T_j T_i` for an integer
//! antisymmetric matrix `M`; elements are finitely supported maps from
//! `Z^n` exponent vectors to `Q(q)` coefficients. The normal-order
//! convention is ascending generator index left to right, and
//! `T^g T_i = q^m T_i T^g` with `m = sum_k M[k][i] g_k`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::field::QElem;

/// Exponent vector in `Z^n`.
pub type Exponent = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error("matrix is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("exponent vector has wrong length {got}, expected {expected}")]
    BadExponent { got: usize, expected: usize },
    #[error("the map is not a derivation of the torus: witness exponent {gamma:?} at generator {index}")]
    InconsistentDerivation { gamma: Exponent, index: usize },
}

/// The q-commutation data: an `n x n` integer antisymmetric matrix `M`
/// with `Lambda_{i,j} = q^{M[i][j]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaMatrix {
    m: Vec<Vec<i64>>,
}

impl LambdaMatrix {
    pub fn new(m: Vec<Vec<i64>>) -> Result<Self, TorusError> {
        let n = m.len();
        for (i, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(TorusError::BadExponent {
                    got: row.len(),
                    expected: n,
                });
            }
            for j in 0..n {
                if m[i][j] != -m[j][i] {
                    return Err(TorusError::NotAntisymmetric(i, j));
                }
            }
        }
        Ok(LambdaMatrix { m })
    }

    pub fn size(&self) -> usize {
        self.m.len()
    }

    /// `m` with `T_i T_j = q^m T_j T_i`, 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.m[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.m
    }
}

/// The 6x6 exponent matrix of the quantum torus attached to `U_q(sl4+)`.
pub fn uqsl4_lambda() -> LambdaMatrix {
    LambdaMatrix::new(vec![
        vec![0, 1, 1, -1, -1, 0],
        vec![-1, 0, 1, 1, 0, -1],
        vec![-1, -1, 0, 0, 1, 1],
        vec![1, -1, 0, 0, 1, -1],
        vec![1, 0, -1, -1, 0, 1],
        vec![0, 1, -1, 1, -1, 0],
    ])
    .expect("constant matrix is antisymmetric")
}

/// An element of `P(Lambda)`: exponent vectors with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TorusElement {
    terms: BTreeMap<Exponent, QElem>,
}

impl TorusElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(exp: Exponent, coeff: QElem) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        TorusElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &QElem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &Exponent) -> QElem {
        self.terms.get(exp).cloned().unwrap_or_else(QElem::zero)
    }

    pub fn add_term(&mut self, exp: Exponent, coeff: QElem) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(c) => {
                *c = c.add(&coeff);
                if c.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        TorusElement {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &QElem) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TorusElement {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.mul(c))).collect(),
        }
    }

    /// `Some((exp, coeff))` when the element is a single monomial.
    pub fn as_monomial(&self) -> Option<(&Exponent, &QElem)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (e, c))
        } else {
            None
        }
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, "T", self.terms.iter().map(|(e, c)| (e.as_slice(), c)))
    }
}

/// Renders `c * G1^a1 * ...` sums; shared by the torus and PBW displays.
pub(crate) fn fmt_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    gen: &str,
    terms: impl Iterator<Item = (&'a [i64], &'a QElem)>,
) -> fmt::Result {
    let mut first = true;
    for (exp, coeff) in terms {
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        let mut factors = Vec::new();
        for (i, e) in exp.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(format!("{}{}", gen, i + 1)),
                _ => factors.push(format!("{}{}^{}", gen, i + 1, e)),
            }
        }
        let coeff_str = format!("{}", coeff);
        let simple = coeff.as_q_power().is_some() || coeff.as_rat().is_some();
        if factors.is_empty() {
            if simple {
                write!(f, "{}", coeff_str)?;
            } else {
                write!(f, "({})", coeff_str)?;
            }
        } else if coeff.is_one() {
            write!(f, "{}", factors.join("*"))?;
        } else if simple {
            write!(f, "{}*{}", coeff_str, factors.join("*"))?;
        } else {
            write!(f, "({})*{}", coeff_str, factors.join("*"))?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// A derivation of the torus, given by its values on the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusDerivation {
    pub images: Vec<TorusElement>,
}

/// Output of the inner/central splitting: `D = ad_x + theta` with
/// `theta(T_i) = mu_i T_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusDecomposition {
    /// Inner part, with no central monomial in its support.
    pub x: TorusElement,
    /// Central multipliers, one per generator.
    pub mu: Vec<TorusElement>,
}

/// The torus algebra: multiplication, center, derivation decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumTorus {
    lambda: LambdaMatrix,
}

impl QuantumTorus {
    pub fn new(lambda: LambdaMatrix) -> Self {
        QuantumTorus { lambda }
    }

    pub fn uqsl4() -> Self {
        Self::new(uqsl4_lambda())
    }

    pub fn size(&self) -> usize {
        self.lambda.size()
    }

    pub fn lambda(&self) -> &LambdaMatrix {
        &self.lambda
    }

    pub fn one(&self) -> TorusElement {
        TorusElement::monomial(vec![0; self.size()], QElem::one())
    }

    /// The generator `T_i`, 1-based.
    pub fn generator(&self, i: usize) -> TorusElement {
        assert!(i >= 1 && i <= self.size());
        let mut exp = vec![0i64; self.size()];
        exp[i - 1] = 1;
        TorusElement::monomial(exp, QElem::one())
    }

    /// Scalar from the normal-ordering `T^g * T^d = q^s T^{g+d}`.
    fn reorder_exponent(&self, g: &[i64], d: &[i64]) -> i64 {
        let m = self.lambda.rows();
        let mut s = 0i64;
        for k in 0..g.len() {
            if g[k] == 0 {
                continue;
            }
            for l in 0..k {
                if d[l] != 0 {
                    s += m[k][l] * g[k] * d[l];
                }
            }
        }
        s
    }

    pub fn mul(&self, a: &TorusElement, b: &TorusElement) -> TorusElement {
        let mut out = TorusElement::zero();
        for (g, cg) in a.terms() {
            for (d, cd) in b.terms() {
                let s = self.reorder_exponent(g, d);
                let exp: Exponent = g.iter().zip(d.iter()).map(|(x, y)| x + y).collect();
                out.add_term(exp, cg.mul(cd).mul(&QElem::q_power(s)));
            }
        }
        out
    }

    /// Inverse of a monomial (the only invertible elements apart from scalars).
    pub fn monomial_inverse(&self, a: &TorusElement) -> Option<TorusElement> {
        let (exp, coeff) = a.as_monomial()?;
        let inv_exp: Exponent = exp.iter().map(|e| -e).collect();
        let s = self.reorder_exponent(exp, &inv_exp);
        let coeff = coeff.inv().ok()?.mul(&QElem::q_power(-s));
        Some(TorusElement::monomial(inv_exp, coeff))
    }

    pub fn commutator(&self, a: &TorusElement, b: &TorusElement) -> TorusElement {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    /// `m` with `T^g T_i = q^m T_i T^g`; `i` is 1-based.
    pub fn sigma_exponent(&self, g: &[i64], i: usize) -> i64 {
        let m = self.lambda.rows();
        (0..g.len()).map(|k| m[k][i - 1] * g[k]).sum()
    }

    /// Scalar from `T_i T^g = q^m T^{g + e_i}`.
    fn prefix_exponent(&self, i: usize, g: &[i64]) -> i64 {
        let m = self.lambda.rows();
        (0..i - 1).map(|k| m[i - 1][k] * g[k]).sum()
    }

    pub fn exponent_is_central(&self, g: &[i64]) -> bool {
        (1..=self.size()).all(|i| self.sigma_exponent(g, i) == 0)
    }

    pub fn is_central(&self, a: &TorusElement) -> bool {
        a.terms().all(|(g, _)| self.exponent_is_central(g))
    }

    /// Canonical basis of the lattice of central exponents.
    pub fn central_exponent_basis(&self) -> Vec<Exponent> {
        integer_kernel(self.lambda.rows())
    }

    /// Remove the centrally supported monomials.
    pub fn strip_central(&self, a: &TorusElement) -> TorusElement {
        let mut out = TorusElement::zero();
        for (g, c) in a.terms() {
            if !self.exponent_is_central(g) {
                out.add_term(g.clone(), c.clone());
            }
        }
        out
    }

    /// Check the pairwise Leibniz condition on the defining relations.
    pub fn check_derivation(&self, d: &TorusDerivation) -> bool {
        if d.images.len() != self.size() {
            return false;
        }
        let n = self.size();
        for i in 1..=n {
            for j in (i + 1)..=n {
                let ti = self.generator(i);
                let tj = self.generator(j);
                let lhs = self
                    .mul(&d.images[i - 1], &tj)
                    .add(&self.mul(&ti, &d.images[j - 1]));
                let rhs = self
                    .mul(&d.images[j - 1], &ti)
                    .add(&self.mul(&tj, &d.images[i - 1]))
                    .scale(&QElem::q_power(self.lambda.entry(i, j)));
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Apply a derivation to an arbitrary element by the Leibniz rule.
    pub fn apply_derivation(&self, d: &TorusDerivation, a: &TorusElement) -> TorusElement {
        let mut out = TorusElement::zero();
        for (g, c) in a.terms() {
            out = out.add(&self.apply_derivation_monomial(d, g).scale(c));
        }
        out
    }

    fn apply_derivation_monomial(&self, d: &TorusDerivation, g: &[i64]) -> TorusElement {
        // D(uv) = D(u)v + uD(v), with D(T_i^{-1}) = -T_i^{-1} D(T_i) T_i^{-1}.
        let mut prefix = self.one();
        let mut dprefix = TorusElement::zero();
        for i in 1..=self.size() {
            let e = g[i - 1];
            if e == 0 {
                continue;
            }
            let (step, count) = if e > 0 {
                (self.generator(i), e)
            } else {
                (
                    self.monomial_inverse(&self.generator(i))
                        .expect("generators are invertible"),
                    -e,
                )
            };
            let dstep = if e > 0 {
                d.images[i - 1].clone()
            } else {
                self.mul(&self.mul(&step, &d.images[i - 1]), &step).neg()
            };
            for _ in 0..count {
                dprefix = self
                    .mul(&dprefix, &step)
                    .add(&self.mul(&prefix, &dstep));
                prefix = self.mul(&prefix, &step);
            }
        }
        dprefix
    }

    /// Split a torus derivation as `ad_x + theta` with `theta(T_i) = mu_i T_i`
    /// and `mu_i` central; `x` carries no central monomial.
    pub fn decompose_derivation(
        &self,
        d: &TorusDerivation,
    ) -> Result<TorusDecomposition, TorusError> {
        let n = self.size();
        assert_eq!(d.images.len(), n);

        // d_{i,g}: D(T_i) = sum_g d_{i,g} T_i T^g
        let mut by_gamma: BTreeMap<Exponent, Vec<(usize, QElem)>> = BTreeMap::new();
        for i in 1..=n {
            for (gp, c) in d.images[i - 1].terms() {
                let mut g = gp.clone();
                g[i - 1] -= 1;
                let coeff = c.mul(&QElem::q_power(-self.prefix_exponent(i, &g)));
                by_gamma.entry(g).or_default().push((i, coeff));
            }
        }

        let mut x = TorusElement::zero();
        let mut mu = vec![TorusElement::zero(); n];
        for (g, entries) in by_gamma.iter() {
            if self.exponent_is_central(g) {
                for (i, c) in entries {
                    mu[i - 1].add_term(g.clone(), c.clone());
                }
                continue;
            }
            // cross-checked division by q^sigma - 1
            let mut c_gamma: Option<QElem> = None;
            let lookup = |i: usize| -> QElem {
                entries
                    .iter()
                    .find(|(j, _)| *j == i)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(QElem::zero)
            };
            for i in 1..=n {
                let s = self.sigma_exponent(g, i);
                let d_ig = lookup(i);
                if s == 0 {
                    if !d_ig.is_zero() {
                        return Err(TorusError::InconsistentDerivation {
                            gamma: g.clone(),
                            index: i,
                        });
                    }
                    continue;
                }
                let denom = QElem::q_power(s).sub(&QElem::one());
                let c = d_ig.div(&denom).expect("q^s - 1 is nonzero for s != 0");
                match &c_gamma {
                    None => c_gamma = Some(c),
                    Some(prev) => {
                        if *prev != c {
                            return Err(TorusError::InconsistentDerivation {
                                gamma: g.clone(),
                                index: i,
                            });
                        }
                    }
                }
            }
            let c = c_gamma.expect("noncentral exponent has a nonzero sigma");
            x.add_term(g.clone(), c);
        }

        // Exact reconstruction check.
        for i in 1..=n {
            let ti = self.generator(i);
            let rebuilt = self
                .commutator(&x, &ti)
                .add(&self.mul(&mu[i - 1], &ti));
            if rebuilt != d.images[i - 1] {
                return Err(TorusError::InconsistentDerivation {
                    gamma: vec![0; n],
                    index: i,
                });
            }
        }
        Ok(TorusDecomposition { x, mu })
    }

    /// The inner derivation `ad_x`.
    pub fn ad(&self, x: &TorusElement) -> TorusDerivation {
        TorusDerivation {
            images: (1..=self.size())
                .map(|i| self.commutator(x, &self.generator(i)))
                .collect(),
        }
    }
}

/// Canonical (row Hermite form) basis of `{ g in Z^n : M g = 0 }`.
pub fn integer_kernel(m: &[Vec<i64>]) -> Vec<Exponent> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { 1 } else { 0 }).collect())
        .collect();

    // Column reduction with unimodular column ops mirrored on u.
    let mut col = 0usize;
    for row in 0..rows {
        loop {
            let mut pivot: Option<usize> = None;
            for j in col..cols {
                if a[row][j] != 0
                    && pivot.map_or(true, |p| a[row][j].abs() < a[row][p].abs())
                {
                    pivot = Some(j);
                }
            }
            let Some(p) = pivot else { break };
            if p != col {
                for r in a.iter_mut() {
                    r.swap(col, p);
                }
                for r in u.iter_mut() {
                    r.swap(col, p);
                }
            }
            let mut done = true;
            for j in (col + 1)..cols {
                if a[row][j] != 0 {
                    let q = a[row][j].div_euclid(a[row][col]);
                    for r in a.iter_mut() {
                        let v = r[col] * q;
                        r[j] -= v;
                    }
                    for r in u.iter_mut() {
                        let v = r[col] * q;
                        r[j] -= v;
                    }
                    if a[row][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[row].get(col).map_or(false, |&v| v != 0) {
            col += 1;
            if col == cols {
                break;
            }
        }
    }

    let mut kernel: Vec<Vec<i128>> = (col..cols)
        .map(|j| (0..cols).map(|i| u[i][j]).collect())
        .collect();
    row_hermite(&mut kernel);
    kernel
        .into_iter()
        .map(|v| v.into_iter().map(|x| x as i64).collect())
        .collect()
}

/// In-place row Hermite normal form with positive pivots.
fn row_hermite(rows: &mut Vec<Vec<i128>>) {
    if rows.is_empty() {
        return;
    }
    let cols = rows[0].len();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows.len() {
            break;
        }
        // gcd-eliminate column c below row r
        loop {
            let mut pivot: Option<usize> = None;
            for i in r..rows.len() {
                if rows[i][c] != 0
                    && pivot.map_or(true, |p| rows[i][c].abs() < rows[p][c].abs())
                {
                    pivot = Some(i);
                }
            }
            let Some(p) = pivot else { break };
            rows.swap(r, p);
            let mut done = true;
            for i in (r + 1)..rows.len() {
                if rows[i][c] != 0 {
                    let q = rows[i][c].div_euclid(rows[r][c]);
                    for k in 0..cols {
                        let v = rows[r][k] * q;
                        rows[i][k] -= v;
                    }
                    if rows[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c] != 0 {
            if rows[r][c] < 0 {
                for k in 0..cols {
                    rows[r][k] = -rows[r][k];
                }
            }
            for i in 0..r {
                let q = rows[i][c].div_euclid(rows[r][c]);
                if q != 0 {
                    for k in 0..cols {
                        let v = rows[r][k] * q;
                        rows[i][k] -= v;
                    }
                }
            }
            r += 1;
        }
    }
    rows.retain(|row| row.iter().any(|&x| x != 0));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> QuantumTorus {
        QuantumTorus::uqsl4()
    }

    fn mono(t: &QuantumTorus, exp: [i64; 6]) -> TorusElement {
        let _ = t;
        TorusElement::monomial(exp.to_vec(), QElem::one())
    }

    #[test]
    fn generator_products() {
        let t = t();
        let t1 = t.generator(1);
        let t2 = t.generator(2);
        let t1t2 = t.mul(&t1, &t2);
        assert_eq!(t1t2, mono(&t, [1, 1, 0, 0, 0, 0]));
        let t2t1 = t.mul(&t2, &t1);
        assert_eq!(
            t2t1,
            mono(&t, [1, 1, 0, 0, 0, 0]).scale(&QElem::q_power(-1))
        );
        // a * 1 = a
        let a = t.mul(&t2, &t.generator(5));
        assert_eq!(t.mul(&a, &t.one()), a);
    }

    #[test]
    fn z2_is_central() {
        let t = t();
        let z2 = t.mul(&t.generator(2), &t.generator(5));
        let t3 = t.generator(3);
        assert!(t.commutator(&z2, &t3).is_zero());
        assert!(t.is_central(&z2));
        let z1ish = mono(&t, [1, 0, 1, 1, 0, 1]);
        assert!(t.is_central(&z1ish));
        assert!(!t.is_central(&t.generator(1)));
    }

    #[test]
    fn sigma_exponent_convention() {
        let t = t();
        // T^{e1} T_2 = q^1 T_2 T^{e1}
        let e1 = [1, 0, 0, 0, 0, 0];
        assert_eq!(t.sigma_exponent(&e1, 2), 1);
        let lhs = t.mul(&t.generator(1), &t.generator(2));
        let rhs = t
            .mul(&t.generator(2), &t.generator(1))
            .scale(&QElem::q_power(1));
        assert_eq!(lhs, rhs);
        // central exponents have sigma 0 everywhere
        let f = [2, -1, 2, 2, -1, 2];
        for i in 1..=6 {
            assert_eq!(t.sigma_exponent(&f, i), 0);
        }
        let e3 = [0, 0, 1, 0, 0, 0];
        assert_eq!(t.sigma_exponent(&e3, 6), 1);
    }

    #[test]
    fn central_basis_shipped() {
        let t = t();
        assert_eq!(
            t.central_exponent_basis(),
            vec![vec![1, 0, 1, 1, 0, 1], vec![0, 1, 0, 0, 1, 0]]
        );
    }

    #[test]
    fn central_basis_commutative() {
        let zero = LambdaMatrix::new(vec![vec![0; 6]; 6]).unwrap();
        let t = QuantumTorus::new(zero);
        let basis = t.central_exponent_basis();
        assert_eq!(basis.len(), 6);
        for (i, b) in basis.iter().enumerate() {
            let mut unit = vec![0i64; 6];
            unit[i] = 1;
            assert_eq!(*b, unit);
        }
    }

    #[test]
    fn central_basis_two_generator() {
        let m = LambdaMatrix::new(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let t = QuantumTorus::new(m);
        assert!(t.central_exponent_basis().is_empty());
    }

    #[test]
    fn monomial_inverse_roundtrip() {
        let t = t();
        let a = t.mul(&t.generator(1), &t.generator(4)).scale(&QElem::qhat());
        let inv = t.monomial_inverse(&a).unwrap();
        assert_eq!(t.mul(&a, &inv), t.one());
        assert_eq!(t.mul(&inv, &a), t.one());
    }

    #[test]
    fn derivation_checks() {
        let t = t();
        // scaling derivation D(T_i) = T_i
        let d = TorusDerivation {
            images: (1..=6).map(|i| t.generator(i)).collect(),
        };
        assert!(t.check_derivation(&d));
        // inner derivation
        let ad = t.ad(&t.generator(1));
        assert!(t.check_derivation(&ad));
        // D(T_1) = T_2, rest 0 is not a derivation
        let mut images = vec![TorusElement::zero(); 6];
        images[0] = t.generator(2);
        assert!(!t.check_derivation(&TorusDerivation { images }));
    }

    #[test]
    fn decompose_inner() {
        let t = t();
        let ad = t.ad(&t.generator(1));
        let dec = t.decompose_derivation(&ad).unwrap();
        assert_eq!(dec.x, t.generator(1));
        assert!(dec.mu.iter().all(|m| m.is_zero()));
    }

    #[test]
    fn decompose_scaling() {
        let t = t();
        let d = TorusDerivation {
            images: (1..=6).map(|i| t.generator(i)).collect(),
        };
        let dec = t.decompose_derivation(&d).unwrap();
        assert!(dec.x.is_zero());
        for m in dec.mu {
            assert_eq!(m, t.one());
        }
    }

    #[test]
    fn decompose_weight_derivation_extension() {
        // D(T_1)=T_1, D(T_2)=T_2, D(T_3)=T_3, rest 0 -> x = 0, mu = (1,1,1,0,0,0)
        let t = t();
        let mut images = vec![TorusElement::zero(); 6];
        for i in 1..=3 {
            images[i - 1] = t.generator(i);
        }
        let d = TorusDerivation { images };
        assert!(t.check_derivation(&d));
        let dec = t.decompose_derivation(&d).unwrap();
        assert!(dec.x.is_zero());
        for i in 0..6 {
            if i < 3 {
                assert_eq!(dec.mu[i], t.one());
            } else {
                assert!(dec.mu[i].is_zero());
            }
        }
    }

    #[test]
    fn decompose_zero_is_zero() {
        let t = t();
        let d = TorusDerivation {
            images: vec![TorusElement::zero(); 6],
        };
        let dec = t.decompose_derivation(&d).unwrap();
        assert!(dec.x.is_zero());
        assert!(dec.mu.iter().all(|m| m.is_zero()));
    }

    #[test]
    fn apply_derivation_leibniz() {
        let t = t();
        let ad = t.ad(&t.generator(2));
        let a = mono(&t, [1, 0, 0, -2, 0, 1]).scale(&QElem::qhat());
        let b = mono(&t, [0, 1, 1, 0, 0, 0]);
        let lhs = t.apply_derivation(&ad, &t.mul(&a, &b));
        let rhs = t
            .mul(&t.apply_derivation(&ad, &a), &b)
            .add(&t.mul(&a, &t.apply_derivation(&ad, &b)));
        assert_eq!(lhs, rhs);
    }
}
