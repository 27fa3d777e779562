//! Generic normal-ordering engine for iterated Ore extensions.
//!
//! A presentation lists, for each generator pair `i < j`, the relation
//! `X_j X_i = lambda_{ji} X_i X_j + correction_{ji}` with the correction
//! already in normal order. Designated tail generators are invertible;
//! the relations for their inverses are derived mechanically from the
//! pair relation. Words rewrite to the unique PBW expansion.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::field::QElem;
use crate::torus::{fmt_terms, Exponent};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OreError {
    #[error("elements belong to different presentations ({0} vs {1})")]
    PresentationMismatch(String, String),
    #[error("negative exponent on non-invertible generator {0}")]
    NonInvertibleGenerator(usize),
    #[error("generator index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("invalid presentation: {0}")]
    BadPresentation(String),
    #[error("rewriting exceeded the step limit; presentation may not terminate")]
    RewriteLimitExceeded,
    #[error("inverse relation derivation did not terminate")]
    DepthExceeded,
    #[error("relation between inverses of {0} and {1} needs a zero correction")]
    UnsupportedInverseRelation(usize, usize),
}

/// One pair relation `X_j X_i = lambda * X_i X_j + correction`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OreRelation {
    pub lambda: QElem,
    pub correction: BTreeMap<Exponent, QElem>,
}

type Key = (usize, i8, usize, i8);
type Terms = Vec<(QElem, Exponent)>;

/// An iterated-Ore-extension presentation on `n` generators.
#[derive(Debug)]
pub struct OrePresentation {
    name: String,
    symbol: String,
    n: usize,
    invertible: BTreeSet<usize>,
    relations: BTreeMap<(usize, usize), OreRelation>,
    swap_cache: RwLock<BTreeMap<Key, Terms>>,
}

const REWRITE_STEP_LIMIT: usize = 4_000_000;
const SWAP_DEPTH_LIMIT: usize = 64;

impl OrePresentation {
    /// `pairs` maps `(i, j)` with `i < j` to the relation for `X_j X_i`.
    /// Missing pairs default to plain commutation (`lambda = 1`).
    pub fn new(
        name: &str,
        symbol: &str,
        n: usize,
        invertible: impl IntoIterator<Item = usize>,
        pairs: Vec<(usize, usize, OreRelation)>,
    ) -> Result<Arc<Self>, OreError> {
        let invertible: BTreeSet<usize> = invertible.into_iter().collect();
        for &i in &invertible {
            if i < 1 || i > n {
                return Err(OreError::IndexOutOfRange(i, n));
            }
        }
        let mut relations = BTreeMap::new();
        for (i, j, rel) in pairs {
            if i >= j || j > n || i < 1 {
                return Err(OreError::BadPresentation(format!(
                    "pair ({i}, {j}) is not an ordered generator pair"
                )));
            }
            if rel.lambda.is_zero() {
                return Err(OreError::BadPresentation(format!(
                    "zero commutation scalar for pair ({i}, {j})"
                )));
            }
            for (exp, c) in rel.correction.iter() {
                if exp.len() != n {
                    return Err(OreError::BadPresentation(format!(
                        "correction exponent of wrong length for pair ({i}, {j})"
                    )));
                }
                if c.is_zero() {
                    return Err(OreError::BadPresentation(format!(
                        "zero correction coefficient stored for pair ({i}, {j})"
                    )));
                }
                for (k, e) in exp.iter().enumerate() {
                    if *e < 0 && !invertible.contains(&(k + 1)) {
                        return Err(OreError::NonInvertibleGenerator(k + 1));
                    }
                }
                // termination measure: degree below the pair, or equal with
                // zero inversions (normal-ordered corrections always qualify)
                let degree: i64 = exp.iter().map(|e| e.abs()).sum();
                if degree > 2 {
                    return Err(OreError::BadPresentation(format!(
                        "correction for pair ({i}, {j}) violates the termination measure"
                    )));
                }
            }
            relations.insert((i, j), rel);
        }
        Ok(Arc::new(OrePresentation {
            name: name.to_string(),
            symbol: symbol.to_string(),
            n,
            invertible,
            relations,
            swap_cache: RwLock::new(BTreeMap::new()),
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.invertible.contains(&i)
    }

    pub fn invertible_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.invertible.iter().copied()
    }

    pub fn relation(&self, i: usize, j: usize) -> OreRelation {
        assert!(i < j);
        self.relations.get(&(i, j)).cloned().unwrap_or(OreRelation {
            lambda: QElem::one(),
            correction: BTreeMap::new(),
        })
    }

    /// Normal form of `X_j^{sj} X_i^{si}` (`i < j`, signs in {-1, +1}).
    fn swap(&self, j: usize, sj: i8, i: usize, si: i8, depth: usize) -> Result<Terms, OreError> {
        let key = (j, sj, i, si);
        if let Some(hit) = self.swap_cache.read().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        if depth > SWAP_DEPTH_LIMIT {
            return Err(OreError::DepthExceeded);
        }
        let rel = self.relation(i, j);
        let unit_exp = |idx: usize, e: i64| {
            let mut v = vec![0i64; self.n];
            v[idx - 1] = e;
            v
        };
        let result: Terms = match (sj, si) {
            (1, 1) => {
                // X_j X_i = lambda X_i X_j + c
                let mut out = vec![(rel.lambda.clone(), {
                    let mut v = vec![0i64; self.n];
                    v[i - 1] = 1;
                    v[j - 1] = 1;
                    v
                })];
                for (exp, c) in rel.correction.iter() {
                    out.push((c.clone(), exp.clone()));
                }
                out
            }
            (1, -1) => {
                if !self.is_invertible(i) {
                    return Err(OreError::NonInvertibleGenerator(i));
                }
                // X_j X_i^{-1} = l^{-1} X_i^{-1} X_j - l^{-1} X_i^{-1} c X_i^{-1}
                let linv = rel.lambda.inv().expect("lambda nonzero");
                let mut out = vec![(linv.clone(), {
                    let mut v = vec![0i64; self.n];
                    v[i - 1] = -1;
                    v[j - 1] = 1;
                    v
                })];
                let inv_i = unit_exp(i, -1);
                for (exp, c) in rel.correction.iter() {
                    let prod = self.sandwich(&inv_i, exp, depth + 1)?;
                    for (cc, ee) in prod {
                        out.push((linv.neg().mul(c).mul(&cc), ee));
                    }
                }
                out
            }
            (-1, 1) => {
                if !self.is_invertible(j) {
                    return Err(OreError::NonInvertibleGenerator(j));
                }
                // X_j^{-1} X_i = l^{-1} X_i X_j^{-1} - l^{-1} X_j^{-1} c X_j^{-1}
                let linv = rel.lambda.inv().expect("lambda nonzero");
                let mut out = vec![(linv.clone(), {
                    let mut v = vec![0i64; self.n];
                    v[i - 1] = 1;
                    v[j - 1] = -1;
                    v
                })];
                let inv_j = unit_exp(j, -1);
                for (exp, c) in rel.correction.iter() {
                    let prod = self.sandwich(&inv_j, exp, depth + 1)?;
                    for (cc, ee) in prod {
                        out.push((linv.neg().mul(c).mul(&cc), ee));
                    }
                }
                out
            }
            (-1, -1) => {
                if !self.is_invertible(i) {
                    return Err(OreError::NonInvertibleGenerator(i));
                }
                if !self.is_invertible(j) {
                    return Err(OreError::NonInvertibleGenerator(j));
                }
                if !rel.correction.is_empty() {
                    return Err(OreError::UnsupportedInverseRelation(i, j));
                }
                // from X_j X_i = l X_i X_j: X_j^{-1} X_i^{-1} = l X_i^{-1} X_j^{-1}
                vec![(rel.lambda.clone(), {
                    let mut v = vec![0i64; self.n];
                    v[i - 1] = -1;
                    v[j - 1] = -1;
                    v
                })]
            }
            _ => unreachable!("signs are unit"),
        };
        self.swap_cache.write().unwrap().insert(key, result.clone());
        Ok(result)
    }

    /// Normal form of `X^a * X^mid * X^a` for a unit inverse exponent `a`.
    fn sandwich(&self, a: &Exponent, mid: &Exponent, depth: usize) -> Result<Terms, OreError> {
        let mut word: Vec<(usize, i64)> = Vec::new();
        let push_exp = |word: &mut Vec<(usize, i64)>, e: &Exponent| {
            for (k, v) in e.iter().enumerate() {
                if *v != 0 {
                    word.push((k + 1, *v));
                }
            }
        };
        push_exp(&mut word, a);
        push_exp(&mut word, mid);
        push_exp(&mut word, a);
        self.normal_form_terms(&word, depth)
    }

    /// Core rewriting loop over coefficient-carrying run-length words.
    fn normal_form_terms(&self, word: &[(usize, i64)], depth: usize) -> Result<Terms, OreError> {
        for &(i, _) in word {
            if i < 1 || i > self.n {
                return Err(OreError::IndexOutOfRange(i, self.n));
            }
        }
        let mut result: BTreeMap<Exponent, QElem> = BTreeMap::new();
        let mut stack: Vec<(QElem, Vec<(usize, i64)>)> =
            vec![(QElem::one(), word.iter().copied().filter(|&(_, e)| e != 0).collect())];
        let mut steps = 0usize;
        while let Some((coeff, mut w)) = stack.pop() {
            steps += 1;
            if steps > REWRITE_STEP_LIMIT {
                return Err(OreError::RewriteLimitExceeded);
            }
            // merge adjacent equal-index runs
            let mut merged = true;
            while merged {
                merged = false;
                let mut k = 0;
                while k + 1 < w.len() {
                    if w[k].0 == w[k + 1].0 {
                        w[k].1 += w[k + 1].1;
                        w.remove(k + 1);
                        if w[k].1 == 0 {
                            w.remove(k);
                        }
                        merged = true;
                    } else {
                        k += 1;
                    }
                }
            }
            // find the first descent
            let descent = (0..w.len().saturating_sub(1)).find(|&k| w[k].0 > w[k + 1].0);
            match descent {
                None => {
                    // normal word: collect into an exponent vector
                    let mut exp = vec![0i64; self.n];
                    for &(i, e) in &w {
                        exp[i - 1] += e;
                    }
                    for (k, e) in exp.iter().enumerate() {
                        if *e < 0 && !self.is_invertible(k + 1) {
                            return Err(OreError::NonInvertibleGenerator(k + 1));
                        }
                    }
                    let entry = result.entry(exp.clone()).or_insert_with(QElem::zero);
                    *entry = entry.add(&coeff);
                    if entry.is_zero() {
                        result.remove(&exp);
                    }
                }
                Some(k) => {
                    let (j, ej) = w[k];
                    let (i, ei) = w[k + 1];
                    let sj = ej.signum() as i8;
                    let si = ei.signum() as i8;
                    let swapped = self.swap(j, sj, i, si, depth)?;
                    for (sc, se) in swapped {
                        let mut neww: Vec<(usize, i64)> = Vec::with_capacity(w.len() + 4);
                        neww.extend_from_slice(&w[..k]);
                        if ej - sj as i64 != 0 {
                            neww.push((j, ej - sj as i64));
                        }
                        for (g, v) in se.iter().enumerate() {
                            if *v != 0 {
                                neww.push((g + 1, *v));
                            }
                        }
                        if ei - si as i64 != 0 {
                            neww.push((i, ei - si as i64));
                        }
                        neww.extend_from_slice(&w[k + 2..]);
                        stack.push((coeff.mul(&sc), neww));
                    }
                }
            }
        }
        Ok(result.into_iter().map(|(e, c)| (c, e)).collect())
    }
}

impl PartialEq for OrePresentation {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.n == other.n
            && self.invertible == other.invertible
            && self.relations == other.relations
    }
}

/// An element in the PBW basis of its presentation.
#[derive(Debug, Clone)]
pub struct PBWElement {
    terms: BTreeMap<Exponent, QElem>,
    pres: Arc<OrePresentation>,
}

impl PartialEq for PBWElement {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.pres.name() == other.pres.name()
    }
}

impl Eq for PBWElement {}

impl PBWElement {
    pub fn zero(pres: &Arc<OrePresentation>) -> Self {
        PBWElement {
            terms: BTreeMap::new(),
            pres: Arc::clone(pres),
        }
    }

    pub fn one(pres: &Arc<OrePresentation>) -> Self {
        Self::monomial(pres, vec![0; pres.size()], QElem::one())
            .expect("unit exponent is valid")
    }

    pub fn generator(pres: &Arc<OrePresentation>, i: usize) -> Result<Self, OreError> {
        if i < 1 || i > pres.size() {
            return Err(OreError::IndexOutOfRange(i, pres.size()));
        }
        let mut exp = vec![0i64; pres.size()];
        exp[i - 1] = 1;
        Self::monomial(pres, exp, QElem::one())
    }

    pub fn monomial(
        pres: &Arc<OrePresentation>,
        exp: Exponent,
        coeff: QElem,
    ) -> Result<Self, OreError> {
        if exp.len() != pres.size() {
            return Err(OreError::IndexOutOfRange(exp.len(), pres.size()));
        }
        for (k, e) in exp.iter().enumerate() {
            if *e < 0 && !pres.is_invertible(k + 1) {
                return Err(OreError::NonInvertibleGenerator(k + 1));
            }
        }
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Ok(PBWElement {
            terms,
            pres: Arc::clone(pres),
        })
    }

    pub fn from_terms(
        pres: &Arc<OrePresentation>,
        terms: impl IntoIterator<Item = (Exponent, QElem)>,
    ) -> Result<Self, OreError> {
        let mut out = Self::zero(pres);
        for (e, c) in terms {
            let m = Self::monomial(pres, e, c)?;
            out = out.add(&m)?;
        }
        Ok(out)
    }

    /// Expand a word of signed generator powers into the PBW basis.
    pub fn normal_form(
        pres: &Arc<OrePresentation>,
        word: &[(usize, i64)],
    ) -> Result<Self, OreError> {
        for &(i, e) in word {
            if e < 0 && !pres.is_invertible(i) {
                return Err(OreError::NonInvertibleGenerator(i));
            }
        }
        let terms = pres.normal_form_terms(word, 0)?;
        let mut out = Self::zero(pres);
        for (c, e) in terms {
            out.add_term(e, c);
        }
        Ok(out)
    }

    pub fn presentation(&self) -> &Arc<OrePresentation> {
        &self.pres
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

    fn add_term(&mut self, exp: Exponent, coeff: QElem) {
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

    fn check_same(&self, other: &Self) -> Result<(), OreError> {
        if self.pres.name() != other.pres.name() {
            return Err(OreError::PresentationMismatch(
                self.pres.name().to_string(),
                other.pres.name().to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, OreError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, OreError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PBWElement {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
            pres: Arc::clone(&self.pres),
        }
    }

    pub fn scale(&self, c: &QElem) -> Self {
        if c.is_zero() {
            return Self::zero(&self.pres);
        }
        PBWElement {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.mul(c))).collect(),
            pres: Arc::clone(&self.pres),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, OreError> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.pres);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let mut word: Vec<(usize, i64)> = Vec::new();
                for (k, v) in ea.iter().enumerate() {
                    if *v != 0 {
                        word.push((k + 1, *v));
                    }
                }
                for (k, v) in eb.iter().enumerate() {
                    if *v != 0 {
                        word.push((k + 1, *v));
                    }
                }
                let nf = self.pres.normal_form_terms(&word, 0)?;
                let scale = ca.mul(cb);
                for (c, e) in nf {
                    out.add_term(e, c.mul(&scale));
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, OreError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn pow(&self, k: u32) -> Result<Self, OreError> {
        let mut acc = Self::one(&self.pres);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `Some(m)` when `self * other = q^m * other * self` exactly.
    /// Zero inputs are rejected (returns `None`).
    pub fn qcommute_exponent(&self, other: &Self) -> Option<i64> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        let ab = self.mul(other).ok()?;
        let ba = other.mul(self).ok()?;
        let (exp, cab) = ab.terms().next().map(|(e, c)| (e.clone(), c.clone()))?;
        let cba = ba.coeff(&exp);
        if cba.is_zero() {
            return None;
        }
        let m = cab.div(&cba).ok()?.as_q_power()?;
        if ab == ba.scale(&QElem::q_power(m)) {
            Some(m)
        } else {
            None
        }
    }
}

impl fmt::Display for PBWElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(
            f,
            self.pres.symbol(),
            self.terms.iter().map(|(e, c)| (e.as_slice(), c)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The rank-2 analogue with an invertible tail:
    /// X2X1 = q^{-1} X1X2, X3X1 = q X1X3 - q X2, X3X2 = q^{-1} X2X3.
    fn toy() -> Arc<OrePresentation> {
        OrePresentation::new(
            "toy",
            "X",
            3,
            [3],
            vec![
                (
                    1,
                    2,
                    OreRelation {
                        lambda: QElem::q_power(-1),
                        correction: BTreeMap::new(),
                    },
                ),
                (
                    1,
                    3,
                    OreRelation {
                        lambda: QElem::q(),
                        correction: BTreeMap::from([(
                            vec![0, 1, 0],
                            QElem::q().neg(),
                        )]),
                    },
                ),
                (
                    2,
                    3,
                    OreRelation {
                        lambda: QElem::q_power(-1),
                        correction: BTreeMap::new(),
                    },
                ),
            ],
        )
        .unwrap()
    }

    #[test]
    fn already_normal_is_fixed() {
        let p = toy();
        let w = PBWElement::normal_form(&p, &[(1, 2)]).unwrap();
        assert_eq!(w, PBWElement::monomial(&p, vec![2, 0, 0], QElem::one()).unwrap());
    }

    #[test]
    fn single_swap_with_correction() {
        let p = toy();
        // X3 X1 -> q X1X3 - q X2
        let w = PBWElement::normal_form(&p, &[(3, 1), (1, 1)]).unwrap();
        let expected = PBWElement::from_terms(
            &p,
            [
                (vec![1, 0, 1], QElem::q()),
                (vec![0, 1, 0], QElem::q().neg()),
            ],
        )
        .unwrap();
        assert_eq!(w, expected);
    }

    #[test]
    fn inverse_relation_is_consistent() {
        let p = toy();
        // X3^{-1} X1 X3 X3^{-1} = X3^{-1} X1
        let a = PBWElement::normal_form(&p, &[(3, -1), (1, 1)]).unwrap();
        let x3 = PBWElement::generator(&p, 3).unwrap();
        let x3inv = PBWElement::monomial(&p, vec![0, 0, -1], QElem::one()).unwrap();
        let b = a.mul(&x3).unwrap().mul(&x3inv).unwrap();
        assert_eq!(a, b);
        // and X3 * (X3^{-1} X1) = X1
        let x1 = PBWElement::generator(&p, 1).unwrap();
        assert_eq!(x3.mul(&a).unwrap(), x1);
    }

    #[test]
    fn associativity_on_triples() {
        let p = toy();
        let a = PBWElement::normal_form(&p, &[(3, 1), (2, 1)]).unwrap();
        let b = PBWElement::normal_form(&p, &[(3, -1), (1, 2)]).unwrap();
        let c = PBWElement::normal_form(&p, &[(2, 1), (1, 1)]).unwrap();
        let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
        let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn triple_overlap_confluence() {
        let p = toy();
        for (i, j, k) in [(1usize, 2usize, 3usize)] {
            let jk = PBWElement::normal_form(&p, &[(k, 1), (j, 1)]).unwrap();
            let ji = PBWElement::normal_form(&p, &[(j, 1), (i, 1)]).unwrap();
            let xi = PBWElement::generator(&p, i).unwrap();
            let xk = PBWElement::generator(&p, k).unwrap();
            assert_eq!(jk.mul(&xi).unwrap(), xk.mul(&ji).unwrap());
        }
    }

    #[test]
    fn rejects_negative_exponent_on_non_tail() {
        let p = toy();
        assert!(matches!(
            PBWElement::normal_form(&p, &[(1, -1)]),
            Err(OreError::NonInvertibleGenerator(1))
        ));
    }

    #[test]
    fn qcommute_detects_and_rejects() {
        let p = toy();
        let x1 = PBWElement::generator(&p, 1).unwrap();
        let x2 = PBWElement::generator(&p, 2).unwrap();
        assert_eq!(x2.qcommute_exponent(&x1), Some(-1));
        assert_eq!(x1.qcommute_exponent(&x2), Some(1));
        let x3 = PBWElement::generator(&p, 3).unwrap();
        assert_eq!(x3.qcommute_exponent(&x1), None);
        assert_eq!(PBWElement::zero(&p).qcommute_exponent(&x1), None);
        // [a, a] = 0
        assert!(x3.commutator(&x3).unwrap().is_zero());
    }

    #[test]
    fn presentation_mismatch_is_an_error() {
        let p = toy();
        let q = OrePresentation::new("other", "Y", 3, [], vec![]).unwrap();
        let a = PBWElement::generator(&p, 1).unwrap();
        let b = PBWElement::generator(&q, 1).unwrap();
        assert!(matches!(a.mul(&b), Err(OreError::PresentationMismatch(_, _))));
    }

    #[test]
    fn termination_measure_rejects_large_corrections() {
        let r = OrePresentation::new(
            "bad",
            "X",
            3,
            [],
            vec![(
                1,
                2,
                OreRelation {
                    lambda: QElem::one(),
                    correction: BTreeMap::from([(vec![3, 0, 0], QElem::one())]),
                },
            )],
        );
        assert!(matches!(r, Err(OreError::BadPresentation(_))));
    }
}
