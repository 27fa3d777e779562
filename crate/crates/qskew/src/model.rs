//! The concrete `U_q(sl4+)` instantiation: Serre generators, the
//! distinguished normal elements `Delta_1..Delta_3`, weight and degree
//! gradings, diagram/torus automorphisms, the step-by-step change of
//! variables X -> Y -> Z -> T down to the quantum torus, and membership
//! tests for the localization tower.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::field::QElem;
use crate::ore::{OreError, OrePresentation, OreRelation, PBWElement};
use crate::torus::{Exponent, QuantumTorus, TorusElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("operation undefined on the zero element")]
    ZeroElement,
    #[error("elements live at different levels")]
    LevelMismatch,
    #[error("element degree {degree} exceeds the solve bound {bound}")]
    DegreeOverflow { degree: i64, bound: i64 },
    #[error(transparent)]
    Ore(#[from] OreError),
}

/// Basis level along the tower: `X` is `A_7 = U_q(sl4+)` down to `T`,
/// the basis of `A_4` inside the quantum torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    T,
    Z,
    Y,
    X,
}

impl Level {
    pub fn number(self) -> u8 {
        match self {
            Level::X => 7,
            Level::Y => 6,
            Level::Z => 5,
            Level::T => 4,
        }
    }

    pub fn from_number(r: u8) -> Option<Level> {
        match r {
            7 => Some(Level::X),
            6 => Some(Level::Y),
            5 => Some(Level::Z),
            4 => Some(Level::T),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Level::X => "X",
            Level::Y => "Y",
            Level::Z => "Z",
            Level::T => "T",
        }
    }

    pub const ALL: [Level; 4] = [Level::X, Level::Y, Level::Z, Level::T];
}

/// An element of `A_r`, tagged with its basis level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    pub level: Level,
    pub pbw: PBWElement,
}

impl AlgebraElement {
    pub fn is_zero(&self) -> bool {
        self.pbw.is_zero()
    }

    fn check_level(&self, other: &Self) -> Result<(), ModelError> {
        if self.level != other.level {
            return Err(ModelError::LevelMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ModelError> {
        self.check_level(other)?;
        Ok(AlgebraElement {
            level: self.level,
            pbw: self.pbw.add(&other.pbw)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ModelError> {
        self.check_level(other)?;
        Ok(AlgebraElement {
            level: self.level,
            pbw: self.pbw.sub(&other.pbw)?,
        })
    }

    pub fn neg(&self) -> Self {
        AlgebraElement {
            level: self.level,
            pbw: self.pbw.neg(),
        }
    }

    pub fn scale(&self, c: &QElem) -> Self {
        AlgebraElement {
            level: self.level,
            pbw: self.pbw.scale(c),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ModelError> {
        self.check_level(other)?;
        Ok(AlgebraElement {
            level: self.level,
            pbw: self.pbw.mul(&other.pbw)?,
        })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, ModelError> {
        self.check_level(other)?;
        Ok(AlgebraElement {
            level: self.level,
            pbw: self.pbw.commutator(&other.pbw)?,
        })
    }

    pub fn pow(&self, k: u32) -> Result<Self, ModelError> {
        Ok(AlgebraElement {
            level: self.level,
            pbw: self.pbw.pow(k)?,
        })
    }
}

impl std::fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.pbw)
    }
}

/// `eta^epsilon . phi_lambda`: the diagram flip composed with the
/// diagonal torus action `e_i -> lambda_i e_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub lambda: [QElem; 3],
    pub eta: bool,
}

impl Automorphism {
    pub fn identity() -> Self {
        Automorphism {
            lambda: [QElem::one(), QElem::one(), QElem::one()],
            eta: false,
        }
    }

    pub fn diagonal(lambda: [QElem; 3]) -> Self {
        Automorphism { lambda, eta: false }
    }

    pub fn eta() -> Self {
        Automorphism {
            lambda: [QElem::one(), QElem::one(), QElem::one()],
            eta: true,
        }
    }
}

/// Polynomial in the normal elements: `(a, b, c) -> coeff` for
/// `Delta_1^a Delta_2^b Delta_3^c`.
pub type DeltaPoly = BTreeMap<(u32, u32, u32), QElem>;

/// Laurent polynomial in the central generators: `(a, b) -> coeff` for
/// `z_1^a z_2^b`.
pub type ZPoly = BTreeMap<(i64, i64), QElem>;

/// Weights of `X_1..X_6` in the `(alpha_1, alpha_2, alpha_3)` basis.
pub const GENERATOR_WEIGHTS: [[i64; 3]; 6] = [
    [1, 0, 0],
    [1, 1, 0],
    [1, 1, 1],
    [0, 1, 0],
    [0, 1, 1],
    [0, 0, 1],
];

pub const DEFAULT_SOLVE_BOUND: i64 = 12;

/// One change-of-variables step: `upper_i = lower_i + coeff * word`,
/// where the word letters keep their indices across the step.
struct SubstStep {
    entries: Vec<(usize, QElem, Vec<(usize, i64)>)>,
}

fn q_qhat_inv() -> QElem {
    QElem::q().mul(&QElem::qhat().inv().expect("qhat is nonzero"))
}

fn subst_steps() -> [SubstStep; 3] {
    [
        // X in terms of Y
        SubstStep {
            entries: vec![
                (2, q_qhat_inv(), vec![(3, 1), (6, -1)]),
                (4, q_qhat_inv(), vec![(5, 1), (6, -1)]),
            ],
        },
        // Y in terms of Z
        SubstStep {
            entries: vec![
                (1, q_qhat_inv(), vec![(3, 1), (5, -1)]),
                (2, QElem::q(), vec![(3, 1), (4, 1), (5, -1)]),
            ],
        },
        // Z in terms of T
        SubstStep {
            entries: vec![(1, q_qhat_inv(), vec![(2, 1), (4, -1)])],
        },
    ]
}

fn step_index(level: Level) -> Option<usize> {
    match level {
        Level::X => Some(0),
        Level::Y => Some(1),
        Level::Z => Some(2),
        Level::T => None,
    }
}

/// The commutation scalars `lambda_{ji}` shared by all four presentations,
/// as powers of `q` (entry `[j-1][i-1]` for `j > i`); these are the
/// tau-automorphism scalars of the iterated Ore extension.
const LAMBDA_EXPONENTS: [[i64; 6]; 6] = [
    [0, 0, 0, 0, 0, 0],
    [-1, 0, 0, 0, 0, 0],
    [-1, -1, 0, 0, 0, 0],
    [1, -1, 0, 0, 0, 0],
    [1, 0, -1, -1, 0, 0],
    [0, 1, -1, 1, -1, 0],
];

fn corr(exp: [i64; 6], coeff: QElem) -> BTreeMap<Exponent, QElem> {
    BTreeMap::from([(exp.to_vec(), coeff)])
}

fn build_presentation(
    name: &str,
    symbol: &str,
    invertible: &[usize],
    corrections: &[((usize, usize), BTreeMap<Exponent, QElem>)],
) -> Arc<OrePresentation> {
    let mut pairs = Vec::new();
    for i in 1..=6usize {
        for j in (i + 1)..=6usize {
            let correction = corrections
                .iter()
                .find(|((a, b), _)| *a == i && *b == j)
                .map(|(_, c)| c.clone())
                .unwrap_or_default();
            pairs.push((
                i,
                j,
                OreRelation {
                    lambda: QElem::q_power(LAMBDA_EXPONENTS[j - 1][i - 1]),
                    correction,
                },
            ));
        }
    }
    OrePresentation::new(name, symbol, 6, invertible.iter().copied(), pairs)
        .expect("shipped presentation tables are valid")
}

/// The shared model: presentations, torus, cached generator images.
pub struct UqModel {
    presentations: [Arc<OrePresentation>; 4], // indexed by Level as usize
    torus: QuantumTorus,
    gen_torus: [[TorusElement; 6]; 4],
    eta_images: [PBWElement; 6],
}

fn level_slot(level: Level) -> usize {
    match level {
        Level::X => 0,
        Level::Y => 1,
        Level::Z => 2,
        Level::T => 3,
    }
}

static MODEL: OnceLock<Arc<UqModel>> = OnceLock::new();

impl UqModel {
    /// The process-wide shared instance.
    pub fn shared() -> &'static Arc<UqModel> {
        MODEL.get_or_init(|| Arc::new(UqModel::build()))
    }

    fn build() -> UqModel {
        let mq = QElem::q().neg();
        let mqhat = QElem::qhat().neg();
        let px = build_presentation(
            "uqsl4-X",
            "X",
            &[],
            &[
                ((1, 4), corr([0, 1, 0, 0, 0, 0], mq.clone())),
                ((1, 5), corr([0, 0, 1, 0, 0, 0], mq.clone())),
                ((2, 5), corr([0, 0, 1, 1, 0, 0], mqhat.clone())),
                ((2, 6), corr([0, 0, 1, 0, 0, 0], mq.clone())),
                ((4, 6), corr([0, 0, 0, 0, 1, 0], mq.clone())),
            ],
        );
        let py = build_presentation(
            "uqsl4-Y",
            "Y",
            &[6],
            &[
                ((1, 4), corr([0, 1, 0, 0, 0, 0], mq.clone())),
                ((1, 5), corr([0, 0, 1, 0, 0, 0], mq.clone())),
                ((2, 5), corr([0, 0, 1, 1, 0, 0], mqhat)),
            ],
        );
        let pz = build_presentation(
            "uqsl4-Z",
            "Z",
            &[4, 5, 6],
            &[((1, 4), corr([0, 1, 0, 0, 0, 0], mq))],
        );
        let pt = build_presentation("uqsl4-T", "T", &[4, 5, 6], &[]);

        let torus = QuantumTorus::uqsl4();

        // torus images of the level generators, bottom-up
        let steps = subst_steps();
        let mut gen_torus: [[TorusElement; 6]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| TorusElement::zero()));
        for i in 1..=6 {
            gen_torus[level_slot(Level::T)][i - 1] = torus.generator(i);
        }
        for level in [Level::Z, Level::Y, Level::X] {
            let step = &steps[step_index(level).unwrap()];
            let lower = level_slot(Level::from_number(level.number() - 1).unwrap());
            for i in 1..=6usize {
                let mut img = gen_torus[lower][i - 1].clone();
                if let Some((_, coeff, word)) =
                    step.entries.iter().find(|(j, _, _)| *j == i)
                {
                    let mut prod = torus.one();
                    for &(k, e) in word {
                        let g = &gen_torus[lower][k - 1];
                        let factor = if e >= 0 {
                            g.clone()
                        } else {
                            torus
                                .monomial_inverse(g)
                                .expect("inverted tail generators embed as monomials")
                        };
                        for _ in 0..e.abs() {
                            prod = torus.mul(&prod, &factor);
                        }
                    }
                    img = img.add(&prod.scale(coeff));
                }
                gen_torus[level_slot(level)][i - 1] = img;
            }
        }

        // eta images of X_1..X_6, derived from the defining words
        let gen = |i: usize| PBWElement::generator(&px, i).expect("index in range");
        let two_letter = |a: usize, b: usize| {
            // e_a' e_b' - q^{-1} e_b' e_a' for given X-generators
            PBWElement::normal_form(&px, &[(a, 1), (b, 1)])
                .expect("valid word")
                .sub(
                    &PBWElement::normal_form(&px, &[(b, 1), (a, 1)])
                        .expect("valid word")
                        .scale(&QElem::q_power(-1)),
                )
                .expect("same presentation")
        };
        let eta_x1 = gen(6);
        let eta_x4 = gen(4);
        let eta_x6 = gen(1);
        // eta(X2) = eta(e1)eta(e2) - q^{-1} eta(e2)eta(e1) = X6X4 - q^{-1}X4X6
        let eta_x2 = two_letter(6, 4);
        // eta(X5) = eta(e2)eta(e3) - q^{-1} eta(e3)eta(e2) = X4X1 - q^{-1}X1X4
        let eta_x5 = two_letter(4, 1);
        // eta(X3) = eta(e1)eta(X5) - q^{-1} eta(X5)eta(e1)
        let eta_x3 = eta_x1
            .mul(&eta_x5)
            .and_then(|ab| {
                ab.sub(&eta_x5.mul(&eta_x1)?.scale(&QElem::q_power(-1)))
            })
            .expect("same presentation");
        let eta_images = [eta_x1, eta_x2, eta_x3, eta_x4, eta_x5, eta_x6];

        UqModel {
            presentations: [px, py, pz, pt],
            torus,
            gen_torus,
            eta_images,
        }
    }

    pub fn presentation(&self, level: Level) -> &Arc<OrePresentation> {
        &self.presentations[level_slot(level)]
    }

    pub fn torus(&self) -> &QuantumTorus {
        &self.torus
    }

    pub fn zero(&self, level: Level) -> AlgebraElement {
        AlgebraElement {
            level,
            pbw: PBWElement::zero(self.presentation(level)),
        }
    }

    pub fn one(&self, level: Level) -> AlgebraElement {
        AlgebraElement {
            level,
            pbw: PBWElement::one(self.presentation(level)),
        }
    }

    pub fn generator(&self, level: Level, i: usize) -> Result<AlgebraElement, ModelError> {
        Ok(AlgebraElement {
            level,
            pbw: PBWElement::generator(self.presentation(level), i)?,
        })
    }

    /// The Chevalley generator `e_i` as a level-7 element.
    pub fn serre_generator(&self, i: usize) -> Result<AlgebraElement, ModelError> {
        let x = match i {
            1 => 1,
            2 => 4,
            3 => 6,
            _ => return Err(ModelError::IndexOutOfRange(i)),
        };
        self.generator(Level::X, x)
    }

    /// `Delta_i` in the X basis.
    pub fn delta(&self, i: usize) -> Result<AlgebraElement, ModelError> {
        self.delta_in_basis(i, Level::X)
    }

    /// `Delta_i` expanded in any of the four bases.
    pub fn delta_in_basis(&self, i: usize, level: Level) -> Result<AlgebraElement, ModelError> {
        let p = self.presentation(level);
        let qhat2 = QElem::qhat().mul(&QElem::qhat());
        let mqqh = QElem::q().mul(&QElem::qhat()).neg();
        let terms: Vec<([i64; 6], QElem)> = match (i, level) {
            (1, _) => vec![([0, 0, 1, 0, 0, 0], QElem::one())],
            (2, Level::X) | (2, Level::Y) => vec![
                ([0, 1, 0, 0, 1, 0], QElem::one()),
                ([0, 0, 1, 1, 0, 0], QElem::q().neg()),
            ],
            (2, Level::Z) | (2, Level::T) => vec![([0, 1, 0, 0, 1, 0], QElem::one())],
            (3, Level::X) => vec![
                ([1, 0, 0, 1, 0, 1], qhat2),
                ([0, 1, 0, 0, 0, 1], mqqh.clone()),
                ([1, 0, 0, 0, 1, 0], mqqh),
                ([0, 0, 1, 0, 0, 0], QElem::q_power(2)),
            ],
            (3, Level::Y) | (3, Level::Z) => vec![
                ([1, 0, 0, 1, 0, 1], qhat2),
                ([0, 1, 0, 0, 0, 1], mqqh),
            ],
            (3, Level::T) => vec![([1, 0, 0, 1, 0, 1], qhat2)],
            _ => return Err(ModelError::IndexOutOfRange(i)),
        };
        Ok(AlgebraElement {
            level,
            pbw: PBWElement::from_terms(p, terms.into_iter().map(|(e, c)| (e.to_vec(), c)))?,
        })
    }

    /// `z_1 = Delta_1 Delta_3` in the X basis.
    pub fn z1(&self) -> AlgebraElement {
        let d1 = self.delta(1).expect("index in range");
        let d3 = self.delta(3).expect("index in range");
        d1.mul(&d3).expect("same level")
    }

    /// `z_2 = Delta_2` in the X basis.
    pub fn z2(&self) -> AlgebraElement {
        self.delta(2).expect("index in range")
    }

    pub fn weight_of_exponent(exp: &[i64]) -> [i64; 3] {
        let mut w = [0i64; 3];
        for (k, e) in exp.iter().enumerate() {
            for a in 0..3 {
                w[a] += GENERATOR_WEIGHTS[k][a] * e;
            }
        }
        w
    }

    /// The common weight of a weight-homogeneous element.
    pub fn weight(&self, u: &AlgebraElement) -> Result<Option<[i64; 3]>, ModelError> {
        if u.is_zero() {
            return Err(ModelError::ZeroElement);
        }
        let mut it = u.pbw.terms();
        let first = Self::weight_of_exponent(it.next().unwrap().0);
        for (e, _) in it {
            if Self::weight_of_exponent(e) != first {
                return Ok(None);
            }
        }
        Ok(Some(first))
    }

    pub fn total_degree(&self, u: &AlgebraElement) -> Result<i64, ModelError> {
        if u.is_zero() {
            return Err(ModelError::ZeroElement);
        }
        Ok(u.pbw
            .terms()
            .map(|(e, _)| Self::weight_of_exponent(e).iter().sum())
            .max()
            .unwrap())
    }

    /// The top homogeneous component for the total-degree grading.
    pub fn top_component(&self, u: &AlgebraElement) -> Result<AlgebraElement, ModelError> {
        let d = self.total_degree(u)?;
        let p = self.presentation(u.level);
        let terms = u
            .pbw
            .terms()
            .filter(|(e, _)| Self::weight_of_exponent(e).iter().sum::<i64>() == d)
            .map(|(e, c)| (e.clone(), c.clone()));
        Ok(AlgebraElement {
            level: u.level,
            pbw: PBWElement::from_terms(p, terms)?,
        })
    }

    /// The change-of-variables entries one step below `upper`: each
    /// `(j, c, word)` means `lower_j = upper_j - c * word` and
    /// `upper_j = lower_j + c * word`, the word letters being the
    /// generators (unchanged across the step) at the respective level.
    pub fn subst_entries(&self, upper: Level) -> Vec<(usize, QElem, Vec<(usize, i64)>)> {
        match step_index(upper) {
            Some(s) => {
                let steps = subst_steps();
                steps[s].entries.clone()
            }
            None => Vec::new(),
        }
    }

    /// Torus expansion of the level-`r` generator `X_i^{(r)}`.
    pub fn cauchon_generator_in_torus(
        &self,
        level: Level,
        i: usize,
    ) -> Result<TorusElement, ModelError> {
        if i < 1 || i > 6 {
            return Err(ModelError::IndexOutOfRange(i));
        }
        Ok(self.gen_torus[level_slot(level)][i - 1].clone())
    }

    /// The embedding of `A_r` into the quantum torus.
    pub fn embed(&self, u: &AlgebraElement) -> TorusElement {
        let slot = level_slot(u.level);
        let mut out = TorusElement::zero();
        for (exp, coeff) in u.pbw.terms() {
            let mut prod = self.torus.one();
            for (k, e) in exp.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let g = &self.gen_torus[slot][k];
                let factor = if *e > 0 {
                    g.clone()
                } else {
                    self.torus
                        .monomial_inverse(g)
                        .expect("only monomial generators are inverted")
                };
                for _ in 0..e.abs() {
                    prod = self.torus.mul(&prod, &factor);
                }
            }
            out = out.add(&prod.scale(coeff));
        }
        out
    }

    fn level_key(level: Level, exp: &[i64]) -> Vec<i64> {
        match level {
            Level::X => vec![exp[0], exp[1], exp[3]],
            Level::Y => vec![exp[0], exp[1]],
            Level::Z => vec![exp[0]],
            Level::T => vec![],
        }
    }

    /// Expand a torus element in the `A_r` PBW basis, or report that it
    /// does not belong to `A_r`. Graded triangular elimination on the
    /// level key; each substitution correction strictly lowers the key.
    pub fn membership(&self, t: &TorusElement, level: Level) -> Option<AlgebraElement> {
        let p = self.presentation(level);
        let constrained = level.number() as usize - 1; // gamma_i >= 0 for i < r
        let mut rest = t.clone();
        let mut out = PBWElement::zero(p);
        while !rest.is_zero() {
            let (exp, coeff) = rest
                .terms()
                .max_by(|(a, _), (b, _)| {
                    Self::level_key(level, a).cmp(&Self::level_key(level, b))
                })
                .map(|(e, c)| (e.clone(), c.clone()))
                .expect("nonzero element has terms");
            for (k, e) in exp.iter().enumerate() {
                if k < constrained && *e < 0 {
                    return None;
                }
            }
            let monomial = PBWElement::monomial(p, exp.clone(), QElem::one()).ok()?;
            let image = self.embed(&AlgebraElement {
                level,
                pbw: monomial.clone(),
            });
            let lead = image.coeff(&exp);
            debug_assert!(!lead.is_zero());
            let c = coeff.div(&lead).expect("leading scalar is a unit");
            out = out.add(&monomial.scale(&c)).expect("same presentation");
            rest = rest.sub(&image.scale(&c));
        }
        Some(AlgebraElement { level, pbw: out })
    }

    /// Apply `eta^eps . phi_lambda` to a level-7 element.
    pub fn apply_automorphism(
        &self,
        a: &Automorphism,
        u: &AlgebraElement,
    ) -> Result<AlgebraElement, ModelError> {
        if u.level != Level::X {
            return Err(ModelError::LevelMismatch);
        }
        let p = self.presentation(Level::X);
        // sigma(X_j) = lambda^{wt(X_j)} * (eta applied or not)
        let mut images: Vec<PBWElement> = Vec::with_capacity(6);
        for j in 0..6 {
            let w = GENERATOR_WEIGHTS[j];
            let mut s = QElem::one();
            for (k, lam) in a.lambda.iter().enumerate() {
                for _ in 0..w[k] {
                    s = s.mul(lam);
                }
            }
            let base = if a.eta {
                self.eta_images[j].clone()
            } else {
                PBWElement::generator(p, j + 1)?
            };
            images.push(base.scale(&s));
        }
        let mut out = PBWElement::zero(p);
        for (exp, coeff) in u.pbw.terms() {
            let mut prod = PBWElement::one(p);
            for (k, e) in exp.iter().enumerate() {
                for _ in 0..*e {
                    prod = prod.mul(&images[k])?;
                }
            }
            out = out.add(&prod.scale(coeff))?;
        }
        Ok(AlgebraElement {
            level: Level::X,
            pbw: out,
        })
    }

    /// True when candidate images of `e_1, e_2, e_3` satisfy both quantum
    /// Serre relation families.
    pub fn verify_automorphism(
        &self,
        images: &[AlgebraElement; 3],
    ) -> Result<bool, ModelError> {
        for im in images {
            if im.level != Level::X {
                return Err(ModelError::LevelMismatch);
            }
        }
        let f = |i: usize| &images[i - 1].pbw;
        // e1 e3 - e3 e1
        if !f(1).commutator(f(3))?.is_zero() {
            return Ok(false);
        }
        let qq = QElem::q().add(&QElem::q_power(-1));
        for (i, j) in [(1usize, 2usize), (2, 1), (2, 3), (3, 2)] {
            let a = f(i);
            let b = f(j);
            let rel = a
                .mul(a)?
                .mul(b)?
                .sub(&a.mul(b)?.mul(a)?.scale(&qq))?
                .add(&b.mul(a)?.mul(a)?)?;
            if !rel.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact expression of `u` as a polynomial in `Delta_1..Delta_3`, if
    /// one exists, by a weight-graded linear solve.
    pub fn express_in_deltas(
        &self,
        u: &AlgebraElement,
        bound: i64,
    ) -> Result<Option<DeltaPoly>, ModelError> {
        if u.level != Level::X {
            return Err(ModelError::LevelMismatch);
        }
        if u.is_zero() {
            return Ok(Some(DeltaPoly::new()));
        }
        let degree = self.total_degree(u)?;
        if degree > bound {
            return Err(ModelError::DegreeOverflow { degree, bound });
        }
        // split into weight-homogeneous pieces
        let mut pieces: BTreeMap<[i64; 3], Vec<(Exponent, QElem)>> = BTreeMap::new();
        for (e, c) in u.pbw.terms() {
            pieces
                .entry(Self::weight_of_exponent(e))
                .or_default()
                .push((e.clone(), c.clone()));
        }
        let mut result = DeltaPoly::new();
        for (w, terms) in pieces {
            let [w1, w2, w3] = w;
            if w1 != w3 || w2 < w1 || w1 < 0 {
                return Ok(None);
            }
            let b = (w2 - w1) as u32;
            let ac = w1 - b as i64;
            if ac < 0 {
                return Ok(None);
            }
            // candidates Delta1^a Delta2^b Delta3^c with a + c = ac
            let mut monos: Vec<(u32, u32, u32)> = Vec::new();
            let mut columns: Vec<PBWElement> = Vec::new();
            for a in 0..=(ac as u32) {
                let c = ac as u32 - a;
                let m = self
                    .delta(1)?
                    .pow(a)?
                    .mul(&self.delta(2)?.pow(b)?)?
                    .mul(&self.delta(3)?.pow(c)?)?;
                monos.push((a, b, c));
                columns.push(m.pbw);
            }
            // assemble and solve
            let mut rows: Vec<Exponent> = Vec::new();
            for col in columns.iter() {
                for (e, _) in col.terms() {
                    if !rows.contains(e) {
                        rows.push(e.clone());
                    }
                }
            }
            for (e, _) in terms.iter() {
                if !rows.contains(e) {
                    rows.push(e.clone());
                }
            }
            let matrix: Vec<Vec<QElem>> = rows
                .iter()
                .map(|e| columns.iter().map(|col| col.coeff(e)).collect())
                .collect();
            let target: Vec<QElem> = rows
                .iter()
                .map(|e| {
                    terms
                        .iter()
                        .find(|(te, _)| te == e)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(QElem::zero)
                })
                .collect();
            match solve_linear(&matrix, &target) {
                Some(solution) => {
                    for (m, c) in monos.into_iter().zip(solution) {
                        if !c.is_zero() {
                            result.insert(m, c);
                        }
                    }
                }
                None => return Ok(None),
            }
        }
        Ok(Some(result))
    }

    /// Rebuild the PBW form of a polynomial in the `Delta_i`.
    pub fn delta_poly_to_pbw(&self, p: &DeltaPoly) -> Result<AlgebraElement, ModelError> {
        let mut out = self.zero(Level::X);
        for (&(a, b, c), coeff) in p {
            let m = self
                .delta(1)?
                .pow(a)?
                .mul(&self.delta(2)?.pow(b)?)?
                .mul(&self.delta(3)?.pow(c)?)?;
            out = out.add(&m.scale(coeff))?;
        }
        Ok(out)
    }

    /// Rebuild the PBW form of a polynomial in `z_1, z_2` (exponents must
    /// be nonnegative).
    pub fn z_poly_to_pbw(&self, p: &ZPoly) -> Result<Option<AlgebraElement>, ModelError> {
        let mut out = self.zero(Level::X);
        for (&(a, b), coeff) in p {
            if a < 0 || b < 0 {
                return Ok(None);
            }
            let m = self.z1().pow(a as u32)?.mul(&self.z2().pow(b as u32)?)?;
            out = out.add(&m.scale(coeff))?;
        }
        Ok(Some(out))
    }

    /// Express a central torus element as a Laurent polynomial in
    /// `z_1, z_2`; `None` when the element is not central.
    pub fn central_torus_to_z_poly(&self, t: &TorusElement) -> Option<ZPoly> {
        if !self.torus.is_central(t) {
            return None;
        }
        let z1t = self.embed(&self.z1());
        let z2t = self.embed(&self.z2());
        let mut out = ZPoly::new();
        for (exp, coeff) in t.terms() {
            // central exponents are a*(1,0,1,1,0,1) + b*(0,1,0,0,1,0)
            let a = exp[0];
            let b = exp[1];
            let pow = |m: &TorusElement, k: i64| -> TorusElement {
                let base = if k >= 0 {
                    m.clone()
                } else {
                    self.torus.monomial_inverse(m).expect("monomial")
                };
                let mut acc = self.torus.one();
                for _ in 0..k.abs() {
                    acc = self.torus.mul(&acc, &base);
                }
                acc
            };
            let zm = self.torus.mul(&pow(&z1t, a), &pow(&z2t, b));
            let (zexp, zc) = zm.as_monomial().expect("powers of central monomials");
            debug_assert_eq!(zexp, exp);
            let c = coeff.div(zc).expect("central monomial scalar is a unit");
            let entry = out.entry((a, b)).or_insert_with(QElem::zero);
            *entry = entry.add(&c);
            if entry.is_zero() {
                out.remove(&(a, b));
            }
        }
        Some(out)
    }

    /// Lemma-1.2 form of a normal element: `u = Delta_i^c z` with `z`
    /// central; `None` when `u` is not q-central.
    pub fn normal_decompose(
        &self,
        u: &AlgebraElement,
        bound: i64,
    ) -> Result<Option<(usize, u32, ZPoly)>, ModelError> {
        if u.is_zero() {
            return Err(ModelError::ZeroElement);
        }
        let mut lam = [0i64; 3];
        for i in 1..=3usize {
            let e = self.serre_generator(i)?;
            match e.pbw.qcommute_exponent(&u.pbw) {
                Some(m) => lam[i - 1] = m,
                None => return Ok(None),
            }
        }
        let Some(p) = self.express_in_deltas(u, bound)? else {
            return Ok(None);
        };
        let l = lam[0];
        let (i, c) = if l >= 0 { (1, l as u32) } else { (3, (-l) as u32) };
        let mut z = ZPoly::new();
        for (&(a, b, cc), coeff) in &p {
            if a as i64 - cc as i64 != l {
                return Ok(None);
            }
            let zp = if l >= 0 { cc as i64 } else { a as i64 };
            let entry = z.entry((zp, b as i64)).or_insert_with(QElem::zero);
            *entry = entry.add(coeff);
        }
        z.retain(|_, c| !c.is_zero());
        Ok(Some((i, c, z)))
    }
}

/// Dense exact Gaussian elimination: solve `M x = t`, `None` when the
/// system is inconsistent. Free variables, if any, are set to zero.
pub(crate) fn solve_linear(matrix: &[Vec<QElem>], target: &[QElem]) -> Option<Vec<QElem>> {
    let rows = matrix.len();
    let cols = if rows == 0 { 0 } else { matrix[0].len() };
    let mut m: Vec<Vec<QElem>> = matrix.to_vec();
    let mut t: Vec<QElem> = target.to_vec();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        t.swap(r, p);
        let inv = m[r][c].inv().expect("pivot nonzero");
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        t[r] = t[r].mul(&inv);
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let v = m[r][k].mul(&f);
                    m[i][k] = m[i][k].sub(&v);
                }
                let v = t[r].mul(&f);
                t[i] = t[i].sub(&v);
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == rows {
            break;
        }
    }
    // rows beyond the pivot rank must have zero targets
    for i in r..rows {
        if !t[i].is_zero() {
            return None;
        }
    }
    let mut x = vec![QElem::zero(); cols];
    for c in 0..cols {
        if let Some(p) = pivot_of_col[c] {
            x[c] = t[p].clone();
        }
    }
    Some(x)
}
