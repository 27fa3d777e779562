//! The batch identity-verification suite: every structural identity the
//! engine is built around, re-derived mechanically and reported with a
//! stable check id and a one-line mathematical anchor.
//!
//! Checks are deterministic: randomized checks derive their stream from
//! the run seed and a per-check constant, so filtering with `--only`
//! does not change any individual result.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::deriv::DerivationSpec;
use crate::field::{rat, QElem};
use crate::model::{AlgebraElement, Automorphism, Level, UqModel, ZPoly};
use crate::ore::{OrePresentation, PBWElement};
use crate::torus::{Exponent, TorusElement};

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Filter: run only checks whose tag equals this string.
    pub only: Option<String>,
    /// Replace the shipped presentations in the confluence check.
    pub presentation: Option<Arc<OrePresentation>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            only: None,
            presentation: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: &'static str,
    pub tag: &'static str,
    pub anchor: &'static str,
    pub pass: bool,
    pub witness: Option<String>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Deterministic JSON form: wall-clock timings are deliberately
    /// excluded so equal runs are byte-identical.
    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "kind": "report",
            "seed": self.seed,
            "pass": self.pass(),
            "checks": self.checks.iter().map(|c| json!({
                "id": c.id,
                "tag": c.tag,
                "anchor": c.anchor,
                "pass": c.pass,
                "witness": c.witness,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{status} {:<28} [{:>6} ms] {}\n",
                c.id,
                c.elapsed.as_millis(),
                c.anchor
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!("     witness: {w}\n"));
            }
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.pass() { "pass" } else { "fail" }
        ));
        out
    }
}

struct Ctx<'a> {
    model: &'a UqModel,
    rng: ChaCha8Rng,
    presentation: Option<Arc<OrePresentation>>,
}

type CheckFn = fn(&mut Ctx) -> Result<(), String>;

const CHECKS: &[(&str, &str, &str, CheckFn)] = &[
    (
        "serre-commuting",
        "serre",
        "e1 and e3 commute",
        check_serre_commuting,
    ),
    (
        "serre-cubic",
        "serre",
        "the degree-3 quantum Serre relations normalize to zero",
        check_serre_cubic,
    ),
    (
        "ore-confluence",
        "confluence",
        "triple products re-associate to the same normal form",
        check_confluence,
    ),
    (
        "pbw-independence",
        "pbw",
        "ordered monomials of total degree <= 6 are linearly independent",
        check_pbw_independence,
    ),
    (
        "delta-qcommute-table",
        "delta-table",
        "the q-commutation exponents of (e_i, Delta_j) match the 3x3 table",
        check_delta_table,
    ),
    (
        "delta-central-z",
        "delta-table",
        "z1 and z2 commute with every generator",
        check_central_z,
    ),
    (
        "delta-polynomial-algebra",
        "delta-table",
        "Delta-monomials are linearly independent (polynomial algebra)",
        check_delta_independence,
    ),
    (
        "cauchon-delta-identities",
        "cauchon",
        "Delta1 = T3, Delta2 = Z2 Z5 = T2 T5, Delta3 = qhat^2 T1 T4 T6",
        check_cauchon_identities,
    ),
    (
        "torus-center-exhaustive",
        "center",
        "T^g is central iff g1=g3=g4=g6 and g2=g5, for |g_i| <= 2",
        check_center_exhaustive,
    ),
    (
        "torus-center-basis",
        "center",
        "the central exponent lattice is spanned by z1 and z2",
        check_center_basis,
    ),
    (
        "embed-oracle",
        "embed",
        "embedding is multiplicative and inverts through membership",
        check_embed_oracle,
    ),
    (
        "localization-formula",
        "localization",
        "Z4^-k Z1 = q^-k Z1 Z4^-k + q [k] Z2 Z4^-k-1 for k = 1..5",
        check_localization_formula,
    ),
    (
        "derivation-pipeline",
        "derivation",
        "random derivations decompose exactly into ad_x + mu-weighted parts",
        check_derivation_pipeline,
    ),
    (
        "z2-multiplier",
        "z2",
        "every derivation satisfies D(z2) = z z2 with z polynomial in z1, z2",
        check_z2_multiplier,
    ),
    (
        "automorphism-eta",
        "automorphism",
        "the diagram flip preserves the relations and squares to the identity",
        check_automorphism_eta,
    ),
    (
        "automorphism-compose",
        "automorphism",
        "conjugating a diagonal automorphism by the flip reverses its scalars",
        check_automorphism_compose,
    ),
    (
        "automorphism-delta-scalars",
        "automorphism",
        "the flip permutes Delta1 and Delta3 and fixes Delta2, scalar 1",
        check_automorphism_delta_scalars,
    ),
    (
        "hh1-basis",
        "hh1",
        "zero and pure weight derivations decompose to the indicator table",
        check_hh1_basis,
    ),
];

/// Run the suite (optionally filtered) and assemble the report.
pub fn run_suite(model: &UqModel, opts: &VerifyOptions) -> VerifyReport {
    let mut checks = Vec::new();
    for (index, (id, tag, anchor, f)) in CHECKS.iter().enumerate() {
        if let Some(only) = &opts.only {
            if only != tag {
                continue;
            }
        }
        // per-check stream: stable under filtering
        let rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((index as u64 + 1) << 32));
        let mut ctx = Ctx {
            model,
            rng,
            presentation: opts.presentation.clone(),
        };
        let start = Instant::now();
        let result = f(&mut ctx);
        let elapsed = start.elapsed();
        checks.push(CheckResult {
            id,
            tag,
            anchor,
            pass: result.is_ok(),
            witness: result.err(),
            elapsed,
        });
    }
    VerifyReport {
        seed: opts.seed,
        checks,
    }
}

// ---------------------------------------------------------------------
// random data

const SERRE_DEGREE: [i64; 6] = [1, 2, 3, 1, 2, 1];

fn rand_coeff(rng: &mut ChaCha8Rng) -> QElem {
    let n = loop {
        let n = rng.gen_range(-3i64..=3);
        if n != 0 {
            break n;
        }
    };
    let d = rng.gen_range(1i64..=3);
    let k = rng.gen_range(-2i64..=2);
    QElem::from_rat(rat(n, d)).mul(&QElem::q_power(k))
}

fn rand_exponent(rng: &mut ChaCha8Rng, max_deg: i64) -> Exponent {
    let mut exp = vec![0i64; 6];
    let mut budget = max_deg;
    let mut order: Vec<usize> = (0..6).collect();
    for i in (1..6).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    for k in order {
        let cap = budget / SERRE_DEGREE[k];
        if cap == 0 {
            continue;
        }
        let e = rng.gen_range(0..=cap.min(2));
        exp[k] = e;
        budget -= e * SERRE_DEGREE[k];
    }
    exp
}

fn rand_element(model: &UqModel, rng: &mut ChaCha8Rng, max_deg: i64) -> AlgebraElement {
    let p = model.presentation(Level::X);
    let nterms = rng.gen_range(1..=3);
    let mut out = PBWElement::zero(p);
    for _ in 0..nterms {
        let exp = rand_exponent(rng, max_deg);
        let c = rand_coeff(rng);
        out = out
            .add(&PBWElement::monomial(p, exp, c).expect("nonnegative exponents"))
            .expect("same presentation");
    }
    AlgebraElement {
        level: Level::X,
        pbw: out,
    }
}

fn rand_zpoly(rng: &mut ChaCha8Rng, max_deg: i64) -> ZPoly {
    let mut out = ZPoly::new();
    for a in 0..=max_deg {
        for b in 0..=(max_deg - a) {
            if rng.gen_bool(0.5) {
                out.insert((a, b), rand_coeff(rng));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------
// helpers

fn err_str(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Exact rank of a set of sparse coefficient rows.
fn sparse_rank(rows: Vec<BTreeMap<Exponent, QElem>>) -> usize {
    let mut pivots: Vec<(Exponent, BTreeMap<Exponent, QElem>)> = Vec::new();
    let mut rank = 0usize;
    for row in rows {
        let mut r = row;
        loop {
            let Some((lead, _)) = r.iter().next_back() else {
                break;
            };
            let lead = lead.clone();
            match pivots.iter().find(|(p, _)| *p == lead) {
                Some((_, prow)) => {
                    let f = r[&lead].div(&prow[&lead]).expect("pivot is nonzero");
                    for (e, c) in prow {
                        let delta = c.mul(&f);
                        let entry = r.entry(e.clone()).or_insert_with(QElem::zero);
                        *entry = entry.sub(&delta);
                        if entry.is_zero() {
                            r.remove(e);
                        }
                    }
                }
                None => {
                    pivots.push((lead, r));
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn serre_images(model: &UqModel) -> [PBWElement; 3] {
    [
        model.serre_generator(1).unwrap().pbw,
        model.serre_generator(2).unwrap().pbw,
        model.serre_generator(3).unwrap().pbw,
    ]
}

// ---------------------------------------------------------------------
// checks

fn check_serre_commuting(ctx: &mut Ctx) -> Result<(), String> {
    let [e1, _, e3] = serre_images(ctx.model);
    let r = e1.commutator(&e3).map_err(err_str)?;
    if !r.is_zero() {
        return Err(format!("e1 e3 - e3 e1 = {r}"));
    }
    Ok(())
}

fn check_serre_cubic(ctx: &mut Ctx) -> Result<(), String> {
    let e = serre_images(ctx.model);
    let qq = QElem::q().add(&QElem::q_power(-1));
    for (i, j) in [(1usize, 2usize), (2, 1), (2, 3), (3, 2)] {
        let a = &e[i - 1];
        let b = &e[j - 1];
        let r = (|| -> Result<PBWElement, crate::ore::OreError> {
            a.mul(a)?
                .mul(b)?
                .sub(&a.mul(b)?.mul(a)?.scale(&qq))?
                .add(&b.mul(a)?.mul(a)?)
        })()
        .map_err(err_str)?;
        if !r.is_zero() {
            return Err(format!("relation for (e{i}, e{j}) gives {r}"));
        }
    }
    Ok(())
}

fn check_confluence(ctx: &mut Ctx) -> Result<(), String> {
    let shipped: Vec<Arc<OrePresentation>> = Level::ALL
        .iter()
        .map(|l| Arc::clone(ctx.model.presentation(*l)))
        .collect();
    let targets: Vec<Arc<OrePresentation>> = match &ctx.presentation {
        Some(p) => vec![Arc::clone(p)],
        None => shipped,
    };
    for p in targets {
        let n = p.size();
        for i in 1..=n {
            for j in (i + 1)..=n {
                for k in (j + 1)..=n {
                    let xk = PBWElement::generator(&p, k).map_err(err_str)?;
                    let xj = PBWElement::generator(&p, j).map_err(err_str)?;
                    let xi = PBWElement::generator(&p, i).map_err(err_str)?;
                    let left = xk
                        .mul(&xj.mul(&xi).map_err(err_str)?)
                        .map_err(err_str)?;
                    let right = xk
                        .mul(&xj)
                        .map_err(err_str)?
                        .mul(&xi)
                        .map_err(err_str)?;
                    if left != right {
                        return Err(format!(
                            "presentation {}: triple ({i}, {j}, {k}): {left} vs {right}",
                            p.name()
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_pbw_independence(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    let p = model.presentation(Level::X);
    // enumerate exponents with total Serre-degree <= 6
    let mut stack = vec![(0usize, vec![0i64; 6], 0i64)];
    let mut exps: Vec<Exponent> = Vec::new();
    while let Some((k, exp, deg)) = stack.pop() {
        if k == 6 {
            exps.push(exp);
            continue;
        }
        let mut e = 0i64;
        while deg + e * SERRE_DEGREE[k] <= 6 {
            let mut next = exp.clone();
            next[k] = e;
            stack.push((k + 1, next, deg + e * SERRE_DEGREE[k]));
            e += 1;
        }
    }
    // each monomial, written as the fully reversed generator word,
    // re-expands to an element whose rows must be jointly independent
    let mut rows = Vec::with_capacity(exps.len());
    for exp in &exps {
        let word: Vec<(usize, i64)> = (1..=6usize)
            .rev()
            .filter(|i| exp[i - 1] != 0)
            .map(|i| (i, exp[i - 1]))
            .collect();
        let u = PBWElement::normal_form(p, &word).map_err(err_str)?;
        if u.coeff(exp).is_zero() {
            return Err(format!("reversed word for {exp:?} lost its leading term"));
        }
        rows.push(u.terms().map(|(e, c)| (e.clone(), c.clone())).collect());
    }
    let rank = sparse_rank(rows);
    if rank != exps.len() {
        return Err(format!(
            "rank {rank} over {} monomials of degree <= 6",
            exps.len()
        ));
    }
    Ok(())
}

fn check_delta_table(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    for i in 1..=3usize {
        for j in 1..=3usize {
            let expected = match (i, j) {
                (1, 1) | (3, 3) => 1,
                (1, 3) | (3, 1) => -1,
                _ => 0,
            };
            let e = model.serre_generator(i).map_err(err_str)?;
            let d = model.delta(j).map_err(err_str)?;
            match e.pbw.qcommute_exponent(&d.pbw) {
                Some(m) if m == expected => {}
                other => {
                    return Err(format!(
                        "(e{i}, Delta{j}): expected q^{expected}, found {other:?}"
                    ))
                }
            }
        }
    }
    Ok(())
}

fn check_central_z(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    for (name, z) in [("z1", model.z1()), ("z2", model.z2())] {
        for i in 1..=3 {
            let e = model.serre_generator(i).map_err(err_str)?;
            let c = z.commutator(&e).map_err(err_str)?;
            if !c.is_zero() {
                return Err(format!("[{name}, e{i}] = {c}"));
            }
        }
    }
    Ok(())
}

fn check_delta_independence(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    let mut rows = Vec::new();
    let mut count = 0usize;
    for a in 0..=4u32 {
        for b in 0..=(4 - a) {
            for c in 0..=(4 - a - b) {
                let u = model
                    .delta(1)
                    .map_err(err_str)?
                    .pow(a)
                    .map_err(err_str)?
                    .mul(&model.delta(2).map_err(err_str)?.pow(b).map_err(err_str)?)
                    .map_err(err_str)?
                    .mul(&model.delta(3).map_err(err_str)?.pow(c).map_err(err_str)?)
                    .map_err(err_str)?;
                rows.push(u.pbw.terms().map(|(e, q)| (e.clone(), q.clone())).collect());
                count += 1;
            }
        }
    }
    let rank = sparse_rank(rows);
    if rank != count {
        return Err(format!("rank {rank} over {count} Delta-monomials"));
    }
    Ok(())
}

fn check_cauchon_identities(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    let qhat2 = QElem::qhat().mul(&QElem::qhat());
    let monomials = [
        (1usize, TorusElement::monomial(vec![0, 0, 1, 0, 0, 0], QElem::one())),
        (2, TorusElement::monomial(vec![0, 1, 0, 0, 1, 0], QElem::one())),
        (3, TorusElement::monomial(vec![1, 0, 0, 1, 0, 1], qhat2)),
    ];
    for (i, want) in monomials {
        for level in Level::ALL {
            let d = model.delta_in_basis(i, level).map_err(err_str)?;
            let img = model.embed(&d);
            if img != want {
                return Err(format!(
                    "Delta{i} in the {} basis embeds as {img}",
                    level.symbol()
                ));
            }
        }
    }
    Ok(())
}

fn check_center_exhaustive(ctx: &mut Ctx) -> Result<(), String> {
    let t = ctx.model.torus();
    let mut g = vec![-2i64; 6];
    loop {
        let lattice = g[0] == g[2] && g[2] == g[3] && g[3] == g[5] && g[1] == g[4];
        let central = t.is_central(&TorusElement::monomial(g.clone(), QElem::one()));
        if lattice != central {
            return Err(format!("exponent {g:?}: lattice {lattice}, central {central}"));
        }
        // odometer
        let mut k = 0usize;
        loop {
            if k == 6 {
                return Ok(());
            }
            g[k] += 1;
            if g[k] <= 2 {
                break;
            }
            g[k] = -2;
            k += 1;
        }
    }
}

fn check_center_basis(ctx: &mut Ctx) -> Result<(), String> {
    let t = ctx.model.torus();
    let basis = t.central_exponent_basis();
    let want = vec![vec![1, 0, 1, 1, 0, 1], vec![0, 1, 0, 0, 1, 0]];
    if basis != want {
        return Err(format!("central basis {basis:?}"));
    }
    // and the generators are exactly the exponents of z1 and z2
    let z1 = ctx.model.embed(&ctx.model.z1());
    let z2 = ctx.model.embed(&ctx.model.z2());
    for (z, e) in [(&z1, &want[0]), (&z2, &want[1])] {
        match z.as_monomial() {
            Some((exp, _)) if exp == e => {}
            other => return Err(format!("central generator embeds as {other:?}")),
        }
    }
    Ok(())
}

fn check_embed_oracle(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    for trial in 0..200 {
        let u = rand_element(model, &mut ctx.rng, 4);
        let v = rand_element(model, &mut ctx.rng, 4);
        let lhs = model.embed(&u.mul(&v).map_err(err_str)?);
        let rhs = model.torus().mul(&model.embed(&u), &model.embed(&v));
        if lhs != rhs {
            return Err(format!("trial {trial}: embed(u v) != embed(u) embed(v) for u = {u}, v = {v}"));
        }
        match model.membership(&model.embed(&u), Level::X) {
            Some(back) if back == u => {}
            _ => return Err(format!("trial {trial}: membership failed to invert u = {u}")),
        }
    }
    Ok(())
}

fn check_localization_formula(ctx: &mut Ctx) -> Result<(), String> {
    let p = ctx.model.presentation(Level::Z);
    for k in 1..=5i64 {
        let lhs = PBWElement::normal_form(p, &[(4, -k), (1, 1)]).map_err(err_str)?;
        let rhs = PBWElement::from_terms(
            p,
            [
                (vec![1, 0, 0, -k, 0, 0], QElem::q_power(-k)),
                (
                    vec![0, 1, 0, -k - 1, 0, 0],
                    QElem::q().mul(&QElem::q_int(k as u32)),
                ),
            ],
        )
        .map_err(err_str)?;
        if lhs != rhs {
            return Err(format!("k = {k}: {lhs} vs {rhs}"));
        }
    }
    Ok(())
}

fn rand_derivation_parts(
    model: &UqModel,
    rng: &mut ChaCha8Rng,
) -> (AlgebraElement, ZPoly, ZPoly, ZPoly) {
    let x = rand_element(model, rng, 3);
    let p1 = rand_zpoly(rng, 1);
    let p4 = rand_zpoly(rng, 1);
    let p6 = rand_zpoly(rng, 1);
    (x, p1, p4, p6)
}

fn check_derivation_pipeline(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    for trial in 0..100 {
        let (x, p1, p4, p6) = rand_derivation_parts(model, &mut ctx.rng);
        let spec =
            DerivationSpec::from_parts(model, &x, &p1, &p4, &p6).map_err(err_str)?;
        let dec = spec
            .decompose(model)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        // canonical inner part: the original x with central monomials removed
        let canonical = model.torus().strip_central(&model.embed(&x));
        if model.embed(&dec.x) != canonical {
            return Err(format!(
                "trial {trial}: inner part {} is not the canonical form of {x}",
                dec.x
            ));
        }
        for (name, got, want) in [
            ("mu1", dec.mu1(), &p1),
            ("mu4", dec.mu4(), &p4),
            ("mu6", dec.mu6(), &p6),
        ] {
            if got != want {
                return Err(format!("trial {trial}: {name} mismatch"));
            }
        }
    }
    Ok(())
}

fn check_z2_multiplier(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    for trial in 0..100 {
        let (x, p1, p4, p6) = rand_derivation_parts(model, &mut ctx.rng);
        let spec =
            DerivationSpec::from_parts(model, &x, &p1, &p4, &p6).map_err(err_str)?;
        let z = spec
            .z2_multiplier(model)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        // exact: D(z2) = z * z2 in the PBW basis
        let lhs = spec.apply(model, &model.z2()).map_err(err_str)?;
        let zp = model
            .z_poly_to_pbw(&z)
            .map_err(err_str)?
            .ok_or_else(|| format!("trial {trial}: z has a negative exponent"))?;
        let rhs = zp.mul(&model.z2()).map_err(err_str)?;
        if lhs != rhs {
            return Err(format!("trial {trial}: D(z2) != z z2"));
        }
        // and z is the expected combination mu1 + 2 mu4 + mu6
        let mut want = ZPoly::new();
        for (p, mult) in [(&p1, 1i64), (&p4, 2), (&p6, 1)] {
            for (k, c) in p {
                let entry = want.entry(*k).or_insert_with(QElem::zero);
                *entry = entry.add(&c.mul(&QElem::from_int(mult)));
                if entry.is_zero() {
                    want.remove(k);
                }
            }
        }
        if z != want {
            return Err(format!("trial {trial}: z mismatch"));
        }
    }
    Ok(())
}

fn check_automorphism_eta(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    let eta = Automorphism::eta();
    let images = [
        model
            .apply_automorphism(&eta, &model.serre_generator(1).map_err(err_str)?)
            .map_err(err_str)?,
        model
            .apply_automorphism(&eta, &model.serre_generator(2).map_err(err_str)?)
            .map_err(err_str)?,
        model
            .apply_automorphism(&eta, &model.serre_generator(3).map_err(err_str)?)
            .map_err(err_str)?,
    ];
    if !model.verify_automorphism(&images).map_err(err_str)? {
        return Err("flip images violate the relations".into());
    }
    for i in 1..=3 {
        let e = model.serre_generator(i).map_err(err_str)?;
        let twice = model
            .apply_automorphism(&eta, &model.apply_automorphism(&eta, &e).map_err(err_str)?)
            .map_err(err_str)?;
        if twice != e {
            return Err(format!("flip squared moves e{i}"));
        }
    }
    Ok(())
}

fn check_automorphism_compose(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    let eta = Automorphism::eta();
    for trial in 0..10 {
        let lambda: [QElem; 3] = std::array::from_fn(|_| rand_coeff(&mut ctx.rng));
        let phi = Automorphism::diagonal(lambda.clone());
        let reversed = Automorphism::diagonal([
            lambda[2].clone(),
            lambda[1].clone(),
            lambda[0].clone(),
        ]);
        for i in 1..=3 {
            let e = model.serre_generator(i).map_err(err_str)?;
            let lhs = model
                .apply_automorphism(
                    &eta,
                    &model
                        .apply_automorphism(
                            &phi,
                            &model.apply_automorphism(&eta, &e).map_err(err_str)?,
                        )
                        .map_err(err_str)?,
                )
                .map_err(err_str)?;
            let rhs = model.apply_automorphism(&reversed, &e).map_err(err_str)?;
            if lhs != rhs {
                return Err(format!("trial {trial}: composition differs on e{i}"));
            }
        }
    }
    Ok(())
}

/// Regression constants: the flip sends Delta1 -> Delta3, Delta2 ->
/// Delta2, Delta3 -> Delta1, each with scalar exactly 1.
const ETA_DELTA_SCALARS: [(usize, usize, i64); 3] = [(1, 3, 1), (2, 2, 1), (3, 1, 1)];

fn check_automorphism_delta_scalars(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    let eta = Automorphism::eta();
    for (i, j, scalar) in ETA_DELTA_SCALARS {
        let img = model
            .apply_automorphism(&eta, &model.delta(i).map_err(err_str)?)
            .map_err(err_str)?;
        let want = model
            .delta(j)
            .map_err(err_str)?
            .scale(&QElem::from_int(scalar));
        if img != want {
            return Err(format!("flip(Delta{i}) = {img}, expected {scalar} Delta{j}"));
        }
    }
    Ok(())
}

fn check_hh1_basis(ctx: &mut Ctx) -> Result<(), String> {
    let model = ctx.model;
    let zero = DerivationSpec::zero(model);
    let dec = zero.decompose(model).map_err(err_str)?;
    if !dec.x.is_zero() || dec.mu.iter().any(|p| !p.is_empty()) {
        return Err("zero derivation decomposed nontrivially".into());
    }
    let one = ZPoly::from([((0i64, 0i64), QElem::one())]);
    let tables: [(usize, [i64; 6]); 3] = [
        (1, [1, 1, 1, 0, 0, 0]),
        (4, [0, 1, 1, 1, 1, 0]),
        (6, [0, 0, 1, 0, 1, 1]),
    ];
    for (i, indicator) in tables {
        let d = DerivationSpec::weight(model, i).map_err(err_str)?;
        let dec = d.decompose(model).map_err(err_str)?;
        if !dec.x.is_zero() {
            return Err(format!("weight derivation {i} has inner part {}", dec.x));
        }
        for (k, flag) in indicator.iter().enumerate() {
            let want = if *flag == 1 { one.clone() } else { ZPoly::new() };
            if dec.mu[k] != want {
                return Err(format!(
                    "weight derivation {i}: multiplier {} mismatch",
                    k + 1
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ore::OreRelation;

    fn model() -> &'static Arc<UqModel> {
        UqModel::shared()
    }

    #[test]
    fn fast_checks_pass() {
        let opts = VerifyOptions::default();
        for tag in [
            "serre",
            "confluence",
            "delta-table",
            "cauchon",
            "localization",
            "automorphism",
            "hh1",
        ] {
            let report = run_suite(
                model(),
                &VerifyOptions {
                    only: Some(tag.to_string()),
                    ..opts.clone()
                },
            );
            assert!(!report.checks.is_empty(), "tag {tag} matched nothing");
            assert!(report.pass(), "tag {tag}: {}", report.render_text());
        }
    }

    #[test]
    fn only_serre_selects_two_checks() {
        let report = run_suite(
            model(),
            &VerifyOptions {
                only: Some("serre".to_string()),
                ..Default::default()
            },
        );
        assert_eq!(report.checks.len(), 2);
        assert!(report.pass());
    }

    #[test]
    fn json_report_is_deterministic_and_excludes_timing() {
        let opts = VerifyOptions {
            only: Some("serre".to_string()),
            seed: 42,
            ..Default::default()
        };
        let a = serde_json::to_string(&run_suite(model(), &opts).to_json()).unwrap();
        let b = serde_json::to_string(&run_suite(model(), &opts).to_json()).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("elapsed"));
        assert!(a.contains("\"seed\":42"));
    }

    #[test]
    fn corrupted_presentation_fails_confluence() {
        // flip one commutation scalar in the level-7 presentation
        let good = model().presentation(Level::X);
        let mut pairs = Vec::new();
        for i in 1..=6usize {
            for j in (i + 1)..=6usize {
                let mut rel = good.relation(i, j);
                if (i, j) == (1, 2) {
                    rel = OreRelation {
                        lambda: QElem::q_power(1),
                        correction: rel.correction,
                    };
                }
                pairs.push((i, j, rel));
            }
        }
        let bad = crate::ore::OrePresentation::new("corrupted", "X", 6, [], pairs).unwrap();
        let report = run_suite(
            model(),
            &VerifyOptions {
                only: Some("confluence".to_string()),
                presentation: Some(bad),
                ..Default::default()
            },
        );
        assert!(!report.pass());
        let check = &report.checks[0];
        assert!(check.witness.as_deref().unwrap().contains("triple"));
    }

    #[test]
    fn randomized_checks_small_smoke() {
        // full randomized tags run in the acceptance suite; here a light
        // smoke pass over the embed oracle with the default seed
        let report = run_suite(
            model(),
            &VerifyOptions {
                only: Some("embed".to_string()),
                ..Default::default()
            },
        );
        assert!(report.pass(), "{}", report.render_text());
    }
}
