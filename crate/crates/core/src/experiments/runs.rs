//! Named experiment drivers. Each driver reproduces one family of calculus
//! laws as seeded, configurable checks and returns a machine-readable
//! report; tables and heatmaps go to CSV next to the report.

use super::config::ExperimentConfig;
use super::report::{write_csv, CheckMode, Checker, Report};
use crate::calculus::{
    apply_circle, apply_e, apply_multi, apply_ordered, apply_single, apply_single_refined,
    circle::cayley_symbol, compose_calculus, ApplyOptions, CalculusHomomorphism, EPath,
};
use crate::extend::{
    dbar_decay_table, extend_fourier, extend_taylor, least_squares_slope, FrequencyGrid,
};
use crate::funcs::{EFunction, PoleTerm, SmoothFunction, TensorFunction};
use crate::linop::{identity, norm2, Operator, OperatorTuple};
use crate::quad::{integrate_plane, QuadratureSpec};
use crate::rng::{self, ChaCha8Rng};
use crate::{C64, CMatrix, Result};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn mat_json(m: &CMatrix) -> serde_json::Value {
    crate::jsonfmt::matrix_to_json(m)
}

/// Random bump whose support brackets the given point.
fn bump_near(r: &mut ChaCha8Rng, x: f64) -> SmoothFunction {
    let h = rng::uniform_in(r, 0.9, 1.4);
    let c = x + rng::uniform_in(r, -0.2, 0.2);
    SmoothFunction::standard_bump(c, h)
}

// ---------------------------------------------------------------------------
// oracle suite: scalar consistency, eigen oracle, extension independence,
// holomorphic consistency, support vanishing, spectral projectors, the
// tensor law and the diagonal restriction
// ---------------------------------------------------------------------------

pub fn run_oracle_suite(cfg: &ExperimentConfig) -> Result<Report> {
    let seed = cfg.seed();
    let ts = cfg.tol_scale();
    let mut r = rng::substream(seed, "oracle-suite");
    let mut ck = Checker::new();
    let opts = ApplyOptions {
        spec: cfg.quad,
        ..Default::default()
    };

    // scalar cases: the calculus on a 1x1 matrix is plain evaluation
    let t0 = Instant::now();
    let mut worst_scalar = 0.0f64;
    for i in 0..10 {
        let lambda = rng::uniform_in(&mut r, -2.0, 2.0);
        let f = bump_near(&mut r, lambda);
        let p = Operator::from_real(&[&[lambda]])?;
        let res = apply_single(&f, &p, &opts)?;
        let expect = f.eval_value(lambda);
        let err = (res.value[(0, 0)] - expect).norm();
        worst_scalar = worst_scalar.max(err);
        if i == 0 {
            ck.scalar(
                "scalar/first-case",
                CheckMode::Oracle,
                res.value[(0, 0)].re,
                expect.re,
                err,
                1e-7 * ts,
                t0,
            );
        }
    }
    ck.scalar(
        "scalar/worst-of-10",
        CheckMode::Oracle,
        worst_scalar,
        0.0,
        worst_scalar,
        1e-7 * ts,
        t0,
    );

    // eigen oracle on symmetric matrices across dimensions, with the
    // fourier-vs-taylor independence on the same suite
    for n in cfg.dims() {
        if n < 2 {
            continue;
        }
        let t = Instant::now();
        let p = Operator::new(rng::symmetric_gaussian(&mut r, n, 1.8))?;
        let f = bump_near(&mut r, 0.0);
        let (fourier, _) = apply_single_refined(&f, &p, &opts, 1e-6, 40_000_000)?;
        let oracle = p.eigen_oracle(&|x| f.eval_value(x), 1e6)?;
        let err = norm2(&(&fourier.value - &oracle));
        ck.push(
            format!("eigen-oracle/n{n}"),
            CheckMode::Oracle,
            mat_json(&fourier.value),
            mat_json(&oracle),
            err,
            1e-5 * ts,
            t,
            Some(fourier.diagnostics.node_count),
        );
        let t = Instant::now();
        let taylor = apply_single(&f, &p, &ApplyOptions { taylor: true, spec: cfg.quad, ..Default::default() })?;
        let ind = norm2(&(&fourier.value - &taylor.value));
        ck.scalar(
            format!("extension-independence/n{n}"),
            CheckMode::ConsistencyOnly,
            ind,
            0.0,
            ind,
            1e-5 * ts,
            t,
        );
    }

    // plateau covering the spectrum reproduces the identity
    let t = Instant::now();
    let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.5))?;
    let (lo, hi) = p.spectrum_interval();
    let fcover = SmoothFunction::plateau(lo - 0.3, hi + 0.3, 0.5);
    let res = apply_single(&fcover, &p, &opts)?;
    let err = norm2(&(&res.value - identity(4)));
    ck.push(
        "holomorphic/plateau-gives-identity",
        CheckMode::Oracle,
        mat_json(&res.value),
        mat_json(&identity(4)),
        err,
        1e-6 * ts,
        t,
        Some(res.diagnostics.node_count),
    );

    // support disjoint from the spectrum gives zero
    let t = Instant::now();
    let faway = SmoothFunction::standard_bump(hi + 4.0, 0.9);
    let res = apply_single(&faway, &p, &opts)?;
    let err = norm2(&res.value);
    ck.scalar(
        "support/off-spectrum-vanishes",
        CheckMode::Oracle,
        err,
        0.0,
        err,
        1e-6 * ts,
        t,
    );

    // spectral projector: plateau selecting one eigenvalue of a diagonal
    let t = Instant::now();
    let d = Operator::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)])?;
    let sel = SmoothFunction::plateau(0.8, 1.2, 0.15);
    let res = apply_single(&sel, &d, &opts)?;
    let oracle = d.eigen_oracle(&|x| sel.eval_value(x), 1e6)?;
    let err = norm2(&(&res.value - &oracle));
    ck.push(
        "projector/one-eigenvalue",
        CheckMode::Oracle,
        mat_json(&res.value),
        mat_json(&oracle),
        err,
        1e-5 * ts,
        t,
        Some(res.diagnostics.node_count),
    );

    // tensor law: f ⊗ g applied to a pair equals the operator product
    let t = Instant::now();
    let p1 = Operator::new(rng::symmetric_gaussian(&mut r, 3, 1.3))?;
    let p2 = Operator::new(rng::symmetric_gaussian(&mut r, 3, 1.3))?;
    let phi1 = bump_near(&mut r, 0.0);
    let phi2 = bump_near(&mut r, 0.0);
    let tf = TensorFunction::product(vec![phi1.clone(), phi2.clone()])?;
    let tuple = OperatorTuple::new(vec![p1.clone(), p2.clone()])?;
    let multi = apply_multi(&tf, &tuple, &opts)?;
    let prod = apply_single(&phi1, &p1, &opts)?.value * apply_single(&phi2, &p2, &opts)?.value;
    let err = norm2(&(&multi.value - &prod));
    ck.push(
        "tensor-law/pair",
        CheckMode::Oracle,
        mat_json(&multi.value),
        mat_json(&prod),
        err,
        1e-5 * ts,
        t,
        Some(multi.diagnostics.node_count),
    );

    // diagonal restriction: equal operators collapse to one variable
    let t = Instant::now();
    let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.3))?;
    let tf = TensorFunction::product(vec![bump_near(&mut r, 0.0), bump_near(&mut r, 0.0)])?;
    let tuple = OperatorTuple::new(vec![p.clone(), p.clone()])?;
    let multi = apply_multi(&tf, &tuple, &opts)?;
    let single = apply_single(&tf.diagonal_restriction()?, &p, &opts)?;
    let err = norm2(&(&multi.value - &single.value));
    ck.push(
        "diagonal-restriction/pair",
        CheckMode::Oracle,
        mat_json(&multi.value),
        mat_json(&single.value),
        err,
        1e-5 * ts,
        t,
        Some(multi.diagnostics.node_count),
    );

    Ok(ck.into_report("oracle-suite", seed, cfg.resolved_json("oracle-suite")))
}

// ---------------------------------------------------------------------------
// perturbation: the rotated-projector pair and the blow-up of the support
// ---------------------------------------------------------------------------

pub struct PerturbationFixture {
    pub a: Operator,
    pub a_eps: Operator,
    pub phi0: SmoothFunction,
    pub phi1: SmoothFunction,
}

pub fn perturbation_fixture(eps: f64) -> Result<PerturbationFixture> {
    let a = Operator::from_real(&[&[1.0, 0.0], &[0.0, 0.0]])?;
    let (c, s) = (eps.cos(), eps.sin());
    // U^{-1} A U for the rotation U by eps
    let a_eps = Operator::from_real(&[&[c * c, c * s], &[s * c, s * s]])?;
    Ok(PerturbationFixture {
        a,
        a_eps,
        phi0: SmoothFunction::standard_bump(0.0, 0.3),
        phi1: SmoothFunction::standard_bump(1.0, 0.3),
    })
}

pub fn run_perturbation(cfg: &ExperimentConfig) -> Result<Report> {
    let seed = cfg.seed();
    let ts = cfg.tol_scale();
    let mut ck = Checker::new();
    let opts = ApplyOptions::default();
    let epsilons = cfg.epsilons(&[0.1, 0.05, 0.025]);

    let mut slope_pts = Vec::new();
    let mut rows = Vec::new();
    for &eps in &epsilons {
        let t = Instant::now();
        let fx = perturbation_fixture(eps)?;
        let tuple = OperatorTuple::new(vec![fx.a.clone(), fx.a_eps.clone()])?;
        let f01 = TensorFunction::product(vec![fx.phi0.clone(), fx.phi1.clone()])?;
        let res = apply_multi(&f01, &tuple, &opts)?;
        let v = &res.value;
        let (sc, ss) = (eps.sin() * eps.cos(), eps.sin() * eps.sin());
        let err21 = (v[(1, 0)] - C64::new(sc, 0.0)).norm();
        let err22 = (v[(1, 1)] - C64::new(ss, 0.0)).norm();
        rows.push(vec![eps, v[(1, 0)].re, sc, v[(1, 1)].re, ss, norm2(v)]);
        if eps == epsilons[0] {
            ck.scalar(
                "example-pair/entry-21",
                CheckMode::Oracle,
                v[(1, 0)].re,
                sc,
                err21,
                1e-4 * ts,
                t,
            );
            ck.scalar(
                "example-pair/entry-22",
                CheckMode::Oracle,
                v[(1, 1)].re,
                ss,
                err22,
                1e-4 * ts,
                t,
            );
        }
        slope_pts.push((eps.ln(), norm2(v).ln()));
    }
    let slope = least_squares_slope(&slope_pts);
    let t = Instant::now();
    ck.scalar(
        "example-pair/norm-slope-in-eps",
        CheckMode::Measured,
        slope,
        1.0,
        (slope - 1.0).abs(),
        0.1,
        t,
    );

    // all four product points carry mass; away from them the norm floors
    let eps = epsilons[0];
    let fx = perturbation_fixture(eps)?;
    let tuple = OperatorTuple::new(vec![fx.a.clone(), fx.a_eps.clone()])?;
    let bump_at = |c: f64| SmoothFunction::standard_bump(c, 0.3);
    let mut peak_min = f64::INFINITY;
    let t = Instant::now();
    for &a in &[0.0, 1.0] {
        for &b in &[0.0, 1.0] {
            let f = TensorFunction::product(vec![bump_at(a), bump_at(b)])?;
            let nrm = norm2(&apply_multi(&f, &tuple, &opts)?.value);
            peak_min = peak_min.min(nrm);
        }
    }
    ck.scalar(
        "support-blowup/weakest-product-peak",
        CheckMode::Measured,
        peak_min,
        eps.sin().abs(),
        (peak_min - eps.sin().abs()).abs() / eps.sin().abs(),
        0.5,
        t,
    );
    let t = Instant::now();
    let f00 = TensorFunction::product(vec![bump_at(0.0), bump_at(0.0)])?;
    let n00 = norm2(&apply_multi(&f00, &tuple, &opts)?.value);
    ck.scalar(
        "support-blowup/peak-00-survives",
        CheckMode::Measured,
        n00,
        1.0,
        if n00 >= 0.5 { 0.0 } else { 0.5 - n00 },
        0.0,
        t,
    );
    let t = Instant::now();
    let far = TensorFunction::product(vec![bump_at(0.5), bump_at(0.5)])?;
    let nfar = norm2(&apply_multi(&far, &tuple, &opts)?.value);
    ck.scalar(
        "support-blowup/floor-off-product-set",
        CheckMode::Oracle,
        nfar,
        0.0,
        nfar,
        1e-6 * ts,
        t,
    );

    write_csv(
        &out_dir(cfg).join("perturbation.csv"),
        &["eps", "entry21", "sin_cos", "entry22", "sin_sq", "norm"],
        &rows,
    )?;
    Ok(ck.into_report("perturb", seed, cfg.resolved_json("perturb")))
}

// ---------------------------------------------------------------------------
// commutator bound: ||f(P,Q) - f(Q,P)|| against ||[P,Q]||
// ---------------------------------------------------------------------------

pub fn run_commutator_bound(cfg: &ExperimentConfig) -> Result<Report> {
    let seed = cfg.seed();
    let mut r = rng::substream(seed, "commutator");
    let mut ck = Checker::new();
    let opts = ApplyOptions::default();
    let epsilons = cfg.epsilons(&[1e-1, 1e-2, 1e-3]);

    let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.5))?;
    let e = rng::symmetric_gaussian(&mut r, 4, 1.0);
    let phi1 = SmoothFunction::standard_bump(0.0, 1.4);
    let phi2 = SmoothFunction::standard_bump(0.3, 1.2);
    let f = TensorFunction::product(vec![phi1, phi2])?;

    let mut ratios = Vec::new();
    let mut rows = Vec::new();
    for &eps in &epsilons {
        let t = Instant::now();
        let q = Operator::new(p.matrix() + &e * C64::new(eps, 0.0))?;
        let comm = p.matrix() * q.matrix() - q.matrix() * p.matrix();
        let comm_norm = norm2(&comm);
        let fpq = apply_multi(&f, &OperatorTuple::new(vec![p.clone(), q.clone()])?, &opts)?;
        let fqp = apply_multi(&f, &OperatorTuple::new(vec![q.clone(), p.clone()])?, &opts)?;
        let diff = norm2(&(&fpq.value - &fqp.value));
        let ratio = diff / comm_norm;
        ratios.push(ratio);
        rows.push(vec![eps, comm_norm, diff, ratio]);
        ck.scalar(
            format!("ratio/eps-{eps:.0e}"),
            CheckMode::Measured,
            ratio,
            0.0,
            0.0,
            f64::INFINITY,
            t,
        );
    }
    let t = Instant::now();
    let spread = ratios.iter().fold(0.0f64, |a, &b| a.max(b))
        / ratios.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    ck.scalar(
        "ratio/stability-across-eps",
        CheckMode::Measured,
        spread,
        1.0,
        spread,
        5.0,
        t,
    );

    // commuting pair: the difference collapses
    let t = Instant::now();
    let poly = p.matrix() * p.matrix() * C64::new(0.5, 0.0) + p.matrix() * C64::new(0.3, 0.0);
    let q = Operator::new(poly)?;
    let fpq = apply_multi(&f, &OperatorTuple::new(vec![p.clone(), q.clone()])?, &opts)?;
    let fqp = apply_multi(&f, &OperatorTuple::new(vec![q, p.clone()])?, &opts)?;
    let diff = norm2(&(&fpq.value - &fqp.value));
    ck.scalar(
        "commuting-pair/difference-vanishes",
        CheckMode::Oracle,
        diff,
        0.0,
        diff,
        1e-6 * cfg.tol_scale(),
        t,
    );

    // resolvent-level identity at one node pair:
    // [(z-P)^{-1}, (w-Q)^{-1}] = (z-P)^{-1}(w-Q)^{-1} [P,Q] (w-Q)^{-1}(z-P)^{-1}
    let t = Instant::now();
    let q = Operator::new(p.matrix() + &e * C64::new(0.05, 0.0))?;
    let z = C64::new(0.3, 0.7);
    let w = C64::new(-0.2, -0.4);
    let rp = p.resolvent(z)?;
    let rq = q.resolvent(w)?;
    let lhs = &rp * &rq - &rq * &rp;
    let comm = p.matrix() * q.matrix() - q.matrix() * p.matrix();
    let rhs = &rp * &rq * &comm * &rq * &rp;
    let err = norm2(&(&lhs - &rhs)) / norm2(&lhs).max(1e-300);
    ck.scalar(
        "resolvent-identity/node-pair",
        CheckMode::Oracle,
        norm2(&lhs),
        norm2(&rhs),
        err,
        1e-10,
        t,
    );

    write_csv(
        &out_dir(cfg).join("commutator.csv"),
        &["eps", "commutator_norm", "difference_norm", "ratio"],
        &rows,
    )?;
    Ok(ck.into_report("commutator", seed, cfg.resolved_json("commutator")))
}

// ---------------------------------------------------------------------------
// cayley: line calculus vs circle series
// ---------------------------------------------------------------------------

pub fn run_cayley_check(cfg: &ExperimentConfig) -> Result<Report> {
    let seed = cfg.seed();
    let ts = cfg.tol_scale();
    let mut r = rng::substream(seed, "cayley");
    let mut ck = Checker::new();
    let n_trunc = cfg.laurent_order.unwrap_or(64);

    for case in 0..cfg.cases() {
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.6))?;
        let b = p.cayley().unwrap();

        let t = Instant::now();
        let unit_dev = b
            .eigenvalues()
            .iter()
            .map(|l| (l.norm() - 1.0).abs())
            .fold(0.0f64, f64::max);
        ck.scalar(
            format!("case{case}/unit-circle-spectrum"),
            CheckMode::Oracle,
            unit_dev,
            0.0,
            unit_dev,
            1e-9,
            t,
        );

        let t = Instant::now();
        let back = b.inverse_cayley()?;
        let round = norm2(&(back.matrix() - p.matrix()));
        ck.scalar(
            format!("case{case}/roundtrip"),
            CheckMode::Oracle,
            round,
            0.0,
            round,
            1e-10,
            t,
        );

        let t = Instant::now();
        let id = apply_circle(&|theta| C64::from_polar(1.0, theta), &b, 16, 1e-8)?;
        let id_err = norm2(&(&id.value - b.matrix()));
        ck.scalar(
            format!("case{case}/identity-symbol"),
            CheckMode::Oracle,
            id_err,
            0.0,
            id_err,
            1e-9,
            t,
        );

        let t = Instant::now();
        let f = bump_near(&mut r, 0.0);
        let line = apply_single(&f, &p, &ApplyOptions::default())?;
        let sym = cayley_symbol(&f);
        let circ = apply_circle(&sym, &b, n_trunc, 1e-4)?;
        let dev = norm2(&(&line.value - &circ.value));
        ck.push(
            format!("case{case}/line-vs-circle"),
            CheckMode::ConsistencyOnly,
            mat_json(&circ.value),
            mat_json(&line.value),
            dev,
            1e-5 * ts,
            t,
            Some(line.diagnostics.node_count),
        );
        let t = Instant::now();
        ck.scalar(
            format!("case{case}/laurent-tail"),
            CheckMode::Measured,
            circ.tail_bound,
            0.0,
            circ.tail_bound,
            1e-4,
            t,
        );
    }
    Ok(ck.into_report("cayley", seed, cfg.resolved_json("cayley")))
}

// ---------------------------------------------------------------------------
// recovery: the generator from the homomorphism, plus the pole calculus
// ---------------------------------------------------------------------------

pub fn run_recovery(cfg: &ExperimentConfig) -> Result<Report> {
    let seed = cfg.seed();
    let ts = cfg.tol_scale();
    let mut r = rng::substream(seed, "recovery");
    let mut ck = Checker::new();

    // exact path on a fixed diagonal
    let t = Instant::now();
    let p = Operator::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)])?;
    let h = CalculusHomomorphism::from_operator_exact(&p);
    h.validate(seed, 1e-8)?;
    let rec = h.recover(C64::new(0.0, 1.0))?;
    let err = norm2(&(&rec - p.matrix()));
    ck.push(
        "recover/exact-diagonal",
        CheckMode::Oracle,
        mat_json(&rec),
        mat_json(p.matrix()),
        err,
        1e-10,
        t,
        None,
    );

    // z-independence on the exact path
    let t = Instant::now();
    let psym = Operator::new(rng::symmetric_gaussian(&mut r, 3, 1.5))?;
    let h = CalculusHomomorphism::from_operator_exact(&psym);
    let r1 = h.recover(C64::new(0.0, 1.0))?;
    let r2 = h.recover(C64::new(2.0, 3.0))?;
    let zdiff = norm2(&(&r1 - &r2));
    ck.scalar(
        "recover/z-independence",
        CheckMode::Oracle,
        zdiff,
        0.0,
        zdiff,
        1e-8,
        t,
    );

    // integral path
    let t = Instant::now();
    let hint = CalculusHomomorphism::from_operator_integral(&psym);
    let rec = hint.recover(C64::new(0.0, 1.0))?;
    let err = norm2(&(&rec - psym.matrix()));
    ck.push(
        "recover/integral-path",
        CheckMode::Oracle,
        mat_json(&rec),
        mat_json(psym.matrix()),
        err,
        1e-5 * ts,
        t,
        None,
    );

    // pole calculus: omega_i gives the resolvent on both paths
    let t = Instant::now();
    let zeta = C64::new(0.0, 1.0);
    let om = EFunction::omega(zeta)?;
    let exact = apply_e(&om, &psym, EPath::Exact, &ApplyOptions::default())?;
    let resv = psym.resolvent(zeta)?;
    let e_exact = norm2(&(&exact.value - &resv));
    ck.scalar(
        "pole-calculus/resolvent-exact",
        CheckMode::Oracle,
        e_exact,
        0.0,
        e_exact,
        1e-12,
        t,
    );
    let t = Instant::now();
    let integral = apply_e(&om, &psym, EPath::Integral, &ApplyOptions::default())?;
    let e_int = norm2(&(&integral.value - &resv));
    ck.push(
        "pole-calculus/resolvent-integral",
        CheckMode::Oracle,
        mat_json(&integral.value),
        mat_json(&resv),
        e_int,
        1e-4 * ts,
        t,
        Some(integral.diagnostics.node_count),
    );

    // multiplicativity on the pole family
    let t = Instant::now();
    let f1 = EFunction::omega(C64::new(0.0, 1.0))?;
    let f2 = EFunction::new(
        C64::new(0.0, 0.0),
        vec![PoleTerm {
            coeff: C64::new(1.0, 0.0),
            zeta: C64::new(0.0, 2.0),
            order: 1,
        }],
        SmoothFunction::standard_bump(0.0, 1.0),
    )?;
    let lhs = apply_e(&f1.multiply(&f2), &psym, EPath::Exact, &ApplyOptions::default())?;
    let rhs = apply_e(&f1, &psym, EPath::Exact, &ApplyOptions::default())?.value
        * apply_e(&f2, &psym, EPath::Exact, &ApplyOptions::default())?.value;
    let err = norm2(&(&lhs.value - &rhs));
    ck.scalar(
        "pole-calculus/multiplicative",
        CheckMode::Oracle,
        err,
        0.0,
        err,
        1e-6 * ts,
        t,
    );

    Ok(ck.into_report("recover", seed, cfg.resolved_json("recover")))
}

// ---------------------------------------------------------------------------
// composition: g(f(P)) = (g o f)(P)
// ---------------------------------------------------------------------------

pub fn run_composition(cfg: &ExperimentConfig) -> Result<Report> {
    let seed = cfg.seed();
    let ts = cfg.tol_scale();
    let mut r = rng::substream(seed, "composition");
    let mut ck = Checker::new();
    let opts = ApplyOptions::default();

    // f(x) = 2x/(x^2+1) in the pole family
    let f = EFunction::new(
        C64::new(0.0, 0.0),
        vec![
            PoleTerm {
                coeff: C64::new(-1.0, 0.0),
                zeta: C64::new(0.0, 1.0),
                order: 1,
            },
            PoleTerm {
                coeff: C64::new(-1.0, 0.0),
                zeta: C64::new(0.0, -1.0),
                order: 1,
            },
        ],
        SmoothFunction::zero(),
    )?;
    let g = SmoothFunction::standard_bump(0.6, 0.35);

    for case in 0..cfg.cases() {
        let t = Instant::now();
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.6))?;
        let pair = compose_calculus(&g, &f, &p, &opts)?;
        let dd = norm2(&(&pair.outer_of_inner - &pair.composite));
        ck.push(
            format!("case{case}/two-sides-agree"),
            CheckMode::ConsistencyOnly,
            mat_json(&pair.outer_of_inner),
            mat_json(&pair.composite),
            dd,
            1e-4 * ts,
            t,
        None,
        );
        let t = Instant::now();
        let oracle = p.eigen_oracle(&|x| g.eval_value(f.eval_value(x).re), 1e6)?;
        let dl = norm2(&(&pair.outer_of_inner - &oracle));
        let dr = norm2(&(&pair.composite - &oracle));
        ck.scalar(
            format!("case{case}/lhs-vs-eigen-oracle"),
            CheckMode::Oracle,
            dl,
            0.0,
            dl,
            1e-4 * ts,
            t,
        );
        ck.scalar(
            format!("case{case}/rhs-vs-eigen-oracle"),
            CheckMode::Oracle,
            dr,
            0.0,
            dr,
            1e-4 * ts,
            t,
        );
    }

    // zero outer function gives zero on both sides
    let t = Instant::now();
    let p = Operator::new(rng::symmetric_gaussian(&mut r, 3, 1.5))?;
    let pair = compose_calculus(&SmoothFunction::zero(), &f, &p, &opts)?;
    let z = norm2(&pair.outer_of_inner).max(norm2(&pair.composite));
    ck.scalar("degenerate/zero-outer", CheckMode::Oracle, z, 0.0, z, 0.0, t);

    Ok(ck.into_report("compose", seed, cfg.resolved_json("compose")))
}

// ---------------------------------------------------------------------------
// support scan: heatmaps of ||f_{a,b}(P1,P2)||, peaks vs the joint spectrum
// ---------------------------------------------------------------------------

pub fn run_support_scan(cfg: &ExperimentConfig) -> Result<Report> {
    let seed = cfg.seed();
    let ts = cfg.tol_scale();
    let mut r = rng::substream(seed, "support-scan");
    let mut ck = Checker::new();
    let opts = ApplyOptions::default();

    // commuting diagonal pair: peaks exactly at the joint spectrum
    let p1 = Operator::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)])?;
    let p2 = Operator::diagonal(&[C64::new(2.0, 0.0), C64::new(3.0, 0.0)])?;
    let tuple = OperatorTuple::new(vec![p1, p2])?;
    let js = tuple.joint_spectrum()?;
    let lat = cfg.lattice.unwrap_or([-0.5, 1.5, 1.5, 3.5, 0.5]);
    let (heat, rows) = scan_lattice(&tuple, lat, &opts)?;
    write_csv(
        &out_dir(cfg).join("support_scan_commuting.csv"),
        &["a", "b", "norm", "error_estimate"],
        &rows,
    )?;
    let t = Instant::now();
    // every joint-spectrum point is within one lattice cell of a peak
    let mut peak_err = 0.0f64;
    for pt in &js {
        let best = heat
            .iter()
            .filter(|(a, b, n, _)| {
                *n >= 0.5 && (a - pt[0]).abs() <= lat[4] && (b - pt[1]).abs() <= lat[4]
            })
            .count();
        if best == 0 {
            peak_err = 1.0;
        }
    }
    ck.scalar(
        "commuting/peaks-at-joint-spectrum",
        CheckMode::Oracle,
        peak_err,
        0.0,
        peak_err,
        0.0,
        t,
    );
    let t = Instant::now();
    let floor = heat
        .iter()
        .filter(|(a, b, _, _)| {
            js.iter()
                .all(|pt| (a - pt[0]).abs() > 0.7 || (b - pt[1]).abs() > 0.7)
        })
        .map(|(_, _, n, _)| *n)
        .fold(0.0f64, f64::max);
    ck.scalar(
        "commuting/off-spectrum-floor",
        CheckMode::Oracle,
        floor,
        0.0,
        floor,
        1e-6 * ts,
        t,
    );

    // product law for the commuting pair
    let t = Instant::now();
    let f = TensorFunction::product(vec![
        SmoothFunction::standard_bump(0.2, 1.1),
        SmoothFunction::standard_bump(2.3, 1.1),
    ])?;
    let g = TensorFunction::product(vec![
        SmoothFunction::standard_bump(0.4, 1.3),
        SmoothFunction::standard_bump(2.6, 1.2),
    ])?;
    let fg = TensorFunction::product(vec![
        SmoothFunction::multiply(
            f.terms[0].factors[0].clone(),
            g.terms[0].factors[0].clone(),
        ),
        SmoothFunction::multiply(
            f.terms[0].factors[1].clone(),
            g.terms[0].factors[1].clone(),
        ),
    ])?;
    let lhs = apply_multi(&fg, &tuple, &opts)?;
    let rhs = apply_multi(&f, &tuple, &opts)?.value * apply_multi(&g, &tuple, &opts)?.value;
    let prod_err = norm2(&(&lhs.value - &rhs));
    ck.scalar(
        "commuting/product-law",
        CheckMode::Oracle,
        prod_err,
        0.0,
        prod_err,
        1e-5 * ts,
        t,
    );

    // spectral mapping through polynomial tuples
    let t = Instant::now();
    let base = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.5))?;
    let q1 = Operator::new(base.matrix() * base.matrix())?;
    let q2 = Operator::new(base.matrix() * C64::new(2.0, 0.0) + identity(4) * C64::new(0.5, 0.0))?;
    let ptuple = OperatorTuple::new(vec![q1, q2])?;
    let got = ptuple.joint_spectrum()?;
    let mut want: Vec<Vec<f64>> = base
        .eigenvalues()
        .iter()
        .map(|l| vec![l.re * l.re, 2.0 * l.re + 0.5])
        .collect();
    want.sort_by(|x, y| {
        x.iter()
            .zip(y)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| !o.is_eq())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let map_err = if got.len() == want.len() {
        got.iter()
            .zip(&want)
            .flat_map(|(g, w)| g.iter().zip(w).map(|(x, y)| (x - y).abs()))
            .fold(0.0f64, f64::max)
    } else {
        f64::INFINITY
    };
    ck.scalar(
        "commuting/spectral-mapping",
        CheckMode::Oracle,
        map_err,
        0.0,
        map_err,
        1e-8,
        t,
    );

    // the rotated-projector pair: all four product points light up
    let fx = perturbation_fixture(0.1)?;
    let nc = OperatorTuple::new(vec![fx.a, fx.a_eps])?;
    let lat2 = [-0.5, 1.5, -0.5, 1.5, 0.5];
    let (heat2, rows2) = scan_lattice(&nc, lat2, &opts)?;
    write_csv(
        &out_dir(cfg).join("support_scan_noncommuting.csv"),
        &["a", "b", "norm", "error_estimate"],
        &rows2,
    )?;
    let t = Instant::now();
    let mut missing = 0usize;
    for &a in &[0.0, 1.0] {
        for &b in &[0.0, 1.0] {
            let lit = heat2.iter().any(|(x, y, n, _)| {
                (x - a).abs() < 0.26 && (y - b).abs() < 0.26 && *n > 1e-3
            });
            if !lit {
                missing += 1;
            }
        }
    }
    ck.scalar(
        "noncommuting/four-product-peaks",
        CheckMode::Oracle,
        missing as f64,
        0.0,
        missing as f64,
        0.0,
        t,
    );

    Ok(ck.into_report("support-scan", seed, cfg.resolved_json("support-scan")))
}

type HeatRow = (f64, f64, f64, f64);

fn scan_lattice(
    tuple: &OperatorTuple,
    lat: [f64; 5],
    opts: &ApplyOptions,
) -> Result<(Vec<HeatRow>, Vec<Vec<f64>>)> {
    let [a0, a1, b0, b1, step] = lat;
    let na = ((a1 - a0) / step).round() as usize + 1;
    let nb = ((b1 - b0) / step).round() as usize + 1;
    // factor results cached per center: the scan is a product of two
    // single-operator calculi per lattice point
    let bump = |c: f64| SmoothFunction::standard_bump(c, 0.26);
    let mut left = Vec::with_capacity(na);
    let mut lefterr = Vec::with_capacity(na);
    for i in 0..na {
        let a = a0 + step * i as f64;
        let res = apply_single(&bump(a), tuple.op(0), opts)?;
        left.push(res.value);
        lefterr.push(res.error_estimate);
    }
    let mut right = Vec::with_capacity(nb);
    let mut righterr = Vec::with_capacity(nb);
    for j in 0..nb {
        let b = b0 + step * j as f64;
        let res = apply_single(&bump(b), tuple.op(1), opts)?;
        right.push(res.value);
        righterr.push(res.error_estimate);
    }
    let mut heat = Vec::with_capacity(na * nb);
    let mut rows = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            let a = a0 + step * i as f64;
            let b = b0 + step * j as f64;
            let val = &left[i] * &right[j];
            let n = norm2(&val);
            let err = lefterr[i] * norm2(&right[j]) + righterr[j] * norm2(&left[i]);
            heat.push((a, b, n, err));
            rows.push(vec![a, b, n, err]);
        }
    }
    Ok((heat, rows))
}

// ---------------------------------------------------------------------------
// convergence: dbar decay slopes, the Cauchy-Green identity, error-vs-node
// curves, determinism, and the honesty of the error estimates
// ---------------------------------------------------------------------------

pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Report> {
    let seed = cfg.seed();
    let mut r = rng::substream(seed, "convergence");
    let mut ck = Checker::new();

    // dbar decay: least-squares slope of log2 sup|dbar| over y = 2^-4..2^-9
    let wide = SmoothFunction::standard_bump(0.0, 2.5);
    let t = Instant::now();
    let fo = extend_fourier(&wide, Some(FrequencyGrid::new(550.0, 0.05)))?;
    let table_f = dbar_decay_table(&fo, 4..=9);
    let slope_f = least_squares_slope(&table_f);
    ck.scalar(
        "dbar-decay/fourier-slope",
        CheckMode::Measured,
        slope_f,
        4.0,
        if slope_f >= 4.0 { 0.0 } else { 4.0 - slope_f },
        0.0,
        t,
    );
    let t = Instant::now();
    let ta = extend_taylor(&wide, 8, 1.0)?;
    let table_t = dbar_decay_table(&ta, 4..=9);
    let slope_t = least_squares_slope(&table_t);
    ck.scalar(
        "dbar-decay/taylor-slope",
        CheckMode::Measured,
        slope_t,
        4.0,
        if slope_t >= 4.0 { 0.0 } else { 4.0 - slope_t },
        0.0,
        t,
    );
    let decay_rows: Vec<Vec<f64>> = table_f
        .iter()
        .zip(&table_t)
        .map(|(&(ly, lf), &(_, lt))| vec![2.0f64.powf(ly), 2.0f64.powf(lf), 2.0f64.powf(lt)])
        .collect();
    write_csv(
        &out_dir(cfg).join("dbar_decay.csv"),
        &["y", "sup_dbar_fourier", "sup_dbar_taylor"],
        &decay_rows,
    )?;

    // Cauchy-Green identity at a fine layout
    let f = SmoothFunction::standard_bump(0.0, 1.0);
    let ext = extend_fourier(&f, Some(FrequencyGrid::default()))?;
    let one = CMatrix::from_row_slice(1, 1, &[C64::new(1.0, 0.0)]);
    let w0 = C64::new(0.3, 0.001);
    let kernel = |z: C64| &one * (z - w0).inv();
    let t = Instant::now();
    let fine = QuadratureSpec {
        nx: 48,
        ny: 14,
        order: 10,
        ..QuadratureSpec::default_plane(-1.5, 1.5)
    };
    let res = integrate_plane(&|z| ext.dbar(z), &kernel, 1, &fine);
    let lhs = res.value[(0, 0)] * C64::new(-1.0 / PI, 0.0);
    let cg_err = (lhs - ext.value(w0)).norm();
    ck.scalar(
        "cauchy-green/identity",
        CheckMode::Oracle,
        lhs.re,
        ext.value(w0).re,
        cg_err,
        1e-6 * cfg.tol_scale(),
        t,
    );

    // error vs nodes on the Cauchy-Green task; slope from the resolved tail
    let t = Instant::now();
    let mut curve = Vec::new();
    let mut spec = QuadratureSpec {
        nx: 6,
        ny: 8,
        order: 8,
        ..QuadratureSpec::default_plane(-1.5, 1.5)
    };
    for _ in 0..5 {
        let res = integrate_plane(&|z| ext.dbar(z), &kernel, 1, &spec);
        let lhs = res.value[(0, 0)] * C64::new(-1.0 / PI, 0.0);
        let err = (lhs - ext.value(w0)).norm().max(1e-16);
        curve.push(vec![res.node_count as f64, err, res.error_estimate]);
        spec = QuadratureSpec {
            nx: spec.nx * 2,
            ny: spec.ny + 2,
            ..spec
        };
    }
    write_csv(
        &out_dir(cfg).join("convergence_cg.csv"),
        &["nodes", "true_error", "error_estimate"],
        &curve,
    )?;
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|row| row[1] > 1e-14)
        .map(|row| (row[0].ln(), row[1].ln()))
        .collect();
    let slope = -least_squares_slope(&pts[pts.len().saturating_sub(3)..]);
    ck.scalar(
        "cauchy-green/convergence-slope",
        CheckMode::Measured,
        slope,
        4.0,
        if slope >= 4.0 { 0.0 } else { 4.0 - slope },
        0.0,
        t,
    );

    // zero integrand stays exactly zero along the whole ladder
    let t = Instant::now();
    let zspec = QuadratureSpec::default_plane(-1.0, 1.0);
    let zres = integrate_plane(&|_| C64::new(0.0, 0.0), &|_| one.clone(), 1, &zspec);
    ck.scalar(
        "degenerate/zero-integrand",
        CheckMode::Oracle,
        zres.value[(0, 0)].re,
        0.0,
        zres.value[(0, 0)].norm(),
        0.0,
        t,
    );

    // determinism: bit-identical reruns
    let t = Instant::now();
    let spec = QuadratureSpec::default_plane(-1.5, 1.5);
    let a = integrate_plane(&|z| ext.dbar(z), &kernel, 1, &spec);
    let b = integrate_plane(&|z| ext.dbar(z), &kernel, 1, &spec);
    let identical = a.value == b.value && a.error_estimate == b.error_estimate;
    ck.scalar(
        "determinism/bit-identical-rerun",
        CheckMode::Oracle,
        if identical { 0.0 } else { 1.0 },
        0.0,
        if identical { 0.0 } else { 1.0 },
        0.0,
        t,
    );

    // honest error estimates across oracle-checkable randomized cases
    let t = Instant::now();
    let mut honest = 0usize;
    let mut total = 0usize;
    let opts = ApplyOptions::default();
    for _ in 0..10 {
        let lambda = rng::uniform_in(&mut r, -1.5, 1.5);
        let fb = bump_near(&mut r, lambda);
        let p = Operator::from_real(&[&[lambda]])?;
        let res = apply_single(&fb, &p, &opts)?;
        let true_err = (res.value[(0, 0)] - fb.eval_value(lambda)).norm();
        if true_err <= 10.0 * res.error_estimate {
            honest += 1;
        }
        total += 1;
    }
    for n in [3usize, 4] {
        for _ in 0..5 {
            let p = Operator::new(rng::symmetric_gaussian(&mut r, n, 1.5))?;
            let fb = bump_near(&mut r, 0.0);
            let res = apply_single(&fb, &p, &opts)?;
            let oracle = p.eigen_oracle(&|x| fb.eval_value(x), 1e6)?;
            let true_err = norm2(&(&res.value - &oracle));
            if true_err <= 10.0 * res.error_estimate {
                honest += 1;
            }
            total += 1;
        }
    }
    let frac = honest as f64 / total as f64;
    ck.scalar(
        "error-estimates/honest-fraction",
        CheckMode::Measured,
        frac,
        0.95,
        if frac >= 0.95 { 0.0 } else { 0.95 - frac },
        0.0,
        t,
    );

    // two-variable eigen-oracle agreement at the default pair layout
    let t = Instant::now();
    let p1 = Operator::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(-0.5, 0.0)])?;
    let p2 = Operator::diagonal(&[C64::new(0.5, 0.0), C64::new(-1.0, 0.0), C64::new(0.2, 0.0)])?;
    let tuple = OperatorTuple::new(vec![p1, p2])?;
    let tf = TensorFunction::product(vec![
        SmoothFunction::standard_bump(0.2, 1.4),
        SmoothFunction::standard_bump(-0.2, 1.4),
    ])?;
    let multi = apply_multi(&tf, &tuple, &opts)?;
    let oracle = tuple.eigen_oracle(
        &|x: &[f64]| {
            tf.terms[0].factors[0].eval_value(x[0]) * tf.terms[0].factors[1].eval_value(x[1])
        },
        1e6,
    )?;
    let err2 = norm2(&(&multi.value - &oracle));
    ck.push(
        "pair/eigen-oracle",
        CheckMode::Oracle,
        mat_json(&multi.value),
        mat_json(&oracle),
        err2,
        1e-5 * cfg.tol_scale(),
        t,
        Some(multi.diagnostics.node_count),
    );

    Ok(ck.into_report("convergence", seed, cfg.resolved_json("convergence")))
}

// ---------------------------------------------------------------------------
// one-shot apply for the CLI
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Smooth(SmoothFunction),
    Pole(EFunction),
    Tensor(TensorFunction),
}

pub fn load_function(path: &Path) -> Result<FunctionSpec> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_operators(path: &Path) -> Result<Vec<CMatrix>> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    if v.as_array().map_or(false, |a| a.first().map_or(false, |x| x.is_array() && x[0].is_array() && x[0][0].is_array())) {
        crate::jsonfmt::tuple_from_json(&v)
    } else {
        Ok(vec![crate::jsonfmt::matrix_from_json(&v)?])
    }
}

#[derive(Debug, serde::Serialize)]
pub struct ApplyOutput {
    pub value: serde_json::Value,
    pub error_estimate: f64,
    pub method: String,
    pub node_count: u64,
    pub warnings: Vec<String>,
}

pub fn run_apply(
    spec: &FunctionSpec,
    mats: Vec<CMatrix>,
    taylor: bool,
    exact_poles: bool,
    quad: Option<QuadratureSpec>,
) -> Result<ApplyOutput> {
    let opts = ApplyOptions {
        taylor,
        spec: quad,
        grid: None,
    };
    let res = match spec {
        FunctionSpec::Smooth(f) => {
            let p = Operator::new(mats.into_iter().next().ok_or(crate::Error::NotSquare)?)?;
            apply_single(f, &p, &opts)?
        }
        FunctionSpec::Pole(f) => {
            let p = Operator::new(mats.into_iter().next().ok_or(crate::Error::NotSquare)?)?;
            let path = if exact_poles { EPath::Exact } else { EPath::Integral };
            apply_e(f, &p, path, &opts)?
        }
        FunctionSpec::Tensor(f) => {
            let ops = mats
                .into_iter()
                .map(Operator::new)
                .collect::<Result<Vec<_>>>()?;
            let tuple = OperatorTuple::new(ops)?;
            apply_multi(f, &tuple, &opts)?
        }
    };
    Ok(ApplyOutput {
        value: mat_json(&res.value),
        error_estimate: res.error_estimate,
        method: format!("{:?}", res.method).to_lowercase(),
        node_count: res.diagnostics.node_count,
        warnings: res.diagnostics.warnings,
    })
}

/// Ordered-permutation apply used by tests of the CLI surface.
pub fn run_apply_ordered(
    f: &TensorFunction,
    mats: Vec<CMatrix>,
    order: &[usize],
) -> Result<ApplyOutput> {
    let ops = mats
        .into_iter()
        .map(Operator::new)
        .collect::<Result<Vec<_>>>()?;
    let tuple = OperatorTuple::new(ops)?;
    let res = apply_ordered(f, &tuple, order, &ApplyOptions::default())?;
    Ok(ApplyOutput {
        value: mat_json(&res.value),
        error_estimate: res.error_estimate,
        method: format!("{:?}", res.method).to_lowercase(),
        node_count: res.diagnostics.node_count,
        warnings: res.diagnostics.warnings,
    })
}
