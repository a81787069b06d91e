//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them).  Tolerances are pinned constants.
//!
//! Criteria 2 and 4 contain checks that are mathematically unattainable for
//! the assembled operators; those tests fail honestly with the measured
//! numbers and a pointer to the analysis rather than loosening the gate.

use nalgebra::DVector;
use once_cell::sync::Lazy;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sclifford::basis::l2_norm_sq_f64;
use sclifford::beltrami::{
    contraction_precheck, pi_norm_for, solve_fixed_point, BeltramiMode, BeltramiProblem,
    BeltramiSolution, BeltramiStart, BeltramiVariant, PhiSpec, QCoeff,
};
use sclifford::clifford::{Involution, Multivector};
use sclifford::identities::{verify_identity, IdentityTag};
use sclifford::mesh::{CapMesh, MeshFunction};
use sclifford::norms::{norms_report, operator_norm_l2};
use sclifford::operators::{OperatorEngine, OperatorTag};
use sclifford::poly::{CliffordPolynomial, DiffOp};
use sclifford::quadrature::{
    borel_pompeiu_study, cauchy_transform_quad, pi_s0_quad, PiQuadScheme,
};
use sclifford::report::canonical_json;
use sclifford::scalar::{qi, sphere_area, Q};
use sclifford::spectra::spectrum;
use std::time::Instant;

type P = CliffordPolynomial<Q>;

const TOL_EXACT_FLOAT: f64 = 1e-10;
const TOL_SPECTRUM_DS: f64 = 1e-8;
const TOL_BP: f64 = 1e-2;
const TOL_PI_QUAD: f64 = 5e-2;
const TOL_LP_MARGIN: f64 = 1e-2;

static ENG2: Lazy<OperatorEngine> = Lazy::new(|| OperatorEngine::new(2, 6).unwrap());
static ENG3: Lazy<OperatorEngine> = Lazy::new(|| OperatorEngine::new(3, 6).unwrap());

fn engine_for(n: usize) -> &'static OperatorEngine {
    match n {
        2 => &ENG2,
        3 => &ENG3,
        _ => unreachable!(),
    }
}

fn random_mv(rng: &mut ChaCha8Rng, n: usize) -> Multivector<Q> {
    let mut mv = Multivector::zero(n);
    for blade in 0..(1u16 << n) {
        let c = rng.gen_range(-3..=3i64);
        if c != 0 {
            mv.add_term(blade, qi(c));
        }
    }
    mv
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_deg: usize) -> P {
    let mut p = P::zero(n);
    for _ in 0..10 {
        let mut expo = vec![0u8; n + 1];
        let mut left = rng.gen_range(0..=max_deg);
        for j in 0..=n {
            let a = rng.gen_range(0..=left);
            expo[j] = a as u8;
            left -= a;
        }
        p.add_term(expo, random_mv(rng, n));
    }
    p
}

#[test]
fn acceptance_1_exact_algebra() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for n in [2usize, 3] {
        let xbar = P::paravector_variable(n).bar_coeffwise();
        for _ in 0..20 {
            let a = random_mv(&mut rng, n);
            let b = random_mv(&mut rng, n);
            let ab = a.product(&b);
            // reversion and conjugation are anti-automorphisms
            assert_eq!(ab.reversion(), b.reversion().product(&a.reversion()));
            assert_eq!(ab.conjugation(), b.conjugation().product(&a.conjugation()));
            // bar (their composition, sign (-1)^k) is an automorphism
            assert_eq!(ab.bar(), a.bar().product(&b.bar()));
            // paravector identity bar(x) x = |x|^2
            let x = Multivector::paravector(
                n,
                &(0..=n)
                    .map(|_| qi(rng.gen_range(-4..=4i64)))
                    .collect::<Vec<_>>(),
            );
            let sq = x.bar().product(&x);
            assert_eq!(sq, Multivector::scalar(n, x.norm_sq()));
        }
        for _ in 0..12 {
            let p = random_poly(&mut rng, n, 5);
            // Gamma_0 = bar(x) D_0 - E_r, exact
            let lhs = p.apply_diff_op(DiffOp::Gamma0);
            let rhs =
                &xbar.multiply(&p.apply_diff_op(DiffOp::D0)) - &p.apply_diff_op(DiffOp::Er);
            assert_eq!(lhs, rhs);
            // Delta = D_0 conj(D_0), exact
            let lap = p.apply_diff_op(DiffOp::Laplacian);
            let composed = p.apply_diff_op(DiffOp::D0Bar).apply_diff_op(DiffOp::D0);
            assert_eq!(lap, composed);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "runtime {elapsed:?} exceeds 30 s");
    println!(
        "ACCEPTANCE 1 [exact algebra]: PASS (anti-automorphism laws for reversion/conjugation, \
         automorphism law for bar, bar(x)x = |x|^2, Gamma0 = bar(x)D0 - Er, Delta = D0 D0bar; \
         zero residual, {elapsed:?})"
    );
}

#[test]
fn acceptance_2_operator_identities() {
    let start = Instant::now();
    let mut failures: Vec<String> = Vec::new();
    let mut worst_ok = 0.0f64;
    let mut checked = 0usize;
    for n in [2usize, 3] {
        let full = engine_for(n);
        for trunc in [4usize, 5, 6] {
            let engine;
            let eng = if trunc == 6 {
                full
            } else {
                engine = full.restricted(trunc).unwrap();
                &engine
            };
            for tag in IdentityTag::ALL {
                let rep = verify_identity(eng, tag).unwrap();
                checked += 1;
                match rep.residual {
                    Some(r) if r < TOL_EXACT_FLOAT => worst_ok = worst_ok.max(r),
                    Some(r) => failures.push(format!(
                        "{} at n={n} N={trunc}: residual {r:.3e}",
                        rep.identity
                    )),
                    None => failures.push(format!(
                        "{} at n={n} N={trunc}: {}",
                        rep.identity, rep.status
                    )),
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "runtime {elapsed:?} exceeds 2 min");
    if failures.is_empty() {
        println!(
            "ACCEPTANCE 2 [operator identities]: PASS ({checked} identity/(n,N) combinations, \
             max residual {worst_ok:.3e} < 1e-10, {elapsed:?})"
        );
    } else {
        println!(
            "ACCEPTANCE 2 [operator identities]: FAIL ({} of {checked} combinations; passing \
             ones have max residual {worst_ok:.3e} < 1e-10; failing: {}; {elapsed:?})",
            failures.len(),
            failures.join("; ")
        );
        panic!(
            "the pairing identity has no realization at n = 2: the factor Ds - w annihilates \
             bar(x) Cl_2 exactly, so Pi_{{s,0}} is singular there and \
             <Pi_{{s,0}} f, Pi_s^+ g> = <f, g> cannot hold; every other identity passes at \
             1e-10. Details: {failures:?}"
        );
    }
}

#[test]
fn acceptance_3_spectra() {
    for n in [2usize, 3] {
        let eng = engine_for(n);
        // Gamma_0 per degree block: {-m} u {n+m-1}
        let g = spectrum(eng, OperatorTag::Gamma0).unwrap();
        assert!(
            g.max_residual < TOL_EXACT_FLOAT,
            "gamma0 spectrum residual {} at n={n}",
            g.max_residual
        );
        // Dirac and Cauchy transforms: Gram singular spectrum vs +-(m + n/2)
        let ds = spectrum(eng, OperatorTag::Ds).unwrap();
        assert!(
            ds.max_residual < TOL_SPECTRUM_DS,
            "ds singular spectrum residual {} at n={n}",
            ds.max_residual
        );
        let t = spectrum(eng, OperatorTag::T).unwrap();
        assert!(
            t.max_residual < TOL_SPECTRUM_DS,
            "t singular spectrum residual {} at n={n}",
            t.max_residual
        );
        // reciprocal consistency, elementwise per degree block
        for (bd, bt) in ds.blocks.iter().zip(&t.blocks) {
            let mut recip: Vec<f64> = bd.eigenvalues.iter().map(|v| 1.0 / v).collect();
            recip.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut got = bt.eigenvalues.clone();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in recip.iter().zip(&got) {
                assert!(
                    (a - b).abs() < TOL_SPECTRUM_DS,
                    "reciprocal mismatch at n={n} degree {}",
                    bd.degree
                );
            }
        }
        // spherical Laplacian: angular quadratic covers m <= 5 at full
        // exactness, the composition covers m <= 4
        let dq = spectrum(eng, OperatorTag::DeltaSGamma).unwrap();
        for b in dq.blocks.iter().filter(|b| b.degree <= 5) {
            assert!(
                b.residual < TOL_EXACT_FLOAT,
                "delta_s quadratic residual {} at n={n} m={}",
                b.residual,
                b.degree
            );
        }
        let dc = spectrum(eng, OperatorTag::DeltaS).unwrap();
        for b in dc.blocks.iter().filter(|b| b.degree <= 4) {
            assert!(
                b.residual < TOL_EXACT_FLOAT,
                "delta_s composition residual {} at n={n} m={}",
                b.residual,
                b.degree
            );
        }
    }
    println!(
        "ACCEPTANCE 3 [spectra]: PASS (Gamma0 blocks match {{-m}} u {{n+m-1}} < 1e-10; \
         Ds/T Gram singular spectra match |+-(m+n/2)| and reciprocals < 1e-8; \
         Delta_s matches -m^2 - m(n-1) - (n^2/4 - n/2) < 1e-10 for m <= 5; n in {{2,3}}; \
         note: Ds/T are not normal on the truncation, raw eigenvalues differ -- see reports)"
    );
}

#[test]
fn acceptance_4_pi_s1_isometry() {
    let mut all_ok = true;
    let mut summary = String::new();
    for n in [2usize, 3] {
        let eng = engine_for(n);
        let pi1 = eng.operator(OperatorTag::Pi1).unwrap();
        let basis = eng.basis();
        let idx = basis.indices_up_to_degree(pi1.valid_degree());
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for _ in 0..200 {
            let mut u = DVector::zeros(basis.dim());
            for &i in &idx {
                u[i] = rng.gen_range(-1.0..1.0);
            }
            let ratio = basis.norm(&pi1.apply(&u)) / basis.norm(&u);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            if (ratio - 1.0).abs() > TOL_EXACT_FLOAT {
                all_ok = false;
            }
        }
        // matrix form residual
        let g = basis.gram();
        let lhs = pi1.matrix.transpose() * g * &pi1.matrix;
        let mut worst = 0.0f64;
        for &i in &idx {
            for &j in &idx {
                worst = worst.max((lhs[(i, j)] - g[(i, j)]).abs());
            }
        }
        summary.push_str(&format!(
            "n={n}: ratios in [{lo:.6}, {hi:.6}], |Pi1^T G Pi1 - G| = {worst:.3e}; "
        ));
    }
    if all_ok {
        println!("ACCEPTANCE 4 [Pi_s1 isometry]: PASS ({summary})");
    } else {
        println!(
            "ACCEPTANCE 4 [Pi_s1 isometry]: FAIL ({summary}tolerance 1e-10). The composition \
             DsBar T is not an L2 isometry: DsBar scales cleanly only on the eigenspaces of \
             the barred angular operator while T produces eigenvectors of the unbarred one, \
             and the two gradings differ.  Exact counterexample at n=2: \
             |Pi1(1)| / |1| = sqrt(11/3) = 1.914854..., reproduced above to machine precision."
        );
        panic!(
            "Pi_{{s,1}} = DsBar T is not an isometry on the truncated space; {summary}see \
             docs/verification-notes.md"
        );
    }
}

#[test]
fn acceptance_5_norm_bounds() {
    // spectral norms
    for n in [2usize, 3] {
        let eng = engine_for(n);
        let rep = norms_report(eng).unwrap();
        assert!(
            (rep.t_norm - 2.0 / n as f64).abs() < 1e-9,
            "T norm {} != 2/n at n={n}",
            rep.t_norm
        );
        assert!(rep.t_norm <= rep.t_lp_bound + 1e-12, "T norm above omega bound");
        if n == 2 {
            assert!(
                rep.pi_s0_norm <= 2.0 + 1e-9,
                "Pi_s0 norm {} above 2 at n=2",
                rep.pi_s0_norm
            );
        }
        println!(
            "  norms n={n}: |T| = {:.12} (= 2/n), |Pi_s0| = {:.12} vs bounds 1+4/n^2 = {:.6}, \
             1+2/n = {:.6}; |Pi_s1| = {:.12}",
            rep.t_norm, rep.pi_s0_norm, rep.pi_s0_bound_square, rep.pi_s0_bound_triangle,
            rep.pi_s1_norm
        );
    }
    // empirical quadrature L^p ratios at n = 2
    let mesh = CapMesh::whole_sphere(0.08).unwrap();
    let targets: Vec<Multivector<f64>> = mesh.interior.iter().map(|n| n.point.clone()).collect();
    let bound = sphere_area(1) / 4.0 + TOL_LP_MARGIN;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let f = random_poly(&mut rng, 2, 3).to_f64();
        let fv = MeshFunction::sample(mesh.interior.iter().map(|n| n.point.clone()), |p| {
            f.evaluate(p)
        });
        if fv.max_norm() == 0.0 {
            continue;
        }
        let tf = cauchy_transform_quad(&mesh, &fv, &targets);
        for p in [2.0f64, 4.0] {
            let ratio = tf.lp_norm(&mesh, p) / fv.lp_norm(&mesh, p);
            worst = worst.max(ratio);
            assert!(
                ratio <= bound,
                "L^{p} ratio {ratio} exceeds omega_1/4 + 1e-2 = {bound}"
            );
        }
    }
    println!(
        "ACCEPTANCE 5 [norm bounds]: PASS (|T| = 2/n exactly and <= omega_(n-1)/4; \
         |Pi_s0| <= 2 at n=2 and reported against both bounds at n=3; \
         empirical L^p ratios for T max {worst:.4} <= {bound:.4} over 50 random polynomials)"
    );
}

#[test]
fn acceptance_6_borel_pompeiu() {
    let start = Instant::now();
    let theta = std::f64::consts::PI / 3.0;
    let spacings = [0.08, 0.04, 0.02];
    let e1 = Multivector::basis_vector(2, 1);
    let e12 = Multivector::basis_vector(2, 1).product(&Multivector::basis_vector(2, 2));
    let deg1 = &P::variable(2, 0) + &P::variable(2, 1).mul_const_left(&e1);
    let deg2 = &(&P::variable(2, 0) * &P::variable(2, 1))
        + &(&P::variable(2, 2) * &P::variable(2, 2)).mul_const_left(&e12);
    let mut lines = String::new();
    for (label, f) in [("constant", P::one(2)), ("degree-1", deg1), ("degree-2", deg2)] {
        let rows = borel_pompeiu_study(&f, [1.0, 0.0, 0.0], theta, &spacings).unwrap();
        let last = rows.last().unwrap();
        assert!(
            last.residual <= TOL_BP,
            "{label}: BP residual {} at h=0.02 exceeds 1e-2",
            last.residual
        );
        let first = &rows[0];
        let ladder_order =
            (first.residual / last.residual).ln() / (first.h / last.h).ln();
        assert!(
            ladder_order >= 1.0,
            "{label}: observed order {ladder_order} below 1 across the ladder"
        );
        lines.push_str(&format!(
            "{label}: residuals {:.2e}/{:.2e}/{:.2e}, ladder order {:.2}; ",
            rows[0].residual, rows[1].residual, rows[2].residual, ladder_order
        ));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 180, "runtime {elapsed:?} exceeds 3 min");
    println!("ACCEPTANCE 6 [Borel-Pompeiu on caps]: PASS ({lines}{elapsed:?})");
}

#[test]
fn acceptance_7_pi_quad_vs_spectral() {
    let eng = engine_for(2);
    let pi0 = eng.operator(OperatorTag::Pi0).unwrap();
    let mesh = CapMesh::whole_sphere(0.02).unwrap();
    let stride = (mesh.interior.len() / 150).max(1);
    let targets: Vec<Multivector<f64>> = mesh
        .interior
        .iter()
        .step_by(stride)
        .map(|nd| nd.point.clone())
        .collect();
    let e1 = Multivector::basis_vector(2, 1);
    let e12 = Multivector::basis_vector(2, 1).product(&Multivector::basis_vector(2, 2));
    let inputs: Vec<(&str, P)> = vec![
        ("one", P::one(2)),
        ("e12", P::constant(e12)),
        ("x0", P::variable(2, 0)),
        ("x1 e1", P::variable(2, 1).mul_const_left(&e1)),
    ];
    let mut worst = 0.0f64;
    let mut lines = String::new();
    for (label, f) in inputs {
        let ff = f.to_f64();
        let coords = eng.basis().expand_exact(&f).unwrap().coords;
        let spec = eng.basis().synth(&pi0.apply(&coords));
        let f_nodes = MeshFunction::sample(mesh.interior.iter().map(|nd| nd.point.clone()), |p| {
            ff.evaluate(p)
        });
        let f_targets = MeshFunction::sample(targets.iter().cloned(), |p| ff.evaluate(p));
        let quad = pi_s0_quad(&mesh, &f_nodes, &targets, PiQuadScheme::Stabilized, &f_targets);
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for (w, qv) in targets.iter().zip(&quad.values) {
            let sv = spec.evaluate(w);
            diff = diff.max((&sv - qv).norm());
            scale = scale.max(sv.norm()).max(ff.evaluate(w).norm());
        }
        let rel = diff / scale.max(1e-12);
        worst = worst.max(rel);
        lines.push_str(&format!("{label}: {rel:.4}; "));
        assert!(
            rel <= TOL_PI_QUAD,
            "{label}: quadrature deviation {rel} exceeds 5e-2 at h=0.02"
        );
    }
    println!(
        "ACCEPTANCE 7 [Pi_s0 integral vs spectral]: PASS (principal-value evaluation of the \
         explicit kernels on the whole sphere, h=0.02; relative deviations {lines}all <= 5e-2)"
    );
}

#[test]
fn acceptance_8_beltrami() {
    // (a) q = 0 returns f = phi in one iteration
    let eng = engine_for(2);
    let zero_problem = BeltramiProblem {
        variant: BeltramiVariant::S0,
        mode: BeltramiMode::Spectral { engine: eng },
        q: QCoeff::Constant(Multivector::zero(2)),
        phi: PhiSpec::Zero,
        tolerance: 1e-10,
        max_iterations: 5,
    };
    let r0 = solve_fixed_point(&zero_problem, None).unwrap();
    assert_eq!(r0.iterations, 1, "q = 0 must converge in one iteration");

    // (b) spectral contraction at rate <= |q| |Pi| + 0.05, random start
    let mut q_mv = Multivector::zero(2);
    q_mv.add_term(1, 0.2);
    let spectral_problem = BeltramiProblem {
        variant: BeltramiVariant::S0,
        mode: BeltramiMode::Spectral { engine: eng },
        q: QCoeff::Constant(q_mv),
        phi: PhiSpec::Zero,
        tolerance: 1e-9,
        max_iterations: 80,
    };
    let pi_norm = pi_norm_for(&spectral_problem).unwrap();
    let pre = contraction_precheck(&spectral_problem, pi_norm);
    assert!(pre.pass, "precheck must pass for |q| = 0.2");
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let dim = eng.basis().dim();
    let start = BeltramiStart::Spectral(DVector::from_fn(dim, |_, _| rng.gen_range(-0.1..0.1)));
    let rb = solve_fixed_point(&spectral_problem, Some(&start)).unwrap();
    let h_norm = match &rb.solution {
        BeltramiSolution::Spectral { h, .. } => eng.basis().norm(h),
        _ => unreachable!(),
    };
    assert!(h_norm < 1e-7, "spectral fixed point must be zero, |h| = {h_norm}");
    let rate = rb.observed_rate.unwrap_or(0.0);
    let rate_bound = pre.q_inf * pi_norm + 0.05;
    assert!(rate <= rate_bound, "rate {rate} above {rate_bound}");

    // (c) cap demo: theta_c = pi/3, q = 0.1, exterior-pole seed
    let mesh = CapMesh::build([1.0, 0.0, 0.0], std::f64::consts::PI / 3.0, 0.05).unwrap();
    let cap_problem = BeltramiProblem {
        variant: BeltramiVariant::S0,
        mode: BeltramiMode::Quadrature { mesh: &mesh },
        q: QCoeff::Constant(Multivector::scalar(2, 0.1)),
        phi: PhiSpec::CauchyKernel {
            pole: Multivector::paravector(2, &[-1.0, 0.0, 0.0]),
        },
        tolerance: 1e-8,
        max_iterations: 50,
    };
    let pi_norm_cap = pi_norm_for(&cap_problem).unwrap();
    let pre_cap = contraction_precheck(&cap_problem, pi_norm_cap);
    assert!(pre_cap.pass);
    let rc = solve_fixed_point(&cap_problem, None).unwrap();
    assert!(
        rc.final_fixed_point_residual <= 1e-6,
        "cap residual {}",
        rc.final_fixed_point_residual
    );
    assert!(rc.iterations <= 50);

    // (d) two random starts agree to 10 tolerance
    let tol = 1e-9;
    let strict = BeltramiProblem {
        tolerance: tol,
        max_iterations: 120,
        ..{
            BeltramiProblem {
                variant: BeltramiVariant::S0,
                mode: BeltramiMode::Quadrature { mesh: &mesh },
                q: QCoeff::Constant(Multivector::scalar(2, 0.1)),
                phi: PhiSpec::CauchyKernel {
                    pole: Multivector::paravector(2, &[-1.0, 0.0, 0.0]),
                },
                tolerance: tol,
                max_iterations: 120,
            }
        }
    };
    let s1 = BeltramiStart::Quadrature(MeshFunction {
        values: (0..mesh.interior.len())
            .map(|i| Multivector::scalar(2, ((i % 13) as f64 - 6.0) / 60.0))
            .collect(),
    });
    let s2 = BeltramiStart::Quadrature(MeshFunction {
        values: (0..mesh.interior.len())
            .map(|i| {
                let mut m = Multivector::zero(2);
                m.add_term(3, ((i % 7) as f64 - 3.0) / 40.0);
                m
            })
            .collect(),
    });
    let ra = solve_fixed_point(&strict, Some(&s1)).unwrap();
    let rb2 = solve_fixed_point(&strict, Some(&s2)).unwrap();
    let (ha, hb) = match (&ra.solution, &rb2.solution) {
        (BeltramiSolution::Quadrature { h: a, .. }, BeltramiSolution::Quadrature { h: b, .. }) => {
            (a, b)
        }
        _ => unreachable!(),
    };
    let gap = ha.sub(hb).lp_norm(&mesh, 2.0);
    assert!(gap <= 10.0 * tol, "starts disagree by {gap}");

    println!(
        "ACCEPTANCE 8 [Beltrami solver]: PASS (q=0 in 1 iteration; spectral rate {rate:.4} <= \
         {rate_bound:.4}; cap demo residual {:.3e} in {} iterations; two starts agree to {gap:.3e} \
         <= 10 tol)",
        rc.final_fixed_point_residual, rc.iterations
    );
}

#[test]
fn acceptance_9_determinism() {
    // canonical spectrum reports from two independently built engines
    for n in [2usize, 3] {
        let a = OperatorEngine::new(n, 4).unwrap();
        let b = OperatorEngine::new(n, 4).unwrap();
        let ra = canonical_json(&spectrum(&a, OperatorTag::Gamma0).unwrap());
        let rb = canonical_json(&spectrum(&b, OperatorTag::Gamma0).unwrap());
        assert_eq!(ra, rb, "spectrum report not reproducible at n={n}");
    }
    // seeded Beltrami runs reproduce identical histories
    let eng = engine_for(2);
    let mut q_mv = Multivector::zero(2);
    q_mv.add_term(1, 0.2);
    let problem = BeltramiProblem {
        variant: BeltramiVariant::S0,
        mode: BeltramiMode::Spectral { engine: eng },
        q: QCoeff::Constant(q_mv),
        phi: PhiSpec::Zero,
        tolerance: 1e-9,
        max_iterations: 60,
    };
    let mk_start = || {
        let mut rng = ChaCha8Rng::seed_from_u64(909);
        BeltramiStart::Spectral(DVector::from_fn(eng.basis().dim(), |_, _| {
            rng.gen_range(-0.1..0.1)
        }))
    };
    let r1 = solve_fixed_point(&problem, Some(&mk_start())).unwrap();
    let r2 = solve_fixed_point(&problem, Some(&mk_start())).unwrap();
    assert_eq!(
        canonical_json(&r1.residual_history),
        canonical_json(&r2.residual_history)
    );
    // the discarded-norm helper is deterministic too
    let p = P::variable(2, 0).to_f64();
    assert_eq!(l2_norm_sq_f64(&p).to_bits(), l2_norm_sq_f64(&p).to_bits());
    println!(
        "ACCEPTANCE 9 [determinism]: PASS (byte-identical spectrum reports from independent \
         builds at (2,4) and (3,4); identical seeded Beltrami histories; golden-file stability \
         covered by the CLI test suite)"
    );
}
