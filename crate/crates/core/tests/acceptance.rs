//! Acceptance suite: one PASS/FAIL line per criterion, with runtime budgets.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use helson_core::diagnostics::{gram_dual, helson_decay, Verdict};
use helson_core::experiments::{counterexample_ratio, counterexample_xnorm, mult_hilbert_study, tensor_check, xnorm_grid};
use helson_core::finiterank::{
    boundedness_check, canonicalize, form_alpha, form_rank, graded_norm, sym, symbol_taylor, total_mass, Direction,
    FactorizableOp, FormTerm, HelsonFormSpec, SeriesStatus, SymmetricTensorRep,
};
use helson_core::matrix::HelsonOperator;
use helson_core::moments::{ClosedForm, Coeff1d, DiscreteMeasure, HalfLineDensity};
use helson_core::spectral::hankel_norm_schedule;
use helson_core::{alpha, compose, factorize, multiindex_add, MomentSequence, MultiIndex, Point};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn criterion_1() -> Outcome {
    for n in 1..=1_000_000u64 {
        let k = factorize(n).map_err(|e| e.to_string())?;
        check(compose(&k) == Ok(n), format!("round trip fails at {n}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=1_000_000u64);
        let m = rng.gen_range(1..=1_000_000u64 / n);
        let lhs = factorize(n * m).map_err(|e| e.to_string())?;
        let rhs = multiindex_add(&factorize(n).unwrap(), &factorize(m).unwrap());
        check(lhs == rhs, format!("homomorphism fails for {n} * {m}"))?;
    }
    Ok("identity on 1..10^6, 10^4 random products".into())
}

fn criterion_2() -> Outcome {
    let seq = MomentSequence::half_line(HalfLineDensity::Lebesgue);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=1_000_000u64);
        let x = n as f64;
        let oracle = 1.0 / (x.sqrt() * x.ln());
        worst = worst.max((alpha(&seq, n).map_err(|e| e.to_string())? - oracle).abs());
    }
    check(worst <= 1e-10, format!("max error {worst:.3e}"))?;
    Ok(format!("max |error| {worst:.2e} over 1000 samples"))
}

/// Eigenvalues of a symmetric 3×3 matrix by the trigonometric form of
/// Cardano's formula, ascending.
fn eig3(a: [[f64; 3]; 3]) -> [f64; 3] {
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let p2 = (0..3).map(|i| (a[i][i] - q).powi(2)).sum::<f64>() + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = a;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    [lo, 3.0 * q - hi - lo, hi]
}

fn criterion_3() -> Outcome {
    let atoms: Vec<(f64, Vec<(usize, f64)>)> = vec![
        (1.0, vec![(1, 0.5)]),
        (0.7, vec![(1, -0.3), (2, 0.4)]),
        (0.4, vec![(2, 0.3), (3, -0.25)]),
    ];
    // the Gram matrix sqrt(w_i w_j) Π_j 1 / (1 - λ_i(j) λ_j(j)), written out here
    let coord = |pt: &[(usize, f64)], j: usize| pt.iter().find(|e| e.0 == j).map_or(0.0, |e| e.1);
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let k: f64 = (1..=3).map(|v| 1.0 / (1.0 - coord(&atoms[i].1, v) * coord(&atoms[j].1, v))).product();
            g[i][j] = (atoms[i].0 * atoms[j].0).sqrt() * k;
        }
    }
    let oracle = eig3(g);
    let mu = DiscreteMeasure::new(atoms.iter().map(|(w, p)| (*w, Point::explicit(p.clone()).unwrap())).collect())
        .map_err(|e| e.to_string())?;
    let dual = gram_dual(&mu).map_err(|e| e.to_string())?.spectrum.eigenvalues;
    for (d, o) in dual.iter().zip(&oracle) {
        check((d - o).abs() <= 1e-12, format!("gram_dual {d} vs closed form {o}"))?;
    }
    let seq = MomentSequence::Discrete(mu);
    let mut previous = [f64::NEG_INFINITY; 3];
    let mut last_gap = 0.0;
    for n in [64u64, 256, 1024, 4096] {
        let op = HelsonOperator::new(&seq, n, 1).map_err(|e| e.to_string())?;
        let top = op.top_eigenvalues(3).map_err(|e| e.to_string())?.eigenvalues;
        for i in 0..3 {
            check(top[i] <= oracle[i] + 1e-12, format!("N = {n}: eigenvalue {} above {}", top[i], oracle[i]))?;
            check(top[i] >= previous[i] - 1e-12, format!("N = {n}: eigenvalue {i} decreased"))?;
            previous[i] = top[i];
        }
        last_gap = (0..3).map(|i| oracle[i] - top[i]).fold(0.0, f64::max);
    }
    check(last_gap <= 1e-6, format!("gap at N = 4096 is {last_gap:.3e}"))?;
    Ok(format!("targets {:.9} {:.9} {:.9}; gap at N = 4096 {last_gap:.2e}", oracle[0], oracle[1], oracle[2]))
}

fn rank_of(spec: &HelsonFormSpec, want: usize, label: &str) -> Result<String, String> {
    let r = form_rank(spec, 32).map_err(|e| format!("{label}: {e}"))?;
    check(r.rank == want && r.stabilized, format!("{label}: rank {} (stabilized {}), expected {want}", r.rank, r.stabilized))?;
    Ok(format!("{label}={}", r.rank))
}

fn criterion_4() -> Outcome {
    let mut out = Vec::new();
    out.push(rank_of(&HelsonFormSpec::point_mass(1.0, Point::explicit(vec![(1, 0.5), (2, 0.25)]).unwrap()), 1, "point")?);

    let mut directional = HelsonFormSpec::default();
    let dir = Direction::new(vec![(1, c(1.0, 0.0)), (2, c(0.5, -0.5))]).unwrap();
    directional.push_op(c(1.0, 0.0), vec![dir], Point::explicit(vec![(1, 0.3), (2, -0.2)]).unwrap());
    out.push(rank_of(&directional, 2, "derivative")?);

    for n in 1..=4u32 {
        let spec = HelsonFormSpec::new(vec![FormTerm::Dirichlet { scalar: c(1.0, 0.0), order: n, point: Point::Bohr(1.0) }]);
        out.push(rank_of(&spec, n as usize + 1, &format!("D^{n}"))?);
    }

    // Σ_{i ≤ k_ℓ} f^{(i)}(λ_ℓ) at λ = 1/2 (k = 1) and λ = -1/2 (k = 2)
    let mut kron = HelsonFormSpec::default();
    for (lam, k) in [(0.5, 1usize), (-0.5, 2)] {
        let p = Point::explicit(vec![(1, lam)]).unwrap();
        for i in 0..=k {
            kron.push_op(c(1.0, 0.0), vec![Direction::unit(1); i], p.clone());
        }
    }
    out.push(rank_of(&kron, 5, "kronecker")?);
    Ok(out.join(" "))
}

fn criterion_5() -> Outcome {
    let bohr = HelsonFormSpec::point_mass(1.0, Point::Bohr(1.0));
    let report = boundedness_check(&bohr).map_err(|e| e.to_string())?;
    check(report.bounded && report.consistent && report.confirmed, "s = 1 not confirmed bounded")?;
    let mass = total_mass(&bohr).map_err(|e| e.to_string())?;
    let est = mass.series.estimate.ok_or("no total mass estimate")?;
    let z2 = PI * PI / 6.0;
    check((est - z2).abs() <= 1e-8, format!("total mass {est} vs ζ(2)"))?;
    for m in 0..=2 {
        let g = graded_norm(&bohr, m).map_err(|e| e.to_string())?;
        check(g.status.is_finite(), format!("s = 1 graded norm m = {m} is {:?}", g.status))?;
    }

    let low = HelsonFormSpec::point_mass(1.0, Point::Bohr(0.4));
    let report = boundedness_check(&low).map_err(|e| e.to_string())?;
    check(!report.bounded && report.consistent && report.confirmed, "s = 0.4 not confirmed unbounded")?;
    let g = graded_norm(&low, 1).map_err(|e| e.to_string())?;
    check(g.status == SeriesStatus::Divergent, format!("s = 0.4 graded norm is {:?}", g.status))?;
    Ok(format!("s=1 mass {est:.12} (|err| {:.1e}); s=0.4 divergent", (est - z2).abs()))
}

fn random_spec(rng: &mut ChaCha8Rng) -> HelsonFormSpec {
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        if rng.gen_bool(0.25) {
            let order = rng.gen_range(0..=2);
            let s = rng.gen_range(0.6..1.5);
            terms.push(FormTerm::Dirichlet { scalar: c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), order, point: Point::Bohr(s) });
            continue;
        }
        let mut coords = Vec::new();
        for j in 1..=3 {
            if rng.gen_bool(0.7) {
                coords.push((j, rng.gen_range(-0.6..0.6)));
            }
        }
        let dirs = (0..rng.gen_range(0..=2))
            .map(|_| {
                let entries = (1..=3).map(|j| (j, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect();
                Direction::new(entries).unwrap()
            })
            .collect();
        terms.push(FormTerm::Op {
            op: FactorizableOp::new(c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), dirs),
            point: Point::explicit(coords).unwrap(),
        });
    }
    HelsonFormSpec::new(terms)
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let spec = random_spec(&mut rng);
        for _ in 0..50 {
            let kappa = MultiIndex::from_pairs((1..=4).map(|j| (j, rng.gen_range(0..=4u32))));
            let n = compose(&kappa).map_err(|e| e.to_string())?;
            let a = form_alpha(&spec, n).map_err(|e| e.to_string())?;
            let t = symbol_taylor(&spec, &kappa).map_err(|e| e.to_string())?;
            let err = (t - a.conj()).norm() / (1.0 + a.norm());
            worst = worst.max(err);
        }
    }
    check(worst <= 1e-12, format!("max relative error {worst:.3e}"))?;
    Ok(format!("max relative error {worst:.2e} over 250 coefficients"))
}

fn criterion_7() -> Outcome {
    let hilbert = helson_decay(&MomentSequence::closed(ClosedForm::MultiplicativeHilbert), 1 << 62)
        .map_err(|e| e.to_string())?;
    check((hilbert.sup - 1.0).abs() <= 1e-15, format!("sup {} != 1", hilbert.sup))?;
    check(hilbert.verdict == Verdict::Bounded, format!("verdict {:?}", hilbert.verdict))?;
    let sqrt_log = helson_decay(&MomentSequence::closed(ClosedForm::SqrtLog), 1 << 62).map_err(|e| e.to_string())?;
    check(sqrt_log.verdict == Verdict::Unbounded, format!("sqrt-log verdict {:?}", sqrt_log.verdict))?;
    Ok(format!("sup {:.16}; sqrt-log sup {:.3} unbounded", hilbert.sup, sqrt_log.sup))
}

fn schedule_checks(beta: &Coeff1d, limit: f64, label: &str) -> Result<String, String> {
    let sizes: Vec<usize> = (4..=12).map(|k| 1 << k).collect();
    let s = hankel_norm_schedule(beta, &sizes).map_err(|e| e.to_string())?;
    let lams: Vec<f64> = s.points.iter().map(|p| p.lambda_max).collect();
    check(lams.windows(2).all(|w| w[1] > w[0]), format!("{label}: not strictly increasing"))?;
    let top = *lams.last().unwrap();
    check(top < limit, format!("{label}: {top} >= {limit}"))?;
    let ext = s.extrapolated.ok_or(format!("{label}: no extrapolation"))?;
    check(ext > top, format!("{label}: extrapolation {ext} <= {top}"))?;
    Ok(format!("{label} λ(4096)={top:.6} ext={ext:.6}"))
}

fn criterion_8() -> Outcome {
    let mut out = vec![schedule_checks(&Coeff1d::Hilbert, PI, "hilbert")?];
    out.push(schedule_checks(&Coeff1d::Appendix, PI / 2.0, "appendix")?);
    let sizes: Vec<usize> = (4..=12).map(|k| 1 << k).collect();
    let study = mult_hilbert_study(&sizes).map_err(|e| e.to_string())?;
    check(study.points.iter().all(|p| p.converged), "mult-hilbert: unconverged eigenvalues")?;
    check(study.all_below_pi && study.all_nonnegative, "mult-hilbert spectrum leaves [-1e-10, π)")?;
    let lams: Vec<f64> = study.points.iter().map(|p| p.lambda_max).collect();
    check(lams.windows(2).all(|w| w[1] > w[0]), "mult-hilbert: not strictly increasing")?;
    let sched = helson_core::spectral::norm_schedule(&MomentSequence::closed(ClosedForm::MultiplicativeHilbert), &sizes[..7], 2)
        .map_err(|e| e.to_string())?;
    let ext = sched.extrapolated.ok_or("mult-hilbert: no extrapolation")?;
    let top = lams.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
    check(ext > top, format!("mult-hilbert: extrapolation {ext} <= {top}"))?;
    let min = study.points.iter().map(|p| p.lambda_min).fold(f64::INFINITY, f64::min);
    out.push(format!("mult-hilbert λ ∈ [{min:.1e}, {top:.6}] ext={ext:.6}"));
    Ok(out.join("; "))
}

fn criterion_9() -> Outcome {
    let grid = xnorm_grid(10);
    for n in 1..=8 {
        let coarse = counterexample_xnorm(n, &[0.0, 0.3, 0.6, 0.9]).map_err(|e| e.to_string())?;
        let fine = counterexample_xnorm(n, &grid).map_err(|e| e.to_string())?;
        check(coarse.sup <= 1.0 + 1e-12 && fine.sup <= 1.0 + 1e-12, format!("N = {n}: sup above 1"))?;
        check(fine.sup >= 0.999, format!("N = {n}: refined sup {}", fine.sup))?;
    }
    let t = tensor_check(2, 8).map_err(|e| e.to_string())?;
    check(t.abs_error <= 1e-10, format!("tensor error {:.3e}", t.abs_error))?;
    let mut targets = Vec::new();
    for n in [1usize, 2, 4, 8, 16, 32] {
        let r = counterexample_ratio(n, &[64, 256], &grid).map_err(|e| e.to_string())?;
        check((r.target - (PI / 2.0).powi(n as i32)).abs() <= 1e-12 * r.target, "target mismatch")?;
        targets.push(r.target);
    }
    check(targets.windows(2).all(|w| w[1] > w[0]), "targets not increasing")?;
    check(*targets.last().unwrap() > 1e6, "targets stay small")?;
    Ok(format!("tensor |err| {:.1e}; (π/2)^32 = {:.3e}", t.abs_error, targets.last().unwrap()))
}

fn random_rep(rng: &mut ChaCha8Rng) -> SymmetricTensorRep {
    let order = rng.gen_range(1..=3);
    let pool: Vec<Direction> = (0..3)
        .map(|_| {
            let mut entries = Vec::new();
            for j in 1..=3 {
                if rng.gen_bool(0.7) {
                    entries.push((j, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
                }
            }
            Direction::new(entries).unwrap_or_else(|_| Direction::unit(1))
        })
        .collect();
    let terms = (0..rng.gen_range(1..=4))
        .map(|_| {
            let s = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (s, (0..order).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect())
        })
        .collect();
    SymmetricTensorRep::new(order, terms).unwrap()
}

/// `Σ s Π_i c_i(j_i)` evaluated from the raw entries.
fn direct_value(rep: &SymmetricTensorRep, index: &[usize]) -> Complex64 {
    let mut total = c(0.0, 0.0);
    for (s, factors) in &rep.terms {
        let mut p = *s;
        for (d, &j) in factors.iter().zip(index) {
            p *= d.entries().iter().find(|e| e.0 == j).map_or(c(0.0, 0.0), |e| e.1);
        }
        total += p;
    }
    total
}

fn all_indices(support: &[usize], order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..order {
        out = out.into_iter().flat_map(|t| support.iter().map(move |&j| [t.clone(), vec![j]].concat())).collect();
    }
    out
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let rep = random_rep(&mut rng);
        let once = sym(&rep);
        check(sym(&once) == once, format!("rep {i}: sym is not idempotent"))?;
        for r in [&rep, &once] {
            let canon = canonicalize(r);
            check(canon.len() <= r.len(), format!("rep {i}: {} terms became {}", r.len(), canon.len()))?;
            let support = r.support();
            for idx in all_indices(&support, r.order) {
                let (want, got) = (direct_value(r, &idx), direct_value(&canon, &idx));
                let err = (want - got).norm() / (1.0 + want.norm());
                check(err <= 1e-10, format!("rep {i}: value at {idx:?} moved by {err:.3e}"))?;
                worst = worst.max(err);
            }
        }
    }
    Ok(format!("100 reps; max canonicalization error {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("bijection exactness", criterion_1, 5),
        ("closed-form moments", criterion_2, 10),
        ("gram-dual exactness", criterion_3, 120),
        ("exact ranks", criterion_4, 60),
        ("boundedness dichotomy", criterion_5, 30),
        ("symbol consistency", criterion_6, 30),
        ("decay diagnostics", criterion_7, 10),
        ("norm property suite", criterion_8, 180),
        ("counterexample", criterion_9, 120),
        ("tensor algebra", criterion_10, 30),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{detail}; runtime {:.1}s over the {budget}s budget", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2}s]", i + 1, elapsed.as_secs_f64()),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{:.2}s]", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
