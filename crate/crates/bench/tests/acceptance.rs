//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if a criterion fails that is not listed in `KNOWN_FAILURES`.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use bilevel_bench::{build_report, cmd_gen, cmd_solve, read_results, Mode, Scale, MANIFEST_FILE};
use bilevel_core::exact::{solve_exact_quad, ExactConfig};
use bilevel_core::foresight::relaxed_foresight_quad;
use bilevel_core::instances::{reduce_ssi, SsiInstance};
use bilevel_core::linalg::{haar_orthogonal, max_abs_subdeterminant, DenseMatrix};
use bilevel_core::model::{LinBilevelInstance, QuadBilevelInstance, Sense};
use bilevel_core::oracle::{minimize_iqp, LinearSystem};
use bilevel_core::proximity::{
    cook_prox_bound, ellipsoid_linear_max, ew_prox_bound, measure_prox_bruteforce, prox_bound_quad, prox_diagonal,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot hold as stated; see the README.
const KNOWN_FAILURES: [u32; 1] = [3];

const BASE_SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------- shared test-side helpers ----------

fn solve_dense(a: &DenseMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i]);
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[p][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, p);
        for i in (col + 1)..n {
            let f = m[i][col] / m[col][col];
            for k in col..=n {
                m[i][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

fn quad_value(q: &DenseMatrix, c: &[f64], y: &[i64]) -> f64 {
    let n = y.len();
    let mut v = 0.0;
    for i in 0..n {
        for j in 0..n {
            v += 0.5 * q[(i, j)] * (y[i] * y[j]) as f64;
        }
        v += c[i] * y[i] as f64;
    }
    v
}

fn lattice(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for (&l, &h) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|p| {
                (l..=h).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn rotated_spd(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..9.0)).collect();
    let u = haar_orthogonal(n, rng.random());
    let mut q = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..n).map(|k| u[(i, k)] * d[k] * u[(j, k)]).sum();
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    q
}

fn integral_spd(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let l = DenseMatrix::new(n, n, (0..n * n).map(|_| rng.random_range(-2i32..=2) as f64).collect()).unwrap();
    let mut q = l.matmul(&l.transpose()).unwrap();
    for i in 0..n {
        q[(i, i)] += 1.0;
    }
    q
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    if rng.random_bool(0.5) {
        rotated_spd(rng, n)
    } else {
        integral_spd(rng, n)
    }
}

// ---------- criteria ----------

fn tie_instance(sense: Sense) -> QuadBilevelInstance {
    QuadBilevelInstance {
        h_x: vec![0.0],
        d_x: vec![1.0],
        a: DenseMatrix::from_rows(&[[-1.0]]),
        b: vec![-1.0],
        q_y: DenseMatrix::from_rows(&[[2.0]]),
        c_y: DenseMatrix::from_rows(&[[-1.0]]),
        d_y: vec![0.0],
        sense,
    }
}

fn relaxation_instance(t: f64) -> QuadBilevelInstance {
    QuadBilevelInstance {
        h_x: vec![1000.0],
        d_x: vec![1.0],
        a: DenseMatrix::zeros(0, 1),
        b: vec![],
        q_y: DenseMatrix::from_rows(&[[18.0]]),
        c_y: DenseMatrix::from_rows(&[[1.0]]),
        d_y: vec![-6.0 * t],
        sense: Sense::Optimistic,
    }
}

fn c1_examples() -> Outcome {
    let start = Instant::now();
    let opt = solve_exact_quad(&tie_instance(Sense::Optimistic), ExactConfig::default()).unwrap();
    let pes = solve_exact_quad(&tie_instance(Sense::Pessimistic), ExactConfig::default()).unwrap();
    let up = relaxed_foresight_quad(&relaxation_instance(2.0)).unwrap();
    let down = relaxed_foresight_quad(&relaxation_instance(1.0)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let checks = [
        (opt.x == [1] && opt.y == [0] && opt.leader_obj == 0.0, "optimistic (1,0) value 0"),
        (pes.x == [1] && pes.y == [1] && pes.leader_obj == 1.0, "pessimistic (1,1) value 1"),
        (
            (up.frv_follower_cont[0] - 2.0 / 3.0).abs() < 1e-12 && up.solution.y == [1] && up.solution.leader_obj == 1.0,
            "FRV 2/3 -> 1, value 1",
        ),
        (
            (down.frv_follower_cont[0] - 1.0 / 3.0).abs() < 1e-12
                && down.solution.y == [0]
                && down.solution.leader_obj == 0.0,
            "FRV 1/3 -> 0, value 0",
        ),
        (secs < 1.0, "runtime < 1 s"),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.0).map(|c| c.1).collect();
    outcome(
        failed.is_empty(),
        if failed.is_empty() {
            format!("all four example outcomes exact; {secs:.4} s")
        } else {
            format!("failed: {}", failed.join(", "))
        },
    )
}

fn c2_diagonal_law() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + 2);
    let mut parts = Vec::new();
    let mut pass = true;
    for n in 1..=3 {
        let bound = prox_diagonal(n);
        let mut max_seen: f64 = 0.0;
        let mut over = 0;
        for sample in 0..=100 {
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(1..=9) as f64).collect();
            let q = DenseMatrix::from_diag(&diag);
            // the last sample places the continuous minimizer at 0.5·ones
            let d: Vec<f64> = if sample == 100 {
                diag.iter().map(|v| -0.5 * v).collect()
            } else {
                (0..n).map(|_| rng.random_range(-20.0..20.0)).collect()
            };
            let m = measure_prox_bruteforce(&q, &d, 1).unwrap();
            if m > bound + 1e-9 {
                over += 1;
            }
            max_seen = max_seen.max(m);
        }
        let ok = over == 0 && (max_seen - bound).abs() <= 1e-9;
        pass &= ok;
        parts.push(format!("n={n}: max {max_seen:.12} vs {bound:.12}, {over} over"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 10.0;
    outcome(pass, format!("{}; {secs:.3} s", parts.join("; ")))
}

fn c3_general_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + 3);
    let mut per_n = [(0usize, 0usize, 0.0f64); 4];
    for i in 0..150 {
        let n = 1 + i % 3;
        let q = random_spd(&mut rng, n);
        let bound = prox_bound_quad(&q).unwrap();
        for _ in 0..4 {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let m = measure_prox_bruteforce(&q, &d, 1).unwrap();
            let e = &mut per_n[n];
            e.0 += 1;
            if m > bound + 1e-9 {
                e.1 += 1;
                e.2 = e.2.max(m - bound);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let violations: usize = per_n.iter().map(|e| e.1).sum();
    let parts: Vec<String> = (1..=3)
        .map(|n| format!("n={n}: {}/{} over (worst excess {:.3})", per_n[n].1, per_n[n].0, per_n[n].2))
        .collect();
    outcome(
        violations == 0 && secs < 30.0,
        format!("150 matrices x 4 d; {}; {secs:.3} s", parts.join("; ")),
    )
}

/// Maximizes `pᵀz / √(zᵀQz)` by normalized gradient ascent with backtracking.
fn ellipsoid_numeric(q: &DenseMatrix, p: &[f64], gamma: f64) -> f64 {
    let n = p.len();
    let h = |z: &[f64]| {
        let qz = q.matvec(z).unwrap();
        let zqz: f64 = z.iter().zip(&qz).map(|(a, b)| a * b).sum();
        let pz: f64 = p.iter().zip(z).map(|(a, b)| a * b).sum();
        (pz / zqz.sqrt(), qz, zqz, pz)
    };
    let mut z = p.to_vec();
    let mut step = 1.0;
    for _ in 0..100_000 {
        let (val, qz, zqz, pz) = h(&z);
        let grad: Vec<f64> = (0..n).map(|i| p[i] / zqz.sqrt() - pz * qz[i] / zqz.powf(1.5)).collect();
        let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gn < 1e-14 {
            break;
        }
        loop {
            let cand: Vec<f64> = z.iter().zip(&grad).map(|(a, g)| a + step * g).collect();
            if h(&cand).0 >= val {
                let norm = cand.iter().map(|v| v * v).sum::<f64>().sqrt();
                z = cand.iter().map(|v| v / norm).collect();
                step *= 2.0;
                break;
            }
            step /= 2.0;
            if step < 1e-18 {
                break;
            }
        }
        if step < 1e-18 {
            break;
        }
    }
    gamma.sqrt() * h(&z).0
}

fn c4_ellipsoid() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + 4);
    let mut worst: f64 = 0.0;
    let mut over = 0;
    let trials = 120;
    for i in 0..trials {
        let n = 1 + i % 4;
        let q = random_spd(&mut rng, n);
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let gamma = rng.random_range(0.0..10.0);
        let closed = ellipsoid_linear_max(&q, &p, gamma).unwrap();
        let numeric = ellipsoid_numeric(&q, &p, gamma);
        let err = (closed - numeric).abs();
        worst = worst.max(err);
        if err > 1e-6 {
            over += 1;
        }
    }
    outcome(over == 0, format!("{trials} triples, max |closed - numeric| = {worst:.2e}"))
}

struct Desk {
    exact: Vec<bilevel_bench::ResultRow>,
    approx: Vec<bilevel_bench::ResultRow>,
}

fn desk_runs(dir: &Path) -> Desk {
    cmd_gen(BASE_SEED, dir, Scale::Desk).unwrap();
    let manifest = dir.join(MANIFEST_FILE);
    // one worker so timings are not distorted by contention
    let exact = cmd_solve(Mode::Exact, &manifest, 120.0, 1, &dir.join("exact.csv")).unwrap();
    let approx = cmd_solve(Mode::Approx, &manifest, 120.0, 1, &dir.join("approx.csv")).unwrap();
    Desk { exact, approx }
}

fn c5_gap_soundness(desk: &Desk) -> Outcome {
    let report = build_report(&desk.exact, &desk.approx).unwrap();
    let mut problems = Vec::new();
    let mut optimal = 0;
    for r in &report.records {
        if r.exact_status != "optimal" {
            continue;
        }
        optimal += 1;
        let (Some(df), Some(post), Some(ante)) = (r.delta_f, r.ex_post_bound, r.ex_ante_bound) else {
            problems.push(format!("{}: missing values", r.id));
            continue;
        };
        let integral = if r.q_kind == "bounded_eigenvalues" {
            (df - df.round()).abs() <= 1e-6
        } else {
            df == df.round()
        };
        if df < 0.0 || !integral || df > post + 1e-6 || post > ante + 1e-6 {
            problems.push(format!("{}: df {df}, ex_post {post}, ex_ante {ante}", r.id));
        }
    }
    let s = &report.summary;
    let pass = problems.is_empty() && optimal == report.records.len() && report.records.len() == 60;
    outcome(
        pass,
        format!(
            "{optimal}/{} optimal, bound rate {:.0}%, df=0 {:.1}% (reference 77%), df<=5 {:.1}% (91%), df>=10 {:.1}% (2.5%){}",
            report.records.len(),
            100.0 * s.bound_satisfaction,
            100.0 * s.frac_zero,
            100.0 * s.frac_le5,
            100.0 * s.frac_ge10,
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn c6_speed(desk: &Desk) -> Outcome {
    let mut faster = 0;
    let mut total = 0;
    let mut ratios = Vec::new();
    for (e, a) in desk.exact.iter().zip(&desk.approx) {
        assert_eq!(e.id, a.id);
        if e.q_kind == "diagonal" {
            continue;
        }
        total += 1;
        let (te, ta) = (e.time_s.unwrap(), a.time_s.unwrap());
        if ta < te {
            faster += 1;
        }
        ratios.push(ta / te);
    }
    ratios.sort_by(f64::total_cmp);
    let frac = faster as f64 / total as f64;
    let below_tenth = ratios.iter().filter(|&&r| r < 0.1).count() as f64 / total as f64;
    outcome(
        frac >= 0.9,
        format!(
            "approx faster on {faster}/{total} ({:.1}%); median time ratio {:.4}; ratio < 0.1 on {:.1}%",
            100.0 * frac,
            ratios[ratios.len() / 2],
            100.0 * below_tenth
        ),
    )
}

fn c7_ssi() -> Outcome {
    let start = Instant::now();
    let yes = SsiInstance::new(vec![1, 3], 1, 1).unwrap();
    let no = SsiInstance::new(vec![1, 2], 1, 1).unwrap();
    let solve = |s: &SsiInstance| {
        let inst = reduce_ssi(s).unwrap();
        assert_eq!(inst.sense, Sense::Pessimistic);
        solve_exact_quad(&inst, ExactConfig::default()).unwrap().leader_obj
    };
    let (fy, fn_) = (solve(&yes), solve(&no));
    let secs = start.elapsed().as_secs_f64();
    let pass = fy <= (yes.b() - 1) as f64 && fn_ == no.b() as f64 && secs < 60.0;
    outcome(
        pass,
        format!(
            "YES: {fy} (B-1 = {}), NO: {fn_} (B = {}); {secs:.3} s",
            yes.b() - 1,
            no.b()
        ),
    )
}

fn random_lin_follower(rng: &mut ChaCha8Rng) -> (Vec<f64>, LinearSystem) {
    let n_y = rng.random_range(1..=4);
    let m = rng.random_range(1..=3);
    let n_x = 2;
    let mut ints = |k: usize, lo: i32, hi: i32| (0..k).map(|_| rng.random_range(lo..=hi) as f64).collect::<Vec<_>>();
    let c_x = DenseMatrix::new(m, n_x, ints(m * n_x, -2, 2)).unwrap();
    let b_y = ints(m, -4, 2);
    let d_y = DenseMatrix::new(m, n_y, ints(m * n_y, -2, 2)).unwrap();
    let d = ints(n_y, -2, 2);
    let x = ints(n_x, 0, 1);
    let y_lo: Vec<i64> = (0..n_y).map(|_| rng.random_range(-3..=0)).collect();
    let y_hi: Vec<i64> = (0..n_y).map(|_| rng.random_range(0..=3)).collect();
    let inst = LinBilevelInstance {
        h_x: vec![0.0; n_x],
        d: d.clone(),
        a: DenseMatrix::zeros(0, n_x),
        b: vec![],
        c_x,
        b_y,
        d_y,
        y_lo,
        y_hi,
        sense: Sense::Optimistic,
    };
    (d, inst.follower_system(&x).unwrap())
}

/// Every vertex of `{y : Dy ≤ rhs, lower ≤ y ≤ upper}`.
fn vertices(sys: &LinearSystem) -> Vec<Vec<f64>> {
    let n = sys.lower.len();
    let mut rows: Vec<(Vec<f64>, f64)> = (0..sys.matrix.rows()).map(|i| (sys.matrix.row(i).to_vec(), sys.rhs[i])).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e.clone(), sys.upper[j]));
        e[j] = -1.0;
        rows.push((e, -sys.lower[j]));
    }
    let feasible = |y: &[f64]| rows.iter().all(|(a, b)| a.iter().zip(y).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-9);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut pick = vec![0usize; n];
    fn rec(
        start: usize,
        depth: usize,
        pick: &mut Vec<usize>,
        rows: &[(Vec<f64>, f64)],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pick.len() {
            visit(pick);
            return;
        }
        for i in start..rows.len() {
            pick[depth] = i;
            rec(i + 1, depth + 1, pick, rows, visit);
        }
    }
    let rows_ref = rows.clone();
    rec(0, 0, &mut pick, &rows_ref, &mut |idx| {
        let a = DenseMatrix::from_rows(&idx.iter().map(|&i| rows_ref[i].0.clone()).collect::<Vec<_>>());
        let b: Vec<f64> = idx.iter().map(|&i| rows_ref[i].1).collect();
        if let Some(v) = solve_dense(&a, &b) {
            if feasible(&v) && !out.iter().any(|w| w.iter().zip(&v).all(|(p, q)| (p - q).abs() < 1e-9)) {
                out.push(v);
            }
        }
    });
    out
}

fn c8_ilp_proximity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + 8);
    let (mut instances, mut checked, mut cook_bad, mut ew_bad, mut infeasible) = (0, 0, 0, 0, 0);
    let (mut cook_slack, mut ew_slack) = (f64::INFINITY, f64::INFINITY);
    while instances < 60 {
        let (d, sys) = random_lin_follower(&mut rng);
        let lo: Vec<i64> = sys.lower.iter().map(|&v| v as i64).collect();
        let hi: Vec<i64> = sys.upper.iter().map(|&v| v as i64).collect();
        let pts: Vec<Vec<i64>> = lattice(&lo, &hi)
            .into_iter()
            .filter(|y| sys.is_satisfied(&y.iter().map(|&v| v as f64).collect::<Vec<_>>(), 1e-9))
            .collect();
        if pts.is_empty() {
            infeasible += 1;
            continue;
        }
        instances += 1;
        let value = |y: &[f64]| d.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        let best_int = pts.iter().map(|y| value(&y.iter().map(|&v| v as f64).collect::<Vec<_>>())).fold(f64::MIN, f64::max);
        let opt_int: Vec<&Vec<i64>> = pts
            .iter()
            .filter(|y| value(&y.iter().map(|&v| v as f64).collect::<Vec<_>>()) >= best_int - 1e-9)
            .collect();
        let verts = vertices(&sys);
        let best_lp = verts.iter().map(|v| value(v)).fold(f64::MIN, f64::max);
        let n = d.len();
        let m = sys.matrix.rows();
        let delta = max_abs_subdeterminant(&sys.matrix).unwrap();
        let small = sys.matrix.data().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let cook = cook_prox_bound(n, delta);
        let ew = ew_prox_bound(m, small);
        for v in verts.iter().filter(|v| value(v) >= best_lp - 1e-9) {
            checked += 1;
            let dist = |p: f64| {
                opt_int
                    .iter()
                    .map(|z| {
                        let it = z.iter().zip(v.iter()).map(|(&a, b)| (a as f64 - b).abs());
                        if p.is_infinite() {
                            it.fold(0.0, f64::max)
                        } else {
                            it.sum()
                        }
                    })
                    .fold(f64::INFINITY, f64::min)
            };
            let (li, l1) = (dist(f64::INFINITY), dist(1.0));
            if li > cook + 1e-9 {
                cook_bad += 1;
            }
            if l1 > ew + 1e-9 {
                ew_bad += 1;
            }
            cook_slack = cook_slack.min(cook - li);
            ew_slack = ew_slack.min(ew - l1);
        }
    }
    outcome(
        cook_bad == 0 && ew_bad == 0,
        format!(
            "{instances} followers ({infeasible} infeasible skipped), {checked} optimal vertices; \
             l_inf over n*Delta: {cook_bad} (min slack {cook_slack:.3}); \
             l_1 over m(2m*delta+1)^m: {ew_bad} (min slack {ew_slack:.3})"
        ),
    )
}

fn c9_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED + 9);
    let mut bad = Vec::new();
    for trial in 0..200 {
        let n = 1 + trial % 3;
        let integral = trial % 2 == 0;
        let q = if integral { integral_spd(&mut rng, n) } else { rotated_spd(&mut rng, n) };
        let c: Vec<f64> = if integral {
            (0..n).map(|_| rng.random_range(-30..=30) as f64 / 2.0).collect()
        } else {
            (0..n).map(|_| rng.random_range(-15.0..15.0)).collect()
        };
        // both families have λ_min ≥ 1, so ‖y − u‖² ≤ 2(f(round u) − f(u))
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        let u = solve_dense(&q, &neg).unwrap();
        let r: Vec<i64> = u.iter().map(|v| v.round() as i64).collect();
        let fu = 0.5 * c.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
        let rad = (2.0 * (quad_value(&q, &c, &r) - fu).max(0.0) / (1.0 - 1e-9)).sqrt().ceil() as i64 + 1;
        let lo: Vec<i64> = r.iter().map(|v| v - rad).collect();
        let hi: Vec<i64> = r.iter().map(|v| v + rad).collect();
        let pts = lattice(&lo, &hi);
        let f_min = pts.iter().map(|y| quad_value(&q, &c, y)).fold(f64::INFINITY, f64::min);
        let got = minimize_iqp(&q, &c).unwrap();
        let ok = if integral {
            let first = pts.iter().find(|y| quad_value(&q, &c, y) == f_min).unwrap();
            got.f_int == f_min && &got.v == first
        } else {
            (got.f_int - f_min).abs() <= 1e-9 * (1.0 + f_min.abs())
        };
        if !ok {
            bad.push(format!("trial {trial}: got {:?} {} vs {f_min}", got.v, got.f_int));
        }
    }
    outcome(
        bad.is_empty(),
        format!("200 instances (n <= 3, half integral, half rotated); {} mismatches {}", bad.len(), bad.join("; ")),
    )
}

fn c10_determinism(dir: &Path, desk: &Desk) -> Outcome {
    let a = cmd_gen(BASE_SEED, &dir.join("gen_a"), Scale::Desk).unwrap();
    let b = cmd_gen(BASE_SEED, &dir.join("gen_b"), Scale::Desk).unwrap();
    let digests_equal = a == b;
    let manifest = dir.join("gen_b").join(MANIFEST_FILE);
    let mut same = true;
    for (mode, first) in [(Mode::Exact, &desk.exact), (Mode::Approx, &desk.approx)] {
        let out = dir.join(format!("rerun_{}.csv", mode.as_str()));
        cmd_solve(mode, &manifest, 120.0, 0, &out).unwrap();
        let again = read_results(&out).unwrap();
        let before = read_results(&dir.join(format!("{}.csv", mode.as_str()))).unwrap();
        same &= again.len() == first.len()
            && again.iter().zip(&before).all(|(x, y)| x.objective_key() == y.objective_key());
    }
    outcome(
        digests_equal && same,
        format!(
            "{} digests {}; objective columns {} across runs",
            a.len(),
            if digests_equal { "identical" } else { "differ" },
            if same { "identical" } else { "differ" }
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let o = f();
        println!(
            "criterion {n:>2} {name:<26} {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((n, name, o));
    };
    run(1, "worked examples", &mut c1_examples);
    run(2, "diagonal proximity", &mut c2_diagonal_law);
    run(3, "general proximity bound", &mut c3_general_bound);
    run(4, "ellipsoid maximum", &mut c4_ellipsoid);
    let desk = desk_runs(dir.path());
    run(5, "gap certificate soundness", &mut || c5_gap_soundness(&desk));
    run(6, "approximation speed", &mut || c6_speed(&desk));
    run(7, "subset-sum reduction", &mut c7_ssi);
    run(8, "ILP proximity", &mut c8_ilp_proximity);
    run(9, "IQP oracle equivalence", &mut c9_oracle);
    run(10, "determinism", &mut || c10_determinism(dir.path(), &desk));

    let failed: BTreeSet<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    let known: BTreeSet<u32> = KNOWN_FAILURES.into_iter().collect();
    let unexpected: Vec<u32> = failed.difference(&known).copied().collect();
    let fixed: Vec<u32> = known.difference(&failed).copied().collect();
    println!(
        "acceptance: {}/{} pass; known failures {:?}; unexpected failures {:?}",
        results.len() - failed.len(),
        results.len(),
        failed.intersection(&known).collect::<Vec<_>>(),
        unexpected
    );
    if !fixed.is_empty() {
        println!("note: criteria {fixed:?} are listed as known failures but now pass");
    }
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
