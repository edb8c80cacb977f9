//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Criteria 1 to 4 drive the `gsq` binary;
//! the rest call the library directly.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use gsq_core::benchmark::{ground_state, twist_turn_hamiltonian};
use gsq_core::calibration::{min_variance_over_rotations, RotationSearch};
use gsq_core::cubic::{cubic_operator, cubic_unitary, CubicParams};
use gsq_core::linalg::{commutator, max_abs, unitarity_residual, CMatrix, CVector, HermitianEigen};
use gsq_core::oscillator::{cv_test_state, cv_xi_resource, gaussian_min_variance, FockSpace};
use gsq_core::rotation::Rotator;
use gsq_core::spin::{variance, SpinOperators};
use gsq_core::squeezing::{chi_prime_range_for_chi, dicke_superposition};
use gsq_core::{
    QuantumState, RotationMode, RotationSpec, Settings, SpinContext, SpinSystem, Squeezer, TwistTurnParams, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gsq(args: &[&str], out: &Path) -> Vec<Vec<String>> {
    let status = Command::new(env!("CARGO_BIN_EXE_gsq"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .expect("gsq runs");
    assert!(status.success(), "gsq {args:?} exited with {status}");
    let mut rd = csv::Reader::from_path(out).expect("csv output");
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    let mut rows = vec![header];
    rows.extend(rd.records().map(|r| r.unwrap().iter().map(String::from).collect()));
    rows
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = rows[0].iter().position(|h| h == name).expect("column present");
    rows[1..].iter().map(|r| r[k].parse().unwrap()).collect()
}

fn random_rotation(rng: &mut ChaCha8Rng) -> RotationSpec {
    let beta = (2.0 * rng.gen::<f64>() - 1.0).acos();
    RotationSpec::raw(rng.gen::<f64>() * 2.0 * PI, beta, rng.gen::<f64>() * 2.0 * PI)
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> QuantumState {
    let v = CVector::from_fn(dim, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    QuantumState::pure_normalized(v).unwrap()
}

fn c1_resource_minimum(dir: &Path) -> Outcome {
    let rows = gsq(&["xi-resource", "--n-atoms", "80", "--gamma", "0.5"], &dir.join("c1.csv"));
    let xi = column(&rows, "xi")[0];
    let cp = column(&rows, "chi_prime")[0];
    let db = column(&rows, "xi_db")[0];
    check(
        (0.738..=0.758).contains(&xi) && (7.6e-4..=8.4e-4).contains(&cp),
        format!("xi = {xi:.5} ({db:.3} dB) at chi' = {cp:.4e}"),
    )
}

/// Linear interpolation of the `xi = 1` crossings.
fn crossings(cp: &[f64], xi: &[f64]) -> Vec<f64> {
    cp.windows(2)
        .zip(xi.windows(2))
        .filter(|(_, x)| (x[0] - 1.0) * (x[1] - 1.0) < 0.0)
        .map(|(c, x)| c[0] + (1.0 - x[0]) * (c[1] - c[0]) / (x[1] - x[0]))
        .collect()
}

fn c2_squeezed_window(dir: &Path) -> Outcome {
    let rows = gsq(&["sweep-chi", "--n-atoms", "80", "--gamma", "0.5"], &dir.join("c2.csv"));
    let x = crossings(&column(&rows, "chi_prime"), &column(&rows, "xi"));
    let ok = x.len() == 2 && (3e-4..=5e-4).contains(&x[0]) && (13e-4..=17e-4).contains(&x[1]);
    check(ok, format!("crossings at chi' = {:?}", x.iter().map(|c| format!("{c:.3e}")).collect::<Vec<_>>()))
}

fn c3_gamma_optimum(dir: &Path) -> Outcome {
    let rows = gsq(
        &[
            "sweep-gamma",
            "--n-atoms",
            "80",
            "--chi-prime",
            "7.959e-4",
            "--gamma-step",
            "0.001",
            "--amplitudes",
            "linear",
        ],
        &dir.join("c3.csv"),
    );
    let (g, xi, db) = (column(&rows, "gamma"), column(&rows, "xi"), column(&rows, "xi_db"));
    let k = (0..xi.len()).fold(0, |b, i| if xi[i] < xi[b] { i } else { b });
    let ok = (g[k] - 0.551).abs() <= 0.01 && (xi[k] - 0.715).abs() <= 0.01 && (db[k] + 1.459).abs() <= 0.07;
    check(ok, format!("argmin gamma = {:.3}, xi = {:.5}, {:.3} dB", g[k], xi[k], db[k]))
}

fn c4_size_sweep(dir: &Path) -> Outcome {
    let rows = gsq(&["sweep-n", "--gamma", "0.5", "--n-list", "4,6,8,10,20,40,80,100"], &dir.join("c4.csv"));
    let xi = column(&rows, "xi");
    let (finite, cv) = (&xi[..xi.len() - 1], xi[xi.len() - 1]);
    let monotone = finite.windows(2).all(|w| w[1] >= w[0]);
    let gap = cv - finite[finite.len() - 1];
    let rel = gap / cv;
    let ok = monotone && (gap - 0.015).abs() <= 0.005 && (rel - 0.0195).abs() <= 0.007;
    check(
        ok,
        format!("xi(N) = {finite:.4?}, xi(inf) = {cv:.5}, gap = {gap:.4} ({:.2}%)", 100.0 * rel),
    )
}

fn c5_coherent_variance() -> Outcome {
    let mut worst = 0.0f64;
    for n in [1usize, 2, 10, 80] {
        let sys = SpinSystem::new(n).unwrap();
        let ops = SpinOperators::new(&sys);
        let gs = ground_state(&ops.jz).state;
        let v = variance(&gs, &ops.jx).unwrap();
        worst = worst.max((v - n as f64 / 4.0).abs() / (n as f64 / 4.0));
    }
    check(worst < 1e-10, format!("max relative deviation from N/4 = {worst:.2e}"))
}

fn c6_free_state_floor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut lowest = f64::INFINITY;
    for n in [8usize, 20, 80] {
        let q = Squeezer::new(SpinSystem::new(n).unwrap(), Settings::default()).unwrap();
        let ctx = q.context();
        let states: Vec<QuantumState> = (0..200)
            .map(|_| {
                let t = TwistTurnParams::from_t(rng.gen::<f64>()).unwrap();
                let gs = ground_state(&twist_turn_hamiltonian(ctx, &t)).state;
                ctx.rotator.apply(&random_rotation(&mut rng), &gs).unwrap()
            })
            .collect();
        let res = q.xi_specific_batch(&states, 7.96e-4).unwrap();
        let m = res.iter().map(|r| r.xi).fold(f64::INFINITY, f64::min);
        lowest = lowest.min(m);
    }
    check(lowest >= 0.98, format!("smallest xi over 600 free states = {lowest:.5}"))
}

/// `exp(A)` by scaling and squaring of a Taylor series.
fn expm_taylor(a: &CMatrix<f64>) -> CMatrix<f64> {
    let norm = a.norm();
    let s = if norm > 1.0 { norm.log2().ceil() as i32 } else { 0 };
    let b = a.map(|z| z / 2f64.powi(s));
    let d = a.nrows();
    let mut term = CMatrix::<f64>::identity(d, d);
    let mut sum = term.clone();
    for k in 1..=24 {
        term = &term * &b / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

fn c7_operator_algebra() -> Outcome {
    let i = C64::new(0.0, 1.0);
    let mut comm = 0.0f64;
    let mut casimir = 0.0f64;
    for n in 1..=200usize {
        let sys = SpinSystem::new(n).unwrap();
        let o = SpinOperators::new(&sys);
        let (x, y, z) = (o.jx.matrix(), o.jy.matrix(), o.jz.matrix());
        for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
            comm = comm.max(max_abs(&(commutator(a, b) - c * i)) / n as f64);
        }
        let j = n as f64 / 2.0;
        let d = sys.dim();
        let cas = o.casimir() - CMatrix::<f64>::identity(d, d) * C64::new(j * (j + 1.0), 0.0);
        casimir = casimir.max(max_abs(&cas) / (n * n) as f64);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unitary = 0.0f64;
    let mut spectrum = 0.0f64;
    let mut generic = 0.0f64;
    for n in [4usize, 17, 80, 200] {
        let sys = SpinSystem::new(n).unwrap();
        let rot = Rotator::new(&sys);
        unitary = unitary.max(unitarity_residual(&rot.unitary(&random_rotation(&mut rng))));
        let p = CubicParams::from_chi_prime(7.96e-4, n).unwrap();
        let oc = cubic_operator(&sys, &p).unwrap();
        let ev = HermitianEigen::new(oc.matrix()).values;
        for (k, w) in ev.iter().enumerate() {
            spectrum = spectrum.max((w - sys.m(k)).abs());
        }
        let jz = SpinOperators::new(&sys).jz;
        let jz3 = jz.matrix() * jz.matrix() * jz.matrix();
        let gen = expm_taylor(&jz3.map(|z| z * i * p.chi_prime()));
        generic = generic.max(max_abs(&(gen - cubic_unitary(&sys, &p).unwrap())));
    }
    let ok = comm < 1e-12 && casimir < 1e-10 && unitary < 1e-12 && spectrum < 1e-10 && generic < 1e-10;
    check(
        ok,
        format!(
            "[J,J]/N {comm:.1e}, Casimir/N^2 {casimir:.1e}, U^+U {unitary:.1e}, \
             O_c spectrum {spectrum:.1e}, diagonal vs Taylor {generic:.1e}"
        ),
    )
}

fn c8_small_n_oracle() -> Outcome {
    let n = 6usize;
    let sys = SpinSystem::new(n).unwrap();
    let ctx = SpinContext::new(sys);
    let op = cubic_operator(&sys, &CubicParams::from_chi(0.8, n).unwrap()).unwrap();
    let (jz, jy) = (ctx.ops.jz.matrix(), ctx.ops.jy.matrix());
    let ez = HermitianEigen::new(jz);
    let ey = HermitianEigen::new(jy);
    let steps = 40usize;
    let az: Vec<CMatrix<f64>> = (0..steps).map(|k| ez.exp_i(2.0 * PI * k as f64 / steps as f64)).collect();
    let by: Vec<CMatrix<f64>> = (0..steps)
        .map(|k| ey.exp_i(PI * k as f64 / (steps - 1) as f64))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10 {
        let st = random_state(&mut rng, sys.dim());
        let psi = st.amplitudes().unwrap().clone();
        let refined = min_variance_over_rotations(&ctx, &st, &op, RotationMode::Refined, &RotationSearch::default())
            .unwrap()
            .variance;
        let mut grid = f64::INFINITY;
        for g in &az {
            let v1 = g * &psi;
            for b in &by {
                let v2 = b * &v1;
                for a in &az {
                    let v = a * &v2;
                    let ov = op.matrix() * &v;
                    let mean = v.dotc(&ov).re;
                    grid = grid.min(ov.norm_squared() - mean * mean);
                }
            }
        }
        worst = worst.max(refined - grid);
    }
    let tol = 1e-6 * (n * n) as f64;
    check(worst <= tol, format!("max(refined - grid) = {worst:.3e} (tolerance {tol:.1e})"))
}

fn c9_frame_invariance() -> Outcome {
    let n = 20usize;
    let (lo, hi) = chi_prime_range_for_chi(0.05, 4.0, n);
    let settings = Settings {
        chi_prime_min: lo,
        chi_prime_max: hi,
        chi_prime_points: 41,
        ..Settings::default()
    };
    let q = Squeezer::new(SpinSystem::new(n).unwrap(), settings).unwrap();
    let st = dicke_superposition(q.system(), 0.5).unwrap();
    let base = q.xi_resource(&st).unwrap().xi;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let rotated = q.context().rotator.apply(&random_rotation(&mut rng), &st).unwrap();
        worst = worst.max((q.xi_resource(&rotated).unwrap().xi - base).abs());
    }
    check(worst < 0.01, format!("xi = {base:.5}, max change {worst:.2e} over 20 rotations"))
}

/// Dense grid over displacement, squeezing and squeezing angle, zoomed
/// around the best cell.
fn gaussian_grid_oracle(chi: f64) -> f64 {
    let f = |xbar: f64, r: f64, phi: f64| {
        let (e, s, c) = ((2.0 * r).exp(), phi.sin(), phi.cos());
        let vx = 0.5 * (c * c / e + s * s * e);
        let vp = 0.5 * (s * s / e + c * c * e);
        let cxp = 0.5 * s * c * (1.0 / e - e);
        vp + 4.0 * chi * xbar * cxp + 4.0 * chi * chi * xbar * xbar * vx + 2.0 * chi * chi * vx * vx
    };
    let (mut cx, mut cr, mut cp) = (0.0, 0.0, 0.0);
    let (mut wx, mut wr, mut wp) = (20.0, 6.0, PI / 2.0);
    let m = 40i32;
    let mut best = f64::INFINITY;
    for _ in 0..30 {
        let mut arg = (cx, cr, cp);
        for i in -m..=m {
            let x = cx + wx * i as f64 / m as f64;
            for j in -m..=m {
                let r = cr + wr * j as f64 / m as f64;
                for k in -m..=m {
                    let p = cp + wp * k as f64 / m as f64;
                    let v = f(x, r, p);
                    if v < best {
                        best = v;
                        arg = (x, r, p);
                    }
                }
            }
        }
        (cx, cr, cp) = arg;
        wx *= 0.25;
        wr *= 0.25;
        wp *= 0.25;
    }
    best
}

fn c10_cv_limit() -> Outcome {
    let xi = |cutoff: usize| {
        let space = FockSpace::new(cutoff).unwrap();
        cv_xi_resource(&space, &cv_test_state(&space), 0.05, 4.0, 41).unwrap().xi
    };
    let (a, b): (f64, f64) = (xi(200), xi(400));
    let drift = ((b - a) / a).abs();
    let mut grid_err = 0.0f64;
    for chi in [0.01, 0.1, 0.5] {
        let g = gaussian_min_variance(chi).unwrap().min_variance;
        let o = gaussian_grid_oracle(chi);
        grid_err = grid_err.max(((g - o) / o).abs());
    }
    check(
        drift < 1e-3 && grid_err < 1e-4,
        format!("cutoff 200 -> 400 changes xi by {drift:.1e} relative; Gaussian minimum vs grid {grid_err:.1e}"),
    )
}

fn main() {
    // libtest passes flags such as --nocapture; this harness ignores them
    let dir = std::env::temp_dir().join(format!("gsq-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let criteria: Vec<Criterion> = vec![
        ("1 resource minimum at N=80", Box::new(|| c1_resource_minimum(&dir))),
        ("2 squeezed window", Box::new(|| c2_squeezed_window(&dir))),
        ("3 optimal superposition weight", Box::new(|| c3_gamma_optimum(&dir))),
        ("4 size sweep and oscillator limit", Box::new(|| c4_size_sweep(&dir))),
        ("5 coherent-state variance N/4", Box::new(c5_coherent_variance)),
        ("6 free-state floor", Box::new(c6_free_state_floor)),
        ("7 operator algebra up to N=200", Box::new(c7_operator_algebra)),
        ("8 small-N rotation oracle", Box::new(c8_small_n_oracle)),
        ("9 frame invariance", Box::new(c9_frame_invariance)),
        ("10 oscillator-limit consistency", Box::new(c10_cv_limit)),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let t = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {name}: {detail} [{:.1}s]", t.elapsed().as_secs_f64());
    }
    let _ = std::fs::remove_dir_all(&dir);
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
