//! End-to-end acceptance checks. Each test prints one `criterion N: PASS|FAIL` line.

use std::io::Write;
use std::sync::OnceLock;

use heston_aes::distributions::{sample_noncentral_chisq, NoncentralChiSqParams, RngStream};
use heston_aes::experiments::{catalog, run_experiment, ExperimentReport, ExperimentSpec, RunScale};
use heston_aes::lsm::lsm_price_detailed;
use heston_aes::lsm::default_basis;
use heston_aes::simulation::cir_transition_params;
use heston_aes::{
    lsm_price, simulate, ExerciseSchedule, ModelParams, PathSet, Preset, PutPayoff, Scheme,
    TimeGrid,
};
use statrs::distribution::{ContinuousCDF, Gamma};

// The verdict goes straight to stderr so it shows even when output is captured.
fn verdict(n: u32, title: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n}: {status} {title}");
    println!("{detail}");
    assert!(pass, "criterion {n} failed: {title}\n{detail}");
}

fn spec(id: &str, name: &str) -> ExperimentSpec {
    catalog::load(id)
        .unwrap()
        .into_iter()
        .flat_map(|g| g.experiments)
        .find(|e| e.name == name)
        .unwrap_or_else(|| panic!("no experiment {name}"))
}

fn desk(id: &str, name: &str) -> ExperimentReport {
    run_experiment(&spec(id, name).scaled(RunScale::DESK)).unwrap()
}

fn table1_aes() -> &'static ExperimentReport {
    static R: OnceLock<ExperimentReport> = OnceLock::new();
    R.get_or_init(|| desk("1", "table1-aes"))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

#[test]
fn criterion_1_bermudan_heston_desk_scale() {
    let report = table1_aes();
    let target = [9.966, 3.195, 0.917];
    let mut pass = true;
    let mut detail = String::new();
    for (row, t) in report.rows.iter().zip(target) {
        let e = rel(row.mean_price, t);
        pass &= e <= 0.01;
        detail += &format!(
            "  {} mean {:.4} target {t} rel {:.3}% (tol 1%)\n",
            row.case,
            row.mean_price,
            100.0 * e
        );
    }
    verdict(1, "Bermudan AES prices, 20 dates", pass, &detail);
}

#[test]
fn criterion_2_american_feller_holding_desk_scale() {
    let report = desk("2", "table2-aes");
    let target: [f64; 5] = [1.9860, 1.1093, 0.5190, 0.2108, 0.0796];
    let mut pass = true;
    let mut detail = String::new();
    for (row, t) in report.rows.iter().zip(target) {
        let tol = (0.015 * t).max(2.0 * row.run_std_error());
        let ok = (row.mean_price - t).abs() <= tol;
        pass &= ok;
        detail += &format!(
            "  {} mean {:.4} target {t} |diff| {:.4} tol {:.4}\n",
            row.case,
            row.mean_price,
            (row.mean_price - t).abs(),
            tol
        );
    }
    verdict(2, "American AES prices, M = 12, Feller holds", pass, &detail);
}

fn ladder(id: &str, names: &[&str], restrict_spot: Option<f64>) -> Vec<ExperimentReport> {
    names
        .iter()
        .map(|n| {
            let mut s = spec(id, n).scaled(RunScale::DESK);
            if let Some(spot) = restrict_spot {
                s.spots = Some(vec![spot]);
                s.reference = None;
            }
            run_experiment(&s).unwrap()
        })
        .collect()
}

#[test]
fn criterion_3_step_ladder_monotone() {
    let names = ["table4-m3", "table4-m6", "table4-m12", "table4-m24", "table4-m60", "table4-m120"];
    let reports = ladder("4", &names, Some(10.0));
    let rows: Vec<_> = reports.iter().map(|r| &r.rows[0]).collect();
    let mut pass = true;
    let mut detail = String::new();
    for w in rows.windows(2) {
        let slack = 2.0 * (w[0].run_std_error().powi(2) + w[1].run_std_error().powi(2)).sqrt();
        let ok = w[1].mean_price >= w[0].mean_price - slack;
        pass &= ok;
        detail += &format!(
            "  M={} {:.4} -> M={} {:.4} (slack {:.4}) {}\n",
            w[0].n_steps,
            w[0].mean_price,
            w[1].n_steps,
            w[1].mean_price,
            slack,
            if ok { "ok" } else { "decrease" }
        );
    }
    let lo = rel(rows[0].mean_price, 0.491);
    let hi = rel(rows[5].mean_price, 0.526);
    pass &= lo <= 0.015 && hi <= 0.015;
    detail += &format!(
        "  M=3 {:.4} vs 0.491 rel {:.3}%; M=120 {:.4} vs 0.526 rel {:.3}% (tol 1.5%)\n",
        rows[0].mean_price,
        100.0 * lo,
        rows[5].mean_price,
        100.0 * hi
    );
    verdict(3, "AES American step ladder at S0 = 10", pass, &detail);
}

#[test]
fn criterion_4_double_heston() {
    let mut pass = true;
    let mut detail = String::new();

    let m12 = desk("5", "table5-aes");
    for (row, t) in m12.rows.iter().zip([6.992, 9.635, 12.676]) {
        let e = rel(row.mean_price, t);
        pass &= e <= 0.015;
        detail += &format!(
            "  M=12 {} mean {:.4} target {t} rel {:.3}% (tol 1.5%)\n",
            row.case,
            row.mean_price,
            100.0 * e
        );
    }

    let names = ["table6-m12", "table6-m24", "table6-m60", "table6-m120"];
    let reports = ladder("6", &names, None);
    for k in 0..3 {
        let rows: Vec<_> = reports.iter().map(|r| &r.rows[k]).collect();
        for w in rows.windows(2) {
            let slack =
                2.0 * (w[0].run_std_error().powi(2) + w[1].run_std_error().powi(2)).sqrt();
            let ok = w[1].mean_price <= w[0].mean_price + slack;
            pass &= ok;
            detail += &format!(
                "  {} M={} {:.4} -> M={} {:.4} (slack {:.4}) {}\n",
                w[0].case,
                w[0].n_steps,
                w[0].mean_price,
                w[1].n_steps,
                w[1].mean_price,
                slack,
                if ok { "ok" } else { "increase" }
            );
        }
    }
    let end = &reports[3];
    for ((row, t), mae) in end
        .rows
        .iter()
        .zip([6.906, 9.526, 12.546])
        .zip([6.887, 9.504, 12.520])
    {
        let e = rel(row.mean_price, t);
        let em = rel(row.mean_price, mae);
        pass &= e <= 0.015 && em <= 0.01;
        detail += &format!(
            "  M=120 {} mean {:.4} vs {t} rel {:.3}% (tol 1.5%), vs reference {mae} rel {:.3}% (tol 1%)\n",
            row.case,
            row.mean_price,
            100.0 * e,
            100.0 * em
        );
    }
    verdict(4, "double Heston M = 12 prices and step ladder", pass, &detail);
}

#[test]
fn criterion_5_euler_double_steps_matches_aes() {
    let aes = table1_aes();
    let euler = desk("1", "table1-euler");
    let mut pass = true;
    let mut detail = String::new();
    for (a, e) in aes.rows.iter().zip(&euler.rows) {
        let d = rel(e.mean_price, a.mean_price);
        let ratio = e.memory_bytes as f64 / a.memory_bytes as f64;
        pass &= d <= 0.005 && ratio >= 1.8;
        detail += &format!(
            "  {} AES M=20 {:.4}, Euler M=40 {:.4}, rel {:.3}% (tol 0.5%), memory ratio {:.3} (min 1.8)\n",
            a.case,
            a.mean_price,
            e.mean_price,
            100.0 * d,
            ratio
        );
    }
    verdict(5, "Euler at 2M against AES at M", pass, &detail);
}

#[test]
fn criterion_6_noncentral_chisq_sampler() {
    const N: usize = 1_000_000;
    let mut pass = true;
    let mut detail = String::new();
    for (i, &dof) in [0.5, 1.0525, 3.9506].iter().enumerate() {
        for (j, &lambda) in [0.0, 2.5, 50.0].iter().enumerate() {
            let p = NoncentralChiSqParams::new(dof, lambda).unwrap();
            let mut stream = RngStream::new(6_000 + (3 * i + j) as u64, 0);
            let xs: Vec<f64> = (0..N).map(|_| sample_noncentral_chisq(&mut stream, &p)).collect();
            let n = N as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);

            // Cumulants of the noncentral chi-squared: k_m = 2^(m-1) (m-1)! (dof + m lambda).
            let k2 = 2.0 * (dof + 2.0 * lambda);
            let k4 = 48.0 * (dof + 4.0 * lambda);
            let se_mean = (k2 / n).sqrt();
            let se_var = ((k4 + 2.0 * k2 * k2) / n).sqrt();
            let zm = (mean - (dof + lambda)) / se_mean;
            let zv = (var - k2) / se_var;
            let ok = zm.abs() <= 3.0 && zv.abs() <= 3.0;
            pass &= ok;
            detail += &format!(
                "  dof {dof} lambda {lambda}: mean z {zm:+.2}, variance z {zv:+.2}\n"
            );

            if lambda == 0.0 {
                let mut sorted = xs;
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let g = Gamma::new(dof / 2.0, 0.5).unwrap();
                let d = sorted
                    .iter()
                    .enumerate()
                    .map(|(k, &x)| {
                        let f = g.cdf(x);
                        (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
                    })
                    .fold(0.0, f64::max);
                let crit = 1.628 / n.sqrt();
                pass &= d <= crit;
                detail += &format!(
                    "  dof {dof}: KS D {d:.2e} against Gamma({}, 2), 1% critical {crit:.2e}\n",
                    dof / 2.0
                );
            }
        }
    }
    verdict(6, "noncentral chi-squared moments and KS", pass, &detail);
}

#[test]
fn criterion_7_cir_single_step_exact() {
    const N: usize = 1_000_000;
    let mut pass = true;
    let mut detail = String::new();
    for preset in [Preset::FellerHolding, Preset::FellerViolating] {
        let ModelParams::Heston(h) = preset.params() else {
            unreachable!()
        };
        let grid = TimeGrid::new(0.25, 1).unwrap();
        let ps = simulate(&preset.params(), Scheme::Aes, &grid, N, 77).unwrap();
        let v = ps.variance_1(1);
        let n = N as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);

        let f = h.variance_factor();
        let m_true = f.conditional_mean(h.v0, 0.25);
        let v_true = f.conditional_variance(h.v0, 0.25);
        let t = cir_transition_params(h.kappa, h.gamma, h.nu_bar, 0.25, h.v0).unwrap();
        let c = t.c_bar;
        let k2 = c * c * 2.0 * (t.dof + 2.0 * t.kappa_bar);
        let k4 = c.powi(4) * 48.0 * (t.dof + 4.0 * t.kappa_bar);
        let zm = (mean - m_true) / (v_true / n).sqrt();
        let zv = (var - v_true) / ((k4 + 2.0 * k2 * k2) / n).sqrt();
        pass &= zm.abs() <= 3.0 && zv.abs() <= 3.0;
        detail += &format!(
            "  {}: mean {mean:.6} vs {m_true:.6} (z {zm:+.2}), variance {var:.3e} vs {v_true:.3e} (z {zv:+.2})\n",
            preset.name()
        );
    }
    verdict(7, "CIR one-step moments", pass, &detail);
}

#[test]
fn criterion_8_discounted_asset_is_martingale() {
    const N: usize = 1_000_000;
    let mut pass = true;
    let mut detail = String::new();
    for preset in [Preset::FellerHolding, Preset::FellerViolating, Preset::DoubleHestonZhang] {
        let m = preset.params();
        let grid = TimeGrid::new(0.25, 12).unwrap();
        let ps = simulate(&m, Scheme::Aes, &grid, N, 88).unwrap();
        let disc = (-m.r() * 0.25).exp();
        let xs: Vec<f64> = ps.asset(12).iter().map(|s| s * disc).collect();
        let n = N as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
        let tol = 3.0 * sd / n.sqrt() + 0.005 * m.s0();
        let ok = (mean - m.s0()).abs() <= tol;
        pass &= ok;
        detail += &format!(
            "  {}: discounted mean {mean:.5} vs S0 {} (|diff| {:.5}, tol {tol:.5})\n",
            preset.name(),
            m.s0(),
            (mean - m.s0()).abs()
        );
    }
    verdict(8, "martingale check, AES, M = 12", pass, &detail);
}

fn structure_paths(n: usize, threads: usize) -> PathSet {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let m = Preset::FellerViolating.params().with_spot(95.0);
    let grid = TimeGrid::new(0.25, 20).unwrap();
    pool.install(|| simulate(&m, Scheme::Aes, &grid, n, 99).unwrap())
}

#[test]
fn criterion_9_lsm_structure() {
    let mut pass = true;
    let mut detail = String::new();
    let ps = structure_paths(50_000, 1);
    let grid = *ps.grid();
    let r = Preset::FellerViolating.params().r();
    let payoff = PutPayoff::new(100.0).unwrap();

    let schedules = [
        ExerciseSchedule::maturity_only(grid),
        ExerciseSchedule::bermudan(grid, 5).unwrap(),
        ExerciseSchedule::bermudan(grid, 10).unwrap(),
        ExerciseSchedule::american(grid),
    ];
    let prices: Vec<_> = schedules
        .iter()
        .map(|s| lsm_price(&ps, &payoff, s, r).unwrap())
        .collect();
    for w in prices.windows(2) {
        let ok = w[1].price >= w[0].price - 3.0 * w[1].std_error;
        pass &= ok;
        detail += &format!(
            "  nested schedules: {:.4} -> {:.4} {}\n",
            w[0].price,
            w[1].price,
            if ok { "ok" } else { "violated" }
        );
    }
    let below_strike = prices.iter().all(|p| p.price <= 100.0);
    pass &= below_strike;
    detail += &format!("  every price <= K: {below_strike}\n");

    let disc = (-r * grid.maturity()).exp();
    let direct: Vec<f64> = ps.asset(20).iter().map(|&s| payoff.value(s) * disc).collect();
    let mean = direct.iter().sum::<f64>() / direct.len() as f64;
    let european = prices[0].price.to_bits() == mean.to_bits();
    pass &= european;
    detail += &format!(
        "  maturity-only schedule {:.6} equals discounted payoff mean {mean:.6}: {european}\n",
        prices[0].price
    );

    let american = ExerciseSchedule::american(grid);
    let a = lsm_price(&structure_paths(50_000, 1), &payoff, &american, r).unwrap();
    let b = lsm_price(&structure_paths(50_000, 4), &payoff, &american, r).unwrap();
    let same = a.price.to_bits() == b.price.to_bits();
    pass &= same;
    detail += &format!("  1 vs 4 worker threads bit-identical: {same}\n");

    // Scaling spot and strike scales every payoff and continuation value alike.
    let m = Preset::FellerViolating.params();
    let small = simulate(&m.with_spot(95.0), Scheme::Aes, &grid, 20_000, 5).unwrap();
    let large = simulate(&m.with_spot(95_000.0), Scheme::Aes, &grid, 20_000, 5).unwrap();
    let basis = default_basis(&small);
    let out_s = lsm_price_detailed(&small, &payoff, &american, r, &basis).unwrap();
    let out_l =
        lsm_price_detailed(&large, &PutPayoff::new(100_000.0).unwrap(), &american, r, &basis)
            .unwrap();
    let mismatched = out_s
        .exercise_steps
        .iter()
        .zip(&out_l.exercise_steps)
        .filter(|(x, y)| x != y)
        .count();
    pass &= mismatched == 0;
    detail += &format!(
        "  exercise decisions at scale 1 vs 1000: {mismatched} of {} paths differ\n",
        out_s.exercise_steps.len()
    );

    verdict(9, "LSM structural properties", pass, &detail);
}
