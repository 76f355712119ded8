//! One PASS/FAIL line per acceptance criterion. Failures are reported, not
//! raised; set `ACCEPTANCE_STRICT=1` to turn any FAIL into a nonzero exit.

use chanshort::channel::{
    bit_log_probs, complex_gaussian, make_random_mimo, n0_from_snr_db, permute_columns, preset_taps, priors_from_llrs,
    random_mimo_matrix, symbol_log_priors, ChannelModel, Constellation, Preset, PriorState,
};
use chanshort::gmi::{gmi_eval, mse_matrix, solve_optimal_g_banded, theorem2_objective, CsParams};
use chanshort::isi::*;
use chanshort::linalg::{band, c64, eye, frob, from_real_rows, hermitize, hpd_inverse, max_abs, BandSpec, CMat, CVec, Cholesky, Complex64, RShape};
use chanshort::methods::*;
use chanshort::rx::*;
use chanshort_bench::experiments::{asympt_check, link_sim, mix_seed, perm_search, realize, LinkPoint, Realized};
use chanshort_bench::ExperimentConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

type Check = Result<(bool, String), Box<dyn std::error::Error>>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn taps_of(p: Preset) -> Vec<Complex64> {
    preset_taps(p).into_iter().map(|t| c64(t, 0.0)).collect()
}

fn lower_band(k: usize, nu: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|j| (j..(j + nu + 1).min(k)).map(move |i| (i, j))).collect()
}

fn random_prior(rng: &mut ChaCha8Rng, k: usize) -> PriorState {
    PriorState::with_p((0..k).map(|_| rng.gen_range(0.05..0.95)).collect())
}

fn random_f(rng: &mut ChaCha8Rng, k: usize, nu: usize) -> CMat {
    let mut f = CMat::from_element(k, k, ZERO);
    for (i, j) in lower_band(k, nu) {
        f[(i, j)] = if i == j { c64(rng.gen_range(0.5..2.0), 0.0) } else { c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) };
    }
    f
}

fn random_g(rng: &mut ChaCha8Rng, k: usize, nu: usize, diag: (f64, f64), off: f64) -> CMat {
    let mut g = CMat::from_element(k, k, ZERO);
    for (i, j) in lower_band(k, nu) {
        if i == j {
            g[(i, i)] = c64(rng.gen_range(diag.0..diag.1), 0.0);
        } else {
            let z = c64(rng.gen_range(-off..off), rng.gen_range(-off..off));
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
    }
    g
}

/// Central differences over the lower band; `mirror` also moves the
/// Hermitian partner.
fn fd_gradient(x: &CMat, nu: usize, mirror: bool, f: &dyn Fn(&CMat) -> f64) -> CMat {
    let h = 1e-6;
    let mut out = CMat::from_element(x.nrows(), x.ncols(), ZERO);
    for (i, j) in lower_band(x.nrows(), nu) {
        let dirs: &[Complex64] = if i == j { &[c64(h, 0.0)] } else { &[c64(h, 0.0), c64(0.0, h)] };
        for d in dirs {
            let (mut p, mut m) = (x.clone(), x.clone());
            p[(i, j)] += d;
            m[(i, j)] -= d;
            if mirror && i != j {
                p[(j, i)] += d.conj();
                m[(j, i)] -= d.conj();
            }
            let v = (f(&p) - f(&m)) / (2.0 * h);
            if d.re != 0.0 {
                out[(i, j)].re = v;
            } else {
                out[(i, j)].im = v;
            }
        }
    }
    out
}

fn criterion1() -> Check {
    let start = Instant::now();
    let (mut res, mut obj) = (0.0f64, 0.0f64);
    for s in 0..100u64 {
        let k = 4 + (s % 9) as usize;
        let nu = (s % 3) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let n0 = 10f64.powf(rng.gen_range(-1.5..1.0));
        let m = mse_matrix(&random_mimo_matrix(&mut rng, k, k), n0)?;
        let g = solve_optimal_g_banded(&m, nu)?;
        let ig = hermitize(&(eye(k) + &g));
        res = res.max(max_abs(&(band(&hpd_inverse(&ig)?, nu) + band(&m, nu))));
        obj = obj.max((theorem2_objective(&m, &g)? - Cholesky::new(&ig)?.logdet()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((res <= 1e-9 && obj <= 1e-9 && secs < 1.0, format!("max band residual {res:.2e}, objective gap {obj:.2e}, {secs:.3} s")))
}

fn criterion2() -> Check {
    let (mut w1, mut w2) = (0.0f64, 0.0f64);
    for s in 0..20u64 {
        let k = 4 + (s % 3) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + s);
        let ch = make_random_mimo(k, k, 2000 + s).with_n0(0.5);
        let prior = random_prior(&mut rng, k);
        let f = random_f(&mut rng, k, 1);
        let an = method1_gradient(&ch, &prior, &f, 1)?;
        let fd = fd_gradient(&f, 1, false, &|x| method1_objective(&ch, &prior, x, 1).unwrap());
        w1 = w1.max(frob(&(&an - &fd)) / frob(&an));

        let ch = ch.with_n0(0.4);
        let shape = [RShape::A, RShape::B, RShape::C][s as usize % 3];
        let g = random_g(&mut rng, k, 1, (0.5, 3.0), 0.4);
        let an = method2_gradient(&ch, &prior, &g, 1, shape)?;
        let fd = fd_gradient(&g, 1, true, &|x| method2_objective(&ch, &prior, x, 1, shape).unwrap());
        w2 = w2.max(frob(&(&an - &fd)) / frob(&an));
    }
    Ok((w1 <= 1e-5 && w2 <= 1e-5, format!("max relative error: Method I {w1:.2e}, Method II {w2:.2e}")))
}

fn criterion3() -> Check {
    let cfg = OptimizerConfig::default();
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let mut note = |d: f64, what: &str, s: u64| {
        if d > worst {
            worst = d;
            worst_at = format!("{what} on instance {s}");
        }
    };
    for s in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + s);
        let k = 3 + (s % 4) as usize;
        let n = k + (s / 4 % 2) as usize;
        let nu = ((s % 3) as usize).min(k - 1);
        let ch = make_random_mimo(n, k, 4000 + s).with_n0(10f64.powf(rng.gen_range(-1.0..0.5)));
        let prior = if s % 5 == 0 { PriorState::none(k) } else { random_prior(&mut rng, k) };
        for m in [RxMethod::I, RxMethod::IIa, RxMethod::IIb, RxMethod::IIc, RxMethod::III, RxMethod::LmmsePic, RxMethod::Map] {
            let (p, gmi) = mimo_design(m, &ch, &prior, nu, &cfg)?;
            note((gmi - gmi_eval(&ch, &prior, &p)?).abs(), m.label(), s);
        }
        let r = method1_optimize(&ch, &prior, nu, &cfg)?;
        let fp = r.forney.as_ref().ok_or("Method I returned no Forney parameters")?;
        note((r.gmi - gmi_eval(&ch, &prior, &fp.to_cs())?).abs(), "Forney mapping", s);
    }
    Ok((worst <= 1e-8, format!("max |reported - gmi_eval| {worst:.2e} ({worst_at})")))
}

fn criterion4() -> Check {
    let mut worst = 0.0f64;
    for beta in [0.5, 1.0, 10.0] {
        for k in [1, 2, 5] {
            let ch = ChannelModel::matrix(eye(k), 1.0);
            let p = CsParams {
                v: CMat::zeros(k, k),
                r: eye(k) * c64(-(1.0 + beta), 0.0),
                g: eye(k) * c64(beta, 0.0),
                band: BandSpec::new(k, k - 1, RShape::B),
            };
            let got = gmi_eval(&ch, &PriorState::uniform(k, 1.0), &p)?;
            worst = worst.max((got - k as f64 * (1.0 + (1.0 + beta).ln())).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max deviation from K(1 + ln(1+β)) {worst:.2e}")))
}

fn criterion5() -> Check {
    let cfg = OptimizerConfig::default();
    let n0 = n0_from_snr_db(10.0);
    let methods = [RxMethod::I, RxMethod::IIa, RxMethod::IIb, RxMethod::IIc, RxMethod::III];
    let alphas = [0.0, 0.25, 0.5, 0.75];
    let count = 200;
    let mut sums = [[0.0f64; 4]; 5];
    let (mut ba, mut ac, mut b3) = (0, 0, 0);
    let tol = 1e-9;
    for r in 0..count {
        let ch = make_random_mimo(5, 5, mix_seed(5, r)).with_n0(n0);
        for (ai, &a) in alphas.iter().enumerate() {
            let prior = PriorState::uniform(5, a);
            let g: Vec<f64> = methods.iter().map(|&m| mimo_design(m, &ch, &prior, 1, &cfg).map(|x| x.1)).collect::<Result<_, _>>()?;
            for (mi, v) in g.iter().enumerate() {
                sums[mi][ai] += v;
            }
            if a == 0.5 {
                ba += (g[2] < g[1] - tol) as usize;
                ac += (g[1] < g[3] - tol) as usize;
                b3 += (g[2] < g[4] - tol) as usize;
            }
        }
    }
    let increasing = sums.iter().all(|s| s.windows(2).all(|w| w[1] > w[0]));
    let means: Vec<String> = methods
        .iter()
        .zip(&sums)
        .map(|(m, s)| format!("{} [{}]", m.label(), s.iter().map(|v| format!("{:.3}", v / count as f64)).collect::<Vec<_>>().join(" ")))
        .collect();
    Ok((
        ba + ac + b3 == 0 && increasing,
        format!(
            "violations at P=0.5I: II.b<II.a {ba}, II.a<II.c {ac}, II.b<III {b3} of {count}; mean nats over P=0,.25,.5,.75: {}",
            means.join(", ")
        ),
    ))
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion6() -> Check {
    let cfg = ExperimentConfig::parse(
        r#"{"experiment": "asympt-check", "channel": {"random_mimo": {"n": 5, "k": 5, "count": 1}},
            "snr_db": [60, 50, 40, -40, -50, -60], "alpha": [0.5], "nu": [1], "seed": 5}"#,
    )?;
    let rows = asympt_check(&cfg)?;
    let (lo, hi) = (&rows[0], &rows[5]);
    let gap_lo = ((lo.gmi_iic - lo.gmi_ezf) / lo.gmi_ezf).abs().max(((lo.gmi_iii - lo.gmi_ezf) / lo.gmi_ezf).abs());
    let gap_hi = ((hi.gmi_iic - hi.gmi_tmf) / hi.gmi_tmf).abs().max(((hi.gmi_iii - hi.gmi_tmf) / hi.gmi_tmf).abs());
    let s_lo = slope(&rows[..3].iter().map(|r| (r.n0, r.delta2)).collect::<Vec<_>>());
    let s_hi = slope(&rows[3..].iter().map(|r| (r.n0, r.delta2)).collect::<Vec<_>>());
    let pass = gap_lo <= 0.01 && gap_hi <= 0.01 && (s_lo - 1.0).abs() <= 0.15 && (s_hi + 2.0).abs() <= 0.15;
    Ok((
        pass,
        format!("gap to EZF at N0=1e-6 {gap_lo:.2e}, gap to TMF at N0=1e6 {gap_hi:.2e}, δ2 slopes {s_lo:+.3} (low N0) {s_hi:+.3} (high N0)"),
    ))
}

fn criterion7() -> Check {
    let cfg = OptimizerConfig::default();
    let tol = 1e-7;
    let grid = QuadratureGrid::default();
    let (mut p2_out, mut p2_in, mut p4_out, mut p4_in) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for s in 0..5u64 {
        let ch = make_random_mimo(5, 5, 5000 + s).with_n0(0.2);
        let h = ch.h()?.clone();
        let prior = PriorState::uniform(5, 0.5);
        let r = method1_optimize(&ch, &prior, 1, &cfg)?;
        let res = prop2_residuals(r.forney.as_ref().ok_or("no Forney parameters")?, &h);
        p2_out = p2_out.max(res.outside / res.scale);
        p2_in = p2_in.max(res.inside);
        for (shape, nu_r) in [(RShape::A, 0), (RShape::B, 0), (RShape::C, 1)] {
            let r = method2_optimize(&ch, &prior, 1, shape, &cfg)?;
            let res = prop4_residuals(&r.params, &h, nu_r);
            p4_out = p4_out.max(res.outside / res.scale);
            if shape == RShape::C {
                p4_in = p4_in.max(res.inside);
            }
        }
    }
    // Proakis-C at 10 dB, ν = ν_R = 1.
    let hc = SpectralSeries::causal(&taps_of(Preset::ProakisC));
    let n0 = n0_from_snr_db(10.0);
    let (mut p8_out, mut p8_in) = (0.0f64, f64::INFINITY);
    for alpha in [0.1, 0.4, 0.8] {
        let d = isi_method2(&hc, n0, alpha, 1, 1, 40, &cfg, &grid)?;
        let c = check_prop8(&spectral_mse(&hc, n0, alpha, &grid)?, &d.g, &d.r, 1, 1, &grid)?;
        p8_out = p8_out.max(c.off_band);
        p8_in = p8_in.min(c.in_band);
    }
    let hb = SpectralSeries::causal(&taps_of(Preset::ProakisB));
    let d = isi_method1(&hb, n0, 0.5, 1, 24, &cfg, &grid)?;
    let p6 = check_prop6(&spectral_mse(&hb, n0, 0.5, &grid)?, &d.f, &d.r, 24, &grid)?;
    let hn = SpectralSeries::from_real_taps(&[1.0, 0.5, -0.2]);
    let d = isi_method1(&hn, n0, 0.5, 1, 24, &cfg, &grid)?;
    let p6n = check_prop6(&spectral_mse(&hn, n0, 0.5, &grid)?, &d.f, &d.r, 24, &grid)?;
    let ok2 = p2_out <= tol && p2_in > tol;
    let ok4 = p4_out <= tol && p4_in > tol;
    let ok8 = p8_out <= tol && p8_in > tol;
    let ok6 = p6.off_band <= tol && p6.in_band > tol;
    Ok((
        ok2 && ok4 && ok6 && ok8,
        format!(
            "residual off band / largest gap in band: Method I MIMO {p2_out:.1e} / {p2_in:.1e}; \
             Method II MIMO {p4_out:.1e} / {p4_in:.1e}; spectral II.c Proakis-C {p8_out:.1e} / {p8_in:.1e}; \
             spectral Method I Proakis-B {:.1e} / {:.1e} (null-free [1, .5, -.2]: {:.1e} / {:.1e})",
            p6.off_band, p6.in_band, p6n.off_band, p6n.in_band
        ),
    ))
}

fn fixture_h() -> CMat {
    from_real_rows(&[
        &[2.0, 0.0, -3.0, 5.0, 4.0],
        &[-5.0, 2.0, -1.0, 0.0, 2.0],
        &[2.0, -4.0, 3.0, 3.0, 3.0],
        &[-1.0, -5.0, -4.0, 1.0, 2.0],
        &[0.0, -2.0, 0.0, 5.0, 5.0],
    ])
}

/// Lower-bidiagonal target whose reversal `J F J` has diagonal `d` and
/// super-diagonal `e`.
fn flipped_bidiagonal(d: [f64; 5], e: [f64; 4]) -> CMat {
    CMat::from_fn(5, 5, |i, j| {
        let (a, b) = (4 - i, 4 - j);
        if a == b {
            c64(d[a], 0.0)
        } else if b == a + 1 {
            c64(e[a], 0.0)
        } else {
            ZERO
        }
    })
}

fn criterion8() -> Check {
    // Upper-bidiagonal targets on H are lower-bidiagonal targets on H J.
    let h = fixture_h();
    let ch = ChannelModel::matrix(CMat::from_fn(5, 5, |i, j| h[(i, 4 - j)]), 1.0);
    let prior = PriorState::uniform(5, 1.0);
    let f1 = flipped_bidiagonal([4.94, 0.21, 5.56, 0.61, 2.79], [4.45, 3.85, 1.76, 7.10]);
    let f2 = flipped_bidiagonal([2.03, 5.22, 7.43, 4.98, 10.11], [6.17, 3.56, 0.73, 4.32]);
    let obj = |f: &CMat| method1_objective(&ch, &prior, f, 1);
    let mimo = 0.5 * (obj(&f1)? + obj(&f2)?) - obj(&((&f1 + &f2) * c64(0.5, 0.0)))?;

    let grid = QuadratureGrid::default();
    let hc = SpectralSeries::causal(&taps_of(Preset::ProakisC));
    let mse = spectral_mse(&hc, 1.0, 1.0, &grid)?;
    let isi = |f: &[Complex64]| isi_method1_point(&mse, f, 40, &grid).map(|p| p.i1 + p.delta);
    let (a, b) = ([c64(0.1606, 0.0), c64(0.9009, 0.0)], [c64(0.2230, 0.0), c64(0.2035, 0.0)]);
    let isi_margin = 0.5 * (isi(&a)? + isi(&b)?) - isi(&[(a[0] + b[0]) * 0.5, (a[1] + b[1]) * 0.5])?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_mimo = f64::NEG_INFINITY;
    for s in 0..100usize {
        let k = 4 + s % 3;
        let nu = 1 + s % 2;
        let shape = [RShape::A, RShape::B, RShape::C][s % 3];
        let ch = make_random_mimo(k, k, 6000 + s as u64).with_n0(rng.gen_range(0.1..1.0));
        let prior = random_prior(&mut rng, k);
        let (g1, g2) = (random_g(&mut rng, k, nu, (1.0, 3.0), 0.3), random_g(&mut rng, k, nu, (1.0, 3.0), 0.3));
        let f = |g: &CMat| method2_objective(&ch, &prior, g, nu, shape);
        worst_mimo = worst_mimo.max(0.5 * (f(&g1)? + f(&g2)?) - f(&((&g1 + &g2) * c64(0.5, 0.0)))?);
    }
    let mut worst_isi = f64::NEG_INFINITY;
    for s in 0..100usize {
        let p = [Preset::ProakisB, Preset::ProakisC, Preset::Epr4][s % 3];
        let h = SpectralSeries::causal(&taps_of(p));
        let (nu, nu_r) = (1 + s % 2, s / 3 % 2);
        let mse = spectral_mse(&h, rng.gen_range(0.1..1.0), rng.gen_range(0.1..0.9), &grid)?;
        let mut draw = || {
            let mut g = SpectralSeries::zeros(nu);
            g.set(0, c64(rng.gen_range(1.0..3.0), 0.0));
            for l in 1..=nu as i64 {
                let z = c64(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
                g.set(l, z);
                g.set(-l, z.conj());
            }
            g
        };
        let (g1, g2) = (draw(), draw());
        let mut mid = SpectralSeries::zeros(nu);
        for l in -(nu as i64)..=nu as i64 {
            mid.set(l, (g1.get(l) + g2.get(l)) * 0.5);
        }
        let f = |g: &SpectralSeries| isi_method2_point(&mse, g, nu_r, 40, &grid).map(|p| p.i2 + p.delta);
        worst_isi = worst_isi.max(0.5 * (f(&g1)? + f(&g2)?) - f(&mid)?);
    }
    Ok((
        mimo > 1e-6 && isi_margin > 1e-6 && worst_mimo <= 1e-10 && worst_isi <= 1e-10,
        format!(
            "Method I chord excess: MIMO {mimo:.3e}, ISI {isi_margin:.3e}; Method II worst chord excess: MIMO {worst_mimo:.1e}, ISI {worst_isi:.1e} (100 each)"
        ),
    ))
}

fn criterion9() -> Check {
    let start = Instant::now();
    let cfg = OptimizerConfig::default();
    let grid = QuadratureGrid::default();
    let taps = taps_of(Preset::ProakisB);
    let h = SpectralSeries::causal(&taps);
    let (k, n0, nu) = (256, 0.5, 1);
    let mut gaps = Vec::new();
    let m = mse_matrix(&chanshort::channel::toeplitz_channel(&taps, k), n0)?;
    let g = solve_optimal_g_banded(&m, nu)?;
    let t3 = theorem3_optimal_g(&spectral_mse(&h, n0, 0.0, &grid)?.m, nu, &grid)?;
    gaps.push(("optimal G".to_string(), theorem2_objective(&m, &g)? / k as f64 - t3.rate));
    for alpha in [0.0, 0.5] {
        let d = isi_method2(&h, n0, alpha, nu, nu, 24, &cfg, &grid)?;
        gaps.push((format!("II α={alpha}"), section_gmi(&taps, n0, alpha, &d.v, &d.r, &d.g, k)? - d.rate));
    }
    let d = isi_method3(&h, n0, 0.5, nu, &grid)?;
    gaps.push(("III α=0.5".into(), section_gmi(&taps, n0, 0.5, &d.v, &d.r, &d.g, k)? - d.rate));
    let secs = start.elapsed().as_secs_f64();
    let worst = gaps.iter().map(|g| g.1.abs()).fold(0.0, f64::max);
    let text: Vec<String> = gaps.iter().map(|(n, g)| format!("{n} {g:+.1e}")).collect();
    Ok((worst <= 0.01 && secs < 30.0, format!("K=256 minus spectral rate (nats): {}; {secs:.1} s", text.join(", "))))
}

/// Extrinsic bit LLRs of `exp(2 Re{x^H ŷ} - x^H G x)` times the prior.
fn enumerate_llrs(y: &[Complex64], g: &CMat, priors: &[f64]) -> Vec<f64> {
    let c = Constellation::Qpsk;
    let pts = c.points().unwrap();
    let (q, m, k) = (pts.len(), 2, y.len());
    let lps: Vec<Vec<f64>> = (0..k).map(|t| symbol_log_priors(&priors[t * m..(t + 1) * m], m)).collect();
    let yv = CVec::from_vec(y.to_vec());
    let weights: Vec<(Vec<usize>, f64)> = (0..q.pow(k as u32))
        .map(|idx| {
            let d: Vec<usize> = (0..k).map(|t| idx / q.pow(t as u32) % q).collect();
            let x = CVec::from_iterator(k, d.iter().map(|&i| pts[i]));
            let w = 2.0 * (x.adjoint() * &yv)[(0, 0)].re - (x.adjoint() * g * &x)[(0, 0)].re + (0..k).map(|t| lps[t][d[t]]).sum::<f64>();
            (d, w)
        })
        .collect();
    let mut out = Vec::new();
    for t in 0..k {
        for b in 0..m {
            let lse = |bit: usize| {
                let v: Vec<f64> = weights.iter().filter(|(d, _)| d[t] >> (m - 1 - b) & 1 == bit).map(|(_, w)| *w).collect();
                let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                mx + v.iter().map(|w| (w - mx).exp()).sum::<f64>().ln()
            };
            let (p0, p1) = bit_log_probs(priors[t * m + b]);
            out.push(lse(0) - lse(1) - (p0 - p1));
        }
    }
    out
}

fn criterion10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bcjr = 0.0f64;
    for k in 1..=3 {
        for _ in 0..10 {
            let a = CMat::from_fn(k, k, |_, _| complex_gaussian(&mut rng, 1.0));
            let g = hermitize(&(a.adjoint() * &a));
            let y: Vec<Complex64> = (0..k).map(|_| complex_gaussian(&mut rng, 2.0)).collect();
            let priors: Vec<f64> = (0..2 * k).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let want = enumerate_llrs(&y, &g, &priors);
            let p = CsParams { v: CMat::zeros(k, k), r: CMat::zeros(k, k), g, band: BandSpec::new(k, k - 1, RShape::B) };
            let got = bcjr_demodulate(&y, &p, &TrellisSpec::new(Constellation::Qpsk, k - 1), &priors)?;
            bcjr = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(bcjr, f64::max);
        }
    }
    let (mut pic, mut flips) = (0.0f64, 0usize);
    for (n, k, c) in [(4, 4, Constellation::Qpsk), (4, 4, Constellation::Qam16), (6, 4, Constellation::Qpsk), (4, 6, Constellation::Qpsk)] {
        for trial in 0..5u64 {
            let ch = make_random_mimo(n, k, 7000 + trial).with_n0(0.3).with_constellation(c);
            let m = c.bits_per_symbol()?;
            let llrs: Vec<f64> = (0..k * m).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<Complex64> = (0..n).map(|_| complex_gaussian(&mut rng, 1.3)).collect();
            let direct = lmmse_pic_demodulate(&y, &ch, &llrs)?;
            let prior = priors_from_llrs(&llrs, c)?;
            let d = method3_design(&ch, &prior, 0)?;
            let piped = bcjr_demodulate(&mimo_front_end(&d.params, &y, &prior.x_hat), &d.params, &TrellisSpec::new(c, 0), &llrs)?;
            for (a, b) in direct.iter().zip(&piped) {
                pic = pic.max((a - b).abs());
                flips += (a.is_sign_negative() != b.is_sign_negative()) as usize;
            }
        }
    }
    Ok((
        bcjr <= 1e-9 && pic <= 1e-9 && flips == 0,
        format!("BCJR vs enumeration {bcjr:.1e}; LMMSE-PIC vs Method III ν=0: max LLR gap {pic:.1e}, {flips} sign flips"),
    ))
}

fn link_config(preset: &str, snr: f64, methods: &str, nu: &str) -> Result<ExperimentConfig, Box<dyn std::error::Error>> {
    Ok(ExperimentConfig::parse(&format!(
        r#"{{"experiment": "link-sim", "channel": {{"preset": {{"name": "{preset}"}}}}, "snr_db": [{snr}],
            "methods": [{methods}], "nu": [{nu}], "seed": 3,
            "link": {{"blocks": 300, "max_block_errors": 1000000,
                "tx": {{"constellation": "Qpsk", "channel_interleaver_seed": 7,
                    "code": {{"kind": "Turbo", "info_bits": 512, "rate": 0.665, "interleaver_seed": 1, "iterations": 8, "max_log": false}}}}}}}}"#
    ))?)
}

fn bler(points: &[LinkPoint], method: RxMethod, nu: usize, iteration: usize) -> f64 {
    points.iter().find(|p| p.method == method && p.nu == nu && p.iteration == iteration).map_or(f64::NAN, LinkPoint::bler)
}

fn criterion11() -> Check {
    let start = Instant::now();
    let cs = [RxMethod::I, RxMethod::IIb, RxMethod::IIc, RxMethod::III, RxMethod::LmmsePic];
    let pb = link_sim(&link_config("ProakisB", 6.5, r#""Map", "I", "IIb", "IIc", "III", "LmmsePic""#, "1")?, None)?;
    let ep = link_sim(&link_config("Epr4", 6.0, r#""IIc""#, "1, 2")?, None)?;
    let secs = start.elapsed().as_secs_f64();
    let (map, iic, pic) = (bler(&pb, RxMethod::Map, 1, 3), bler(&pb, RxMethod::IIc, 1, 3), bler(&pb, RxMethod::LmmsePic, 1, 3));
    let ordered = map <= iic && iic <= pic;
    let monotone = cs.iter().all(|&m| (1..3).all(|it| bler(&pb, m, 1, it + 1) <= bler(&pb, m, 1, it)));
    let (e1, e2) = (bler(&ep, RxMethod::IIc, 1, 3), bler(&ep, RxMethod::IIc, 2, 3));
    let iters: Vec<String> = cs
        .iter()
        .map(|&m| format!("{} {}", m.label(), (1..=3).map(|it| format!("{:.3}", bler(&pb, m, 1, it))).collect::<Vec<_>>().join("/")))
        .collect();
    Ok((
        ordered && monotone && e2 <= e1 && secs <= 600.0,
        format!(
            "Proakis-B 6.5 dB, 300 blocks, BLER at iteration 3: MAP {map:.3}, II.c {iic:.3}, LMMSE-PIC {pic:.3}; per iteration: {}; \
             EPR4 6 dB II.c ν=1 {e1:.3} ν=2 {e2:.3}; {secs:.0} s",
            iters.join(", ")
        ),
    ))
}

fn criterion12() -> Check {
    let cfg = OptimizerConfig::default();
    let small = ExperimentConfig::parse(
        r#"{"experiment": "perm-search", "channel": {"random_mimo": {"n": 3, "k": 3, "count": 30}},
            "snr_db": [10], "alpha": [0.5], "nu": [1], "seed": 12, "perm": {"mode": "Exhaustive", "method": "IIc"}}"#,
    )?;
    let n0 = n0_from_snr_db(10.0);
    let prior = PriorState::uniform(3, 0.5);
    let mut worst = 0.0f64;
    for row in perm_search(&small)? {
        let Realized::Mimo(h) = realize(&small.channel, small.seed, row.realization) else { return Err("expected a MIMO channel".into()) };
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut best = f64::NEG_INFINITY;
        for o in orders {
            let ch = ChannelModel::matrix(permute_columns(&h, &o), n0);
            best = best.max(mimo_design(RxMethod::IIc, &ch, &prior, 1, &cfg)?.1);
        }
        worst = worst.max((row.permuted_gmi - best).abs());
    }
    let large = ExperimentConfig::parse(
        r#"{"experiment": "perm-search", "channel": {"random_mimo": {"n": 5, "k": 5, "count": 200}},
            "snr_db": [10], "alpha": [0.5], "nu": [1], "seed": 12, "perm": {"mode": "EnergyBased", "method": "IIc"}}"#,
    )?;
    let rows = perm_search(&large)?;
    let n = rows.len() as f64;
    let ident = rows.iter().map(|r| r.identity_gmi).sum::<f64>() / n;
    let perm = rows.iter().map(|r| r.permuted_gmi).sum::<f64>() / n;
    Ok((
        worst <= 1e-9 && perm >= ident,
        format!("K=3 exhaustive vs brute force max gap {worst:.1e} (30 channels); K=5 energy-based mean {perm:.4} vs unpermuted {ident:.4} nats (200 channels)"),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("banded optimal G solver", criterion1),
        ("gradient fidelity", criterion2),
        ("GMI oracle equality", criterion3),
        ("pathological triple", criterion4),
        ("R shape ordering", criterion5),
        ("SNR asymptotics", criterion6),
        ("structural band matches", criterion7),
        ("non-concavity fixtures", criterion8),
        ("finite section vs spectral rate", criterion9),
        ("BCJR correctness", criterion10),
        ("link-level orderings", criterion11),
        ("permutation study", criterion12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += !pass as usize;
        println!("{} criterion {} ({name}): {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
