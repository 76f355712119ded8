use chanshort::channel::{bit_log_probs, complex_gaussian, make_random_mimo, priors_from_llrs, symbol_log_priors, ChannelModel, Constellation, PriorState};
use chanshort::gmi::{map_params, CsParams};
use chanshort::linalg::{c64, hermitize, BandSpec, CMat, CVec, Complex64, RShape};
use chanshort::methods::{method3_design, OptimizerConfig};
use chanshort::rx::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Extrinsic bit LLRs of `exp(2Re{x^H ŷ} - x^H G x)` times the prior, by
/// enumerating every symbol vector.
fn brute_force(y_hat: &[Complex64], g: &CMat, c: Constellation, priors: &[f64]) -> Vec<f64> {
    let pts = c.points().unwrap();
    let (q, m, k) = (pts.len(), c.bits_per_symbol().unwrap(), y_hat.len());
    let lps: Vec<Vec<f64>> = (0..k).map(|t| symbol_log_priors(&priors[t * m..(t + 1) * m], m)).collect();
    let mut weights = Vec::new();
    for idx in 0..q.pow(k as u32) {
        let d: Vec<usize> = (0..k).map(|t| idx / q.pow(t as u32) % q).collect();
        let x = CVec::from_iterator(k, d.iter().map(|&i| pts[i]));
        let lin = (x.adjoint() * CVec::from_vec(y_hat.to_vec()))[(0, 0)].re;
        let quad = (x.adjoint() * g * &x)[(0, 0)].re;
        let lp: f64 = (0..k).map(|t| lps[t][d[t]]).sum();
        weights.push((d, 2.0 * lin - quad + lp));
    }
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

fn params_with_g(g: CMat) -> CsParams {
    let k = g.nrows();
    CsParams { v: CMat::zeros(k, k), r: CMat::zeros(k, k), g, band: BandSpec::new(k, k - 1, RShape::B) }
}

#[test]
fn bcjr_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for c in [Constellation::Qpsk, Constellation::Qam16] {
        let kmax = if c == Constellation::Qpsk { 3 } else { 2 };
        for k in 1..=kmax {
            for _ in 0..5 {
                let a = CMat::from_fn(k, k, |_, _| complex_gaussian(&mut rng, 1.0));
                let g = hermitize(&(a.adjoint() * &a));
                let y: Vec<Complex64> = (0..k).map(|_| complex_gaussian(&mut rng, 2.0)).collect();
                let m = c.bits_per_symbol().unwrap();
                let priors: Vec<f64> = (0..k * m).map(|_| rng.gen_range(-4.0..4.0)).collect();
                let want = brute_force(&y, &g, c, &priors);
                let got = bcjr_demodulate(&y, &params_with_g(g), &TrellisSpec::new(c, k - 1), &priors).unwrap();
                let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err <= 1e-9, "{c:?} K {k}: {err}");
            }
        }
    }
}

#[test]
fn reduced_memory_drops_out_of_band_terms() {
    // With G banded to ν the ν-memory trellis is exact.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let k = 3;
    let a = CMat::from_fn(k, k, |i, j| if i >= j && i - j <= 1 { complex_gaussian(&mut rng, 1.0) } else { c64(0.0, 0.0) });
    let g = hermitize(&(a.adjoint() * &a));
    let y: Vec<Complex64> = (0..k).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
    let priors = vec![0.3; 2 * k];
    let want = brute_force(&y, &g, Constellation::Qpsk, &priors);
    let got = bcjr_demodulate(&y, &params_with_g(g), &TrellisSpec::new(Constellation::Qpsk, 1), &priors).unwrap();
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn noiseless_map_recovers_symbols() {
    let ch = make_random_mimo(4, 3, 8).with_n0(1e-4).with_constellation(Constellation::Qpsk);
    let h = ch.h().unwrap().clone();
    let bits = [0u8, 1, 1, 1, 0, 0];
    let x = Constellation::Qpsk.modulate(&bits).unwrap();
    let y: Vec<Complex64> = (&h * CVec::from_vec(x)).iter().cloned().collect();
    let p = map_params(&ch).unwrap();
    let y_hat = mimo_front_end(&p, &y, &[c64(0.0, 0.0); 3]);
    let llr = bcjr_demodulate(&y_hat, &p, &TrellisSpec::new(Constellation::Qpsk, 2), &[0.0; 6]).unwrap();
    for (l, b) in llr.iter().zip(bits) {
        assert_eq!(*l < 0.0, b == 1);
    }
}

#[test]
fn map_front_end_gives_true_posteriors() {
    // R = 0 and V = H^H / N0: the mismatched metric is the likelihood.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let ch = make_random_mimo(3, 3, 2).with_n0(0.4).with_constellation(Constellation::Qpsk);
    let h = ch.h().unwrap().clone();
    let y: Vec<Complex64> = (0..3).map(|_| complex_gaussian(&mut rng, 1.5)).collect();
    let priors: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let p = map_params(&ch).unwrap();
    let y_hat = mimo_front_end(&p, &y, &[c64(0.0, 0.0); 3]);
    let got = bcjr_demodulate(&y_hat, &p, &TrellisSpec::new(Constellation::Qpsk, 2), &priors).unwrap();
    // Likelihood exp(-|y - Hx|^2 / N0) by enumeration.
    let pts = Constellation::Qpsk.points().unwrap();
    let yv = CVec::from_vec(y);
    for t in 0..3 {
        for b in 0..2 {
            let (mut l0, mut l1) = (Vec::new(), Vec::new());
            for idx in 0..64usize {
                let d = [idx % 4, idx / 4 % 4, idx / 16];
                let x = CVec::from_iterator(3, d.iter().map(|&i| pts[i]));
                let mut w = -(&yv - &h * x).norm_squared() / 0.4;
                for s in 0..3 {
                    w += symbol_log_priors(&priors[2 * s..2 * s + 2], 2)[d[s]];
                }
                if d[t] >> (1 - b) & 1 == 0 { l0.push(w) } else { l1.push(w) }
            }
            let lse = |v: &[f64]| {
                let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                mx + v.iter().map(|w| (w - mx).exp()).sum::<f64>().ln()
            };
            let (p0, p1) = bit_log_probs(priors[2 * t + b]);
            let want = lse(&l0) - lse(&l1) - (p0 - p1);
            assert!((got[2 * t + b] - want).abs() < 1e-9);
        }
    }
}

#[test]
fn lmmse_pic_is_method3_without_memory() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (n, k, c) in [(4, 4, Constellation::Qpsk), (4, 4, Constellation::Qam16), (6, 4, Constellation::Qpsk), (4, 6, Constellation::Qpsk)] {
        for trial in 0..4u64 {
            let ch = make_random_mimo(n, k, 100 + trial).with_n0(0.3).with_constellation(c);
            let m = c.bits_per_symbol().unwrap();
            let llrs: Vec<f64> = (0..k * m).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<Complex64> = (0..n).map(|_| complex_gaussian(&mut rng, 1.3)).collect();
            let direct = lmmse_pic_demodulate(&y, &ch, &llrs).unwrap();
            let prior = priors_from_llrs(&llrs, c).unwrap();
            let d = method3_design(&ch, &prior, 0).unwrap();
            let y_hat = mimo_front_end(&d.params, &y, &prior.x_hat);
            let piped = bcjr_demodulate(&y_hat, &d.params, &TrellisSpec::new(c, 0), &llrs).unwrap();
            for (a, b) in direct.iter().zip(&piped) {
                assert!((a - b).abs() <= 1e-9, "{n}x{k} {c:?}: {a} vs {b}");
                assert_eq!(a.is_sign_negative(), b.is_sign_negative());
            }
        }
    }
}

#[test]
fn design_gmi_grows_with_prior_quality() {
    let cfg = OptimizerConfig::default();
    for seed in 0..3 {
        let ch = make_random_mimo(5, 5, 40 + seed).with_n0(0.2);
        for method in [RxMethod::I, RxMethod::IIa, RxMethod::IIb, RxMethod::IIc, RxMethod::III] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut p = vec![0.0; 5];
            let mut last = f64::NEG_INFINITY;
            for _ in 0..4 {
                let (_, gmi) = mimo_design(method, &ch, &PriorState::with_p(p.clone()), 1, &cfg).unwrap();
                assert!(gmi >= last - 1e-7, "{method:?}: {gmi} < {last}");
                last = gmi;
                p.iter_mut().for_each(|v| *v = (*v + rng.gen_range(0.0..0.3)).min(1.0));
            }
        }
    }
}

#[test]
fn isi_design_gmi_grows_with_alpha() {
    let taps: Vec<Complex64> = [0.407, 0.815, 0.407].iter().map(|&t| c64(t, 0.0)).collect();
    let ds = IsiDesigner::new(&taps, 0.3, DesignConfig::default()).unwrap();
    for method in [RxMethod::I, RxMethod::IIb, RxMethod::IIc, RxMethod::LmmsePic] {
        let rates: Vec<f64> = [0.0, 0.3, 0.6, 0.9].iter().map(|&a| ds.design(method, 1, a).unwrap().rate).collect();
        assert!(rates.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{method:?}: {rates:?}");
    }
}

#[test]
fn method3_rate_grows_on_gaussian_isi() {
    // Method III is not optimized over R, so on Proakis-B (null at π) its rate
    // falls with α for ν ≥ 1; the finite-section design does the same.
    let proakis: Vec<Complex64> = [0.407, 0.815, 0.407].iter().map(|&t| c64(t, 0.0)).collect();
    let ds = IsiDesigner::new(&proakis, 0.3, DesignConfig::default()).unwrap();
    assert!(ds.design(RxMethod::III, 1, 0.9).unwrap().rate < ds.design(RxMethod::III, 1, 0.0).unwrap().rate);
    for seed in 0..4 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taps: Vec<Complex64> = (0..3).map(|_| complex_gaussian(&mut rng, 1.0 / 3.0)).collect();
        let ds = IsiDesigner::new(&taps, 0.3, DesignConfig::default()).unwrap();
        let rates: Vec<f64> = [0.0, 0.3, 0.6, 0.9].iter().map(|&a| ds.design(RxMethod::III, 1, a).unwrap().rate).collect();
        assert!(rates.windows(2).all(|w| w[1] >= w[0] - 1e-9), "seed {seed}: {rates:?}");
    }
}

#[test]
fn trace_records_every_iteration() {
    let link = Link::new(
        ChannelModel::isi(vec![c64(0.5, 0.0), c64(0.5, 0.0), c64(-0.5, 0.0), c64(-0.5, 0.0)], 0.3),
        TxConfig { code: CodeConfig { info_bits: 128, ..Default::default() }, ..Default::default() },
        DesignConfig::default(),
    )
    .unwrap();
    let rx = ReceiverConfig { method: RxMethod::IIc, nu: 2, global_iters: 3, ..Default::default() };
    let t = run_iterative_receiver(&link, &rx, 5).unwrap();
    assert_eq!(t.records.len(), 3);
    assert_eq!(t.records[0].p_max, 0.0);
    assert!(t.records.iter().all(|r| r.design_gmi.is_finite() && r.llr_mean_abs > 0.0));
    let json = serde_json::to_string(&t).unwrap();
    assert_eq!(serde_json::from_str::<IterationTrace>(&json).unwrap(), t);
}
