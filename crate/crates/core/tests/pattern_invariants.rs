use curvedither::markov::{MarkovChain, MarkovParams};
use curvedither::metrics::{orientation_ratio, sign_runs};
use curvedither::pattern::{build_bank, circle_layout, curve_block, rasterize_circular, BankConfig, NoiseBlock, SiteSet};
use curvedither::rng::Rng;
use curvedither::synth::row_major_markov;
use curvedither::{transition_probability, PROBABILITY_COUNT};
use proptest::prelude::*;

fn stats(v: &[f32]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().map(|&x| x as f64).sum::<f64>() / n;
    let var = v.iter().map(|&x| (x as f64 - m).powi(2)).sum::<f64>() / n;
    (m, var)
}

fn curved_pair(p: f64, seed: u64) -> (NoiseBlock, NoiseBlock) {
    let circ = rasterize_circular(200, &MarkovParams::default().with_p(p), seed).unwrap();
    let mut rng = Rng::new(seed ^ 0xA5A5);
    let sites = SiteSet::random(100, 300, &mut rng).unwrap();
    let curved = curve_block(&circ, &sites, seed.wrapping_mul(31) + 1).unwrap();
    (circ, curved)
}

#[test]
fn curved_variance_tracks_circular() {
    for seed in 0..20 {
        let (circ, curved) = curved_pair(0.815, seed);
        let (_, vc) = stats(circ.values());
        let (_, vu) = stats(curved.values());
        assert!((vu / vc - 1.0).abs() <= 0.10, "seed {seed}: variance {vu} vs {vc}");
    }
}

#[test]
fn curved_mean_stays_near_circular() {
    let mut violations = Vec::new();
    for seed in 0..20 {
        let (circ, curved) = curved_pair(0.815, seed);
        let (mc, _) = stats(circ.values());
        let (mu, _) = stats(curved.values());
        if mu.abs() > mc.abs() + 0.02 {
            violations.push((seed, mc, mu));
        }
    }
    assert!(violations.is_empty(), "|mean(curved)| > |mean(circular)| + 0.02 for {violations:?}");
}

#[test]
fn curving_weakens_axis_alignment() {
    let mut failures = Vec::new();
    for k in 0..PROBABILITY_COUNT {
        let p = transition_probability(k);
        let params = MarkovParams::default().with_p(p);
        let bank = build_bank(&BankConfig {
            variants: 4,
            master_seed: 17,
            params,
            ..Default::default()
        })
        .unwrap();
        let curved: f64 = (0..4)
            .map(|v| {
                let b = bank.block(k, v);
                orientation_ratio(b.side(), b.side(), b.values())
            })
            .sum::<f64>()
            / 4.0;
        let raw = row_major_markov(1000, 1000, &params, 17).unwrap();
        let raw = orientation_ratio(1000, 1000, &raw);
        println!("p={p}: curved {curved:.4} raw {raw:.4}");
        if curved >= raw {
            failures.push((p, curved, raw));
        }
    }
    assert!(failures.is_empty(), "curved not less axis-aligned than raw at {failures:?}");
}

// the outermost circle is the first `samples` steps of the chain
fn outer_circle(params: &MarkovParams, seed: u64) -> Vec<(u8, f64)> {
    let n = circle_layout(200).unwrap()[0].samples;
    let mut chain = MarkovChain::new(*params, seed).unwrap();
    (0..n).map(|_| chain.step()).collect()
}

#[test]
fn circles_hold_chain_in_order() {
    let params = MarkovParams::default();
    let block = rasterize_circular(200, &params, 4).unwrap();
    let mut chain = MarkovChain::new(params, 4).unwrap();
    let c = 99.5;
    let mut checked = 0;
    // the outermost circles only graze the corners; walk inward until some
    // samples land inside, then compare a few circles there
    for circle in circle_layout(200).unwrap() {
        let (mut visible, mut matched) = (0, 0);
        for i in 0..circle.samples {
            let v = chain.step().1;
            let t = 2.0 * std::f64::consts::PI * i as f64 / circle.samples as f64;
            let (x, y) = ((c + circle.radius * t.cos()).round(), (c - circle.radius * t.sin()).round());
            if !(0.0..200.0).contains(&x) || !(0.0..200.0).contains(&y) {
                continue;
            }
            visible += 1;
            if block.get(x as usize, y as usize) == v as f32 {
                matched += 1;
            }
        }
        if visible > 0 {
            // the next circle in may overwrite a few pixels
            assert!(matched as f64 >= 0.5 * visible as f64, "r={}: {matched}/{visible}", circle.radius);
            checked += 1;
            if checked == 5 {
                break;
            }
        }
    }
    assert_eq!(checked, 5);
}

#[test]
fn outer_circle_run_lengths() {
    let q = 0.022_750_131_948_179_2; // P(N(2,1) < 0)
    for k in 0..PROBABILITY_COUNT {
        let p = transition_probability(k);
        let params = MarkovParams::default().with_p(p);
        let (mut states, mut state_runs, mut sign_count, mut n) = (0usize, 0usize, 0usize, 0usize);
        for seed in 0..40 {
            let seq = outer_circle(&params, seed);
            n += seq.len();
            states += seq.len();
            state_runs += 1 + seq.windows(2).filter(|w| w[0].0 != w[1].0).count();
            sign_count += sign_runs(seq.iter().map(|s| s.1));
        }
        let state_run = states as f64 / state_runs as f64;
        let expect = 1.0 / (1.0 - p);
        assert!((state_run / expect - 1.0).abs() <= 0.10, "p={p}: state run {state_run} vs {expect}");

        let flip = p * 2.0 * q * (1.0 - q) + (1.0 - p) * ((1.0 - q).powi(2) + q * q);
        let sign_run = n as f64 / sign_count as f64;
        assert!((sign_run * flip - 1.0).abs() <= 0.10, "p={p}: sign run {sign_run} vs {}", 1.0 / flip);
    }
}

#[test]
fn bank_is_thread_count_independent() {
    let cfg = BankConfig {
        block_side: 48,
        site_count: 30,
        variants: 3,
        master_seed: 99,
        ..Default::default()
    };
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = one.install(|| build_bank(&cfg).unwrap());
    let b = many.install(|| build_bank(&cfg).unwrap());
    assert!(a.bit_eq(&b));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curved_values_come_from_circular(seed in any::<u64>(), half in 2usize..24, sites in 1usize..20) {
        let side = half * 2;
        let sites = sites.min(half * half);
        let circ = rasterize_circular(side, &MarkovParams::default(), seed).unwrap();
        let mut rng = Rng::new(seed);
        let set = SiteSet::random(half, sites, &mut rng).unwrap();
        let curved = curve_block(&circ, &set, seed ^ 1).unwrap();
        let pool: std::collections::HashSet<u32> = circ.values().iter().map(|v| v.to_bits()).collect();
        prop_assert!(curved.values().iter().all(|v| pool.contains(&v.to_bits())));
    }
}
