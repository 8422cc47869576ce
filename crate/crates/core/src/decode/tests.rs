use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bits::polar_transform;
use crate::crc::{crc_compute, CrcSpec};

/// `uG` by the subset rule `G[i][j] = 1 iff j ⊆ i`, independent of the butterfly.
fn encode_naive(u: &[u8]) -> Vec<u8> {
    let n = u.len();
    (0..n)
        .map(|j| (0..n).filter(|&i| i & j == j).fold(0, |acc, i| acc ^ u[i]))
        .collect()
}

fn bsc_likelihood(x: &[u8], y: &[u8], p: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| if a == b { 1.0 - p } else { p })
        .product()
}

/// Straight-line SC: at each index sums the channel likelihood over every
/// completion of the suffix, given the decoder's own prefix. Returns
/// `log(P0/P1)` per index.
fn reference_llrs(y: &[u8], p: f64, prefix: &[u8]) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            let mut prob = [0.0f64; 2];
            for (b, slot) in prob.iter_mut().enumerate() {
                for s in 0..(1usize << (n - i - 1)) {
                    let mut u = prefix[..i].to_vec();
                    u.push(b as u8);
                    u.extend((0..n - i - 1).map(|k| ((s >> k) & 1) as u8));
                    *slot += bsc_likelihood(&encode_naive(&u), y, p);
                }
            }
            (prob[0] / prob[1]).ln()
        })
        .collect()
}

fn random_frozen(n: usize, count: usize, rng: &mut ChaCha8Rng) -> IndexSet {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    IndexSet::new(n, idx[..count].to_vec()).unwrap()
}

fn noisy(x: &[u8], p: f64, rng: &mut ChaCha8Rng) -> BitBlock {
    BitBlock::new(x.iter().map(|&b| b ^ rng.gen_bool(p) as u8).collect()).unwrap()
}

#[test]
fn llr_from_bsc_values() {
    let llr = llr_from_bsc(&BitBlock::zeros(4), 0.1f64).unwrap();
    for &v in llr.as_slice() {
        assert!((v - 9f64.ln()).abs() < 1e-12);
    }
    let obs = BitBlock::parse("0110").unwrap();
    let llr = llr_from_bsc(&obs, 0.2f64).unwrap();
    assert_eq!(llr.hard_decisions(), obs);
    let weak = llr_from_bsc(&obs, 0.5f64 - 1e-9).unwrap();
    assert!(weak.as_slice().iter().all(|v| v.abs() < 1e-8));
    assert!(llr_from_bsc(&obs, 0.5f64).is_err());
    assert!(llr_from_bsc(&obs, 0.0f64).is_err());
}

#[test]
fn all_frozen_returns_frozen_values() {
    let n = 16;
    let values = BitBlock::parse("1011001110001101").unwrap();
    let llr = llr_from_bsc(&BitBlock::zeros(n), 0.1f64).unwrap();
    let got = sc_decode(&llr, &IndexSet::full(n), &values).unwrap();
    assert_eq!(got.transform_word, values);
    let list = scl_decode(&llr, &IndexSet::full(n), &values, 4).unwrap();
    assert_eq!(list.len(), 1);
    assert_eq!(list[0].transform_word, values);
}

#[test]
fn noiseless_saturated_input_recovers_word() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [1usize, 2, 8, 64, 512] {
        let frozen = random_frozen(n, n / 3, &mut rng);
        let u = BitBlock::random(n, &mut rng);
        let x = polar_transform(&u).unwrap();
        let llr = LlrVector::new(
            x.as_slice().iter().map(|&b| if b == 0 { 40.0 } else { -40.0 }).collect(),
        )
        .unwrap();
        let fv = u.gather(frozen.as_slice());
        assert_eq!(sc_decode(&llr, &frozen, &fv).unwrap().transform_word, u);
        assert_eq!(scl_decode(&llr, &frozen, &fv, 4).unwrap()[0].transform_word, u);
    }
}

#[test]
fn sc_matches_straight_line_reference() {
    // n = 8, k = 4, p = 0.1.
    let (n, p) = (8usize, 0.1f64);
    let frozen = IndexSet::new(n, vec![0, 1, 2, 4]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut compared = 0;
    for _ in 0..300 {
        let u = BitBlock::random(n, &mut rng);
        let y = noisy(&encode_naive(u.as_slice()), p, &mut rng);
        let fv = u.gather(frozen.as_slice());
        let got = sc_decode(&llr_from_bsc(&y, p).unwrap(), &frozen, &fv).unwrap();
        let uhat = got.transform_word.as_slice();
        let reference = reference_llrs(y.as_slice(), p, uhat);
        let mut metric = 0.0;
        for i in 0..n {
            let l = reference[i];
            if frozen.contains(i) {
                assert_eq!(uhat[i], u[i]);
            } else if l.abs() > 1e-9 {
                assert_eq!(uhat[i], (l < 0.0) as u8, "index {i}, reference llr {l}");
                compared += 1;
            }
            let p0 = 1.0 / (1.0 + (-l).exp());
            metric -= if uhat[i] == 0 { p0.ln() } else { (1.0 - p0).ln() };
        }
        assert!((got.metric - metric).abs() < 1e-9, "{} vs {metric}", got.metric);
    }
    assert!(compared > 900);
}

/// Minimum Hamming distance between `y` and the coset of codewords that
/// agree with `fv` on `frozen`, by enumerating every information word.
fn ml_distance(y: &BitBlock, frozen: &IndexSet, fv: &BitBlock) -> usize {
    let n = y.len();
    let info = frozen.complement();
    let mut u = vec![0u8; n];
    for (&i, &v) in frozen.as_slice().iter().zip(fv.as_slice()) {
        u[i] = v;
    }
    (0..(1usize << info.len()))
        .map(|w| {
            for (k, &i) in info.as_slice().iter().enumerate() {
                u[i] = ((w >> k) & 1) as u8;
            }
            encode_naive(&u).iter().zip(y.as_slice()).filter(|(a, b)| a != b).count()
        })
        .min()
        .unwrap()
}

#[test]
fn full_list_champion_is_maximum_likelihood() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let p = 0.1f64;
    for (n, k) in [(8usize, 4usize), (16, 6)] {
        for _ in 0..100 {
            let frozen = random_frozen(n, n - k, &mut rng);
            let u = BitBlock::random(n, &mut rng);
            let y = noisy(&encode_naive(u.as_slice()), p, &mut rng);
            let fv = u.gather(frozen.as_slice());
            let list = scl_decode(&llr_from_bsc(&y, p).unwrap(), &frozen, &fv, 1 << k).unwrap();
            assert_eq!(list.len(), 1 << k);
            let champion = polar_transform(&list[0].transform_word).unwrap();
            assert_eq!(champion.hamming_distance(&y), ml_distance(&y, &frozen, &fv));
        }
    }
}

#[test]
fn list_of_one_equals_sc() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2usize, 8, 64, 256] {
        for _ in 0..50 {
            let frozen = random_frozen(n, n / 2, &mut rng);
            let u = BitBlock::random(n, &mut rng);
            let y = noisy(&encode_naive(u.as_slice()), 0.15, &mut rng);
            let llr = llr_from_bsc(&y, 0.15f64).unwrap();
            let fv = u.gather(frozen.as_slice());
            let sc = sc_decode(&llr, &frozen, &fv).unwrap();
            let scl = scl_decode(&llr, &frozen, &fv, 1).unwrap();
            assert_eq!(scl.len(), 1);
            assert_eq!(scl[0], sc);
        }
    }
}

#[test]
fn list_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 64;
    for _ in 0..40 {
        let frozen = random_frozen(n, 24, &mut rng);
        let u = BitBlock::random(n, &mut rng);
        let y = noisy(&polar_transform(&u).unwrap().into_vec(), 0.12, &mut rng);
        let llr = llr_from_bsc(&y, 0.12f64).unwrap();
        let fv = u.gather(frozen.as_slice());
        for l in [1usize, 2, 4, 8, 16] {
            let list = scl_decode(&llr, &frozen, &fv, l).unwrap();
            assert!(list.len() <= l);
            assert!(list.windows(2).all(|w| w[0].metric <= w[1].metric));
            for c in &list {
                assert_eq!(c.transform_word.gather(frozen.as_slice()), fv);
            }
        }
    }
}

#[test]
fn f32_decoder_agrees_on_clean_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 128;
    let rel = crate::construction::mc_estimate_reliabilities(n, 0.02, 20_000, 1).unwrap();
    let frozen = crate::construction::select_high_entropy_set(&rel, 40).unwrap();
    let mut agreed = 0;
    for _ in 0..50 {
        let u = BitBlock::random(n, &mut rng);
        let y = noisy(&polar_transform(&u).unwrap().into_vec(), 0.02, &mut rng);
        let fv = u.gather(frozen.as_slice());
        let a = scl_decode(&llr_from_bsc(&y, 0.02f64).unwrap(), &frozen, &fv, 4).unwrap();
        let b = scl_decode(&llr_from_bsc(&y, 0.02f32).unwrap(), &frozen, &fv, 4).unwrap();
        if a[0].transform_word == u {
            assert_eq!(b[0].transform_word, u);
            assert!((a[0].metric - b[0].metric as f64).abs() < 1e-3 * (1.0 + a[0].metric));
            agreed += 1;
        }
    }
    assert!(agreed >= 40, "{agreed}");
}

#[test]
fn decoder_dimension_errors() {
    let llr = llr_from_bsc(&BitBlock::zeros(8), 0.1f64).unwrap();
    let frozen = IndexSet::new(8, vec![0, 1]).unwrap();
    assert!(sc_decode(&llr, &frozen, &BitBlock::zeros(3)).is_err());
    assert!(scl_decode(&llr, &frozen, &BitBlock::zeros(2), 0).is_err());
    let wrong = IndexSet::new(16, vec![0]).unwrap();
    assert!(sc_decode(&llr, &wrong, &BitBlock::zeros(1)).is_err());
}

fn layout_for(n: usize, frozen: &IndexSet, c: usize) -> CrcLayout {
    let info = frozen.complement();
    let split = info.len() - c;
    let check = info.as_slice()[split..].to_vec();
    let message = (0..n).filter(|i| !check.contains(i)).collect();
    CrcLayout::new(n, message, check).unwrap()
}

fn with_crc(word: &BitBlock, layout: &CrcLayout, spec: &CrcSpec) -> BitBlock {
    let crc = crc_compute(&word.gather(layout.message()), spec);
    let mut out = word.clone();
    for (k, &i) in layout.check().iter().enumerate() {
        out.set(i, crc[k]);
    }
    out
}

#[test]
fn crc_select_prefers_valid_candidate() {
    let spec = CrcSpec::CCITT_FALSE;
    let n = 64;
    let frozen = IndexSet::new(n, (0..20).collect()).unwrap();
    let layout = layout_for(n, &frozen, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(64);

    // Record a noisy n = 64 list decode and inject the true word at rank 3.
    let mut v = BitBlock::random(n, &mut rng);
    for &i in frozen.as_slice() {
        v.set(i, 0);
    }
    let v = with_crc(&v, &layout, &spec);
    let y = noisy(&polar_transform(&v).unwrap().into_vec(), 0.08, &mut rng);
    let mut list =
        scl_decode(&llr_from_bsc(&y, 0.08f64).unwrap(), &frozen, &BitBlock::zeros(20), 8).unwrap();
    list.retain(|c| c.transform_word != v && !layout.verify(&c.transform_word, &spec));
    assert!(list.len() >= 3);
    list.truncate(3);
    let worst = list[2].metric;
    list.push(DecodeCandidate { transform_word: v.clone(), metric: worst + 1.0, crc_ok: None });

    let chosen = crc_aided_select(&list, &spec, &layout).unwrap();
    assert_eq!(chosen.transform_word, v);
    assert_eq!(chosen.crc_ok, Some(true));

    let failing = &list[..3];
    let fallback = crc_aided_select(failing, &spec, &layout).unwrap();
    assert_eq!(fallback.transform_word, failing[0].transform_word);
    assert_eq!(fallback.crc_ok, Some(false));

    let empty: [DecodeCandidate<f64>; 0] = [];
    assert!(matches!(crc_aided_select(&empty, &spec, &layout), Err(Error::EmptyCandidates)));
}

#[test]
fn crc_layout_rejects_overlap() {
    assert!(CrcLayout::new(8, vec![0, 1, 2], vec![2, 3]).is_err());
    assert!(CrcLayout::new(8, vec![0, 9], vec![]).is_err());
}
