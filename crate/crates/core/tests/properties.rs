use proptest::prelude::*;

use mlpolar::polar::{polar_transform, sc_decode, select_frozen, PolarCode};
use mlpolar::sbp::{gray_labeling, profile_variance, sp_labeling, CapacityProfile};

fn code_and_words() -> impl Strategy<Value = (u32, Vec<usize>, Vec<u8>, Vec<u8>)> {
    (1u32..=7).prop_flat_map(|n| {
        let len = 1usize << n;
        proptest::sample::subsequence((0..len).collect::<Vec<_>>(), 0..=len).prop_flat_map(move |info| {
            let k = info.len();
            (
                Just(n),
                Just(info),
                proptest::collection::vec(0u8..2, k),
                proptest::collection::vec(0u8..2, k),
            )
        })
    })
}

proptest! {
    #[test]
    fn encoding_is_linear((n, info, a, b) in code_and_words()) {
        let code = PolarCode::new(n, info).unwrap();
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ca = code.encode(&a).unwrap();
        let cb = code.encode(&b).unwrap();
        let cs = code.encode(&sum).unwrap();
        let xored: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(cs, xored);
    }

    #[test]
    fn transform_is_an_involution(bits in proptest::collection::vec(0u8..2, 64)) {
        let mut x = bits.clone();
        polar_transform(&mut x);
        polar_transform(&mut x);
        prop_assert_eq!(x, bits);
    }

    #[test]
    fn sc_recovers_words_from_clean_llrs((n, info, a, _b) in code_and_words()) {
        let code = PolarCode::new(n, info).unwrap();
        let c = code.encode(&a).unwrap();
        let llrs: Vec<f64> = c.iter().map(|&b| if b == 0 { 8.0 } else { -8.0 }).collect();
        prop_assert_eq!(sc_decode(&code, &llrs).unwrap().info_bits, a);
    }

    #[test]
    fn frozen_choice_follows_permutations(
        caps in proptest::collection::hash_set(0u32..1_000_000, 16),
        k in 0usize..=16,
        seed in any::<u64>(),
    ) {
        let caps: Vec<f64> = caps.into_iter().map(|c| c as f64 / 1e6).collect();
        let profile = CapacityProfile::new(caps.clone()).unwrap();
        let base = select_frozen(&profile, k).unwrap();

        // shuffle positions with a simple LCG-driven Fisher-Yates
        let mut perm: Vec<usize> = (0..16).collect();
        let mut s = seed;
        for i in (1..16).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut shuffled = vec![0.0; 16];
        for (i, &p) in perm.iter().enumerate() {
            shuffled[p] = caps[i];
        }
        let moved = select_frozen(&CapacityProfile::new(shuffled).unwrap(), k).unwrap();
        let mut mapped: Vec<usize> = base.info_set().iter().map(|&i| perm[i]).collect();
        mapped.sort_unstable();
        prop_assert_eq!(mapped, moved.info_set().to_vec());
    }

    #[test]
    fn information_sets_are_nested(caps in (0u32..=6).prop_flat_map(|n| proptest::collection::vec(0.0f64..=1.0, 1usize << n))) {
        let profile = CapacityProfile::new(caps.clone()).unwrap();
        let mut prev: Vec<usize> = Vec::new();
        for k in 0..=caps.len() {
            let code = select_frozen(&profile, k).unwrap();
            prop_assert!(prev.iter().all(|i| code.info_set().contains(i)));
            prev = code.info_set().to_vec();
        }
    }

    #[test]
    fn variance_is_bounded_by_mean(caps in proptest::collection::vec(0.0f64..=1.0, 1..200)) {
        let profile = CapacityProfile::new(caps).unwrap();
        let m = profile.mean().unwrap();
        let v = profile_variance(&profile).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(v <= m * (1.0 - m) + 1e-12);
    }

    #[test]
    fn labelings_round_trip(m in 1u32..=8, raw in any::<usize>()) {
        for lab in [sp_labeling(m).unwrap(), gray_labeling(m).unwrap()] {
            let g = raw % lab.size();
            let p = lab.point(g);
            prop_assert_eq!(lab.label(p), g);
            prop_assert_eq!(lab.point_of_bits(&lab.bits_of_point(p)), p);
        }
    }
}

#[test]
fn gray_neighbours_differ_in_one_bit() {
    for m in 1..=8 {
        let lab = gray_labeling(m).unwrap();
        for p in 1..lab.size() {
            assert_eq!((lab.label(p) ^ lab.label(p - 1)).count_ones(), 1);
        }
    }
}
