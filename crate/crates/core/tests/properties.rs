use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use swcrdsa::analytics::oracle_decode;
use swcrdsa::decoder::{decode_placements, ScanOrder};
use swcrdsa::metrics::{loss_rate, throughput};
use swcrdsa::{
    run_simulation, AccessMode, DegreeDistribution, Instance, PacketId, ReceiverMemory,
    SchemeConfig, SlotIndex, SlotState, TimeConfig, TrafficConfig,
};

fn placements() -> impl Strategy<Value = Vec<Vec<SlotIndex>>> {
    prop::collection::vec(prop::collection::btree_set(0u64..24, 1..5), 1..16)
        .prop_map(|ps| ps.into_iter().map(|s| s.into_iter().collect()).collect())
}

fn dist() -> impl Strategy<Value = DegreeDistribution> {
    prop_oneof![
        Just(DegreeDistribution::regular(2).unwrap()),
        Just(DegreeDistribution::regular(3).unwrap()),
        Just(DegreeDistribution::irsa4()),
        Just(DegreeDistribution::irsa8()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_packet_is_decoded_xor_lost(
        d in dist(),
        framed in any::<bool>(),
        window in 8u32..60,
        extra in 0u32..3,
        lambda in 0.0f64..1.2,
        seed in any::<u64>(),
    ) {
        let scheme = if framed {
            SchemeConfig::framed(window, d)
        } else {
            SchemeConfig::sliding(window, window * (1 + extra), d)
        };
        let r = run_simulation(&scheme, &TrafficConfig::new(lambda, 3000, 100, seed), &TimeConfig::default())
            .unwrap();
        for p in &r.packets {
            prop_assert!(p.lost != p.decode_slot.is_some());
            prop_assert!(p.decode_slot.map_or(true, |s| s >= p.first_replica()));
            prop_assert_eq!(p.replica_slots.len(), p.degree as usize);
            match r.scheme.mode {
                AccessMode::SlidingWindow => {
                    prop_assert_eq!(p.replica_slots[0], p.arrival_slot);
                    prop_assert!(*p.replica_slots.last().unwrap() < p.arrival_slot + window as u64);
                }
                AccessMode::Framed => {
                    let frame = p.replica_slots[0] / window as u64;
                    prop_assert!(p.replica_slots.iter().all(|s| s / window as u64 == frame));
                    // the frame after the one the packet became ready in
                    prop_assert_eq!(frame, p.arrival_slot / window as u64 + 1);
                }
            }
        }
        let t = throughput(&r);
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!((0.0..=1.0).contains(&loss_rate(&r)));
        prop_assert_eq!(r.occupancy.iter().sum::<u64>(), r.window_slots());
    }

    #[test]
    fn streaming_decoder_matches_oracle(p in placements()) {
        let oracle = oracle_decode(&p);
        let got: BTreeSet<usize> = decode_placements(&p, 24, 50)
            .unwrap()
            .iter()
            .map(|e| e.packet_id.0 as usize)
            .collect();
        prop_assert_eq!(&got, &oracle.decoded);
        prop_assert!(oracle.residual_is_stopping_set(&p));
    }

    #[test]
    fn shorter_memory_never_decodes_more(p in placements(), cap in 1usize..24) {
        let full: BTreeSet<PacketId> = decode_placements(&p, 24, 50).unwrap().iter().map(|e| e.packet_id).collect();
        let short: BTreeSet<PacketId> = decode_placements(&p, cap, 50).unwrap().iter().map(|e| e.packet_id).collect();
        prop_assert!(short.is_subset(&full));
    }

    #[test]
    fn peel_is_a_fixpoint_and_order_free(p in placements()) {
        let mut inc = ReceiverMemory::sliding(32);
        let mut dec = ReceiverMemory::sliding(32);
        let ptrs: Vec<Arc<[SlotIndex]>> = p.iter().map(|s| s.as_slice().into()).collect();
        for s in 0..24u64 {
            let slot = || {
                let inst = (0..p.len())
                    .filter(|&i| p[i].contains(&s))
                    .map(|i| Instance::new(PacketId(i as u64), ptrs[i].clone()))
                    .collect();
                SlotState::new(s, inst)
            };
            inc.ingest_slot(slot()).unwrap();
            dec.ingest_slot(slot()).unwrap();
            let mut a = inc.peel_ordered(50, ScanOrder::Increasing);
            let mut b = dec.peel_ordered(50, ScanOrder::Decreasing);
            prop_assert!(inc.peel(50).is_empty());
            a.sort_by_key(|e| e.packet_id);
            b.sort_by_key(|e| e.packet_id);
            let key = |v: &[swcrdsa::DecodeEvent]| v.iter().map(|e| (e.packet_id, e.decode_slot)).collect::<Vec<_>>();
            prop_assert_eq!(key(&a), key(&b));
        }
    }
}

#[test]
fn idle_channel_has_no_losses() {
    for scheme in [
        SchemeConfig::framed(100, DegreeDistribution::irsa8()),
        SchemeConfig::sliding(100, 300, DegreeDistribution::irsa8()),
    ] {
        let r = run_simulation(&scheme, &TrafficConfig::new(0.0, 1_000_000, 1000, 1), &TimeConfig::default())
            .unwrap();
        assert!(r.packets.is_empty());
        assert_eq!(throughput(&r), 0.0);
        assert_eq!(loss_rate(&r), 0.0);
    }
}

#[test]
fn light_load_is_nearly_lossless() {
    for d in [DegreeDistribution::regular(2).unwrap(), DegreeDistribution::irsa4(), DegreeDistribution::irsa8()] {
        for scheme in [SchemeConfig::framed(100, d.clone()), SchemeConfig::sliding(100, 500, d.clone())] {
            let r = run_simulation(&scheme, &TrafficConfig::new(0.1, 100_000, 1000, 9), &TimeConfig::default())
                .unwrap();
            assert!(loss_rate(&r) < 1e-2, "{:?} {}", scheme.mode, loss_rate(&r));
        }
    }
}

#[test]
fn iteration_cap_is_not_binding_at_desk_scale() {
    for d in [DegreeDistribution::regular(2).unwrap(), DegreeDistribution::irsa8()] {
        for n in [100, 200] {
            for scheme in [SchemeConfig::framed(n, d.clone()), SchemeConfig::sliding(n, 5 * n, d.clone())] {
                let traffic = TrafficConfig::new(0.7, 30_000, 1000, 4);
                let capped = run_simulation(&scheme, &traffic, &TimeConfig::default()).unwrap();
                let free = run_simulation(&scheme.clone().with_max_ic_iterations(1_000_000), &traffic, &TimeConfig::default())
                    .unwrap();
                assert_eq!(capped.packets, free.packets);
            }
        }
    }
}
