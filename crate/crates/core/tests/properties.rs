use joint_select::closed_form::RegionPoint;
use joint_select::events::{
    best_item_map, classify_event, classify_event_literal, inverse_best_item_map, EventClass,
};
use joint_select::experiment::{read_csv_rows, write_csv_rows, RumContourRow, SuccessRow};
use joint_select::mallows::{anchored_table, AnchorWeight, MallowsSpec, PmfTable};
use joint_select::perm::kendall_tau;
use joint_select::pipeline::joint_pick;
use joint_select::Permutation;
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n as u16).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn pair_k() -> impl Strategy<Value = (Permutation, Permutation, usize)> {
    (2usize..=8).prop_flat_map(|n| (perm(n), perm(n), 1..n))
}

fn triple() -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (1usize..=9).prop_flat_map(|n| (perm(n), perm(n), perm(n)))
}

proptest! {
    #[test]
    fn display_parse_round_trip(p in (1usize..=12).prop_flat_map(perm)) {
        let back: Permutation = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn kendall_tau_is_a_metric((p, q, r) in triple()) {
        let d = |a: &Permutation, b: &Permutation| kendall_tau(a, b).unwrap().count();
        prop_assert_eq!(d(&p, &q), d(&q, &p));
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r));
        prop_assert_eq!(d(&p, &p), 0);
        let n = p.len() as u32;
        prop_assert!(d(&p, &q) <= n * (n - 1) / 2);
        prop_assert_eq!(d(&p.relabel(&r).unwrap(), &q.relabel(&r).unwrap()), d(&p, &q));
    }

    #[test]
    fn joint_pick_is_presented_and_preferred((a, h, k) in pair_k()) {
        let pick = joint_pick(&a, &h, k).unwrap();
        let top = a.top_k(k).unwrap();
        prop_assert!(top.contains(&pick));
        let pos = h.position_of(pick).unwrap();
        for x in top {
            prop_assert!(h.position_of(*x).unwrap() >= pos);
        }
    }

    #[test]
    fn classifiers_agree_and_maps_invert((a, h, k) in pair_k()) {
        let c = classify_event(&a, &h, k).unwrap();
        prop_assert_eq!(c, classify_event_literal(&a, &h, k).unwrap());
        match c {
            EventClass::Good => {
                let (fa, fh) = best_item_map(&a, &h, k).unwrap();
                prop_assert_eq!(classify_event(&fa, &fh, k).unwrap(), EventClass::Bad);
                prop_assert_eq!(inverse_best_item_map(&fa, &fh, k).unwrap(), (a, h));
            }
            EventClass::Bad => {
                let (ga, gh) = inverse_best_item_map(&a, &h, k).unwrap();
                prop_assert_eq!(classify_event(&ga, &gh, k).unwrap(), EventClass::Good);
                prop_assert_eq!(best_item_map(&ga, &gh, k).unwrap(), (a, h));
            }
            EventClass::Neutral => {
                prop_assert!(best_item_map(&a, &h, k).is_err());
                prop_assert!(inverse_best_item_map(&a, &h, k).is_err());
            }
        }
    }

    #[test]
    fn region_rows_round_trip(
        rows in prop::collection::vec(
            (1e-6f64..10.0, 1e-6f64..10.0).prop_map(|(a, h)| RegionPoint::at(a, h)),
            0..20,
        )
    ) {
        let mut buf = Vec::new();
        write_csv_rows(&rows, &mut buf).unwrap();
        let back: Vec<RegionPoint> = read_csv_rows(buf.as_slice()).unwrap();
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn contour_rows_round_trip(
        cells in prop::collection::vec(
            (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, any::<u64>(), any::<bool>()),
            1..10,
        )
    ) {
        let rows: Vec<RumContourRow> = cells
            .into_iter()
            .map(|(sa, sh, pj, pa, ph, seed, comp)| RumContourRow {
                sigma_a: sa,
                sigma_h: sh,
                p_joint: pj,
                p_algo: pa,
                p_human: ph,
                se_joint: pj / 100.0,
                se_algo: pa / 100.0,
                se_human: ph / 100.0,
                trials: 1000,
                seed,
                gap: pj - pa.max(ph),
                complementary: comp,
            })
            .collect();
        let mut buf = Vec::new();
        write_csv_rows(&rows, &mut buf).unwrap();
        let back: Vec<RumContourRow> = read_csv_rows(buf.as_slice()).unwrap();
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn success_rows_round_trip(
        p in prop::array::uniform8(0.0f64..=1.0),
        trials in any::<u64>(),
        seed in prop::option::of(any::<u64>()),
        rum in any::<bool>(),
    ) {
        let row = SuccessRow {
            model: if rum { "rum" } else { "mallows" }.to_string(),
            n: 5,
            k: 2,
            phi_a: (!rum).then_some(p[0] * 3.0),
            phi_h: (!rum).then_some(p[1] * 3.0),
            sigma_a: rum.then_some(p[0]),
            sigma_h: rum.then_some(p[1]),
            weight: p[2],
            p_joint: p[3],
            p_algo: p[4],
            p_human: p[5],
            p_human_unanchored: p[6],
            se_joint: p[7],
            se_algo: 0.0,
            se_human: 1e-300,
            se_human_unanchored: 0.1,
            trials,
            seed,
        };
        let mut buf = Vec::new();
        write_csv_rows(std::slice::from_ref(&row), &mut buf).unwrap();
        let back: Vec<SuccessRow> = read_csv_rows(buf.as_slice()).unwrap();
        prop_assert_eq!(back, vec![row]);
    }

    #[test]
    fn anchored_tables_round_trip(
        a in (2usize..=5).prop_flat_map(perm),
        phi in 0.01f64..4.0,
        w in 0.0f64..=1.0,
    ) {
        let spec = MallowsSpec::centered(a.len(), phi).unwrap();
        let t = anchored_table(&spec, &a, AnchorWeight::new(w).unwrap()).unwrap();
        prop_assert!((t.total() - 1.0).abs() < 1e-12);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        prop_assert_eq!(PmfTable::read_csv_entries(buf.as_slice()).unwrap(), t.entries);
    }
}
