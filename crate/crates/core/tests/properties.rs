use pareto_tree::oracle::{brute_best_metric, brute_frontier, reachable_pairs};
use pareto_tree::*;
use proptest::prelude::*;

fn pairs(max: u32, len: usize) -> impl Strategy<Value = Vec<BiPair>> {
    prop::collection::vec((0..=max, 0..=max).prop_map(BiPair::from), 0..=len)
}

fn front(max: u32, len: usize) -> impl Strategy<Value = ParetoFront> {
    pairs(max, len).prop_map(ParetoFront::nondom)
}

fn dataset(max_rows: usize, max_features: usize) -> impl Strategy<Value = Dataset> {
    let free = (1..=max_features).prop_flat_map(move |nf| {
        prop::collection::vec((prop::collection::vec(any::<bool>(), nf), any::<bool>()), 0..=max_rows).prop_map(
            move |rows| Dataset::from_instances(nf, rows.iter().map(|(f, l)| Instance::new(f, *l)).collect()),
        )
    });
    // few distinct rows, many label conflicts
    let pooled = (1..=max_features, 1..=5usize).prop_flat_map(move |(nf, k)| {
        (
            prop::collection::vec(prop::collection::vec(any::<bool>(), nf), k),
            prop::collection::vec((0..k, any::<bool>()), 0..=max_rows),
        )
            .prop_map(move |(pool, rows)| {
                Dataset::from_instances(nf, rows.iter().map(|&(i, l)| Instance::new(&pool[i], l)).collect())
            })
    });
    prop_oneof![free, pooled]
}

fn covers(lb: &[BiPair], p: BiPair) -> bool {
    lb.iter().any(|l| l.weakly_dominates(p))
}

fn all_configs() -> Vec<SolveConfig> {
    (0u32..32)
        .map(|mask| {
            Technique::ALL
                .iter()
                .enumerate()
                .fold(SolveConfig::new(3), |c, (i, &t)| c.set(t, mask & (1 << i) == 0))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn nondom_is_idempotent(v in pairs(20, 30)) {
        let once = nondom(v.iter().copied());
        prop_assert_eq!(nondom(once.iter()), once);
    }

    #[test]
    fn front_is_canonical(v in pairs(20, 30)) {
        let f = nondom(v.iter().copied());
        for w in f.points().windows(2) {
            prop_assert!(w[0].mp < w[1].mp && w[0].mn > w[1].mn);
        }
        if let (Some(first), Some(last)) = (f.points().first(), f.points().last()) {
            prop_assert_eq!(first.mp, v.iter().map(|p| p.mp).min().unwrap());
            prop_assert_eq!(last.mn, v.iter().map(|p| p.mn).min().unwrap());
        }
        for p in &v {
            prop_assert!(covers(f.points(), *p));
        }
    }

    #[test]
    fn merge_matches_pairwise_sums(a in front(15, 8), b in front(15, 8)) {
        let brute: Vec<BiPair> = a.iter().flat_map(|x| b.iter().map(move |y| BiPair::new(x.mp + y.mp, x.mn + y.mn))).collect();
        prop_assert_eq!(merge(&a, &b), nondom(brute));
    }

    #[test]
    fn merge_commutes_and_associates(a in front(10, 6), b in front(10, 6), c in front(10, 6)) {
        prop_assert_eq!(merge(&a, &b), merge(&b, &a));
        prop_assert_eq!(merge(&merge(&a, &b), &c), merge(&a, &merge(&b, &c)));
    }

    #[test]
    fn union_is_nondom_of_both(a in front(15, 8), b in front(15, 8)) {
        prop_assert_eq!(a.union(&b), nondom(a.iter().chain(b.iter())));
    }

    #[test]
    fn subtract_ub_only_keeps_exact_differences(u in pairs(20, 6), l in front(20, 6)) {
        let ub = BoundSet::new(u.iter().copied());
        for d in subtract_ub(&ub, &l).points() {
            prop_assert!(ub.points().iter().any(|&u| l.iter().any(|l| u.checked_sub(l) == Some(*d))));
        }
    }

    #[test]
    fn front_gt_is_monotone(l in pairs(15, 6), u in pairs(15, 6), shift in prop::collection::vec((0u32..5, 0u32..5), 6)) {
        let (lb, ub) = (BoundSet::new(l.iter().copied()), BoundSet::new(u.iter().copied()));
        let worse = BoundSet::new(lb.points().iter().zip(&shift).map(|(p, s)| BiPair::new(p.mp + s.0, p.mn + s.1)));
        if front_gt(&lb, &ub) {
            prop_assert!(front_gt(&worse, &ub));
        }
    }

    #[test]
    fn meet_is_intersection_of_up_sets(a in pairs(8, 5), b in pairs(8, 5)) {
        let (a, b) = (BoundSet::new(a), BoundSet::new(b));
        let m = a.meet(&b);
        for mp in 0..=9 {
            for mn in 0..=9 {
                let p = BiPair::new(mp, mn);
                prop_assert_eq!(covers(m.points(), p), covers(a.points(), p) && covers(b.points(), p));
            }
        }
    }

    #[test]
    fn split_partitions(d in dataset(20, 6)) {
        for f in 0..d.num_features() {
            let (absent, present) = d.split(f).unwrap();
            prop_assert!(absent.positives().is_disjoint(present.positives()));
            prop_assert!(absent.negatives().is_disjoint(present.negatives()));
            prop_assert_eq!(absent.len() + present.len(), d.len());
            prop_assert!(absent.instances().all(|i| !i.has_feature(f)));
            prop_assert!(present.instances().all(|i| i.has_feature(f)));
        }
    }

    #[test]
    fn frequency_table_matches_naive_count(d in dataset(20, 5)) {
        let fq = d.pairwise_counts();
        let lits: Vec<Literal> = (0..d.num_features()).flat_map(|f| [Literal::pos(f), Literal::neg(f)]).collect();
        let holds = |i: &Instance, a: Literal| i.has_feature(a.feature) == a.present;
        for &a in &lits {
            for &b in &lits {
                let pos = d.instances().filter(|i| i.label() && holds(i, a) && holds(i, b)).count() as u32;
                let neg = d.instances().filter(|i| !i.label() && holds(i, a) && holds(i, b)).count() as u32;
                prop_assert_eq!(fq.fq_pos(a, b), pos);
                prop_assert_eq!(fq.fq_neg(a, b), neg);
            }
        }
    }

    #[test]
    fn text_round_trip(d in dataset(20, 6)) {
        prop_assume!(!d.is_empty());
        let back = parse_dataset(&d.to_text()).unwrap();
        prop_assert_eq!(back.num_features(), d.num_features());
        prop_assert_eq!(back.to_text(), d.to_text());
        prop_assert_eq!(back, d);
    }

    #[test]
    fn difference_bounds_count_missing_instances(d in dataset(20, 4), f in 0usize..4) {
        let f = f % d.num_features();
        let (_, sub) = d.split(f).unwrap();
        let (bp, bn) = difference_bounds(&d, &sub).unwrap();
        prop_assert_eq!((bp, bn), (d.positives().len() - sub.positives().len(), d.negatives().len() - sub.negatives().len()));
        prop_assert_eq!(difference_bounds(&sub, &d).unwrap(), (0, 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shallow_matches_general_and_oracle(d in dataset(25, 6)) {
        let mut general = Solver::new(SolveConfig::new(2).without(Technique::Depth2));
        for k in 0..=2 {
            let shallow = solve_shallow(&d, k).unwrap();
            prop_assert_eq!(&shallow, &general.frontier(&d, k).unwrap());
            prop_assert_eq!(&shallow, &brute_frontier(&d, k).unwrap());
        }
    }

    #[test]
    fn deeper_is_never_worse(d in dataset(20, 6)) {
        let mut s = Solver::new(SolveConfig::new(3));
        let fronts: Vec<ParetoFront> = (0..=3).map(|k| s.frontier(&d, k).unwrap()).collect();
        for w in fronts.windows(2) {
            for p in w[0].iter() {
                prop_assert!(covers(w[1].points(), p));
            }
        }
    }

    #[test]
    fn every_configuration_finds_the_oracle_front(d in dataset(14, 5), mask in 0usize..32) {
        let config = all_configs()[mask];
        let mut s = Solver::new(config);
        for k in 0..=3 {
            prop_assert_eq!(s.frontier(&d, k).unwrap(), brute_frontier(&d, k).unwrap(), "depth {} config {:?}", k, config);
        }
    }

    #[test]
    fn bounded_solve_filters_the_true_front(d in dataset(16, 5), ub in pairs(12, 4), k in 0usize..=3) {
        let ub = BoundSet::new(ub);
        let truth = brute_frontier(&d, k).unwrap();
        let expected = truth.filter_undominated(&ub);
        let mut s = Solver::new(SolveConfig::new(3));
        prop_assert_eq!(s.solve(&d, k, &ub).unwrap(), expected);
    }

    #[test]
    fn warm_cache_agrees_with_cold(
        d in dataset(16, 5),
        calls in prop::collection::vec((0usize..=3, pairs(12, 3), any::<bool>()), 1..8),
    ) {
        let mut warm = Solver::new(SolveConfig::new(3));
        for (k, ub, unbounded) in calls {
            let ub = if unbounded { BoundSet::unbounded() } else { BoundSet::new(ub) };
            let mut cold = Solver::new(SolveConfig::new(3));
            prop_assert_eq!(warm.solve(&d, k, &ub).unwrap(), cold.solve(&d, k, &ub).unwrap());
        }
        for k in 0..=3 {
            prop_assert_eq!(warm.frontier(&d, k).unwrap(), brute_frontier(&d, k).unwrap());
        }
    }

    #[test]
    fn cached_lower_bounds_are_valid(
        d in dataset(16, 5),
        calls in prop::collection::vec((0usize..=3, pairs(12, 3)), 1..6),
    ) {
        let mut s = Solver::new(SolveConfig::new(3).without(Technique::Depth2));
        for (k, ub) in calls {
            s.solve(&d, k, &BoundSet::new(ub)).unwrap();
        }
        // every subset reachable by two splits, at every depth
        let mut subsets = vec![d.clone()];
        for f in 0..d.num_features() {
            let (a, b) = d.split(f).unwrap();
            for g in 0..d.num_features() {
                for c in [&a, &b] {
                    let (x, y) = c.split(g).unwrap();
                    subsets.extend([x, y]);
                }
            }
            subsets.extend([a, b]);
        }
        for sub in &subsets {
            for k in 0..=3 {
                let Some(entry) = s.cache_entry(sub, k) else { continue };
                let truth = brute_frontier(sub, k).unwrap();
                match entry.status {
                    CacheStatus::Optimal => prop_assert_eq!(&entry.front, &truth),
                    CacheStatus::LowerBound => {
                        for p in truth.iter() {
                            prop_assert!(covers(entry.front.points(), p), "{:?} not covered by {:?}", p, entry.front);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn similarity_and_lookahead_bounds_are_valid(d in dataset(18, 5), f in 0usize..5, g in 0usize..5, k in 0usize..=2) {
        let (f, g) = (f % d.num_features(), g % d.num_features());
        let (fa, fb) = d.split(f).unwrap();
        let children = [fa, fb.clone()];
        let (ga, gb) = fb.split(g).unwrap();
        for (reference, target) in [(&children[0], &children[1]), (&children[1], &children[0]), (&d, &ga), (&fb, &gb), (&gb, &d)] {
            let rf = brute_frontier(reference, k).unwrap();
            let (bp, bn) = difference_bounds(reference, target).unwrap();
            let lb = similarity_lb(&rf, bp as u32, bn as u32);
            for p in brute_frontier(target, k).unwrap().iter() {
                prop_assert!(covers(lb.points(), p));
            }
        }
        let lb = lookahead_lb(
            &brute_frontier(&children[0], k).unwrap().to_bound(),
            &brute_frontier(&children[1], k).unwrap().to_bound(),
        );
        let rooted_at_f = merge(&brute_frontier(&children[0], k).unwrap(), &brute_frontier(&children[1], k).unwrap());
        for p in rooted_at_f.iter() {
            prop_assert!(covers(lb.points(), p));
        }
    }

    #[test]
    fn witnesses_reproduce_their_points(d in dataset(20, 6), k in 0usize..=3) {
        let mut s = Solver::new(SolveConfig::new(3));
        let front = s.frontier(&d, k).unwrap();
        for p in front.iter() {
            let t = s.reconstruct_tree(&d, k, p).unwrap();
            prop_assert!(t.depth() <= k);
            prop_assert_eq!(t.evaluate(&d).unwrap(), p);
        }
    }

    #[test]
    fn front_suffices_for_every_metric(d in dataset(16, 5), k in 0usize..=3) {
        let mut s = Solver::new(SolveConfig::new(3));
        let front = s.frontier(&d, k).unwrap();
        let (p, n) = d.class_counts();
        for kind in MetricKind::BUILT_IN {
            let (_, v) = select_best(&front, kind, p as u32, n as u32).unwrap();
            prop_assert_eq!(v, brute_best_metric(&d, k, kind).unwrap());
        }
        let best = front.iter().map(|q| q.mp + q.mn).min().unwrap();
        let brute = reachable_pairs(&d, k).unwrap().into_iter().map(|q| q.mp + q.mn).min().unwrap();
        prop_assert_eq!(best, brute);
    }
}

#[test]
fn metrics_are_monotone() {
    for n_pos in 0..=12u32 {
        for n_neg in 0..=12u32 {
            for kind in MetricKind::BUILT_IN {
                let v = |fn_: u32, fp: u32| {
                    metric_value(kind, MetricCounts { tp: n_pos - fn_, tn: n_neg - fp, fp, fn_ })
                };
                for fn_ in 0..=n_pos {
                    for fp in 0..=n_neg {
                        let here = v(fn_, fp);
                        if fn_ < n_pos {
                            assert!(!kind.better(v(fn_ + 1, fp), here), "{kind} fn {fn_}->{} fp {fp}", fn_ + 1);
                        }
                        if fp < n_neg {
                            assert!(!kind.better(v(fn_, fp + 1), here), "{kind} fp {fp}->{} fn {fn_}", fp + 1);
                        }
                    }
                }
            }
        }
    }
}
