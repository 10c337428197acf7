use std::collections::BTreeSet;

use nsga_approx::algorithms::{run, AlgorithmConfig, Variant};
use nsga_approx::problems::eval_lotz;
use nsga_approx::ranking::{crowding_distance, non_dominated_sort, FrontPartition};
use nsga_approx::rng::RngHandle;
use nsga_approx::survival::{naive_current_cd_oracle, select, Engine};
use nsga_approx::types::{Genome, Individual};

fn lotz_population(n: usize, size: usize, rng: &mut RngHandle) -> Vec<Individual> {
    (0..size)
        .map(|i| {
            let g = Genome::random(n, rng);
            let o = eval_lotz(&g);
            Individual::with_objectives(i as u64, g, o)
        })
        .collect()
}

fn critical_front(p: &FrontPartition, capacity: usize) -> usize {
    let mut total = 0;
    for (i, f) in p.fronts.iter().enumerate() {
        total += f.len();
        if total >= capacity {
            return i;
        }
    }
    p.fronts.len() - 1
}

#[test]
fn multi_front_selection_keeps_every_better_front() {
    let mut rng = RngHandle::new(11);
    let mut multi = 0;
    for case in 0..300u64 {
        let n = 3 + rng.index(8);
        let capacity = 2 + rng.index(10);
        let mut pop = lotz_population(n, 2 * capacity, &mut rng);
        let p = non_dominated_sort(&mut pop);
        let critical = critical_front(&p, capacity);
        multi += usize::from(critical > 0);
        crowding_distance(&mut pop, &p.fronts[critical]);
        let better: BTreeSet<u64> = p.fronts[..critical]
            .iter()
            .flatten()
            .map(|&i| pop[i].id)
            .collect();
        let critical_ids: BTreeSet<u64> = p.fronts[critical].iter().map(|&i| pop[i].id).collect();

        for engine in [Engine::Classic, Engine::CurrentCd] {
            let s = select(engine, pop.clone(), capacity, &p, &mut RngHandle::new(case)).unwrap();
            let ids: BTreeSet<u64> = s.survivor_ids().into_iter().collect();
            assert_eq!(ids.len(), capacity);
            assert!(better.is_subset(&ids), "{engine} dropped a better front");
            assert!(ids
                .iter()
                .all(|id| better.contains(id) || critical_ids.contains(id)));
            assert!(s
                .trace
                .removals
                .iter()
                .all(|r| critical_ids.contains(&r.id)));
        }

        let a = select(
            Engine::CurrentCd,
            pop.clone(),
            capacity,
            &p,
            &mut RngHandle::new(case),
        )
        .unwrap();
        let b = naive_current_cd_oracle(pop, capacity, &p, &mut RngHandle::new(case)).unwrap();
        assert_eq!(a.survivor_ids(), b.survivor_ids());
        assert_eq!(a.trace, b.trace);
    }
    assert!(
        multi > 50,
        "too few inputs with a critical front beyond the first: {multi}"
    );
}

#[test]
fn runs_are_reproducible_from_the_seed() {
    for variant in Variant::ALL {
        let config = AlgorithmConfig::one_min_max(variant, 40, 12, 150, 99);
        let a = run(config).unwrap();
        let b = run(config).unwrap();
        assert_eq!(a.records, b.records, "{variant}");
        assert_eq!(a.t0, b.t0);
    }
}
