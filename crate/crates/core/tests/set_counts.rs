use omt_core::blocks::{BlockBuilder, SetOptions};
use omt_core::model::{VarRef, Variable};
use omt_core::oracle::count_binary_solutions;

fn setup(n: usize) -> (BlockBuilder, Vec<VarRef>) {
    let vars: Vec<VarRef> = (1..=n).map(|i| VarRef::indexed("x", &[i as u64])).collect();
    let b = BlockBuilder::with_variables(vars.iter().map(|v| Variable::binary(&v.flat())));
    (b, vars)
}

#[test]
fn covering_partitioning_packing_counts() {
    for n in 1..=10usize {
        let (b, vars) = setup(n);
        let cover = b.set_covering("c", &vars, SetOptions::default()).unwrap();
        let part = b.set_partitioning("p", &vars, SetOptions::default()).unwrap();
        let pack = b.set_packing("k", &vars).unwrap();
        assert_eq!(count_binary_solutions(&vars, &cover.constraints).unwrap(), (1u64 << n) - 1, "covering n={n}");
        assert_eq!(count_binary_solutions(&vars, &part.constraints).unwrap(), n as u64, "partitioning n={n}");
        assert_eq!(count_binary_solutions(&vars, &pack.constraints).unwrap(), n as u64 + 1, "packing n={n}");
    }
}

#[test]
fn weighted_counts_match_binomials() {
    fn choose(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
    for n in 2..=8u64 {
        for k in 2..=n {
            let (b, vars) = setup(n as usize);
            let part = b.set_partitioning("p", &vars, SetOptions::weighted(k)).unwrap();
            assert_eq!(count_binary_solutions(&vars, &part.constraints).unwrap(), choose(n, k));
            let cover = b.set_covering("c", &vars, SetOptions::weighted(k)).unwrap();
            let expected: u64 = (k..=n).map(|j| choose(n, j)).sum();
            assert_eq!(count_binary_solutions(&vars, &cover.constraints).unwrap(), expected);
        }
    }
}
