// SPDX-License-Identifier: Apache-2.0

use lichk_core::engine::cnf::CnfFormula;
use lichk_core::engine::sat::{sat_solve, SatResult};
use lichk_oracle::brute::{check_model, satisfiable};
use lichk_oracle::gen::random_3cnf;
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn solver_matches_enumeration() {
    let mut rng = StdRng::seed_from_u64(1);
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..500 {
        let (num_vars, clauses) = random_3cnf(&mut rng, 20, 90);
        let expected = satisfiable(num_vars, &clauses);
        let cnf = CnfFormula { num_vars, clauses: clauses.clone() };
        match sat_solve(&cnf) {
            SatResult::Sat(model) => {
                assert!(expected, "instance {i}: solver says sat");
                assert!(check_model(&model, &clauses), "instance {i}: bad model");
                sat += 1;
            }
            SatResult::Unsat => {
                assert!(!expected, "instance {i}: solver says unsat");
                unsat += 1;
            }
            SatResult::Unknown => panic!("instance {i}: unknown without a deadline"),
        }
    }
    assert!(sat >= 50 && unsat >= 50, "{sat} sat / {unsat} unsat");
}

#[test]
fn enumeration_sanity() {
    assert!(satisfiable(1, &[vec![1]]));
    assert!(!satisfiable(1, &[vec![1], vec![-1]]));
    assert!(satisfiable(7, &[vec![7], vec![-1, -2]]));
    assert!(!satisfiable(8, &[vec![8], vec![-8, 1], vec![-1]]));
}
