//! Solves Thomson's and Tóth's problems for n = 2..=n_max and prints the
//! costs and the entanglement of the corresponding symmetric states.
//!
//! cargo run --release -p majorana --example classical_table -- 12

use std::time::Instant;

use majorana::classical::{solve_thomson, solve_toth, to_symmetric_state};
use majorana::extremal::{table_general, table_positive};
use majorana::geometric::find_cpps;
use majorana::{InnerConfig, SearchConfig};

fn main() {
    let n_max: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(12);
    let cfg = SearchConfig::default();
    for n in 2..=n_max {
        let t = Instant::now();
        let th = solve_thomson(n, &cfg).expect("thomson");
        let to = solve_toth(n, &cfg).expect("toth");
        let e_th = find_cpps(&to_symmetric_state(&th).unwrap(), &InnerConfig::default()).unwrap().e_g;
        let e_to = find_cpps(&to_symmetric_state(&to).unwrap(), &InnerConfig::default()).unwrap().e_g;
        let best = table_general(n).or(table_positive(n)).unwrap_or(f64::NAN);
        println!(
            "n={n:2} thomson={:.9} toth_d={:.9} E(thomson)={:.9} E(toth)={:.9} majorana={:.9} conv=({},{}) {:.1}s",
            th.thomson_cost,
            to.toth_cost,
            e_th,
            e_to,
            best,
            th.converged,
            to.converged,
            t.elapsed().as_secs_f64()
        );
    }
}
