//! Runs the positive and general searches for a range of n and prints the
//! best E_G next to the reference values.
//!
//! cargo run --release -p majorana --example search_table -- 2 12

use std::time::Instant;

use majorana::extremal::{maximize_entanglement, table_general, table_positive};
use majorana::{Ansatz, SearchConfig};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let lo = args.first().copied().unwrap_or(2);
    let hi = args.get(1).copied().unwrap_or(lo.max(9));
    let general = std::env::args().any(|a| a == "--general");
    for n in lo..=hi {
        let (ansatz, reference) = if general {
            (Ansatz::ComplexFull, table_general(n).or(table_positive(n)))
        } else {
            (Ansatz::PositiveFull, table_positive(n))
        };
        let t = Instant::now();
        let r = maximize_entanglement(n, &SearchConfig::with_ansatz(ansatz)).expect("search");
        println!(
            "n={n:2} E_G={:.10} ref={:?} diff={:+.2e} cpps={:?} support={:?} cert={:+.1e} evals={} {:.1}s",
            r.e_g,
            reference,
            reference.map(|v| r.e_g - v).unwrap_or(f64::NAN),
            r.analysis.cpps.count(),
            r.state.support(),
            r.certificate,
            r.evaluations,
            t.elapsed().as_secs_f64()
        );
    }
}
