//! The central identity at work: the insider's extra log utility, measured
//! by simulated trading, equals the Shannon information of the signal.
//!
//! Runs the noisy-terminal registry case at a reduced budget and prints
//! the utility report next to both Monte Carlo routes.
//!
//! Run with `cargo run --example utility_identity`.

use infodrift::montecarlo::{run_case, Budget, CaseId};

fn main() {
    let budget = Budget {
        n_paths: 40_000,
        grid_steps: 800,
        ..Budget::default()
    };
    println!(
        "NT-1: insider sees the terminal value through unit Gaussian noise\n\
         budget: {} paths, {} uniform steps, tail cut {} with {} levels, seed {}\n",
        budget.n_paths, budget.grid_steps, budget.tail_cut, budget.tail_levels, budget.master_seed
    );

    let run = run_case(CaseId::Nt1, &budget).expect("registry case");

    println!("analytic target (Gaussian channel): {:.6} nats", run.analytic);
    println!(
        "wealth route (paired trading):       {:.6} ± {:.6}",
        run.wealth.mean, run.wealth.stderr
    );
    println!(
        "drift route (energy integral):       {:.6} ± {:.6}",
        run.drift_route.mean, run.drift_route.stderr
    );
    println!(
        "admissibility violations:            {} of {} paths\n",
        run.wealth.violations, run.wealth.n_paths
    );

    println!("utility report:");
    println!("{}", serde_json::to_string_pretty(&run.report).unwrap());
}
