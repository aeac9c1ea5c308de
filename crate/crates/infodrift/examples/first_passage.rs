//! First-passage probabilities of the geometric price model and the exact
//! utility of knowing whether the price maximum clears a level.
//!
//! The probability is computed by adaptive quadrature of the first-passage
//! integral; with zero log drift the reflection principle gives the closed
//! form 2(1 - Φ(log c)) to compare against.
//!
//! Run with `cargo run --example first_passage`.

use infodrift::information::{indicator_insider_information, running_max_probability};
use infodrift::market::MarketModel;
use infodrift::numerics::normal_sf;

fn main() {
    println!("P(max price over [0,1] exceeds c), S_t = exp(W_t + b t):\n");
    println!("{:>8} {:>12} {:>12} {:>12}", "log c", "b = -1/2", "b = 0", "b = +1/2");
    for logc in [0.25f64, 0.5, 1.0, 2.0] {
        let c = logc.exp();
        let mut row = format!("{logc:>8.2}");
        for b in [-0.5, 0.0, 0.5] {
            let model = MarketModel::new(1.0, b, 1.0).unwrap();
            let p = running_max_probability(&model, c).unwrap();
            row.push_str(&format!(" {p:>12.6}"));
        }
        println!("{row}");
    }

    println!("\nquadrature vs the b = 0 reflection closed form:");
    let model = MarketModel::new(1.0, 0.0, 1.0).unwrap();
    for logc in [0.5f64, 1.0, 2.0] {
        let p = running_max_probability(&model, logc.exp()).unwrap();
        let closed = 2.0 * normal_sf(logc);
        println!(
            "  log c = {logc:<4} quad = {p:.9}  closed = {closed:.9}  diff = {:.1e}",
            (p - closed).abs()
        );
    }

    println!("\nexact insider utility H(G) for G = 1 iff the maximum clears c:");
    for logc in [0.5f64, 1.0, 2.0] {
        let i = indicator_insider_information(&model, logc.exp()).unwrap();
        println!("  log c = {logc:<4} H = {:.6} nats", i.nats);
    }

    // The median level makes the indicator a fair coin: maximal entropy.
    let median = 0.674_489_750_196_081_7f64.exp();
    let i = indicator_insider_information(&model, median).unwrap();
    println!(
        "\nat the median level c = {median:.6}: H = {:.9} nats (log 2 = {:.9})",
        i.nats,
        std::f64::consts::LN_2
    );
}
