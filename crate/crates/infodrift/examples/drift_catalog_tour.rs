//! Tour of the information-drift catalog: evaluate each closed-form drift
//! at a few path states and show the insider fraction it induces.
//!
//! Run with `cargo run --example drift_catalog_tour`.

use infodrift::drift::{DriftEvaluator, NoiseClock, Signal, StepState};
use infodrift::market::MarketModel;

fn state(t: f64, w: f64, running_max: f64) -> StepState {
    StepState { t, w, running_max }
}

fn main() {
    // Insider saw G = W_1 + Y with unit noise; the drift pulls the path
    // towards the observed terminal value.
    let noisy = DriftEvaluator::noisy_terminal(1.0).unwrap();
    println!("noisy terminal, w = 1, observed G = 1:");
    for t in [0.0, 0.5, 0.9] {
        let mu = noisy.evaluate(&state(t, 0.2, 0.4), Signal::Level(1.0)).unwrap();
        println!("  t = {t:<4} W = 0.2   mu = {mu:+.6}");
    }

    // Insider knows whether the running maximum stays at or below c = 1:
    // pulled away from the barrier on {G = 1}, towards it on {G = 0}.
    let barrier = DriftEvaluator::running_max_indicator(1.0).unwrap();
    println!("\nrunning-max indicator, c = 1, at the origin:");
    let below = barrier
        .evaluate(&state(0.0, 0.0, 0.0), Signal::Indicator(true))
        .unwrap();
    let above = barrier
        .evaluate(&state(0.0, 0.0, 0.0), Signal::Indicator(false))
        .unwrap();
    println!("  stays below: mu = {below:+.6}");
    println!("  will cross:  mu = {above:+.6}");
    let resolved = barrier
        .evaluate(&state(0.5, 0.8, 1.3), Signal::Indicator(false))
        .unwrap();
    println!("  already crossed: mu = {resolved:+.6} (indicator resolved)");

    // Insider knows the sign of the terminal value.
    let signs = DriftEvaluator::terminal_partition(vec![0.0]).unwrap();
    println!("\nterminal sign bins at the origin:");
    for (bin, label) in [(1usize, "W_1 > 0"), (0, "W_1 <= 0")] {
        let mu = signs.evaluate(&state(0.0, 0.0, 0.0), Signal::Bin(bin)).unwrap();
        println!("  {label}: mu = {mu:+.6}");
    }

    // Insider tracks a noisy signal whose noise shrinks over time.
    let dynamic = DriftEvaluator::dynamic_noise(NoiseClock::Sqrt).unwrap();
    println!("\ndynamic noise, g(y) = sqrt(y), current signal G_t = 1:");
    for t in [0.0, 0.5, 0.9] {
        let mu = dynamic
            .evaluate(&state(t, 0.3, 0.5), Signal::Dynamic(1.0))
            .unwrap();
        println!("  t = {t:<4} W = 0.3   mu = {mu:+.6}");
    }

    // The market layer adds the uninformed premium b + 1/2 on top.
    let model = MarketModel::new(1.0, -0.5, 1.0).unwrap();
    println!(
        "\nwith b = -1/2 the uninformed optimum is {} and the insider holds mu itself",
        model.risk_premium()
    );
}
