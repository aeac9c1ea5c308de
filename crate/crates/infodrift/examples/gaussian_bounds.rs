//! Information bounds for perturbed observations: the Gaussian channel
//! value through two algebraic routes (determinant and eigenvalue), the
//! two-sided-exponential variant, and the maximum-entropy facts behind
//! them.
//!
//! Run with `cargo run --example gaussian_bounds`.

use infodrift::information::{maxent_entropy, MaxEntDistribution, MomentConstraint};
use infodrift::verify::{gaussian_bound_report, laplace_bound_report};

fn main() {
    // An insider observes the driving Brownian motion at two times through
    // isotropic Gaussian noise of variance 1.
    let report = gaussian_bound_report(&[0.5, 1.0], 1.0).unwrap();
    println!("observation times {:?}, noise variance {}", report.times, report.kappa);
    println!("covariance rows:");
    for row in &report.covariance {
        println!("  {row:?}");
    }
    println!("eigenvalues:        {:?}", report.eigenvalues);
    println!("determinant route:  {:.12}", report.determinant_bound);
    println!("eigenvalue route:   {:.12}", report.eigenvalue_bound);
    println!("residual:           {:.2e}", report.residual);

    let laplace = laplace_bound_report(1.0, 1.0).unwrap();
    println!(
        "\ntwo-sided exponential noise, k1 = k2 = 1: bound = {:.6} (log 2)",
        laplace.bound
    );

    // The bounds rest on entropy maximizers.
    println!("\nmaximum differential entropy:");
    for constraint in [
        MomentConstraint::SecondMoment(1.0),
        MomentConstraint::AbsoluteMoment(0.5),
        MomentConstraint::AbsoluteMoment(1.0),
    ] {
        let m = maxent_entropy(constraint).unwrap();
        let label = match m.distribution {
            MaxEntDistribution::Gaussian { variance } => format!("gaussian, variance {variance}"),
            MaxEntDistribution::TwoSidedExponential { scale } => {
                format!("two-sided exponential, scale {scale}")
            }
        };
        println!("  {label:40} h = {:.6} nats", m.entropy);
    }
    // A Gaussian matched on E|X| = 1 loses to the two-sided exponential.
    let matched = maxent_entropy(MomentConstraint::SecondMoment(std::f64::consts::PI / 2.0))
        .unwrap()
        .entropy;
    println!(
        "  gaussian matched on E|X| = 1             h = {matched:.6} (strictly below {:.6})",
        1.0 + (2.0f64).ln()
    );
}
