//! Acceptance criteria AC1-AC10, one line each. Exits nonzero on any failure.

use dqcluster::control::LawVariant;
use dqcluster_cli::verify;

fn main() {
    let checks = vec![
        verify::check_jacobian(),
        verify::check_convergence(LawVariant::Corrected),
        verify::check_alignment(LawVariant::Corrected),
        verify::check_sign_audit(),
        verify::check_noise(),
        verify::check_trend_2r(100),
        verify::check_trend_3r(100),
        verify::check_gain_tables(),
        verify::check_halving(),
        verify::check_algebra(),
    ];
    let mut failed = 0;
    for c in &checks {
        println!("{c}");
        if !c.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
