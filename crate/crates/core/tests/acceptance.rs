//! One line per acceptance criterion; exits non-zero if any fails.
//! Set `DUALIS_VERBOSE=1` to print every report in full.

use dualis::suite;

fn main() {
    let verbose = std::env::var_os("DUALIS_VERBOSE").is_some();
    let mut failed = 0;
    println!("acceptance suite");
    for c in suite::run_all(7) {
        if verbose {
            print!("{}", c.report.render());
        }
        println!("{}", c.summary());
        if !c.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", suite::CRITERIA.len() - failed, suite::CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
