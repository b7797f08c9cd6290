use gbds_core::corpus::{random_element, random_system, rng_from_seed, run_invariant_suite};
use gbds_core::groupoid::oracle_product_check;

fn main() {
    let mut rng = rng_from_seed(20260810);
    let mut failures = 0usize;
    for i in 0..400 {
        let sys = random_system(&mut rng);
        if i % 10 == 0 {
            let checks = run_invariant_suite(&sys, &mut rng, 10);
            for c in &checks {
                if !c.passed() {
                    println!("system {i}: {} failed {}/{}", c.name, c.failures, c.cases);
                    failures += 1;
                }
            }
        } else {
            for _ in 0..5 {
                let x = random_element(&sys, &mut rng, 4, 3);
                let y = random_element(&sys, &mut rng, 4, 3);
                if !oracle_product_check(&sys, &x, &y) {
                    println!("system {i}: oracle mismatch");
                    failures += 1;
                }
            }
        }
    }
    println!("soak done, failures = {failures}");
    std::process::exit(if failures == 0 { 0 } else { 1 });
}
