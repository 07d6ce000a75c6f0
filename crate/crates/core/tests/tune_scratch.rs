//! Temporary tuning scratch; run with `-- --ignored`.
use vebounds::bounds::{BoundMethod, BoundOptions, Estimand, Figure, MMonotone, ScenarioSpec, UMonotone};
use vebounds::simulate::{generate, DgmConfig};

#[test]
#[ignore]
fn tune_misspec() {
    let scenario = ScenarioSpec::new(Figure::Fig3a)
        .with_u(UMonotone::Concordant)
        .with_m(MMonotone::NonNeg);
    for gamma_u in [2.0f64.ln(), 1.5f64.ln()] {
      for beta_u in [2.0f64.ln(), 1.5f64.ln()] {
        println!("gamma_u={gamma_u:.3} beta_u={beta_u:.3}");
        for delta_u in [0.25f64, 0.5, 0.75, 1.0, 1.5] {
            let mut cfg = DgmConfig::for_figure(Figure::Fig3c, 400_000, 910);
            cfg.delta_u = delta_u;
            cfg.beta_s = 0.0;
            cfg.gamma_u = gamma_u;
            cfg.beta_u = beta_u;
            let table = generate(&cfg);
            let truth = table.true_estimands();
            let bounds = table.true_bounds(&scenario, &BoundOptions::default()).unwrap();
            print!("  delta_u={delta_u}: ");
            for estimand in [Estimand::Ve0, Estimand::Ve1, Estimand::VeT] {
                let t = truth.value(estimand).unwrap();
                for method in [BoundMethod::Lp, BoundMethod::Monotone] {
                    let r = bounds.get(estimand, method).unwrap();
                    // margin > 0 means strictly inside
                    let m = (t - r.lower_f64()).min(r.upper_f64() - t);
                    let tag = match method { BoundMethod::Lp => "lp", _ => "mon" };
                    print!("{estimand:?}/{tag}={m:+.3} ", );
                }
            }
            println!();
        }
      }
    }
}
