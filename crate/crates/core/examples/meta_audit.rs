// Audits the curve fit and two textbook composite indices against the
// meta-criteria, printing each report and replaying the failure witnesses.

use rankcurve::baselines::{BaselineMethod, BaselineSpec};
use rankcurve::evaluation::{audit, replay, BaselinePipeline, CriterionId, RpcPipeline};
use rankcurve::synthetic::{curved_table, fleming_wallace_table};

fn main() {
    let table = curved_table(171);
    let rpc = RpcPipeline::default().with_provenance("synthetic curved cloud, rankcurve::synthetic");
    let start = std::time::Instant::now();
    let report = audit(&rpc, &table);
    println!("{report}\n({:.1} s)\n", start.elapsed().as_secs_f64());

    let small = fleming_wallace_table();
    for spec in [
        BaselineSpec::new(BaselineMethod::ArithmeticMean).raw(),
        BaselineSpec::new(BaselineMethod::GeometricMean).raw(),
    ] {
        let pipeline = BaselinePipeline::new(spec).with_provenance("three-item witness table");
        let report = audit(&pipeline, &small);
        println!("{report}");
        for id in [CriterionId::ScaleInvariance, CriterionId::TranslationInvariance] {
            if let Some(w) = &report.get(id).witness {
                println!("  replaying {id} witness: {:?}", replay(&pipeline, &small, w));
            }
        }
        println!();
    }
}
