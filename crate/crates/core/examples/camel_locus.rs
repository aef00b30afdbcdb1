use locusforge_core::linkage::LinkageSpec;
use locusforge_core::locus::locus_equation;
use locusforge_core::Deadline;

fn main() {
    let spec = LinkageSpec::camel();
    let r = locus_equation(&spec, &Deadline::none()).expect("locus");
    println!("degree {} principal {} degenerate {} in {} ms", r.total_degree, r.principal, r.degenerate, r.elapsed_ms);
    for g in &r.generators {
        println!("{g}");
    }
}
