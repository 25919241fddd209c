//! Classifies huge items, enumerates certificate vectors and splits the
//! input by each; also derives a certificate from a known packing and checks
//! that packing for niceness.

use nearcover::classify::{check_nice, classify, derive_certificate, enumerate_certificates, split_input, SchemeParams};
use nearcover::exact::exact_opt;
use nearcover::rational::{int, ratio};
use nearcover::Instance;

fn main() -> nearcover::Result<()> {
    let sizes = vec![ratio(3, 10), ratio(7, 10), ratio(7, 10), ratio(9, 20), ratio(11, 20), ratio(1, 10), ratio(1, 20)];
    let inst = Instance::new(int(1), sizes)?;
    let params = SchemeParams::for_instance(&inst);
    let classes = classify(&inst, &params);
    for (psi, items) in &classes.classes {
        println!("class {:>4}: items {items:?}", psi.0);
    }
    println!("non-huge: {:?}", classes.non_huge);

    let certs = enumerate_certificates(&classes, &params, 10_000)?;
    println!("{} certificate vectors", certs.total());
    for cert in certs.take(5) {
        let split = split_input(&classes, &params, &cert)?;
        println!("  I1 {:?}  I2 {:?}  dedicated {:?}", split.i1, split.i2, split.unused(inst.len()));
    }

    let (_, best) = exact_opt(&inst, 20)?;
    let (cert, types) = derive_certificate(&inst, &params, &classes, &best);
    let report = check_nice(&inst, &params, &best, &cert, &types);
    println!("optimal packing {:?}: nice = {}", best.bins(), report.is_nice());
    Ok(())
}
