//! Partition instances turned into covering instances with a tiny delta.
//! A yes-instance yields one exactly full bin per generation, a no-instance none.

use nearcover::exact::exact_opt;
use nearcover::generators::{reduction_delta, reduction_instance, GenerationSpec, PartitionInput};
use nearcover::rational::format_rational;

fn main() -> nearcover::Result<()> {
    for a in [vec![3, 1, 2, 4], vec![1, 3], vec![2, 2, 2]] {
        let partition = PartitionInput::new(a)?;
        for generations in 1..=2 {
            let spec = GenerationSpec { partition: partition.clone(), generations };
            let delta = reduction_delta(&spec);
            let inst = reduction_instance(&spec, delta.clone())?;
            let (opt, witness) = exact_opt(&inst, 20)?;
            println!(
                "a = {:?}, T = {generations}, delta = {}: yes = {}, optimum = {opt}, covered bins {:?}",
                partition.a,
                format_rational(&delta),
                partition.is_yes(),
                witness.covered_bins(&inst).iter().map(|&b| &witness.bins()[b]).collect::<Vec<_>>(),
            );
        }
    }
    Ok(())
}
