//! Continual release of running sums: each prefix query touches at most
//! ⌈log₂ n⌉ + 1 noisy nodes, and repeated queries return the same noise.

use privrl::linalg::Vector;
use privrl::privacy::{dyadic_nodes, max_nodes, NoiseDist, NoiseTree};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 64;
    let mut tree: NoiseTree<Vector> = NoiseTree::new(n, 3, 0.5, NoiseDist::Gaussian, 7, 0);
    println!("{n} leaves, {} levels, at most {} nodes per prefix", tree.levels(), max_nodes(n));
    for k in [1, 5, 32, 63, 64] {
        let (noise, used) = tree.prefix_with_count(k)?;
        println!("prefix {k:2}: nodes {:?} ({used}), noise norm {:.3}", dyadic_nodes(k), noise.norm());
    }
    let again = tree.prefix(63)?;
    let first = tree.prefix(63)?;
    assert_eq!(again, first);
    Ok(())
}
