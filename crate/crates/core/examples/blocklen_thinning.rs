//! Huge block lengths sorted through (common, offset) pairs.

use slpmatch::blocklen::{sort_block_lengths, thin_commons};
use slpmatch::BlockLen;

fn main() {
    let g = 10;
    let lens = [
        BlockLen::new(1 << 40, 3),
        BlockLen::explicit(7),
        BlockLen::new((1 << 40) + 5, 0),
        BlockLen::new(1 << 50, 9),
        BlockLen::new((1 << 40) + 2, 1),
        BlockLen::explicit(7),
    ];
    let mut commons: Vec<u64> = lens.iter().map(|l| l.common()).filter(|&c| c > 0).collect();
    commons.sort_unstable();
    commons.dedup();
    let thin = thin_commons(&commons, g);
    println!("kept commons {:?}", thin.kept);
    for l in lens {
        let (i, o) = thin.assign(l);
        println!("{:>18} = {:?} -> ({i}, {o})", l.value(), l);
    }
    let sorted = sort_block_lengths(&lens, g);
    for group in &sorted.groups {
        println!("{:>18} x{}", lens[group[0]].value(), group.len());
    }
    println!("{:?}", sorted.counters);
}
