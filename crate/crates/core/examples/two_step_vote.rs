//! Prints the two-step vote next to a flat five-way majority for every
//! combination of channel decisions.

use mgtdetect::ensemble::{final_vote, majority, stat_majority};
use mgtdetect::records::Label;

fn main() {
    println!("s1 s2 s3 c1 c2  two-step  flat");
    for mask in 0u8..32 {
        let bits: [Label; 5] = std::array::from_fn(|i| Label::from_bool(mask >> (4 - i) & 1 == 1));
        let two_step = final_vote(stat_majority(bits[0], bits[1], bits[2]), bits[3], bits[4]);
        let flat = majority(&bits);
        let cells: Vec<String> = bits.iter().map(|l| u8::from(*l).to_string()).collect();
        let mark = if two_step != flat { "  <-" } else { "" };
        println!(
            " {}  {:>8}  {:>4}{mark}",
            cells.join("  "),
            u8::from(two_step),
            u8::from(flat)
        );
    }
}
