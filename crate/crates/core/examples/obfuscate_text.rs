//! Homoglyph and zero-width-joiner perturbation of a single text and of a
//! small dataset.

use mgtdetect::obfuscation::{
    obfuscate_dataset, strip_zwj, zwj_insert, ConfusableMap, ObfuscationPlan,
};
use mgtdetect::records::DocumentRecord;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mgtdetect::Result<()> {
    let map = ConfusableMap::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let text = "Machine generated text often looks perfectly ordinary.";

    let swapped = map.obfuscate(text, 0.3, &mut rng);
    let joined = zwj_insert(&swapped, 0.3, &mut rng);
    println!("original : {text}");
    println!("swapped  : {swapped}");
    let changed = text
        .chars()
        .zip(swapped.chars())
        .filter(|(a, b)| a != b)
        .count();
    println!("           {changed} characters replaced, same length");
    println!(
        "with ZWJ : {} chars, {} after stripping",
        joined.chars().count(),
        strip_zwj(&joined).chars().count()
    );

    let docs: Vec<_> = (0..10)
        .map(|i| {
            DocumentRecord::new(format!("d{i}"))
                .with_text(format!("sample number {i} about the open market"))
        })
        .collect();
    let out = obfuscate_dataset(docs, &ObfuscationPlan::new(0.2, 42), map)?;
    println!("selected {:?}", out.selected);
    for d in out.docs.iter().filter(|d| out.selected.contains(&d.id)) {
        println!("  {}: {:?}", d.id, d.text.as_deref().unwrap_or_default());
    }
    Ok(())
}
