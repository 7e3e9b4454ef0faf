//! Reads and writes the per-document JSONL record format.

use mgtdetect::records::{read_dataset, write_dataset, DocumentRecord, Label, TokenRecord};

fn main() -> mgtdetect::Result<()> {
    let input = r#"{"id":"a","lang":"en","lang_conf":0.98,"label":1,"tokens":[{"lp":-0.4,"ent":1.3,"rank":1,"xent":2.2}],"clf":{"falcon":0.97}}

{"id":"b","text":"hello","tokens":[]}
"#;
    let mut docs = read_dataset(input.as_bytes())?;
    for d in &docs {
        println!(
            "{} lang={:?} label={:?} tokens={} clf={:?}",
            d.id,
            d.language,
            d.label,
            d.tokens.len(),
            d.classifier_probs
        );
    }

    docs.push(
        DocumentRecord::new("c")
            .with_language("de", Some(0.9))
            .with_label(Label::Human)
            .with_tokens(vec![TokenRecord::new(-3.2, 4.0, 17, 3.9)])
            .with_prob("mistral", 0.02),
    );
    let mut out = Vec::new();
    write_dataset(&docs, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));

    match read_dataset(r#"{"id":"x","clf":{"falcon":1.5}}"#.as_bytes()) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
