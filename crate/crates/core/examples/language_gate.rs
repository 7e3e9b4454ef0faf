//! Shows which threshold bucket a document is routed to.

use mgtdetect::langgate::{default_known_languages, resolve_bucket};

fn main() -> mgtdetect::Result<()> {
    let known = default_known_languages();
    let cases = [
        (Some("en"), Some(0.97)),
        (Some("en"), Some(0.5)),
        (Some("de"), None),
        (Some("it"), Some(0.99)),
        (None, None),
    ];
    for (lang, conf) in cases {
        let bucket = resolve_bucket(lang, conf, &known)?;
        println!(
            "{:<14} {:<12} -> {bucket}",
            format!("{lang:?}"),
            format!("{conf:?}")
        );
    }
    Ok(())
}
