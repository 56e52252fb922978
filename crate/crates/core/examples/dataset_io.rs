//! Writes a tiny gallery in both on-disk formats, reads them back and shows
//! what a malformed file reports.

use std::collections::BTreeMap;

use gallery_sampling::io::{Dataset, Format};
use gallery_sampling::{FeatureVector, Gallery, IdentityId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut entries = BTreeMap::new();
    entries.insert(IdentityId::new("ana")?, vec![FeatureVector::new(vec![0.6, 0.8, 0.0])?]);
    entries.insert(
        IdentityId::new("ben")?,
        vec![FeatureVector::new(vec![0.0, 1.0, 0.0])?, FeatureVector::new(vec![0.0, 0.0, 1.0])?],
    );
    let data = Dataset::from_gallery(&Gallery::new(entries)?);

    let text = data.to_bytes(Format::Text)?;
    println!("text form:\n{}", String::from_utf8_lossy(&text));

    let binary = data.to_bytes(Format::Binary)?;
    println!("binary form: {} bytes, header {:02x?}", binary.len(), &binary[..18]);

    let back = Dataset::from_bytes(&binary)?;
    assert_eq!(back, data);
    println!("binary round trip ok ({} records)", back.records.len());

    let mut broken = binary.clone();
    broken.truncate(broken.len() - 3);
    match Dataset::from_bytes(&broken) {
        Ok(_) => println!("unexpectedly parsed a truncated file"),
        Err(e) => println!("{e} (exit code {})", e.code()),
    }
    Ok(())
}
