//! Converting a libsvm file into the labeled CSV layout and splitting it.
//!
//! `cargo run --example dataset_convert`

use spca::bench::dataset::{convert_sources, save_labeled_csv, ConvertSource, SourceFormat};
use spca::bench::{load_dataset, make_splits, parse_split_policy, DatasetFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("spca_convert_example");
    std::fs::create_dir_all(&dir)?;
    let train = dir.join("digits.libsvm");
    let test = dir.join("digits.t.libsvm");
    std::fs::write(&train, "1 1:0.5 3:1.0\n2 2:0.7\n1 1:0.4 3:0.9\n2 2:0.8 3:0.1\n")?;
    std::fs::write(&test, "1 1:0.6 3:1.1\n2 2:0.6\n")?;

    let sources = [
        ConvertSource {
            path: train,
            group: None,
            split: Some(true),
        },
        ConvertSource {
            path: test,
            group: None,
            split: Some(false),
        },
    ];
    let data = convert_sources(&sources, SourceFormat::Libsvm)?;
    let out = dir.join("digits.csv");
    save_labeled_csv(&data, &out)?;
    println!("{}", std::fs::read_to_string(&out)?);

    let loaded = load_dataset(&out, DatasetFormat::CsvLabeled)?;
    for policy in ["file", "per-class:1"] {
        let split = make_splits(&loaded, &parse_split_policy(policy)?, 0)?.split;
        println!("{policy}: train {:?} test {:?}", split.train, split.test);
    }
    Ok(())
}
