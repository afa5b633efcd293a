//! Datasets bundled so benchmarks run offline: two small classic-scale
//! numeric tables plus generated tables with controlled valid/noise
//! feature splits (`dsV_N` = V structured columns, N noise columns).

use crate::dataset::{generate_synthetic, NumericTable, SyntheticSpec};
use crate::error::{Error, Result};

const IRIS_CSV: &str = include_str!("../../data/iris.csv");
const SEEDS_CSV: &str = include_str!("../../data/seeds.csv");

/// Sample count for the generated `ds*` fixtures.
const SYNTH_ROWS: usize = 1000;

pub const BUILTIN_NAMES: [&str; 7] = [
    "iris", "seeds", "ds3_7", "ds5_5", "ds7_3", "ds10_0", "ds3_0",
];

/// Load a bundled dataset by name. Generated fixtures use a fixed seed per
/// name, so every run sees identical data.
pub fn builtin_dataset(name: &str) -> Result<NumericTable> {
    match name {
        "iris" => crate::dataset::load_csv_str(IRIS_CSV, "", "iris"),
        "seeds" => crate::dataset::load_csv_str(SEEDS_CSV, "", "seeds"),
        "ds3_7" => synth(3, 7, 37),
        "ds5_5" => synth(5, 5, 55),
        "ds7_3" => synth(7, 3, 73),
        "ds10_0" => synth(10, 0, 100),
        "ds3_0" => synth(3, 0, 30),
        other => Err(Error::Config(format!(
            "unknown builtin dataset '{other}' (available: {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

fn synth(valid: usize, noise: usize, seed: u64) -> Result<NumericTable> {
    generate_synthetic(&SyntheticSpec::new(SYNTH_ROWS, valid, noise, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_loads_and_validates() {
        for name in BUILTIN_NAMES {
            let t = builtin_dataset(name).unwrap();
            t.validate().unwrap();
            assert!(t.is_complete(), "{name} must ship fully observed");
        }
    }

    #[test]
    fn iris_has_expected_shape() {
        let t = builtin_dataset("iris").unwrap();
        assert_eq!((t.n_rows(), t.n_cols()), (150, 4));
        assert_eq!(t.column_names[0], "sepal_length");
    }

    #[test]
    fn seeds_has_expected_shape() {
        let t = builtin_dataset("seeds").unwrap();
        assert_eq!((t.n_rows(), t.n_cols()), (210, 7));
    }

    #[test]
    fn ds3_7_splits_valid_and_noise_columns() {
        let t = builtin_dataset("ds3_7").unwrap();
        assert_eq!(t.n_cols(), 10);
        assert_eq!(
            t.column_names.iter().filter(|n| n.starts_with("noise")).count(),
            7
        );
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(builtin_dataset("nope"), Err(Error::Config(_))));
    }
}
