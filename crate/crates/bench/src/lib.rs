//! Fixtures shared by the benchmarks in `benches/`.

use std::path::PathBuf;

use mertens_core::{
    bkz_progressive, build_instance, parse_zero_file, take_top, weight_dataset, LatticeBasis, MertensInstance,
    MertensParams, Mode, ReductionParams, Sign, ZeroDataset,
};

pub fn hp_zero_file() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/zeros_hp_14000.txt.gz")
}

/// The bundled zeros below height 14000, weighted for `h_P`.
pub fn hp_dataset() -> ZeroDataset {
    let zeros = parse_zero_file(hp_zero_file(), 20).expect("bundled zero file");
    weight_dataset(&zeros, Mode::Hp, 14_000.0).expect("weights")
}

/// A small `h_P` instance on the `n` heaviest zeros.
pub fn small_instance(ds: &ZeroDataset, n: usize) -> MertensInstance {
    let params = MertensParams {
        n,
        nu: 60,
        nu_y: 40,
        nu_t: 8,
        radius_scale: 1.3,
        mode: Mode::Hp,
        sign: Sign::Negative,
    };
    build_instance(take_top(ds, n).expect("enough zeros"), &params).expect("instance")
}

/// The instance basis after progressive BKZ up to `beta`.
pub fn reduced(inst: &MertensInstance, beta: usize) -> LatticeBasis {
    let params = ReductionParams {
        beta_start: 2,
        beta_end: beta,
        ..Default::default()
    };
    bkz_progressive(&inst.basis, &params).expect("reduction").basis
}
