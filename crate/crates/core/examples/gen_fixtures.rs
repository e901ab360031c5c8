//! Regenerates the CLI test fixtures under `tests/fixtures/`.
//!
//! cargo run --example gen_fixtures
//!
//! Output is deterministic (fixed RNG seed).

use std::fs;
use std::path::Path;

use coaxfilt::csv_io::export_material_csv;
use coaxfilt::synthesis::{solve_diameter_ratio, solve_length_for_slope};
use coaxfilt::touchstone::{write_s2p, DataFormat, FreqUnit, RawTwoPort};
use coaxfilt::txline::{s_params_model, CoaxGeometry, FrequencyGrid};
use coaxfilt::{MaterialModel, MaterialSample, C64};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

const INNER_D: f64 = 1.27e-3;
const MISMATCHED_OUTER_D: f64 = 6.0e-3;

fn design(length: f64, outer: f64, material: &str) -> String {
    format!(
        "# generated by examples/gen_fixtures.rs\n\
         z0_ohm = 50.0\n\n\
         [geometry]\n\
         length_m = {length:e}\n\
         inner_d_m = {INNER_D:e}\n\
         outer_d_m = {outer:e}\n\n\
         [material]\n\
         {material}\n\n\
         [grid]\n\
         f_start_hz = 1e7\n\
         f_stop_hz = 2e10\n\
         n_points = 2001\n\
         spacing = \"linear\"\n"
    )
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, text: &str| fs::write(dir.join(name), text).unwrap();

    // ε = 4, μ = 1, α rising linearly from 0.5 to 20 Np/m over the band
    let material = MaterialModel::new(vec![
        MaterialSample::new(1e7, 4.0, 1.0, 0.5),
        MaterialSample::new(2e10, 4.0, 1.0, 20.0),
    ])
    .unwrap();
    write("material.csv", &export_material_csv(&material));
    write(
        "material_const_alpha.csv",
        &export_material_csv(
            &MaterialModel::new(vec![
                MaterialSample::new(1e7, 4.0, 1.0, 5.0),
                MaterialSample::new(2e10, 4.0, 1.0, 5.0),
            ])
            .unwrap(),
        ),
    );
    write(
        "material_vacuum.csv",
        &export_material_csv(&MaterialModel::constant(1.0, 1.0, 0.0).unwrap()),
    );

    let path_ref = "path = \"material.csv\"";
    let ratio = solve_diameter_ratio(50.0, &material, 1e9).unwrap();
    let slope_len = solve_length_for_slope(1.0, &material).unwrap();
    write("design_42mm.toml", &design(0.042, MISMATCHED_OUTER_D, path_ref));
    write("design_matched.toml", &design(slope_len, ratio * INNER_D, path_ref));
    let ratio_65 = solve_diameter_ratio(65.0, &material, 1e9).unwrap();
    write("design_65ohm.toml", &design(0.042, ratio_65 * INNER_D, path_ref));
    write("design_zero_length.toml", &design(0.0, MISMATCHED_OUTER_D, path_ref));
    write(
        "design_missing_length.toml",
        &design(0.042, MISMATCHED_OUTER_D, path_ref).replace("length_m = 4.2e-2\n", ""),
    );

    let grid = FrequencyGrid::linear(1e7, 2e10, 2001).unwrap();
    let g42 = CoaxGeometry::new(0.042, INNER_D, MISMATCHED_OUTER_D).unwrap();
    let g36 = g42.with_length(0.036).unwrap();
    let r42 = s_params_model(&g42, &material, &grid, 50.0).unwrap();
    let r36 = s_params_model(&g36, &material, &grid, 50.0).unwrap();
    let s2p = |raw: &RawTwoPort| write_s2p(raw, FreqUnit::GHz, DataFormat::Ri);
    write("measured_42mm.s2p", &s2p(&RawTwoPort::from_symmetric(&r42)));
    write("measured_36mm.s2p", &s2p(&RawTwoPort::from_symmetric(&r36)));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let mut noisy = RawTwoPort::from_symmetric(&r42);
    for v in [&mut noisy.s11, &mut noisy.s21, &mut noisy.s12, &mut noisy.s22] {
        for s in v.iter_mut() {
            *s += C64::new(noise.sample(&mut rng), noise.sample(&mut rng));
        }
    }
    write("noisy_42mm.s2p", &s2p(&noisy));

    // gain with reversed phase: no passive line produces this
    let mut corrupted = RawTwoPort::from_symmetric(&r42);
    for s in corrupted.s21.iter_mut().chain(corrupted.s12.iter_mut()) {
        *s = s.conj() * 1.5;
    }
    write("corrupted_42mm.s2p", &s2p(&corrupted));

    let small = FrequencyGrid::linear(1e9, 5e9, 5).unwrap();
    let rs = s_params_model(&g42, &material, &small, 50.0).unwrap();
    let mut raw_small = RawTwoPort::from_symmetric(&rs);
    raw_small.s22[2] *= 0.9;
    write("small_ri.s2p", &s2p(&raw_small));
    write(
        "malformed.s2p",
        "! bad row on line 4\n# GHZ S RI R 50\n1.0 0.1 0 0.9 0 0.9 0 0.1 0\n2.0 0.1 0 0.9 0 0.9 0 0.1\n",
    );
}
