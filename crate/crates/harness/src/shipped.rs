//! Example configurations shipped with the harness.

/// `(name, TOML source)` for every shipped Brownian-bridge run on `f_1`.
pub const BB_RUNS: &[(&str, &str)] = &[
    (
        "bb_f1_beta0_gamma0p8",
        include_str!("../configs/bb_f1_beta0_gamma0p8.toml"),
    ),
    (
        "bb_f1_beta0_gamma1",
        include_str!("../configs/bb_f1_beta0_gamma1.toml"),
    ),
    (
        "bb_f1_beta0p5_gamma0p8",
        include_str!("../configs/bb_f1_beta0p5_gamma0p8.toml"),
    ),
    (
        "bb_f1_beta0p5_gamma1",
        include_str!("../configs/bb_f1_beta0p5_gamma1.toml"),
    ),
    (
        "bb_f1_beta1_gamma0p8",
        include_str!("../configs/bb_f1_beta1_gamma0p8.toml"),
    ),
    (
        "bb_f1_beta1_gamma1",
        include_str!("../configs/bb_f1_beta1_gamma1.toml"),
    ),
    (
        "bb_f1_beta2_gamma0p8",
        include_str!("../configs/bb_f1_beta2_gamma0p8.toml"),
    ),
    (
        "bb_f1_beta2_gamma1",
        include_str!("../configs/bb_f1_beta2_gamma1.toml"),
    ),
    (
        "bb_f1_betainf_gamma0p8",
        include_str!("../configs/bb_f1_betainf_gamma0p8.toml"),
    ),
    (
        "bb_f1_betainf_gamma1",
        include_str!("../configs/bb_f1_betainf_gamma1.toml"),
    ),
];

pub const GAUSSIAN_3D: &str = include_str!("../configs/gaussian_3d_pgreedy.toml");
pub const MATERN_2D: &str = include_str!("../configs/matern_2d_expansion.toml");
