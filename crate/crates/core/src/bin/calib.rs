// scratch calibration runs; not part of the public surface
use opcalc::extend::{extend_fourier, extend_taylor, FrequencyGrid};
use opcalc::funcs::SmoothFunction;
use opcalc::quad::{integrate_plane, QuadratureSpec};
use opcalc::{C64, CMatrix};

fn one() -> CMatrix {
    CMatrix::from_row_slice(1, 1, &[C64::new(1.0, 0.0)])
}

fn main() {
    let f = SmoothFunction::standard_bump(0.0, 1.0);
    let ext = extend_fourier(&f, Some(FrequencyGrid::default())).unwrap();
    let ta = extend_taylor(&f, 8, 1.0).unwrap();
    for w0 in [C64::new(2.0, 0.3), C64::new(0.3, 0.001), C64::new(0.5, 0.2)] {
        println!("== w0 = {w0}");
        for (nx, ny, q) in [
            (16usize, 12usize, 8usize),
            (24, 12, 8),
            (32, 12, 8),
            (16, 12, 10),
            (24, 12, 10),
            (32, 14, 10),
            (48, 14, 10),
            (64, 16, 12),
        ] {
            let spec = QuadratureSpec {
                nx,
                ny,
                order: q,
                ..QuadratureSpec::default_plane(-1.5, 1.5)
            };
            for (name, e) in [("fourier", &ext), ("taylor", &ta)] {
                let res = integrate_plane(&|z| e.dbar(z), &|z| one() * (z - w0).inv(), 1, &spec);
                let lhs = res.value[(0, 0)] * C64::new(-1.0 / std::f64::consts::PI, 0.0);
                let rhs = e.value(w0);
                println!(
                    "  {name:8} nx={nx:2} ny={ny:2} q={q:2}: diff {:.3e}  est {:.3e}  nodes {}",
                    (lhs - rhs).norm(),
                    res.error_estimate,
                    res.node_count
                );
            }
        }
    }
}
