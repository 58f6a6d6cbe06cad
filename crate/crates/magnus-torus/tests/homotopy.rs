//! Homotopy invariance of the harmonic expansion: two different loop
//! realizations of the same class integrate to the same value.

use magnus_torus::connection::build_connection;
use magnus_torus::expansion::loop_transport;
use magnus_torus::geometry::TorusGeometry;
use magnus_torus::integrate::TransportOpts;
use magnus_torus::loops::{canonical_loops, loop_from_polyline, LoopParams};
use num_complex::Complex64;

#[test]
fn homotopic_realizations_agree() {
    let geom = TorusGeometry::new(
        Complex64::new(0.3, 1.1),
        (0.41, 0.27),
        Complex64::new(1.0, 0.0),
        128,
    )
    .unwrap();
    let cf = build_connection(&geom, 3).unwrap();
    let (a, _) = canonical_loops(&geom, &LoopParams::default()).unwrap();
    let alt = loop_from_polyline(
        &geom,
        "a",
        &[(0.65, 0.45), (1.15, 0.45), (1.41, 0.27)],
        &LoopParams::default(),
    )
    .unwrap();
    alt.validate(&geom, 0.02).unwrap();
    let opts = TransportOpts::default();
    let ta = loop_transport(&cf, &a, &opts).unwrap();
    let tb = loop_transport(&cf, &alt, &opts).unwrap();
    let d = ta.dist_max(&tb);
    assert!(d < 1e-4, "homotopy invariance defect {d}");
}
