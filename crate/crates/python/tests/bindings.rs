use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn with_module<F: FnOnce(&Bound<'_, PyModule>) -> PyResult<()>>(f: F) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "xychain")?;
        xychain_py::xychain_module(&m)?;
        f(&m)
    })
    .unwrap();
}

#[test]
fn functions_round_trip_through_python() {
    with_module(|m| {
        let params = m.getattr("ModelParams")?.call1((0.0, 1.0, 0.0))?;
        let g: f64 = m.getattr("g_k")?.call1((-1, &params))?.extract()?;
        assert!((g - 1.0).abs() < 1e-10);

        let p = m.getattr("ModelParams")?.call1((0.5, 1.0))?;
        let geom = m.getattr("TripleGeometry")?.call0()?;
        let rho: Vec<Vec<f64>> = m.getattr("rho3")?.call1((&geom, &p))?.extract()?;
        let trace: f64 = (0..8).map(|i| rho[i][i]).sum();
        assert!((trace - 1.0).abs() < 1e-12);

        let rep = m.getattr("analyze_triple")?.call1((&p, &geom))?;
        let label: String = rep.getattr("classification")?.extract()?;
        assert_eq!(label, "pairwise_entangled");

        let range: (usize, bool) = m.getattr("pair_range")?.call1((&p, 6))?.extract()?;
        assert_eq!(range, (2, false));

        let th = m.getattr("thermal_thresholds")?.call1((1.0, 0.0))?;
        let th = th.cast::<PyDict>()?;
        assert!(th.get_item("t_c1")?.unwrap().is_none());
        Ok(())
    });
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(|m| {
        let py = m.py();
        let err = m.getattr("ModelParams")?.call1((0.5, 2.0)).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        let err = m.getattr("sweep_field")?.call1((0.5, 0.0, "q:1", vec![0.5])).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        let err = m.getattr("thermal_thresholds")?.call1((1.0, 1.1, 0.01)).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyRuntimeError>(py));
        Ok(())
    });
}
