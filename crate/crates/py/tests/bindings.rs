use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(script: &str) {
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(quadtomo_py::quadtomo_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("qt", module).unwrap();
        let code = std::ffi::CString::new(script).unwrap();
        py.run(&code, Some(&globals), None).unwrap();
    });
}

#[test]
fn density_matrix_round_trip() {
    with_module(
        r#"
rho = qt.DensityMatrix.state("random:3,5", 3)
back = qt.DensityMatrix.from_json(rho.to_json())
assert abs(back.fidelity(rho) - 1) < 1e-12
re, im = rho.to_lists()
again = qt.DensityMatrix(re, im)
assert again.trace_distance(rho) < 1e-14
assert rho.dim == 3 and abs(rho.trace() - 1) < 1e-12
"#,
    );
}

#[test]
fn reconstruction_from_exact_data() {
    with_module(
        r#"
rho = qt.DensityMatrix.state("coherent:0.4,0.2", 8)
rec = qt.reconstruct_exact(rho)
assert rec.rho_phys.trace_distance(rho) < 1e-8
assert '"diagnostics"' in rec.to_json()
"#,
    );
}

#[test]
fn errors_map_to_exception_types() {
    with_module(
        r#"
try:
    qt.DensityMatrix.state("coherent:3", 4)
    raise AssertionError("expected failure")
except qt.ValidationError as e:
    assert "truncation-edge" in str(e)
try:
    qt.dawson_derivative(60, 1.0)
    raise AssertionError("expected failure")
except qt.CertificationError:
    pass
assert isinstance(qt.ValidationError("x"), ValueError)
"#,
    );
}

#[test]
fn special_functions() {
    with_module(
        r#"
assert abs(qt.dawson(1.0) - 0.5380795069127684) < 1e-15
assert abs(qt.pattern_function(0, 0.0) - 2.0) < 1e-15
assert abs(qt.hermite_function(0, 0.0) - 3.141592653589793 ** -0.25) < 1e-15
"#,
    );
}
