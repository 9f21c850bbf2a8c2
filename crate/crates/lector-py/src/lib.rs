use pyo3::prelude::*;

#[pymodule]
fn lector_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
