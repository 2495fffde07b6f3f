//! Python bindings for the regfall toolkit: trig-polynomial loops, the
//! critical families of both actions, their Hessian spectra, and the
//! Morse / Conley-Zehnder index computations.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use regfall::hamiltonian;
use regfall::lagrangian::{self, MorseMode};
use regfall::regularization;
use regfall::spectral::SpectrumEntry;

fn err(e: regfall::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A real 1-periodic function with finitely many Fourier modes.
#[pyclass(name = "TrigPoly", skip_from_py_object)]
#[derive(Clone)]
struct PyTrigPoly {
    inner: regfall::TrigPoly,
}

#[pymethods]
impl PyTrigPoly {
    #[new]
    #[pyo3(signature = (constant=0.0, cos=vec![], sin=vec![]))]
    fn new(constant: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        PyTrigPoly {
            inner: regfall::TrigPoly::new(constant, cos, sin),
        }
    }

    #[staticmethod]
    fn cosine(n: usize, amp: f64) -> Self {
        PyTrigPoly {
            inner: regfall::TrigPoly::cosine(n, amp),
        }
    }

    #[staticmethod]
    fn sine(n: usize, amp: f64) -> Self {
        PyTrigPoly {
            inner: regfall::TrigPoly::sine(n, amp),
        }
    }

    #[getter]
    fn constant(&self) -> f64 {
        self.inner.constant_coeff()
    }

    #[getter]
    fn cos(&self) -> Vec<f64> {
        self.inner.cos_coeffs().to_vec()
    }

    #[getter]
    fn sin(&self) -> Vec<f64> {
        self.inner.sin_coeffs().to_vec()
    }

    fn eval(&self, tau: f64) -> f64 {
        self.inner.eval(tau)
    }

    fn derivative(&self) -> Self {
        PyTrigPoly {
            inner: self.inner.derivative(),
        }
    }

    fn inner_product(&self, other: &PyTrigPoly) -> f64 {
        self.inner.inner(&other.inner)
    }

    fn norm_sq(&self) -> f64 {
        self.inner.norm_sq()
    }

    fn sample(&self, m: usize) -> Vec<f64> {
        self.inner.sample(m)
    }

    fn __repr__(&self) -> String {
        format!(
            "TrigPoly(constant={}, modes={})",
            self.inner.constant_coeff(),
            self.inner.degree()
        )
    }
}

/// The mode-k critical point of the Lagrangian action, as a dict.
#[pyfunction]
fn critical_point(py: Python<'_>, k: usize) -> PyResult<Py<PyDict>> {
    let cp = lagrangian::critical_point(k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("k", cp.k)?;
    d.set_item("c_k", cp.c_k)?;
    d.set_item("alpha", cp.alpha)?;
    d.set_item("norm_x_sq", cp.norm_x_sq)?;
    d.set_item(
        "critical_value",
        lagrangian::critical_value(k).map_err(err)?,
    )?;
    d.set_item(
        "morse_index",
        lagrangian::morse_index(k, MorseMode::ClosedForm).map_err(err)?,
    )?;
    d.set_item("x", PyTrigPoly { inner: cp.x }.into_pyobject(py)?)?;
    Ok(d.into())
}

#[pyfunction]
fn action_b(x: &PyTrigPoly) -> PyResult<f64> {
    lagrangian::action_b(&x.inner).map_err(err)
}

#[pyfunction]
fn grad_b(x: &PyTrigPoly) -> PyResult<PyTrigPoly> {
    Ok(PyTrigPoly {
        inner: lagrangian::grad_b(&x.inner).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (k, numeric=false, modes=None))]
fn morse_index(k: usize, numeric: bool, modes: Option<usize>) -> PyResult<usize> {
    let mode = if numeric {
        MorseMode::Numeric {
            n_modes: modes.unwrap_or(4 * k),
        }
    } else {
        MorseMode::ClosedForm
    };
    lagrangian::morse_index(k, mode).map_err(err)
}

/// Morse, alpha, parity, CZ and CZ^can at mode k, as a dict.
#[pyfunction]
fn cz_index(py: Python<'_>, k: usize) -> PyResult<Py<PyDict>> {
    let r = hamiltonian::cz_index(k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("k", r.k)?;
    d.set_item("alpha", r.alpha_s)?;
    d.set_item("parity", r.parity)?;
    d.set_item("cz", r.cz)?;
    d.set_item("cz_can", r.cz_can)?;
    d.set_item("morse", r.morse)?;
    Ok(d.into())
}

fn spectrum_to_py(py: Python<'_>, entries: Vec<SpectrumEntry>) -> PyResult<Vec<Py<PyDict>>> {
    entries
        .into_iter()
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("lambda", e.lambda)?;
            d.set_item("mult", e.multiplicity)?;
            d.set_item("label", e.family)?;
            if let Some(n) = e.mode {
                d.set_item("n", n)?;
            }
            if let Some(w) = e.winding {
                d.set_item("winding", w)?;
            }
            Ok(d.into())
        })
        .collect()
}

/// Closed-form Hessian spectrum of the Lagrangian action at mode k.
#[pyfunction]
fn lag_spectrum(py: Python<'_>, k: usize, n_max: usize) -> PyResult<Vec<Py<PyDict>>> {
    spectrum_to_py(py, lagrangian::lag_spectrum(k, n_max).map_err(err)?)
}

/// Closed-form Hessian spectrum of the Hamiltonian action at mode k.
#[pyfunction]
fn ham_spectrum(py: Python<'_>, k: usize, n_max: usize) -> PyResult<Vec<Py<PyDict>>> {
    spectrum_to_py(py, hamiltonian::ham_spectrum_closed(k, n_max).map_err(err)?)
}

#[pyfunction]
fn disjointness_gap(k: usize, n_max: usize) -> PyResult<f64> {
    hamiltonian::disjointness_gap(k, n_max).map_err(err)
}

#[pyfunction]
fn legendre_fiber(x: &PyTrigPoly) -> PyResult<PyTrigPoly> {
    Ok(PyTrigPoly {
        inner: hamiltonian::legendre_fiber(&x.inner).map_err(err)?,
    })
}

/// Sample the physical trajectory `q = x^2 o tau_x` of a loop on a
/// uniform grid of classical times.
#[pyfunction]
fn rescale_square(py: Python<'_>, x: &PyTrigPoly, samples: usize) -> PyResult<Py<PyDict>> {
    let orbit = regularization::rescale_square(&x.inner, samples).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t", orbit.grid)?;
    d.set_item("q", orbit.q)?;
    d.set_item("q_dot", orbit.q_dot)?;
    d.set_item("collision_times", orbit.collision_times)?;
    d.set_item("norm_x_sq", orbit.source_norm_sq)?;
    Ok(d.into())
}

#[pymodule]
fn regfall_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTrigPoly>()?;
    m.add_function(wrap_pyfunction!(critical_point, m)?)?;
    m.add_function(wrap_pyfunction!(action_b, m)?)?;
    m.add_function(wrap_pyfunction!(grad_b, m)?)?;
    m.add_function(wrap_pyfunction!(morse_index, m)?)?;
    m.add_function(wrap_pyfunction!(cz_index, m)?)?;
    m.add_function(wrap_pyfunction!(lag_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(ham_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(disjointness_gap, m)?)?;
    m.add_function(wrap_pyfunction!(legendre_fiber, m)?)?;
    m.add_function(wrap_pyfunction!(rescale_square, m)?)?;
    Ok(())
}
