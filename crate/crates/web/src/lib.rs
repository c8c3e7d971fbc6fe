//! wasm-bindgen surface of the browser demo: interactive 1-D Riemann
//! problems, the 2-D roll wave with its y-average and spectrum, and the
//! closed-form 2-D field explorer.

mod app;

use wasm_bindgen::prelude::*;

fn js_err(e: String) -> JsValue {
    JsValue::from_str(&e)
}

/// Interactive solver session over one of the registered cases.
#[wasm_bindgen]
pub struct Sim {
    inner: app::Session,
}

#[wasm_bindgen]
impl Sim {
    /// `ny` is ignored for one-dimensional cases (pass 0).
    #[wasm_bindgen(constructor)]
    pub fn new(case: &str, solver: &str, order: u32, nx: usize, ny: usize) -> Result<Sim, JsValue> {
        let ny = if ny == 0 { None } else { Some(ny) };
        app::Session::new(case, solver, order, nx, ny)
            .map(|inner| Sim { inner })
            .map_err(js_err)
    }

    pub fn time(&self) -> f64 {
        self.inner.time()
    }

    pub fn nx(&self) -> usize {
        self.inner.nx()
    }

    pub fn ny(&self) -> usize {
        self.inner.ny()
    }

    /// Advance by `sim_seconds`, taking at most `max_steps` solver steps.
    pub fn advance(&mut self, sim_seconds: f64, max_steps: u32) -> Result<u32, JsValue> {
        self.inner.advance(sim_seconds, max_steps).map_err(js_err)
    }

    pub fn positions_x(&self) -> Vec<f64> {
        self.inner.positions_x()
    }

    /// Field values over the interior: one of h, v1, v2, P11, P12, P22.
    pub fn field(&self, name: &str) -> Result<Vec<f64>, JsValue> {
        self.inner.field(name).map_err(js_err)
    }

    pub fn y_average(&self, name: &str) -> Result<Vec<f64>, JsValue> {
        self.inner.y_average(name).map_err(js_err)
    }

    pub fn fluctuation(&self, name: &str) -> Result<Vec<f64>, JsValue> {
        self.inner.fluctuation(name).map_err(js_err)
    }

    /// Flattened (k, E) pairs of the velocity-fluctuation energy spectrum.
    pub fn velocity_spectrum(&self) -> Result<Vec<f64>, JsValue> {
        self.inner.velocity_spectrum().map_err(js_err)
    }
}

/// Closed-form 2-D solution sampled on an n x n grid of [0, 10]^2.
#[wasm_bindgen]
pub fn exact_field_2d(t: f64, n: usize, name: &str) -> Result<Vec<f64>, JsValue> {
    app::exact_field_2d(t, n, name).map_err(js_err)
}

/// Registered case names, comma separated.
#[wasm_bindgen]
pub fn case_names() -> String {
    ssw::cases::CASE_NAMES.join(",")
}
