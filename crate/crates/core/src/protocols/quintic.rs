//! Quintic Hermite interpolation on [0, T].

/// The unique quintic matching value, slope and curvature at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuinticHermite {
    duration: f64,
    // coefficients in s = t/T
    a: [f64; 6],
}

impl QuinticHermite {
    /// `start` and `end` are (y, ẏ, ÿ) with time derivatives.
    pub fn new(duration: f64, start: (f64, f64, f64), end: (f64, f64, f64)) -> Self {
        let t = duration;
        let a0 = start.0;
        let a1 = start.1 * t;
        let a2 = 0.5 * start.2 * t * t;
        let r0 = end.0 - (a0 + a1 + a2);
        let r1 = end.1 * t - (a1 + 2.0 * a2);
        let r2 = end.2 * t * t - 2.0 * a2;
        let a3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
        let a4 = -15.0 * r0 + 7.0 * r1 - r2;
        let a5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;
        Self {
            duration,
            a: [a0, a1, a2, a3, a4, a5],
        }
    }

    /// Smooth step from `y0` to `y1` with flat ends.
    pub fn flat(duration: f64, y0: f64, y1: f64) -> Self {
        Self::new(duration, (y0, 0.0, 0.0), (y1, 0.0, 0.0))
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// (y, ẏ, ÿ, y⃛) at time t.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let a = &self.a;
        let s = t / self.duration;
        let p = a[0] + s * (a[1] + s * (a[2] + s * (a[3] + s * (a[4] + s * a[5]))));
        let d1 = a[1] + s * (2.0 * a[2] + s * (3.0 * a[3] + s * (4.0 * a[4] + s * 5.0 * a[5])));
        let d2 = 2.0 * a[2] + s * (6.0 * a[3] + s * (12.0 * a[4] + s * 20.0 * a[5]));
        let d3 = 6.0 * a[3] + s * (24.0 * a[4] + s * 60.0 * a[5]);
        let t1 = self.duration;
        [p, d1 / t1, d2 / (t1 * t1), d3 / (t1 * t1 * t1)]
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t)[0]
    }
}
