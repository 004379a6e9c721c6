//! Minimal hand-rolled SVG output: scatter points, circles, paths, and
//! markers. No plotting dependency.

use cfclosure_core::C64;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN: f64 = 40.0;

pub struct Canvas {
    body: String,
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Canvas {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Canvas {
        Canvas {
            body: String::new(),
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        }
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - 2.0 * MARGIN)
    }

    fn visible(&self, x: f64, y: f64) -> bool {
        x.is_finite()
            && y.is_finite()
            && x >= self.x_lo
            && x <= self.x_hi
            && y >= self.y_lo
            && y <= self.y_hi
    }

    pub fn scatter(&mut self, points: impl IntoIterator<Item = C64>, radius: f64, color: &str) {
        for z in points {
            if self.visible(z.re, z.im) {
                self.body.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius}\" fill=\"{color}\"/>\n",
                    self.sx(z.re),
                    self.sy(z.im)
                ));
            }
        }
    }

    pub fn circle_outline(&mut self, center: C64, r: f64, color: &str) {
        let rx = r / (self.x_hi - self.x_lo) * (WIDTH - 2.0 * MARGIN);
        let ry = r / (self.y_hi - self.y_lo) * (HEIGHT - 2.0 * MARGIN);
        self.body.push_str(&format!(
            "<ellipse cx=\"{:.2}\" cy=\"{:.2}\" rx=\"{rx:.2}\" ry=\"{ry:.2}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            self.sx(center.re),
            self.sy(center.im)
        ));
    }

    pub fn path(&mut self, points: impl IntoIterator<Item = (f64, f64)>, color: &str) {
        let mut d = String::new();
        for (i, (x, y)) in points.into_iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{cmd}{:.2} {:.2} ", self.sx(x), self.sy(y)));
        }
        self.body.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            d.trim_end()
        ));
    }

    pub fn vertical_marker(&mut self, x: f64, color: &str) {
        self.body.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"{color}\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n",
            self.sx(x),
            self.sy(self.y_lo),
            self.sy(self.y_hi)
        ));
    }

    pub fn bar(&mut self, x_lo: f64, x_hi: f64, height: f64, color: &str) {
        let x = self.sx(x_lo);
        let w = self.sx(x_hi) - x;
        let y = self.sy(height);
        let h = self.sy(0.0) - y;
        if h > 0.0 {
            self.body.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{color}\" fill-opacity=\"0.5\"/>\n"
            ));
        }
    }

    pub fn dot(&mut self, z: C64, radius: f64, color: &str) {
        if self.visible(z.re, z.im) {
            self.body.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius}\" fill=\"{color}\"/>\n",
                self.sx(z.re),
                self.sy(z.im)
            ));
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<!-- cfclosure {} -->\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n{}</svg>\n",
            env!("CARGO_PKG_VERSION"),
            self.body
        )
    }
}
