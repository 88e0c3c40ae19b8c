use super::LabColor;

/// Parametric weighting factors `kL`, `kC`, `kH`. All equal 1 under
/// reference viewing conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub lightness: f64,
    pub chroma: f64,
    pub hue: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { lightness: 1.0, chroma: 1.0, hue: 1.0 }
    }
}

/// CIEDE2000 color difference with reference weights.
pub fn ciede2000(x: LabColor, y: LabColor) -> f64 {
    ciede2000_weighted(x, y, Weights::default())
}

/// Hue angle in degrees, `[0, 360)`. Zero for achromatic input.
fn hue_degrees(b: f64, a: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        return 0.0;
    }
    let h = b.atan2(a).to_degrees();
    if h < 0.0 {
        h + 360.0
    } else {
        h
    }
}

const POW25_7: f64 = 6_103_515_625.0; // 25^7

/// CIEDE2000 color difference with explicit weighting factors.
///
/// Follows the full definition: `a*` is rescaled by `1 + G` before chroma
/// and hue are taken, the hue difference and mean hue wrap around 360°, and
/// the rotation term couples chroma and hue differences in the blue region.
/// When either chroma is zero the hue difference is zero and the mean hue is
/// the plain sum.
pub fn ciede2000_weighted(x: LabColor, y: LabColor, k: Weights) -> f64 {
    let c_bar = (x.chroma() + y.chroma()) / 2.0;
    let c_bar7 = c_bar.powi(7);
    let g = 0.5 * (1.0 - (c_bar7 / (c_bar7 + POW25_7)).sqrt());

    let a1 = (1.0 + g) * x.a;
    let a2 = (1.0 + g) * y.a;
    let c1 = a1.hypot(x.b);
    let c2 = a2.hypot(y.b);
    let h1 = hue_degrees(x.b, a1);
    let h2 = hue_degrees(y.b, a2);

    let delta_l = y.l - x.l;
    let delta_c = c2 - c1;
    let chroma_product = c1 * c2;
    let delta_h_angle = if chroma_product == 0.0 {
        0.0
    } else {
        let d = h2 - h1;
        if d > 180.0 {
            d - 360.0
        } else if d < -180.0 {
            d + 360.0
        } else {
            d
        }
    };
    let delta_h = 2.0 * chroma_product.sqrt() * (delta_h_angle.to_radians() / 2.0).sin();

    let l_mean = (x.l + y.l) / 2.0;
    let c_mean = (c1 + c2) / 2.0;
    let h_mean = if chroma_product == 0.0 {
        h1 + h2
    } else if (h1 - h2).abs() <= 180.0 {
        (h1 + h2) / 2.0
    } else if h1 + h2 < 360.0 {
        (h1 + h2 + 360.0) / 2.0
    } else {
        (h1 + h2 - 360.0) / 2.0
    };

    let t = 1.0 - 0.17 * (h_mean - 30.0).to_radians().cos()
        + 0.24 * (2.0 * h_mean).to_radians().cos()
        + 0.32 * (3.0 * h_mean + 6.0).to_radians().cos()
        - 0.20 * (4.0 * h_mean - 63.0).to_radians().cos();

    let l50 = (l_mean - 50.0).powi(2);
    let s_l = 1.0 + 0.015 * l50 / (20.0 + l50).sqrt();
    let s_c = 1.0 + 0.045 * c_mean;
    let s_h = 1.0 + 0.015 * c_mean * t;

    let delta_theta = 30.0 * (-((h_mean - 275.0) / 25.0).powi(2)).exp();
    let c_mean7 = c_mean.powi(7);
    let r_c = 2.0 * (c_mean7 / (c_mean7 + POW25_7)).sqrt();
    let r_t = -(2.0 * delta_theta).to_radians().sin() * r_c;

    let tl = delta_l / (k.lightness * s_l);
    let tc = delta_c / (k.chroma * s_c);
    let th = delta_h / (k.hue * s_h);
    (tl * tl + tc * tc + th * th + r_t * tc * th).max(0.0).sqrt()
}
