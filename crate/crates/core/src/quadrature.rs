//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
//!
//! The interval is split at caller-supplied breakpoints; afterwards the panel
//! with the largest error estimate is halved until the summed estimate drops
//! below the absolute tolerance or the panel budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an integration: value, summed error estimate, panels used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut fvals = [(0.0, 0.0); 7];
    for (i, x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        let pair = (f(center - dx), f(center + dx));
        fvals[i] = pair;
        kronrod += WGK[i] * (pair.0 + pair.1);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (pair.0 + pair.1);
        }
    }

    // QUADPACK error heuristic.
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for (i, (l, r)) in fvals.iter().enumerate() {
        resasc += WGK[i] * ((l - mean).abs() + (r - mean).abs());
    }
    let resasc = resasc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }

    Panel {
        a,
        b,
        value: kronrod * half,
        error,
    }
}

/// Integrates `f` over `[breakpoints[0], breakpoints.last()]`.
///
/// `breakpoints` must be increasing and contain at least two entries; every
/// gap becomes one initial panel. On failure the best available estimate is
/// returned in the `Err` variant.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    max_panels: usize,
) -> Result<Estimate, Estimate> {
    debug_assert!(breakpoints.len() >= 2);
    debug_assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));

    let mut heap: BinaryHeap<Panel> = breakpoints
        .windows(2)
        .map(|w| kronrod15(&f, w[0], w[1]))
        .collect();
    let max_panels = max_panels.max(heap.len());

    let total_error = |heap: &BinaryHeap<Panel>| heap.iter().map(|p| p.error).sum::<f64>();
    let mut error = total_error(&heap);

    while error > abs_tol && heap.len() < max_panels {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point.
            heap.push(worst);
            break;
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to avoid drift from the running update.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    let est = Estimate {
        value,
        error,
        panels: panels.len(),
    };
    if error <= abs_tol {
        Ok(est)
    } else {
        Err(est)
    }
}
