use crate::error::{Error, Result};
use crate::image::Image;

/// One level of 2D Haar analysis. Each subband is half the size of the
/// analyzed grid in both directions.
///
/// `hl` carries horizontal-frequency detail (differences across columns),
/// `lh` vertical-frequency detail (differences across rows).
#[derive(Clone, Debug, PartialEq)]
pub struct SubbandSet {
    pub ll: Image,
    pub hl: Image,
    pub lh: Image,
    pub hh: Image,
}

impl SubbandSet {
    pub fn energy(&self) -> f64 {
        self.ll.energy() + self.hl.energy() + self.lh.energy() + self.hh.energy()
    }
}

/// Two-level Haar decomposition: level 1 on the image, level 2 on the
/// level-1 LL band. The level-1 LL itself is not kept.
#[derive(Clone, Debug, PartialEq)]
pub struct DwtPyramid {
    pub level2: SubbandSet,
    pub hl1: Image,
    pub lh1: Image,
    pub hh1: Image,
    pub original_width: usize,
    pub original_height: usize,
}

impl DwtPyramid {
    pub fn energy(&self) -> f64 {
        self.level2.energy() + self.hl1.energy() + self.lh1.energy() + self.hh1.energy()
    }
}

/// Orthonormal analysis of every 2x2 block `[a b; c d]`:
/// `ll = (a+b+c+d)/2`, `hl = (a-b+c-d)/2`, `lh = (a+b-c-d)/2`, `hh = (a-b-c+d)/2`.
pub fn haar_forward_level(grid: &Image) -> Result<SubbandSet> {
    let (w, h) = (grid.width(), grid.height());
    if !w.is_multiple_of(2) || !h.is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "Haar level needs even sides, got {w}x{h}"
        )));
    }
    let (hw, hh_) = (w / 2, h / 2);
    let mut ll = Vec::with_capacity(hw * hh_);
    let mut hl = Vec::with_capacity(hw * hh_);
    let mut lh = Vec::with_capacity(hw * hh_);
    let mut hh = Vec::with_capacity(hw * hh_);
    let px = grid.pixels();
    for r in 0..hh_ {
        let top = &px[2 * r * w..(2 * r + 1) * w];
        let bottom = &px[(2 * r + 1) * w..(2 * r + 2) * w];
        for c in 0..hw {
            let (a, b) = (top[2 * c], top[2 * c + 1]);
            let (cc, d) = (bottom[2 * c], bottom[2 * c + 1]);
            ll.push((a + b + cc + d) * 0.5);
            hl.push((a - b + cc - d) * 0.5);
            lh.push((a + b - cc - d) * 0.5);
            hh.push((a - b - cc + d) * 0.5);
        }
    }
    Ok(SubbandSet {
        ll: Image::new(hw, hh_, ll)?,
        hl: Image::new(hw, hh_, hl)?,
        lh: Image::new(hw, hh_, lh)?,
        hh: Image::new(hw, hh_, hh)?,
    })
}

pub fn haar_inverse_level(bands: &SubbandSet) -> Result<Image> {
    let SubbandSet { ll, hl, lh, hh } = bands;
    for band in [hl, lh, hh] {
        if !band.same_shape(ll) {
            return Err(Error::Dimension(format!(
                "subband {}x{} does not match LL {}x{}",
                band.width(),
                band.height(),
                ll.width(),
                ll.height()
            )));
        }
    }
    let (hw, hh_) = (ll.width(), ll.height());
    let w = 2 * hw;
    let mut out = vec![0.0; w * 2 * hh_];
    for r in 0..hh_ {
        for c in 0..hw {
            let i = r * hw + c;
            let (s, x, y, z) = (
                ll.pixels()[i],
                hl.pixels()[i],
                lh.pixels()[i],
                hh.pixels()[i],
            );
            out[2 * r * w + 2 * c] = (s + x + y + z) * 0.5;
            out[2 * r * w + 2 * c + 1] = (s - x + y - z) * 0.5;
            out[(2 * r + 1) * w + 2 * c] = (s + x - y - z) * 0.5;
            out[(2 * r + 1) * w + 2 * c + 1] = (s - x - y + z) * 0.5;
        }
    }
    Image::new(w, 2 * hh_, out)
}

pub fn haar_pyramid(image: &Image) -> Result<DwtPyramid> {
    let (w, h) = (image.width(), image.height());
    if !w.is_multiple_of(4) || !h.is_multiple_of(4) {
        return Err(Error::Dimension(format!(
            "two Haar levels need sides divisible by 4, got {w}x{h}"
        )));
    }
    let level1 = haar_forward_level(image)?;
    let level2 = haar_forward_level(&level1.ll)?;
    Ok(DwtPyramid {
        level2,
        hl1: level1.hl,
        lh1: level1.lh,
        hh1: level1.hh,
        original_width: w,
        original_height: h,
    })
}

pub fn haar_inverse(pyramid: &DwtPyramid) -> Result<Image> {
    let (w, h) = (pyramid.original_width, pyramid.original_height);
    let l2 = &pyramid.level2.ll;
    if l2.width() * 4 != w || l2.height() * 4 != h {
        return Err(Error::Dimension(format!(
            "level-2 bands {}x{} inconsistent with {w}x{h} image",
            l2.width(),
            l2.height()
        )));
    }
    let ll1 = haar_inverse_level(&pyramid.level2)?;
    haar_inverse_level(&SubbandSet {
        ll: ll1,
        hl: pyramid.hl1.clone(),
        lh: pyramid.lh1.clone(),
        hh: pyramid.hh1.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block() -> Image {
        Image::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn hand_computed_block() {
        let s = haar_forward_level(&block()).unwrap();
        assert_eq!(s.ll.pixels(), &[5.0]);
        assert_eq!(s.hl.pixels(), &[-1.0]);
        assert_eq!(s.lh.pixels(), &[-2.0]);
        assert_eq!(s.hh.pixels(), &[0.0]);
        assert_eq!(s.energy(), 30.0);
        assert_eq!(block().energy(), 30.0);
        assert_eq!(haar_inverse_level(&s).unwrap(), block());
    }

    #[test]
    fn constant_grid_has_no_detail() {
        let s = haar_forward_level(&Image::filled(6, 4, 3.5)).unwrap();
        assert!(s.ll.pixels().iter().all(|&v| v == 7.0));
        for band in [&s.hl, &s.lh, &s.hh] {
            assert!(band.pixels().iter().all(|&v| v == 0.0));
        }
        let back = haar_inverse_level(&s).unwrap();
        assert_eq!(back, Image::filled(6, 4, 3.5));
    }

    #[test]
    fn odd_sides_and_mismatched_bands_are_rejected() {
        assert!(haar_forward_level(&Image::zeros(3, 4)).is_err());
        let bad = SubbandSet {
            ll: Image::zeros(2, 2),
            hl: Image::zeros(2, 2),
            lh: Image::zeros(3, 2),
            hh: Image::zeros(2, 2),
        };
        assert!(haar_inverse_level(&bad).is_err());
        assert!(haar_pyramid(&Image::zeros(6, 8)).is_err());
    }

    #[test]
    fn pyramid_sizes() {
        let p = haar_pyramid(&Image::zeros(256, 256)).unwrap();
        assert_eq!((p.level2.hl.width(), p.level2.hl.height()), (64, 64));
        assert_eq!((p.hl1.width(), p.hl1.height()), (128, 128));
    }

    #[test]
    fn ramp_round_trip() {
        let ramp = Image::from_fn(4, 4, |r, c| (r * 4 + c + 1) as f64);
        let back = haar_inverse(&haar_pyramid(&ramp).unwrap()).unwrap();
        assert!(back.max_abs_diff(&ramp).unwrap() < 1e-9);
    }

    #[test]
    fn inconsistent_pyramid_is_rejected() {
        let mut p = haar_pyramid(&Image::zeros(8, 8)).unwrap();
        p.original_width = 12;
        assert!(haar_inverse(&p).is_err());
    }
}
