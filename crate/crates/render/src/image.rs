use std::io::{self, Write};

/// RGB image, row-major, top row first, three channels per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Framebuffer {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f64>,
}

impl Framebuffer {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width as usize * height as usize * 3],
        }
    }

    pub fn pixel(&self, x: u32, y: u32) -> [f64; 3] {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [f64; 3]) {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Copy with every channel clamped to [0, 1].
    pub fn clamped(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|c| c.clamp(0.0, 1.0)).collect(),
        }
    }

    /// 8 bits per channel, `round(c * 255)` of the clamped value.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|c| (c.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }

    /// Binary PPM (P6, maxval 255).
    pub fn write_ppm(&self, mut out: impl Write) -> io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.to_rgb8())
    }
}

/// Metric view-axis depth, row-major, top row first. Pixels without
/// geometry hold `far`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthBuffer {
    pub width: u32,
    pub height: u32,
    pub near: f64,
    pub far: f64,
    pub data: Vec<f64>,
}

impl DepthBuffer {
    pub fn new(width: u32, height: u32, near: f64, far: f64) -> Self {
        Self {
            width,
            height,
            near,
            far,
            data: vec![far; width as usize * height as usize],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// 16-bit samples mapping [near, far] linearly onto [0, 65535].
    pub fn to_u16(&self) -> Vec<u16> {
        let span = self.far - self.near;
        self.data
            .iter()
            .map(|d| (((d - self.near) / span).clamp(0.0, 1.0) * 65535.0).round() as u16)
            .collect()
    }

    /// Binary PGM (P5, maxval 65535, big-endian samples).
    pub fn write_pgm(&self, mut out: impl Write) -> io::Result<()> {
        write!(out, "P5\n{} {}\n65535\n", self.width, self.height)?;
        let bytes: Vec<u8> = self.to_u16().iter().flat_map(|v| v.to_be_bytes()).collect();
        out.write_all(&bytes)
    }
}
