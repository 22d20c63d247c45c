//! JSON scene manifests: a list of band files, an optional PAN file and the
//! PAN:MS resolution ratio. Relative paths resolve against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_pgm, BandImage, MultiBandImage};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandEntry {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanEntry {
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub ratio: usize,
    pub bands: Vec<BandEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pan: Option<PanEntry>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        if manifest.bands.is_empty() {
            return Err(Error::Config(format!("{}: manifest lists no bands", path.display())));
        }
        if manifest.ratio == 0 {
            return Err(Error::Config(format!("{}: ratio must be >= 1", path.display())));
        }
        Ok(manifest)
    }
}

/// A loaded manifest.
#[derive(Debug, Clone)]
pub struct Scene {
    pub ms: MultiBandImage,
    pub pan: Option<BandImage>,
    pub ratio: usize,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn load_scene(manifest_path: &Path) -> Result<Scene> {
    let manifest = Manifest::read(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let bands = manifest.bands.iter().map(|b| read_pgm(&resolve(base, &b.path))).collect::<Result<Vec<_>>>()?;
    let names = manifest.bands.iter().map(|b| b.name.clone()).collect();
    let ms = MultiBandImage::new(bands)?.with_names(names)?;
    let pan = manifest.pan.as_ref().map(|p| read_pgm(&resolve(base, &p.path))).transpose()?;
    Ok(Scene { ms, pan, ratio: manifest.ratio })
}

/// Loads the bands listed in a manifest, in manifest order.
pub fn load_multiband(manifest_path: &Path) -> Result<MultiBandImage> {
    load_scene(manifest_path).map(|s| s.ms)
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::save_band;

    fn write_bands(dir: &Path, sizes: &[(usize, usize)]) -> Manifest {
        let bands = sizes
            .iter()
            .enumerate()
            .map(|(i, &(w, h))| {
                let b = BandImage::from_fn(w, h, |x, y| (x + y + i) as f64).unwrap();
                let name = format!("b{i}.pgm");
                save_band(&b, &dir.join(&name), 16).unwrap();
                BandEntry { name: format!("band{i}"), path: name.into() }
            })
            .collect();
        Manifest { ratio: 4, bands, pan: None }
    }

    #[test]
    fn loads_four_bands_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_bands(dir.path(), &[(64, 64); 4]);
        let path = dir.path().join("scene.json");
        write_manifest(&path, &m).unwrap();
        let ms = load_multiband(&path).unwrap();
        assert_eq!(ms.band_count(), 4);
        assert_eq!(ms.dims(), (64, 64));
        assert_eq!(ms.band(2).get(0, 0), 2.0);
        assert_eq!(ms.names().unwrap()[3], "band3");
    }

    #[test]
    fn single_band_is_valid() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_bands(dir.path(), &[(8, 8)]);
        let path = dir.path().join("scene.json");
        write_manifest(&path, &m).unwrap();
        assert_eq!(load_multiband(&path).unwrap().band_count(), 1);
    }

    #[test]
    fn mismatched_bands_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_bands(dir.path(), &[(64, 64), (32, 32)]);
        let path = dir.path().join("scene.json");
        write_manifest(&path, &m).unwrap();
        assert!(matches!(load_multiband(&path), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn missing_band_file() {
        let dir = tempfile::tempdir().unwrap();
        let m = Manifest { ratio: 4, bands: vec![BandEntry { name: "x".into(), path: "nope.pgm".into() }], pan: None };
        let path = dir.path().join("scene.json");
        write_manifest(&path, &m).unwrap();
        assert!(matches!(load_multiband(&path), Err(Error::Io { .. })));
        assert!(matches!(load_multiband(&dir.path().join("absent.json")), Err(Error::Io { .. })));
    }
}
