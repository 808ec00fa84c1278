//! Component fields `(φ, ψ, F)`, the gravitino `χ`, and their line-oriented text format.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{Grassmann, Parity};
use crate::target::{ModelDescriptor, TargetGeometry};

use super::grid::ReducedPatch;
use super::spin::project_pq;
use super::{one_plus_ij, spinor_zero, GVec, GravitinoPoint, Spinor};

/// `φ` is real and body-only: a periodic grid function plus a linear drift
/// `φ^b(x) = φ_per^b(x) + A_b1 x¹ + A_b2 x²`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentMap {
    pub n_gen: usize,
    pub phi: Vec<Vec<f64>>,
    pub drift: Vec<[f64; 2]>,
    pub psi: Vec<Spinor>,
    pub f: Vec<GVec>,
}

impl ComponentMap {
    pub fn zero(points: usize, dim: usize, n_gen: usize) -> Self {
        ComponentMap {
            n_gen,
            phi: vec![vec![0.0; dim]; points],
            drift: vec![[0.0; 2]; dim],
            psi: vec![spinor_zero(dim, n_gen); points],
            f: vec![vec![Grassmann::zero(n_gen); dim]; points],
        }
    }

    pub fn dim(&self) -> usize {
        self.drift.len()
    }

    pub fn points(&self) -> usize {
        self.phi.len()
    }

    /// Chart position `φ(x_p)` including the drift.
    pub fn phi_at(&self, patch: &ReducedPatch, p: usize) -> Vec<f64> {
        let (x1, x2) = patch.coords(p);
        self.phi[p]
            .iter()
            .zip(&self.drift)
            .map(|(v, a)| v + a[0] * x1 + a[1] * x2)
            .collect()
    }

    /// `∂_k φ^b` indexed `[k][p][b]`.
    pub fn dphi(&self, patch: &ReducedPatch) -> [Vec<Vec<f64>>; 2] {
        let dim = self.dim();
        let n = self.points();
        let mut out = [vec![vec![0.0; dim]; n], vec![vec![0.0; dim]; n]];
        for b in 0..dim {
            let col: Vec<f64> = self.phi.iter().map(|v| v[b]).collect();
            for (k, o) in out.iter_mut().enumerate() {
                for (p, d) in patch.deriv(&col, k).into_iter().enumerate() {
                    o[p][b] = d + self.drift[b][k];
                }
            }
        }
        out
    }

    /// Shapes against the patch and target, and parities (`ψ` odd, `F` even).
    pub fn validate(&self, patch: &ReducedPatch, model: &dyn TargetGeometry) -> Result<()> {
        let dim = model.dim();
        if self.dim() != dim {
            return Err(Error::Shape(format!(
                "drift has {} rows, target dimension {dim}",
                self.dim()
            )));
        }
        let n = patch.len();
        for (name, len) in [
            ("phi", self.phi.len()),
            ("psi", self.psi.len()),
            ("F", self.f.len()),
        ] {
            if len != n {
                return Err(Error::Shape(format!(
                    "{name} has {len} points, grid has {n}"
                )));
            }
        }
        for p in 0..n {
            if self.phi[p].len() != dim
                || self.f[p].len() != dim
                || self.psi[p].iter().any(|s| s.len() != dim)
            {
                return Err(Error::Shape(format!("wrong target dimension at point {p}")));
            }
            if let Some(g) = self.psi[p]
                .iter()
                .flatten()
                .chain(&self.f[p])
                .find(|g| g.n_gen() != self.n_gen)
            {
                return Err(Error::GeneratorMismatch {
                    left: self.n_gen,
                    right: g.n_gen(),
                });
            }
            if self.psi[p]
                .iter()
                .flatten()
                .any(|g| matches!(g.parity(), Parity::Even | Parity::Mixed) && !g.is_zero())
            {
                return Err(Error::Parity(format!("ψ is not odd at point {p}")));
            }
            if self.f[p]
                .iter()
                .any(|g| matches!(g.parity(), Parity::Odd | Parity::Mixed) && !g.is_zero())
            {
                return Err(Error::Parity(format!("F is not even at point {p}")));
            }
            model.check_domain(&self.phi_at(patch, p))?;
        }
        Ok(())
    }

    /// `(ψ^{1,0}, ψ^{0,1}) = (½(1 − I⊗J)ψ, ½(1 + I⊗J)ψ)`, so `(1 + I⊗J)ψ^{1,0} = 0`.
    pub fn split_psi(
        &self,
        patch: &ReducedPatch,
        model: &dyn TargetGeometry,
    ) -> (Vec<Spinor>, Vec<Spinor>) {
        (0..self.points())
            .map(|p| {
                let j = model.j(&self.phi_at(patch, p));
                let hol = super::pair_scale(&one_plus_ij(&self.psi[p], &j, -1.0), 0.5);
                let anti = super::pair_scale(&one_plus_ij(&self.psi[p], &j, 1.0), 0.5);
                (hol, anti)
            })
            .unzip()
    }
}

/// Gravitino `χ_k^κ` on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Gravitino {
    pub n_gen: usize,
    pub chi: Vec<GravitinoPoint>,
}

impl Gravitino {
    pub fn zero(points: usize, n_gen: usize) -> Self {
        let z = || [Grassmann::zero(n_gen), Grassmann::zero(n_gen)];
        Gravitino {
            n_gen,
            chi: vec![[z(), z()]; points],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.chi.iter().flatten().flatten().all(Grassmann::is_zero)
    }

    /// Pointwise `(Pχ, Qχ)`.
    pub fn project(&self) -> (Gravitino, Gravitino) {
        let (p, q): (Vec<_>, Vec<_>) = self.chi.iter().map(project_pq).unzip();
        (
            Gravitino {
                n_gen: self.n_gen,
                chi: p,
            },
            Gravitino {
                n_gen: self.n_gen,
                chi: q,
            },
        )
    }
}

/// Contents of a component file: patch, model and fields.
#[derive(Clone, Debug)]
pub struct ComponentFile {
    pub patch: ReducedPatch,
    pub model: ModelDescriptor,
    pub map: ComponentMap,
    pub chi: Gravitino,
}

#[derive(Serialize, Deserialize)]
struct Header {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "L")]
    l: usize,
    model: ModelDescriptor,
    lambda: Vec<f64>,
    #[serde(default)]
    drift: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    phi: Vec<f64>,
    psi: [Vec<String>; 2],
    #[serde(rename = "F")]
    f: Vec<String>,
    #[serde(default)]
    chi: Option<[[String; 2]; 2]>,
}

fn text_vec(v: &GVec) -> Vec<String> {
    v.iter().map(Grassmann::to_text).collect()
}

fn parse_vec(n_gen: usize, v: &[String], dim: usize, line: usize) -> Result<GVec> {
    if v.len() != dim {
        return Err(Error::Shape(format!(
            "line {line}: expected {dim} entries, got {}",
            v.len()
        )));
    }
    v.iter().map(|s| Grassmann::parse(n_gen, s)).collect()
}

fn json_err(line: usize, e: serde_json::Error) -> Error {
    Error::Parse(format!("line {line}: {e}"))
}

/// Writes a JSON header line followed by one JSON record per grid point.
pub fn write_component_file<W: Write>(w: &mut W, file: &ComponentFile) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(e.to_string());
    let header = Header {
        m: file.patch.m(),
        l: file.map.n_gen,
        model: file.model.clone(),
        lambda: file.patch.lambda().to_vec(),
        drift: Some(file.map.drift.clone()),
    };
    writeln!(
        w,
        "{}",
        serde_json::to_string(&header).map_err(|e| json_err(1, e))?
    )
    .map_err(io)?;
    for p in 0..file.patch.len() {
        let c = &file.chi.chi[p];
        let rec = Record {
            phi: file.map.phi[p].clone(),
            psi: [text_vec(&file.map.psi[p][0]), text_vec(&file.map.psi[p][1])],
            f: text_vec(&file.map.f[p]),
            chi: Some([
                [c[0][0].to_text(), c[0][1].to_text()],
                [c[1][0].to_text(), c[1][1].to_text()],
            ]),
        };
        writeln!(
            w,
            "{}",
            serde_json::to_string(&rec).map_err(|e| json_err(p + 2, e))?
        )
        .map_err(io)?;
    }
    Ok(())
}

/// Reads the format of [`write_component_file`]; blank lines are skipped and `chi` may be omitted.
pub fn read_component_file<R: BufRead>(r: R) -> Result<ComponentFile> {
    let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        Ok(s) => Some(Ok((i + 1, s))),
        Err(e) => Some(Err(Error::Config(e.to_string()))),
    });
    let (hl, htext) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty component file".into()))??;
    let header: Header = serde_json::from_str(&htext).map_err(|e| json_err(hl, e))?;
    let patch = ReducedPatch::new(header.m, header.lambda)?;
    let model = header.model.build()?;
    let dim = model.dim();
    let n_gen = header.l;
    let mut map = ComponentMap::zero(0, dim, n_gen);
    if let Some(d) = header.drift {
        if d.len() != dim {
            return Err(Error::Shape(format!(
                "drift has {} rows, target dimension {dim}",
                d.len()
            )));
        }
        map.drift = d;
    }
    let mut chi = Gravitino::zero(0, n_gen);
    for item in lines {
        let (ln, text) = item?;
        let rec: Record = serde_json::from_str(&text).map_err(|e| json_err(ln, e))?;
        if rec.phi.len() != dim {
            return Err(Error::Shape(format!(
                "line {ln}: phi has {} entries, expected {dim}",
                rec.phi.len()
            )));
        }
        map.phi.push(rec.phi);
        map.psi.push([
            parse_vec(n_gen, &rec.psi[0], dim, ln)?,
            parse_vec(n_gen, &rec.psi[1], dim, ln)?,
        ]);
        map.f.push(parse_vec(n_gen, &rec.f, dim, ln)?);
        let point = match rec.chi {
            None => Gravitino::zero(1, n_gen).chi.remove(0),
            Some(c) => {
                let g = |s: &String| Grassmann::parse(n_gen, s);
                [[g(&c[0][0])?, g(&c[0][1])?], [g(&c[1][0])?, g(&c[1][1])?]]
            }
        };
        chi.chi.push(point);
    }
    if map.points() != patch.len() {
        return Err(Error::ComponentCount {
            expected: patch.len(),
            got: map.points(),
        });
    }
    map.validate(&patch, &model)?;
    Ok(ComponentFile {
        patch,
        model: header.model,
        map,
        chi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::target::AlmostKahlerModel;

    fn sample() -> ComponentFile {
        let patch = ReducedPatch::flat(4).unwrap();
        let mut map = ComponentMap::zero(16, 2, 2);
        map.drift = vec![[1.0, 0.0], [0.0, 1.0]];
        let l1 = Grassmann::<f64>::generator(2, 1).unwrap();
        let l2 = Grassmann::<f64>::generator(2, 2).unwrap();
        for p in 0..16 {
            map.phi[p] = vec![0.1 * p as f64, -0.25];
            map.psi[p][0][1] = l1.scale(&(p as f64 + 0.5));
            map.f[p][0] = &l1 * &l2;
        }
        let mut chi = Gravitino::zero(16, 2);
        chi.chi[3][1][0] = l2.scale(&-2.0);
        ComponentFile {
            patch,
            model: AlmostKahlerModel::flat(1).descriptor(),
            map,
            chi,
        }
    }

    #[test]
    fn file_round_trip() {
        let file = sample();
        let mut buf = Vec::new();
        write_component_file(&mut buf, &file).unwrap();
        let back = read_component_file(buf.as_slice()).unwrap();
        assert_eq!(back.map, file.map);
        assert_eq!(back.chi, file.chi);
        assert_eq!(back.patch.lambda(), file.patch.lambda());
    }

    #[test]
    fn truncated_file_is_rejected() {
        let mut buf = Vec::new();
        write_component_file(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: Vec<&str> = text.lines().take(5).collect();
        let err = read_component_file(cut.join("\n").as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            Error::ComponentCount {
                expected: 16,
                got: 4
            }
        ));
    }

    #[test]
    fn even_psi_is_rejected() {
        let mut file = sample();
        file.map.psi[0][0][0] = Grassmann::one(2);
        let model = file.model.build().unwrap();
        assert!(matches!(
            file.map.validate(&file.patch, &model),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn drift_enters_derivatives() {
        let file = sample();
        let d = file.map.dphi(&file.patch);
        for p in 0..16 {
            assert!((d[0][p][1]).abs() < 1e-12);
            assert!((d[1][p][1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn split_is_complementary() {
        let file = sample();
        let model = file.model.build().unwrap();
        let (a, b) = file.map.split_psi(&file.patch, &model);
        for p in 0..16 {
            let s = super::super::pair_add(&a[p], &b[p]);
            assert_eq!(s, file.map.psi[p]);
        }
    }
}
