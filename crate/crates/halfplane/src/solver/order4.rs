//! Fourth-order spatial operator on the strip, built variationally.
//!
//! Strains live on a staggered grid of x-collocation points that includes
//! both wall points: s_0 = 0, s_c = (c - 1/2)h for interior cells, and
//! s_{nx} = (nx - 1)h. Derivatives and interpolations in x map node values
//! to those points,
//!
//! ```text
//! exx = Iy(Dx u)   eyy = Ix(Dy v)   exy = Ix(Dy u)   eyx = Iy(Dx v)
//! ```
//!
//! and the discrete elastic energy is the quadrature sum over collocation
//! points of
//!
//! ```text
//! (1/2)*[(2mu+lambda)*(exx^2 + eyy^2) + 2*lambda*exx*eyy + mu*(exy+eyx)^2]
//! ```
//!
//! The force is the exact (negative) gradient of that energy, so the
//! stiffness operator is symmetric positive semidefinite by construction and
//! the traction condition enters as the natural boundary condition, with the
//! data applied as a boundary load.
//!
//! Accuracy near the wall comes from the closure tables below. They were
//! solved offline (and frozen here) so that the derivative rows, the
//! interpolation rows, and their quadrature-weighted transposes are all
//! simultaneously consistent: with W_c and W_n the diagonal cell and node
//! rules,
//!
//! ```text
//! Dx^T W_c = B - W_n * Dx~        Ix^T W_c = W_n * Ix~
//! ```
//!
//! where B carries only the two wall-flux entries and Dx~, Ix~ are again
//! accurate derivative/interpolation rows. Without that dual-pair structure
//! the transpose of an accurate row need not be accurate, and the gradient
//! of the energy loses consistency in the closure band; with it, every row
//! of the assembled operator is a consistent approximation and the wall flux
//! pairs exactly with the traction load.

use super::WaveField;
use rayon::prelude::*;

/// Number of specialized closure rows at each end of the staggered
/// x-operators.
const CLOSE_ROWS: usize = 4;
/// Node width of each closure row.
const CLOSE_W: usize = 6;
/// Number of specialized cell quadrature weights at each end.
const CLOSE_CELLS: usize = 5;

/// Node quadrature weights nearest the wall, in units of h (interior weight
/// is 1). Exact on cubics together with [`WC4`].
const WN4: [f64; CLOSE_ROWS] = [
    3.532_986_111_111_204_9e-1,
    1.231_770_833_333_314_2e0,
    8.932_291_666_666_838_4e-1,
    1.021_701_388_888_880_8e0,
];

/// Collocation-point quadrature weights nearest the wall, in units of h
/// (interior weight is 1). The first entry weights the wall point s = 0.
const WC4: [f64; CLOSE_CELLS] = [
    7.936_507_936_506_587_1e-2,
    9.453_125_000_000_338_6e-1,
    9.418_402_777_777_457_0e-1,
    1.044_270_833_333_348_8e0,
    9.892_113_095_238_059_8e-1,
];

/// Closure rows of the node-to-collocation derivative, for unit spacing;
/// row c acts on nodes 0..6 and is exact on cubics at s_c.
const D_ROWS4: [[f64; CLOSE_W]; CLOSE_ROWS] = [
    [
        -1.825_297_925_210_813_5e0,
        2.718_486_375_509_616_7e0,
        -4.542_995_832_628_113_4e-1,
        -1.195_040_251_160_879_5e0,
        1.005_523_376_125_798_2e0,
        -2.493_719_920_009_133_4e-1,
    ],
    [
        -9.486_609_589_068_788_5e-1,
        8.750_906_925_605_659_3e-1,
        2.791_348_549_321_422_1e-2,
        1.523_249_772_257_905_5e-1,
        -1.454_483_866_390_783_3e-1,
        3.878_019_026_638_660_6e-2,
    ],
    [
        9.580_205_376_125_861_0e-3,
        -1.021_489_256_036_026_7e0,
        1.031_821_637_049_488_4e0,
        -6.233_142_869_358_143_0e-2,
        6.725_394_350_217_023_3e-2,
        -2.483_510_119_817_402_1e-2,
    ],
    [
        3.123_993_611_809_124_1e-2,
        -7.747_734_593_538_716_0e-2,
        -9.608_233_107_727_240_9e-1,
        1.034_934_646_749_569_7e0,
        -3.368_965_802_987_984_6e-2,
        5.815_731_870_331_351_5e-3,
    ],
];

/// Closure rows of the node-to-collocation interpolation; row c acts on
/// nodes 0..6 and is exact on quadratics at s_c.
const I_ROWS4: [[f64; CLOSE_W]; CLOSE_ROWS] = [
    [
        9.711_952_205_551_340_8e-1,
        9.942_463_591_531_597_3e-2,
        -1.007_471_866_819_940_9e-1,
        -6.258_460_997_413_478_6e-3,
        6.108_383_560_384_750_3e-2,
        -2.469_804_439_488_794_4e-2,
    ],
    [
        4.311_656_682_435_205_9e-1,
        5.690_799_193_955_409_2e-1,
        4.943_145_676_199_939_3e-2,
        5.694_309_055_578_883_3e-4,
        -8.158_125_089_687_851_0e-2,
        3.133_477_559_025_960_7e-2,
    ],
    [
        -1.323_191_745_791_360_6e-1,
        7.984_500_502_212_152_9e-1,
        3.305_465_449_504_283_4e-1,
        -8.414_819_038_716_303_5e-2,
        1.444_524_179_338_695_4e-1,
        -5.698_164_813_921_427_5e-2,
    ],
    [
        -6.457_273_393_549_359_3e-3,
        -6.328_893_527_706_816_5e-2,
        5.793_520_598_125_313_5e-1,
        5.812_501_661_602_717_0e-1,
        -1.151_144_036_821_272_3e-1,
        2.425_838_637_994_225_1e-2,
    ],
];

/// One x-operator as sparse rows: `rows[c]` lists (source node, weight) for
/// collocation point c and `t_rows[i]` the transpose gather lists.
struct XOp {
    rows: Vec<Vec<(usize, f64)>>,
    t_rows: Vec<Vec<(usize, f64)>>,
}

impl XOp {
    /// Node-to-collocation operator with `nx` sources and `nx + 1` rows:
    /// the bottom `CLOSE_ROWS` rows come from `close` scaled by `scale`,
    /// interior rows use the 4-point stencil `interior` (already scaled) on
    /// nodes c-2..=c+1, and the top rows mirror the bottom ones (`sign` is -1
    /// for derivatives, +1 for interpolations).
    fn staggered(
        nx: usize,
        close: &[[f64; CLOSE_W]; CLOSE_ROWS],
        interior: &[f64; 4],
        scale: f64,
        sign: f64,
    ) -> XOp {
        let nc = nx + 1;
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(nc);
        for c in 0..nc {
            if c < CLOSE_ROWS {
                rows.push((0..CLOSE_W).map(|k| (k, close[c][k] * scale)).collect());
            } else if c >= nc - CLOSE_ROWS {
                let r = nc - 1 - c;
                rows.push((0..CLOSE_W).map(|k| (nx - 1 - k, sign * close[r][k] * scale)).collect());
            } else {
                rows.push((0..4).map(|k| (c - 2 + k, interior[k])).collect());
            }
        }
        let mut t_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nx];
        for (c, row) in rows.iter().enumerate() {
            for &(i, wt) in row {
                t_rows[i].push((c, wt));
            }
        }
        XOp { rows, t_rows }
    }
}

pub(crate) struct Op4 {
    pub nx: usize,
    pub n: usize,
    pub h: f64,
    pub lambda: f64,
    pub mu: f64,
    dx: XOp,
    ix: XOp,
    /// Collocation quadrature weights (units of h), 1 in the interior.
    wc: Vec<f64>,
    /// Node quadrature weights (units of h), 1 in the interior.
    wnode: Vec<f64>,
    // Work buffers: node-row x cell-col (nx*n) and collocation-row x col
    // ((nx+1)*n).
    dyu: Vec<f64>,
    dyv: Vec<f64>,
    exx: Vec<f64>,
    eyy: Vec<f64>,
    exys: Vec<f64>,
    txx: Vec<f64>,
    txy: Vec<f64>,
}

impl Op4 {
    pub fn new(nx: usize, n: usize, h: f64, lambda: f64, mu: f64) -> Op4 {
        assert!(nx >= 12 && n >= 4, "fourth-order operator needs nx >= 12 and ny >= 5");
        let inv24h = 1.0 / (24.0 * h);
        let dx_int = [inv24h, -27.0 * inv24h, 27.0 * inv24h, -inv24h];
        let ix_int = [-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0];
        let dx = XOp::staggered(nx, &D_ROWS4, &dx_int, 1.0 / h, -1.0);
        let ix = XOp::staggered(nx, &I_ROWS4, &ix_int, 1.0, 1.0);

        let nc = nx + 1;
        let mut wc = vec![1.0; nc];
        let mut wnode = vec![1.0; nx];
        for k in 0..CLOSE_ROWS {
            wnode[k] = WN4[k];
            wnode[nx - 1 - k] = WN4[k];
        }
        for k in 0..CLOSE_CELLS {
            wc[k] = WC4[k];
            wc[nc - 1 - k] = WC4[k];
        }
        for &w in wc.iter().chain(wnode.iter()) {
            assert!(w > 0.0, "quadrature weights must stay positive");
        }

        Op4 {
            nx,
            n,
            h,
            lambda,
            mu,
            dx,
            ix,
            wc,
            wnode,
            dyu: vec![0.0; nx * n],
            dyv: vec![0.0; nx * n],
            exx: vec![0.0; nc * n],
            eyy: vec![0.0; nc * n],
            exys: vec![0.0; nc * n],
            txx: vec![0.0; nc * n],
            txy: vec![0.0; nc * n],
        }
    }

    /// Elastic force F = -K w (+ traction loads when `g_row` is given) on
    /// rows i < nx-1; the Dirichlet row of `out` is zeroed.
    pub fn force(&mut self, w: &WaveField, g_row: Option<&[(f64, f64)]>, out: &mut WaveField) {
        let n = self.n;
        let nx = self.nx;
        let h = self.h;
        let (lam, mu) = (self.lambda, self.mu);
        let cp2 = 2.0 * mu + lam;
        let inv24h = 1.0 / (24.0 * h);

        // Pass A: y-derivatives of u and v at (node row, cell col).
        let u = &w.u;
        let v = &w.v;
        self.dyu
            .par_chunks_mut(n)
            .zip(self.dyv.par_chunks_mut(n))
            .enumerate()
            .for_each(|(i, (du, dv))| {
                let ur = &u[i * n..(i + 1) * n];
                let vr = &v[i * n..(i + 1) * n];
                for j in 0..n {
                    let jm = if j == 0 { n - 1 } else { j - 1 };
                    let jp = if j + 1 == n { 0 } else { j + 1 };
                    let jp2 = if j + 2 >= n { j + 2 - n } else { j + 2 };
                    du[j] = (ur[jm] - 27.0 * ur[j] + 27.0 * ur[jp] - ur[jp2]) * inv24h;
                    dv[j] = (vr[jm] - 27.0 * vr[j] + 27.0 * vr[jp] - vr[jp2]) * inv24h;
                }
            });

        // Pass B: strains at collocation points, then stresses in place
        // (each pre-multiplied by its quadrature measure wc*h^2).
        let dx_rows = &self.dx.rows;
        let ix_rows = &self.ix.rows;
        let (dyu, dyv) = (&self.dyu, &self.dyv);
        let wc = &self.wc;
        self.exx
            .par_chunks_mut(n)
            .zip(self.eyy.par_chunks_mut(n).zip(self.exys.par_chunks_mut(n)))
            .enumerate()
            .for_each_init(
                || (vec![0.0f64; n], vec![0.0f64; n]),
                |(gxu, gxv), (c, (exx, (eyy, exys)))| {
                    gxu.fill(0.0);
                    gxv.fill(0.0);
                    for &(i, wt) in &dx_rows[c] {
                        let ur = &u[i * n..(i + 1) * n];
                        let vr = &v[i * n..(i + 1) * n];
                        for j in 0..n {
                            gxu[j] += wt * ur[j];
                            gxv[j] += wt * vr[j];
                        }
                    }
                    // exx = Iy(Dx u), eyx = Iy(Dx v)
                    for j in 0..n {
                        let jm = if j == 0 { n - 1 } else { j - 1 };
                        let jp = if j + 1 == n { 0 } else { j + 1 };
                        let jp2 = if j + 2 >= n { j + 2 - n } else { j + 2 };
                        exx[j] = (-gxu[jm] + 9.0 * gxu[j] + 9.0 * gxu[jp] - gxu[jp2]) / 16.0;
                        exys[j] = (-gxv[jm] + 9.0 * gxv[j] + 9.0 * gxv[jp] - gxv[jp2]) / 16.0;
                    }
                    // eyy = Ix(Dy v), exy = Ix(Dy u)
                    eyy.fill(0.0);
                    for &(i, wt) in &ix_rows[c] {
                        let du = &dyu[i * n..(i + 1) * n];
                        let dv = &dyv[i * n..(i + 1) * n];
                        for j in 0..n {
                            eyy[j] += wt * dv[j];
                            exys[j] += wt * du[j];
                        }
                    }
                    let sc = wc[c] * h * h;
                    for j in 0..n {
                        let a = exx[j];
                        let b = eyy[j];
                        exx[j] = sc * (cp2 * a + lam * b);
                        eyy[j] = sc * (cp2 * b + lam * a);
                        exys[j] = sc * mu * exys[j];
                    }
                },
            );

        // Pass C: y-transposed interpolation of sxx and sxy back to node
        // columns (still on collocation rows).
        let (exx, exys) = (&self.exx, &self.exys);
        self.txx
            .par_chunks_mut(n)
            .zip(self.txy.par_chunks_mut(n))
            .enumerate()
            .for_each(|(c, (txx, txy))| {
                let sxx = &exx[c * n..(c + 1) * n];
                let sxy = &exys[c * n..(c + 1) * n];
                for j in 0..n {
                    let jm = if j == 0 { n - 1 } else { j - 1 };
                    let jm2 = if j < 2 { j + n - 2 } else { j - 2 };
                    let jp = if j + 1 == n { 0 } else { j + 1 };
                    txx[j] = (-sxx[jp] + 9.0 * sxx[j] + 9.0 * sxx[jm] - sxx[jm2]) / 16.0;
                    txy[j] = (-sxy[jp] + 9.0 * sxy[j] + 9.0 * sxy[jm] - sxy[jm2]) / 16.0;
                }
            });

        // Pass D: scatter to node forces,
        //   Fu = -[Dx^T Iy^T sxx + Dy^T Ix^T sxy]
        //   Fv = -[Dx^T Iy^T sxy + Dy^T Ix^T syy]
        let dxt = &self.dx.t_rows;
        let ixt = &self.ix.t_rows;
        let (eyy, txx, txy) = (&self.eyy, &self.txx, &self.txy);
        out.u
            .par_chunks_mut(n)
            .zip(out.v.par_chunks_mut(n))
            .enumerate()
            .for_each_init(
                || (vec![0.0f64; n], vec![0.0f64; n]),
                |(bu, bv), (i, (fu, fv))| {
                    if i == nx - 1 {
                        fu.fill(0.0);
                        fv.fill(0.0);
                        return;
                    }
                    // Ix^T gathers of sxy (for Fu) and syy (for Fv).
                    bu.fill(0.0);
                    bv.fill(0.0);
                    for &(c, wt) in &ixt[i] {
                        let sxy = &exys[c * n..(c + 1) * n];
                        let syy = &eyy[c * n..(c + 1) * n];
                        for j in 0..n {
                            bu[j] += wt * sxy[j];
                            bv[j] += wt * syy[j];
                        }
                    }
                    fu.fill(0.0);
                    fv.fill(0.0);
                    for &(c, wt) in &dxt[i] {
                        let rxx = &txx[c * n..(c + 1) * n];
                        let rxy = &txy[c * n..(c + 1) * n];
                        for j in 0..n {
                            fu[j] += wt * rxx[j];
                            fv[j] += wt * rxy[j];
                        }
                    }
                    for j in 0..n {
                        let jm = if j == 0 { n - 1 } else { j - 1 };
                        let jm2 = if j < 2 { j + n - 2 } else { j - 2 };
                        let jp = if j + 1 == n { 0 } else { j + 1 };
                        let dytu = (bu[jp] - 27.0 * bu[j] + 27.0 * bu[jm] - bu[jm2]) * inv24h;
                        let dytv = (bv[jp] - 27.0 * bv[j] + 27.0 * bv[jm] - bv[jm2]) * inv24h;
                        fu[j] = -(fu[j] + dytu);
                        fv[j] = -(fv[j] + dytv);
                    }
                    if i == 0 {
                        if let Some(g) = g_row {
                            for j in 0..n {
                                fu[j] -= h * cp2 * g[j].0;
                                fv[j] -= h * mu * g[j].1;
                            }
                        }
                    }
                },
            );
    }

    /// Diagonal mass of every node in row i.
    pub fn mass(&self, i: usize) -> f64 {
        self.wnode[i] * self.h * self.h
    }
}
