//! Structured hexahedral grid bookkeeping: node/element numbering,
//! boundary classification, and boundary-face enumeration.
//!
//! Elements coincide with voxels and share their x-fastest ordering, so
//! element index == voxel index. Nodes use the same ordering on the
//! (nx+1)(ny+1)(nz+1) lattice.

/// One quadrilateral boundary face with its outward normal.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryFace {
    /// The four corner node indices (order is not significant for the
    /// integrals computed on faces).
    pub nodes: [usize; 4],
    /// Outward unit normal (one of the six axis directions).
    pub normal: [f64; 3],
    pub area: f64,
}

#[derive(Debug, Clone)]
pub struct Grid3 {
    /// Elements per axis.
    pub dims: [usize; 3],
    /// Element edge lengths (m).
    pub spacing: [f64; 3],
}

impl Grid3 {
    pub fn new(dims: [usize; 3], spacing: [f64; 3]) -> Self {
        assert!(dims.iter().all(|&d| d > 0));
        assert!(spacing.iter().all(|&h| h > 0.0));
        Grid3 { dims, spacing }
    }

    pub fn nodes_per_axis(&self) -> [usize; 3] {
        [self.dims[0] + 1, self.dims[1] + 1, self.dims[2] + 1]
    }

    pub fn node_count(&self) -> usize {
        let n = self.nodes_per_axis();
        n[0] * n[1] * n[2]
    }

    pub fn element_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn volume(&self) -> f64 {
        self.element_count() as f64 * self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.nodes_per_axis();
        i + n[0] * (j + n[1] * k)
    }

    /// Inverse of [`Grid3::node_index`].
    #[inline]
    pub fn node_coords(&self, index: usize) -> [usize; 3] {
        let n = self.nodes_per_axis();
        [index % n[0], (index / n[0]) % n[1], index / (n[0] * n[1])]
    }

    #[inline]
    pub fn node_position(&self, coords: [usize; 3]) -> [f64; 3] {
        [
            coords[0] as f64 * self.spacing[0],
            coords[1] as f64 * self.spacing[1],
            coords[2] as f64 * self.spacing[2],
        ]
    }

    #[inline]
    pub fn is_boundary_node(&self, coords: [usize; 3]) -> bool {
        coords[0] == 0
            || coords[1] == 0
            || coords[2] == 0
            || coords[0] == self.dims[0]
            || coords[1] == self.dims[1]
            || coords[2] == self.dims[2]
    }

    /// The eight corner nodes of element (ex, ey, ez), ordered to match
    /// the reference-corner sign convention of the hex8 shape functions:
    /// (0,0,0), (1,0,0), (1,1,0), (0,1,0), then the same square at z+1.
    pub fn element_nodes(&self, ex: usize, ey: usize, ez: usize) -> [usize; 8] {
        [
            self.node_index(ex, ey, ez),
            self.node_index(ex + 1, ey, ez),
            self.node_index(ex + 1, ey + 1, ez),
            self.node_index(ex, ey + 1, ez),
            self.node_index(ex, ey, ez + 1),
            self.node_index(ex + 1, ey, ez + 1),
            self.node_index(ex + 1, ey + 1, ez + 1),
            self.node_index(ex, ey + 1, ez + 1),
        ]
    }

    /// Corner-node table for every element, in element (== voxel) order.
    pub fn all_element_nodes(&self) -> Vec<[usize; 8]> {
        let mut out = Vec::with_capacity(self.element_count());
        for ez in 0..self.dims[2] {
            for ey in 0..self.dims[1] {
                for ex in 0..self.dims[0] {
                    out.push(self.element_nodes(ex, ey, ez));
                }
            }
        }
        out
    }

    /// All boundary faces of the box, with outward normals. The six sides
    /// are emitted in the fixed order -x, +x, -y, +y, -z, +z.
    pub fn boundary_faces(&self) -> Vec<BoundaryFace> {
        let [nx, ny, nz] = self.dims;
        let [hx, hy, hz] = self.spacing;
        let mut faces =
            Vec::with_capacity(2 * (ny * nz + nx * nz + nx * ny));

        // x = const sides.
        for (i, sign) in [(0usize, -1.0f64), (nx, 1.0)] {
            for k in 0..nz {
                for j in 0..ny {
                    faces.push(BoundaryFace {
                        nodes: [
                            self.node_index(i, j, k),
                            self.node_index(i, j + 1, k),
                            self.node_index(i, j, k + 1),
                            self.node_index(i, j + 1, k + 1),
                        ],
                        normal: [sign, 0.0, 0.0],
                        area: hy * hz,
                    });
                }
            }
        }
        // y = const sides.
        for (j, sign) in [(0usize, -1.0f64), (ny, 1.0)] {
            for k in 0..nz {
                for i in 0..nx {
                    faces.push(BoundaryFace {
                        nodes: [
                            self.node_index(i, j, k),
                            self.node_index(i + 1, j, k),
                            self.node_index(i, j, k + 1),
                            self.node_index(i + 1, j, k + 1),
                        ],
                        normal: [0.0, sign, 0.0],
                        area: hx * hz,
                    });
                }
            }
        }
        // z = const sides.
        for (k, sign) in [(0usize, -1.0f64), (nz, 1.0)] {
            for j in 0..ny {
                for i in 0..nx {
                    faces.push(BoundaryFace {
                        nodes: [
                            self.node_index(i, j, k),
                            self.node_index(i + 1, j, k),
                            self.node_index(i, j + 1, k),
                            self.node_index(i + 1, j + 1, k),
                        ],
                        normal: [0.0, 0.0, sign],
                        area: hx * hy,
                    });
                }
            }
        }
        faces
    }
}
