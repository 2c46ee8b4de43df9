#include "piezocell/geometry.hpp"

#include <cmath>
#include <cstdlib>

namespace piezocell {

HolePrimitive HolePrimitive::sphere(std::array<double, 3> c, double r) {
    HolePrimitive p;
    p.kind = Kind::Sphere;
    p.center = c;
    p.radius = r;
    return p;
}

HolePrimitive HolePrimitive::cylinder(int axis, std::array<double, 2> c,
                                      double r) {
    HolePrimitive p;
    p.kind = Kind::Cylinder;
    p.axis = axis;
    p.center = {c[0], c[1], 0.0};
    p.radius = r;
    return p;
}

HolePrimitive HolePrimitive::box(std::array<double, 3> lo,
                                 std::array<double, 3> hi) {
    HolePrimitive p;
    p.kind = Kind::Box;
    p.lo = lo;
    p.hi = hi;
    return p;
}

namespace {

// Signed distance between two cell coordinates along one axis, shortest
// periodic image: result in [- .5, .5].
double wrap_delta(double a, double b) {
    double d = a - b;
    d -= std::floor(d + 0.5);
    return d;
}

// Is t inside the periodic interval [lo, hi] (mod 1)?
bool in_wrapped_interval(double t, double lo, double hi) {
    double span = hi - lo;
    if (span >= 1.0) return true;
    double u = t - lo;
    u -= std::floor(u);
    return u <= span;
}

} // namespace

bool HolePrimitive::contains(const std::array<double, 3>& y) const {
    switch (kind) {
        case Kind::Sphere: {
            double dx = wrap_delta(y[0], center[0]);
            double dy = wrap_delta(y[1], center[1]);
            double dz = wrap_delta(y[2], center[2]);
            return dx * dx + dy * dy + dz * dz <= radius * radius;
        }
        case Kind::Cylinder: {
            int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
            double d1 = wrap_delta(y[a1], center[0]);
            double d2 = wrap_delta(y[a2], center[1]);
            return d1 * d1 + d2 * d2 <= radius * radius;
        }
        case Kind::Box: {
            for (int a = 0; a < 3; ++a)
                if (!in_wrapped_interval(y[a], lo[a], hi[a])) return false;
            return true;
        }
    }
    return false;
}

CellGeometry build_cell(int n, const std::vector<HolePrimitive>& holes) {
    if (n < 2) throw ConfigError("build_cell: resolution must be >= 2");
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n * n, 1);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                std::array<double, 3> c = {(i + 0.5) / n, (j + 0.5) / n,
                                           (k + 0.5) / n};
                for (const auto& h : holes)
                    if (h.contains(c)) {
                        mask[(static_cast<std::size_t>(k) * n + j) * n + i] = 0;
                        break;
                    }
            }
    return build_cell_from_mask(n, std::move(mask));
}

CellGeometry build_cell_from_mask(int n, std::vector<std::uint8_t> mask) {
    if (n < 2) throw ConfigError("build_cell_from_mask: resolution must be >= 2");
    if (mask.size() != static_cast<std::size_t>(n) * n * n)
        throw ShapeMismatch("build_cell_from_mask: mask size does not match n^3");
    CellGeometry g;
    g.n = n;
    g.mask = std::move(mask);
    std::size_t count = 0;
    for (auto& v : g.mask) {
        v = v ? 1 : 0;
        count += v;
    }
    if (count == 0) throw AllVoid("build_cell: geometry has no material voxels");
    g.theta = static_cast<double>(count) / static_cast<double>(g.mask.size());
    g.connected = connectivity_check(g);
    return g;
}

bool connectivity_check(const CellGeometry& g) {
    const int n = g.n;
    std::size_t total = 0;
    int seed = -1;
    for (std::size_t v = 0; v < g.mask.size(); ++v)
        if (g.mask[v]) {
            ++total;
            if (seed < 0) seed = static_cast<int>(v);
        }
    if (total == 0) return false;

    std::vector<std::uint8_t> seen(g.mask.size(), 0);
    std::vector<int> stack;
    stack.push_back(seed);
    seen[seed] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++reached;
        int i = v % n, j = (v / n) % n, k = v / (n * n);
        const int di[6] = {1, -1, 0, 0, 0, 0};
        const int dj[6] = {0, 0, 1, -1, 0, 0};
        const int dk[6] = {0, 0, 0, 0, 1, -1};
        for (int t = 0; t < 6; ++t) {
            int ii = (i + di[t] + n) % n;
            int jj = (j + dj[t] + n) % n;
            int kk = (k + dk[t] + n) % n;
            int w = (kk * n + jj) * n + ii;
            if (g.mask[w] && !seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return reached == total;
}

bool chi_at(const CellGeometry& g, const std::array<double, 3>& y) {
    int idx[3];
    for (int a = 0; a < 3; ++a) {
        double t = y[a] - std::floor(y[a]);
        int i = static_cast<int>(t * g.n);
        if (i >= g.n) i = g.n - 1; // guard against t*n rounding to n
        idx[a] = i;
    }
    return g.material(idx[0], idx[1], idx[2]);
}

bool hole_touches_cell_boundary(const CellGeometry& g) {
    const int n = g.n;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                bool boundary = i == 0 || j == 0 || k == 0 || i == n - 1 ||
                                j == n - 1 || k == n - 1;
                if (boundary && !g.material(i, j, k)) return true;
            }
    return false;
}

} // namespace piezocell
