#include "survey/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace survey {

namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

struct System {
    int w = 0, h = 0;                 // patch extent
    std::vector<int> index;           // patch pixel -> unknown index, -1 outside mask
    std::vector<std::pair<int, int>> coords;  // unknown index -> (x, y) in patch frame
};

// CG on A f = b where A is the 5-point Laplacian restricted to mask pixels.
// A is symmetric positive definite on the masked domain with Dirichlet data
// folded into b.
int conjugate_gradient(const System& sys, const std::vector<double>& b, std::vector<double>& f,
                       double tol, int max_iters, double& rel_residual) {
    const std::size_t n = b.size();
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto [px, py] = sys.coords[k];
            double v = 4.0 * x[k];
            for (int d = 0; d < 4; ++d) {
                const int qx = px + kDx[d], qy = py + kDy[d];
                if (qx < 0 || qx >= sys.w || qy < 0 || qy >= sys.h) continue;
                const int qi = sys.index[static_cast<std::size_t>(qy) * sys.w + qx];
                if (qi >= 0) v -= x[qi];
            }
            out[k] = v;
        }
    };

    std::vector<double> r(n), p(n), ap(n);
    apply(f, ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
    p = r;

    double rr = 0.0;
    for (double v : r) rr += v * v;
    const double rr0 = std::max(rr, 1e-300);
    int it = 0;
    for (; it < max_iters; ++it) {
        if (std::sqrt(rr / rr0) <= tol) break;
        apply(p, ap);
        double pap = 0.0;
        for (std::size_t k = 0; k < n; ++k) pap += p[k] * ap[k];
        if (pap <= 0.0) break;
        const double alpha = rr / pap;
        double rr_next = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            f[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
            rr_next += r[k] * r[k];
        }
        const double beta = rr_next / rr;
        for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
        rr = rr_next;
    }
    rel_residual = std::sqrt(rr / rr0);
    return it;
}

}  // namespace

RgbImage poisson_blend(const RgbImage& background, const Patch& patch, int x0, int y0,
                       PoissonStats* stats, double tol, int max_iters) {
    const int pw = patch.image.width, ph = patch.image.height;
    if (x0 < 0 || y0 < 0 || x0 + pw > background.width || y0 + ph > background.height)
        throw std::invalid_argument("poisson_blend: patch region outside background");
    if (patch.mask.count() == 0) throw std::invalid_argument("poisson_blend: empty mask");

    // The boundary ring of the system must be background, so the mask may not
    // touch the background image border.
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x)
            if (patch.mask.at(x, y)) {
                const int gx = x0 + x, gy = y0 + y;
                if (gx == 0 || gy == 0 || gx == background.width - 1 ||
                    gy == background.height - 1)
                    throw std::invalid_argument("poisson_blend: mask touches image border");
            }

    System sys;
    sys.w = pw;
    sys.h = ph;
    sys.index.assign(static_cast<std::size_t>(pw) * ph, -1);
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x)
            if (patch.mask.at(x, y)) {
                sys.index[static_cast<std::size_t>(y) * pw + x] =
                    static_cast<int>(sys.coords.size());
                sys.coords.emplace_back(x, y);
            }
    const std::size_t n = sys.coords.size();

    // Source value with the patch extent clamped: gradients across the patch
    // edge are treated as zero.
    auto src = [&](int x, int y, int ch) {
        return patch.image.at(std::clamp(x, 0, pw - 1), std::clamp(y, 0, ph - 1), ch);
    };

    RgbImage out = background;
    PoissonStats agg;
    for (int ch = 0; ch < 3; ++ch) {
        std::vector<double> b(n, 0.0), f(n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto [px, py] = sys.coords[k];
            double rhs = 0.0;
            for (int d = 0; d < 4; ++d) {
                const int qx = px + kDx[d], qy = py + kDy[d];
                rhs += src(px, py, ch) - src(qx, qy, ch);  // guidance divergence
                const bool q_in_mask = qx >= 0 && qx < pw && qy >= 0 && qy < ph &&
                                       patch.mask.at(qx, qy);
                if (!q_in_mask) rhs += background.at(x0 + px + kDx[d], y0 + py + kDy[d], ch);
            }
            b[k] = rhs;
            f[k] = background.at(x0 + px, y0 + py, ch);  // warm start from the boundary data
        }

        double rel = 0.0;
        const int iters = conjugate_gradient(sys, b, f, tol, max_iters, rel);
        agg.iterations = std::max(agg.iterations, iters);
        agg.cg_rel_residual = std::max(agg.cg_rel_residual, rel);
        if (rel > tol) agg.converged = false;

        // PDE residual before clamping, with Dirichlet values from the background.
        for (std::size_t k = 0; k < n; ++k) {
            const auto [px, py] = sys.coords[k];
            double lhs = 4.0 * f[k];
            double rhs = 0.0;
            for (int d = 0; d < 4; ++d) {
                const int qx = px + kDx[d], qy = py + kDy[d];
                rhs += src(px, py, ch) - src(qx, qy, ch);
                const int qi = (qx >= 0 && qx < pw && qy >= 0 && qy < ph)
                                   ? sys.index[static_cast<std::size_t>(qy) * pw + qx]
                                   : -1;
                if (qi >= 0)
                    lhs -= f[qi];
                else
                    lhs -= background.at(x0 + px + kDx[d], y0 + py + kDy[d], ch);
            }
            agg.max_pde_residual = std::max(agg.max_pde_residual, std::fabs(lhs - rhs));
        }

        for (std::size_t k = 0; k < n; ++k) {
            const auto [px, py] = sys.coords[k];
            out.at(x0 + px, y0 + py, ch) = std::clamp(f[k], 0.0, 1.0);
        }
    }
    if (stats) *stats = agg;
    return out;
}

}  // namespace survey
