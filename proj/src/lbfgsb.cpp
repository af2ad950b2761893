#include "weldcrack/lbfgsb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "weldcrack/types.hpp"

namespace weldcrack {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double inf_norm(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

Vec project(Vec x, const Vec& lo, const Vec& hi) {
    for (size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
}

struct Pair {
    Vec s, y;
    double rho;
};

/// Two-loop recursion; returns an approximation of H * q.
Vec two_loop(const std::deque<Pair>& mem, Vec q) {
    std::vector<double> alpha(mem.size());
    for (size_t i = mem.size(); i-- > 0;) {
        alpha[i] = mem[i].rho * dot(mem[i].s, q);
        for (size_t j = 0; j < q.size(); ++j) q[j] -= alpha[i] * mem[i].y[j];
    }
    if (!mem.empty()) {
        const auto& last = mem.back();
        const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
        for (double& v : q) v *= gamma;
    }
    for (size_t i = 0; i < mem.size(); ++i) {
        const double beta = mem[i].rho * dot(mem[i].y, q);
        for (size_t j = 0; j < q.size(); ++j) q[j] += (alpha[i] - beta) * mem[i].s[j];
    }
    return q;
}

}  // namespace

Vec fd_gradient(const ScalarObjective& f, const Vec& x, const Vec& lo, const Vec& hi, double step) {
    Vec g(x.size(), 0.0);
    Vec probe = x;
    for (size_t i = 0; i < x.size(); ++i) {
        const double xp = std::min(x[i] + step, hi[i]);
        const double xm = std::max(x[i] - step, lo[i]);
        if (xp == xm) continue;
        probe[i] = xp;
        const double fp = f(probe);
        probe[i] = xm;
        const double fm = f(probe);
        probe[i] = x[i];
        g[i] = (fp - fm) / (xp - xm);
    }
    return g;
}

LbfgsbResult lbfgsb_minimize(const ScalarObjective& f, const Vec& x0, const Vec& lo, const Vec& hi,
                             const LbfgsbConfig& cfg) {
    const size_t dim = x0.size();
    if (dim == 0 || lo.size() != dim || hi.size() != dim)
        throw UsageError("lbfgsb_minimize: dimension mismatch");
    for (size_t i = 0; i < dim; ++i)
        if (!(lo[i] <= hi[i])) throw UsageError("lbfgsb_minimize: invalid bounds");

    LbfgsbResult res;
    res.x = project(x0, lo, hi);
    res.value = f(res.x);
    if (!std::isfinite(res.value))
        throw UsageError("lbfgsb_minimize: objective not finite at the starting point");

    Vec g = fd_gradient(f, res.x, lo, hi, cfg.fd_step);
    std::deque<Pair> mem;
    constexpr double kArmijo = 1e-4;

    auto projected_grad = [&](const Vec& x, const Vec& grad) {
        Vec pg = grad;
        for (size_t i = 0; i < dim; ++i) {
            if (x[i] <= lo[i] && grad[i] > 0.0) pg[i] = 0.0;
            if (x[i] >= hi[i] && grad[i] < 0.0) pg[i] = 0.0;
        }
        return pg;
    };

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        res.iterations = iter;
        Vec pg = projected_grad(res.x, g);
        if (inf_norm(pg) < cfg.grad_tol) {
            res.converged = true;
            return res;
        }

        // free-subspace quasi-Newton direction, steepest descent fallback
        Vec d = two_loop(mem, pg);
        for (double& v : d) v = -v;
        bool accepted = false;
        Vec xn, gn;
        double fn = 0.0;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            if (attempt == 1) {
                mem.clear();
                d = pg;
                for (double& v : d) v = -v;
            }
            if (dot(d, pg) >= 0.0) continue;  // not a descent direction
            double alpha = 1.0;
            for (int ls = 0; ls < 60; ++ls) {
                Vec cand(dim);
                for (size_t i = 0; i < dim; ++i) cand[i] = res.x[i] + alpha * d[i];
                cand = project(std::move(cand), lo, hi);
                bool moved = false;
                for (size_t i = 0; i < dim; ++i)
                    if (cand[i] != res.x[i]) { moved = true; break; }
                if (!moved) break;
                const double fc = f(cand);
                Vec step(dim);
                for (size_t i = 0; i < dim; ++i) step[i] = cand[i] - res.x[i];
                const double slope = dot(g, step);
                if (std::isfinite(fc) &&
                    ((slope < 0.0 && fc <= res.value + kArmijo * slope) ||
                     (slope >= 0.0 && fc < res.value))) {
                    xn = std::move(cand);
                    fn = fc;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if (!accepted) return res;  // no acceptable step; stationary enough

        gn = fd_gradient(f, xn, lo, hi, cfg.fd_step);
        Vec s(dim), y(dim);
        for (size_t i = 0; i < dim; ++i) {
            s[i] = xn[i] - res.x[i];
            y[i] = gn[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
            mem.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(mem.size()) > cfg.memory) mem.pop_front();
        }
        res.x = std::move(xn);
        res.value = fn;
        g = std::move(gn);
    }
    return res;
}

}  // namespace weldcrack
