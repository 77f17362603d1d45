#include "klab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "klab/errors.hpp"
#include "klab/summation.hpp"

namespace klab {

namespace {
constexpr double kPi = std::numbers::pi;

struct CCRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

CCRule build_cc(int n) {
    CCRule r;
    r.nodes.resize(n + 1);
    r.weights.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        double theta = kPi * j / n;
        r.nodes[j] = std::cos(theta);
        double cj = (j == 0 || j == n) ? 1.0 : 2.0;
        KahanSum s;
        for (int m = 1; m <= n / 2; ++m) {
            double bm = (m == n / 2) ? 1.0 : 2.0;
            s.add(bm * std::cos(2.0 * m * theta) / (4.0 * m * m - 1.0));
        }
        r.weights[j] = (cj / n) * (1.0 - s.value());
    }
    return r;
}

const CCRule& cc_rule(int n) {
    // fixed orders only, so lookups stay lock-free and thread-safe
    static const CCRule r8 = build_cc(8);
    static const CCRule r16 = build_cc(16);
    static const CCRule r32 = build_cc(32);
    switch (n) {
        case 8: return r8;
        case 16: return r16;
        case 32: return r32;
        default: throw std::invalid_argument("cc_rule: unsupported order");
    }
}

template <typename T>
T cc_panel(const std::function<T(double)>& f, double a, double b, int n) {
    const CCRule& r = cc_rule(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    T acc{};
    for (int j = 0; j <= n; ++j) acc += f(mid + half * r.nodes[j]) * r.weights[j];
    return acc * half;
}

template <typename T>
T integrate_impl(const std::function<T(double)>& f, double a, double b,
                 const QuadOptions& opt) {
    struct Panel {
        double a, b;
        int depth;
    };
    std::vector<Panel> stack;
    int init = std::max(1, opt.init_panels);
    for (int i = 0; i < init; ++i) {
        double pa = a + (b - a) * i / init;
        double pb = a + (b - a) * (i + 1) / init;
        stack.push_back({pa, pb, 0});
    }
    T total{};
    long used = 0;
    const double width = std::abs(b - a);
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        if (++used > opt.max_panels)
            throw ConvergenceFailure("integrate: panel budget exhausted");
        T coarse = cc_panel(f, p.a, p.b, 8);
        T fine = cc_panel(f, p.a, p.b, 16);
        double err = std::abs(fine - coarse);
        double share = opt.tol * (std::abs(p.b - p.a) / width);
        if (err <= std::max(share, 1e-300) || p.depth >= opt.max_depth) {
            total += fine;
        } else {
            double m = 0.5 * (p.a + p.b);
            stack.push_back({p.a, m, p.depth + 1});
            stack.push_back({m, p.b, p.depth + 1});
        }
    }
    return total;
}

}  // namespace

const std::vector<double>& cc_nodes(int n) { return cc_rule(n).nodes; }
const std::vector<double>& cc_weights(int n) { return cc_rule(n).weights; }

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt) {
    return integrate_impl<double>(f, a, b, opt);
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, const QuadOptions& opt) {
    return integrate_impl<std::complex<double>>(f, a, b, opt);
}

namespace {
// Gauss-Legendre 16: nodes (positive half) and weights.
const double kGL16X[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542,
};
const double kGL16W[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806,
};
}  // namespace

const double* gl16_nodes() { return kGL16X; }
const double* gl16_weights() { return kGL16W; }

double integrate_gl16(const std::function<double(double)>& f, double a, double b,
                      int panels) {
    KahanSum total;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double mid = a + h * (p + 0.5), half = 0.5 * h;
        for (int i = 0; i < 8; ++i) {
            total.add(kGL16W[i] * half * f(mid + half * kGL16X[i]));
            total.add(kGL16W[i] * half * f(mid - half * kGL16X[i]));
        }
    }
    return total.value();
}

}  // namespace klab
