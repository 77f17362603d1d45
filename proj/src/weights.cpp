#include "klab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "klab/bessel.hpp"
#include "klab/fft.hpp"
#include "klab/errors.hpp"
#include "klab/summation.hpp"

namespace klab {

namespace {
constexpr double kPi = std::numbers::pi;

// ---- unit mollifier --------------------------------------------------------

double psi0(double t) {
    double d = 1.0 - t * t;
    if (d <= 0.0) return 0.0;
    return std::exp(-1.0 / d);
}

// psi0^(j)(t) = N_j(t) / (1-t^2)^{2j} * psi0(t);
// N_{j+1} = N_j' D^2 + (4 j t D - 2 t) N_j, D = 1-t^2.
using Poly = std::vector<double>;  // coefficient of t^i at index i

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly poly_add(Poly a, const Poly& b) {
    if (b.size() > a.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

Poly poly_scale(Poly a, double c) {
    for (auto& x : a) x *= c;
    return a;
}

Poly poly_deriv(const Poly& a) {
    if (a.size() <= 1) return {0.0};
    Poly out(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * static_cast<double>(i);
    return out;
}

double poly_eval(const Poly& a, double t) {
    double r = 0.0;
    for (std::size_t i = a.size(); i-- > 0;) r = r * t + a[i];
    return r;
}

const std::vector<Poly>& psi_numerators() {
    static const std::vector<Poly> polys = [] {
        std::vector<Poly> n(kPsiMaxDeriv + 1);
        n[0] = {1.0};
        const Poly d = {1.0, 0.0, -1.0};        // 1 - t^2
        const Poly d2 = poly_mul(d, d);
        for (int j = 0; j < kPsiMaxDeriv; ++j) {
            Poly a = poly_mul(poly_deriv(n[j]), d2);
            Poly b = poly_mul(poly_scale(poly_mul(d, {0.0, 1.0}), 4.0 * j), n[j]);
            Poly c = poly_mul({0.0, -2.0}, n[j]);
            n[j + 1] = poly_add(poly_add(a, b), c);
        }
        return n;
    }();
    return polys;
}

struct PsiStatics {
    double mass;                       // int psi0
    std::vector<double> cdf;           // cumulative of normalized psi at panel edges
    int panels;
    std::vector<double> sup;           // sup |psi^(j)| (normalized)
    std::vector<double> l1;            // int |psi^(j)| (normalized)
};

double psi0_derivative_raw(int j, double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    if (j == 0) return psi0(t);
    double d = 1.0 - t * t;
    double e = std::exp(-1.0 / d);
    if (e == 0.0) return 0.0;
    double num = poly_eval(psi_numerators()[j], t);
    return num * e / std::pow(d, 2.0 * j);
}

const PsiStatics& psi_statics() {
    static const PsiStatics s = [] {
        PsiStatics st;
        st.panels = 1024;
        // mass by composite GL on [-1,1]
        st.mass = integrate_gl16([](double t) { return psi0(t); }, -1.0, 1.0, 512);
        st.cdf.resize(st.panels + 1);
        st.cdf[0] = 0.0;
        const double h = 2.0 / st.panels;
        for (int p = 0; p < st.panels; ++p) {
            double a = -1.0 + p * h, b = a + h;
            st.cdf[p + 1] =
                st.cdf[p] + integrate_gl16([](double t) { return psi0(t); }, a, b, 1);
        }
        for (auto& v : st.cdf) v /= st.mass;
        st.sup.resize(kPsiMaxDeriv + 1, 0.0);
        st.l1.resize(kPsiMaxDeriv + 1, 0.0);
        const int grid = 200001;
        for (int j = 0; j <= kPsiMaxDeriv; ++j) {
            double mx = 0.0;
            for (int i = 0; i < grid; ++i) {
                double t = -1.0 + 2.0 * i / (grid - 1);
                mx = std::max(mx, std::abs(psi0_derivative_raw(j, t)));
            }
            st.sup[j] = mx * 1.02 / st.mass;
            st.l1[j] = 1.05 *
                       integrate_gl16(
                           [j](double t) { return std::abs(psi0_derivative_raw(j, t)); },
                           -1.0, 1.0, 2048) /
                       st.mass;
        }
        return st;
    }();
    return s;
}
}  // namespace

double psi_value(double t) { return psi0(t) / psi_statics().mass; }

double psi_derivative(int j, double t) {
    if (j < 0 || j > kPsiMaxDeriv)
        throw std::invalid_argument("psi_derivative: order out of range");
    return psi0_derivative_raw(j, t) / psi_statics().mass;
}

double psi_cdf(double t) {
    const PsiStatics& s = psi_statics();
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double h = 2.0 / s.panels;
    int p = static_cast<int>((t + 1.0) / h);
    p = std::clamp(p, 0, s.panels - 1);
    double a = -1.0 + p * h;
    double partial =
        integrate_gl16([](double u) { return psi0(u); }, a, t, 1) / s.mass;
    return s.cdf[p] + partial;
}

double psi_deriv_sup(int j) { return psi_statics().sup.at(j); }
double psi_deriv_l1(int j) { return psi_statics().l1.at(j); }

namespace {
// hat psi on a step-1/256 grid out to s = 512, from one long FFT: embed psi in
// period P = 256; the sampled DFT equals the true transform up to aliasing of
// frequencies past M/(2P) = 512, far below double precision here.
struct PsiHatTable {
    static constexpr double kStep = 1.0 / 256.0;
    std::vector<double> values;

    PsiHatTable() {
        const std::size_t M = 1 << 18;
        const double P = 256.0;
        const double delta = P / static_cast<double>(M);  // 1/1024
        std::vector<cdouble> samples(M, cdouble(0, 0));
        for (std::size_t j = 0; j < M; ++j) {
            double u = static_cast<double>(j) * delta - P / 2.0;
            if (u > -1.0 && u < 1.0) samples[j] = psi_value(u);
        }
        fft_pow2(samples, -1);  // e^{-2 pi i jk / M}
        values.resize(M / 2);
        for (std::size_t k = 0; k < M / 2; ++k) {
            double sign = (k % 2 == 0) ? 1.0 : -1.0;  // shift by P/2
            values[k] = delta * sign * samples[k].real();
        }
    }
};

const PsiHatTable& psi_hat_table() {
    static const PsiHatTable t;
    return t;
}
}  // namespace

double psi_hat(double s) {
    s = std::abs(s);
    const PsiHatTable& t = psi_hat_table();
    const double pos = s / PsiHatTable::kStep;
    long i0 = std::lround(std::floor(pos)) - 3;
    if (i0 + 8 >= static_cast<long>(t.values.size()))
        throw ParameterOutOfRange("psi_hat: argument beyond table");
    i0 = std::clamp<long>(i0, 0, static_cast<long>(t.values.size()) - 8);
    double result = 0.0;
    for (int a = 0; a < 8; ++a) {
        double term = t.values[static_cast<std::size_t>(i0 + a)];
        for (int b = 0; b < 8; ++b) {
            if (a == b) continue;
            term *= (pos - static_cast<double>(i0 + b)) / static_cast<double>(a - b);
        }
        result += term;
    }
    return result;
}

// ---- SmoothWeight ----------------------------------------------------------

SmoothWeight::SmoothWeight(double Q, double lo, double hi, double margin)
    : Q_(Q), lo_(lo), hi_(hi), margin_(margin) {
    if (!(hi > lo) || !(margin > 0.0))
        throw DegenerateSupport("SmoothWeight: bad support/margin");
    if (hi - lo <= 2.0 * margin)
        throw DegenerateSupport("SmoothWeight: margin exceeds support");
}

double SmoothWeight::operator()(double x) const {
    if (x <= lo_ || x >= hi_) return 0.0;
    if (x >= lo_ + 2 * margin_ && x <= hi_ - 2 * margin_) return 1.0;
    double a = psi_cdf((x - (lo_ + margin_)) / margin_);
    double b = psi_cdf((x - (hi_ - margin_)) / margin_);
    return a - b;
}

double SmoothWeight::derivative(int j, double x) const {
    if (j == 0) return (*this)(x);
    if (j - 1 > kPsiMaxDeriv)
        throw std::invalid_argument("SmoothWeight::derivative: order out of range");
    if (x <= lo_ || x >= hi_) return 0.0;
    double a = psi_derivative(j - 1, (x - (lo_ + margin_)) / margin_);
    double b = psi_derivative(j - 1, (x - (hi_ - margin_)) / margin_);
    return (a - b) / std::pow(margin_, j);
}

double SmoothWeight::deriv_sup(int j) const {
    if (j == 0) return 1.0;
    double base = psi_deriv_sup(j - 1) / std::pow(margin_, j);
    bool overlap = (hi_ - lo_) < 4.0 * margin_;
    return overlap ? 2.0 * base : base;
}

double SmoothWeight::deriv_l1(int j) const {
    if (j == 0) return mass();  // W >= 0, so int |W| = int W exactly
    return 2.0 * psi_deriv_l1(j - 1) * std::pow(margin_, 1.0 - j);
}

cdouble SmoothWeight::fourier_direct(double t) const {
    QuadOptions opt;
    opt.tol = 1e-12;
    opt.init_panels = 1 + static_cast<int>(std::abs(t) * (hi_ - lo_));
    return integrate_complex(
        [this, t](double x) {
            double ang = -2.0 * kPi * t * x;
            return (*this)(x)*cdouble(std::cos(ang), std::sin(ang));
        },
        lo_, hi_, opt);
}

cdouble SmoothWeight::fourier(double t) const {
    // W = boxcar * mollifier, so hat W factors exactly
    if (std::abs(t) < 0.01) return fourier_direct(t);
    if (fourier_bound(t) < 1e-30) return {0.0, 0.0};
    const double lo2 = lo_ + margin_, hi2 = hi_ - margin_;
    const double a1 = -2.0 * kPi * t * lo2, a2 = -2.0 * kPi * t * hi2;
    cdouble diff = cdouble(std::cos(a1), std::sin(a1)) - cdouble(std::cos(a2), std::sin(a2));
    cdouble box = diff / cdouble(0.0, 2.0 * kPi * t);
    return box * psi_hat(margin_ * t);
}

double SmoothWeight::fourier_bound(double t) const {
    double best = mass();
    double at = std::abs(t);
    if (at == 0.0) return best;
    for (int j = 1; j <= kPsiMaxDeriv + 1; ++j) {
        double b = deriv_l1(j) / std::pow(2.0 * kPi * at, j);
        best = std::min(best, b);
    }
    return best;
}

SmoothWeight make_bump(double Q, double lo, double hi) {
    if (Q < 1.0) throw ParameterOutOfRange("make_bump: Q must be >= 1");
    if (lo <= 0.0) throw ParameterOutOfRange("make_bump: support must be positive");
    if (hi - lo <= 1.0 / Q)
        throw DegenerateSupport("make_bump: support shorter than 1/Q");
    return SmoothWeight(Q, lo, hi, 1.0 / (4.0 * Q));
}

SandwichPair sharp_cutoff_sandwich(double delta) {
    if (!(delta > 0.0) || !(delta < 0.5)) throw InvalidDelta(delta);
    SmoothWeight outer(1.0 / delta, 1.0 - delta, 1.5 + delta, delta / 2.0);
    SmoothWeight inner(1.0 / delta, 1.0, 1.5, delta / 2.0);
    return {outer, inner};
}

// ---- Bessel-kernel transform ----------------------------------------------

namespace {
int transform_sign(int k) {
    if (k < 4 || k % 2 != 0)
        throw ParameterOutOfRange("bessel transform: weight k must be even, >= 4");
    return (k % 4 == 0) ? 1 : -1;
}
}  // namespace

double bessel_transform(const SmoothWeight& w, int k, double y) {
    if (y < 0) throw ParameterOutOfRange("bessel_transform: y must be >= 0");
    const int sign = transform_sign(k);
    const int nu = k - 1;
    const double vlo = std::sqrt(w.support_lo()), vhi = std::sqrt(w.support_hi());
    const double s = std::sqrt(y);
    int init = 4 + static_cast<int>(4.0 * s * (vhi - vlo));
    if (init > 400000)
        throw OscillationBudgetExceeded("bessel_transform: y too large for quadrature");
    QuadOptions opt;
    opt.tol = 1e-11;
    opt.init_panels = init;
    double val = integrate(
        [&](double v) { return 2.0 * v * w(v * v) * bessel_j(nu, 4.0 * kPi * v * s); },
        vlo, vhi, opt);
    return 2.0 * kPi * sign * val;
}

// Laurent polynomials in v, for the integration-by-parts constants.
namespace {
using Laurent = std::map<int, double>;  // exponent -> coefficient

Laurent laurent_deriv(const Laurent& p) {
    Laurent out;
    for (auto [e, c] : p)
        if (e != 0) out[e - 1] += c * e;
    return out;
}

Laurent laurent_shift(const Laurent& p, int k, double scale) {
    Laurent out;
    for (auto [e, c] : p) out[e + k] += c * scale;
    return out;
}

void laurent_add(Laurent& a, const Laurent& b) {
    for (auto [e, c] : b) a[e] += c;
}

double laurent_eval(const Laurent& p, double v) {
    double r = 0.0;
    for (auto [e, c] : p) r += c * std::pow(v, e);
    return r;
}

// h as sum over r of p_r(v) * W^(r)(v^2)
using HTerms = std::vector<Laurent>;

HTerms h_step(const HTerms& h, double mu) {
    HTerms out(h.size() + 1);
    for (std::size_t r = 0; r < h.size(); ++r) {
        Laurent d = laurent_deriv(h[r]);
        laurent_add(d, laurent_shift(h[r], -1, mu - 1.0));
        laurent_add(out[r], d);
        laurent_add(out[r + 1], laurent_shift(h[r], 1, 2.0));
    }
    return out;
}

double h_eval(const HTerms& h, const SmoothWeight& w, double v) {
    double r = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        r += laurent_eval(h[i], v) * w.derivative(static_cast<int>(i), v * v);
    return r;
}
}  // namespace

BesselTransform::BesselTransform(const SmoothWeight& w, int k, double y_max)
    : w_(w), k_(k), sign_(transform_sign(k)), y_max_(y_max) {
    const int nu = k - 1;
    v_lo_ = std::sqrt(w.support_lo());
    v_hi_ = std::sqrt(w.support_hi());
    s_max_ = std::sqrt(y_max) + 1.0;

    // integration-by-parts constants ||h_j||_1, j = 0 .. min(12, cap)
    const int jmax = std::min(12, kPsiMaxDeriv + 1);
    HTerms h(1);
    h[0][1] = 2.0;  // g(v) = 2 v W(v^2)
    h_l1_.resize(jmax + 1);
    for (int j = 0; j <= jmax; ++j) {
        h_l1_[j] = 1.05 * integrate_gl16(
                              [&](double v) { return std::abs(h_eval(h, w_, v)); },
                              v_lo_, v_hi_, 512);
        if (j < jmax) h = h_step(h, static_cast<double>(nu - j));
    }

    // composite-GL v-grids: <= 8 radians of phase per panel at the tier cap
    for (double cap = s_max_;; cap *= 0.5) {
        Tier tier;
        tier.s_cap = cap;
        int panels = 1 + static_cast<int>((v_hi_ - v_lo_) * 4.0 * kPi * cap / 8.0);
        panels = std::max(panels, 64);
        const double hp = (v_hi_ - v_lo_) / panels;
        tier.v.reserve(16 * panels);
        tier.gw.reserve(16 * panels);
        for (int p = 0; p < panels; ++p) {
            double mid = v_lo_ + hp * (p + 0.5), half = 0.5 * hp;
            for (int i = 0; i < 8; ++i) {
                for (double sgn : {+1.0, -1.0}) {
                    double v = mid + sgn * half * gl16_nodes()[i];
                    tier.v.push_back(v);
                    tier.gw.push_back(gl16_weights()[i] * half * 2.0 * v * w_(v * v));
                }
            }
        }
        bool last = panels <= 64 || cap < 16.0;
        tiers_.push_back(std::move(tier));
        if (last) break;
    }

    // interpolation table in s, verified against adaptive quadrature
    step_ = 1.0 / 128.0;
    for (int attempt = 0;; ++attempt) {
        std::size_t n = static_cast<std::size_t>(s_max_ / step_) + 10;
        table_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) table_[i] = direct(i * step_);
        // probe midpoints against one-off quadrature
        double worst = 0.0;
        for (int p = 1; p <= 64; ++p) {
            double s = (p - 0.415) * s_max_ / 64.0;
            double ref = bessel_transform(w_, k_, s * s);
            double got = (*this)(s * s);
            worst = std::max(worst, std::abs(ref - got));
        }
        if (worst < 5e-9) break;
        if (attempt >= 2)
            throw ConvergenceFailure("BesselTransform: table refinement failed");
        step_ *= 0.5;
    }

    // monotone empirical envelope (suffix max with safety factor)
    emp_env_.assign(table_.size(), 0.0);
    double running = 0.0;
    for (std::size_t i = table_.size(); i-- > 0;) {
        running = std::max(running, std::abs(table_[i]));
        emp_env_[i] = 1.3 * running + 1e-12;
    }
}

double BesselTransform::direct(double s) const {
    // coarsest tier still resolving this s
    const Tier* tier = &tiers_.front();
    for (const Tier& t : tiers_)
        if (t.s_cap >= s && t.v.size() < tier->v.size()) tier = &t;
    KahanSum acc;
    const int nu = k_ - 1;
    for (std::size_t i = 0; i < tier->v.size(); ++i)
        acc.add(tier->gw[i] * bessel_j(nu, 4.0 * kPi * tier->v[i] * s));
    return 2.0 * kPi * sign_ * acc.value();
}

double BesselTransform::operator()(double y) const {
    if (y < 0) throw ParameterOutOfRange("BesselTransform: negative argument");
    double s = std::sqrt(y);
    if (s > s_max_)
        throw TailNotCertified("BesselTransform: argument beyond table range");
    long i0 = std::lround(std::floor(s / step_)) - 3;
    i0 = std::clamp<long>(i0, 0, static_cast<long>(table_.size()) - 8);
    // 8-point Lagrange on the uniform grid
    double result = 0.0;
    for (int a = 0; a < 8; ++a) {
        double term = table_[i0 + a];
        for (int b = 0; b < 8; ++b) {
            if (a == b) continue;
            term *= (s - (i0 + b) * step_) / ((a - b) * step_);
        }
        result += term;
    }
    return result;
}

double BesselTransform::bound(double y) const {
    double s = std::sqrt(std::max(y, 0.0));
    double analytic = 2.0 * kPi * h_l1_[0];
    if (s > 0) {
        double z = 4.0 * kPi * s;
        // Landau's |J_n(x)| <= 0.78575 x^{-1/3} sharpens every branch
        double jcap = std::min(1.0, 0.78575 / std::cbrt(z * v_lo_));
        double zinv = 1.0 / z, p = 1.0;
        for (std::size_t j = 0; j < h_l1_.size(); ++j) {
            analytic = std::min(analytic, 2.0 * kPi * h_l1_[j] * p * jcap);
            p *= zinv;
        }
    }
    double best = analytic;
    if (s <= s_max_ - 8 * step_) {
        std::size_t i = static_cast<std::size_t>(s / step_);
        if (i < emp_env_.size()) best = std::min(best, emp_env_[i]);
    }
    return best;
}

double BesselTransform::tail_exponent(double y, double& constant) const {
    // best j at y, as a closed-form power bound C * y^{-A} valid for all
    // larger y (A = j/2 + 1/6 from the Landau factor)
    double s = std::sqrt(y);
    double z = 4.0 * kPi * s;
    double best = 2.0 * kPi * h_l1_[0];
    double best_A = 1.0 / 6.0;
    double best_C = 2.0 * kPi * h_l1_[0] * 0.78575 * std::pow(4.0 * kPi * v_lo_, -1.0 / 3.0);
    for (std::size_t j = 0; j < h_l1_.size(); ++j) {
        double jcap = 0.78575 * std::pow(z * v_lo_, -1.0 / 3.0);
        double val = 2.0 * kPi * h_l1_[j] * std::pow(z, -static_cast<double>(j)) * jcap;
        if (val < best) {
            best = val;
            best_A = static_cast<double>(j) / 2.0 + 1.0 / 6.0;
            best_C = 2.0 * kPi * h_l1_[j] * std::pow(4.0 * kPi, -static_cast<double>(j)) *
                     0.78575 * std::pow(4.0 * kPi * v_lo_, -1.0 / 3.0);
        }
    }
    constant = best_C;
    return best_A;
}

}  // namespace klab
