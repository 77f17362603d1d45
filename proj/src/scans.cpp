#include "klab/scans.hpp"

#include <cmath>
#include <map>
#include <random>

#include "klab/bilinear.hpp"
#include "klab/moments.hpp"
#include "klab/primes.hpp"

namespace klab {

namespace {
double fit_slope(const std::vector<double>& qs, const std::vector<double>& rs) {
    if (qs.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
        double x = std::log(qs[i]);
        double y = std::log(std::max(rs[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    if (denom < 1e-12) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

// per-q max across all series of a family
RatioSeries family_trend(const std::vector<RatioSeries>& series) {
    std::map<double, double> mx;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.q.size(); ++i) {
            auto [it, fresh] = mx.try_emplace(s.q[i], s.ratio[i]);
            if (!fresh) it->second = std::max(it->second, s.ratio[i]);
        }
    RatioSeries t;
    t.name = "trend";
    for (auto& [q, r] : mx) {
        t.q.push_back(q);
        t.ratio.push_back(r);
    }
    return t;
}
}  // namespace

double RatioSeries::max_ratio() const {
    double m = 0.0;
    for (double r : ratio) m = std::max(m, r);
    return m;
}

double RatioSeries::slope() const { return fit_slope(q, ratio); }

double RatioSeries::slope_top_half() const {
    std::size_t n = q.size();
    if (n < 2) return 0.0;
    std::size_t take = std::max<std::size_t>(2, (n + 1) / 2);
    std::vector<double> qs(q.end() - take, q.end());
    std::vector<double> rs(ratio.end() - take, ratio.end());
    return fit_slope(qs, rs);
}

bool ScanOutcome::pass(double ceiling, double slope_cap) const {
    for (const auto& s : series)
        if (s.max_ratio() >= ceiling) return false;
    return trend.slope_top_half() <= slope_cap;
}

ScanOutcome bilinear_sharp_scan() {
    ScanOutcome out;
    const std::vector<int64_t> qs = {211, 1009, 10007, 100003, 316531};
    for (double delta : {0.05, 0.15}) {
        RatioSeries ser;
        ser.name = "sharp_delta_" + std::to_string(delta);
        for (int64_t q : qs) {
            PrimeContext ctx(q);
            std::vector<double> kl = kloosterman_all(ctx);
            int64_t side = static_cast<int64_t>(
                std::ceil(std::pow(static_cast<double>(q), 0.5 + delta)));
            side = std::min(side, q - 1);
            BoundReport rep = bilinear_sharp(ctx, kl, 1, side, 1, side);
            rep.param("delta", delta);
            ser.q.push_back(static_cast<double>(q));
            ser.ratio.push_back(rep.ratio("predicted"));
            out.rows.push_back(std::move(rep));
        }
        out.series.push_back(std::move(ser));
    }
    out.trend = family_trend(out.series);
    out.trend.name = "sharp_trend";
    return out;
}

ScanOutcome bilinear_smooth_scan() {
    ScanOutcome out;
    const std::vector<int64_t> qs = {211, 1009, 10007, 100003, 316531};
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    for (double expo : {0.05, 0.15, 0.3}) {
        for (int which_a = 0; which_a < 2; ++which_a) {
            RatioSeries ser;
            ser.name = "smooth_e" + std::to_string(expo) + (which_a ? "_a_g" : "_a_1");
            for (int64_t q : qs) {
                PrimeContext ctx(q);
                std::vector<double> kl = kloosterman_all(ctx);
                double mn = std::pow(static_cast<double>(q), 0.5 + expo);
                double side = std::sqrt(mn);
                int64_t a = which_a ? ctx.primitive_root() : 1;
                BoundReport rep = bilinear_smooth(ctx, kl, a, w, w, side, side);
                rep.param("expo", expo);
                ser.q.push_back(static_cast<double>(q));
                ser.ratio.push_back(rep.ratio("predicted"));
                out.rows.push_back(std::move(rep));
            }
            out.series.push_back(std::move(ser));
        }
    }
    out.trend = family_trend(out.series);
    out.trend.name = "smooth_trend";
    return out;
}

ScanOutcome typeii_scan(uint64_t seed) {
    ScanOutcome out;
    const int kDraws = 6;  // per-q max over draws tames single-draw dips
    for (int draw = 0; draw < kDraws; ++draw)
        out.series.push_back({"typeii_pm1_s" + std::to_string(draw), {}, {}});
    for (int64_t q : {211, 1009, 10007, 100003}) {
        PrimeContext ctx(q);
        std::vector<double> kl = kloosterman_all(ctx);
        for (int draw = 0; draw < kDraws; ++draw) {
            std::mt19937_64 rng(seed + static_cast<uint64_t>(q) * 131 +
                                static_cast<uint64_t>(draw));
            CoefficientSeq alpha, beta;
            alpha.scale = beta.scale = 32;
            alpha.lo = beta.lo = 32;
            alpha.hi = beta.hi = 64;
            auto fill = [&](CoefficientSeq& c) {
                c.values.resize(static_cast<std::size_t>(c.hi - c.lo + 1));
                for (auto& v : c.values) v = (rng() & 1) ? 1.0 : -1.0;
            };
            fill(alpha);
            fill(beta);
            BoundReport rep = type_ii_sum(ctx, kl, alpha, beta, nullptr, 0.0);
            rep.param("seed", static_cast<double>(seed));
            rep.param("draw", static_cast<double>(draw));
            auto& ser = out.series[static_cast<std::size_t>(draw)];
            ser.q.push_back(static_cast<double>(q));
            ser.ratio.push_back(rep.ratio("type_ii"));
            out.rows.push_back(std::move(rep));
        }
    }
    out.trend = family_trend(out.series);
    out.trend.name = "typeii_trend";
    return out;
}

ScanOutcome cuspidal_scan(const HeckeData& hd) {
    ScanOutcome out;
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    for (double nfac : {0.5, 1.0, 2.0}) {
        for (int which_a = 0; which_a < 4; ++which_a) {
            RatioSeries ser;
            ser.name =
                "cusp_N" + std::to_string(nfac) + "_a" + std::to_string(which_a);
            for (int64_t q : {211, 1009, 10007, 31627}) {
                PrimeContext ctx(q);
                int64_t choices[4] = {1, ctx.primitive_root(), 7 % q, 31 % q};
                int64_t a = choices[which_a];
                if (a == 0) a = 1;
                BoundReport rep =
                    cuspidal_bound_report(hd, ctx, a, w, nfac * static_cast<double>(q));
                ser.q.push_back(static_cast<double>(q));
                ser.ratio.push_back(rep.ratio("predicted"));
                out.rows.push_back(std::move(rep));
            }
            out.series.push_back(std::move(ser));
        }
    }
    out.trend = family_trend(out.series);
    out.trend.name = "cusp_trend";
    return out;
}

ScanOutcome primes_scan(const ArithTables& at) {
    ScanOutcome out;
    const std::vector<int64_t> qs = {1009, 10007, 100003};
    for (double Qv : {1.0, 2.0}) {
        SmoothWeight w = make_bump(Qv, 0.5, 2.0);
        for (double xfac : {0.5, 1.0}) {
            RatioSeries ser;
            ser.name = "primes_smooth_Q" + std::to_string(Qv) + "_x" + std::to_string(xfac);
            for (int64_t q : qs) {
                PrimeContext ctx(q);
                std::vector<double> kl = kloosterman_all(ctx);
                BoundReport rep =
                    prime_kloosterman_smooth(ctx, kl, w, xfac * static_cast<double>(q), at);
                ser.q.push_back(static_cast<double>(q));
                ser.ratio.push_back(rep.ratio("predicted"));
                out.rows.push_back(std::move(rep));
            }
            out.series.push_back(std::move(ser));
        }
    }
    {
        RatioSeries ser;
        ser.name = "primes_sharp";
        for (int64_t q : qs) {
            PrimeContext ctx(q);
            std::vector<double> kl = kloosterman_all(ctx);
            BoundReport rep = prime_kloosterman_sharp(ctx, kl, static_cast<double>(q), at);
            ser.q.push_back(static_cast<double>(q));
            ser.ratio.push_back(rep.ratio("predicted"));
            out.rows.push_back(std::move(rep));
        }
        out.series.push_back(std::move(ser));
    }
    out.trend = family_trend(out.series);
    out.trend.name = "primes_trend";
    return out;
}

ScanOutcome quadrilinear_scan() {
    ScanOutcome out;
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    RatioSeries ser;
    ser.name = "quadrilinear";
    for (int64_t q : {211, 1009, 10007}) {
        PrimeContext ctx(q);
        std::vector<double> kl = kloosterman_all(ctx);
        const double side = std::sqrt(static_cast<double>(q));  // (q^2)^{1/4}
        for (int sign : {+1, -1}) {
            BoundReport rep =
                quadrilinear_sum(ctx, kl, {&w, &w, &w, &w}, {side, side, side, side}, sign);
            ser.q.push_back(static_cast<double>(q));
            ser.ratio.push_back(rep.ratio("best"));
            out.rows.push_back(std::move(rep));
        }
    }
    out.series.push_back(std::move(ser));
    out.trend = family_trend(out.series);
    out.trend.name = "quadrilinear_trend";
    return out;
}

}  // namespace klab
