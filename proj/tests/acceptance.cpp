// Acceptance suite: one line per criterion, exit 0 iff all pass.
// Heavy tables (Ramanujan tau) go through KLAB_CACHE_DIR when set, so reruns
// are fast.  Criterion 9 drives the installed CLI binary (KLAB_BIN) twice per
// subcommand and compares bytes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "klab/arith.hpp"
#include "klab/bilinear.hpp"
#include "klab/errors.hpp"
#include "klab/modforms.hpp"
#include "klab/moments.hpp"
#include "klab/primes.hpp"
#include "klab/scans.hpp"
#include "klab/transforms.hpp"

using namespace klab;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %d [%s]: %s  (%s)\n", idx, name.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string cache_dir() {
    const char* env = std::getenv("KLAB_CACHE_DIR");
    return env ? env : "";
}

char buf[512];

// ---- criterion 1: lemma exactness, q <= 200, all a, < 1e-9, < 30 s ----
void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int64_t q = 2; q <= 200; ++q) {
        if (!is_prime(q)) continue;
        PrimeContext ctx(q);
        for (int64_t a = 1; a < q; ++a)
            worst = std::max(worst, verify_kloosterman_lemma(ctx, a));
    }
    double secs = seconds_since(t0);
    std::snprintf(buf, sizeof buf, "max error %.3e, %.1f s", worst, secs);
    report(1, "lemma-exactness", worst < 1e-9 && secs < 30.0, buf);
}

// ---- criterion 2: tempered Voronoi residual < 1e-6 at the two configs ----
void criterion2() {
    auto t0 = std::chrono::steady_clock::now();
    SmoothWeight w = make_bump(1.0, 0.5, 2.0);
    TailPolicy policy;
    policy.tol = 1e-8;
    double worst = 0.0;
    for (auto [q, M, N] : std::vector<std::array<double, 3>>{{101, 30, 30}, {199, 50, 120}}) {
        PrimeContext ctx(static_cast<int64_t>(q));
        PeriodicFunction K = kloosterman_function(ctx, 1);
        TestFunction2D G{&w, &w, M, N};
        worst = std::max(worst, tempered_voronoi_residual(K, G, policy, ctx));
    }
    double secs = seconds_since(t0);
    std::snprintf(buf, sizeof buf, "max residual %.3e, %.1f s", worst, secs);
    report(2, "tempered-voronoi", worst < 1e-6 && secs < 60.0, buf);
}

// ---- criterion 3: cusp-form Voronoi < 1e-6 plus the 691 congruence ----
void criterion3() {
    bool pass = true;
    std::ostringstream detail;
    try {
        CuspCheckResult r13 = cusp_check_auto(13, 1, 50.0, 1e-6, cache_dir());
        CuspCheckResult r101 = cusp_check_auto(101, 7, 200.0, 1e-6, cache_dir());
        detail << "residuals " << r13.cusp_residual << " (q13) " << r101.cusp_residual
               << " (q101), twisted " << r13.twisted_residual << " / "
               << r101.twisted_residual;
        pass = r13.cusp_residual < 1e-6 && r101.cusp_residual < 1e-6 &&
               r13.twisted_residual < 1e-6 && r101.twisted_residual < 1e-6;
    } catch (const Error& e) {
        pass = false;
        detail << "error: " << e.what();
    }
    // Ramanujan congruence probe
    HeckeData hd = delta_coefficients_cached(1000, cache_dir());
    ArithTables at = arith_tables(1000);
    for (int64_t p : at.primes) {
        int128 p11 = 1;
        for (int i = 0; i < 11; ++i) p11 *= p;
        if (static_cast<long long>((hd.tau[static_cast<std::size_t>(p)] - 1 - p11) % 691) != 0) {
            pass = false;
            detail << "; congruence fails at p=" << p;
        }
    }
    report(3, "cusp-voronoi+691", pass, detail.str());
}

// ---- criterion 4: Weil bound exhaustive, fast-vs-direct tables ----
void criterion4() {
    double weil_excess = -1.0;
    for (int64_t q = 2; q <= 1000; ++q) {
        if (!is_prime(q)) continue;
        PrimeContext ctx(q);
        std::vector<double> kl = kloosterman_all(ctx);
        for (int64_t m = 1; m < q; ++m)
            weil_excess = std::max(weil_excess, std::abs(kl[static_cast<std::size_t>(m)]) - 2.0);
    }
    double table_err = 0.0;
    for (int64_t q : {101, 1009, 10007}) {
        PrimeContext ctx(q);
        std::vector<double> kl = kloosterman_all(ctx);
        for (int64_t m = 0; m < q; ++m)
            table_err = std::max(table_err, std::abs(kl[static_cast<std::size_t>(m)] -
                                                     kloosterman_direct(m, ctx)));
    }
    std::snprintf(buf, sizeof buf, "weil excess %.3e, fast-vs-direct %.3e", weil_excess,
                  table_err);
    report(4, "weil-bound", weil_excess <= 1e-9 && table_err < 1e-10, buf);
}

// ---- criterion 5: Heath-Brown identity and decomposition ----
void criterion5() {
    double worst = 0.0;
    for (int J : {2, 3, 4}) worst = std::max(worst, hb_lambda_check(J, 10000));
    PrimeContext ctx(1009);
    std::vector<double> kl = kloosterman_all(ctx);
    ArithTables at = arith_tables(2048);
    DecompositionCheck chk = sigma_decomposition_check(ctx, kl, 1000, 2, at);
    std::snprintf(buf, sizeof buf, "lambda err %.3e, recombination rel err %.3e (%lld terms)",
                  worst, chk.rel_error, static_cast<long long>(chk.term_count));
    report(5, "heath-brown", worst < 1e-9 && chk.rel_error < 1e-6, buf);
}

// ---- criterion 6: bound-ratio suites with trend gates ----
void criterion6() {
    bool pass = true;
    std::ostringstream detail;
    auto run = [&](const char* name, const ScanOutcome& sc) {
        double mx = 0.0;
        for (const auto& s : sc.series) mx = std::max(mx, s.max_ratio());
        bool ok = sc.pass(kRatioCeiling, kSlopeCap);
        detail << name << " max " << mx << " slope " << sc.trend.slope_top_half()
               << (ok ? " ok; " : " FAIL; ");
        pass = pass && ok;
    };
    run("sharp", bilinear_sharp_scan());
    run("smooth", bilinear_smooth_scan());
    run("typeii", typeii_scan(1));
    HeckeData hd = delta_coefficients_cached(4 * 31627 + 16, cache_dir());
    run("cusp", cuspidal_scan(hd));
    ArithTables at = arith_tables(2 * 100003 + 16);
    run("primes", primes_scan(at));
    run("quadrilinear", quadrilinear_scan());
    report(6, "bound-ratio-suites", pass, detail.str());
}

// ---- criterion 7: exponent certificates ----
void criterion7() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::ostringstream detail;
    double worst_eta = 1e300;
    for (double x : {0.75, 0.8, 0.9, 1.0}) {
        for (double kap : {0.0, 0.02}) {
            double m = eta_case_certificate(x, kap, 10, 1.0 / 30.0);
            worst_eta = std::min(worst_eta, m);
            if (m < -1e-9) pass = false;
        }
    }
    double eta_secs = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    MomentCertificate c20 = moment_exponent_certificate(1.0 / 20.0, 1.0 / 40.0, false);
    MomentCertificate c16 = moment_exponent_certificate(1.0 / 16.0, 1.0 / 40.0, true);
    MomentCertificate c10 = moment_exponent_certificate(1.0 / 10.0, 1.0 / 40.0, false);
    double mom_secs = seconds_since(t0);
    if (!c20.pass || !c16.pass || c10.pass) pass = false;
    if (eta_secs > 120.0 || mom_secs > 120.0) pass = false;
    detail << "eta worst margin " << worst_eta << " (" << eta_secs << " s); moment 1/20 "
           << (c20.pass ? "pass" : "FAIL") << ", 1/16 tightened "
           << (c16.pass ? "pass" : "FAIL") << ", 1/10 " << (c10.pass ? "PASSES (bad)" : "fails")
           << " (" << mom_secs << " s)";
    report(7, "exponent-certificates", pass, detail.str());
}

// ---- criterion 8: L-value dual method, conjugation, moment fit ----
void criterion8() {
    double worst_pair = 0.0, worst_conj = 0.0;
    for (int64_t q = 3; q <= 200; ++q) {
        if (!is_prime(q)) continue;
        PrimeContext ctx(q);
        std::vector<cdouble> oracle = l_half_all_oracle(ctx);
        std::vector<cdouble> afe = l_half_all_afe(ctx);
        for (int64_t j = 1; j < q - 1; ++j) {
            worst_pair = std::max(worst_pair, std::abs(oracle[static_cast<std::size_t>(j)] -
                                                       afe[static_cast<std::size_t>(j)]));
            worst_conj =
                std::max(worst_conj, std::abs(oracle[static_cast<std::size_t>(j)] -
                                              std::conj(oracle[static_cast<std::size_t>(
                                                  q - 1 - j)])));
        }
    }
    auto t0 = std::chrono::steady_clock::now();
    MomentSeries ser = moment_series(50, 2000);
    double secs = seconds_since(t0);
    const double classical = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
    bool fit_ok = ser.fit[4] > 0.0 && ser.fit[4] < 3.0 * classical &&
                  ser.fit[4] > classical / 3.0;
    std::snprintf(buf, sizeof buf,
                  "oracle-afe %.3e, conj %.3e, fit c4/classical %.3f, %.1f s", worst_pair,
                  worst_conj, ser.fit[4] / classical, secs);
    report(8, "l-value-dual+fit", worst_pair < 1e-6 && worst_conj < 1e-8 && fit_ok &&
                                      secs < 600.0,
           buf);
}

// ---- criterion 9: byte-identical reruns of every subcommand ----
void criterion9() {
    const char* bin = std::getenv("KLAB_BIN");
    if (!bin) {
        report(9, "determinism", false, "KLAB_BIN not set");
        return;
    }
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"verify-lemma", "verify-lemma --q-max 60"},
        {"voronoi-check", "voronoi-check --q 31 --M 10 --N 10"},
        {"cusp-voronoi-check", "cusp-voronoi-check --q 13 --N 20 --tol 0.001"},
        {"bilinear-scan", "bilinear-scan --q 211 --M 20 --N 20"},
        {"typeii-scan", "typeii-scan --q 211 --seed 7"},
        {"quadrilinear-scan", "quadrilinear-scan --q 211"},
        {"hb-verify", "hb-verify --J 2 --X 2000 --decomp --q 211"},
        {"primes-scan", "primes-scan --q 1009 --X 500 --Q 1"},
        {"eta-certify", "eta-certify --x 0.9 --kappa 0"},
        {"moment-scan", "moment-scan --q-range 53:199 --fit"},
        {"moment-certify", "moment-certify --eta 0.05 --grid-step 0.025"},
        {"tau-table", "tau-table --n-max 64"},
    };
    bool pass = true;
    std::ostringstream detail;
    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    for (const auto& [name, args] : cases) {
        // identical invocations (including the output path), captured in between
        std::string out = "det_run.csv";
        std::string cmd = std::string(bin) + " " + args +
                          " --threads 1 --emit-plot-data --out " + out + " >/dev/null 2>&1";
        int rc1 = std::system(cmd.c_str());
        std::string a = slurp(out) + slurp(out + ".plot.csv");
        int rc2 = std::system(cmd.c_str());
        std::string b = slurp(out) + slurp(out + ".plot.csv");
        bool same = !a.empty() && a == b && rc1 == rc2;
        if (!same) {
            pass = false;
            detail << name << " differs; ";
        }
        std::remove(out.c_str());
        std::remove((out + ".plot.csv").c_str());
    }
    if (pass) detail << cases.size() << " subcommands byte-identical";
    report(9, "determinism", pass, detail.str());
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (failures == 0) {
        std::printf("acceptance: all 9 criteria PASS\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    return 1;
}
