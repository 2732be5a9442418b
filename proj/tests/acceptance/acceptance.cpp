// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
// Usage: klein_acceptance <path-to-klein-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "klein/device_sim.hpp"
#include "klein/graphene_junction.hpp"
#include "klein/step_scattering.hpp"

using namespace klein;
using P = StepProblem<double>;

namespace {

constexpr double deg = std::numbers::pi / 180.0;

struct Outcome {
    bool pass;
    std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args)
{
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 30^3 Klein-interval grid, m = 1: E in (1, 10], V0 in (E + 1, 20]
std::vector<P> klein_grid()
{
    std::vector<P> out;
    const int n = 30;
    for (int i = 1; i <= n; ++i) {
        const double e = 1.0 + 9.0 * i / n;
        for (int j = 1; j <= n; ++j) {
            const double v = (e + 1.0) + (20.0 - (e + 1.0)) * j / n;
            for (int k = 1; k <= n; ++k) {
                // third axis: sub-step jitter of V0 so all 27000 points differ
                const double vv = v - (20.0 - (e + 1.0)) / n * (k - 1) / (2.0 * n);
                out.push_back({e, 1.0, vv});
            }
        }
    }
    return out;
}

Outcome c1_klein_sanity()
{
    const auto t0 = std::chrono::steady_clock::now();
    double worst_sum = 0.0;
    bool in_range = true;
    for (const P& p : klein_grid()) {
        const double k = kappa(p);
        const auto rt = rt_from_kappa(k);
        in_range = in_range && k >= 0.0 && k <= 1.0 && rt.R >= 0.0 && rt.R <= 1.0 && rt.T >= 0.0 && rt.T <= 1.0;
        worst_sum = std::max(worst_sum, std::abs(rt.R + rt.T - 1.0));
    }
    const double dt = seconds_since(t0);
    return {in_range && worst_sum < 1e-12 && dt < 5.0,
            fmt("ranges ok=%d max|R+T-1|=%.3g (<1e-12) time=%.3fs (<5s)", in_range, worst_sum, dt)};
}

Outcome c2_numeric_vs_closed()
{
    double worst = 0.0;
    for (const P& p : klein_grid()) {
        const auto s = solve_step_numeric(p, Convention::paper_kappa);
        const auto c = rt_from_kappa(kappa(p));
        worst = std::max({worst, std::abs(s.R - c.R), std::abs(s.T - c.T)});
    }
    return {worst < 1e-10, fmt("max deviation=%.3g (<1e-10)", worst)};
}

Outcome c3_inversion()
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const double k = std::max(u(rng), 1e-6);
        const auto a = rt_from_kappa(k);
        const auto b = rt_from_kappa(1.0 / k);
        worst = std::max({worst, std::abs(a.R - b.R), std::abs(a.T - b.T)});
    }
    return {worst < 1e-12, fmt("max deviation=%.3g (<1e-12)", worst)};
}

Outcome c4_massless()
{
    double worst = 0.0;
    bool exact = true;
    for (double e : {0.5, 1.0, 2.0, 5.0})
        for (double v : {2.0 * e + 0.5, 3.0 * e, 10.0 * e}) {
            const auto s = solve_step_numeric(P{e, 1e-8 * e, v}, Convention::paper_kappa);
            worst = std::max(worst, std::abs(s.T - 1.0));
            const auto z = rt_from_kappa(kappa(P{e, 0.0, v}));
            exact = exact && z.T == 1.0 && z.R == 0.0;
        }
    return {worst < 1e-6 && exact, fmt("max|T-1| at m=1e-8 E: %.3g (<1e-6); m=0 exact T=1,R=0: %d", worst, exact)};
}

Outcome c5_kappa_prime()
{
    bool signs = true;
    double worst_sum = 0.0;
    for (const P& p : klein_grid()) {
        const auto rt = rt_from_kappa(kappa_prime(p));
        signs = signs && rt.T < 0.0 && rt.R > 1.0;
        worst_sum = std::max(worst_sum, std::abs(rt.R + rt.T - 1.0) / std::max(1.0, rt.R));
    }
    // |1 + kappa'| shrinks monotonically as m/E -> 0
    bool monotone = true;
    double previous = INFINITY;
    double t_small = 0.0;
    for (int d = 1; d <= 7; ++d) {
        const double ratio = std::pow(10.0, -d);
        const P p{1.0, ratio, 3.0};
        const double gap = std::abs(1.0 + kappa_prime(p));
        monotone = monotone && gap < previous;
        previous = gap;
        if (d == 7)
            t_small = rt_from_kappa(kappa_prime(p)).T;
    }
    const bool pass = signs && worst_sum < 1e-10 && monotone && std::abs(t_small) > 1e6;
    return {pass, fmt("T'<0,R'>1: %d rel max|R'+T'-1|=%.3g (<1e-10) monotone=%d |T'|(m/E=1e-7)=%.3g (>1e6)", signs,
                      worst_sum, monotone, std::abs(t_small))};
}

Outcome c6_mode_currents()
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double spread = 0.0, closed = 0.0, pair = 0.0;
    for (int n = 0; n < 100; ++n) {
        const double e = 1.0 + 1e-3 + 9.0 * u(rng);
        const P p{e, 1.0, e + 1.0 + 1e-3 + 10.0 * u(rng)};
        const double k = kappa(p);
        double j[4];
        int idx = 0;
        for (BasisKind kind : {BasisKind::u_plus, BasisKind::u_minus, BasisKind::v_plus, BasisKind::v_minus}) {
            const auto m = mode_current(kind, p);
            spread = std::max(spread, m.spread);
            closed = std::max(closed, std::abs(m.value - mode_current_closed_form(kind, k)));
            j[idx++] = m.value;
        }
        pair = std::max({pair, std::abs(j[0] + j[3]), std::abs(j[1] + j[2])});
    }
    return {spread < 1e-10 && closed < 1e-10 && pair < 1e-12,
            fmt("spread=%.3g (<1e-10) vs closed form=%.3g (<1e-10) pair sums=%.3g (<1e-12)", spread, closed, pair)};
}

Outcome c7_spinors()
{
    double worst2 = 0.0, worst4 = 0.0;
    const int n = 10;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const double m = 0.25 * a;
                const double k = -4.0 + 8.0 * b / (n - 1);
                const double e = std::sqrt(k * k + m * m);
                if (e > 0.0)
                    for (double eps : {e, -e})
                        worst2 = std::max(worst2, hamiltonian_residual(make_spinor2(eps, k, m), eps,
                                                                       std::complex<double>(k), m));
                const double phi = 2.0 * std::numbers::pi * c / n;
                const Momentum3<double> p(k * std::cos(phi), k * std::sin(phi), 0.5 * k - 0.3 * c);
                const double en = std::sqrt(p.squaredNorm() + m * m);
                for (Branch br : {Branch::positive, Branch::negative})
                    for (Spin s : {Spin::up, Spin::down}) {
                        try {
                            worst4 = std::max(worst4, hamiltonian_residual(make_spinor4(en, p, m, br, s), en, p, m));
                        } catch (const std::domain_error&) {
                            // vanishing column at rest, nothing to check
                        }
                    }
            }
    return {worst2 < 1e-12 && worst4 < 1e-12, fmt("max residual 2-comp=%.3g 4-comp=%.3g (<1e-12)", worst2, worst4)};
}

Outcome c8_normal_incidence()
{
    const double e = energy_from_wavelength(50.0);
    const auto ak = angle_kinematics(e, 0.3, 0.0);
    const double t_step = transmission_probability(t_paper(ak), ak);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double d = 1.0 + 199.0 * i / 19.0;
        for (Convention c : {Convention::paper_kappa, Convention::common_kappa_prime})
            worst = std::max(worst, std::abs(barrier_transmission(e, 0.3, d, 0.0, c).T - 1.0));
    }
    return {t_step == 1.0 && worst < 1e-10, fmt("step T(0)=%.17g (==1) barrier max|T-1|=%.3g (<1e-10)", t_step, worst)};
}

Outcome c9_barrier_equivalence()
{
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int cells = 0, evanescent = 0;
    for (int a = 0; a < 10; ++a) {
        const double lambda = 20.0 + 10.0 * a;
        const double e = energy_from_wavelength(lambda);
        for (int b = 0; b < 10; ++b) {
            const double v = 0.05 + 0.05 * b;
            if (std::abs(v - e) < 1e-6)
                continue;
            for (int c = 0; c < 10; ++c) {
                const double d = 5.0 + 20.0 * c;
                for (int t = 0; t < 10; ++t) {
                    const double theta = (-81.0 + 18.0 * t) * deg;
                    const auto ak = angle_kinematics(e, v, theta);
                    if (std::abs(ak.kx_region2) <= 1e-9 * ak.k_region2)
                        continue;
                    const double tp = barrier_transmission(e, v, d, theta, Convention::paper_kappa).T;
                    const double tc = barrier_transmission(e, v, d, theta, Convention::common_kappa_prime).T;
                    worst = std::max(worst, std::abs(tp - tc));
                    ++cells;
                    evanescent += !ak.propagating;
                }
            }
        }
    }
    const double dt = seconds_since(t0);
    return {worst < 1e-10 && dt < 30.0 && evanescent > 0 && cells > 9000,
            fmt("cells=%d (evanescent %d) max|dT|=%.3g (<1e-10) time=%.3fs (<30s)", cells, evanescent, worst, dt)};
}

Outcome c10_angular_profile()
{
    std::vector<double> thetas;
    for (int i = -85; i <= 85; ++i)
        thetas.push_back(i * deg);
    const auto prof = angular_current_profile_from_wavelength(50.0, 0.3, thetas);
    double odd = 0.0;
    for (std::size_t i = 0; i < prof.size(); ++i)
        odd = std::max(odd, std::abs(prof[i].relative_current - prof[prof.size() - 1 - i].relative_current));
    const double i0 = prof[85].relative_current;
    const double d45 = std::abs(prof[85 + 45].relative_current - 0.72793518144289648);
    const double d80 = std::abs(prof[85 + 80].relative_current - 0.21049163538058981);
    return {i0 == 1.0 && odd < 1e-12 && d45 < 1e-6 && d80 < 1e-6,
            fmt("I(0)/I0=%.17g evenness=%.3g (<1e-12) |d45|=%.3g |d80|=%.3g (<1e-6)", i0, odd, d45, d80)};
}

Outcome c11_iv_family()
{
    std::vector<double> bias;
    for (int i = 0; i <= 100; ++i)
        bias.push_back(-5e-3 + 1e-4 * i);
    double slopes[3];
    double worst_resid = 0.0;
    for (int g = 0; g < 3; ++g) {
        DeviceParams p;
        p.back_gate = 0.1 * (g + 1);
        const auto iv = iv_curve(p, bias);
        // least squares I = a + b V
        double sv = 0, si = 0, svv = 0, svi = 0;
        const double n = static_cast<double>(iv.size());
        for (const auto& pt : iv) {
            sv += pt.bias;
            si += pt.current;
            svv += pt.bias * pt.bias;
            svi += pt.bias * pt.current;
        }
        const double b = (n * svi - sv * si) / (n * svv - sv * sv);
        const double a = (si - b * sv) / n;
        double resid = 0.0, scale = 0.0;
        for (const auto& pt : iv) {
            resid = std::max(resid, std::abs(pt.current - (a + b * pt.bias)));
            scale = std::max(scale, std::abs(pt.current));
        }
        // through the origin: the intercept counts as part of the residual
        worst_resid = std::max({worst_resid, resid / scale, std::abs(a) / scale});
        slopes[g] = b;
    }
    const double r2 = std::abs(slopes[1] / slopes[0] - 2.0);
    const double r3 = std::abs(slopes[2] / slopes[0] - 3.0);
    const double rel = std::abs(slopes[1] / 35.08e-6 - 1.0);
    return {worst_resid < 1e-12 && r2 < 1e-12 && r3 < 1e-12 && rel < 1e-3,
            fmt("linearity=%.3g (<1e-12) ratio errors %.3g, %.3g (<1e-12) slope(0.2V)=%.6g S rel=%.3g (<1e-3)",
                worst_resid, r2, r3, slopes[1], rel)};
}

std::string capture(const std::string& cmd, int& status)
{
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        status = -1;
        return out;
    }
    char chunk[4096];
    std::size_t n;
    while ((n = std::fread(chunk, 1, sizeof chunk, pipe)) > 0)
        out.append(chunk, n);
    status = pclose(pipe);
    return out;
}

Outcome c12_cli_determinism(const std::string& cli)
{
    const std::string cmd = cli + " step-compare --E 1.05:9.95:40 --m 1 --V0 12 --no-manifest";
    int s1 = 0, s2 = 0;
    const auto a = capture(cmd, s1);
    const auto b = capture(cmd, s2);
    const bool pass = s1 == 0 && s2 == 0 && !a.empty() && a == b;
    return {pass, fmt("exit %d/%d, %zu bytes, identical=%d", s1, s2, a.size(), a == b)};
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <klein-cli>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"klein-zone sanity", c1_klein_sanity},
        {"numeric matching vs closed form", c2_numeric_vs_closed},
        {"kappa -> 1/kappa invariance", c3_inversion},
        {"massless limit", c4_massless},
        {"kappa' pathology", c5_kappa_prime},
        {"mode currents", c6_mode_currents},
        {"spinor eigenresiduals", c7_spinors},
        {"normal incidence", c8_normal_incidence},
        {"barrier convention equivalence", c9_barrier_equivalence},
        {"angular current profile", c10_angular_profile},
        {"I-V family", c11_iv_family},
        {"CLI determinism", [&] { return c12_cli_determinism(cli); }},
    };

    int failures = 0;
    int index = 1;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %2d %-34s %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
        failures += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
