// SPDX-License-Identifier: Apache-2.0
//
// diagcheb: construct least Chebyshev polynomials and their dual signatures
// on diagonally-determined sets, and detect the diagonally-determined
// property for semi-algebraic sets through a sum-of-squares hierarchy.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "diagcheb/json_io.hpp"
#include "diagcheb/leastcheb.hpp"
#include "diagcheb/oracle.hpp"
#include "diagcheb/polycore.hpp"
#include "diagcheb/sets.hpp"
#include "diagcheb/signature.hpp"
#include "diagcheb/sosdetect.hpp"
#include "diagcheb/uniroots.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNegative = 2;  // structured negative / inconclusive result

int log_level() {
    const char* env = std::getenv("DIAGCHEB_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[diagcheb] " << msg << "\n";
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

diagcheb::SetDescription load_set(const std::string& path) {
    return diagcheb::set_from_json(diagcheb::load_json_file(path));
}

// certificate from --cert when given, otherwise the closed form for the set
std::optional<diagcheb::DDCertificate> resolve_certificate(const std::string& cert_file,
                                                           const std::string& set_file,
                                                           std::optional<diagcheb::SetDescription>* set_out) {
    if (!cert_file.empty()) {
        auto c = diagcheb::certificate_from_json(diagcheb::load_json_file(cert_file));
        if (!set_file.empty() && set_out) *set_out = load_set(set_file);
        return c;
    }
    if (set_file.empty()) return std::nullopt;
    auto s = load_set(set_file);
    auto c = diagcheb::certify_analytic(s);
    if (set_out) *set_out = std::move(s);
    return c;
}

std::string csv_path_for(const std::string& out) {
    const auto dot = out.rfind(".json");
    if (dot != std::string::npos && dot == out.size() - 5) return out.substr(0, dot) + ".csv";
    return out + ".csv";
}

int cmd_diag(const std::string& set_file, double tol, const std::string& out_file) {
    const auto set = load_set(set_file);
    diagcheb::json out;
    if (const auto* sa = set.get_if<diagcheb::SemiAlgebraic>()) {
        const auto res = diagcheb::compute_diagonal(sa->constraints, tol);
        if (!res.ok()) {
            std::cout << "diagonal: " << diagcheb::to_string(res.status)
                      << (res.detail.empty() ? "" : " (" + res.detail + ")") << "\n";
            out = {{"status", diagcheb::to_string(res.status)}, {"detail", res.detail}};
            if (!out_file.empty()) diagcheb::write_json_file(out_file, out);
            return kExitNegative;
        }
        std::cout << "[" << fmt(res.interval.lo) << ", " << fmt(res.interval.hi) << "]\n";
        out = {{"status", "ok"}, {"a", res.interval.lo}, {"b", res.interval.hi}};
        if (!out_file.empty()) diagcheb::write_json_file(out_file, out);
        return kExitOk;
    }
    const auto cert = diagcheb::certify_analytic(set);
    if (!cert) {
        std::cout << "diagonal: no closed form for this set\n";
        if (!out_file.empty())
            diagcheb::write_json_file(out_file, {{"status", "unknown"}});
        return kExitNegative;
    }
    std::cout << "[" << fmt(cert->a) << ", " << fmt(cert->b) << "]\n";
    if (!out_file.empty())
        diagcheb::write_json_file(out_file, {{"status", "ok"}, {"a", cert->a}, {"b", cert->b}});
    return kExitOk;
}

int cmd_detect(const std::string& set_file, int kmax, double zero_threshold, std::size_t samples,
               std::uint64_t seed, double tol, const std::string& out_file) {
    const auto set = load_set(set_file);
    const auto* sa = set.get_if<diagcheb::SemiAlgebraic>();
    if (!sa) throw std::invalid_argument("detect requires a semialgebraic set description");

    const auto diag = diagcheb::compute_diagonal(sa->constraints, tol);
    if (!diag.ok()) {
        std::cout << "not diagonally-determined by the diagonal step: "
                  << diagcheb::to_string(diag.status)
                  << (diag.detail.empty() ? "" : " (" + diag.detail + ")") << "\n";
        if (!out_file.empty())
            diagcheb::write_json_file(
                out_file, {{"status", "diagonal_failure"},
                           {"diagonal", {{"status", diagcheb::to_string(diag.status)}, {"detail", diag.detail}}}});
        return kExitNegative;
    }
    log_info("diagonal [" + fmt(diag.interval.lo) + ", " + fmt(diag.interval.hi) + "]");

    diagcheb::DetectOptions opt;
    opt.k_max = kmax;
    opt.zero_threshold = zero_threshold;
    opt.check_samples = samples;
    opt.check_seed = seed;
    const diagcheb::SetDescription* sample_on = sa->bbox ? &set : nullptr;
    const auto res = diagcheb::detect(sa->constraints, diag.interval.lo, diag.interval.hi, opt, sample_on);

    diagcheb::json out = diagcheb::to_json(res);
    out["diagonal"] = {{"a", diag.interval.lo}, {"b", diag.interval.hi}};
    if (!out_file.empty()) diagcheb::write_json_file(out_file, out);

    if (res.status == diagcheb::DetectStatus::certified) {
        std::cout << "certified at k=" << res.level << " with rho=" << fmt(res.rho) << "\n";
        return kExitOk;
    }
    std::cout << "inconclusive: " << res.detail << "\n";
    return kExitNegative;
}

int cmd_least(const std::string& set_file, const std::string& cert_file, int n,
              const std::string& out_file) {
    std::optional<diagcheb::SetDescription> set;
    const auto cert = resolve_certificate(cert_file, set_file, &set);
    if (!cert) {
        std::cout << "no analytic certificate for this set; run `diagcheb detect` first or pass --cert\n";
        return kExitNegative;
    }
    cert->require_valid();
    const bool degenerate = diagcheb::is_degenerate_diagonal(*cert);
    if (degenerate) std::cerr << "warning: degenerate diagonal (a = b), least norm is 0\n";
    const diagcheb::LeastResult lr = degenerate ? diagcheb::degenerate_least_polynomial(*cert, n)
                                                : diagcheb::least_polynomial(*cert, n);
    std::cout << "value = " << fmt(lr.value) << "\n";
    if (!out_file.empty()) {
        diagcheb::write_json_file(out_file, diagcheb::to_json(lr));
        // diagonal trace for plotting
        const std::string csv = csv_path_for(out_file);
        std::ofstream cs(csv);
        if (!cs) throw std::invalid_argument("cannot open file for writing: " + csv);
        cs << "t,p_diag\n";
        const diagcheb::UniPoly diag_poly = diagcheb::restrict_to_diagonal(lr.polynomial);
        const int rows = 400;
        for (int i = 0; i <= rows; ++i) {
            const double t = cert->a + (cert->b - cert->a) * static_cast<double>(i) / rows;
            cs << fmt(t) << "," << fmt(diag_poly.eval(t)) << "\n";
        }
    }
    return kExitOk;
}

int cmd_signature(const std::string& set_file, const std::string& cert_file, int n,
                  const std::string& out_file) {
    std::optional<diagcheb::SetDescription> set;
    const auto cert = resolve_certificate(cert_file, set_file, &set);
    if (!cert) {
        std::cout << "no certificate available; pass --cert or an analytically certified --set\n";
        return kExitNegative;
    }
    cert->require_valid();
    const auto sig = diagcheb::build_signature(*cert, n);
    const auto fn = diagcheb::build_functional(sig, n);
    const auto dual = diagcheb::verify_dual_optimality(fn, *cert, n);
    std::cout << "gamma = " << fmt(dual.gamma) << ", gap = " << fmt(dual.gap) << "\n";
    if (!out_file.empty()) diagcheb::write_json_file(out_file, diagcheb::to_json(sig, dual.gamma, dual.gap));
    return dual.gap <= 1e-9 ? kExitOk : kExitNegative;
}

int cmd_verify(const std::string& set_file, const std::string& cert_file, int n, std::size_t samples,
               std::uint64_t seed) {
    std::optional<diagcheb::SetDescription> set;
    auto cert = resolve_certificate(cert_file, set_file, &set);
    if (!set) throw std::invalid_argument("verify requires --set");
    if (!cert) {
        std::cout << "no certificate available for this set; pass --cert (e.g. from `detect`)\n";
        return kExitNegative;
    }

    bool all_pass = true;
    const auto report = [&](const std::string& name, bool pass, const std::string& detail) {
        std::cout << (pass ? "PASS" : "FAIL") << "  " << name << "  " << detail << "\n";
        all_pass = all_pass && pass;
    };

    const double sum_v = cert->sum_v();
    report("certificate-normalization", std::abs(sum_v - 1.0) <= 1e-9, "sum_v=" + fmt(sum_v));
    if (std::abs(sum_v - 1.0) > 1e-9) {
        std::cout << "certificate check failed; skipping dependent checks\n";
        return kExitNegative;
    }

    const double viol_tol = std::holds_alternative<diagcheb::DDCertificate::Analytic>(cert->provenance)
                                ? 1e-9
                                : 1e-4;
    const auto chk = diagcheb::check_certificate(*set, *cert, samples, seed);
    report("certificate-sampling", chk.max_violation <= viol_tol && chk.diag_points_in_set,
           "max_violation=" + fmt(chk.max_violation));

    const bool degenerate = diagcheb::is_degenerate_diagonal(*cert);
    const double value = diagcheb::least_norm(cert->a, cert->b, n);
    const auto lr = diagcheb::least_polynomial_auto(*cert, n);

    if (degenerate) {
        report("least-norm-degenerate", lr.value == 0.0, "value=" + fmt(lr.value));
    } else {
        const auto rz = diagcheb::remez_monic(n, cert->a, cert->b);
        const double rel = std::abs(rz.value - value) / std::max(value, 1e-300);
        report("least-norm-remez", rel <= 1e-8, "value=" + fmt(value) + " remez=" + fmt(rz.value));
    }

    const double lead = diagcheb::leading_coeff_sum(lr.polynomial, n);
    report("leading-sum", std::abs(lead - 1.0) <= 1e-9, "sum=" + fmt(lead));

    auto sup = diagcheb::sup_norm_estimate(lr.polynomial, *set, samples, seed);
    const auto sig = diagcheb::build_signature(*cert, n);
    for (const auto& pt : sig.points) {
        if (!diagcheb::set_contains(*set, pt, 1e-7)) continue;
        const double v = std::abs(diagcheb::eval_multi(lr.polynomial, pt));
        if (v > sup.max_val) {
            sup.max_val = v;
            sup.argmax = pt;
        }
    }
    const bool sup_ok = sup.max_val <= lr.value + 1e-8 && sup.max_val >= lr.value - 1e-10;
    report("sup-norm-attainment", sup_ok, "sup=" + fmt(sup.max_val) + " value=" + fmt(lr.value));

    const auto fn = diagcheb::build_functional(sig, n);
    const auto ann = diagcheb::verify_annihilation(fn, n, cert->dimension());
    report("signature-annihilation", ann.max_abs <= 1e-10, "max_abs=" + fmt(ann.max_abs));

    const auto dual = diagcheb::verify_dual_optimality(fn, *cert, n);
    report("signature-optimality",
           dual.gap <= 1e-9 && dual.max_extremal_dev <= 1e-9 && dual.signs_match,
           "gamma=" + fmt(dual.gamma) + " gap=" + fmt(dual.gap));

    return all_pass ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "least Chebyshev polynomials, dual signatures, and diagonally-determined set detection"};
    app.require_subcommand(1);

    std::string set_file, cert_file, out_file;
    int n = 1, kmax = 8;
    double tol = 1e-10, zero_threshold = 1e-6;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;

    auto* diag = app.add_subcommand("diag", "compute the diagonal of a set");
    diag->add_option("--set", set_file, "set description JSON")->required();
    diag->add_option("--tol", tol, "root isolation tolerance");
    diag->add_option("--out", out_file, "write result JSON here");

    auto* detect = app.add_subcommand("detect", "detect the diagonally-determined property");
    detect->add_option("--set", set_file, "semialgebraic set JSON")->required();
    detect->add_option("--kmax", kmax, "largest relaxation level");
    detect->add_option("--zero-threshold", zero_threshold, "certification threshold on rho");
    detect->add_option("--samples", samples, "certificate sampling count");
    detect->add_option("--seed", seed, "sampling seed");
    detect->add_option("--tol", tol, "diagonal root isolation tolerance");
    detect->add_option("--out", out_file, "write detection result JSON here");

    auto* least = app.add_subcommand("least", "construct the least polynomial");
    least->add_option("--set", set_file, "set description JSON");
    least->add_option("--cert", cert_file, "certificate JSON");
    least->add_option("--n", n, "degree")->required()->check(CLI::PositiveNumber);
    least->add_option("--out", out_file, "write result JSON here (plus .csv diagonal trace)");

    auto* sig = app.add_subcommand("signature", "construct and verify the optimal dual signature");
    sig->add_option("--set", set_file, "set description JSON");
    sig->add_option("--cert", cert_file, "certificate JSON");
    sig->add_option("--n", n, "degree")->required()->check(CLI::PositiveNumber);
    sig->add_option("--out", out_file, "write signature JSON here");

    auto* verify = app.add_subcommand("verify", "run the full cross-check suite");
    verify->add_option("--set", set_file, "set description JSON")->required();
    verify->add_option("--cert", cert_file, "certificate JSON (optional for analytic sets)");
    verify->add_option("--n", n, "degree")->required()->check(CLI::PositiveNumber);
    verify->add_option("--samples", samples, "sampling count");
    verify->add_option("--seed", seed, "sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(diag)) return cmd_diag(set_file, tol, out_file);
        if (app.got_subcommand(detect))
            return cmd_detect(set_file, kmax, zero_threshold, samples, seed, tol, out_file);
        if (app.got_subcommand(least)) return cmd_least(set_file, cert_file, n, out_file);
        if (app.got_subcommand(sig)) return cmd_signature(set_file, cert_file, n, out_file);
        if (app.got_subcommand(verify)) return cmd_verify(set_file, cert_file, n, samples, seed);
    } catch (const diagcheb::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNegative;
    }
    return kExitInputError;
}
