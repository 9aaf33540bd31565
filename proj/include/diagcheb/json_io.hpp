// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagcheb/leastcheb.hpp"
#include "diagcheb/polycore.hpp"
#include "diagcheb/sets.hpp"
#include "diagcheb/signature.hpp"
#include "diagcheb/sosdetect.hpp"

namespace diagcheb {

using json = nlohmann::json;

inline json to_json(const MultiPoly& p) {
    json terms = json::array();
    for (const auto& [m, c] : p.terms()) terms.push_back({{"exp", m.exponents}, {"coef", c}});
    return {{"dim", p.dimension()}, {"terms", std::move(terms)}};
}

inline MultiPoly multipoly_from_json(const json& j) {
    if (!j.contains("dim") || !j.contains("terms"))
        throw std::invalid_argument("polynomial JSON requires 'dim' and 'terms'");
    MultiPoly p(j.at("dim").get<int>());
    for (const json& t : j.at("terms")) {
        std::vector<int> e = t.at("exp").get<std::vector<int>>();
        if (static_cast<int>(e.size()) != p.dimension())
            throw std::invalid_argument("polynomial JSON: exponent length != dim");
        p.add_term(Monomial(std::move(e)), t.at("coef").get<double>());
    }
    return p;
}

inline json to_json(const Box& b) { return {{"lo", b.lo}, {"hi", b.hi}}; }

inline json to_json(const SetDescription& s);

namespace detail {

struct SetToJson {
    json operator()(const PNormBall& b) const {
        json j{{"kind", "pnorm_ball"}, {"radius", b.radius}, {"dim", b.dim}};
        if (std::isinf(b.p))
            j["p"] = "inf";
        else
            j["p"] = b.p;
        return j;
    }
    json operator()(const OwlBall& o) const { return {{"kind", "owl_ball"}, {"weights", o.weights}}; }
    json operator()(const SimplexOrdered& s) const {
        return {{"kind", "simplex_ordered"}, {"dim", s.dim}};
    }
    json operator()(const SimplexStandard& s) const {
        return {{"kind", "simplex_standard"}, {"dim", s.dim}};
    }
    json operator()(const Segment& s) const { return {{"kind", "segment"}, {"a", s.a}, {"b", s.b}}; }
    json operator()(const SemiAlgebraic& s) const {
        json cs = json::array();
        for (const MultiPoly& g : s.constraints) cs.push_back(diagcheb::to_json(g));
        json j{{"kind", "semialgebraic"}, {"constraints", std::move(cs)}};
        if (s.bbox) j["bbox"] = diagcheb::to_json(*s.bbox);
        return j;
    }
    json operator()(const Translated& t) const {
        return {{"kind", "translated"}, {"shift", t.shift}, {"inner", diagcheb::to_json(*t.inner)}};
    }
};

}  // namespace detail

inline json to_json(const SetDescription& s) { return std::visit(detail::SetToJson{}, s.value()); }

inline SetDescription set_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pnorm_ball") {
        PNormBall b;
        const json& pj = j.at("p");
        b.p = pj.is_string() ? std::numeric_limits<double>::infinity() : pj.get<double>();
        if (pj.is_string() && pj.get<std::string>() != "inf")
            throw std::invalid_argument("pnorm_ball: p must be a number or \"inf\"");
        b.radius = j.value("radius", 1.0);
        b.dim = j.at("dim").get<int>();
        return SetDescription(b);
    }
    if (kind == "owl_ball") return SetDescription(OwlBall{j.at("weights").get<std::vector<double>>()});
    if (kind == "simplex_ordered") return SetDescription(SimplexOrdered{j.at("dim").get<int>()});
    if (kind == "simplex_standard") return SetDescription(SimplexStandard{j.at("dim").get<int>()});
    if (kind == "segment")
        return SetDescription(
            Segment{j.at("a").get<std::vector<double>>(), j.at("b").get<std::vector<double>>()});
    if (kind == "semialgebraic") {
        SemiAlgebraic s;
        for (const json& c : j.at("constraints")) s.constraints.push_back(multipoly_from_json(c));
        if (j.contains("bbox"))
            s.bbox = Box{j.at("bbox").at("lo").get<std::vector<double>>(),
                         j.at("bbox").at("hi").get<std::vector<double>>()};
        return SetDescription(std::move(s));
    }
    if (kind == "translated") {
        auto inner = std::make_shared<SetDescription>(set_from_json(j.at("inner")));
        return SetDescription(Translated{j.at("shift").get<double>(), std::move(inner)});
    }
    throw std::invalid_argument("unknown set kind: " + kind);
}

inline json to_json(const DDCertificate& c) {
    json prov;
    if (std::holds_alternative<DDCertificate::Analytic>(c.provenance)) {
        prov = {{"kind", "analytic"}};
    } else if (const auto* s = std::get_if<DDCertificate::Sdp>(&c.provenance)) {
        prov = {{"kind", "sdp"}, {"level", s->level}, {"rho", s->rho}};
    } else {
        prov = {{"kind", "user"}};
    }
    return {{"v", c.v}, {"a", c.a}, {"b", c.b}, {"provenance", std::move(prov)}};
}

inline DDCertificate certificate_from_json(const json& j) {
    DDCertificate c;
    c.v = j.at("v").get<std::vector<double>>();
    c.a = j.at("a").get<double>();
    c.b = j.at("b").get<double>();
    c.provenance = DDCertificate::User{};
    if (j.contains("provenance")) {
        const json& p = j.at("provenance");
        const std::string kind = p.is_string() ? p.get<std::string>() : p.value("kind", "user");
        if (kind == "analytic")
            c.provenance = DDCertificate::Analytic{};
        else if (kind == "sdp")
            c.provenance = DDCertificate::Sdp{p.value("level", 0), p.value("rho", 0.0)};
    }
    return c;
}

inline json to_json(const LeastResult& r) {
    return {{"value", r.value},
            {"degree", r.degree},
            {"poly", to_json(r.polynomial)},
            {"certificate", to_json(r.certificate)}};
}

inline json to_json(const Signature& s, double gamma, double gap) {
    return {{"points", s.points}, {"signs", s.signs},   {"weights", s.weights},
            {"gamma", gamma},     {"degree", s.degree_n}, {"gap", gap}};
}

inline json to_json(const CertificateCheck& c) {
    return {{"max_violation", c.max_violation},
            {"sum_v", c.sum_v},
            {"diag_points_in_set", c.diag_points_in_set}};
}

inline json gram_to_json(const Eigen::MatrixXd& G) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < G.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j2 = 0; j2 < G.cols(); ++j2) row.push_back(G(i, j2));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const QuadraticModuleEncoding& enc) {
    json blocks = json::array();
    for (const GramBlock& b : enc.blocks) {
        json basis = json::array();
        for (const Monomial& m : b.basis) basis.push_back(m.exponents);
        blocks.push_back({{"constraint_index", b.constraint_index}, {"basis", std::move(basis)}});
    }
    return {{"level", enc.level}, {"dim", enc.dim}, {"blocks", std::move(blocks)}, {"dropped", enc.dropped}};
}

inline json to_json(const DetectionResult& r) {
    json hist = json::array();
    for (const LevelReport& lev : r.history) {
        json h{{"k", lev.k},
               {"solver_status", to_string(lev.solver_status)},
               {"iterations", lev.iterations},
               {"certified", lev.certified}};
        if (std::isfinite(lev.rho)) h["rho"] = lev.rho;
        if (std::isfinite(lev.coeff_deviation)) h["coeff_deviation"] = lev.coeff_deviation;
        if (std::isfinite(lev.min_gram_eigenvalue)) h["min_gram_eigenvalue"] = lev.min_gram_eigenvalue;
        if (std::isfinite(lev.check_violation)) h["check_violation"] = lev.check_violation;
        hist.push_back(std::move(h));
    }
    json grams_lower = json::array(), grams_upper = json::array();
    for (const auto& G : r.grams_lower) grams_lower.push_back(gram_to_json(G));
    for (const auto& G : r.grams_upper) grams_upper.push_back(gram_to_json(G));
    json out{{"status", to_string(r.status)},
             {"level", r.level},
             {"v_prime", r.v_prime},
             {"history", std::move(hist)},
             {"encodings", {{"lower", to_json(r.enc_lower)}, {"upper", to_json(r.enc_upper)}}},
             {"grams", {{"lower", std::move(grams_lower)}, {"upper", std::move(grams_upper)}}},
             {"detail", r.detail}};
    if (std::isfinite(r.rho)) out["rho"] = r.rho;
    if (r.certificate) out["certificate"] = to_json(*r.certificate);
    return out;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace diagcheb
